"""Sprite extraction from masked donors and hard-alpha pasting.

The donor sprite is anchored at the (warped) donor mid-hip and pasted so
that anchor lands on the pedestrian mid-hip, rounded to integer pixels.
The sprite overwrites the pedestrian where its alpha is 1; no blending.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import pose
from .geometry import AffineTransform, apply_to_point, warp_image, warp_mask
from .ingest import DonorRecord, PersonRecord
from .pose import Point


@dataclass
class Sprite:
    pixels: np.ndarray  # hxwx3 uint8
    alpha: np.ndarray   # hxw uint8 {0,1}
    anchor: Point       # donor mid-hip in sprite coordinates


@dataclass
class CompositeMeta:
    transform: AffineTransform
    anchor: Point            # warped donor mid-hip, donor frame
    target: Point            # pedestrian mid-hip
    changed_pixels: int      # in-bounds alpha=1 pixels written
    skip_reason: str | None = None


def extract_object(img: np.ndarray, mask: np.ndarray, anchor: Point) -> Sprite | None:
    """Crop the masked object to its bounding box; None signals an empty mask."""
    if img.shape[:2] != mask.shape[:2]:
        raise ValueError(f"image/mask shape mismatch: {img.shape[:2]} vs {mask.shape[:2]}")
    ys, xs = np.nonzero(mask)
    if ys.size == 0:
        return None
    y0, y1 = ys.min(), ys.max() + 1
    x0, x1 = xs.min(), xs.max() + 1
    return Sprite(
        pixels=img[y0:y1, x0:x1].copy(),
        alpha=mask[y0:y1, x0:x1].astype(np.uint8),
        anchor=(anchor[0] - x0, anchor[1] - y0),
    )


def _placement(base_shape, sprite: Sprite, target: Point):
    """Overlapping base and sprite slices for an anchored paste, or None if
    the sprite falls entirely outside the base."""
    bh, bw = base_shape[:2]
    sh, sw = sprite.alpha.shape
    ox = int(math.floor(target[0] - sprite.anchor[0] + 0.5))
    oy = int(math.floor(target[1] - sprite.anchor[1] + 0.5))
    bx0, by0 = max(ox, 0), max(oy, 0)
    bx1, by1 = min(ox + sw, bw), min(oy + sh, bh)
    if bx0 >= bx1 or by0 >= by1:
        return None
    base_sl = (slice(by0, by1), slice(bx0, bx1))
    spr_sl = (slice(by0 - oy, by1 - oy), slice(bx0 - ox, bx1 - ox))
    return base_sl, spr_sl


def paste(base: np.ndarray, sprite: Sprite | None, target: Point) -> np.ndarray:
    """Paste the sprite onto a copy of base, anchor aligned to target.

    Out-of-bounds sprite regions are clipped; an empty sprite (None) returns
    base unchanged (still a copy).
    """
    out = base.copy()
    if sprite is None:
        return out
    placed = _placement(base.shape, sprite, target)
    if placed is None:
        return out
    base_sl, spr_sl = placed
    hit = sprite.alpha[spr_sl].astype(bool)
    region = out[base_sl]
    region[hit] = sprite.pixels[spr_sl][hit]
    return out


def compose_fake(
    p: PersonRecord, d: DonorRecord, t: AffineTransform
) -> tuple[np.ndarray, CompositeMeta]:
    """Warp the donor, extract its masked object, paste onto the pedestrian.

    An empty warped mask yields the pedestrian image unchanged with
    skip_reason set.
    """
    h, w = d.image.shape[:2]
    warped_img = warp_image(d.image, t, w, h)
    warped_mask = warp_mask(d.mask, t, w, h)
    donor_hip = pose.mid_hip(d.keypoints.left_hip, d.keypoints.right_hip)
    anchor = apply_to_point(t, donor_hip)
    target = pose.mid_hip(p.keypoints.left_hip, p.keypoints.right_hip)
    sprite = extract_object(warped_img, warped_mask, anchor)
    if sprite is None:
        return p.image.copy(), CompositeMeta(
            transform=t, anchor=anchor, target=target,
            changed_pixels=0, skip_reason="empty_mask",
        )
    out = paste(p.image, sprite, target)
    placed = _placement(p.image.shape, sprite, target)
    changed = int(sprite.alpha[placed[1]].sum()) if placed is not None else 0
    return out, CompositeMeta(
        transform=t, anchor=anchor, target=target, changed_pixels=changed,
    )
