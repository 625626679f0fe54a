"""Affine correction from matched pose descriptors, and raster warping.

Transforms are 2x3 matrices [a b tx; c d ty] acting on column points.
Positive rotation angle is clockwise on screen (image y grows downward).
Warping uses inverse mapping with the pixel-center-at-(i+0.5, j+0.5)
convention: output pixel (x, y) samples the source at t^-1(x+0.5, y+0.5),
bilinear for images and nearest-neighbor for masks; samples outside the
source fill with 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .pose import Point, PoseDescriptor, wrap_angle


@dataclass(frozen=True)
class AffineTransform:
    m: np.ndarray  # 2x3 float64

    def __post_init__(self):
        m = np.asarray(self.m, dtype=np.float64)
        if m.shape != (2, 3):
            raise ValueError(f"expected a 2x3 matrix, got shape {m.shape}")
        object.__setattr__(self, "m", m)

    @property
    def linear(self) -> np.ndarray:
        return self.m[:, :2]

    @property
    def translation(self) -> np.ndarray:
        return self.m[:, 2]

    @staticmethod
    def identity() -> "AffineTransform":
        return AffineTransform(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))

    @staticmethod
    def rotation_scale_about(pivot: Point, theta_deg: float, scale: float = 1.0) -> "AffineTransform":
        """Similarity transform: rotate by theta (screen-clockwise) and scale
        uniformly about pivot."""
        th = math.radians(theta_deg)
        c, s = math.cos(th), math.sin(th)
        lin = scale * np.array([[c, -s], [s, c]])
        piv = np.asarray(pivot, dtype=np.float64)
        t = piv - lin @ piv
        return AffineTransform(np.column_stack([lin, t]))

    def inverse(self) -> "AffineTransform":
        lin = self.linear
        det = lin[0, 0] * lin[1, 1] - lin[0, 1] * lin[1, 0]
        if abs(det) < 1e-12:
            raise ValueError("transform is not invertible")
        inv_lin = np.linalg.inv(lin)
        return AffineTransform(np.column_stack([inv_lin, -inv_lin @ self.translation]))


def affine_from_match(
    p: PoseDescriptor, d: PoseDescriptor, scale_correct: bool = True
) -> AffineTransform:
    """Pose-correction transform for a matched (pedestrian, donor) pair.

    Rotates the donor by the raw slope difference about the donor mid-hip;
    with scale_correct, also scales by the torso-length ratio about the
    same pivot.
    """
    if d.height_raw <= 0:
        raise ValueError("degenerate donor descriptor: zero torso length")
    theta = wrap_angle(p.slope_raw - d.slope_raw)
    s = p.height_raw / d.height_raw if scale_correct else 1.0
    return AffineTransform.rotation_scale_about(d.mid_hip, theta, s)


def apply_to_point(t: AffineTransform, p: Point) -> Point:
    q = t.linear @ np.asarray(p, dtype=np.float64) + t.translation
    return (float(q[0]), float(q[1]))


def _inverse_sample_grid(t: AffineTransform, out_w: int, out_h: int) -> tuple[np.ndarray, np.ndarray]:
    """Continuous source coordinates for every output pixel center."""
    inv = t.inverse()
    xs = np.arange(out_w, dtype=np.float64) + 0.5
    ys = np.arange(out_h, dtype=np.float64) + 0.5
    gx_x, gx_y = np.meshgrid(xs, ys)
    lin, tr = inv.linear, inv.translation
    sx = lin[0, 0] * gx_x + lin[0, 1] * gx_y + tr[0]
    sy = lin[1, 0] * gx_x + lin[1, 1] * gx_y + tr[1]
    return sx, sy


def warp_image(img: np.ndarray, t: AffineTransform, out_w: int, out_h: int) -> np.ndarray:
    """Warp an RGB image by t, bilinear, black fill outside the source."""
    h, w = img.shape[:2]
    sx, sy = _inverse_sample_grid(t, out_w, out_h)
    # positions relative to pixel centers
    u = sx - 0.5
    v = sy - 0.5
    x0 = np.floor(u).astype(np.int64)
    y0 = np.floor(v).astype(np.int64)
    fx = u - x0
    fy = v - y0
    out = np.zeros((out_h, out_w, 3), dtype=np.float64)
    src = img.astype(np.float64)
    for dy in (0, 1):
        wy = (1.0 - fy) if dy == 0 else fy
        yc = y0 + dy
        for dx in (0, 1):
            wx = (1.0 - fx) if dx == 0 else fx
            xc = x0 + dx
            valid = (xc >= 0) & (xc < w) & (yc >= 0) & (yc < h)
            weight = np.where(valid, wx * wy, 0.0)
            xs_c = np.clip(xc, 0, w - 1)
            ys_c = np.clip(yc, 0, h - 1)
            out += weight[..., None] * src[ys_c, xs_c]
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def warp_mask(mask: np.ndarray, t: AffineTransform, out_w: int, out_h: int) -> np.ndarray:
    """Warp a binary mask by t with nearest-neighbor sampling."""
    h, w = mask.shape[:2]
    sx, sy = _inverse_sample_grid(t, out_w, out_h)
    # pixel containing the continuous source point
    xi = np.floor(sx).astype(np.int64)
    yi = np.floor(sy).astype(np.int64)
    valid = (xi >= 0) & (xi < w) & (yi >= 0) & (yi < h)
    out = np.zeros((out_h, out_w), dtype=np.uint8)
    out[valid] = mask[yi[valid], xi[valid]]
    return out
