"""Dataset loading: keypoint annotation files, images, masks, record assembly.

Annotation schema: a JSON list of objects, each with a "file" field (path
relative to the dataset directory) and either
  - "named_points": {name: [x, y, confidence]} with names left_shoulder,
    right_shoulder, left_hip, right_hip, neck; or
  - "coco17": a list of 17 [x, y, confidence] triples in standard body-keypoint
    order (neck is synthesized as the shoulder midpoint).

Masks are 8-bit grayscale images, one per donor image, same stem with a
".mask.png" suffix; pixels >= 128 binarize to 1.

Person filenames follow the Market1501 convention "PPPP_cCsS_...": identity
from the leading number, camera from the digit after "c".
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

from .pose import Point

MASK_THRESHOLD = 128
CONFIDENCE_THRESHOLD = 0.3

LANDMARK_NAMES = ("left_shoulder", "right_shoulder", "left_hip", "right_hip", "neck")

# standard 17-point body-keypoint indices
COCO_LEFT_SHOULDER = 5
COCO_RIGHT_SHOULDER = 6
COCO_LEFT_HIP = 11
COCO_RIGHT_HIP = 12

IMAGE_EXTENSIONS = {".jpg", ".jpeg", ".png", ".bmp"}

_MARKET_NAME = re.compile(r"^(-?\d+)_c(\d+)")


class KeypointParseError(ValueError):
    """Malformed annotation file or entry."""


class DatasetError(ValueError):
    """Record assembly failure (missing files, dimension mismatch, bad names)."""


@dataclass(frozen=True)
class PoseKeypoints:
    left_shoulder: Point
    right_shoulder: Point
    left_hip: Point
    right_hip: Point
    neck: Point
    confidences: dict[str, float] = field(default_factory=dict)


@dataclass
class PersonRecord:
    image: np.ndarray          # HxWx3 uint8, RGB
    keypoints: PoseKeypoints
    identity: int
    camera: int
    source_path: str


@dataclass
class DonorRecord:
    image: np.ndarray          # HxWx3 uint8, RGB
    keypoints: PoseKeypoints
    mask: np.ndarray           # HxW uint8, strictly {0, 1}
    source_path: str


def parse_market_filename(name: str) -> tuple[int, int]:
    """Identity and camera from a Market1501-style filename."""
    m = _MARKET_NAME.match(Path(name).name)
    if m is None:
        raise DatasetError(f"filename does not follow the PPPP_cC convention: {name}")
    return int(m.group(1)), int(m.group(2))


def _point_from_triple(triple, where: str) -> tuple[Point, float]:
    if not isinstance(triple, (list, tuple)) or len(triple) != 3:
        raise KeypointParseError(f"{where}: expected [x, y, confidence], got {triple!r}")
    x, y, c = (float(v) for v in triple)
    if not (math.isfinite(x) and math.isfinite(y)):
        raise KeypointParseError(f"{where}: non-finite coordinate {triple!r}")
    if not 0.0 <= c <= 1.0:
        raise KeypointParseError(f"{where}: confidence {c} outside [0, 1]")
    return (x, y), c


def _keypoints_from_entry(entry: dict, where: str) -> PoseKeypoints | None:
    """Build PoseKeypoints from one annotation entry, or None if a required
    landmark is missing / below the confidence threshold."""
    if "named_points" in entry:
        pts: dict[str, Point] = {}
        confs: dict[str, float] = {}
        named = entry["named_points"]
        if not isinstance(named, dict):
            raise KeypointParseError(f"{where}: named_points must be an object")
        for name in LANDMARK_NAMES:
            if name not in named:
                return None
            p, c = _point_from_triple(named[name], f"{where}.{name}")
            if c < CONFIDENCE_THRESHOLD:
                return None
            pts[name] = p
            confs[name] = c
        return PoseKeypoints(
            left_shoulder=pts["left_shoulder"],
            right_shoulder=pts["right_shoulder"],
            left_hip=pts["left_hip"],
            right_hip=pts["right_hip"],
            neck=pts["neck"],
            confidences=confs,
        )
    if "coco17" in entry:
        triples = entry["coco17"]
        if not isinstance(triples, list) or len(triples) != 17:
            raise KeypointParseError(f"{where}: coco17 must hold 17 triples")
        idx = {
            "left_shoulder": COCO_LEFT_SHOULDER,
            "right_shoulder": COCO_RIGHT_SHOULDER,
            "left_hip": COCO_LEFT_HIP,
            "right_hip": COCO_RIGHT_HIP,
        }
        pts = {}
        confs = {}
        for name, i in idx.items():
            p, c = _point_from_triple(triples[i], f"{where}.coco17[{i}]")
            if c < CONFIDENCE_THRESHOLD:
                return None
            pts[name] = p
            confs[name] = c
        ls, rs = pts["left_shoulder"], pts["right_shoulder"]
        pts["neck"] = ((ls[0] + rs[0]) / 2.0, (ls[1] + rs[1]) / 2.0)
        confs["neck"] = min(confs["left_shoulder"], confs["right_shoulder"])
        return PoseKeypoints(
            left_shoulder=pts["left_shoulder"],
            right_shoulder=pts["right_shoulder"],
            left_hip=pts["left_hip"],
            right_hip=pts["right_hip"],
            neck=pts["neck"],
            confidences=confs,
        )
    raise KeypointParseError(f"{where}: entry has neither named_points nor coco17")


def parse_keypoint_file(path: str | Path) -> tuple[list[tuple[str, PoseKeypoints]], list[str]]:
    """Parse an annotation file.

    Returns (entries, skipped): entries as (relative file path, keypoints)
    pairs in file order, and the relative paths of records skipped for
    missing or low-confidence landmarks.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise KeypointParseError(f"{path}: {exc}") from exc
    if not isinstance(data, list):
        raise KeypointParseError(f"{path}: top level must be a list")
    entries: list[tuple[str, PoseKeypoints]] = []
    skipped: list[str] = []
    for i, entry in enumerate(data):
        where = f"{path}[{i}]"
        if not isinstance(entry, dict) or "file" not in entry:
            raise KeypointParseError(f"{where}: entry must be an object with a 'file' field")
        rel = str(entry["file"])
        kp = _keypoints_from_entry(entry, where)
        if kp is None:
            skipped.append(rel)
        else:
            entries.append((rel, kp))
    return entries, skipped


def keypoints_to_entry(rel_path: str, kp: PoseKeypoints) -> dict:
    """Serialize keypoints back to the annotation schema (named_points form)."""
    named = {}
    for name in LANDMARK_NAMES:
        x, y = getattr(kp, name)
        named[name] = [x, y, kp.confidences.get(name, 1.0)]
    return {"file": rel_path, "named_points": named}


def load_image(path: str | Path) -> np.ndarray:
    img = cv2.imread(str(path), cv2.IMREAD_COLOR)
    if img is None:
        raise DatasetError(f"unreadable image: {path}")
    return cv2.cvtColor(img, cv2.COLOR_BGR2RGB)


def load_mask(path: str | Path) -> np.ndarray:
    """Load an 8-bit grayscale raster and binarize at >= 128."""
    raw = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE)
    if raw is None:
        raise DatasetError(f"unreadable mask: {path}")
    return (raw >= MASK_THRESHOLD).astype(np.uint8)


def _indexed_annotations(annotations: str | Path) -> tuple[dict[str, PoseKeypoints], list[str]]:
    entries, skipped = parse_keypoint_file(annotations)
    return dict(entries), skipped


def load_person_dataset(
    directory: str | Path, annotations: str | Path, strict: bool = False
) -> tuple[list[PersonRecord], list[str]]:
    """Load pedestrian records.

    Returns (records, skipped). Records are sorted by source path for
    determinism. Images without an annotation are skipped; filenames that do
    not parse as Market1501-style raise in strict mode and skip otherwise.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetError(f"not a directory: {directory}")
    by_file, skipped = _indexed_annotations(annotations)
    skipped = list(skipped)
    records = []
    for path in sorted(directory.iterdir()):
        if path.suffix.lower() not in IMAGE_EXTENSIONS or path.name.endswith(".mask.png"):
            continue
        kp = by_file.get(path.name)
        if kp is None:
            skipped.append(path.name)
            continue
        try:
            identity, camera = parse_market_filename(path.name)
        except DatasetError:
            if strict:
                raise
            skipped.append(path.name)
            continue
        records.append(
            PersonRecord(
                image=load_image(path),
                keypoints=kp,
                identity=identity,
                camera=camera,
                source_path=str(path),
            )
        )
    return records, skipped


def load_donor_dataset(
    directory: str | Path,
    annotations: str | Path,
    mask_dir: str | Path | None = None,
) -> tuple[list[DonorRecord], list[str]]:
    """Load donor records (image + keypoints + binary mask).

    Masks live next to the images (or under mask_dir) as "<stem>.mask.png".
    A donor whose mask dimensions differ from its image raises DatasetError.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise DatasetError(f"not a directory: {directory}")
    mask_dir = Path(mask_dir) if mask_dir is not None else directory
    by_file, skipped = _indexed_annotations(annotations)
    skipped = list(skipped)
    records = []
    for path in sorted(directory.iterdir()):
        if path.suffix.lower() not in IMAGE_EXTENSIONS or path.name.endswith(".mask.png"):
            continue
        kp = by_file.get(path.name)
        if kp is None:
            skipped.append(path.name)
            continue
        mask_path = mask_dir / (path.stem + ".mask.png")
        if not mask_path.exists():
            skipped.append(path.name)
            continue
        image = load_image(path)
        mask = load_mask(mask_path)
        if mask.shape != image.shape[:2]:
            raise DatasetError(
                f"mask/image dimension mismatch for {path.name}: "
                f"{mask.shape} vs {image.shape[:2]}"
            )
        records.append(
            DonorRecord(image=image, keypoints=kp, mask=mask, source_path=str(path))
        )
    return records, skipped
