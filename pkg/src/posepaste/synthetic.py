"""Toy dataset generation for tests, demos and benchmarks.

Produces pedestrian images with plausible torso keypoints and donor images
whose "bicycle" is a drawn shape with an exact binary mask. Content is
deterministic per seed.
"""
from __future__ import annotations

import json
from pathlib import Path

import cv2
import numpy as np

from .ingest import DonorRecord, PersonRecord, PoseKeypoints, keypoints_to_entry


def _rand_keypoints(rng: np.random.Generator, w: int, h: int) -> PoseKeypoints:
    cx = w / 2 + rng.uniform(-w * 0.1, w * 0.1)
    shoulder_y = h * 0.3 + rng.uniform(-5, 5)
    hip_y = shoulder_y + h * rng.uniform(0.22, 0.35)
    half = w * rng.uniform(0.12, 0.2)
    lean = rng.uniform(-12, 12)  # degrees from vertical
    torso = hip_y - shoulder_y
    dx = torso * np.tan(np.radians(lean))
    ls = (cx - half, shoulder_y)
    rs = (cx + half, shoulder_y)
    neck = (cx + dx / 2, shoulder_y)
    lh = (cx - half * 0.8 - dx / 2, hip_y)
    rh = (cx + half * 0.8 - dx / 2, hip_y)
    conf = {k: 0.9 for k in ("left_shoulder", "right_shoulder", "left_hip", "right_hip", "neck")}
    return PoseKeypoints(ls, rs, lh, rh, neck, conf)


def make_person(rng: np.random.Generator, w: int = 64, h: int = 128) -> tuple[np.ndarray, PoseKeypoints]:
    """A flat-color figure on a noisy background, with torso keypoints."""
    img = rng.integers(0, 80, (h, w, 3), dtype=np.uint8)
    kp = _rand_keypoints(rng, w, h)
    color = tuple(int(v) for v in rng.integers(100, 255, 3))
    hip = (int((kp.left_hip[0] + kp.right_hip[0]) / 2), int(kp.left_hip[1]))
    neck = (int(kp.neck[0]), int(kp.neck[1]))
    cv2.line(img, neck, hip, color, thickness=max(3, w // 8))
    cv2.circle(img, (neck[0], max(neck[1] - h // 12, 0)), h // 16, color, -1)
    return img, kp


def make_donor(rng: np.random.Generator, w: int = 256, h: int = 256) -> tuple[np.ndarray, np.ndarray, PoseKeypoints]:
    """A rider figure plus a drawn 'bicycle' (two wheels and a bar) whose
    pixels are exactly the binary mask."""
    img = rng.integers(0, 80, (h, w, 3), dtype=np.uint8)
    kp = _rand_keypoints(rng, w, h)
    mask = np.zeros((h, w), dtype=np.uint8)
    hip_x = int((kp.left_hip[0] + kp.right_hip[0]) / 2)
    hip_y = int(kp.left_hip[1])
    wheel_r = max(6, int(h * rng.uniform(0.06, 0.1)))
    wheel_y = min(hip_y + int(h * 0.2), h - wheel_r - 1)
    spread = int(w * 0.15)
    for wx in (hip_x - spread, hip_x + spread):
        cv2.circle(mask, (int(np.clip(wx, wheel_r, w - wheel_r - 1)), wheel_y), wheel_r, 1, -1)
    cv2.line(mask, (hip_x - spread, wheel_y), (hip_x + spread, wheel_y), 1, thickness=3)
    cv2.line(mask, (hip_x, hip_y), (hip_x, wheel_y), 1, thickness=3)
    color = tuple(int(v) for v in rng.integers(120, 255, 3))
    img[mask.astype(bool)] = color
    return img, mask, kp


def build_person_records(n: int, seed: int, w: int = 64, h: int = 128) -> list[PersonRecord]:
    rng = np.random.default_rng(seed)
    records = []
    for i in range(n):
        img, kp = make_person(rng, w, h)
        identity = i % max(1, n // 2) + 1
        cam = i % 3 + 1
        name = f"{identity:04d}_c{cam}s1_{i:06d}_00.jpg"
        records.append(PersonRecord(img, kp, identity, cam, name))
    return records


def build_donor_records(m: int, seed: int, w: int = 256, h: int = 256) -> list[DonorRecord]:
    rng = np.random.default_rng(seed + 1)
    records = []
    for j in range(m):
        img, mask, kp = make_donor(rng, w, h)
        records.append(DonorRecord(img, kp, mask, f"donor_{j:04d}.jpg"))
    return records


def write_person_dataset(
    directory: str | Path, n: int, seed: int, w: int = 64, h: int = 128
) -> Path:
    """Write n pedestrian JPEGs plus keypoints.json; returns the annotation path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for r in build_person_records(n, seed, w, h):
        path = directory / r.source_path
        cv2.imwrite(str(path), cv2.cvtColor(r.image, cv2.COLOR_RGB2BGR))
        entries.append(keypoints_to_entry(path.name, r.keypoints))
    ann = directory / "keypoints.json"
    ann.write_text(json.dumps(entries, indent=1))
    return ann


def write_donor_dataset(
    directory: str | Path, m: int, seed: int, w: int = 256, h: int = 256
) -> Path:
    """Write m donor JPEGs, their masks, and keypoints.json."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for r in build_donor_records(m, seed, w, h):
        path = directory / r.source_path
        cv2.imwrite(str(path), cv2.cvtColor(r.image, cv2.COLOR_RGB2BGR))
        cv2.imwrite(str(directory / (path.stem + ".mask.png")), r.mask * 255)
        entries.append(keypoints_to_entry(path.name, r.keypoints))
    ann = directory / "keypoints.json"
    ann.write_text(json.dumps(entries, indent=1))
    return ann
