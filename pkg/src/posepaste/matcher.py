"""Donor selection: orientation first, then nearest slope, then nearest height.

Each pedestrian is matched independently; donors may be reused. Ties after
the height filter are broken uniformly at random from a per-pedestrian
substream seeded by (seed, pedestrian_index), so results do not depend on
evaluation order or parallelism.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .pose import Orientation, PoseDescriptor


@dataclass(frozen=True)
class MatchResult:
    pedestrian_index: int
    donor_index: int
    orientation_matched: bool
    slope_residual_q: float   # circular distance between quantized slopes
    height_residual_q: float  # |height_q difference|
    relaxation_level: int     # 0 = exact protocol, 1 = orientation widened to all donors


def circular_distance(a: float, b: float) -> float:
    """Distance between two angles in degrees, in [0, 180]."""
    d = abs(a - b) % 360.0
    return min(d, 360.0 - d)


def find_equal_orientation(donors: Sequence[PoseDescriptor], t: Orientation) -> list[int]:
    return [i for i, d in enumerate(donors) if d.orientation == t]


def find_nearest_slope(
    donors: Sequence[PoseDescriptor], pool: Iterable[int], k_q: float
) -> list[int]:
    """Indices in pool minimizing circular distance of quantized slopes."""
    pool = sorted(pool)
    if not pool:
        raise ValueError("empty candidate pool")
    dist = {i: circular_distance(donors[i].slope_q, k_q) for i in pool}
    best = min(dist.values())
    return [i for i in pool if dist[i] == best]


def find_nearest_height(
    donors: Sequence[PoseDescriptor], pool: Iterable[int], h_q: float
) -> list[int]:
    """Indices in pool minimizing |height_q - h_q|."""
    pool = sorted(pool)
    if not pool:
        raise ValueError("empty candidate pool")
    dist = {i: abs(donors[i].height_q - h_q) for i in pool}
    best = min(dist.values())
    return [i for i in pool if dist[i] == best]


def match_one(
    p: PoseDescriptor,
    donors: Sequence[PoseDescriptor],
    rng: np.random.Generator,
    pedestrian_index: int = 0,
) -> MatchResult:
    """Select a donor for one pedestrian by the sequential priority filter."""
    if not donors:
        raise ValueError("donor list is empty")
    pool0 = find_equal_orientation(donors, p.orientation)
    relaxation = 0
    if not pool0:
        pool0 = list(range(len(donors)))
        relaxation = 1
    pool1 = find_nearest_slope(donors, pool0, p.slope_q)
    pool2 = find_nearest_height(donors, pool1, p.height_q)
    j = pool2[int(rng.integers(len(pool2)))]
    d = donors[j]
    return MatchResult(
        pedestrian_index=pedestrian_index,
        donor_index=j,
        orientation_matched=(d.orientation == p.orientation),
        slope_residual_q=circular_distance(d.slope_q, p.slope_q),
        height_residual_q=abs(d.height_q - p.height_q),
        relaxation_level=relaxation,
    )


def substream(seed: int, pedestrian_index: int) -> np.random.Generator:
    """Deterministic per-pedestrian random stream."""
    return np.random.default_rng([seed, pedestrian_index])


def match_all(
    pedestrians: Sequence[PoseDescriptor],
    donors: Sequence[PoseDescriptor],
    seed: int,
) -> list[MatchResult]:
    if not donors:
        raise ValueError("donor list is empty")
    return [
        match_one(p, donors, substream(seed, i), pedestrian_index=i)
        for i, p in enumerate(pedestrians)
    ]
