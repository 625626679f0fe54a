"""Independent brute-force oracles used by unit and acceptance tests.

Deliberately written from the definitions, not via the library's own code
paths (shared RNG substreams excepted, since the uniform draw is part of
the contract under test).
"""
from __future__ import annotations

import numpy as np


def circ_dist(a: float, b: float) -> float:
    # enumerate wraps instead of using modular arithmetic
    return min(abs(a - b + 360.0 * k) for k in (-1, 0, 1))


def oracle_match_index(p, donors, rng: np.random.Generator) -> int:
    """Lexicographic (orientation-equality, slope-distance, height-distance)
    selection with a uniform draw over the final tie set."""
    ranked = []
    for i, d in enumerate(donors):
        key = (
            0 if d.orientation == p.orientation else 1,
            circ_dist(d.slope_q, p.slope_q),
            abs(d.height_q - p.height_q),
        )
        ranked.append((key, i))
    best = min(k for k, _ in ranked)
    tied = sorted(i for k, i in ranked if k == best)
    return tied[int(rng.integers(len(tied)))]


def oracle_rank_map(distmat, q_ids, g_ids, q_cams, g_cams, max_rank):
    """Per-query sort-and-scan CMC and mAP with Market1501-style exclusions.

    Returns (cmc array of length max_rank, mAP, num_valid_queries).
    """
    nq, ng = distmat.shape
    cmc_hits = np.zeros(max_rank)
    aps = []
    for qi in range(nq):
        entries = sorted(range(ng), key=lambda j: (distmat[qi, j], j))
        ranked = []
        for j in entries:
            if g_ids[j] < 0:
                continue
            if g_ids[j] == q_ids[qi] and g_cams[j] == q_cams[qi]:
                continue
            ranked.append(g_ids[j] == q_ids[qi])
        if not any(ranked):
            continue
        first_hit = ranked.index(True)
        for k in range(max_rank):
            if first_hit <= k:
                cmc_hits[k] += 1
        hits = 0
        precisions = []
        for rank, rel in enumerate(ranked, start=1):
            if rel:
                hits += 1
                precisions.append(hits / rank)
        aps.append(sum(precisions) / len(precisions))
    if not aps:
        raise ValueError("no valid query")
    return cmc_hits / len(aps), sum(aps) / len(aps), len(aps)
