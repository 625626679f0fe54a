"""Rank-k (CMC) and mAP under the standard Market1501-style ReID protocol.

Exclusions per query: gallery entries with the same identity AND the same
camera are ignored, and negative identities are junk, always ignored.
Ranking is by ascending distance; exact ties break by gallery index.
Queries with no valid relevant gallery entry are excluded from the
denominator and counted separately.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass
class EvalSet:
    distance_matrix: np.ndarray  # |Q| x |G|
    query_ids: np.ndarray
    gallery_ids: np.ndarray
    query_cams: np.ndarray
    gallery_cams: np.ndarray

    def __post_init__(self):
        self.distance_matrix = np.asarray(self.distance_matrix, dtype=np.float64)
        self.query_ids = np.asarray(self.query_ids, dtype=np.int64)
        self.gallery_ids = np.asarray(self.gallery_ids, dtype=np.int64)
        self.query_cams = np.asarray(self.query_cams, dtype=np.int64)
        self.gallery_cams = np.asarray(self.gallery_cams, dtype=np.int64)
        nq, ng = self.distance_matrix.shape
        if len(self.query_ids) != nq or len(self.query_cams) != nq:
            raise ValueError("query label lists inconsistent with distance matrix")
        if len(self.gallery_ids) != ng or len(self.gallery_cams) != ng:
            raise ValueError("gallery label lists inconsistent with distance matrix")
        if not np.all(np.isfinite(self.distance_matrix)):
            raise ValueError("distances must be finite")


@dataclass
class EvalResult:
    cmc: np.ndarray            # cmc[k-1] = Rank-k, up to max_rank
    mean_ap: float
    num_valid_queries: int
    num_excluded_queries: int  # queries with zero valid relevant matches


def evaluate(e: EvalSet, max_rank: int | None = None) -> EvalResult:
    """CMC curve and mAP in one pass over the queries."""
    nq, ng = e.distance_matrix.shape
    if max_rank is None or max_rank > ng:
        max_rank = ng
    cmc_sum = np.zeros(max_rank, dtype=np.float64)
    ap_sum = 0.0
    num_valid = 0
    num_excluded = 0
    for qi in range(nq):
        qid, qcam = e.query_ids[qi], e.query_cams[qi]
        # stable argsort: equal distances keep ascending gallery index
        order = np.argsort(e.distance_matrix[qi], kind="stable")
        keep = ~(
            ((e.gallery_ids[order] == qid) & (e.gallery_cams[order] == qcam))
            | (e.gallery_ids[order] < 0)
        )
        matches = (e.gallery_ids[order][keep] == qid).astype(np.float64)
        if matches.sum() == 0:
            num_excluded += 1
            continue
        num_valid += 1
        hits = matches.cumsum()
        cmc = np.minimum(hits, 1.0)[:max_rank]
        cmc_sum[: len(cmc)] += cmc
        if len(cmc) < max_rank:
            cmc_sum[len(cmc):] += cmc[-1]
        precision = hits / (np.arange(len(matches)) + 1.0)
        ap_sum += float((precision * matches).sum() / matches.sum())
    if num_valid == 0:
        raise ValueError("no query has a valid gallery match")
    return EvalResult(
        cmc=cmc_sum / num_valid,
        mean_ap=ap_sum / num_valid,
        num_valid_queries=num_valid,
        num_excluded_queries=num_excluded,
    )


def rank_k(e: EvalSet, k: int) -> float:
    if k < 1:
        raise ValueError("k must be >= 1")
    return float(evaluate(e, max_rank=k).cmc[k - 1])


def mean_average_precision(e: EvalSet) -> float:
    return evaluate(e).mean_ap


def load_distance_file(path: str | Path) -> EvalSet:
    """Read a TSV distance file.

    Two header lines "#gallery_ids" and "#gallery_cams" list the gallery
    labels; each following row is query_id, query_cam, then |G| distances.
    """
    lines = [ln.rstrip("\n") for ln in Path(path).read_text().splitlines() if ln.strip()]
    header = {}
    body = []
    for ln in lines:
        if ln.startswith("#"):
            parts = ln[1:].split("\t")
            header[parts[0]] = parts[1:]
        else:
            body.append(ln.split("\t"))
    for key in ("gallery_ids", "gallery_cams"):
        if key not in header:
            raise ValueError(f"{path}: missing '#{key}' header line")
    g_ids = np.array([int(v) for v in header["gallery_ids"]])
    g_cams = np.array([int(v) for v in header["gallery_cams"]])
    q_ids, q_cams, dists = [], [], []
    for i, row in enumerate(body):
        if len(row) != 2 + len(g_ids):
            raise ValueError(f"{path}: row {i} has {len(row)} fields, expected {2 + len(g_ids)}")
        q_ids.append(int(row[0]))
        q_cams.append(int(row[1]))
        dists.append([float(v) for v in row[2:]])
    return EvalSet(
        distance_matrix=np.array(dists, dtype=np.float64),
        query_ids=np.array(q_ids),
        gallery_ids=g_ids,
        query_cams=np.array(q_cams),
        gallery_cams=g_cams,
    )


def load_embeddings_file(path: str | Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read an embedding file: one line per item, "id cam v1 v2 ..." (tab or
    space separated). Returns (ids, cams, vectors)."""
    ids, cams, vecs = [], [], []
    for i, ln in enumerate(Path(path).read_text().splitlines()):
        if not ln.strip():
            continue
        parts = ln.split()
        if len(parts) < 3:
            raise ValueError(f"{path}: line {i} needs id, cam and at least one value")
        ids.append(int(parts[0]))
        cams.append(int(parts[1]))
        vecs.append([float(v) for v in parts[2:]])
    vectors = np.array(vecs, dtype=np.float64)
    if vectors.ndim != 2:
        raise ValueError(f"{path}: inconsistent vector lengths")
    return np.array(ids), np.array(cams), vectors


def eval_set_from_embeddings(query_path: str | Path, gallery_path: str | Path) -> EvalSet:
    """Euclidean-distance EvalSet from query and gallery embedding files."""
    q_ids, q_cams, q = load_embeddings_file(query_path)
    g_ids, g_cams, g = load_embeddings_file(gallery_path)
    if q.shape[1] != g.shape[1]:
        raise ValueError("query and gallery embedding dimensions differ")
    d = np.sqrt(np.maximum(
        (q * q).sum(1)[:, None] + (g * g).sum(1)[None, :] - 2.0 * q @ g.T, 0.0
    ))
    return EvalSet(d, q_ids, g_ids, q_cams, g_cams)
