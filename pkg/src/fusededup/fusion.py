"""Late-fusion pair scoring and density-based clustering."""

from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator, NamedTuple

import numpy as np

from .errors import ConfigError, ShapeError
from .linalg import unit_rows

NOISE = -1


@dataclass(frozen=True)
class FusionWeights:
    w_text: float = 0.4
    w_behavior: float = 0.35
    w_device: float = 0.25
    threshold: float = 0.75

    def __post_init__(self) -> None:
        ws = (self.w_text, self.w_behavior, self.w_device)
        if min(ws) < 0:
            raise ConfigError(f"fusion weights must be non-negative, got {ws}")
        if abs(sum(ws) - 1.0) > 1e-9:
            raise ConfigError(f"fusion weights must sum to 1, got {sum(ws)!r}")
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"fusion.threshold must lie in [0, 1], got {self.threshold}")

    def fuse(self, text_sim, behavior_sim, device_sim):
        return self.w_text * text_sim + self.w_behavior * behavior_sim + self.w_device * device_sim


@dataclass(frozen=True)
class ClusterParams:
    eps: float = 0.3
    min_samples: int = 2

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise ConfigError(f"dbscan.eps must be > 0, got {self.eps}")
        if self.min_samples < 1:
            raise ConfigError(f"dbscan.min_samples must be >= 1, got {self.min_samples}")


class ScoredPair(NamedTuple):
    i: int
    j: int
    text_sim: float
    behavior_sim: float
    device_sim: float
    fused: float


def _check_modalities(*mats: np.ndarray) -> int:
    lengths = {m.shape[0] for m in mats}
    if len(lengths) != 1:
        raise ShapeError(f"modality blocks have different record counts: {sorted(lengths)}")
    return lengths.pop()


def _row_blocks(n: int, chunk_size: int) -> list[tuple[int, int]]:
    # each block holds rows*n similarity entries per modality
    rows = max(1, chunk_size // max(n, 1))
    return [(s, min(s + rows, n)) for s in range(0, n - 1, rows)]


def _score_block(t, b, d, start, stop, w: FusionWeights) -> list[ScoredPair]:
    n = t.shape[0]
    ts = t[start:stop] @ t.T
    bs = b[start:stop] @ b.T
    ds = d[start:stop] @ d.T
    np.clip(ts, -1.0, 1.0, out=ts)
    np.clip(bs, -1.0, 1.0, out=bs)
    np.clip(ds, -1.0, 1.0, out=ds)
    fused = w.fuse(ts, bs, ds)
    # keep only the strict upper triangle, j > i
    upper = np.arange(n)[None, :] > np.arange(start, stop)[:, None]
    rows, cols = np.nonzero(upper & (fused > w.threshold))
    return [
        ScoredPair(int(start + r), int(c), float(ts[r, c]), float(bs[r, c]), float(ds[r, c]), float(fused[r, c]))
        for r, c in zip(rows, cols)
    ]


def score_pairs(
    text,
    behavior,
    device,
    weights: FusionWeights | None = None,
    chunk_size: int = 1 << 16,
    workers: int = 1,
) -> list[ScoredPair]:
    """Emit every pair ``i < j`` whose fused cosine similarity exceeds the threshold.

    The pair space is walked in row blocks holding about ``chunk_size``
    similarities each, so memory stays bounded regardless of ``n``. With
    ``workers > 1`` blocks run on a thread pool; output order is always
    ``(i, j)`` ascending.
    """
    w = weights or FusionWeights()
    t, b, d = (unit_rows(m) for m in (text, behavior, device))
    n = _check_modalities(t, b, d)
    if n < 2:
        raise ShapeError(f"pair scoring needs at least 2 records, got {n}")
    blocks = _row_blocks(n, chunk_size)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda se: _score_block(t, b, d, se[0], se[1], w), blocks))
    else:
        parts = [_score_block(t, b, d, s, e, w) for s, e in blocks]
    return [p for part in parts for p in part]


def score_selected(text, behavior, device, pairs: Iterable[tuple[int, int]], weights: FusionWeights | None = None) -> list[ScoredPair]:
    """Score an explicit list of pairs, without thresholding."""
    w = weights or FusionWeights()
    t, b, d = (unit_rows(m) for m in (text, behavior, device))
    _check_modalities(t, b, d)
    out = []
    for i, j in sorted(pairs):
        sims = [float(np.clip(m[i] @ m[j], -1.0, 1.0)) for m in (t, b, d)]
        out.append(ScoredPair(i, j, *sims, float(w.fuse(*sims))))
    return out


def fuse_features(text, behavior, device, normalize: bool = True) -> np.ndarray:
    """Concatenate modality blocks per record as ``text | behavior | device``.

    Each block is scaled to unit length first unless ``normalize`` is False.
    """
    mats = [np.asarray(m, dtype=float) for m in (text, behavior, device)]
    for m in mats:
        if m.ndim != 2:
            raise ShapeError(f"modality block must be 2-D, got shape {m.shape}")
    _check_modalities(*mats)
    if normalize:
        mats = [unit_rows(m) for m in mats]
    return np.hstack(mats)


def iter_neighborhoods(points: np.ndarray, eps: float, budget: int = 1 << 20) -> Iterator[np.ndarray]:
    """Yield, per point, the sorted indices within closed radius ``eps`` (self included).

    ``budget`` caps the number of floats in each difference tensor.
    """
    eps2 = eps * eps
    n, d = points.shape
    chunk_rows = max(1, budget // max(n * d, 1))
    for start in range(0, n, chunk_rows):
        diff = points[start:start + chunk_rows, None, :] - points[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        for row in d2:
            yield np.flatnonzero(row <= eps2)


def dbscan(points, params: ClusterParams | None = None) -> np.ndarray:
    """Label each point with a cluster id, or ``-1`` for noise.

    Core points have at least ``min_samples`` points (self included) within
    Euclidean distance ``eps``. Clusters are the eps-connected components of
    core points, numbered in order of their lowest-index core point. A border
    point joins the cluster of its lowest-index core neighbour.
    """
    p = params or ClusterParams()
    x = np.asarray(points, dtype=float)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ShapeError(f"dbscan needs a non-empty 2-D point array, got shape {x.shape}")
    n = x.shape[0]
    neighbors = list(iter_neighborhoods(x, p.eps))
    core = np.array([len(nb) >= p.min_samples for nb in neighbors])
    labels = np.full(n, NOISE, dtype=int)

    cluster = 0
    for seed in range(n):
        if not core[seed] or labels[seed] != NOISE:
            continue
        labels[seed] = cluster
        queue = deque([seed])
        while queue:
            q = queue.popleft()
            for nb in neighbors[q]:
                if core[nb] and labels[nb] == NOISE:
                    labels[nb] = cluster
                    queue.append(nb)
        cluster += 1

    for idx in np.flatnonzero(~core):
        core_nbs = [nb for nb in neighbors[idx] if core[nb]]
        if core_nbs:
            labels[idx] = labels[core_nbs[0]]
    return labels


def cluster_pairs(labels) -> set[tuple[int, int]]:
    groups: dict[int, list[int]] = {}
    for idx, lab in enumerate(labels):
        if lab != NOISE:
            groups.setdefault(int(lab), []).append(idx)
    pairs: set[tuple[int, int]] = set()
    for members in groups.values():
        pairs.update(combinations(members, 2))
    return pairs
