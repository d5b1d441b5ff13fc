"""String-matching baseline: normalized Levenshtein ratio on ``name city``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .embedding import combine_text
from .errors import ConfigError
from .records import RawRecord


@dataclass(frozen=True)
class BaselineConfig:
    threshold: float = 0.85

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ConfigError(f"baseline.threshold must lie in [0, 1], got {self.threshold}")


class BaselinePair(NamedTuple):
    i: int
    j: int
    similarity: float


def levenshtein(a: str, b: str, limit: int | None = None) -> int:
    """Unit-cost edit distance over code points.

    With ``limit`` set, returns ``limit + 1`` as soon as the distance is known
    to exceed it.
    """
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return len(a)
    if limit is not None and len(a) - len(b) > limit:
        return limit + 1
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        if limit is not None and min(cur) > limit:
            return limit + 1
        prev = cur
    return prev[-1]


def _normalize(s: str) -> str:
    return " ".join(s.casefold().split())


def string_similarity(a: str, b: str) -> float:
    a, b = _normalize(a), _normalize(b)
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein(a, b) / longest


def _max_edits(threshold: float, longest: int) -> int:
    # largest D with 1 - D/longest >= threshold
    return math.floor((1.0 - threshold) * longest + 1e-9)


def baseline_scored(records: Sequence[RawRecord], cfg: BaselineConfig | None = None) -> list[BaselinePair]:
    """All pairs whose similarity is at least the threshold, in ``(i, j)`` order.

    Candidates are pruned with the character-bag distance, a lower bound on
    Levenshtein distance, before the exact DP runs; the result is identical to
    checking every pair.
    """
    cfg = cfg or BaselineConfig()
    texts = [combine_text(r.name, r.city) for r in records]
    n = len(texts)
    if n < 2:
        return []
    alphabet = {ch: k for k, ch in enumerate(sorted(set("".join(texts))))}
    counts = np.zeros((n, max(len(alphabet), 1)), dtype=np.int32)
    for row, t in enumerate(texts):
        for ch in t:
            counts[row, alphabet[ch]] += 1
    lengths = np.array([len(t) for t in texts])

    out: list[BaselinePair] = []
    for i in range(n - 1):
        diff = counts[i + 1:] - counts[i]
        bag = np.maximum(np.clip(diff, 0, None).sum(axis=1), np.clip(-diff, 0, None).sum(axis=1))
        longest = np.maximum(lengths[i + 1:], lengths[i])
        allowed = np.floor((1.0 - cfg.threshold) * longest + 1e-9)
        for off in np.flatnonzero(bag <= allowed):
            j = i + 1 + int(off)
            top = int(longest[off])
            if top == 0:
                out.append(BaselinePair(i, j, 1.0))
                continue
            dist = levenshtein(texts[i], texts[j], limit=_max_edits(cfg.threshold, top))
            sim = 1.0 - dist / top
            if sim >= cfg.threshold:
                out.append(BaselinePair(i, j, sim))
    return out


def baseline_pairs(records: Sequence[RawRecord], cfg: BaselineConfig | None = None) -> set[tuple[int, int]]:
    return {(p.i, p.j) for p in baseline_scored(records, cfg)}
