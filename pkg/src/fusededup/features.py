"""Behavioral and device featurization."""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime
from typing import Sequence

import numpy as np

from .errors import ConfigError, ShapeError
from .linalg import pca_reduce

BEHAVIOR_DIM = 33
MAX_GAP_HOURS = 10_000.0


@dataclass(frozen=True)
class BehaviorConfig:
    count_only: bool = False


@dataclass(frozen=True)
class DeviceConfig:
    target_dim: int = 16

    def __post_init__(self) -> None:
        if self.target_dim < 1:
            raise ConfigError("device.target_dim must be >= 1")


def behavior_vector(login_times: Sequence[datetime]) -> np.ndarray:
    """33 values: hour-of-day histogram (24), weekday histogram (7, Monday first),
    log1p(login count), mean gap between consecutive logins in hours.

    Timestamps are read in UTC. Histograms are normalized to sum to one.
    """
    vec = np.zeros(BEHAVIOR_DIM)
    count = len(login_times)
    if count == 0:
        return vec
    for ts in login_times:
        vec[ts.hour] += 1.0
        vec[24 + ts.weekday()] += 1.0
    vec[:31] /= count
    vec[31] = math.log1p(count)
    if count >= 2:
        span = (login_times[-1] - login_times[0]).total_seconds() / 3600.0
        vec[32] = min(span / (count - 1), MAX_GAP_HOURS)
    return vec


def behavior_matrix(all_logins: Sequence[Sequence[datetime]], cfg: BehaviorConfig | None = None) -> np.ndarray:
    cfg = cfg or BehaviorConfig()
    if cfg.count_only:
        return np.array([[float(len(times))] for times in all_logins]).reshape(len(all_logins), 1)
    if not all_logins:
        return np.zeros((0, BEHAVIOR_DIM))
    return np.vstack([behavior_vector(sorted(times)) for times in all_logins])


def device_vocab(values: Sequence[str]) -> list[str]:
    return sorted({v.casefold() for v in values})


def device_matrix(browsers: Sequence[str], oses: Sequence[str]) -> np.ndarray:
    """One-hot browser block followed by one-hot os block.

    Vocabularies are the sorted distinct case-folded values of each column, so
    the encoding does not depend on row order.
    """
    if len(browsers) != len(oses):
        raise ShapeError(f"{len(browsers)} browsers but {len(oses)} oses")
    b_vocab = {v: k for k, v in enumerate(device_vocab(browsers))}
    o_vocab = {v: k for k, v in enumerate(device_vocab(oses))}
    width = len(b_vocab) + len(o_vocab)
    out = np.zeros((len(browsers), width))
    for row, (b, o) in enumerate(zip(browsers, oses)):
        out[row, b_vocab[b.casefold()]] = 1.0
        out[row, len(b_vocab) + o_vocab[o.casefold()]] = 1.0
    return out


def reduce_device(matrix, target_dim: int = 16) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] == 0:
        raise ShapeError("device matrix must be a non-empty 2-D array")
    n, width = m.shape
    k = min(target_dim, width, n - 1)
    if k < 1:
        raise ConfigError(
            f"device reduction needs at least 2 records (got {n}); effective dimension would be {k}"
        )
    return pca_reduce(m, k)
