"""End-to-end multimodal deduplication: encode, reduce, score, cluster."""

from __future__ import annotations

import logging
import time
from contextlib import contextmanager
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .embedding import combine_text, embed_batch
from .features import behavior_matrix, device_matrix, reduce_device
from .fusion import ScoredPair, cluster_pairs, dbscan, fuse_features, score_pairs, score_selected
from .linalg import pca_fit
from .records import Dataset

log = logging.getLogger(__name__)


@dataclass
class ModalityVectors:
    text: np.ndarray
    behavior: np.ndarray
    device: np.ndarray


@dataclass
class PipelineResult:
    vectors: ModalityVectors
    threshold_pairs: list[ScoredPair]
    labels: np.ndarray | None
    decision: str
    cluster_scored: list[ScoredPair] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def predicted_pairs(self) -> list[ScoredPair]:
        """Pairs reported as duplicates under the configured decision path."""
        if self.decision == "cluster":
            return self.cluster_scored
        return self.threshold_pairs


@contextmanager
def _timed(timings: dict[str, float], stage: str):
    start = time.perf_counter()
    yield
    timings[stage] = time.perf_counter() - start
    log.debug("%s took %.3fs", stage, timings[stage])


def _reduce(matrix: np.ndarray, k: int) -> np.ndarray:
    # a zero-variance fit projects everything to 0 and would zero the cosine;
    # identical rows should instead compare as identical, so keep them unreduced
    model = pca_fit(matrix, k)
    if model.degenerate:
        return matrix
    return model.transform(matrix)


def encode(ds: Dataset, cfg: RunConfig, timings: dict[str, float] | None = None) -> ModalityVectors:
    timings = {} if timings is None else timings
    records = ds.records
    with _timed(timings, "text"):
        texts = [combine_text(r.name, r.city) for r in records]
        emb = embed_batch(texts, cfg.embedding)
        text = _reduce(emb, cfg.pca.text_dim) if len(records) >= 2 else emb
    with _timed(timings, "behavior"):
        behavior = behavior_matrix([r.login_times for r in records], cfg.behavior)
    with _timed(timings, "device"):
        dev = device_matrix([r.browser for r in records], [r.os for r in records])
        if len(records) < 2:
            reduce_device(dev, cfg.device.target_dim)  # raises the config error
        device = _reduce(dev, min(cfg.device.target_dim, dev.shape[1], len(records) - 1))
    return ModalityVectors(text, behavior, device)


def run_pipeline(ds: Dataset, cfg: RunConfig | None = None, cluster: bool = True) -> PipelineResult:
    cfg = cfg or RunConfig()
    timings: dict[str, float] = {}
    vecs = encode(ds, cfg, timings)
    w = cfg.fusion.weights
    with _timed(timings, "score"):
        pairs = score_pairs(vecs.text, vecs.behavior, vecs.device, w,
                            chunk_size=cfg.chunk_size, workers=cfg.workers)
    labels = None
    cluster_scored: list[ScoredPair] = []
    if cluster or cfg.fusion.decision == "cluster":
        with _timed(timings, "cluster"):
            feats = fuse_features(vecs.text, vecs.behavior, vecs.device,
                                  normalize=not cfg.fusion.raw_concat)
            labels = dbscan(feats, cfg.dbscan)
        if cfg.fusion.decision == "cluster":
            cluster_scored = score_selected(vecs.text, vecs.behavior, vecs.device,
                                            cluster_pairs(labels), w)
    return PipelineResult(vecs, pairs, labels, cfg.fusion.decision, cluster_scored, timings)
