"""Privacy-preserving multimodal record deduplication.

Three independent signals (name/city text, login behavior, device metadata)
are encoded separately, scored per pair with cosine similarity and combined
by a weighted late-fusion rule. Records can also be grouped with DBSCAN on
the concatenated modality vectors.
"""

__version__ = "0.1.0"

from .baseline import BaselineConfig, baseline_pairs, levenshtein, string_similarity
from .config import RunConfig, load_config
from .datagen import GenConfig, generate, summarize
from .embedding import EmbeddingConfig, combine_text, embed_batch, remote_embed
from .evaluation import EvalReport, evaluate
from .features import behavior_vector, device_matrix, reduce_device
from .fusion import ClusterParams, FusionWeights, ScoredPair, cluster_pairs, dbscan, fuse_features, score_pairs
from .linalg import PcaModel, cosine, pca_fit, pca_transform
from .pipeline import run_pipeline
from .records import Dataset, GroundTruth, RawRecord, load_dataset, load_ground_truth, write_pairs

__all__ = [
    "BaselineConfig", "ClusterParams", "Dataset", "EmbeddingConfig", "EvalReport",
    "FusionWeights", "GenConfig", "GroundTruth", "PcaModel", "RawRecord", "RunConfig",
    "ScoredPair", "baseline_pairs", "behavior_vector", "cluster_pairs", "combine_text",
    "cosine", "dbscan", "device_matrix", "embed_batch", "evaluate", "fuse_features",
    "generate", "levenshtein", "load_config", "load_dataset", "load_ground_truth",
    "pca_fit", "pca_transform", "reduce_device", "remote_embed", "run_pipeline",
    "score_pairs", "string_similarity", "summarize", "write_pairs",
]
