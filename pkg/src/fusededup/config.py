"""Run configuration: built-in defaults, overlaid by a TOML file, overlaid by CLI flags."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .baseline import BaselineConfig
from .datagen import GenConfig
from .embedding import EmbeddingConfig
from .errors import ConfigError
from .features import BehaviorConfig, DeviceConfig
from .fusion import ClusterParams, FusionWeights
from .linalg import PcaConfig

ENDPOINT_ENV = "DEDUPE_EMBED_ENDPOINT"
DECISIONS = ("threshold", "cluster")


@dataclass(frozen=True)
class FusionOptions:
    weights: FusionWeights = field(default_factory=FusionWeights)
    raw_concat: bool = False
    decision: str = "threshold"

    def __post_init__(self) -> None:
        if self.decision not in DECISIONS:
            raise ConfigError(f"fusion.decision must be one of {DECISIONS}, got {self.decision!r}")


@dataclass(frozen=True)
class RunConfig:
    embedding: EmbeddingConfig = field(default_factory=EmbeddingConfig)
    behavior: BehaviorConfig = field(default_factory=BehaviorConfig)
    device: DeviceConfig = field(default_factory=DeviceConfig)
    pca: PcaConfig = field(default_factory=PcaConfig)
    fusion: FusionOptions = field(default_factory=FusionOptions)
    dbscan: ClusterParams = field(default_factory=ClusterParams)
    baseline: BaselineConfig = field(default_factory=BaselineConfig)
    generate: GenConfig = field(default_factory=GenConfig)
    workers: int = field(default_factory=lambda: os.cpu_count() or 1)
    chunk_size: int = 1 << 16

    def __post_init__(self) -> None:
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.chunk_size < 1:
            raise ConfigError("chunk_size must be >= 1")


_FUSION_WEIGHT_KEYS = {"w_text", "w_behavior", "w_device", "threshold"}


def _build(cls, section: dict[str, Any], where: str):
    known = {f.name for f in fields(cls)}
    unknown = set(section) - known
    if unknown:
        raise ConfigError(f"unknown key(s) in [{where}]: {', '.join(sorted(unknown))}")
    try:
        return cls(**section)
    except TypeError as exc:
        raise ConfigError(f"bad [{where}] section: {exc}") from None


def config_from_mapping(data: dict[str, Any], base: RunConfig | None = None) -> RunConfig:
    """Overlay a nested mapping (TOML layout) onto ``base``."""
    cfg = base or RunConfig()
    data = dict(data)
    updates: dict[str, Any] = {}

    simple = {
        "embedding": EmbeddingConfig,
        "behavior": BehaviorConfig,
        "device": DeviceConfig,
        "pca": PcaConfig,
        "dbscan": ClusterParams,
        "baseline": BaselineConfig,
        "generate": GenConfig,
    }
    # pca.device_dim and device.target_dim name the same setting
    pca_sec = data.get("pca", {})
    dev_sec = data.get("device", {})
    if "device_dim" in pca_sec and "target_dim" not in dev_sec:
        data["device"] = {**dev_sec, "target_dim": pca_sec["device_dim"]}
    elif "target_dim" in dev_sec and "device_dim" not in pca_sec:
        data["pca"] = {**pca_sec, "device_dim": dev_sec["target_dim"]}

    for key, cls in simple.items():
        if key in data:
            section = dict(data.pop(key))
            if key == "generate" and "logins_per_record" in section:
                section["logins_per_record"] = tuple(section["logins_per_record"])
            merged = {f.name: getattr(getattr(cfg, key), f.name) for f in fields(cls)}
            merged.update(section)
            updates[key] = _build(cls, merged, key)

    if "fusion" in data:
        section = dict(data.pop("fusion"))
        w_part = {k: section.pop(k) for k in list(section) if k in _FUSION_WEIGHT_KEYS}
        weights = _build(FusionWeights, {**cfg.fusion.weights.__dict__, **w_part}, "fusion")
        opts = {"raw_concat": cfg.fusion.raw_concat, "decision": cfg.fusion.decision, **section}
        updates["fusion"] = _build(FusionOptions, {"weights": weights, **opts}, "fusion")

    for key in ("workers", "chunk_size"):
        if key in data:
            updates[key] = data.pop(key)
    if data:
        raise ConfigError(f"unknown config section(s): {', '.join(sorted(data))}")
    return _build(RunConfig, {**{f.name: getattr(cfg, f.name) for f in fields(RunConfig)}, **updates}, "root")


def load_config(path: str | Path | None = None, env: dict[str, str] | None = None) -> RunConfig:
    """Defaults, then the environment endpoint, then the TOML file at ``path``."""
    env = os.environ if env is None else env
    cfg = RunConfig()
    endpoint = env.get(ENDPOINT_ENV)
    if endpoint:
        cfg = replace(cfg, embedding=replace(cfg.embedding, provider="remote", endpoint=endpoint))
    if path is not None:
        try:
            with Path(path).open("rb") as fh:
                data = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from None
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        cfg = config_from_mapping(data, cfg)
    return cfg
