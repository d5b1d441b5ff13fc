"""Synthetic CRM datasets with injected duplicates and known entity labels."""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone

import numpy as np

from .errors import ConfigError
from .records import Dataset, GroundTruth, RawRecord

GIVEN_NAMES = [
    "James", "Mary", "John", "Patricia", "Robert", "Jennifer", "Michael", "Linda",
    "William", "Elizabeth", "David", "Barbara", "Richard", "Susan", "Joseph", "Jessica",
    "Thomas", "Sarah", "Charles", "Karen", "Christopher", "Nancy", "Daniel", "Lisa",
    "Matthew", "Margaret", "Anthony", "Betty", "Mark", "Sandra", "Donald", "Ashley",
    "Steven", "Kimberly", "Andrew", "Emily", "Joshua", "Donna", "Kenneth", "Michelle",
    "Wei", "Mei", "Hiroshi", "Yuki", "Carlos", "Sofia", "Ahmed", "Fatima",
    "Ivan", "Olga", "Pierre", "Amelie", "Raj", "Priya", "Kwame", "Amara",
    "Jonathan", "Jon", "Omar", "Leila",
]

FAMILY_NAMES = [
    "Smith", "Johnson", "Williams", "Brown", "Jones", "Garcia", "Miller", "Davis",
    "Rodriguez", "Martinez", "Hernandez", "Lopez", "Gonzalez", "Wilson", "Anderson", "Thomas",
    "Taylor", "Moore", "Jackson", "Martin", "Lee", "Perez", "Thompson", "White",
    "Harris", "Sanchez", "Clark", "Ramirez", "Lewis", "Robinson", "Walker", "Young",
    "Allen", "King", "Wright", "Scott", "Torres", "Nguyen", "Hill", "Flores",
    "Zhang", "Wang", "Tanaka", "Suzuki", "Silva", "Rossi", "Khan", "Ali",
    "Petrov", "Ivanova", "Dubois", "Moreau", "Patel", "Sharma", "Mensah", "Okafor",
    "Doe", "Muller", "Schmidt", "Novak",
]

CITIES = [
    "New York", "Los Angeles", "Chicago", "Houston", "Phoenix", "Philadelphia",
    "San Antonio", "San Diego", "Dallas", "Austin", "Seattle", "Denver",
    "Boston", "Atlanta", "Miami", "Portland", "Detroit", "Nashville",
    "Baltimore", "Milwaukee", "Albuquerque", "Tucson", "Fresno", "Sacramento",
]

BROWSERS = ["chrome", "safari", "firefox", "edge"]
OSES = ["windows", "macos", "ios", "android", "linux"]

WINDOW_START = datetime(2024, 1, 1, tzinfo=timezone.utc)
WINDOW_DAYS = 90


@dataclass(frozen=True)
class GenConfig:
    n_entities: int = 833
    duplicate_fraction: float = 0.2
    typo_prob: float = 0.3
    abbrev_prob: float = 0.3
    device_persist_prob: float = 0.7
    behavior_jitter_hours: float = 1.0
    logins_per_record: tuple[int, int] = (3, 15)
    max_group_size: int = 2
    seed: int = 42

    def __post_init__(self) -> None:
        if self.n_entities < 2:
            raise ConfigError(f"n_entities must be >= 2, got {self.n_entities}")
        for name in ("duplicate_fraction", "typo_prob", "abbrev_prob", "device_persist_prob"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        if self.behavior_jitter_hours < 0:
            raise ConfigError("behavior_jitter_hours must be >= 0")
        lo, hi = self.logins_per_record
        if lo < 0 or hi < lo:
            raise ConfigError(f"logins_per_record must be a range lo <= hi with lo >= 0, got {self.logins_per_record}")
        if self.max_group_size < 2:
            raise ConfigError("max_group_size must be >= 2")


@dataclass(frozen=True)
class _Entity:
    given: str
    family: str
    city: str
    browser: str
    os: str
    hour: int


def abbreviate(name: str) -> str:
    """``"Jon Doe"`` -> ``"J. Doe"``."""
    given, _, rest = name.partition(" ")
    return f"{given[0]}. {rest}" if rest else f"{given[0]}."


def substitute_typo(name: str, rng: np.random.Generator) -> str:
    """Replace one random letter with a different lowercase letter."""
    positions = [k for k, ch in enumerate(name) if ch.isalpha()]
    if not positions:
        return name + "x"
    pos = positions[int(rng.integers(len(positions)))]
    old = name[pos].lower()
    choices = [c for c in string.ascii_lowercase if c != old]
    return name[:pos] + choices[int(rng.integers(len(choices)))] + name[pos + 1:]


class _Generator:
    def __init__(self, cfg: GenConfig) -> None:
        self.cfg = cfg
        self.rng = np.random.default_rng(cfg.seed)

    def pick(self, items: list[str]) -> str:
        return items[int(self.rng.integers(len(items)))]

    def entity(self) -> _Entity:
        return _Entity(
            given=self.pick(GIVEN_NAMES),
            family=self.pick(FAMILY_NAMES),
            city=self.pick(CITIES),
            browser=self.pick(BROWSERS),
            os=self.pick(OSES),
            hour=int(self.rng.integers(24)),
        )

    def logins(self, hour: int) -> tuple[datetime, ...]:
        lo, hi = self.cfg.logins_per_record
        count = int(self.rng.integers(lo, hi + 1))
        stamps = []
        for _ in range(count):
            day = int(self.rng.integers(WINDOW_DAYS))
            h = int(round(self.rng.normal(hour, self.cfg.behavior_jitter_hours))) % 24
            minute = int(self.rng.integers(60))
            second = int(self.rng.integers(60))
            stamps.append(WINDOW_START + timedelta(days=day, hours=h, minutes=minute, seconds=second))
        return tuple(sorted(stamps))

    def variant_name(self, base: str) -> str:
        name = base
        if self.rng.random() < self.cfg.abbrev_prob:
            name = abbreviate(name)
        if self.rng.random() < self.cfg.typo_prob:
            name = substitute_typo(name, self.rng)
        return name

    def variant_device(self, e: _Entity) -> tuple[str, str]:
        if self.rng.random() < self.cfg.device_persist_prob:
            return e.browser, e.os
        return self.pick(BROWSERS), self.pick(OSES)


def duplicated_entity_count(cfg: GenConfig) -> int:
    return int(np.floor(cfg.duplicate_fraction * cfg.n_entities))


def generate(cfg: GenConfig | None = None) -> tuple[Dataset, GroundTruth]:
    cfg = cfg or GenConfig()
    gen = _Generator(cfg)
    n_dup = duplicated_entity_count(cfg)
    duplicated = set(gen.rng.choice(cfg.n_entities, size=n_dup, replace=False).tolist())

    rows: list[tuple[int, str, str, str, str, tuple[datetime, ...]]] = []
    for eid in range(cfg.n_entities):
        e = gen.entity()
        base = f"{e.given} {e.family}"
        rows.append((eid, base, e.city, e.browser, e.os, gen.logins(e.hour)))
        if eid not in duplicated:
            continue
        extra = 1 if cfg.max_group_size == 2 else int(gen.rng.integers(1, cfg.max_group_size))
        for _ in range(extra):
            browser, os_ = gen.variant_device(e)
            rows.append((eid, gen.variant_name(base), e.city, browser, os_, gen.logins(e.hour)))

    order = gen.rng.permutation(len(rows))
    records = []
    entity_of = {}
    for rid, src in enumerate(order):
        eid, name, city, browser, os_, times = rows[int(src)]
        records.append(RawRecord(rid, name, city, browser, os_, times))
        entity_of[rid] = eid
    truth = GroundTruth(entity_of)
    return Dataset(records, truth), truth


def summarize(ds: Dataset, truth: GroundTruth) -> dict:
    truth.check_covers(len(ds.records))
    return {
        "records": len(ds.records),
        "entities": len(set(truth.entity_of.values())),
        "true_pairs": len(truth.true_pairs()),
        "vocab": {
            "name": len({r.name.casefold() for r in ds.records}),
            "city": len({r.city.casefold() for r in ds.records}),
            "browser": len({r.browser.casefold() for r in ds.records}),
            "os": len({r.os.casefold() for r in ds.records}),
        },
    }


def format_summary(summary: dict) -> str:
    vocab = ", ".join(f"{k}={v}" for k, v in summary["vocab"].items())
    return (
        f"records={summary['records']} entities={summary['entities']} "
        f"true_pairs={summary['true_pairs']} vocab[{vocab}]"
    )


def summary_json(summary: dict) -> str:
    return json.dumps(summary, sort_keys=True)
