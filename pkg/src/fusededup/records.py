"""Record schema and the three CSV formats the pipeline reads and writes.

Dataset CSV
    ``name,city,browser,os,login_times`` where ``login_times`` is a JSON array
    of ISO-8601 UTC strings (``2024-01-01T22:00:00Z``) packed into one field.
Ground truth CSV
    ``record_id,entity_id``.
Pairs CSV
    ``record_i,record_j,text_sim,behavior_sim,device_sim,fused_score``.
"""

from __future__ import annotations

import csv
import json
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from itertools import combinations
from pathlib import Path
from typing import Iterable, Protocol

from .errors import RowError, SchemaError, ValidationError

DATASET_COLUMNS = ("name", "city", "browser", "os", "login_times")
TRUTH_COLUMNS = ("record_id", "entity_id")
PAIR_COLUMNS = ("record_i", "record_j", "text_sim", "behavior_sim", "device_sim", "fused_score")

_TS_FORMAT = "%Y-%m-%dT%H:%M:%SZ"


@dataclass(frozen=True)
class RawRecord:
    record_id: int
    name: str
    city: str
    browser: str
    os: str
    login_times: tuple[datetime, ...] = ()


@dataclass(frozen=True)
class GroundTruth:
    """Maps each record_id to the id of the real-world entity it belongs to."""

    entity_of: dict[int, int]

    def true_pairs(self) -> set[tuple[int, int]]:
        groups: dict[int, list[int]] = defaultdict(list)
        for rid, eid in self.entity_of.items():
            groups[eid].append(rid)
        pairs: set[tuple[int, int]] = set()
        for members in groups.values():
            pairs.update(combinations(sorted(members), 2))
        return pairs

    def check_covers(self, n_records: int) -> None:
        """Raise unless the mapping covers exactly ids ``0..n_records-1``."""
        ids = set(self.entity_of)
        expected = set(range(n_records))
        if ids != expected:
            missing = sorted(expected - ids)[:5]
            extra = sorted(ids - expected)[:5]
            raise ValidationError(
                f"ground truth does not cover dataset of {n_records} records "
                f"(missing ids {missing}, out-of-range ids {extra})"
            )


@dataclass
class Dataset:
    records: list[RawRecord]
    ground_truth: GroundTruth | None = field(default=None)

    def __post_init__(self) -> None:
        if not self.records:
            raise SchemaError("dataset has no records")
        if self.ground_truth is not None:
            self.ground_truth.check_covers(len(self.records))

    def __len__(self) -> int:
        return len(self.records)


class _PairLike(Protocol):
    i: int
    j: int
    text_sim: float
    behavior_sim: float
    device_sim: float
    fused: float


def parse_timestamp(text: str) -> datetime:
    if not text.endswith("Z"):
        raise ValueError(f"timestamp {text!r} is not UTC ('Z' suffix required)")
    return datetime.strptime(text, _TS_FORMAT).replace(tzinfo=timezone.utc)


def format_timestamp(ts: datetime) -> str:
    if ts.tzinfo is not None:
        ts = ts.astimezone(timezone.utc)
    return ts.strftime(_TS_FORMAT)


def _check_header(header: list[str] | None, expected: tuple[str, ...], path: Path) -> None:
    if header is None:
        raise SchemaError(f"{path}: empty file, expected header {','.join(expected)}")
    header = [h.strip() for h in header]
    for col in expected:
        if col not in header:
            raise SchemaError(f"{path}: missing column {col!r}")
    for col in header:
        if col not in expected:
            raise SchemaError(f"{path}: unexpected column {col!r}")
    if tuple(header) != expected:
        raise SchemaError(f"{path}: columns must appear in order {','.join(expected)}")


def load_dataset(path: str | Path) -> Dataset:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), DATASET_COLUMNS, path)
        records = []
        # row numbers are 1-based file lines, header is line 1
        for lineno, row in enumerate(reader, start=2):
            if len(row) != len(DATASET_COLUMNS):
                raise RowError(lineno, f"expected {len(DATASET_COLUMNS)} fields, got {len(row)}")
            name, city, browser, os_, raw_times = row
            try:
                items = json.loads(raw_times) if raw_times.strip() else []
                if not isinstance(items, list):
                    raise ValueError("login_times must be a JSON array")
                times = tuple(sorted(parse_timestamp(str(t)) for t in items))
            except ValueError as exc:
                raise RowError(lineno, f"bad login_times: {exc}") from None
            records.append(RawRecord(len(records), name, city, browser, os_, times))
    if not records:
        raise SchemaError(f"{path}: no data rows")
    return Dataset(records)


def write_dataset(path: str | Path, records: Iterable[RawRecord]) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DATASET_COLUMNS)
        for r in records:
            stamps = json.dumps([format_timestamp(t) for t in r.login_times])
            writer.writerow([r.name, r.city, r.browser, r.os, stamps])


def load_ground_truth(path: str | Path) -> GroundTruth:
    path = Path(path)
    mapping: dict[int, int] = {}
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        _check_header(next(reader, None), TRUTH_COLUMNS, path)
        for lineno, row in enumerate(reader, start=2):
            try:
                rid, eid = (int(v) for v in row)
            except ValueError:
                raise RowError(lineno, f"expected two integers, got {row!r}") from None
            if rid in mapping:
                raise ValidationError(f"{path}: duplicate record_id {rid} at row {lineno}")
            mapping[rid] = eid
    return GroundTruth(mapping)


def write_ground_truth(path: str | Path, truth: GroundTruth) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRUTH_COLUMNS)
        for rid in sorted(truth.entity_of):
            writer.writerow([rid, truth.entity_of[rid]])


def write_pairs(path: str | Path, pairs: Iterable[_PairLike]) -> int:
    """Write scored pairs sorted by ``(i, j)``; returns the number of data rows."""
    rows = sorted(pairs, key=lambda p: (p.i, p.j))
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(PAIR_COLUMNS)
        for p in rows:
            if not p.i < p.j:
                raise ValidationError(f"pair ({p.i}, {p.j}) violates i < j")
            writer.writerow([
                p.i, p.j,
                f"{p.text_sim:.6f}", f"{p.behavior_sim:.6f}",
                f"{p.device_sim:.6f}", f"{p.fused:.6f}",
            ])
    return len(rows)


def load_pair_set(path: str | Path) -> set[tuple[int, int]]:
    """Read the first two columns of any pairs CSV (scored or baseline)."""
    path = Path(path)
    pairs: set[tuple[int, int]] = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or header[:2] != ["record_i", "record_j"]:
            raise SchemaError(f"{path}: expected header starting with record_i,record_j")
        for lineno, row in enumerate(reader, start=2):
            try:
                i, j = int(row[0]), int(row[1])
            except (ValueError, IndexError):
                raise RowError(lineno, f"bad pair row {row!r}") from None
            pairs.add((min(i, j), max(i, j)))
    return pairs
