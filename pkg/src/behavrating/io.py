"""Canonical match-log and model-artifact file formats.

Match log: UTF-8 JSON Lines. Line 1 is a header naming the format, its
version, the dataset schema, the recorded statistics and the modes present;
every following line is one match. Lines are written with sorted keys and
no insignificant whitespace, so ``encode(decode(line)) == line``.

Artifacts: one indented JSON document with the same kind of header.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .behavioral import FactorModel, WeightModel
from .core import STAT_NAMES, MatchRecord, Mode, RawMatchStats, Team, validate_match
from .errors import ValidationError
from .fit.design import DesignMatrix

LOG_FORMAT = "behavrating.matchlog"
ARTIFACT_FORMAT = "behavrating.artifact"
FEATURES_FORMAT = "behavrating.features"
FORMAT_VERSION = 1
ARTIFACT_DIR_ENV = "BEHAVRATING_ARTIFACTS"


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


@dataclass(frozen=True)
class LogHeader:
    schema: str
    stats: tuple[str, ...] = STAT_NAMES
    modes: tuple[str, ...] = (Mode.HEAD_TO_HEAD.value,)
    version: int = FORMAT_VERSION
    meta: dict = field(default_factory=dict)

    def to_line(self) -> str:
        return _dumps(
            {
                "format": LOG_FORMAT,
                "version": self.version,
                "schema": self.schema,
                "stats": list(self.stats),
                "modes": list(self.modes),
                "meta": self.meta,
            }
        )

    @classmethod
    def from_line(cls, line: str) -> LogHeader:
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"line 1: malformed header: {exc}") from None
        if not isinstance(data, dict) or data.get("format") != LOG_FORMAT:
            raise ValidationError("line 1: not a canonical match log header")
        if data.get("version") != FORMAT_VERSION:
            raise ValidationError(f"line 1: unsupported log version {data.get('version')!r}")
        unknown = set(data.get("stats", ())) - set(STAT_NAMES)
        if unknown:
            raise ValidationError(f"line 1: unknown statistic(s) {sorted(unknown)}")
        return cls(data["schema"], tuple(data["stats"]), tuple(data["modes"]), data["version"], data.get("meta", {}))


def match_to_dict(record: MatchRecord) -> dict:
    return {
        "match_id": record.match_id,
        "timestamp_ms": record.timestamp,
        "mode": record.mode.value,
        "teams": [
            {
                "slot": t.slot,
                "members": [{"player": p, "stats": s.available()} for p, s in zip(t.members, t.stats)],
            }
            for t in record.teams
        ],
        "observed_ranks": dict(record.observed_ranks),
    }


def encode_match(record: MatchRecord) -> str:
    return _dumps(match_to_dict(record))


def match_from_dict(data: dict) -> MatchRecord:
    try:
        teams = tuple(
            Team(
                str(t["slot"]),
                tuple(str(m["player"]) for m in t["members"]),
                tuple(RawMatchStats.from_mapping(m.get("stats", {})) for m in t["members"]),
            )
            for t in data["teams"]
        )
        record = MatchRecord(
            match_id=str(data["match_id"]),
            timestamp=data["timestamp_ms"],
            mode=Mode(data["mode"]),
            teams=teams,
            observed_ranks={str(k): v for k, v in data["observed_ranks"].items()},
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ValidationError):
            raise
        raise ValidationError(f"malformed match record: {exc!r}") from None
    return validate_match(record)


def decode_match(line: str) -> MatchRecord:
    try:
        data = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from None
    return match_from_dict(data)


def write_log(path: str | os.PathLike, header: LogHeader, matches: Iterable[MatchRecord]) -> None:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header.to_line() + "\n")
        for m in matches:
            fh.write(encode_match(m) + "\n")


def read_log(path: str | os.PathLike) -> tuple[LogHeader, list[MatchRecord]]:
    with open(path, encoding="utf-8") as fh:
        first = fh.readline()
        if not first:
            raise ValidationError(f"{path}: empty match log")
        header = LogHeader.from_line(first)
        matches = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            try:
                matches.append(decode_match(line))
            except ValidationError as exc:
                raise ValidationError(f"{path}: line {lineno}: {exc}") from None
    return header, matches


def sort_matches(matches: Sequence[MatchRecord]) -> list[MatchRecord]:
    """Timestamp order, ties broken by match id."""
    return sorted(matches, key=MatchRecord.sort_key)


# --- artifacts ------------------------------------------------------------


def _artifact(kind: str, body: dict) -> str:
    doc = {"format": ARTIFACT_FORMAT, "version": FORMAT_VERSION, "kind": kind, **body}
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _ensure_parent(path: str | os.PathLike) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)


def _guard_fixture(path: str | os.PathLike, kind: str) -> None:
    # shipped fixtures are never replaced by a refit
    if not Path(path).exists():
        return
    try:
        existing = _read_artifact(path, kind)
    except ValidationError:
        return
    if existing.get("provenance", "fitted") != "fitted":
        raise ValidationError(f"{path}: refusing to overwrite a {existing['provenance']} artifact")


def write_factor_model(path: str | os.PathLike, model: FactorModel) -> None:
    _guard_fixture(path, "factor_model")
    _ensure_parent(path)
    Path(path).write_text(_artifact("factor_model", {"model": model.to_dict()}), encoding="utf-8")


def write_weight_model(path: str | os.PathLike, model: WeightModel) -> None:
    _guard_fixture(path, "weight_model")
    _ensure_parent(path)
    Path(path).write_text(_artifact("weight_model", {"model": model.to_dict()}), encoding="utf-8")


def _read_artifact(path: str | os.PathLike, kind: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed artifact: {exc}") from None
    if doc.get("format") != ARTIFACT_FORMAT or doc.get("version") != FORMAT_VERSION:
        raise ValidationError(f"{path}: not a version-{FORMAT_VERSION} model artifact")
    if doc.get("kind") == "model_bundle":
        return doc["factors" if kind == "factor_model" else "weights"]
    if doc.get("kind") != kind:
        raise ValidationError(f"{path}: expected a {kind} artifact, found {doc.get('kind')!r}")
    return doc["model"]


def read_factor_model(path: str | os.PathLike) -> FactorModel:
    return FactorModel.from_dict(_read_artifact(path, "factor_model"))


def read_weight_model(path: str | os.PathLike) -> WeightModel:
    return WeightModel.from_dict(_read_artifact(path, "weight_model"))


def default_artifact_dir() -> Path | None:
    value = os.environ.get(ARTIFACT_DIR_ENV)
    return Path(value) if value else None


# --- feature export -------------------------------------------------------

_KEY_COLUMNS = ("match_id", "slot", "target")


def write_design_csv(path: str | os.PathLike, matrix: DesignMatrix) -> None:
    """CSV with a ``# format version kind`` comment line, then one row per observation."""
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {FEATURES_FORMAT} {FORMAT_VERSION} {matrix.kind}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([*_KEY_COLUMNS, *matrix.columns])
        for i in range(matrix.n_rows):
            writer.writerow(
                [matrix.groups[i], matrix.slots[i], int(matrix.y[i]), *(repr(float(v)) for v in matrix.X[i])]
            )


def read_design_csv(path: str | os.PathLike) -> DesignMatrix:
    with open(path, encoding="utf-8", newline="") as fh:
        head = fh.readline().split()
        if len(head) != 4 or head[:2] != ["#", FEATURES_FORMAT] or head[2] != str(FORMAT_VERSION):
            raise ValidationError(f"{path}: not a version-{FORMAT_VERSION} feature export")
        reader = csv.reader(fh)
        columns = next(reader, None)
        if columns is None or tuple(columns[:3]) != _KEY_COLUMNS:
            raise ValidationError(f"{path}: missing column header")
        groups, slots, y, X = [], [], [], []
        for lineno, row in enumerate(reader, start=3):
            if len(row) != len(columns):
                raise ValidationError(f"{path}: line {lineno}: expected {len(columns)} cells, got {len(row)}")
            try:
                y.append(int(row[2]))
                X.append([float(v) for v in row[3:]])
            except ValueError as exc:
                raise ValidationError(f"{path}: line {lineno}: {exc}") from None
            groups.append(row[0])
            slots.append(row[1])
    return DesignMatrix(
        np.array(X, dtype=float).reshape(len(y), len(columns) - 3),
        tuple(columns[3:]),
        np.array(y, dtype=int),
        head[3],
        np.array(groups, dtype=object),
        np.array(slots, dtype=object),
    )
