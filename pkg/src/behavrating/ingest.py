"""Raw per-player CSV exports mapped onto canonical match records.

Every schema reads one row per player per match. Rows are grouped by match
id, then by team, and the output is sorted by ``(timestamp, match_id)``.
Empty cells mean the statistic was not recorded for that row.

Column mappings (raw column -> canonical statistic):

* ``halo_slayer``: match_id, timestamp, gamertag, team, won, kills, deaths,
  assists, headshots, betrayals, suicides, melee_kills, grenade_kills,
  best_spree, time_alive.
* ``halo_ctf``: as ``halo_slayer`` plus flag_steals.
* ``csgo``: match_id, timestamp, player, team, won, kills, deaths, assists,
  flash_assists, headshots, damage. ``won`` must be joined from the round
  results beforehand.
* ``pubg_duo``: the public aggregate export (match_id, date, player_name,
  team_id, team_placement, party_size, player_kills, player_dbno, player_dmg,
  player_assists, player_survive_time, player_dist_walk, player_dist_ride).
  Rows whose party_size is not 2 are skipped. The export has no death count,
  so a player on the winning team is credited 0 deaths and everyone else 1.
* ``synthetic``: canonical names throughout: match_id, timestamp_ms, mode,
  player, team, rank and any statistic name.
"""

from __future__ import annotations

import csv
import os
from collections import defaultdict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Mapping

from .core import STAT_NAMES, MatchRecord, Mode, RawMatchStats, Team, competition_ranks, validate_match
from .errors import IngestError, ValidationError
from .io import LogHeader

_HALO_STATS = {
    "kills": "kills",
    "deaths": "deaths",
    "assists": "kill_assists",
    "headshots": "headshots",
    "betrayals": "betrayals",
    "suicides": "suicides",
    "melee_kills": "melee_kills",
    "grenade_kills": "grenade_kills",
    "best_spree": "longest_spree",
    "time_alive": "time_alive",
}


@dataclass(frozen=True)
class IngestSchema:
    name: str
    mode: Mode
    match: str
    time: str
    player: str
    team: str
    outcome: str
    outcome_kind: str  # "won" (1 = winner) or "placement" (1 = best)
    stats: Mapping[str, str]
    team_size: int | None = None
    keep: Callable[[Mapping[str, str]], bool] | None = None
    derive: Callable[[Mapping[str, str], dict], None] | None = None
    extra_required: tuple[str, ...] = ()

    @property
    def required(self) -> tuple[str, ...]:
        return (self.match, self.time, self.player, self.team, self.outcome, *self.stats, *self.extra_required)

    @property
    def recorded_stats(self) -> tuple[str, ...]:
        mapped = set(self.stats.values())
        if self.derive is not None:
            mapped.add("deaths")
        return tuple(s for s in STAT_NAMES if s in mapped)


def _pubg_deaths(row: Mapping[str, str], stats: dict) -> None:
    stats["deaths"] = 0 if _number(row["team_placement"], "team_placement") == 1 else 1


SCHEMAS: dict[str, IngestSchema] = {
    "halo_slayer": IngestSchema(
        "halo_slayer", Mode.HEAD_TO_HEAD, "match_id", "timestamp", "gamertag", "team", "won", "won", _HALO_STATS
    ),
    "halo_ctf": IngestSchema(
        "halo_ctf",
        Mode.HEAD_TO_HEAD,
        "match_id",
        "timestamp",
        "gamertag",
        "team",
        "won",
        "won",
        {**_HALO_STATS, "flag_steals": "flag_steals"},
    ),
    "csgo": IngestSchema(
        "csgo",
        Mode.HEAD_TO_HEAD,
        "match_id",
        "timestamp",
        "player",
        "team",
        "won",
        "won",
        {
            "kills": "kills",
            "deaths": "deaths",
            "assists": "kill_assists",
            "flash_assists": "flash_assists",
            "headshots": "headshots",
            "damage": "damage_dealt",
        },
    ),
    "pubg_duo": IngestSchema(
        "pubg_duo",
        Mode.FREE_FOR_ALL,
        "match_id",
        "date",
        "player_name",
        "team_id",
        "team_placement",
        "placement",
        {
            "player_kills": "kills",
            "player_dbno": "dbno",
            "player_dmg": "damage_dealt",
            "player_assists": "kill_assists",
            "player_survive_time": "time_alive",
            "player_dist_walk": "walk_distance",
            "player_dist_ride": "ride_distance",
        },
        team_size=2,
        keep=lambda row: row["party_size"].strip() == "2",
        derive=_pubg_deaths,
        extra_required=("party_size",),
    ),
}


def _number(text: str, column: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise ValueError(f"column {column!r}: {text!r} is not a number") from None


def parse_timestamp(text: str) -> int:
    """Epoch milliseconds from an integer string or an ISO-8601 datetime (UTC if naive)."""
    text = text.strip()
    if text.lstrip("-").isdigit():
        return int(text)
    try:
        dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
    except ValueError:
        try:
            dt = datetime.strptime(text, "%Y-%m-%dT%H:%M:%S%z")
        except ValueError:
            raise ValueError(f"unparseable timestamp {text!r}") from None
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return int(round(dt.timestamp() * 1000))


@dataclass
class _Pending:
    timestamp: int
    first_line: int
    mode: Mode
    teams: dict[str, list[tuple[str, RawMatchStats, float]]] = field(default_factory=lambda: defaultdict(list))


def _stats_from_row(row: Mapping[str, str], schema: IngestSchema) -> dict:
    stats = {}
    for column, stat in schema.stats.items():
        cell = (row.get(column) or "").strip()
        if cell:
            stats[stat] = _number(cell, column)
    if schema.derive is not None:
        schema.derive(row, stats)
    return stats


def _generic_schema(fieldnames: list[str]) -> IngestSchema:
    stats = {c: c for c in fieldnames if c in STAT_NAMES}
    return IngestSchema(
        "synthetic", Mode.HEAD_TO_HEAD, "match_id", "timestamp_ms", "player", "team", "rank", "placement", stats,
        extra_required=("mode",),
    )


def ingest(path: str | os.PathLike, schema_name: str) -> tuple[LogHeader, list[MatchRecord]]:
    """Read a raw CSV export and return the header and time-ordered matches."""
    if schema_name not in SCHEMAS and schema_name != "synthetic":
        raise ValidationError(f"unknown schema {schema_name!r}; choose from {sorted([*SCHEMAS, 'synthetic'])}")
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        fieldnames = [c.strip() for c in (reader.fieldnames or [])]
        reader.fieldnames = fieldnames
        schema = SCHEMAS.get(schema_name) or _generic_schema(fieldnames)
        missing = [c for c in schema.required if c not in fieldnames]
        if missing:
            raise IngestError(f"missing required column(s) {missing} for schema {schema_name!r}", line=1)

        pending: dict[str, _Pending] = {}
        for row in reader:
            line = reader.line_num
            try:
                if schema.keep is not None and not schema.keep(row):
                    continue
                mid = row[schema.match].strip()
                ts = parse_timestamp(row[schema.time])
                mode = Mode(row["mode"].strip()) if schema.name == "synthetic" else schema.mode
                player, team = row[schema.player].strip(), row[schema.team].strip()
                outcome = _number(row[schema.outcome], schema.outcome)
                stats = RawMatchStats.from_mapping(_stats_from_row(row, schema))
            except (ValueError, TypeError, AttributeError) as exc:
                raise IngestError(str(exc), line=line) from None
            entry = pending.get(mid)
            if entry is None:
                entry = pending[mid] = _Pending(ts, line, mode)
            elif entry.timestamp != ts or entry.mode is not mode:
                raise IngestError(f"match {mid}: rows disagree on timestamp or mode", line=line)
            entry.teams[team].append((player, stats, outcome))

    matches = [_build(mid, entry, schema) for mid, entry in pending.items()]
    matches.sort(key=MatchRecord.sort_key)
    modes = sorted({m.mode.value for m in matches})
    return LogHeader(schema_name, schema.recorded_stats, tuple(modes) or (schema.mode.value,)), matches


def _build(mid: str, entry: _Pending, schema: IngestSchema) -> MatchRecord:
    slots = sorted(entry.teams)
    outcomes = []
    for slot in slots:
        rows = entry.teams[slot]
        if schema.team_size is not None and len(rows) != schema.team_size:
            raise IngestError(f"match {mid}: team {slot} has {len(rows)} members, expected {schema.team_size}", entry.first_line)
        values = {o for _, _, o in rows}
        if len(values) != 1:
            raise IngestError(f"match {mid}: members of team {slot} disagree on the outcome", entry.first_line)
        outcomes.append(values.pop())
    if schema.outcome_kind == "won":
        ranks = competition_ranks(outcomes, higher_is_better=True)
    else:
        ranks = competition_ranks(outcomes)
    teams = tuple(
        Team(slot, tuple(p for p, _, _ in entry.teams[slot]), tuple(s for _, s, _ in entry.teams[slot])) for slot in slots
    )
    record = MatchRecord(mid, entry.timestamp, entry.mode, teams, dict(zip(slots, ranks)))
    try:
        return validate_match(record)
    except ValidationError as exc:
        raise IngestError(str(exc), entry.first_line) from None
