from __future__ import annotations

import pytest

from behavrating.core import MatchRecord, Mode, RawMatchStats, Team


def make_match(
    match_id: str,
    rosters: dict[str, list[str]],
    ranks: dict[str, int],
    timestamp: int = 0,
    mode: Mode = Mode.HEAD_TO_HEAD,
    stats: dict[str, dict] | None = None,
) -> MatchRecord:
    """Match with empty stats unless ``stats`` maps player -> stat values."""
    stats = stats or {}
    teams = tuple(
        Team(slot, tuple(members), tuple(RawMatchStats.from_mapping(stats.get(p, {})) for p in members))
        for slot, members in rosters.items()
    )
    return MatchRecord(match_id, timestamp, mode, teams, ranks)


@pytest.fixture
def h2h():
    return lambda mid, a, b, winner="A", ts=0, stats=None: make_match(
        mid, {"A": a, "B": b}, {"A": 1, "B": 2} if winner == "A" else {"A": 2, "B": 1}, ts, stats=stats
    )
