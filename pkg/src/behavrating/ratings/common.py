from __future__ import annotations

from typing import Sequence


def team_rating(member_values: Sequence[float]) -> float:
    """Team strength as the rating of its best member."""
    if len(member_values) == 0:
        raise ValueError("team_rating of an empty roster")
    return max(member_values)


def pairwise_scores(ranks: Sequence[int], i: int) -> list[tuple[int, float]]:
    """(opponent index, actual score) pairs for team ``i`` against every other team."""
    out = []
    for j, rank_j in enumerate(ranks):
        if j == i:
            continue
        if ranks[i] < rank_j:
            out.append((j, 1.0))
        elif ranks[i] > rank_j:
            out.append((j, 0.0))
        else:
            out.append((j, 0.5))
    return out
