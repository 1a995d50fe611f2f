from __future__ import annotations

import math
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class SystemConfig:
    """Update constants for the three classical rating systems.

    ``glicko_c`` defaults to the value that walks an RD of 50 back up to
    350 after 100 idle rating periods.
    """

    elo_k: float = 32.0
    elo_initial: float = 1500.0
    glicko_initial: float = 1500.0
    glicko_q: float = math.log(10) / 400
    glicko_c: float = math.sqrt((350.0**2 - 50.0**2) / 100)
    glicko_rd_cap: float = 350.0
    glicko_period: str = "match"  # "match": global match counter; "game": one period per game played
    trueskill_mu: float = 25.0
    trueskill_sigma: float = 25.0 / 3
    trueskill_beta: float = 25.0 / 6
    trueskill_tau: float = 25.0 / 300
    draw_probability: float = 0.10

    def __post_init__(self):
        for name, value in asdict(self).items():
            if isinstance(value, float) and not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")
        if self.draw_probability >= 1:
            raise ValueError("draw_probability must be below 1")
        if self.glicko_period not in ("match", "game"):
            raise ValueError(f"glicko_period must be 'match' or 'game', got {self.glicko_period!r}")

    def to_dict(self) -> dict:
        return asdict(self)
