"""Evaluation report: a JSON document, a plain-text table and a CSV.

The table has one row per setup and one column per rating source, with a
separate block per metric. Scores print as percentages and the best score
in each row carries a ``*``. Nothing time-dependent is written, so equal
inputs give byte-identical files.
"""

from __future__ import annotations

import csv
import hashlib
import io as _io
import json
from pathlib import Path
from typing import Sequence

from .behavioral import FactorModel, WeightModel
from .config import RunConfig
from .core import MatchRecord
from .errors import ValidationError
from .evaluation import SetupScore
from .io import LogHeader, encode_match

REPORT_FORMAT = "behavrating.report"
REPORT_VERSION = 1
METRIC_ORDER = ("accuracy", "ndcg")


def log_digest(header: LogHeader, matches: Sequence[MatchRecord]) -> str:
    h = hashlib.sha256(header.to_line().encode("utf-8"))
    for m in matches:
        h.update(b"\n")
        h.update(encode_match(m).encode("utf-8"))
    return h.hexdigest()


def build_report(
    config: RunConfig,
    header: LogHeader,
    matches: Sequence[MatchRecord],
    features: Sequence[str],
    scores: Sequence[SetupScore],
    factors: FactorModel | None,
    weights: WeightModel | None,
    fitted=None,
) -> dict:
    players = {p for m in matches for p in m.players()}
    models: dict = {
        "factors": factors.to_dict() if factors is not None else None,
        "weights": weights.to_dict() if weights is not None else None,
    }
    if fitted is not None:
        reg = fitted.regression
        models["regression"] = {
            "kind": reg.kind,
            "lambda": reg.lam,
            "cv_score": reg.cv_score,
            "cv_scores": {repr(k): v for k, v in sorted(reg.cv_scores.items())},
            "iterations": reg.iterations,
        }
    return {
        "format": REPORT_FORMAT,
        "version": REPORT_VERSION,
        "config_hash": config.config_hash(),
        "config": config.to_dict(),
        "log": {
            "schema": header.schema,
            "sha256": log_digest(header, matches),
            "matches": len(matches),
            "players": len(players),
            "features": list(features),
        },
        "models": models,
        "results": [
            {"setup": s.setup, "source": s.source, "metric": s.metric, "value": s.value, "n_matches": s.n_matches}
            for s in scores
        ],
    }


def report_axes(report: dict) -> tuple[list[str], list[str], list[str]]:
    results = report["results"]
    setups = list(dict.fromkeys(r["setup"] for r in results))
    sources = list(dict.fromkeys(r["source"] for r in results))
    present = {r["metric"] for r in results}
    return setups, sources, [m for m in METRIC_ORDER if m in present]


def score_grid(report: dict, metric: str) -> dict[tuple[str, str], dict]:
    return {(r["setup"], r["source"]): r for r in report["results"] if r["metric"] == metric}


def render_table(report: dict) -> str:
    setups, sources, metrics = report_axes(report)
    lines = [f"config {report['config_hash'][:12]}  log {report['log']['sha256'][:12]}  schema {report['log']['schema']}"]
    for metric in metrics:
        grid = score_grid(report, metric)
        header = ["setup", *sources, "n"]
        rows = []
        for setup in setups:
            cells = [grid.get((setup, s)) for s in sources]
            values = [c["value"] for c in cells if c and c["value"] is not None]
            best = max(values) if values else None
            row = [setup]
            for c in cells:
                if c is None or c["value"] is None:
                    row.append("-")
                else:
                    row.append(f"{100 * c['value']:.1f}" + ("*" if c["value"] == best else ""))
            n = max((c["n_matches"] for c in cells if c), default=0)
            rows.append([*row, str(n)])
        widths = [max(len(r[i]) for r in [header, *rows]) for i in range(len(header))]
        fmt = lambda r: "  ".join(cell.ljust(w) if i == 0 else cell.rjust(w) for i, (cell, w) in enumerate(zip(r, widths)))
        lines += ["", f"[{metric}, %]", fmt(header), "  ".join("-" * w for w in widths)]
        lines += [fmt(r) for r in rows]
    return "\n".join(lines) + "\n"


def render_csv(report: dict) -> str:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["setup", "source", "metric", "value", "n_matches"])
    for r in report["results"]:
        writer.writerow([r["setup"], r["source"], r["metric"], "" if r["value"] is None else repr(r["value"]), r["n_matches"]])
    return buf.getvalue()


def render_machine(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def write_report(report: dict, out_dir: Path, figures: bool = True) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in (
        ("report.json", render_machine(report)),
        ("report.txt", render_table(report)),
        ("report.csv", render_csv(report)),
    ):
        path = out_dir / name
        path.write_text(text, encoding="utf-8")
        written.append(path)
    if figures:
        from .plotting import plot_scores

        written += plot_scores(report, out_dir / "figures")
    return written


def load_report(path: str | Path) -> dict:
    path = Path(path)
    if path.is_dir():
        path = path / "report.json"
    try:
        report = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: malformed report: {exc}") from None
    if report.get("format") != REPORT_FORMAT or report.get("version") != REPORT_VERSION:
        raise ValidationError(f"{path}: not a version-{REPORT_VERSION} evaluation report")
    return report
