"""Command-line entry point.

Exit codes: 0 success, 2 invalid input or configuration, 3 a fit did not
converge, 4 a file could not be read or written.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io
from .config import RunConfig, load_run_config, load_synth_config
from .errors import BehavRatingError, ConvergenceError, PipelineError
from .fit import fit_factors
from .fit.logit import DEFAULT_LAMBDAS

EXIT_OK, EXIT_VALIDATION, EXIT_CONVERGENCE, EXIT_IO = 0, 2, 3, 4

log = logging.getLogger("behavrating")


def exit_code(exc: BaseException) -> int:
    if isinstance(exc, PipelineError):
        exc = exc.cause
    if isinstance(exc, ConvergenceError):
        return EXIT_CONVERGENCE
    if isinstance(exc, OSError):
        return EXIT_IO
    return EXIT_VALIDATION


# --- subcommands ----------------------------------------------------------


def cmd_ingest(args) -> None:
    from .ingest import ingest

    header, matches = ingest(args.input, args.schema)
    io.write_log(args.output, header, matches)
    log.info("wrote %d matches to %s", len(matches), args.output)


def cmd_synth(args) -> None:
    from .synth import SYNTH_STATS, synth_matches

    cfg = load_synth_config(args.config)
    header = io.LogHeader("synthetic", SYNTH_STATS, (cfg.mode,), meta={"synth": cfg.to_dict()})
    io.write_log(args.output, header, synth_matches(cfg))


def _design(args, kind: str | None = None):
    from .pipeline import collect_design_rows, design_matrix, infer_kind, log_features

    if args.features:
        return io.read_design_csv(args.features)
    header, matches = io.read_log(args.log)
    features = log_features(header)
    kind = kind or (infer_kind(matches) if args.kind == "auto" else args.kind)
    return design_matrix(collect_design_rows(matches, features), features, kind)


def cmd_export_features(args) -> None:
    io.write_design_csv(args.output, _design(args))


def cmd_fit(args) -> None:
    from .fit import fit_weights
    from .pipeline import drop_constant

    matrix = drop_constant(_design(args))
    if args.what == "factors":
        io.write_factor_model(args.output, fit_factors(matrix, n_factors=args.n_factors, threshold=args.threshold))
        return
    if args.factors:
        factors = io.read_factor_model(args.factors)
    elif args.no_factors:
        factors = None
    else:
        factors = fit_factors(matrix, n_factors=args.n_factors, threshold=args.threshold)
    model, weights = fit_weights(matrix, factors, lambdas=args.lambdas, k=args.folds, seed=args.seed)
    io.write_weight_model(args.output, weights)
    if factors is not None and not args.factors:
        io.write_factor_model(Path(args.output).with_name("factors.json"), factors)
    log.info("selected lambda %g (cv score %.4f)", model.lam, model.cv_score)


def cmd_run(args) -> None:
    from .pipeline import run
    from .report import render_table

    config = load_run_config(args.config) if args.config else RunConfig()
    out = run(config, args.log, args.artifacts, args.output)
    sys.stdout.write(render_table(out.report))


def cmd_report(args) -> None:
    from .report import load_report, render_machine, render_table

    report = load_report(args.report)
    sys.stdout.write(render_table(report) if args.format == "table" else render_machine(report))


# --- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS, help="log progress")
    p = argparse.ArgumentParser(
        prog="behavrating", description="Behavioral player ratings: ingest, fit, replay, report.", parents=[common]
    )
    sub = p.add_subparsers(dest="command", required=True)

    def command(name: str, **kw) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], **kw)

    s = command("ingest", help="convert a raw CSV export into a canonical match log")
    s.add_argument("--schema", required=True, help="halo_slayer, halo_ctf, csgo, pubg_duo or synthetic")
    s.add_argument("input")
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_ingest)

    s = command("synth", help="generate a synthetic match log from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_synth)

    def design_args(s):
        src = s.add_mutually_exclusive_group(required=True)
        src.add_argument("--log", help="canonical match log")
        src.add_argument("--features", help="feature export CSV")
        s.add_argument("--kind", choices=("auto", "binary", "ordinal"), default="auto")

    s = command("export-features", help="write the pre-match feature design matrix as CSV")
    design_args(s)
    s.add_argument("-o", "--output", required=True)
    s.set_defaults(func=cmd_export_features)

    s = command("fit", help="fit a factor or weight model artifact")
    s.add_argument("what", choices=("factors", "weights"))
    design_args(s)
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--factors", help="existing factor artifact for the weight fit")
    s.add_argument("--no-factors", action="store_true", help="fit weights on raw features")
    s.add_argument("--n-factors", type=int, default=None)
    s.add_argument("--threshold", type=float, default=0.4)
    s.add_argument("--lambdas", type=float, nargs="+", default=list(DEFAULT_LAMBDAS))
    s.add_argument("--folds", type=int, default=5)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_fit)

    s = command("run", help="replay a log and write the evaluation report")
    s.add_argument("--config")
    s.add_argument("--log", required=True)
    s.add_argument("--artifacts", default=None, help=f"artifact directory (default: ${io.ARTIFACT_DIR_ENV})")
    s.add_argument("-o", "--output", required=True, help="report directory")
    s.set_defaults(func=cmd_run)

    s = command("report", help="print a written report")
    s.add_argument("report", help="report directory or report.json")
    s.add_argument("--format", choices=("table", "machine"), default="table")
    s.set_defaults(func=cmd_report)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (BehavRatingError, ValueError, OSError) as exc:
        print(f"behavrating: error: {exc}", file=sys.stderr)
        return exit_code(exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
