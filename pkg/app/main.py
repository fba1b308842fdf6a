# app/main.py
"""
rdswalk command line.

    python -m app.main generate            --degrees power-law --n 10000 --out out/net
    python -m app.main simulate            --edges out/net.edges --traits out/net.traits.csv --seeds 10 --out out/sample.csv
    python -m app.main estimate            out/sample.csv
    python -m app.main experiment          --preset single --out out/table.csv
    python -m app.main validate-stationary --edges out/small.edges --c 0.9 --out out/stationary.csv

Exit codes: 0 success, 1 domain or validation error, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import List, Optional

import pandas as pd
from pydantic import ValidationError

from app import harness, parsing
from app.config import settings
from app.errors import RdsWalkError
from app.estimators import teleport_estimate
from app.graph import from_edge_list
from app.logs import configure_logging
from app.rds import check_sample, run_rds
from app.rwwt import stationary_residual, validate_stationary
from app.schemas import (
    ExperimentSpec,
    LogNormal,
    NetworkSpec,
    PowerLawCutoff,
    RdsConfig,
    TeleportConfig,
    TraitConfig,
)

logger = logging.getLogger(__name__)

DEGREE_MODELS = {"power-law": PowerLawCutoff, "log-normal": LogNormal}


def _load_spec(path: str) -> ExperimentSpec:
    with open(path, encoding="utf-8") as fh:
        return ExperimentSpec.model_validate_json(fh.read())


def resolve_output(path: str) -> str:
    """Bare names go under settings.OUTPUT_DIR; anything with a directory part is used as given."""
    if os.path.dirname(path):
        return path
    return os.path.join(settings.OUTPUT_DIR, path)


def _with_seed(spec: ExperimentSpec, master_seed: Optional[int]) -> ExperimentSpec:
    if master_seed is None:
        return spec
    return ExperimentSpec.model_validate({**spec.model_dump(by_alias=False), "master_seed": master_seed})


# ---------- subcommands ----------
def cmd_generate(args: argparse.Namespace) -> int:
    if args.spec:
        spec = _load_spec(args.spec)
    else:
        spec = ExperimentSpec(
            network=NetworkSpec(model=DEGREE_MODELS[args.degrees](), n=args.n, components=args.components),
            trait=TraitConfig(prevalence=args.prevalence, swap_prob=args.swap_prob),
            seed_counts=[1],
            network_samples=1,
            master_seed=settings.MASTER_SEED,
        )
    spec = _with_seed(spec, args.master_seed)

    g, y, report = harness.realize_network(spec, 0)
    parsing.write_edge_list(g, f"{args.out}.edges")
    parsing.write_traits(g, y, f"{args.out}.traits.csv")
    parsing.append_jsonl(report, f"{args.out}.report.jsonl")

    print(
        f"n={report.n} edges={g.num_edges} mean degree {report.realized_mean_degree:.3f} "
        f"(drawn {report.drawn_mean_degree:.3f}) prevalence {report.prevalence:.4f}"
    )
    print(f"wrote {args.out}.edges, {args.out}.traits.csv, {args.out}.report.jsonl")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    g, ingest = from_edge_list(parsing.read_edge_list(args.edges))
    y = parsing.read_traits(args.traits, g, trait=args.trait)
    cfg = RdsConfig(
        num_seeds=args.seeds,
        coupons=args.coupons,
        target_size=args.target_size,
        replenish_seeds=args.replenish_seeds,
    )
    seed = settings.MASTER_SEED if args.master_seed is None else args.master_seed
    sample = run_rds(g, y, cfg, harness.replication_rng(seed, 0, cfg.num_seeds, 0))
    parsing.write_sample(sample, args.out)

    waves = int(sample.wave.max()) if len(sample) else 0
    print(f"{len(sample)} respondents ({sample.num_seeds} seeds, {waves} waves) from {ingest.vertices} vertices")
    if len(sample) < cfg.target_size:
        print(f"recruitment stopped before target size {cfg.target_size}")
    print(f"wrote {args.out}")
    return 0


def cmd_estimate(args: argparse.Namespace) -> int:
    sample = parsing.read_sample(args.sample)
    for problem in check_sample(sample):
        logger.warning("[estimate] %s", problem)

    report = teleport_estimate(sample, exclude_seeds=args.exclude_seeds)
    table = pd.DataFrame(
        [
            ("n_S", report.n_s),
            ("m", report.m),
            ("c_hat", report.c_hat),
            ("E(D) seeds", report.ed_seeds),
            ("E(D) walk", report.ed_rw),
            ("w*", report.w_star),
            ("E(D) composite", report.ed_hat),
            ("mu_T", report.mu_t),
            ("mu_VH", report.mu_vh),
            ("mu_SM", report.mu_sm),
        ],
        columns=["quantity", "value"],
    )
    print(table.to_string(index=False))
    if report.degenerate_flags:
        print("degenerate: " + ", ".join(report.degenerate_flags))
    payload = report.model_dump_json(indent=2)
    print(payload)
    if args.out:
        parsing._ensure_parent(args.out)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload + "\n")
    return 0


def cmd_experiment(args: argparse.Namespace) -> int:
    if args.spec:
        spec = _load_spec(args.spec)
    elif args.preset == "two-component":
        spec = ExperimentSpec.two_component_preset(args.degrees)
    else:
        spec = ExperimentSpec.single_component_preset(args.degrees)
    spec = _with_seed(spec, args.master_seed)

    result = harness.run_experiment(spec)
    harness.emit_table(result.rows, args.out)

    df = pd.DataFrame([row.model_dump() for row in result.rows], columns=harness.TABLE_COLUMNS)
    print(df.to_string(index=False))
    print(f"{result.replications_failed} of {result.replications_total} replications failed")
    print(f"wrote {args.out}")
    return 0


def cmd_validate_stationary(args: argparse.Namespace) -> int:
    g, _ = from_edge_list(parsing.read_edge_list(args.edges))
    cfg = TeleportConfig(c=args.c)
    df = validate_stationary(g, cfg, tol=args.tol, max_iter=args.max_iter)
    parsing._ensure_parent(args.out)
    df.to_csv(args.out, index=False, lineterminator="\n", float_format="%.17g")

    residual = stationary_residual(g, cfg, df["pi_exact"].to_numpy())
    print(
        f"n={g.n} c={cfg.c}: relative error mean {df['relative_error'].mean():.4%} "
        f"max {df['relative_error'].max():.4%}; oracle residual {residual:.2e}"
    )
    print(f"wrote {args.out}")
    return 0


# ---------- parser ----------
def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rdswalk", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--log-level", default=settings.LOG_LEVEL)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="configuration-model network plus trait file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--degrees", choices=sorted(DEGREE_MODELS))
    src.add_argument("--spec", help="experiment spec JSON; its network and trait sections are used")
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--components", type=int, choices=[1, 2], default=1)
    p.add_argument("--prevalence", type=float, default=0.15)
    p.add_argument("--swap-prob", type=float, default=0.2)
    p.add_argument("--master-seed", type=int)
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("simulate", help="one RDS sample on an edge list")
    p.add_argument("--edges", required=True)
    p.add_argument("--traits", required=True)
    p.add_argument("--trait", help="trait column (default: first)")
    p.add_argument("--seeds", type=int, required=True)
    p.add_argument("--coupons", type=int, default=3)
    p.add_argument("--target-size", type=int, default=300)
    p.add_argument("--replenish-seeds", action="store_true")
    p.add_argument("--master-seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("estimate", help="teleport, Volz-Heckathorn and sample-mean estimates")
    p.add_argument("sample")
    p.add_argument("--exclude-seeds", action="store_true")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("experiment", help="replicated comparison of the estimators")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--spec")
    src.add_argument("--preset", choices=["single", "two-component"])
    p.add_argument("--degrees", choices=sorted(DEGREE_MODELS), default="power-law")
    p.add_argument("--master-seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("validate-stationary", help="closed form vs. exact stationary distribution")
    p.add_argument("--edges", required=True)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--max-iter", type=int, default=1_000_000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_validate_stationary)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        # argparse already printed usage; 2 for bad input, 0 for --help
        return int(e.code or 0)
    configure_logging(args.log_level)
    if getattr(args, "out", None):
        args.out = resolve_output(args.out)
    try:
        return args.func(args)
    except RdsWalkError as e:
        logger.error("[%s] %s", args.command, e.detail)
        print(json.dumps(e.as_dict()), file=sys.stderr)
        return 1
    except ValidationError as e:
        logger.error("[%s] invalid input: %s", args.command, e)
        print(json.dumps({"ok": False, "error": "VALIDATION_ERROR", "detail": str(e)}), file=sys.stderr)
        return 1
    except OSError as e:
        logger.error("[%s] %s", args.command, e)
        print(json.dumps({"ok": False, "error": "IO_ERROR", "detail": str(e)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
