"""Command-line entry point: ``catbn <subcommand> [options]``.

Exit status is 0 on success, 2 for configuration errors (bad flags, config
file, knowledge file or reference graph) and 3 for data errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .dataset import DataError
from .experiments import (
    ConfigError,
    load_config,
    run_ablation,
    run_compare,
    run_learn,
    run_missing_ablation,
    run_rank,
    run_sample,
    run_suite,
    run_sweep,
)
from .fixtures import FIXTURES, survey_knowledge
from .graph import GraphError
from .knowledge import KnowledgeError, format_knowledge
from .params import load_bn, save_bn

EXIT_CONFIG = 2
EXIT_DATA = 3

log = logging.getLogger("catbn")


def _algos(values):
    if not values:
        return None
    out = []
    for v in values:
        out.extend(a.strip() for a in v.split(",") if a.strip())
    return out


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="YAML run configuration")
    p.add_argument("--data", help="CSV file with a header row; '?' or empty marks missing")
    p.add_argument("--knowledge", help="knowledge file (tiers, require, forbid)")
    p.add_argument("--reference", help="reference graph as an arc-list CSV")
    p.add_argument("--seed", type=int, help="seed for subsampling and random baselines")
    p.add_argument("--out-dir", dest="out_dir", help="directory for all artifacts")
    p.add_argument("--algo", action="append", help="learner name; repeat or comma-separate for several")
    p.add_argument("--alpha", type=float, help="significance level of the independence tests")
    p.add_argument("--test", choices=["chi2", "g2"], help="independence test")
    p.add_argument("--max-degree", dest="max_degree", type=int, help="adjacency bound for GES and the greedy searches")
    p.add_argument("--folds", type=int, help="cross-validation folds")
    p.add_argument("--missing", choices=["none", "drop", "impute", "category"], help="missing-value treatment")
    p.add_argument("--target", help="outcome variable for causal paths or ranking")
    p.add_argument("--causes", help="comma-separated cause variables for the causal-path count")
    p.add_argument("--no-timing", dest="no_timing", action="store_true", help="write elapsed times as NA (byte-reproducible output)")
    p.add_argument("-v", "--verbose", action="count", default=0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="catbn", description="Bayesian-network structure learning for categorical data.")
    parser.add_argument("--version", action="version", version=f"catbn {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="learn one graph")
    _common(p)

    p = sub.add_parser("suite", help="all algorithms plus baselines in one report")
    _common(p)

    p = sub.add_parser("sweep", help="edges, BIC and time against training-set size")
    _common(p)
    p.add_argument("--sizes", help="comma-separated training sizes")

    p = sub.add_parser("ablate-knowledge", help="knowledge and synthetic-variable ablation")
    _common(p)

    p = sub.add_parser("ablate-missing", help="row deletion against imputation at matched size")
    _common(p)
    p.add_argument("--impute", choices=["impute", "category"], help="treatment compared with row deletion")

    p = sub.add_parser("compare", help="pairwise SHD, BSF and F1 between saved graphs")
    _common(p)
    p.add_argument("graphs", nargs="+", help="arc-list CSV files")
    p.add_argument("--metric", action="append", choices=["shd", "bsf", "f1"])

    p = sub.add_parser("sample", help="forward-sample a network")
    p.add_argument("--network", required=True, help=f"network file or bundled fixture ({', '.join(sorted(FIXTURES))})")
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", dest="out_dir", default="out")
    p.add_argument("-v", "--verbose", action="count", default=0)

    p = sub.add_parser("rank", help="rank variables by information gain with a target")
    _common(p)
    return parser


def _config(args):
    overrides = {
        "data": args.data,
        "knowledge": args.knowledge,
        "reference": args.reference,
        "seed": args.seed,
        "out_dir": args.out_dir,
        "algorithms": _algos(args.algo),
        "alpha": args.alpha,
        "test": args.test,
        "max_degree": args.max_degree,
        "folds": args.folds,
        "missing": args.missing,
        "target": args.target,
        "causes": [c.strip() for c in args.causes.split(",")] if args.causes else None,
        "timing": False if args.no_timing else None,
    }
    if getattr(args, "sizes", None):
        try:
            overrides["sizes"] = [int(s) for s in args.sizes.split(",")]
        except ValueError:
            raise ConfigError("--sizes must be comma-separated integers") from None
    if getattr(args, "impute", None):
        overrides["impute"] = args.impute
    return load_config(args.config, **overrides)


def _sample(args) -> None:
    if args.rows < 0:
        raise ConfigError("--rows must be non-negative")
    if args.network in FIXTURES:
        bn = FIXTURES[args.network]()
    else:
        try:
            bn = load_bn(args.network)
        except OSError as exc:
            raise ConfigError(f"cannot read network: {exc}") from None
    out = Path(args.out_dir)
    run_sample(bn, args.rows, args.seed, out)
    save_bn(bn, out / "network.bn")
    if args.network == "survey":
        (out / "knowledge.txt").write_text(format_knowledge(survey_knowledge()), encoding="utf-8")


def run(args) -> None:
    if args.command == "sample":
        _sample(args)
        return
    cfg = _config(args)
    if args.command == "learn":
        algos = _algos(args.algo)
        if algos and len(algos) > 1:
            raise ConfigError("learn takes a single --algo")
        run_learn(cfg, algos[0] if algos else None)
    elif args.command == "suite":
        run_suite(cfg)
    elif args.command == "sweep":
        run_sweep(cfg)
    elif args.command == "ablate-knowledge":
        run_ablation(cfg)
    elif args.command == "ablate-missing":
        run_missing_ablation(cfg)
    elif args.command == "compare":
        run_compare(cfg, args.graphs, args.metric or ("shd", "bsf", "f1"))
    elif args.command == "rank":
        run_rank(cfg)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        run(args)
    except (ConfigError, KnowledgeError) as exc:
        print(f"catbn: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, GraphError) as exc:
        print(f"catbn: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    return 0


if __name__ == "__main__":
    sys.exit(main())
