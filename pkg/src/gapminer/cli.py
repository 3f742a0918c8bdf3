"""Command-line entry point.

Subcommands run the whole pipeline (`run`), a single stage (`ingest`,
`network`, `persist`, `classify`, `metrics`, `report`), or the synthetic
corpus generators (`synth`). Configuration comes from an optional JSON file
plus flags; flags win. Exit codes: 0 success, 2 configuration error, 3 data
error, 4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from .errors import ConfigError, DataError, GapminerError, InternalError
from .pipeline import STAGES, PipelineConfig, run
from .synth import GENERATORS, make_synthetic

logger = logging.getLogger(__name__)

_GENERATOR_PARAMS = {
    "planted-cycle": (
        "cycle_len", "cycles", "disciplines", "filler_fresh", "filler_dup", "start_year",
    ),
    "planted-clique": ("clique_size", "disciplines", "start_year"),
    "random-pairs": (
        "papers", "concepts", "disciplines", "min_concepts", "max_concepts",
        "year_min", "year_max", "venues", "author_pool", "max_refs", "affil_prob",
        "dual_discipline_prob",
    ),
}


def _add_pipeline_flags(parser: argparse.ArgumentParser, with_stage: bool) -> None:
    parser.add_argument("--config", type=Path, help="declarative JSON config file")
    parser.add_argument("--corpus", type=Path, help="line-delimited corpus file")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--seed", type=int, help="base random seed")
    parser.add_argument("--max-dim", type=int, help="maximum simplex dimension")
    parser.add_argument("--min-persistence", type=int, help="minimum gap persistence in years")
    parser.add_argument("--null-replicates", type=int, help="label-randomization replicates")
    parser.add_argument("--n-rand", type=int, help="citation-switch replicates for novelty")
    parser.add_argument("--year-min", type=int, help="earliest accepted publication year")
    parser.add_argument("--year-max", type=int, help="latest accepted publication year")
    parser.add_argument("--cd-window", type=int, help="citer window (years) for the disruption index")
    parser.add_argument("--sb-horizon", type=int, help="trajectory horizon for the Sleeping Beauty index")
    parser.add_argument(
        "--threads", type=int, help="worker threads (falls back to GAPMINER_THREADS)"
    )
    if with_stage:
        parser.add_argument("--stage", choices=STAGES, help="run only this stage")


def _pipeline_config(args: argparse.Namespace, stage: str | None) -> PipelineConfig:
    threads = args.threads
    if threads is None:
        env = os.environ.get("GAPMINER_THREADS")
        if env is not None:
            try:
                threads = int(env)
            except ValueError as exc:
                raise ConfigError(f"GAPMINER_THREADS must be an integer, got {env!r}") from exc
    overrides = {
        "corpus_path": args.corpus,
        "output_dir": args.out,
        "seed": args.seed,
        "max_dim": args.max_dim,
        "min_persistence": args.min_persistence,
        "null_replicates": args.null_replicates,
        "n_rand": args.n_rand,
        "year_min": args.year_min,
        "year_max": args.year_max,
        "cd_window": args.cd_window,
        "sb_horizon": args.sb_horizon,
        "threads": threads,
    }
    if stage is not None:
        overrides["stages"] = (stage,)
    return PipelineConfig.from_sources(args.config, overrides)


def _cmd_pipeline(args: argparse.Namespace) -> int:
    stage = getattr(args, "stage", None) or getattr(args, "single_stage", None)
    config = _pipeline_config(args, stage)
    result = run(config)
    for name in STAGES:
        if name in result.statuses:
            print(f"stage {name}: {result.statuses[name]}")
    print(f"manifest: {result.output_dir / 'manifest.json'}")
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    params = {}
    for name in _GENERATOR_PARAMS[args.generator]:
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value
    path = make_synthetic(args.generator, args.out, args.seed, **params)
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gapminer",
        description="Detect gap-opening papers in concept co-occurrence networks.",
    )
    parser.add_argument("--log-level", default="WARNING", help="logging level name")
    sub = parser.add_subparsers(dest="command", required=True)

    run_parser = sub.add_parser("run", help="run all pipeline stages")
    _add_pipeline_flags(run_parser, with_stage=True)
    run_parser.set_defaults(func=_cmd_pipeline)

    for stage in STAGES:
        stage_parser = sub.add_parser(stage, help=f"run only the {stage} stage")
        _add_pipeline_flags(stage_parser, with_stage=False)
        stage_parser.set_defaults(func=_cmd_pipeline, single_stage=stage)

    synth = sub.add_parser("synth", help="generate a synthetic corpus")
    synth.add_argument("--generator", required=True, choices=GENERATORS)
    synth.add_argument("--out", type=Path, required=True)
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--cycle-len", dest="cycle_len", type=int)
    synth.add_argument("--cycles", type=int)
    synth.add_argument("--disciplines", type=int)
    synth.add_argument("--filler-fresh", dest="filler_fresh", type=int)
    synth.add_argument("--filler-dup", dest="filler_dup", type=int)
    synth.add_argument("--start-year", dest="start_year", type=int)
    synth.add_argument("--clique-size", dest="clique_size", type=int)
    synth.add_argument("--papers", type=int)
    synth.add_argument("--concepts", type=int)
    synth.add_argument("--min-concepts", dest="min_concepts", type=int)
    synth.add_argument("--max-concepts", dest="max_concepts", type=int)
    synth.add_argument("--year-min", dest="year_min", type=int)
    synth.add_argument("--year-max", dest="year_max", type=int)
    synth.add_argument("--venues", type=int)
    synth.add_argument("--author-pool", dest="author_pool", type=int)
    synth.add_argument("--max-refs", dest="max_refs", type=int)
    synth.add_argument("--affil-prob", dest="affil_prob", type=float)
    synth.add_argument("--dual-prob", dest="dual_discipline_prob", type=float)
    synth.set_defaults(func=_cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, str(args.log_level).upper(), logging.WARNING))
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4
    except GapminerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
