"""
Command-line entry point.

    python -m app.cli gen-degrees --tau 2.5 --n 10000 --out degrees.txt
    python -m app.cli experiment --experiment oracle_suite --ladder 200 --reps 50

Values come from the built-in defaults, then the environment (.env), then a
key=value file given with --config, then explicit flags. Exit status is 0 when
every acceptance check passes, 2 when one fails and 1 on errors.
"""

from pathlib import Path
from typing import Dict, List, Optional, Sequence
import argparse
import json
import logging
import sys

from dotenv import dotenv_values
import pandas as pd
from pydantic import ValidationError

from app.core.config import settings
from app.core.exceptions import PercolationError
from app.core.rng import PHASE_DEGREES, PHASE_EXPLORATION, PHASE_LIMIT, PHASE_MARKS, PHASE_PERCOLATION, make_rng, stream_seed
from app.schemas.experiment import DegreeCase, ExperimentConfig, ExperimentId, OutputFormat
from app.schemas.params import ModelParams
from app.services import degrees as degree_service
from app.services import explore as explore_service
from app.services import graph as graph_service
from app.services import harness
from app.services import limit as limit_service
from app.services.params import critical_p, criticality_parameter, exponents, power_p

logger = logging.getLogger("app.cli")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FAILED = 2

BOOLEAN_KEYS = {"compensate"}


def _ladder(text: str) -> List[int]:
    return [int(float(x)) for x in text.replace(" ", "").split(",") if x]


def _model_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tau", type=float, default=settings.DEFAULT_TAU)
    parser.add_argument("--lambda", dest="lam", type=float, default=settings.DEFAULT_LAMBDA)
    parser.add_argument("--cf", type=float, default=settings.DEFAULT_CF)
    parser.add_argument("--n", type=int, default=settings.DEFAULT_N)
    parser.add_argument("--seed", type=int, default=settings.MASTER_SEED)
    parser.add_argument("--case", choices=[c.value for c in DegreeCase], default=DegreeCase.QUANTILE.value)
    parser.add_argument("--out", default=None)
    parser.add_argument("--format", choices=[f.value for f in OutputFormat], default=OutputFormat.JSONL.value)
    parser.add_argument("--config", default=None, help="key=value file; explicit flags win")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sfperc", description=settings.APP_NAME)
    parser.add_argument("--log-level", default=settings.LOG_LEVEL)
    sub = parser.add_subparsers(dest="command", required=True)
    parser.commands = sub.choices

    p = sub.add_parser("gen-degrees", help="write a power-law degree sequence")
    _model_flags(p)

    p = sub.add_parser("percolate", help="percolate a configuration model, write its edge list")
    _model_flags(p)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--p-exponent", type=float, default=None)
    p.add_argument("--method", choices=["retain", "fountoulakis"], default="retain")

    p = sub.add_parser("explore", help="explore a percolated graph, write the trace")
    _model_flags(p)
    p.add_argument("--p", type=float, default=None)
    p.add_argument("--p-exponent", type=float, default=None)
    p.add_argument("--components", default=None, help="CSV path for the component table")
    p.add_argument("--diameters", action="store_true")

    p = sub.add_parser("limit-sim", help="simulate the limiting process, write its jumps")
    _model_flags(p)
    p.add_argument("--horizon", type=float, default=settings.LIMIT_HORIZON)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--compensate", action="store_true")
    p.add_argument("--excursions", default=None, help="CSV path for the excursion table")

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment")
    _model_flags(p)
    p.add_argument("--experiment", choices=[e.value for e in ExperimentId], required=False, default=None)
    p.add_argument("--ladder", type=_ladder, default=None)
    p.add_argument("--reps", type=int, default=settings.DEFAULT_REPLICATES)
    p.add_argument("--p-exponent", type=float, default=None)
    p.add_argument("--horizon", type=float, default=settings.LIMIT_HORIZON)
    p.add_argument("--limit-paths", type=int, default=None)
    p.add_argument("--law-draws", type=int, default=settings.LAW_DRAWS)
    p.add_argument("--workers", type=int, default=settings.MAX_WORKERS)
    return parser


def read_config_file(path: str) -> Dict[str, object]:
    """key=value lines; keys are flag names with or without leading dashes"""
    if not Path(path).is_file():
        raise PercolationError(f"config file '{path}' not found")
    values: Dict[str, object] = {}
    for key, value in dotenv_values(path).items():
        if value is None:
            continue
        dest = key.strip().lstrip("-").replace("-", "_").lower()
        if dest == "lambda":
            dest = "lam"
        if dest in BOOLEAN_KEYS:
            values[dest] = value.strip().lower() in ("1", "true", "yes", "on")
        else:
            values[dest] = value.strip()
    return values


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        overrides = read_config_file(args.config)
        subparser = parser.commands[args.command]
        # string defaults go through each argument's type conversion
        subparser.set_defaults(**overrides)
        args = parser.parse_args(argv)
    return args


def _model(args: argparse.Namespace) -> ModelParams:
    return ModelParams(tau=args.tau, lam=args.lam, c_f=args.cf, n=args.n, seed=args.seed)


def _degrees(args: argparse.Namespace):
    model = _model(args)
    rng = make_rng(model.seed, PHASE_DEGREES)
    stream = stream_seed(model.seed, (PHASE_DEGREES,))
    return model, degree_service.build_degrees(model, args.case, rng, stream)


def _percolation_p(args: argparse.Namespace, model: ModelParams, degrees) -> float:
    if args.p is not None:
        return args.p
    if args.p_exponent is not None:
        return power_p(degrees.n, args.p_exponent)
    return critical_p(model.lam, criticality_parameter(degrees))


def _write(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text)
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)


def cmd_gen_degrees(args: argparse.Namespace) -> int:
    model, degrees = _degrees(args)
    theta = degree_service.theta_limits(model, settings.HUB_COUNT)
    report = degree_service.validate_assumption1(degrees, theta)
    _write(degrees.to_text(), args.out)
    logger.info(
        f"n={degrees.n} total={degrees.total} mu={degrees.mu:.4f} nu_n={criticality_parameter(degrees):.4f} "
        f"hub deviation={report.hub_relative_deviation:.4f}"
    )
    return EXIT_OK


def cmd_percolate(args: argparse.Namespace) -> int:
    model, degrees = _degrees(args)
    p = _percolation_p(args, model, degrees)
    percolate = graph_service.percolate_retain if args.method == "retain" else graph_service.percolate_fountoulakis
    outcome = percolate(degrees, p, make_rng(model.seed, PHASE_PERCOLATION))
    _write(outcome.graph.to_edge_list(), args.out)
    diagnostics = graph_service.percolated_degree_diagnostics(outcome, degrees, p)
    print(diagnostics.model_dump_json(indent=2), file=sys.stderr)
    return EXIT_OK


def cmd_explore(args: argparse.Namespace) -> int:
    model, degrees = _degrees(args)
    p = _percolation_p(args, model, degrees)
    outcome = graph_service.percolate_retain(degrees, p, make_rng(model.seed, PHASE_PERCOLATION))
    trace = explore_service.explore(outcome, make_rng(model.seed, PHASE_EXPLORATION))
    records = explore_service.components_from_trace(
        trace, outcome, hubs=settings.HUB_COUNT, with_diameter=args.diameters,
        exact_limit=settings.EXACT_DIAMETER_LIMIT,
    )
    _write(trace.to_frame().to_csv(index=False), args.out)
    if args.components:
        frame = pd.DataFrame(
            {
                "size": [r.size for r in records],
                "edges": [r.edges for r in records],
                "surplus": [r.surplus for r in records],
                "diameter": [r.diameter for r in records],
                "exact_flag": [int(r.exact) for r in records],
                "hub_list": [" ".join(str(h) for h in r.contains_hubs) for r in records],
            }
        )
        _write(frame.to_csv(index=False), args.components)
    z = explore_service.z_vector(records, degrees.n, exponents(model.tau).rho)
    print(json.dumps({"p": p, "components": len(z), "top": z.entries[:5]}), file=sys.stderr)
    return EXIT_OK


def cmd_limit_sim(args: argparse.Namespace) -> int:
    model = _model(args)
    mu = args.mu or degree_service.mean_degree_oracle(model.tau, model.c_f)
    theta = limit_service.truncated_theta(model, settings.LIMIT_TAIL_THRESHOLD)
    path = limit_service.simulate_limit_path(
        theta, model.lam, mu, args.horizon, make_rng(model.seed, PHASE_LIMIT),
        tail_threshold=settings.LIMIT_TAIL_THRESHOLD, compensate=args.compensate,
    )
    table = limit_service.mark_surplus(
        limit_service.excursions(path), theta, model.lam, mu, make_rng(model.seed, PHASE_MARKS)
    )
    _write(path.to_frame().to_csv(index=False), args.out)
    if args.excursions:
        _write(table.to_frame().to_csv(index=False), args.excursions)
    z = limit_service.z_limit(table, 5)
    print(json.dumps({"K": theta.K, "jumps": path.num_jumps, "top": z.entries}), file=sys.stderr)
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    if args.experiment is None:
        raise PercolationError("--experiment is required")
    config = ExperimentConfig(
        experiment=args.experiment,
        model=_model(args),
        ladder=args.ladder or [args.n],
        replicates=args.reps,
        p_exponent=args.p_exponent,
        case=args.case,
        horizon=args.horizon,
        limit_paths=args.limit_paths,
        law_draws=args.law_draws,
        output=args.out,
        format=args.format,
        master_seed=args.seed,
        workers=args.workers,
    )
    report = harness.run_experiment(config)
    print(harness.summary_table(report))
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAILED


COMMANDS = {
    "gen-degrees": cmd_gen_degrees,
    "percolate": cmd_percolate,
    "explore": cmd_explore,
    "limit-sim": cmd_limit_sim,
    "experiment": cmd_experiment,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = parse_args(argv)
    except PercolationError as e:
        logging.basicConfig(level=logging.INFO)
        logger.error(e.message)
        return EXIT_ERROR
    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except PercolationError as e:
        logger.error(e.message)
    except ValidationError as e:
        logger.error(f"Invalid parameters: {e}")
    except OSError as e:
        logger.error(f"I/O failure: {e}")
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
