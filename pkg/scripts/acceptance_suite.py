#!/usr/bin/env python3
"""
Acceptance suite for the scale-free percolation lab.

Runs every acceptance experiment end to end and prints a verdict per
criterion. `--quick` shrinks sizes and replicate counts so the whole suite
finishes in a few minutes; verdicts at quick sizes are indicative only.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Set
import argparse
import logging
import sys
import time

# Add the backend directory to the Python path
backend_dir = Path(__file__).parent.parent / "backend"
sys.path.insert(0, str(backend_dir))

from app.core.config import settings
from app.schemas.experiment import ExperimentConfig, ExperimentId
from app.schemas.params import ModelParams
from app.services.harness import run_experiment, summary_table

logger = logging.getLogger("acceptance")

LIMIT_INTERNAL_CHECKS = {
    "total_variation_identity",
    "strict_excursion_ordering",
    "mark_martingale_mean",
    "expected_value_at_1",
}


@dataclass
class Criterion:
    name: str
    experiment: ExperimentId
    ladder: list
    replicates: int
    extra: Dict = field(default_factory=dict)
    quick_ladder: Optional[list] = None
    quick_replicates: Optional[int] = None
    only: Optional[Set[str]] = None  # restrict the verdict to these checks
    exclude: Set[str] = field(default_factory=set)


CRITERIA = [
    Criterion("exactness and small-instance laws", ExperimentId.ORACLE_SUITE, [1000], 500,
              quick_replicates=50),
    Criterion("critical size exponent", ExperimentId.CRITICAL_WINDOW, [2 ** k for k in range(14, 20)], 200,
              quick_ladder=[2 ** k for k in range(11, 15)], quick_replicates=20),
    Criterion("critical window distribution", ExperimentId.LIMIT_COMPARE, [2 ** 19], 2000,
              extra={"horizon": 30.0}, quick_ladder=[2 ** 14], quick_replicates=200,
              exclude=LIMIT_INTERNAL_CHECKS),
    Criterion("diameter log growth", ExperimentId.DIAMETER, [2 ** 12, 2 ** 14, 2 ** 16], 100,
              quick_ladder=[2 ** 8, 2 ** 10, 2 ** 12], quick_replicates=20),
    Criterion("barely subcritical", ExperimentId.SUBCRITICAL, [10 ** 6], 200,
              quick_ladder=[10 ** 5], quick_replicates=20),
    Criterion("barely supercritical, kappa and Tauberian shape", ExperimentId.SUPERCRITICAL, [10 ** 6], 200,
              quick_ladder=[10 ** 5], quick_replicates=20),
    Criterion("limit process consistency", ExperimentId.LIMIT_COMPARE, [2 ** 10], 10,
              extra={"horizon": 30.0, "limit_paths": 10000}, quick_replicates=10,
              only=LIMIT_INTERNAL_CHECKS),
    Criterion("hub Poisson edges", ExperimentId.HUB_POISSON, [10 ** 6], 500,
              quick_ladder=[10 ** 5], quick_replicates=100),
]


def build_config(criterion: Criterion, quick: bool, seed: int, workers: int, out_dir: Optional[str]) -> ExperimentConfig:
    ladder = (criterion.quick_ladder or criterion.ladder) if quick else criterion.ladder
    replicates = (criterion.quick_replicates or criterion.replicates) if quick else criterion.replicates
    extra = dict(criterion.extra)
    if quick and "limit_paths" in extra:
        extra["limit_paths"] = min(extra["limit_paths"], 1000)
    output = None
    if out_dir:
        slug = criterion.name.split(",")[0].replace(" ", "_")
        output = str(Path(out_dir) / f"{slug}.jsonl")
    return ExperimentConfig(
        experiment=criterion.experiment,
        model=ModelParams(tau=2.5, lam=1.0, c_f=1.0, n=ladder[-1], seed=seed),
        ladder=ladder,
        replicates=replicates,
        master_seed=seed,
        workers=workers,
        output=output,
        **extra,
    )


def run_criterion(criterion: Criterion, quick: bool, seed: int, workers: int, out_dir: Optional[str]) -> bool:
    config = build_config(criterion, quick, seed, workers, out_dir)
    started = time.time()
    report = run_experiment(config)
    checks = [
        c for c in report.checks
        if (criterion.only is None or c.name in criterion.only) and c.name not in criterion.exclude
    ]
    passed = bool(checks) and all(c.passed for c in checks)
    mark = "✅" if passed else "❌"
    print(f"\n{mark} {criterion.name} ({time.time() - started:.1f}s, ladder {config.ladder}, {config.replicates} replicates)")
    report.checks = checks
    print(summary_table(report))
    for warning in report.warnings:
        print(f"   warning: {warning}")
    return passed


def main() -> int:
    parser = argparse.ArgumentParser(description="Run the acceptance experiments")
    parser.add_argument("--quick", action="store_true", help="reduced sizes for a smoke run")
    parser.add_argument("--seed", type=int, default=settings.MASTER_SEED)
    parser.add_argument("--workers", type=int, default=settings.MAX_WORKERS)
    parser.add_argument("--out", default=None, help="directory for JSONL reports")
    parser.add_argument("--only", default=None, help="substring filter on criterion names")
    args = parser.parse_args()

    logging.basicConfig(level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO))
    print("=" * 50)
    print(f"{settings.APP_NAME}: acceptance suite{' (quick)' if args.quick else ''}")
    print("=" * 50)

    selected = [c for c in CRITERIA if args.only is None or args.only in c.name]
    verdicts = {c.name: run_criterion(c, args.quick, args.seed, args.workers, args.out) for c in selected}

    print("\n" + "=" * 50)
    for name, passed in verdicts.items():
        print(f"{'PASS' if passed else 'FAIL'}  {name}")
    print("=" * 50)
    return 0 if all(verdicts.values()) else 2


if __name__ == "__main__":
    sys.exit(main())
