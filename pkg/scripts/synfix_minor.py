"""SYNFIX with small membership changes: HoKT vs first-order vs static.

    python scripts/synfix_minor.py --runs 10 --z-out 5 --out results/synfix_minor
"""

import argparse

from hokt.engine import EvoConfig
from hokt.experiment import ExperimentConfig, format_report, run_experiment
from hokt.transfer import HoktConfig


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--runs", type=int, default=10)
    ap.add_argument("--z-out", type=int, default=5)
    ap.add_argument("--dataset-seed", type=int, default=0)
    ap.add_argument("--generations", type=int, default=100)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", default="results/synfix_minor")
    args = ap.parse_args()
    cfg = ExperimentConfig(
        dataset={"generator": "synfix", "z_out": str(args.z_out), "seed": str(args.dataset_seed)},
        algorithms=("hokt", "first_order", "static"),
        runs=args.runs,
        hokt=HoktConfig(evo=EvoConfig(generations=args.generations)),
        output_dir=args.out,
        workers=args.workers,
    )
    print(format_report(run_experiment(cfg).summary()))


if __name__ == "__main__":
    main()
