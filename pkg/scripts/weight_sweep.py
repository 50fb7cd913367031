"""Fixed weight schedules at one timestep, everything else first-order.

Example: second-order weights at step 3 of stride-2 SYNFIX, comparing
(1, 0), (0.8, 0.2), (0.5, 0.5) and (0.2, 0.8)::

    python scripts/weight_sweep.py --step 3 --weights "1,0;0.8,0.2;0.5,0.5;0.2,0.8"
"""

import argparse

import numpy as np

from hokt.benchgen import SynfixSpec, gen_synfix, great_change_subsample
from hokt.engine import EvoConfig
from hokt.io import load_network
from hokt.transfer import HoktConfig, run_hokt


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--dataset", help="dataset directory; default: stride-2 SYNFIX")
    ap.add_argument("--step", type=int, default=3)
    ap.add_argument("--weights", default="1,0;0.8,0.2;0.5,0.5;0.2,0.8")
    ap.add_argument("--runs", type=int, default=5)
    ap.add_argument("--generations", type=int, default=100)
    args = ap.parse_args()
    net = load_network(args.dataset) if args.dataset else great_change_subsample(gen_synfix(SynfixSpec()), 2)
    for text in args.weights.split(";"):
        w = tuple(float(x) for x in text.split(","))
        schedule = {t: (1.0,) for t in range(2, net.T + 1)}
        schedule[args.step] = w
        nmis = []
        for r in range(args.runs):
            cfg = HoktConfig(evo=EvoConfig(seed=r, generations=args.generations), policy="fixed", schedule=schedule)
            nmis.append(run_hokt(net, cfg)[args.step - 1].nmi_vs_truth)
        print(f"w={w}: NMI at t={args.step} {np.mean(nmis):.4f} ± {np.std(nmis, ddof=1) if len(nmis) > 1 else 0:.4f}")


if __name__ == "__main__":
    main()
