"""Sweep the certification level and watch options disappear.

Learns a minimal system on one seeded synthetic task at a ladder of
certification levels and prints, per level: surviving options, pruned
fraction, held-out risk, and held-out data use.  Stricter levels can
only remove options — the survivor sets are nested — so data use falls
and the pruned fraction rises monotonically down the table.

Usage:
    python3 scripts/run_alpha_sweep.py [--n 400] [--k 2] [--seed 3]
"""

from __future__ import annotations

import argparse

from partsys.assembly import learn_systems
from partsys.dataset import split_dataset
from partsys.metrics import evaluate_system
from partsys.pool import build_pool
from partsys.synth import random_task

LADDER = (0.5, 0.2, 0.1, 0.05, 0.02, 0.005)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=400, help="rows in the task")
    parser.add_argument("--k", type=int, default=2, help="group attributes")
    parser.add_argument("--levels", type=int, default=2, help="levels per attribute")
    parser.add_argument("--seed", type=int, default=3)
    args = parser.parse_args()

    data = random_task(n=args.n, k=args.k, n_levels=args.levels, seed=args.seed)
    bundle = split_dataset(
        data, test_fraction=0.25, prune_fraction=0.25, seed=args.seed
    )
    pool = build_pool(bundle.assign, classes=("logistic",), seed=args.seed)
    print(f"task: n={data.n} k={args.k} levels={args.levels} pool={len(pool.models)} models")
    print("\nalpha   survivors  options_pruned  test_risk  data_use")
    previous = None
    for alpha in LADDER:
        (system,) = learn_systems(
            bundle, pool, kinds=("minimal",), alpha=alpha, seed=args.seed
        )
        report = evaluate_system(system, bundle.test)
        nested = "" if previous is None or system.survivors <= previous else "  <- NOT NESTED"
        previous = system.survivors
        print(
            f"{alpha:<6}  {len(system.survivors):>9}  {report.options_pruned:>14.3f}  "
            f"{report.overall_risk:>9.4f}  {report.data_use:>8.4f}{nested}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
