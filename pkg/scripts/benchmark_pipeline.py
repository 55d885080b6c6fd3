"""Wall-clock profile of the learning pipeline across task sizes.

For a grid of (rows, attributes) settings: generate a task, split it,
build the candidate pool, learn a minimal and a flat system, and
evaluate on the held-out split — timing each stage separately.  Useful
for spotting regressions in the fitting or certification paths.

Usage:
    python3 scripts/benchmark_pipeline.py [--repeats 3]
"""

from __future__ import annotations

import argparse
import time

from partsys.assembly import learn_systems
from partsys.dataset import split_dataset
from partsys.metrics import evaluate_system
from partsys.pool import build_pool
from partsys.synth import random_task

GRID = (
    (500, 1, 2),
    (1000, 2, 2),
    (2000, 2, 3),
    (2000, 3, 2),
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    print("rows   k  levels  pool_ms  learn_ms  eval_ms  models  survivors")
    for n, k, levels in GRID:
        pool_ms = learn_ms = eval_ms = 0.0
        n_models = n_survivors = 0
        for rep in range(args.repeats):
            seed = args.seed + rep
            data = random_task(n=n, k=k, n_levels=levels, seed=seed)
            bundle = split_dataset(
                data, test_fraction=0.25, prune_fraction=0.25, seed=seed
            )
            t0 = time.perf_counter()
            pool = build_pool(bundle.assign, classes=("logistic",), seed=seed)
            t1 = time.perf_counter()
            minimal, _flat = learn_systems(
                bundle, pool, kinds=("minimal", "flat"), alpha=0.10, seed=seed
            )
            t2 = time.perf_counter()
            evaluate_system(minimal, bundle.test)
            t3 = time.perf_counter()
            pool_ms += (t1 - t0) * 1e3
            learn_ms += (t2 - t1) * 1e3
            eval_ms += (t3 - t2) * 1e3
            n_models = len(pool.models)
            n_survivors = len(minimal.survivors)
        r = args.repeats
        print(
            f"{n:<5}  {k}  {levels:>6}  {pool_ms / r:>7.1f}  {learn_ms / r:>8.1f}  "
            f"{eval_ms / r:>7.1f}  {n_models:>6}  {n_survivors:>9}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
