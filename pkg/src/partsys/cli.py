"""Command-line entry point: train, evaluate, enumerate, simulate, serve.

All randomness flows from the single --seed flag, logs go to standard
error, and results go to files or standard output — so identical
invocations produce byte-identical artifacts and reports.  Failures exit
with stable codes: 2 configuration, 3 data (including unreadable
artifacts), 4 training, 5 bind failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from .assembly import ParticipatorySystem, learn_systems
from .dataset import load_dataset, load_schema, split_dataset, SplitBundle
from .errors import ArtifactError, ConfigError, DataError, TrainingError
from .interface import TreeConstraints, count_sequential, enumerate_sequential
from .metrics import evaluate_system
from .models import AUC_RISK, ERROR
from .pool import build_pool
from .simulate import make_population, participation_profile
from .version import TOOLKIT_VERSION

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_TRAINING = 4
EXIT_BIND = 5

logger = logging.getLogger(__name__)


def _metric(name: str):
    return {"error": ERROR, "auc": AUC_RISK}[name]


def _load_inputs(args) -> tuple:
    data = load_dataset(args.data, args.schema)
    return data


def _bundle(args, data) -> SplitBundle:
    if args.shared_assign_prune and args.test_frac == 0.0:
        return SplitBundle.shared(data, args.seed)
    return split_dataset(
        data,
        test_fraction=args.test_frac,
        prune_fraction=args.prune_frac,
        seed=args.seed,
        shared_assign_prune=args.shared_assign_prune,
    )


def _check_schema(system: ParticipatorySystem, data) -> None:
    if system.schema.to_dict() != data.schema.to_dict():
        raise DataError(
            "the artifact's group schema does not match the data's schema"
        )


def cmd_train(args) -> int:
    data = _load_inputs(args)
    bundle = _bundle(args, data)
    pool = build_pool(
        bundle.assign,
        classes=tuple(args.model_class),
        seed=args.seed,
        include_partial_scopes=not args.no_partial_scopes,
    )
    constraints = TreeConstraints(max_trees=args.max_trees)
    systems = learn_systems(
        bundle,
        pool,
        kinds=tuple(args.kind),
        metric=_metric(args.metric),
        alpha=args.alpha,
        constraints=constraints,
        seed=args.seed,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for system in systems:
        path = out / f"{system.name}.json"
        system.save(path)
        report = evaluate_system(system, bundle.test)
        print(
            f"{system.name}\tkind={system.kind}\trisk={report.overall_risk:.4f}\t"
            f"options_pruned={report.options_pruned:.3f}\tdata_use={report.data_use:.3f}\t"
            f"artifact={path}"
        )
    return 0


def cmd_evaluate(args) -> int:
    system = ParticipatorySystem.load(args.system)
    data = load_dataset(args.data, args.schema)
    _check_schema(system, data)
    report = evaluate_system(
        system, data, policy=args.policy, resamples=args.resamples, seed=args.seed
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report.save_json(out / f"{system.name}_report.json")
    report.save_group_csv(out / f"{system.name}_groups.csv")
    print(
        f"{system.name}\trisk={report.overall_risk:.4f}\tgain={report.overall_gain:.4f}\t"
        f"violations={report.n_violations}\treports={out}"
    )
    return 0


def cmd_enumerate(args) -> int:
    data = _load_inputs(args)
    constraints = TreeConstraints(
        min_samples=args.min_samples, max_trees=args.max_trees
    )
    if args.count_only:
        print(count_sequential(data.schema, data, constraints))
        return 0
    trees = enumerate_sequential(data.schema, data, constraints)
    print(len(trees))
    for i, tree in enumerate(trees):
        print(f"tree {i}")
        for node in tree.nodes():
            parent = tree.parents[node]
            if parent is not None:
                print(f"  {parent.label(data.schema)} -> {node.label(data.schema)}")
    return 0


def cmd_simulate(args) -> int:
    system = ParticipatorySystem.load(args.system)
    data = load_dataset(args.data, args.schema)
    _check_schema(system, data)
    costs = []
    for piece in args.costs.split(","):
        piece = piece.strip()
        if not piece:
            continue
        if piece in ("inf", "Infinity"):
            costs.append(math.inf)
            continue
        try:
            costs.append(float(piece))
        except ValueError as exc:
            raise ConfigError(f"invalid cost level {piece!r}") from exc
    if not costs:
        raise ConfigError("at least one cost level is required")
    agents = make_population(data, mode=args.utility_mode)
    rows = participation_profile(system, agents, costs, data)
    lines = ["cost,participation,mean_reported_fraction,mean_utility"]
    for row in rows:
        lines.append(
            f"{row['cost']},{row['participation']!r},"
            f"{row['mean_reported_fraction']!r},{row['mean_utility']!r}"
        )
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"profile written to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def cmd_serve(args) -> int:
    from .service import make_server

    system = ParticipatorySystem.load(args.system)
    try:
        server = make_server(system, host=args.host, port=args.port)
    except OSError as exc:
        print(f"cannot bind {args.host}:{args.port}: {exc}", file=sys.stderr)
        return EXIT_BIND
    print(f"serving {system.name} on http://{args.host}:{server.server_port}/")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="CSV with features, attributes, label")
    p.add_argument("--schema", required=True, help="schema JSON document")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="partsys",
        description="Learn, evaluate, serve, and simulate participatory classification systems.",
    )
    parser.add_argument("--version", action="version", version=TOOLKIT_VERSION)
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="learn systems and write artifacts")
    _add_data_flags(t)
    t.add_argument("--kind", action="append", default=None,
                   choices=["minimal", "flat", "sequential", "greedy"],
                   help="tree kind to learn (repeatable; default minimal)")
    t.add_argument("--metric", default="error", choices=["error", "auc"])
    t.add_argument("--model-class", action="append", default=None,
                   choices=["logistic", "forest"],
                   help="pool model class (repeatable; default logistic)")
    t.add_argument("--alpha", type=float, default=0.10)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--test-frac", type=float, default=0.2)
    t.add_argument("--prune-frac", type=float, default=0.2)
    t.add_argument("--shared-assign-prune", action="store_true")
    t.add_argument("--no-partial-scopes", action="store_true",
                   help="skip subgroup-scoped pool models")
    t.add_argument("--max-trees", type=int, default=None)
    t.add_argument("--out", required=True, help="directory for artifacts")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("evaluate", help="evaluate an artifact on held-out data")
    e.add_argument("--system", required=True, help="system artifact JSON")
    _add_data_flags(e)
    e.add_argument("--policy", default="gain_positive",
                   choices=["truthful", "gain_positive"])
    e.add_argument("--resamples", type=int, default=100)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--out", required=True, help="directory for report files")
    e.set_defaults(func=cmd_evaluate)

    n = sub.add_parser("enumerate", help="enumerate admissible sequential trees")
    _add_data_flags(n)
    n.add_argument("--count-only", action="store_true")
    n.add_argument("--min-samples", type=int, default=None)
    n.add_argument("--max-trees", type=int, default=None)
    n.set_defaults(func=cmd_enumerate)

    s = sub.add_parser("simulate", help="sweep disclosure costs over a population")
    s.add_argument("--system", required=True)
    _add_data_flags(s)
    s.add_argument("--costs", default="0,0.005,0.01,0.02,0.05,0.1,inf",
                   help="comma-separated cost levels; 'inf' allowed")
    s.add_argument("--utility-mode", default="displayed", choices=["displayed", "oracle"])
    s.add_argument("--out", default=None, help="profile CSV path (default stdout)")
    s.set_defaults(func=cmd_simulate)

    v = sub.add_parser("serve", help="serve an artifact over HTTP")
    v.add_argument("--system", required=True)
    v.add_argument("--host", default="127.0.0.1")
    v.add_argument("--port", type=int, default=8347)
    v.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "kind", None) is not None and not args.kind:
        args.kind = None
    if hasattr(args, "kind") and args.kind is None:
        args.kind = ["minimal"]
    if hasattr(args, "model_class") and args.model_class is None:
        args.model_class = ["logistic"]
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, ArtifactError, json.JSONDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TrainingError as exc:
        print(f"training error: {exc}", file=sys.stderr)
        return EXIT_TRAINING


if __name__ == "__main__":
    sys.exit(main())
