"""Reporting interfaces: trees of partial reports rooted at the empty report.

Three shapes are supported.  A minimal tree offers full memberships as an
all-or-nothing choice, a flat tree offers every partial combination in one
step, and a sequential tree solicits one attribute per edge.  Sequential
structures can be enumerated exhaustively under data and ordering
constraints, or grown greedily against a model pool.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from .dataset import Dataset, GroupSchema, ReportingGroup, restrict_to
from .errors import ConfigError
from .models import Metric
from .pool import ModelPool, select_model

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class OrderingConstraint:
    """Attribute `before` must be reported before `after` on any path where
    the guard holds; guard is an (attribute, level) pair or None for always."""

    before: int
    after: int
    guard: tuple[int, int] | None = None

    def to_dict(self, schema: GroupSchema) -> dict:
        out = {
            "before": schema.attributes[self.before],
            "after": schema.attributes[self.after],
        }
        if self.guard is not None:
            a, l = self.guard
            out["when"] = {"attribute": schema.attributes[a], "level": schema.levels[a][l]}
        return out


def parse_ordering(schema: GroupSchema, entries: Sequence[Mapping]) -> tuple[OrderingConstraint, ...]:
    out = []
    for entry in entries:
        before = schema.attribute_index(str(entry["before"]))
        after = schema.attribute_index(str(entry["after"]))
        if before == after:
            raise ConfigError("ordering constraint cannot relate an attribute to itself")
        guard = None
        if "when" in entry and entry["when"] is not None:
            g_attr = schema.attribute_index(str(entry["when"]["attribute"]))
            g_level = schema.level_index(g_attr, str(entry["when"]["level"]))
            guard = (g_attr, g_level)
        out.append(OrderingConstraint(before, after, guard))
    return tuple(out)


@dataclass(frozen=True)
class TreeConstraints:
    """Admissibility requirements for every node of an enumerated tree.

    min_samples defaults to (feature count + 1) when left unset.
    """

    min_samples: int | None = None
    require_both_classes: bool = True
    ordering: tuple[OrderingConstraint, ...] = ()
    max_trees: int | None = None

    def resolved_min_samples(self, d: Dataset) -> int:
        return d.d + 1 if self.min_samples is None else self.min_samples


@dataclass(frozen=True)
class ReportingTree:
    """Immutable rooted tree over reporting groups.

    parents maps node -> parent (None for the root); children preserves a
    deterministic insertion order.  kind is one of minimal, flat,
    sequential; greedily grown trees are sequential in structure.
    """

    kind: str
    schema: GroupSchema
    parents: Mapping[ReportingGroup, ReportingGroup | None]
    children: Mapping[ReportingGroup, tuple[ReportingGroup, ...]]

    @property
    def root(self) -> ReportingGroup:
        return ReportingGroup.root(self.schema.k)

    def __contains__(self, node: ReportingGroup) -> bool:
        return node in self.parents

    def nodes(self) -> list[ReportingGroup]:
        """Breadth-first, deterministic."""
        out = [self.root]
        frontier = [self.root]
        while frontier:
            nxt = []
            for node in frontier:
                for child in self.children.get(node, ()):
                    out.append(child)
                    nxt.append(child)
            frontier = nxt
        return out

    def n_nodes(self) -> int:
        return len(self.parents)

    def leaves(self) -> list[ReportingGroup]:
        return [n for n in self.nodes() if not self.children.get(n)]

    def path_to(self, node: ReportingGroup) -> list[ReportingGroup]:
        """Root-first chain of ancestors ending at node."""
        chain = [node]
        while self.parents[chain[-1]] is not None:
            chain.append(self.parents[chain[-1]])
        return list(reversed(chain))

    def depth(self) -> int:
        return max(len(self.path_to(n)) - 1 for n in self.nodes())


def _tree_from_edges(
    kind: str, schema: GroupSchema, edges: Sequence[tuple[ReportingGroup, ReportingGroup]]
) -> ReportingTree:
    root = ReportingGroup.root(schema.k)
    parents: dict = {root: None}
    children: dict = {root: ()}
    for parent, child in edges:
        if parent not in parents:
            raise ConfigError("edges must be listed parent-first")
        if child in parents:
            raise ConfigError(f"node {child.entries} appears twice")
        parents[child] = parent
        children[child] = ()
        children[parent] = children[parent] + (child,)
    return ReportingTree(kind, schema, parents, children)


def build_minimal(schema: GroupSchema) -> ReportingTree:
    """Root plus one all-or-nothing child per full membership."""
    root = ReportingGroup.root(schema.k)
    return _tree_from_edges("minimal", schema, [(root, g) for g in schema.full_groups()])


def build_flat(schema: GroupSchema) -> ReportingTree:
    """Root plus every non-empty partial combination as a direct child."""
    root = ReportingGroup.root(schema.k)
    combos = itertools.product(*([None] + list(range(len(lv))) for lv in schema.levels))
    edges = []
    for entries in combos:
        r = ReportingGroup(entries)
        if r.n_reported:
            edges.append((root, r))
    return _tree_from_edges("flat", schema, edges)


def validate_tree(t: ReportingTree) -> None:
    """Structural checks; raises ConfigError on the first violation."""
    root = t.root
    if root not in t.parents or t.parents[root] is not None:
        raise ConfigError("tree must be rooted at the empty report")
    seen = set(t.nodes())
    if seen != set(t.parents):
        raise ConfigError("every node must be reachable from the root")
    if len(seen) != len(t.nodes()):
        raise ConfigError("duplicate nodes in tree")
    for node in t.nodes():
        for child in t.children.get(node, ()):
            if not child.refines(node):
                raise ConfigError(f"child {child.entries} does not refine {node.entries}")
            added = child.n_reported - node.n_reported
            if added < 1:
                raise ConfigError("every edge must report at least one new attribute")
            if t.kind == "sequential" and added != 1:
                raise ConfigError("sequential edges must report exactly one attribute")
            if t.kind in ("minimal", "flat") and node != root:
                raise ConfigError(f"{t.kind} trees only have root children")
    if t.kind == "minimal":
        for child in t.children.get(root, ()):
            if not child.is_full:
                raise ConfigError("minimal children must be full memberships")


# ---------------------------------------------------------------------------
# sequential enumeration


def _node_admissible(d: Dataset, node: ReportingGroup, c: TreeConstraints, min_samples: int) -> bool:
    rows = restrict_to(d, node)
    if rows.n < min_samples:
        return False
    if c.require_both_classes:
        pos = int(rows.labels.sum())
        if pos == 0 or pos == rows.n:
            return False
    return True


def _ordering_allows(c: TreeConstraints, prefix: ReportingGroup, attribute: int) -> bool:
    """May `attribute` be solicited next at `prefix`?

    A constraint (X before Y, guard) bars branching on Y while X is still
    unreported, on any path where the guard holds or could still hold.
    Trees below branch on every remaining attribute, so an unreported
    guard attribute always yields some path satisfying the guard.
    """
    for oc in c.ordering:
        if oc.after != attribute:
            continue
        if prefix.entries[oc.before] is not None:
            continue
        if oc.guard is None:
            return False
        g_attr, g_level = oc.guard
        entry = prefix.entries[g_attr]
        if entry is None or entry == g_level:
            return False
    return True


def _branch_options(
    d: Dataset,
    prefix: ReportingGroup,
    remaining: tuple[int, ...],
    c: TreeConstraints,
    min_samples: int,
) -> list[tuple[int, list[ReportingGroup]]]:
    """Attributes that may be solicited at prefix, with admissible children."""
    out = []
    for attr in remaining:
        if not _ordering_allows(c, prefix, attr):
            continue
        schema = d.schema
        kids = [prefix.extend(attr, lv) for lv in range(len(schema.levels[attr]))]
        if all(_node_admissible(d, kid, c, min_samples) for kid in kids):
            out.append((attr, kids))
    return out


def _enumerate_fragments(
    d: Dataset,
    prefix: ReportingGroup,
    remaining: tuple[int, ...],
    c: TreeConstraints,
    min_samples: int,
) -> Iterator:
    """Yield subtree shapes below prefix; a shape is (attr, per-child shapes).

    Child subtrees are chosen independently per branch, so two siblings may
    solicit the remaining attributes in different orders.
    """
    if not remaining:
        yield None
        return
    for attr, kids in _branch_options(d, prefix, remaining, c, min_samples):
        rest = tuple(a for a in remaining if a != attr)
        per_child = [
            list(_enumerate_fragments(d, kid, rest, c, min_samples)) for kid in kids
        ]
        if any(len(options) == 0 for options in per_child):
            continue
        for combo in itertools.product(*per_child):
            yield (attr, kids, combo)


def _fragment_edges(prefix: ReportingGroup, fragment) -> list[tuple[ReportingGroup, ReportingGroup]]:
    if fragment is None:
        return []
    attr, kids, combo = fragment
    edges = []
    for kid, sub in zip(kids, combo):
        edges.append((prefix, kid))
        edges.extend(_fragment_edges(kid, sub))
    return edges


def enumerate_sequential(
    schema: GroupSchema, d: Dataset, constraints: TreeConstraints | None = None
) -> list[ReportingTree]:
    """All admissible one-attribute-per-step trees, deterministic order.

    Every node must satisfy the data constraints on its consistent rows.
    An empty result means no admissible tree exists.  max_trees truncates
    the enumeration (logged) rather than failing.
    """
    c = constraints or TreeConstraints()
    if schema.k > 8 and c.max_trees is None and not c.ordering:
        raise ConfigError(
            "more than 8 attributes: supply ordering constraints or max_trees"
        )
    min_samples = c.resolved_min_samples(d)
    root = ReportingGroup.root(schema.k)
    if not _node_admissible(d, root, c, min_samples):
        logger.info("root fails the data constraints; no admissible tree")
        return []
    out = []
    everything = tuple(range(schema.k))
    for fragment in _enumerate_fragments(d, root, everything, c, min_samples):
        out.append(_tree_from_edges("sequential", schema, _fragment_edges(root, fragment)))
        if c.max_trees is not None and len(out) >= c.max_trees:
            logger.warning("enumeration truncated at max_trees=%d", c.max_trees)
            break
    return out


def count_sequential(
    schema: GroupSchema, d: Dataset, constraints: TreeConstraints | None = None
) -> int:
    """Number of admissible sequential trees, without materializing them."""
    c = constraints or TreeConstraints()
    min_samples = c.resolved_min_samples(d)
    root = ReportingGroup.root(schema.k)
    if not _node_admissible(d, root, c, min_samples):
        return 0

    def count(prefix: ReportingGroup, remaining: tuple[int, ...]) -> int:
        if not remaining:
            return 1
        total = 0
        for attr, kids in _branch_options(d, prefix, remaining, c, min_samples):
            rest = tuple(a for a in remaining if a != attr)
            prod = 1
            for kid in kids:
                prod *= count(kid, rest)
                if prod == 0:
                    break
            total += prod
        return total

    return count(root, tuple(range(schema.k)))


# ---------------------------------------------------------------------------
# greedy growth


def greedy_tree(
    schema: GroupSchema, assign_data: Dataset, pool: ModelPool, metric: Metric
) -> ReportingTree:
    """Grow a sequential tree by repeatedly taking the safest useful split.

    Each leaf splits on the unused attribute whose worst resulting child
    still gains over the leaf's current model (risks on the assign split);
    splits happen only for strictly positive worst-case gains.
    """
    from .models import TrainedModel, predict_scores  # local to avoid cycles in hints

    root = ReportingGroup.root(schema.k)
    edges: list[tuple[ReportingGroup, ReportingGroup]] = []
    score_cache: dict = {}
    current: dict[ReportingGroup, TrainedModel] = {}
    model, _ = select_model(pool, root, assign_data, metric, score_cache)
    if model is None:
        raise ConfigError("assign split cannot score any model at the root")
    current[root] = model
    frontier = [root]
    while frontier:
        grown: list[ReportingGroup] = []
        for leaf in frontier:
            unused = [a for a in range(schema.k) if leaf.entries[a] is None]
            best_attr = None
            best_gain = 0.0
            best_children: list[tuple[ReportingGroup, TrainedModel]] = []
            for attr in unused:
                kids = [leaf.extend(attr, lv) for lv in range(len(schema.levels[attr]))]
                worst = None
                assignments = []
                for kid in kids:
                    rows = restrict_to(assign_data, kid)
                    gain = 0.0
                    chosen = current[leaf]
                    if rows.n and metric.defined_on(rows.labels):
                        parent_risk = metric.risk(predict_scores(current[leaf], rows), rows.labels)
                        kid_model, kid_risk = select_model(pool, kid, assign_data, metric, score_cache)
                        if kid_model is not None:
                            gain = parent_risk - kid_risk
                            chosen = kid_model
                    assignments.append((kid, chosen))
                    worst = gain if worst is None else min(worst, gain)
                if worst is not None and worst > best_gain:
                    best_gain = worst
                    best_attr = attr
                    best_children = assignments
            if best_attr is not None:
                for kid, kid_model in best_children:
                    edges.append((leaf, kid))
                    current[kid] = kid_model
                    grown.append(kid)
        frontier = grown
    return _tree_from_edges("sequential", schema, edges)
