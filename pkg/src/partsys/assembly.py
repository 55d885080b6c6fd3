"""Assemble reporting trees and model pools into deployable systems.

The pipeline is: assign the best viable model to every tree node on the
assign split, then walk the leaves bottom-up and keep an option only when
a one-sided hypothesis test on the prune split shows the option's model
beats its parent's.  Surviving options carry their certificates so every
displayed gain is backed by a validation sample and a p-value.

A packaged system finally enforces the two consent guarantees as code:
the root model consumes no group attributes, and every surviving non-root
node holds a kept certificate against its surviving parent.  Interior
nodes that were never leaf-tested are certified during packaging; an
uncertified reporting step loses its whole subtree rather than soliciting
data it cannot justify.
"""

from __future__ import annotations

import json
import logging
import math
from collections import deque
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .dataset import Dataset, GroupSchema, ReportingGroup, SplitBundle, restrict_to
from .errors import ArtifactError, ConfigError, UndefinedMetric
from .interface import (
    ReportingTree,
    TreeConstraints,
    _tree_from_edges,
    build_flat,
    build_minimal,
    enumerate_sequential,
    greedy_tree,
)
from .models import Metric, TrainedModel, predict_scores
from .pool import ModelPool, select_model
from .version import TOOLKIT_VERSION

logger = logging.getLogger(__name__)

ARTIFACT_FORMAT_VERSION = 1

# Smallest p-value a degenerate (zero-variance) z-test can report.
P_FLOOR = 1e-300

EXACT_BINOMIAL_CUTOFF = 25  # discordant pairs below this use the exact tail


# ---------------------------------------------------------------------------
# hypothesis tests


def _chi2_sf_1df(x: float) -> float:
    """Upper tail of the chi-square distribution with one degree of freedom."""
    return math.erfc(math.sqrt(x / 2.0))


def _norm_sf(z: float) -> float:
    """Upper tail of the standard normal distribution."""
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def mcnemar_test(b: int, c: int) -> tuple[float, float]:
    """Paired-accuracy test on discordant counts, one-sided for b > c.

    b counts rows the candidate gets right and the reference wrong, c the
    reverse.  With 25 or more discordant rows the continuity-corrected
    chi-square statistic is used and its tail halved for one-sidedness;
    below that the exact binomial(b+c, 1/2) upper tail is returned.  No
    discordant rows at all is no evidence: p = 1.
    """
    if b < 0 or c < 0:
        raise ConfigError("discordant counts cannot be negative")
    n = b + c
    if n == 0:
        return 0.0, 1.0
    statistic = (abs(b - c) - 1.0) ** 2 / n
    if n >= EXACT_BINOMIAL_CUTOFF:
        half = 0.5 * _chi2_sf_1df(statistic)
        p = half if b > c else 1.0 - half
    else:
        p = sum(math.comb(n, i) for i in range(b, n + 1)) / 2.0**n
    return statistic, p


def _structural_components(scores: np.ndarray, labels: np.ndarray):
    """Per-row placement components of the AUC, via midranks."""
    from .models import _midranks

    pos = labels == 1
    neg = ~pos
    m = int(pos.sum())
    n = int(neg.sum())
    tz = _midranks(scores)
    tx = _midranks(scores[pos])
    ty = _midranks(scores[neg])
    v_pos = (tz[pos] - tx) / n
    v_neg = 1.0 - (tz[neg] - ty) / m
    auc = float(v_pos.mean())
    return auc, v_pos, v_neg


def delong_delta_variance(
    scores_a: np.ndarray, scores_b: np.ndarray, labels: np.ndarray
) -> tuple[float, float]:
    """AUC difference (a minus b) and its placement-component variance."""
    scores_a = np.asarray(scores_a, dtype=np.float64)
    scores_b = np.asarray(scores_b, dtype=np.float64)
    labels = np.asarray(labels)
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetric("auc comparison needs both label classes")
    auc_a, vp_a, vn_a = _structural_components(scores_a, labels)
    auc_b, vp_b, vn_b = _structural_components(scores_b, labels)
    delta = auc_a - auc_b
    var = 0.0
    if n_pos > 1:
        var += float(np.var(vp_a - vp_b, ddof=1)) / n_pos
    if n_neg > 1:
        var += float(np.var(vn_a - vn_b, ddof=1)) / n_neg
    return delta, var


def delong_test(
    scores_a: np.ndarray, scores_b: np.ndarray, labels: np.ndarray
) -> tuple[float, float]:
    """One-sided paired AUC comparison: H1 says model a ranks better.

    Uses the placement-component covariance estimator for correlated AUCs.
    Identical score vectors are no evidence (p = 1); a zero-variance
    difference collapses to p = 1 or the floor depending on its sign.
    """
    scores_a = np.asarray(scores_a, dtype=np.float64)
    scores_b = np.asarray(scores_b, dtype=np.float64)
    if np.array_equal(scores_a, scores_b):
        return 0.0, 1.0
    delta, var = delong_delta_variance(scores_a, scores_b, labels)
    if var <= 0.0:
        if delta > 0:
            return math.inf, P_FLOOR
        return (0.0, 1.0) if delta == 0 else (-math.inf, 1.0)
    z = delta / math.sqrt(var)
    return z, max(_norm_sf(z), P_FLOOR)


def bootstrap_test(
    metric: Metric,
    candidate: TrainedModel,
    reference: TrainedModel,
    data: Dataset,
    resamples: int = 100,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile bootstrap of H0: the candidate is no better than the reference.

    p is the fraction of row resamples on which the candidate's risk is at
    least the reference's; ties and resamples where the metric is undefined
    count toward H0.  Returns (observed risk difference, p).
    """
    if data.n == 0:
        raise UndefinedMetric("bootstrap needs a non-empty sample")
    rng = np.random.default_rng(seed)
    cand = predict_scores(candidate, data)
    ref = predict_scores(reference, data)
    held = 0
    for _ in range(resamples):
        idx = rng.integers(0, data.n, size=data.n)
        labels = data.labels[idx]
        if not metric.defined_on(labels):
            held += 1
            continue
        if metric.risk(cand[idx], labels) >= metric.risk(ref[idx], labels):
            held += 1
    observed = None
    if metric.defined_on(data.labels):
        observed = metric.risk(ref, data.labels) - metric.risk(cand, data.labels)
    return (0.0 if observed is None else observed), held / resamples


# ---------------------------------------------------------------------------
# gain certificates


@dataclass(frozen=True)
class GainCertificate:
    """Evidence attached to a reporting option.

    gain is the risk drop (parent minus option) on the option's validation
    rows; decision records whether the option survived its test.
    """

    metric: str
    test: str
    n_validation: int
    p_value: float
    decision: str  # kept | pruned | auto_pruned_no_data
    leaf_risk: float | None = None
    parent_risk: float | None = None
    gain: float | None = None
    statistic: float | None = None

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "test": self.test,
            "n_validation": self.n_validation,
            "p_value": self.p_value,
            "decision": self.decision,
            "leaf_risk": self.leaf_risk,
            "parent_risk": self.parent_risk,
            "gain": self.gain,
            "statistic": self.statistic,
        }

    @classmethod
    def from_dict(cls, payload: Mapping) -> "GainCertificate":
        return cls(
            metric=str(payload["metric"]),
            test=str(payload["test"]),
            n_validation=int(payload["n_validation"]),
            p_value=float(payload["p_value"]),
            decision=str(payload["decision"]),
            leaf_risk=payload.get("leaf_risk"),
            parent_risk=payload.get("parent_risk"),
            gain=payload.get("gain"),
            statistic=payload.get("statistic"),
        )


@dataclass(frozen=True)
class TestConfig:
    """Which validation test certifies gains, and its knobs.

    test None picks by metric: paired-accuracy for error, placement-based
    AUC comparison for auc.  The bootstrap applies to either metric when
    forced explicitly.
    """

    test: str | None = None
    resamples: int = 100
    seed: int = 0

    def resolve(self, metric: Metric) -> str:
        if self.test is not None:
            if self.test not in ("mcnemar", "delong", "bootstrap"):
                raise ConfigError(f"unknown test {self.test!r}")
            return self.test
        return "mcnemar" if metric.name == "error" else "delong"


def test_gain(
    r: ReportingGroup,
    leaf_model: TrainedModel,
    parent_model: TrainedModel,
    prune_data: Dataset,
    metric: Metric,
    alpha: float,
    config: TestConfig | None = None,
    score_cache: dict | None = None,
) -> GainCertificate:
    """Certify (or refuse) the reporting step into r on held-out rows.

    One-sided null: the option's model performs no better than its
    parent's on rows consistent with r.  Options without validation rows,
    or whose metric is undefined there, are auto-pruned rather than
    trusted blindly.
    """
    cfg = config or TestConfig()
    test_name = cfg.resolve(metric)
    mask = prune_data.consistency_mask(r)
    n_validation = int(mask.sum())
    labels = prune_data.labels[mask]
    if n_validation == 0 or not metric.defined_on(labels):
        return GainCertificate(
            metric=metric.name,
            test=test_name,
            n_validation=n_validation,
            p_value=1.0,
            decision="auto_pruned_no_data",
        )

    def scores(model: TrainedModel) -> np.ndarray:
        if score_cache is not None:
            full = score_cache.get(model.id)
            if full is None:
                full = predict_scores(model, prune_data)
                score_cache[model.id] = full
            return full[mask]
        rows = prune_data.select(np.flatnonzero(mask))
        return predict_scores(model, rows)

    leaf_scores = scores(leaf_model)
    parent_scores = scores(parent_model)
    leaf_risk = metric.risk(leaf_scores, labels)
    parent_risk = metric.risk(parent_scores, labels)

    if test_name == "mcnemar":
        leaf_hat = leaf_scores >= 0.5
        parent_hat = parent_scores >= 0.5
        leaf_right = leaf_hat == labels.astype(bool)
        parent_right = parent_hat == labels.astype(bool)
        b = int(np.sum(leaf_right & ~parent_right))
        c = int(np.sum(~leaf_right & parent_right))
        statistic, p_value = mcnemar_test(b, c)
    elif test_name == "delong":
        statistic, p_value = delong_test(leaf_scores, parent_scores, labels)
    else:
        rows = prune_data.select(np.flatnonzero(mask))
        statistic, p_value = bootstrap_test(
            metric, leaf_model, parent_model, rows, cfg.resamples, cfg.seed
        )

    return GainCertificate(
        metric=metric.name,
        test=test_name,
        n_validation=n_validation,
        p_value=p_value,
        decision="kept" if p_value < alpha else "pruned",
        leaf_risk=leaf_risk,
        parent_risk=parent_risk,
        gain=parent_risk - leaf_risk,
        statistic=None if statistic is None else float(statistic),
    )


# ---------------------------------------------------------------------------
# assignment and pruning


@dataclass(frozen=True)
class AssignedTree:
    tree: ReportingTree
    model_ids: Mapping[ReportingGroup, str]


@dataclass(frozen=True)
class PrunedTree:
    tree: ReportingTree
    model_ids: Mapping[ReportingGroup, str]
    certificates: Mapping[ReportingGroup, GainCertificate]
    survivors: frozenset[ReportingGroup]


def assign_models(
    t: ReportingTree, pool: ModelPool, assign_data: Dataset, metric: Metric
) -> AssignedTree:
    """Give every node the viable model with the lowest assign-split risk.

    Breadth-first; nodes whose consistent rows cannot score the metric
    inherit the parent's choice.  Ties break toward fewer required
    attributes, the generic kind, then lexicographic id.
    """
    cache: dict = {}
    ids: dict[ReportingGroup, str] = {}
    for node in t.nodes():
        model, _ = select_model(pool, node, assign_data, metric, cache)
        if model is not None:
            ids[node] = model.id
        else:
            parent = t.parents[node]
            if parent is None:
                raise UndefinedMetric("assign split cannot score any model at the root")
            ids[node] = ids[parent]
    return AssignedTree(t, ids)


def prune_leaves(
    assigned: AssignedTree,
    pool: ModelPool,
    prune_data: Dataset,
    metric: Metric,
    alpha: float,
    config: TestConfig | None = None,
) -> PrunedTree:
    """Drop leaves whose gain over the parent is not certified.

    Bottom-up: a leaf is removed unless its certificate says kept; a
    parent whose children have all been removed becomes a leaf and is
    tested in turn.  The root is never removed.  Interior nodes that keep
    at least one child are not touched here.
    """
    t = assigned.tree
    ids = dict(assigned.model_ids)
    root = t.root
    cache: dict = {}
    certificates: dict[ReportingGroup, GainCertificate] = {}
    removed: set[ReportingGroup] = set()
    remaining_children = {node: len(t.children.get(node, ())) for node in t.nodes()}
    queue = deque(sorted(t.leaves()))
    while queue:
        node = queue.popleft()
        if node == root:
            continue
        parent = t.parents[node]
        cert = test_gain(
            node,
            pool.by_id(ids[node]),
            pool.by_id(ids[parent]),
            prune_data,
            metric,
            alpha,
            config,
            cache,
        )
        certificates[node] = cert
        if cert.decision != "kept":
            removed.add(node)
            remaining_children[parent] -= 1
            if remaining_children[parent] == 0 and parent != root:
                queue.append(parent)
    survivors = frozenset(n for n in t.nodes() if n not in removed)
    return PrunedTree(t, ids, certificates, survivors)


def certify_surviving_edges(
    pruned: PrunedTree,
    pool: ModelPool,
    prune_data: Dataset,
    metric: Metric,
    alpha: float,
    config: TestConfig | None = None,
) -> PrunedTree:
    """Guarantee a kept certificate on every surviving non-root edge.

    Leaf pruning only ever tests leaves, so an interior node that kept a
    child may have no certificate of its own.  Each such edge is tested
    here; a failing interior step cannot solicit its attribute, so its
    entire subtree is dropped.
    """
    t = pruned.tree
    ids = pruned.model_ids
    certificates = dict(pruned.certificates)
    survivors = set(pruned.survivors)
    cache: dict = {}
    changed = True
    while changed:
        changed = False
        for node in t.nodes():
            if node == t.root or node not in survivors:
                continue
            cert = certificates.get(node)
            if cert is None:
                parent = t.parents[node]
                cert = test_gain(
                    node,
                    pool.by_id(ids[node]),
                    pool.by_id(ids[parent]),
                    prune_data,
                    metric,
                    alpha,
                    config,
                    cache,
                )
                certificates[node] = cert
            if cert.decision != "kept":
                stack = [node]
                while stack:
                    cur = stack.pop()
                    if cur in survivors:
                        survivors.discard(cur)
                        stack.extend(t.children.get(cur, ()))
                logger.info(
                    "dropped uncertified interior option %s and its subtree",
                    node.entries,
                )
                changed = True
                break
    return PrunedTree(t, ids, certificates, frozenset(survivors))


# ---------------------------------------------------------------------------
# packaged systems


SYSTEM_KINDS = ("minimal", "flat", "sequential", "greedy")
DISPATCH_POLICIES = ("truthful", "gain_positive")


@dataclass(frozen=True)
class ParticipatorySystem:
    """A reporting tree, its certified options, and the models that serve them.

    The tree is kept whole, pruned options included, so clients can render
    what was withheld and why; only surviving nodes ever serve predictions.
    The model registry carries parameters for surviving nodes only.
    """

    name: str
    kind: str
    metric: Metric
    alpha: float
    tree: ReportingTree
    model_ids: Mapping[ReportingGroup, str]
    certificates: Mapping[ReportingGroup, GainCertificate]
    survivors: frozenset[ReportingGroup]
    models: Mapping[str, TrainedModel]
    node_stats: Mapping[ReportingGroup, Mapping]
    provenance: Mapping
    selected: bool = False

    def __post_init__(self):
        if self.kind not in SYSTEM_KINDS:
            raise ConfigError(f"unknown system kind {self.kind!r}")
        root = self.tree.root
        if root not in self.survivors:
            raise ConfigError("the empty report must always be served")
        root_model = self.models[self.model_ids[root]]
        if root_model.spec.required_attributes:
            raise ConfigError("the root model may not require group attributes")
        for node in self.survivors:
            if node == root:
                continue
            cert = self.certificates.get(node)
            if cert is None or cert.decision != "kept":
                raise ConfigError(
                    f"surviving option {node.entries} lacks a kept certificate"
                )

    # -- structure ---------------------------------------------------------

    @property
    def schema(self) -> GroupSchema:
        return self.tree.schema

    @property
    def root_model(self) -> TrainedModel:
        return self.models[self.model_ids[self.tree.root]]

    def _chain(self, r: ReportingGroup) -> list[ReportingGroup]:
        """Structural root-first chain toward r's place in the tree."""
        if r in self.tree:
            return self.tree.path_to(r)
        node = self.tree.root
        chain = [node]
        while True:
            step = None
            for child in self.tree.children.get(node, ()):
                if r.refines(child):
                    step = child
                    break
            if step is None:
                return chain
            chain.append(step)
            node = step

    def dispatch(self, r: ReportingGroup, policy: str = "truthful") -> ReportingGroup:
        """Deepest surviving ancestor-or-self of r; the empty report maps to
        the root.  Under gain_positive the walk also stops before any step
        whose displayed gain is not positive."""
        if policy not in DISPATCH_POLICIES:
            raise ConfigError(f"unknown dispatch policy {policy!r}")
        node = self.tree.root
        for step in self._chain(r)[1:]:
            if step not in self.survivors:
                break
            if policy == "gain_positive":
                cert = self.certificates.get(step)
                gain = cert.gain if cert is not None and cert.gain is not None else 0.0
                if gain <= 0.0:
                    break
            node = step
        return node

    def serving_model(self, r: ReportingGroup, policy: str = "truthful") -> TrainedModel:
        return self.models[self.model_ids[self.dispatch(r, policy)]]

    def surviving_children(self, node: ReportingGroup) -> list[ReportingGroup]:
        return [c for c in self.tree.children.get(node, ()) if c in self.survivors]

    def predict_report(
        self, features: np.ndarray, r: ReportingGroup, policy: str = "truthful"
    ) -> dict:
        from .models import predict_single

        node = self.dispatch(r, policy)
        model = self.models[self.model_ids[node]]
        score = predict_single(model, self.schema, features, r)
        return {
            "score": score,
            "label": int(score >= 0.5),
            "node": list(node.entries),
            "model_id": model.id,
        }

    def displayed_risk(self, node: ReportingGroup) -> float | None:
        """Root risk minus the advertised gains along the path to node.

        This is exactly the number a client accumulating the displayed
        gain badges would arrive at; it is what utility simulations use.
        """
        base = self.node_stats.get(self.tree.root, {}).get("prune_risk")
        if base is None:
            return None
        total = float(base)
        for step in self.tree.path_to(node)[1:]:
            cert = self.certificates.get(step)
            if cert is not None and cert.gain is not None:
                total -= cert.gain
        return total

    def weighted_risk(
        self, data: Dataset, policy: str = "truthful", metric: Metric | None = None
    ) -> float:
        """Group-size weighted risk under truthful reports on data.

        Groups whose rows cannot score the metric are excluded and the
        weights renormalized (logged).
        """
        metric = metric or self.metric
        cache: dict = {}
        mass = 0.0
        total = 0.0
        excluded = 0
        for g in self.schema.full_groups():
            mask = data.consistency_mask(g)
            n_g = int(mask.sum())
            if n_g == 0:
                continue
            labels = data.labels[mask]
            if not metric.defined_on(labels):
                excluded += 1
                continue
            model = self.serving_model(g, policy)
            scores = cache.get(model.id)
            if scores is None:
                scores = predict_scores(model, data)
                cache[model.id] = scores
            total += n_g * metric.risk(scores[mask], labels)
            mass += n_g
        if mass == 0.0:
            raise UndefinedMetric("no group can score the metric on this data")
        if excluded:
            logger.warning("excluded %d group(s) the metric cannot score", excluded)
        return total / mass

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        nodes = []
        order = self.tree.nodes()
        for node in order:
            parent = self.tree.parents[node]
            stats = self.node_stats.get(node, {})
            cert = self.certificates.get(node)
            nodes.append(
                {
                    "entries": list(node.entries),
                    "parent": None if parent is None else list(parent.entries),
                    "model_id": self.model_ids[node],
                    "surviving": node in self.survivors,
                    "certificate": None if cert is None else cert.to_dict(),
                    "n_assign": stats.get("n_assign"),
                    "assign_risk": stats.get("assign_risk"),
                    "n_prune": stats.get("n_prune"),
                    "prune_risk": stats.get("prune_risk"),
                }
            )
        return {
            "format_version": ARTIFACT_FORMAT_VERSION,
            "artifact": "participatory_system",
            "name": self.name,
            "kind": self.kind,
            "metric": self.metric.name,
            "alpha": self.alpha,
            "selected": self.selected,
            "schema": self.schema.to_dict(),
            "feature_names": list(self.provenance.get("feature_names", ())),
            "tree": {"kind": self.tree.kind, "nodes": nodes},
            "models": [self.models[mid].to_dict() for mid in sorted(self.models)],
            "provenance": {
                k: v for k, v in self.provenance.items() if k != "feature_names"
            },
        }

    def public_view(self) -> dict:
        """The tree and its evidence, without any model parameters."""
        doc = self.to_dict()
        for node in doc["tree"]["nodes"]:
            cert = node.get("certificate")
            if cert is not None:
                node["certificate"] = {
                    "metric": cert["metric"],
                    "gain": cert["gain"],
                    "p_value": cert["p_value"],
                    "n_validation": cert["n_validation"],
                }
        doc["models"] = [
            {
                "id": m["spec"]["id"],
                "kind": m["spec"]["kind"],
                "model_class": m["spec"]["model_class"],
                "required_attributes": m["spec"]["required_attributes"],
            }
            for m in doc["models"]
        ]
        return doc

    def to_bytes(self) -> bytes:
        return (json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n").encode()

    def save(self, path) -> None:
        Path(path).write_bytes(self.to_bytes())

    @classmethod
    def from_dict(cls, payload: Mapping) -> "ParticipatorySystem":
        if payload.get("artifact") != "participatory_system":
            raise ArtifactError("not a participatory system document")
        if payload.get("format_version") != ARTIFACT_FORMAT_VERSION:
            raise ArtifactError(
                f"unsupported format_version {payload.get('format_version')!r}"
            )
        try:
            schema = GroupSchema.from_dict(payload["schema"])
            tree_doc = payload["tree"]
            edges = []
            model_ids = {}
            certificates = {}
            survivors = []
            node_stats = {}
            for entry in tree_doc["nodes"]:
                node = ReportingGroup(
                    tuple(None if e is None else int(e) for e in entry["entries"])
                )
                if entry["parent"] is not None:
                    parent = ReportingGroup(
                        tuple(None if e is None else int(e) for e in entry["parent"])
                    )
                    edges.append((parent, node))
                model_ids[node] = str(entry["model_id"])
                if entry.get("certificate") is not None:
                    certificates[node] = GainCertificate.from_dict(entry["certificate"])
                if entry.get("surviving"):
                    survivors.append(node)
                node_stats[node] = {
                    "n_assign": entry.get("n_assign"),
                    "assign_risk": entry.get("assign_risk"),
                    "n_prune": entry.get("n_prune"),
                    "prune_risk": entry.get("prune_risk"),
                }
            tree = _tree_from_edges(str(tree_doc["kind"]), schema, edges)
            models = {}
            for doc in payload["models"]:
                model = TrainedModel.from_dict(doc)
                models[model.id] = model
            provenance = dict(payload.get("provenance", {}))
            provenance["feature_names"] = tuple(payload.get("feature_names", ()))
            return cls(
                name=str(payload["name"]),
                kind=str(payload["kind"]),
                metric=Metric(str(payload["metric"])),
                alpha=float(payload["alpha"]),
                tree=tree,
                model_ids=model_ids,
                certificates=certificates,
                survivors=frozenset(survivors),
                models=models,
                node_stats=node_stats,
                provenance=provenance,
                selected=bool(payload.get("selected", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ArtifactError):
                raise
            raise ArtifactError(f"malformed system document: {exc}") from exc

    @classmethod
    def load(cls, path) -> "ParticipatorySystem":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ArtifactError(f"not valid JSON: {exc}") from exc
        return cls.from_dict(payload)


def save_system(system: ParticipatorySystem, path) -> None:
    system.save(path)


def load_system(path) -> ParticipatorySystem:
    return ParticipatorySystem.load(path)


# ---------------------------------------------------------------------------
# the learning pipeline


def _package(
    name: str,
    kind: str,
    tree: ReportingTree,
    bundle: SplitBundle,
    pool: ModelPool,
    metric: Metric,
    alpha: float,
    config: TestConfig | None,
    seed: int,
) -> ParticipatorySystem:
    assigned = assign_models(tree, pool, bundle.assign, metric)
    pruned = prune_leaves(assigned, pool, bundle.prune, metric, alpha, config)
    certified = certify_surviving_edges(pruned, pool, bundle.prune, metric, alpha, config)

    stats: dict = {}
    assign_cache: dict = {}
    prune_cache: dict = {}
    for node in tree.nodes():
        model = pool.by_id(certified.model_ids[node])
        entry: dict = {}
        for label_, data, cache in (
            ("assign", bundle.assign, assign_cache),
            ("prune", bundle.prune, prune_cache),
        ):
            mask = data.consistency_mask(node)
            labels = data.labels[mask]
            entry[f"n_{label_}"] = int(mask.sum())
            if labels.size and metric.defined_on(labels):
                scores = cache.get(model.id)
                if scores is None:
                    scores = predict_scores(model, data)
                    cache[model.id] = scores
                entry[f"{label_}_risk"] = metric.risk(scores[mask], labels)
            else:
                entry[f"{label_}_risk"] = None
        stats[node] = entry

    used_ids = sorted({certified.model_ids[node] for node in certified.survivors})
    models = {mid: pool.by_id(mid) for mid in used_ids}
    provenance = {
        "dataset_hash": {
            "assign": bundle.assign.content_hash(),
            "prune": bundle.prune.content_hash(),
            "test": bundle.test.content_hash(),
        },
        "seed": int(seed),
        "toolkit_version": TOOLKIT_VERSION,
        "shared_assign_prune": bool(bundle.shared_assign_prune),
        "feature_names": tuple(bundle.assign.feature_names),
    }
    return ParticipatorySystem(
        name=name,
        kind=kind,
        metric=metric,
        alpha=alpha,
        tree=tree,
        model_ids=dict(certified.model_ids),
        certificates=dict(certified.certificates),
        survivors=certified.survivors,
        models=models,
        node_stats=stats,
        provenance=provenance,
    )


def learn_systems(
    bundle: SplitBundle,
    pool: ModelPool,
    kinds: Iterable[str] = ("minimal",),
    metric: Metric | None = None,
    alpha: float = 0.10,
    constraints: TreeConstraints | None = None,
    seed: int = 0,
    test_config: TestConfig | None = None,
) -> list[ParticipatorySystem]:
    """Learn one or more certified systems over the requested tree kinds.

    minimal and flat each yield a single system; greedy grows its tree
    against the pool; sequential yields one system per enumerated tree,
    the lowest weighted prune-split risk marked as selected.  An empty
    sequential enumeration falls back to a flat interface (logged).
    """
    from .models import ERROR

    metric = metric or ERROR
    if not 0.0 < alpha < 1.0:
        raise ConfigError("alpha must lie in (0, 1)")
    if pool.schema != bundle.assign.schema:
        raise ConfigError("pool and bundle disagree on the group schema")
    schema = bundle.assign.schema
    out: list[ParticipatorySystem] = []
    for kind in kinds:
        if kind not in SYSTEM_KINDS:
            raise ConfigError(f"unknown system kind {kind!r}")
        if kind == "minimal":
            out.append(
                _package("minimal", kind, build_minimal(schema), bundle, pool, metric, alpha, test_config, seed)
            )
        elif kind == "flat":
            out.append(
                _package("flat", kind, build_flat(schema), bundle, pool, metric, alpha, test_config, seed)
            )
        elif kind == "greedy":
            tree = greedy_tree(schema, bundle.assign, pool, metric)
            out.append(_package("greedy", kind, tree, bundle, pool, metric, alpha, test_config, seed))
        else:
            trees = enumerate_sequential(schema, bundle.assign, constraints)
            if not trees:
                logger.warning(
                    "no admissible sequential tree; falling back to a flat interface"
                )
                out.append(
                    _package(
                        "sequential_flat_fallback",
                        kind,
                        build_flat(schema),
                        bundle,
                        pool,
                        metric,
                        alpha,
                        test_config,
                        seed,
                    )
                )
                continue
            systems = [
                _package(f"sequential_{i:03d}", kind, tree, bundle, pool, metric, alpha, test_config, seed)
                for i, tree in enumerate(trees)
            ]
            risks = [s.weighted_risk(bundle.prune) for s in systems]
            best = int(np.argmin(np.asarray(risks)))
            systems[best] = replace(systems[best], selected=True)
            out.extend(systems)
    return out
