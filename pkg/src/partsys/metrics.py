"""Evaluation of systems and static models: performance, gains, adoption, harms.

Every operation here accepts either a learned participatory system or a
plain trained model.  Systems serve each group through their dispatch
(truthful full reports by default; evaluation reports use the
gain-positive disclosure policy); a static model serves every group
itself.  Group-level aggregates weight by group share and renormalize
over the groups where the metric is defined — the excluded mass is
logged, never silently dropped.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .assembly import ParticipatorySystem, bootstrap_test
from .dataset import Dataset, ReportingGroup, restrict_to
from .errors import ConfigError, UndefinedMetric
from .models import ERROR, Metric, TrainedModel, predict_scores

logger = logging.getLogger(__name__)

__all__ = [
    "GroupOutcome",
    "EvaluationReport",
    "overall_performance",
    "overall_gain",
    "group_gain_range",
    "rationality_violations",
    "imputation_risk",
    "options_pruned",
    "data_use",
    "impute_groups",
    "evaluate_system",
]


def _resolve(target, metric: Metric | None, generic: TrainedModel | None):
    """Common target handling: (is_system, metric, generic-or-None)."""
    if isinstance(target, ParticipatorySystem):
        return True, metric or target.metric, generic or target.root_model
    if isinstance(target, TrainedModel):
        return False, metric or ERROR, generic
    raise ConfigError("expected a ParticipatorySystem or a TrainedModel")


def _served_model(target, g: ReportingGroup, policy: str) -> TrainedModel:
    if isinstance(target, ParticipatorySystem):
        return target.serving_model(g, policy)
    return target


def _served_node(target, g: ReportingGroup, policy: str) -> ReportingGroup | None:
    if isinstance(target, ParticipatorySystem):
        return target.dispatch(g, policy)
    return None


def _group_risks(
    target,
    data: Dataset,
    metric: Metric,
    policy: str,
    generic: TrainedModel | None,
) -> list[dict]:
    """Per full group: size, served node/model, and risks (None if undefined)."""
    cache: dict[str, np.ndarray] = {}

    def scores_for(model: TrainedModel) -> np.ndarray:
        out = cache.get(model.id)
        if out is None:
            out = predict_scores(model, data)
            cache[model.id] = out
        return out

    rows = []
    excluded = 0
    for g in data.schema.full_groups():
        mask = data.consistency_mask(g)
        n_g = int(mask.sum())
        entry: dict = {"group": g, "n": n_g}
        if n_g == 0:
            entry.update(node=None, risk_system=None, risk_generic=None)
            rows.append(entry)
            continue
        entry["node"] = _served_node(target, g, policy)
        labels = data.labels[mask]
        if metric.defined_on(labels):
            served = _served_model(target, g, policy)
            entry["risk_system"] = metric.risk(scores_for(served)[mask], labels)
            entry["risk_generic"] = (
                None
                if generic is None
                else metric.risk(scores_for(generic)[mask], labels)
            )
        else:
            excluded += 1
            entry["risk_system"] = None
            entry["risk_generic"] = None
        rows.append(entry)
    if excluded:
        logger.warning(
            "metric undefined on %d group(s); excluded and weights renormalized",
            excluded,
        )
    return rows


def _weighted(rows: Sequence[Mapping], key: str) -> float:
    mass = sum(r["n"] for r in rows if r.get(key) is not None)
    if mass == 0:
        raise UndefinedMetric("metric undefined on every group")
    return sum(r["n"] * r[key] for r in rows if r.get(key) is not None) / mass


def overall_performance(
    target, data: Dataset, metric: Metric | None = None, policy: str = "truthful"
) -> float:
    """Group-share weighted risk; systems dispatch, models serve directly."""
    _, metric, _ = _resolve(target, metric, None)
    rows = _group_risks(target, data, metric, policy, None)
    return _weighted(rows, "risk_system")


def overall_gain(
    target,
    data: Dataset,
    metric: Metric | None = None,
    generic: TrainedModel | None = None,
    policy: str = "truthful",
) -> float:
    """Weighted risk drop over the generic reference.

    Systems default to their own root model, so the gain is exactly what
    opting in buys over universal opting out; static models must be given
    their generic counterpart explicitly.
    """
    is_system, metric, generic = _resolve(target, metric, generic)
    if generic is None:
        raise ConfigError("a static model needs an explicit generic reference")
    rows = _group_risks(target, data, metric, policy, generic)
    return _weighted(rows, "risk_generic") - _weighted(rows, "risk_system")


def group_gain_range(
    target,
    data: Dataset,
    metric: Metric | None = None,
    generic: TrainedModel | None = None,
    policy: str = "truthful",
) -> tuple[float, float]:
    """(worst, best) per-group gain over the generic reference."""
    is_system, metric, generic = _resolve(target, metric, generic)
    if generic is None:
        raise ConfigError("a static model needs an explicit generic reference")
    rows = _group_risks(target, data, metric, policy, generic)
    gains = [
        r["risk_generic"] - r["risk_system"]
        for r in rows
        if r["risk_system"] is not None
    ]
    if not gains:
        raise UndefinedMetric("metric undefined on every group")
    return (min(gains), max(gains))


def rationality_violations(
    target,
    data: Dataset,
    metric: Metric | None = None,
    generic: TrainedModel | None = None,
    resamples: int = 100,
    alpha: float | None = None,
    seed: int = 0,
    policy: str = "truthful",
) -> tuple[int, list[dict]]:
    """Count groups served significantly worse than the generic model.

    Per group, a bootstrap over its test rows asks how often the generic
    model's risk is at least the served model's; a fraction below alpha
    means the personalization demonstrably hurt that group.  Returns the
    count and one flag row per group (skipped groups flagged, not
    counted).  Deterministic given the seed.
    """
    is_system, metric, generic = _resolve(target, metric, generic)
    if generic is None:
        raise ConfigError("a static model needs an explicit generic reference")
    if alpha is None:
        alpha = target.alpha if is_system else 0.10
    flags = []
    count = 0
    for g in data.schema.full_groups():
        rows = restrict_to(data, g)
        if rows.n == 0:
            flags.append({"group": g, "n": 0, "skipped": True})
            continue
        served = _served_model(target, g, policy)
        try:
            regret, p = bootstrap_test(
                metric, generic, served, rows, resamples=resamples, seed=seed
            )
        except UndefinedMetric:
            flags.append({"group": g, "n": rows.n, "skipped": True})
            continue
        violation = p < alpha
        count += violation
        flags.append(
            {
                "group": g,
                "n": rows.n,
                "regret": -regret,
                "p_value": p,
                "violation": violation,
                "skipped": False,
            }
        )
    return count, flags


def imputation_risk(
    model: TrainedModel, data: Dataset, metric: Metric | None = None
) -> float:
    """Worst-case cost of feeding a static model an imputed membership.

    For each pair of distinct full groups (g, g'), compare the risk g's
    rows incur under their true membership against the risk when the
    model is told they belong to g'.  The minimum difference is the most
    negative consequence wrong imputation can have; models that ignore
    group attributes score exactly 0, as does a schema with one group.
    """
    if not isinstance(model, TrainedModel):
        raise ConfigError("imputation risk is defined for static models")
    metric = metric or ERROR
    groups = []
    for g in data.schema.full_groups():
        rows = restrict_to(data, g)
        if rows.n == 0 or not metric.defined_on(rows.labels):
            continue
        groups.append((g, rows))
    worst = 0.0
    for g, rows in groups:
        own = metric.risk(predict_scores(model, rows), rows.labels)
        for g2, _ in groups:
            if g2 == g:
                continue
            swapped = metric.risk(
                predict_scores(model, rows.with_groups(g2)), rows.labels
            )
            worst = min(worst, own - swapped)
    return worst


def options_pruned(system: ParticipatorySystem) -> float:
    """Fraction of the interface's non-root options the pruning removed."""
    non_root = system.tree.n_nodes() - 1
    if non_root == 0:
        return 0.0
    removed = non_root - (len(system.survivors) - 1)
    return removed / non_root


def data_use(target, data: Dataset, policy: str = "truthful") -> float:
    """Average fraction of group attributes actually solicited.

    Systems ask only for what the surviving dispatch path consumes, so
    pruning directly reduces this number; a static model's appetite is
    its required attributes, regardless of the data.
    """
    if isinstance(target, TrainedModel):
        return len(target.spec.required_attributes) / data.schema.k
    k = target.schema.k
    total = 0.0
    n = 0
    for g in target.schema.full_groups():
        n_g = int(data.consistency_mask(g).sum())
        if n_g == 0:
            continue
        node = target.dispatch(g, policy)
        total += n_g * (node.n_reported / k)
        n += n_g
    if n == 0:
        raise ConfigError("no rows to measure data use on")
    return total / n


def impute_groups(
    query,
    reference: Dataset,
    method: str = "mode",
    k_neighbors: int = 5,
    seed: int = 0,
) -> np.ndarray:
    """Fill full memberships for rows that reported nothing.

    mode assigns the most common full group in the reference (ties broken
    lexicographically); knn votes among the k nearest reference rows
    under normalized Euclidean feature distance, breaking vote ties
    toward the closest neighbor's group.  Deterministic given the seed
    (the current methods need no randomness; the seed is part of the
    interface so stochastic methods can be added without breaking calls).
    This exists so the cost of imputing can be measured — it is not a
    recommended way to run a system.
    """
    del seed  # deterministic methods; parameter kept for interface stability
    features = query.features if isinstance(query, Dataset) else np.asarray(
        query, dtype=np.float64
    )
    if features.ndim == 1:
        features = features[None, :]
    if features.shape[1] != reference.features.shape[1]:
        raise ConfigError("query features do not match the reference width")
    if reference.n == 0:
        raise ConfigError("imputation needs reference rows")
    if method == "mode":
        cells, counts = np.unique(reference.groups, axis=0, return_counts=True)
        order = np.lexsort(tuple(cells[:, j] for j in range(cells.shape[1] - 1, -1, -1)))
        cells, counts = cells[order], counts[order]
        winner = cells[int(np.argmax(counts))]
        return np.tile(winner, (features.shape[0], 1))
    if method != "knn":
        raise ConfigError(f"unknown imputation method {method!r}")
    k_neighbors = min(k_neighbors, reference.n)
    mu = reference.features.mean(axis=0)
    sd = reference.features.std(axis=0)
    sd = np.where(sd > 0, sd, 1.0)
    ref = (reference.features - mu) / sd
    out = np.empty((features.shape[0], reference.groups.shape[1]), dtype=np.int64)
    for i, row in enumerate((features - mu) / sd):
        dist = np.sqrt(((ref - row) ** 2).sum(axis=1))
        order = np.argsort(dist, kind="stable")[:k_neighbors]
        votes: dict[tuple, int] = {}
        for j in order:
            key = tuple(int(v) for v in reference.groups[j])
            votes[key] = votes.get(key, 0) + 1
        best = max(votes.values())
        tied = {key for key, v in votes.items() if v == best}
        for j in order:
            key = tuple(int(v) for v in reference.groups[j])
            if key in tied:
                out[i] = key
                break
    return out


# ---------------------------------------------------------------------------
# the one-call report


@dataclass(frozen=True)
class GroupOutcome:
    group: ReportingGroup
    label: str
    n: int
    node_entries: tuple | None
    n_reported: int
    risk_system: float | None
    risk_generic: float | None
    gain: float | None
    violation: bool = False


@dataclass(frozen=True)
class EvaluationReport:
    """Everything the toolkit can say about one target on held-out data."""

    target_name: str
    target_type: str  # "system" | "model"
    kind: str
    metric: str
    alpha: float
    policy: str
    n_test: int
    overall_risk: float
    generic_risk: float
    overall_gain: float
    group_gain_min: float
    group_gain_max: float
    n_violations: int
    options_pruned: float | None
    data_use: float
    imputation_risk: float | None
    groups: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "target_name": self.target_name,
            "target_type": self.target_type,
            "kind": self.kind,
            "metric": self.metric,
            "alpha": self.alpha,
            "policy": self.policy,
            "n_test": self.n_test,
            "overall_risk": self.overall_risk,
            "generic_risk": self.generic_risk,
            "overall_gain": self.overall_gain,
            "group_gain_min": self.group_gain_min,
            "group_gain_max": self.group_gain_max,
            "n_rationality_violations": self.n_violations,
            "options_pruned": self.options_pruned,
            "data_use": self.data_use,
            "imputation_risk": self.imputation_risk,
            "groups": [
                {
                    "group": list(g.group.entries),
                    "label": g.label,
                    "n": g.n,
                    "served_node": None if g.node_entries is None else list(g.node_entries),
                    "n_reported": g.n_reported,
                    "risk_system": g.risk_system,
                    "risk_generic": g.risk_generic,
                    "gain": g.gain,
                    "violation": g.violation,
                }
                for g in self.groups
            ],
        }

    def save_json(self, path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n",
            encoding="utf-8",
        )

    def save_group_csv(self, path) -> None:
        with Path(path).open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                [
                    "group",
                    "n",
                    "served_node",
                    "n_reported",
                    "risk_system",
                    "risk_generic",
                    "gain",
                    "violation",
                ]
            )
            for g in self.groups:
                writer.writerow(
                    [
                        g.label,
                        g.n,
                        "" if g.node_entries is None else "/".join(map(str, g.node_entries)),
                        g.n_reported,
                        "" if g.risk_system is None else repr(g.risk_system),
                        "" if g.risk_generic is None else repr(g.risk_generic),
                        "" if g.gain is None else repr(g.gain),
                        int(g.violation),
                    ]
                )


def evaluate_system(
    target,
    data: Dataset,
    metric: Metric | None = None,
    generic: TrainedModel | None = None,
    policy: str | None = None,
    resamples: int = 100,
    seed: int = 0,
    alpha: float | None = None,
) -> EvaluationReport:
    """Assemble the full metric suite on held-out data.

    Systems are evaluated under the disclosure policy "report only when
    the displayed gain is positive" unless another policy is supplied;
    static models are served directly and additionally get their
    worst-case imputation risk.
    """
    is_system, metric, generic = _resolve(target, metric, generic)
    if generic is None:
        raise ConfigError("a static model needs an explicit generic reference")
    if policy is None:
        policy = "gain_positive" if is_system else "truthful"
    rows = _group_risks(target, data, metric, policy, generic)
    n_violations, flags = rationality_violations(
        target,
        data,
        metric=metric,
        generic=generic,
        resamples=resamples,
        alpha=alpha,
        seed=seed,
        policy=policy,
    )
    flagged = {
        f["group"]: f.get("violation", False) for f in flags if not f.get("skipped")
    }
    outcomes = []
    for r in rows:
        node = r["node"]
        gain = (
            None if r["risk_system"] is None else r["risk_generic"] - r["risk_system"]
        )
        outcomes.append(
            GroupOutcome(
                group=r["group"],
                label=r["group"].label(data.schema),
                n=r["n"],
                node_entries=None if node is None else node.entries,
                n_reported=(
                    (0 if node is None else node.n_reported)
                    if is_system
                    else len(target.spec.required_attributes)
                ),
                risk_system=r["risk_system"],
                risk_generic=r["risk_generic"],
                gain=gain,
                violation=flagged.get(r["group"], False),
            )
        )
    overall_risk = _weighted(rows, "risk_system")
    generic_risk = _weighted(rows, "risk_generic")
    gains = [o.gain for o in outcomes if o.gain is not None]
    if is_system:
        resolved_alpha = target.alpha if alpha is None else alpha
    else:
        resolved_alpha = 0.10 if alpha is None else alpha
    return EvaluationReport(
        target_name=target.name if is_system else target.id,
        target_type="system" if is_system else "model",
        kind=target.kind if is_system else target.spec.kind,
        metric=metric.name,
        alpha=resolved_alpha,
        policy=policy,
        n_test=data.n,
        overall_risk=overall_risk,
        generic_risk=generic_risk,
        overall_gain=generic_risk - overall_risk,
        group_gain_min=min(gains),
        group_gain_max=max(gains),
        n_violations=n_violations,
        options_pruned=options_pruned(target) if is_system else None,
        data_use=data_use(target, data, policy),
        imputation_risk=None if is_system else imputation_risk(target, data, metric),
        groups=tuple(outcomes),
    )
