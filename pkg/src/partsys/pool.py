"""Candidate model pools and report-viability filtering.

A pool holds every trained candidate a system may route predictions to.
Viability at a report r means the model's required attributes are all
reported in r and its training scope does not conflict with r, so a
model trained on one subpopulation never serves a different one.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset, GroupSchema, ReportingGroup
from .errors import ConfigError, InsufficientData
from .models import Metric, ModelSpec, TrainedModel, predict_scores, train_model

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelPool:
    schema: GroupSchema
    models: tuple[TrainedModel, ...]

    def __post_init__(self):
        ids = [m.id for m in self.models]
        if len(ids) != len(set(ids)):
            raise ConfigError("model ids within a pool must be unique")
        root = ReportingGroup.root(self.schema.k)
        if not any(_viable(m, root) for m in self.models):
            raise ConfigError("pool needs at least one model viable at the empty report")

    def __len__(self) -> int:
        return len(self.models)

    def __iter__(self):
        return iter(self.models)

    def by_id(self, model_id: str) -> TrainedModel:
        for m in self.models:
            if m.id == model_id:
                return m
        raise KeyError(model_id)


def _viable(m: TrainedModel, r: ReportingGroup) -> bool:
    reported = set(r.reported_indices())
    if not set(m.spec.required_attributes) <= reported:
        return False
    scope = m.spec.training_scope
    return all(s is None or s == e for s, e in zip(scope.entries, r.entries))


def viable_models(pool: ModelPool, r: ReportingGroup) -> list[TrainedModel]:
    """Pool entries allowed to serve report r, in pool order (never empty)."""
    out = [m for m in pool.models if _viable(m, r)]
    if not out:
        raise ConfigError("pool lost its generic fallback; no model is viable")
    return out


def select_model(
    pool: ModelPool,
    r: ReportingGroup,
    assign_data: Dataset,
    metric: Metric,
    score_cache: dict | None = None,
) -> tuple[TrainedModel | None, float | None]:
    """Viable model with the lowest empirical risk on the rows matching r.

    Ties break toward fewer required attributes, then the generic kind,
    then lexicographic id.  Returns (None, None) when no viable model has
    a defined risk there (no rows, or a single-class sample under auc).
    The cache maps model id -> scores on the full assign split.
    """
    mask = assign_data.consistency_mask(r)
    labels = assign_data.labels[mask]
    if labels.size == 0 or not metric.defined_on(labels):
        return None, None
    best: tuple | None = None
    for m in viable_models(pool, r):
        if score_cache is not None:
            scores = score_cache.get(m.id)
            if scores is None:
                scores = predict_scores(m, assign_data)
                score_cache[m.id] = scores
            scores = scores[mask]
        else:
            scores = predict_scores(m, assign_data.select(np.flatnonzero(mask)))
        risk = metric.risk(scores, labels)
        key = (risk, len(m.spec.required_attributes), m.spec.kind != "generic", m.id)
        if best is None or key < best[0]:
            best = (key, m, risk)
    assert best is not None
    return best[1], best[2]


def _partial_scopes(schema: GroupSchema, include_partial: bool):
    """Reporting groups with at least one reported attribute, sorted."""
    combos = itertools.product(*([None] + list(range(len(lv))) for lv in schema.levels))
    for entries in combos:
        r = ReportingGroup(entries)
        if r.n_reported == 0:
            continue
        if not include_partial and not r.is_full:
            continue
        yield r


def build_pool(
    assign_data: Dataset,
    classes: tuple[str, ...] = ("logistic",),
    seed: int = 0,
    include_partial_scopes: bool = True,
    extra_models: tuple[TrainedModel, ...] = (),
) -> ModelPool:
    """Train the standard candidate set on the assign split.

    Per trainable class: one generic model (features only), one with
    additive group indicators, one with intersectional indicators, and
    one scoped model per reporting group whose rows can support training.
    Scoped candidates that fail their data preconditions are skipped with
    a log line.  extra_models (fixed rules, usually) are appended as-is.
    """
    schema = assign_data.schema
    k = schema.k
    root = ReportingGroup.root(k)
    models: list[TrainedModel] = []
    for cls in classes:
        if cls == "fixed_rule":
            if not extra_models:
                raise ConfigError("fixed_rule pools need explicit extra_models")
            continue
        if cls not in ("logistic", "forest"):
            raise ConfigError(f"unknown model class {cls!r}")
        base = [
            ModelSpec(f"{cls}_generic", "generic", cls, "none", frozenset(), root),
            ModelSpec(
                f"{cls}_onehot", "onehot", cls, "onehot", frozenset(range(k)), root
            ),
            ModelSpec(
                f"{cls}_intersectional",
                "intersectional",
                cls,
                "intersectional",
                frozenset(range(k)),
                root,
            ),
        ]
        for spec in base:
            models.append(train_model(spec, assign_data, seed))
        for scope in _partial_scopes(schema, include_partial_scopes):
            spec = ModelSpec(
                f"{cls}_scoped_{scope.slug(schema)}",
                "subgroup",
                cls,
                "none",
                frozenset(scope.reported_indices()),
                scope,
            )
            try:
                models.append(train_model(spec, assign_data, seed))
            except InsufficientData as exc:
                logger.info("skipping %s: %s", spec.id, exc)
    models.extend(extra_models)
    return ModelPool(schema, tuple(models))
