"""Base classifiers that populate the model pool.

Everything here is self-contained numpy: an L2-regularized logistic
regression fit by Newton's method, a bagged decision forest, and fixed
lookup rules for hand-specified baselines.  Scores live in [0, 1] and
labels are thresholded at 0.5 (score >= 0.5 predicts 1).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .dataset import Dataset, GroupSchema, ReportingGroup, encode_features, encoded_width, restrict_to
from .errors import ConfigError, InsufficientData, ShapeMismatch, UndefinedMetric

LOGISTIC_L2 = 1e-4
LOGISTIC_TOL = 1e-8
LOGISTIC_MAX_ITER = 500

FOREST_TREES = 100
FOREST_MAX_DEPTH = 8

MODEL_KINDS = ("generic", "onehot", "intersectional", "subgroup", "fixed")
MODEL_CLASSES = ("logistic", "forest", "fixed_rule")
ENCODINGS = ("none", "onehot", "intersectional")


@dataclass(frozen=True)
class Metric:
    """A lower-is-better risk functional on scored predictions."""

    name: str

    def __post_init__(self):
        if self.name not in ("error", "auc"):
            raise ConfigError(f"unknown metric {self.name!r}")

    def defined_on(self, labels: np.ndarray) -> bool:
        if self.name == "error":
            return labels.size > 0
        return labels.size > 0 and 0 < labels.sum() < labels.size

    def risk(self, scores: np.ndarray, labels: np.ndarray) -> float:
        """error: misclassification rate at 0.5; auc: 1 - AUC."""
        if labels.size == 0:
            raise UndefinedMetric(f"{self.name} is undefined on an empty sample")
        if self.name == "error":
            return float(np.mean((scores >= 0.5).astype(np.int64) != labels))
        return 1.0 - auc(scores, labels)


ERROR = Metric("error")
AUC_RISK = Metric("auc")


def _midranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    n = len(values)
    ranks = np.empty(n, dtype=np.float64)
    i = 0
    while i < n:
        j = i
        while j < n and sorted_vals[j] == sorted_vals[i]:
            j += 1
        ranks[i:j] = 0.5 * (i + j - 1) + 1.0
        i = j
    out = np.empty(n, dtype=np.float64)
    out[order] = ranks
    return out


def auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """Probability a random positive outscores a random negative, ties 0.5."""
    labels = np.asarray(labels)
    scores = np.asarray(scores, dtype=np.float64)
    n_pos = int(labels.sum())
    n_neg = int(labels.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetric("auc needs at least one positive and one negative")
    ranks = _midranks(scores)
    rank_sum = float(ranks[labels == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


# ---------------------------------------------------------------------------
# model specs


@dataclass(frozen=True)
class ModelSpec:
    """What a pool entry is allowed to see and how it is trained.

    required_attributes are the group attributes that must be reported
    before this model may serve a prediction.  training_scope restricts
    the training rows to a reporting group (the empty report keeps all).
    """

    id: str
    kind: str
    model_class: str
    encoding: str
    required_attributes: frozenset[int]
    training_scope: ReportingGroup
    hyperparameters: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model kind {self.kind!r}")
        if self.model_class not in MODEL_CLASSES:
            raise ConfigError(f"unknown model class {self.model_class!r}")
        if self.encoding not in ENCODINGS:
            raise ConfigError(f"unknown encoding {self.encoding!r}")
        if self.kind == "generic" and (self.required_attributes or self.encoding != "none"):
            raise ConfigError("generic models take no group input")
        if self.kind == "subgroup" and self.training_scope.n_reported == 0:
            raise ConfigError("subgroup models need a non-empty training scope")
        scope_reported = set(self.training_scope.reported_indices())
        if not scope_reported <= set(self.required_attributes) and self.kind == "subgroup":
            raise ConfigError("subgroup scope must be covered by required attributes")

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "model_class": self.model_class,
            "encoding": self.encoding,
            "required_attributes": sorted(self.required_attributes),
            "training_scope": list(self.training_scope.entries),
            "hyperparameters": dict(self.hyperparameters),
        }

    @classmethod
    def from_dict(cls, payload: Mapping) -> "ModelSpec":
        return cls(
            id=str(payload["id"]),
            kind=str(payload["kind"]),
            model_class=str(payload["model_class"]),
            encoding=str(payload["encoding"]),
            required_attributes=frozenset(int(a) for a in payload["required_attributes"]),
            training_scope=ReportingGroup(
                tuple(None if e is None else int(e) for e in payload["training_scope"])
            ),
            hyperparameters=dict(payload.get("hyperparameters", {})),
        )


@dataclass(frozen=True)
class TrainedModel:
    spec: ModelSpec
    parameters: Mapping
    fingerprint: Mapping
    converged: bool = True

    @property
    def id(self) -> str:
        return self.spec.id

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "parameters": self.parameters,
            "fingerprint": dict(self.fingerprint),
            "converged": self.converged,
        }

    @classmethod
    def from_dict(cls, payload: Mapping) -> "TrainedModel":
        return cls(
            spec=ModelSpec.from_dict(payload["spec"]),
            parameters=payload["parameters"],
            fingerprint=dict(payload.get("fingerprint", {})),
            converged=bool(payload.get("converged", True)),
        )


def fixed_rule_model(
    spec_id: str,
    schema: GroupSchema,
    table: Mapping[tuple, float],
    default: float | None = None,
    required_attributes: frozenset[int] | None = None,
) -> TrainedModel:
    """A hand-specified lookup from full group to score.

    Rules with no required attributes must carry a default score so they
    can answer before anything is reported.
    """
    required = (
        frozenset(range(schema.k)) if required_attributes is None else required_attributes
    )
    if not required and default is None:
        raise ConfigError("a fixed rule with no required attributes needs a default score")
    entries = []
    for key, score in table.items():
        if len(key) != schema.k:
            raise ConfigError("fixed rule keys must be full groups")
        if not 0.0 <= float(score) <= 1.0:
            raise ConfigError("fixed rule scores must lie in [0, 1]")
        entries.append({"group": [int(v) for v in key], "score": float(score)})
    entries.sort(key=lambda e: e["group"])
    spec = ModelSpec(
        id=spec_id,
        kind="fixed",
        model_class="fixed_rule",
        encoding="none",
        required_attributes=required,
        training_scope=ReportingGroup.root(schema.k),
        hyperparameters={},
    )
    params = {"table": entries, "default": None if default is None else float(default)}
    return TrainedModel(spec=spec, parameters=params, fingerprint={"source": "fixed"})


# ---------------------------------------------------------------------------
# logistic regression


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def logistic_objective(weights: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    """Mean negative log-likelihood plus L2 penalty on the non-intercept part.

    weights[0] is the intercept; X must not include a constant column.
    """
    z = weights[0] + X @ weights[1:]
    # log(1 + exp(-m)) computed stably for either sign of the margin
    margins = np.where(y == 1, z, -z)
    nll = float(np.mean(np.logaddexp(0.0, -margins)))
    return nll + 0.5 * LOGISTIC_L2 * float(weights[1:] @ weights[1:])


def _fit_logistic(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, bool]:
    n, d = X.shape
    w = np.zeros(d + 1, dtype=np.float64)
    Xb = np.hstack([np.ones((n, 1)), X])
    reg = np.full(d + 1, LOGISTIC_L2)
    reg[0] = 0.0
    converged = False
    for _ in range(LOGISTIC_MAX_ITER):
        p = _sigmoid(Xb @ w)
        grad = Xb.T @ (p - y) / n + reg * w
        s = np.maximum(p * (1.0 - p), 1e-12)
        hess = (Xb * s[:, None]).T @ Xb / n + np.diag(reg)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        w = w - step
        if float(np.max(np.abs(step))) < LOGISTIC_TOL:
            converged = True
            break
    return w, converged


# ---------------------------------------------------------------------------
# decision forest


def _gini(pos: np.ndarray, n: np.ndarray) -> np.ndarray:
    frac = pos / n
    return 1.0 - frac**2 - (1.0 - frac) ** 2


def _grow_tree(X: np.ndarray, y: np.ndarray, rng: np.random.Generator, depth: int, mtry: int):
    n = y.size
    pos = float(y.sum())
    if depth >= FOREST_MAX_DEPTH or n < 2 or pos == 0.0 or pos == n:
        return {"p": pos / n}
    feats = rng.choice(X.shape[1], size=mtry, replace=False)
    best_gain = 0.0
    best = None
    parent = float(_gini(np.asarray(pos), np.asarray(float(n))))
    for f in feats:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        cum_pos = np.cumsum(y[order])
        cut = np.flatnonzero(xs[:-1] < xs[1:])
        if cut.size == 0:
            continue
        n_left = (cut + 1).astype(np.float64)
        pos_left = cum_pos[cut].astype(np.float64)
        n_right = n - n_left
        pos_right = pos - pos_left
        weighted = (n_left * _gini(pos_left, n_left) + n_right * _gini(pos_right, n_right)) / n
        gains = parent - weighted
        j = int(np.argmax(gains))
        if gains[j] > best_gain + 1e-15:
            best_gain = float(gains[j])
            best = (int(f), float(0.5 * (xs[cut[j]] + xs[cut[j] + 1])))
    if best is None:
        return {"p": pos / n}
    f, thr = best
    mask = X[:, f] <= thr
    return {
        "f": f,
        "t": thr,
        "l": _grow_tree(X[mask], y[mask], rng, depth + 1, mtry),
        "r": _grow_tree(X[~mask], y[~mask], rng, depth + 1, mtry),
    }


def _tree_scores(node, X: np.ndarray, out: np.ndarray, idx: np.ndarray):
    if "p" in node:
        out[idx] = node["p"]
        return
    mask = X[idx, node["f"]] <= node["t"]
    _tree_scores(node["l"], X, out, idx[mask])
    _tree_scores(node["r"], X, out, idx[~mask])


def _fit_forest(X: np.ndarray, y: np.ndarray, seed: int) -> list:
    n, d = X.shape
    mtry = max(1, int(round(math.sqrt(d))))
    trees = []
    for child_seq in np.random.SeedSequence(seed).spawn(FOREST_TREES):
        rng = np.random.default_rng(child_seq)
        rows = rng.integers(0, n, size=n)
        trees.append(_grow_tree(X[rows], y[rows], rng, 0, mtry))
    return trees


# ---------------------------------------------------------------------------
# training / prediction


def train_model(spec: ModelSpec, d: Dataset, seed: int) -> TrainedModel:
    """Fit spec on the rows consistent with its training scope.

    Trainable classes need at least one row per label class and more rows
    than encoded feature columns.  Fixed rules pass through untouched via
    fixed_rule_model and are rejected here.
    """
    if spec.model_class == "fixed_rule":
        raise ConfigError("fixed rules are constructed, not trained")
    scoped = restrict_to(d, spec.training_scope)
    width = encoded_width(d.schema, d.d, spec.encoding)
    n_pos = int(scoped.labels.sum())
    if n_pos == 0 or n_pos == scoped.n:
        raise InsufficientData(
            f"model {spec.id!r}: training scope needs both label classes"
            f" (got {n_pos} positives of {scoped.n} rows)"
        )
    if scoped.n < width + 1:
        raise InsufficientData(
            f"model {spec.id!r}: {scoped.n} rows cannot support width {width}"
        )
    X = encode_features(scoped, spec.encoding)
    y = scoped.labels.astype(np.float64)
    fingerprint = {"data_hash": scoped.content_hash(), "seed": int(seed), "rows": scoped.n}
    if spec.model_class == "logistic":
        w, converged = _fit_logistic(X, y)
        params = {"intercept": float(w[0]), "coef": [float(v) for v in w[1:]]}
        return TrainedModel(spec, params, fingerprint, converged=converged)
    if spec.model_class == "forest":
        trees = _fit_forest(X, scoped.labels, seed)
        return TrainedModel(spec, {"trees": trees}, fingerprint, converged=True)
    raise ConfigError(f"unknown model class {spec.model_class!r}")


def predict_scores(m: TrainedModel, d: Dataset) -> np.ndarray:
    """Scores in [0, 1] for every row of d, deterministic."""
    if m.spec.model_class == "fixed_rule":
        lookup = {tuple(e["group"]): e["score"] for e in m.parameters["table"]}
        default = m.parameters.get("default")
        out = np.empty(d.n, dtype=np.float64)
        for i in range(d.n):
            key = tuple(int(v) for v in d.groups[i])
            if key in lookup:
                out[i] = lookup[key]
            elif default is not None:
                out[i] = default
            else:
                raise ConfigError(f"fixed rule {m.id!r} has no entry for group {key}")
        return out
    X = encode_features(d, m.spec.encoding)
    if m.spec.model_class == "logistic":
        coef = np.asarray(m.parameters["coef"], dtype=np.float64)
        if X.shape[1] != coef.size:
            raise ShapeMismatch(coef.size, X.shape[1])
        return _sigmoid(m.parameters["intercept"] + X @ coef)
    if m.spec.model_class == "forest":
        trees = m.parameters["trees"]
        out = np.zeros(d.n, dtype=np.float64)
        buf = np.empty(d.n, dtype=np.float64)
        idx = np.arange(d.n)
        for tree in trees:
            _tree_scores(tree, X, buf, idx)
            out += buf
        return out / len(trees)
    raise ConfigError(f"unknown model class {m.spec.model_class!r}")


def predict_labels(m: TrainedModel, d: Dataset) -> np.ndarray:
    return (predict_scores(m, d) >= 0.5).astype(np.int64)


def predict_single(
    m: TrainedModel, schema: GroupSchema, features: np.ndarray, report: ReportingGroup
) -> float:
    """Score one instance given a (possibly partial) report.

    Only valid when the report covers the model's required attributes, so
    encodings that consume the full membership always receive one.  For
    models that ignore the membership, unreported entries are irrelevant.
    """
    features = np.asarray(features, dtype=np.float64).reshape(-1)
    if not set(m.spec.required_attributes) <= set(report.reported_indices()):
        raise ConfigError(
            f"model {m.id!r} needs attributes {sorted(m.spec.required_attributes)}"
        )
    if m.spec.model_class == "fixed_rule" and not report.is_full:
        default = m.parameters.get("default")
        if default is None:
            raise ConfigError(f"fixed rule {m.id!r} has no entry for report {report.entries}")
        return float(default)
    filled = tuple(0 if e is None else int(e) for e in report.entries)
    one = Dataset(
        schema,
        tuple(f"x{i}" for i in range(features.size)),
        features[None, :],
        np.zeros(1, dtype=np.int64),
        np.asarray([filled], dtype=np.int64),
    )
    return float(predict_scores(m, one)[0])


def empirical_risk(m: TrainedModel, d: Dataset, metric: Metric) -> float:
    """Risk of m on d; UndefinedMetric on empty or single-class auc samples."""
    if d.n == 0:
        raise UndefinedMetric("risk is undefined on an empty sample")
    if not metric.defined_on(d.labels):
        raise UndefinedMetric("auc needs both label classes in the sample")
    return metric.risk(predict_scores(m, d), d.labels)
