"""Synthetic tasks with known ground truth, for tests, demos, and benchmarks.

Three families:

* ``clinic_task`` — a tiny two-attribute cohort with hand-specified rules
  whose every downstream number (risks, contingency counts, certificate
  decisions) can be computed by hand.
* ``random_task`` — seeded generator with group-dependent feature/label
  relationships, for property tests and benchmarks.
* ``worsened_subgroup_task`` — a cohort built so that a one-hot additive
  personalized model provably hurts one small group, exercising the
  guarantee that certified systems never serve such a model there.
"""

from __future__ import annotations

import csv
import itertools
from pathlib import Path

import numpy as np

from .dataset import Dataset, GroupSchema, SplitBundle
from .errors import ConfigError
from .models import TrainedModel, fixed_rule_model
from .pool import ModelPool

__all__ = [
    "clinic_schema",
    "clinic_task",
    "clinic_rules",
    "clinic_pool",
    "clinic_bundle",
    "staged_attribute_task",
    "staged_attribute_pool",
    "random_task",
    "worsened_subgroup_task",
    "write_dataset_csv",
    "write_schema_json",
]


# ---------------------------------------------------------------------------
# the hand-checkable clinic cohort


def clinic_schema() -> GroupSchema:
    return GroupSchema(
        attributes=("sex", "age_group"),
        levels=(("female", "male"), ("old", "young")),
    )


#: rows per full group and the (constant) label each group carries, in
#: schema level order: (sex, age_group) -> (count, label)
CLINIC_CELLS = {
    (0, 0): (24, 0),  # female, old
    (0, 1): (25, 1),  # female, young
    (1, 0): (25, 1),  # male, old
    (1, 1): (27, 0),  # male, young
}


def clinic_task(seed: int = 7) -> Dataset:
    """101-row cohort whose labels are fully determined by group membership.

    The single feature column is seeded noise; the interesting structure
    lives entirely in the groups, which makes every model risk exact.
    """
    schema = clinic_schema()
    rng = np.random.default_rng(seed)
    groups = []
    labels = []
    for cell, (count, label) in sorted(CLINIC_CELLS.items()):
        groups.extend([cell] * count)
        labels.extend([label] * count)
    n = len(labels)
    features = rng.uniform(-1.0, 1.0, size=(n, 1))
    return Dataset(
        schema=schema,
        feature_names=("biomarker",),
        features=features,
        labels=np.asarray(labels, dtype=np.int64),
        groups=np.asarray(groups, dtype=np.int64),
    )


def clinic_rules() -> tuple[TrainedModel, TrainedModel]:
    """The two hand-specified clinic rules (personalized, baseline).

    The personalized rule needs the full membership and flags everyone
    except young males; it is wrong on every old female.  The baseline
    never flags anyone and never asks for anything.
    """
    schema = clinic_schema()
    personalized = fixed_rule_model(
        "clinic_personalized",
        schema,
        table={(0, 0): 1.0, (0, 1): 1.0, (1, 0): 1.0, (1, 1): 0.0},
    )
    baseline = fixed_rule_model(
        "clinic_baseline",
        schema,
        table={},
        default=0.0,
        required_attributes=frozenset(),
    )
    return personalized, baseline


def clinic_pool() -> ModelPool:
    personalized, baseline = clinic_rules()
    return ModelPool(clinic_schema(), (personalized, baseline))


def clinic_bundle(seed: int = 7) -> SplitBundle:
    """The full cohort in every role, so certificates match hand arithmetic."""
    return SplitBundle.shared(clinic_task(seed), seed)


# ---------------------------------------------------------------------------
# a task where exactly one attribute carries the signal


def staged_attribute_task(seed: int = 11, cell_size: int = 25) -> Dataset:
    """Labels depend on age only; the legacy rule errs on half of each age band.

    Built so a minimax-grown tree must branch on age first: splitting on
    sex leaves the legacy rule's risk unchanged in both halves, while
    splitting on age lets the age rule repair both children.
    """
    schema = clinic_schema()
    groups = []
    labels = []
    for cell in sorted(itertools.product((0, 1), (0, 1))):
        groups.extend([cell] * cell_size)
        labels.extend([1 if cell[1] == 0 else 0] * cell_size)  # old -> 1
    rng = np.random.default_rng(seed)
    features = rng.uniform(-1.0, 1.0, size=(len(labels), 1))
    return Dataset(
        schema=schema,
        feature_names=("biomarker",),
        features=features,
        labels=np.asarray(labels, dtype=np.int64),
        groups=np.asarray(groups, dtype=np.int64),
    )


def staged_attribute_pool() -> ModelPool:
    """Legacy rule (flags females, ignoring the real signal) plus an age rule."""
    schema = clinic_schema()
    legacy = fixed_rule_model(
        "legacy_rule",
        schema,
        table={(0, 0): 1.0, (0, 1): 1.0, (1, 0): 0.0, (1, 1): 0.0},
        default=0.0,
        required_attributes=frozenset(),
    )
    age_rule = fixed_rule_model(
        "age_rule",
        schema,
        table={(0, 0): 1.0, (1, 0): 1.0, (0, 1): 0.0, (1, 1): 0.0},
        default=0.0,
        required_attributes=frozenset({1}),
    )
    sex_rule = fixed_rule_model(
        "sex_rule",
        schema,
        table={(0, 0): 1.0, (0, 1): 1.0, (1, 0): 0.0, (1, 1): 0.0},
        default=0.0,
        required_attributes=frozenset({0}),
    )
    return ModelPool(schema, (legacy, age_rule, sex_rule))


# ---------------------------------------------------------------------------
# randomized benchmark tasks


def random_task(
    n: int = 1200,
    k: int = 2,
    n_levels: int = 2,
    d: int = 4,
    seed: int = 0,
    group_shift: float = 2.0,
    noise: float = 1.0,
) -> Dataset:
    """Seeded cohort whose feature-label relationship varies by group.

    Each full group gets its own coefficient vector (a shared base plus a
    group-specific perturbation of magnitude group_shift), so personalized
    models genuinely outperform a single generic fit and reporting more
    attributes is genuinely informative.
    """
    if k < 1 or k > 3:
        raise ConfigError("random_task supports 1..3 attributes")
    if n_levels < 2 or n_levels > 4:
        raise ConfigError("random_task supports 2..4 levels per attribute")
    if n < 8 * n_levels**k:
        raise ConfigError("too few rows for the requested group structure")
    rng = np.random.default_rng(seed)
    schema = GroupSchema(
        attributes=tuple(f"attr{i}" for i in range(k)),
        levels=tuple(
            tuple(f"level{j}" for j in range(n_levels)) for _ in range(k)
        ),
    )
    groups = rng.integers(0, n_levels, size=(n, k))
    features = rng.normal(0.0, 1.0, size=(n, d))
    base = rng.normal(0.0, 1.0, size=d)
    logits = np.empty(n)
    for cell in itertools.product(range(n_levels), repeat=k):
        delta = rng.normal(0.0, group_shift, size=d)
        intercept = rng.normal(0.0, 0.5)
        mask = np.all(groups == np.asarray(cell), axis=1)
        logits[mask] = features[mask] @ (base + delta) + intercept
    logits += rng.normal(0.0, noise, size=n)
    labels = (rng.uniform(0.0, 1.0, size=n) < 1.0 / (1.0 + np.exp(-logits))).astype(
        np.int64
    )
    return Dataset(
        schema=schema,
        feature_names=tuple(f"x{i}" for i in range(d)),
        features=features,
        labels=labels,
        groups=groups.astype(np.int64),
    )


def worsened_subgroup_task(seed: int = 0) -> Dataset:
    """A cohort on which additive one-hot personalization hurts one group.

    Labels are deterministic in the group cells and arranged like an
    exclusive-or: three cells pull both attribute main effects negative
    while the overall majority keeps the intercept positive, so an
    additive model flips the smallest cell to the wrong side even though
    the generic majority rule serves it perfectly.  The single feature is
    bounded noise and carries no signal.
    """
    schema = GroupSchema(
        attributes=("region", "device"),
        levels=(("north", "south"), ("phone", "desktop")),
    )
    cells = {
        (0, 0): (250, 1),
        (0, 1): (120, 0),
        (1, 0): (120, 0),
        (1, 1): (60, 1),
    }
    groups = []
    labels = []
    for cell, (count, label) in sorted(cells.items()):
        groups.extend([cell] * count)
        labels.extend([label] * count)
    rng = np.random.default_rng(seed)
    features = rng.uniform(-1.0, 1.0, size=(len(labels), 1))
    return Dataset(
        schema=schema,
        feature_names=("activity",),
        features=features,
        labels=np.asarray(labels, dtype=np.int64),
        groups=np.asarray(groups, dtype=np.int64),
    )


# ---------------------------------------------------------------------------
# fixture writers (CSV + schema JSON, the loader's on-disk format)


def write_dataset_csv(d: Dataset, path) -> None:
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(d.feature_names) + list(d.schema.attributes) + ["label"])
        for i in range(d.n):
            row = [repr(float(v)) for v in d.features[i]]
            row += [
                d.schema.levels[j][d.groups[i, j]] for j in range(d.schema.k)
            ]
            row.append(str(int(d.labels[i])))
            writer.writerow(row)


def write_schema_json(d: Dataset, path) -> None:
    import json

    doc = {
        "format_version": 1,
        "attributes": [
            {"name": name, "levels": list(levels)}
            for name, levels in zip(d.schema.attributes, d.schema.levels)
        ],
        "label": "label",
        "features": list(d.feature_names),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
