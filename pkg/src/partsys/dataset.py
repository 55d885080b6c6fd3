"""Datasets with categorical group attributes and partial reports.

A row is (features, label, full group membership).  A *reporting group*
is a partial view of a membership: each attribute is either reported at
one of its declared levels or withheld.  The withheld mark is ``None``
throughout and renders as ``∅``.
"""

from __future__ import annotations

import csv
import hashlib
import io
import itertools
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    ConfigError,
    EmptySplit,
    MissingColumn,
    MissingValue,
    NonNumericFeature,
    UnknownLevel,
)

logger = logging.getLogger(__name__)

NOT_REPORTED = "∅"


@dataclass(frozen=True)
class GroupSchema:
    """Ordered group attributes, each with ≥ 2 ordered categorical levels."""

    attributes: tuple[str, ...]
    levels: tuple[tuple[str, ...], ...]

    def __post_init__(self):
        if len(self.attributes) < 1:
            raise ConfigError("schema needs at least one group attribute")
        if len(self.attributes) != len(set(self.attributes)):
            raise ConfigError("attribute names must be unique")
        if len(self.levels) != len(self.attributes):
            raise ConfigError("one level list per attribute required")
        for name, lv in zip(self.attributes, self.levels):
            if len(lv) < 2:
                raise ConfigError(f"attribute {name!r} needs at least two levels")
            if len(lv) != len(set(lv)):
                raise ConfigError(f"levels of attribute {name!r} must be unique")

    @property
    def k(self) -> int:
        return len(self.attributes)

    def attribute_index(self, name: str) -> int:
        try:
            return self.attributes.index(name)
        except ValueError:
            raise ConfigError(f"unknown attribute {name!r}") from None

    def level_index(self, attribute: int, level: str) -> int:
        try:
            return self.levels[attribute].index(level)
        except ValueError:
            raise ConfigError(
                f"unknown level {level!r} for attribute {self.attributes[attribute]!r}"
            ) from None

    def n_full_groups(self) -> int:
        out = 1
        for lv in self.levels:
            out *= len(lv)
        return out

    def full_groups(self) -> Iterator["ReportingGroup"]:
        """All complete memberships, lexicographic in level indices."""
        for combo in itertools.product(*(range(len(lv)) for lv in self.levels)):
            yield ReportingGroup(combo)

    def to_dict(self) -> dict:
        return {
            "attributes": [
                {"name": a, "levels": list(lv)} for a, lv in zip(self.attributes, self.levels)
            ]
        }

    @classmethod
    def from_dict(cls, payload: Mapping) -> "GroupSchema":
        attrs = payload.get("attributes")
        if not isinstance(attrs, list) or not attrs:
            raise ConfigError("schema payload needs a non-empty 'attributes' list")
        names = []
        levels = []
        for entry in attrs:
            names.append(str(entry["name"]))
            levels.append(tuple(str(v) for v in entry["levels"]))
        return cls(tuple(names), tuple(levels))


@dataclass(frozen=True)
class ReportingGroup:
    """A partial membership report: one entry per attribute, ``None`` = withheld.

    Ordering and hashing treat the withheld mark as smaller than any level,
    which gives a stable sort for deterministic iteration.
    """

    entries: tuple[int | None, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))

    def __lt__(self, other: "ReportingGroup") -> bool:  # None-safe total order
        key = tuple((e is not None, e if e is not None else -1) for e in self.entries)
        okey = tuple((e is not None, e if e is not None else -1) for e in other.entries)
        return key < okey

    @classmethod
    def root(cls, k: int) -> "ReportingGroup":
        return cls((None,) * k)

    @property
    def k(self) -> int:
        return len(self.entries)

    @property
    def n_reported(self) -> int:
        return sum(e is not None for e in self.entries)

    @property
    def is_root(self) -> bool:
        return self.n_reported == 0

    @property
    def is_full(self) -> bool:
        return self.n_reported == len(self.entries)

    def reported_indices(self) -> tuple[int, ...]:
        return tuple(i for i, e in enumerate(self.entries) if e is not None)

    def extend(self, attribute: int, level: int) -> "ReportingGroup":
        if self.entries[attribute] is not None:
            raise ConfigError(f"attribute {attribute} already reported")
        entries = list(self.entries)
        entries[attribute] = level
        return ReportingGroup(tuple(entries))

    def drop(self, attribute: int) -> "ReportingGroup":
        entries = list(self.entries)
        entries[attribute] = None
        return ReportingGroup(tuple(entries))

    def refines(self, other: "ReportingGroup") -> bool:
        """True when self reports everything other reports, at equal levels."""
        return all(o is None or s == o for s, o in zip(self.entries, other.entries))

    def consistent_with(self, other: "ReportingGroup") -> bool:
        """No attribute reported at conflicting levels."""
        return all(
            s is None or o is None or s == o for s, o in zip(self.entries, other.entries)
        )

    def label(self, schema: GroupSchema) -> str:
        parts = []
        for i, e in enumerate(self.entries):
            shown = NOT_REPORTED if e is None else schema.levels[i][e]
            parts.append(f"{schema.attributes[i]}={shown}")
        return ", ".join(parts)

    def slug(self, schema: GroupSchema) -> str:
        """Filesystem/id-safe rendering, e.g. ``sex.female__age.any``."""
        parts = []
        for i, e in enumerate(self.entries):
            shown = "any" if e is None else schema.levels[i][e]
            parts.append(f"{schema.attributes[i]}.{shown}")
        return "__".join(parts)


def truthful_options(group: ReportingGroup) -> list[ReportingGroup]:
    """Every partial report a member of ``group`` can make without lying.

    There are 2**k of them, the empty report and the full report included.
    """
    from .errors import PartialInput

    if not group.is_full:
        raise PartialInput("truthful options are defined for full memberships only")
    out = []
    for keep in itertools.product((False, True), repeat=group.k):
        entries = tuple(e if k else None for e, k in zip(group.entries, keep))
        out.append(ReportingGroup(entries))
    return sorted(out)


@dataclass(frozen=True)
class Dataset:
    """Immutable numeric features, binary labels, and full group rows."""

    schema: GroupSchema
    feature_names: tuple[str, ...]
    features: np.ndarray  # (n, d) float64
    labels: np.ndarray  # (n,) int64 in {0, 1}
    groups: np.ndarray  # (n, k) int64 level indices

    def __post_init__(self):
        feats = np.ascontiguousarray(np.asarray(self.features, dtype=np.float64))
        labs = np.ascontiguousarray(np.asarray(self.labels, dtype=np.int64))
        grps = np.ascontiguousarray(np.asarray(self.groups, dtype=np.int64))
        if feats.ndim != 2 or feats.shape[1] < 1:
            raise ConfigError("features must be a (n, d) matrix with d >= 1")
        n = feats.shape[0]
        if labs.shape != (n,) or grps.shape != (n, self.schema.k):
            raise ConfigError("features, labels and groups disagree on row count")
        if n and not np.isin(labs, (0, 1)).all():
            raise ConfigError("labels must be 0 or 1")
        for i, lv in enumerate(self.schema.levels):
            if n and (grps[:, i].min() < 0 or grps[:, i].max() >= len(lv)):
                raise ConfigError(f"group column {i} has out-of-range level indices")
        for arr in (feats, labs, grps):
            arr.setflags(write=False)
        object.__setattr__(self, "features", feats)
        object.__setattr__(self, "labels", labs)
        object.__setattr__(self, "groups", grps)

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def d(self) -> int:
        return self.features.shape[1]

    def consistency_mask(self, r: ReportingGroup) -> np.ndarray:
        mask = np.ones(self.n, dtype=bool)
        for i, e in enumerate(r.entries):
            if e is not None:
                mask &= self.groups[:, i] == e
        return mask

    def select(self, index: np.ndarray) -> "Dataset":
        return Dataset(
            self.schema,
            self.feature_names,
            self.features[index],
            self.labels[index],
            self.groups[index],
        )

    def with_groups(self, r: ReportingGroup) -> "Dataset":
        """Copy with every row's membership overridden by a full group."""
        if not r.is_full:
            from .errors import PartialInput

            raise PartialInput("group override requires a full membership")
        forced = np.tile(np.asarray(r.entries, dtype=np.int64), (self.n, 1))
        return Dataset(self.schema, self.feature_names, self.features, self.labels, forced)

    def full_group_of_row(self, row: int) -> ReportingGroup:
        return ReportingGroup(tuple(int(v) for v in self.groups[row]))

    def content_hash(self) -> str:
        h = hashlib.sha256()
        h.update(json.dumps(self.to_header(), sort_keys=True).encode())
        h.update(self.features.tobytes())
        h.update(self.labels.tobytes())
        h.update(self.groups.tobytes())
        return h.hexdigest()

    def to_header(self) -> dict:
        return {"schema": self.schema.to_dict(), "features": list(self.feature_names)}


def restrict_to(d: Dataset, r: ReportingGroup) -> Dataset:
    """Rows whose membership is consistent with every reported entry of r.

    The empty report keeps everything; the result may have zero rows.
    """
    if r.is_root:
        return d
    return d.select(np.flatnonzero(d.consistency_mask(r)))


@dataclass(frozen=True)
class GroupCount:
    group: ReportingGroup
    n: int
    positives: int
    negatives: int


def group_counts(d: Dataset) -> list[GroupCount]:
    """Per full group row/label counts, zero-count groups included."""
    out = []
    for g in d.schema.full_groups():
        mask = d.consistency_mask(g)
        n = int(mask.sum())
        pos = int(d.labels[mask].sum())
        out.append(GroupCount(g, n, pos, n - pos))
    return out


def encode_features(d: Dataset, mode: str) -> np.ndarray:
    """Numeric design matrix: raw features plus optional group indicators.

    none            raw features only
    onehot          one indicator per non-first level of each attribute
    intersectional  one indicator per non-first full group
    """
    if mode == "none":
        return np.array(d.features, dtype=np.float64)
    if mode == "onehot":
        cols = [d.features]
        for i, lv in enumerate(d.schema.levels):
            for level in range(1, len(lv)):
                cols.append((d.groups[:, i] == level).astype(np.float64)[:, None])
        return np.hstack(cols)
    if mode == "intersectional":
        cols = [d.features]
        for g in list(d.schema.full_groups())[1:]:
            cols.append(d.consistency_mask(g).astype(np.float64)[:, None])
        return np.hstack(cols)
    raise ConfigError(f"unknown encoding mode {mode!r}")


def encoded_width(schema: GroupSchema, n_features: int, mode: str) -> int:
    if mode == "none":
        return n_features
    if mode == "onehot":
        return n_features + sum(len(lv) - 1 for lv in schema.levels)
    if mode == "intersectional":
        return n_features + schema.n_full_groups() - 1
    raise ConfigError(f"unknown encoding mode {mode!r}")


# ---------------------------------------------------------------------------
# loading


def load_schema(source) -> tuple[GroupSchema, str, tuple[str, ...]]:
    """Read a schema document: group attributes, label column, feature columns.

    Accepts a path to a JSON file or an already-parsed mapping.  Returns
    (schema, label_column, feature_columns).
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", encoding="utf-8") as fh:
            try:
                payload = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"schema document is not valid JSON: {exc}") from exc
    elif isinstance(source, Mapping):
        payload = source
    else:
        raise ConfigError("schema source must be a path or a mapping")
    version = payload.get("format_version", 1)
    if version != 1:
        raise ConfigError(f"unsupported schema format_version {version}")
    if "label" not in payload or "features" not in payload:
        raise ConfigError("schema payload needs 'label' and 'features'")
    schema = GroupSchema.from_dict(payload)
    label = str(payload["label"])
    features = tuple(str(c) for c in payload["features"])
    if not features:
        raise ConfigError("at least one feature column is required")
    overlap = set(features) & ({label} | set(schema.attributes))
    if overlap:
        raise ConfigError(f"columns used twice: {sorted(overlap)}")
    return schema, label, features


def load_dataset(csv_source, schema_source) -> Dataset:
    """Parse a CSV with named columns against a schema document.

    Empty cells raise MissingValue, undeclared categories UnknownLevel,
    non-numeric feature cells NonNumericFeature.  No imputation happens
    here; rows must be complete.
    """
    schema, label_col, feature_cols = load_schema(schema_source)
    if isinstance(csv_source, (str, Path)):
        fh = open(csv_source, "r", encoding="utf-8", newline="")
        close = True
    else:
        fh = csv_source
        close = False
    try:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in (label_col, *feature_cols, *schema.attributes):
            if col not in header:
                raise MissingColumn(col)
        feats: list[list[float]] = []
        labels: list[int] = []
        groups: list[list[int]] = []
        for idx, row in enumerate(reader):
            feats.append([_parse_feature(idx, col, row.get(col)) for col in feature_cols])
            labels.append(_parse_label(idx, label_col, row.get(label_col)))
            groups.append(
                [
                    _parse_level(idx, schema, a, row.get(schema.attributes[a]))
                    for a in range(schema.k)
                ]
            )
    finally:
        if close:
            fh.close()
    if not feats:
        raise EmptySplit("dataset", "no data rows in source")
    return Dataset(
        schema,
        feature_cols,
        np.asarray(feats, dtype=np.float64),
        np.asarray(labels, dtype=np.int64),
        np.asarray(groups, dtype=np.int64),
    )


def _parse_feature(row: int, col: str, raw) -> float:
    if raw is None or raw.strip() == "":
        raise MissingValue(row, col)
    try:
        value = float(raw)
    except ValueError:
        raise NonNumericFeature(row, col, raw) from None
    if not np.isfinite(value):
        raise NonNumericFeature(row, col, raw)
    return value


def _parse_label(row: int, col: str, raw) -> int:
    if raw is None or raw.strip() == "":
        raise MissingValue(row, col)
    try:
        value = float(raw)
    except ValueError:
        raise UnknownLevel(row, col, raw) from None
    if value not in (0.0, 1.0):
        raise UnknownLevel(row, col, raw)
    return int(value)


def _parse_level(row: int, schema: GroupSchema, attribute: int, raw) -> int:
    col = schema.attributes[attribute]
    if raw is None or raw.strip() == "":
        raise MissingValue(row, col)
    value = raw.strip()
    if value not in schema.levels[attribute]:
        raise UnknownLevel(row, col, raw)
    return schema.levels[attribute].index(value)


# ---------------------------------------------------------------------------
# splitting


@dataclass(frozen=True)
class SplitBundle:
    """The three disjoint roles data plays downstream.

    assign  picks the best model per reporting option
    prune   validates gains before an option is offered
    test    is never touched until final evaluation
    """

    assign: Dataset
    prune: Dataset
    test: Dataset
    seed: int
    shared_assign_prune: bool = False

    @classmethod
    def shared(cls, d: Dataset, seed: int = 0) -> "SplitBundle":
        """All three roles on the same rows.  Demonstration use only."""
        logger.warning(
            "assign/prune/test share rows; gain certificates are not out-of-sample"
        )
        return cls(d, d, d, seed, shared_assign_prune=True)


def _apportion(sizes: Sequence[int], quota: int) -> list[int]:
    """Largest-remainder allocation of quota across strata, capped by size."""
    total = sum(sizes)
    if total == 0 or quota == 0:
        return [0] * len(sizes)
    quota = min(quota, total)
    ideal = [s * quota / total for s in sizes]
    alloc = [min(int(x), s) for x, s in zip(ideal, sizes)]
    remainders = sorted(
        range(len(sizes)),
        key=lambda i: (-(ideal[i] - int(ideal[i])), i),
    )
    short = quota - sum(alloc)
    pos = 0
    while short > 0:
        i = remainders[pos % len(sizes)]
        if alloc[i] < sizes[i]:
            alloc[i] += 1
            short -= 1
        pos += 1
    return alloc


def split_dataset(
    d: Dataset,
    test_fraction: float,
    prune_fraction: float,
    seed: int,
    shared_assign_prune: bool = False,
) -> SplitBundle:
    """Deterministic three-way split, stratified by (group, label).

    Strata with fewer than two rows are pooled and allocated randomly.
    Quotas are apportioned by largest remainder so the overall part sizes
    are exact.  With shared_assign_prune the non-test rows serve as both
    the assign and the prune part (a warning is logged).
    """
    if not (0 < test_fraction < 1 and 0 < prune_fraction < 1):
        raise ConfigError("fractions must lie in (0, 1)")
    if test_fraction + prune_fraction >= 1:
        raise ConfigError("test and prune fractions must sum below 1")
    n = d.n
    n_test = round(n * test_fraction)
    n_prune = round(n * prune_fraction)
    n_assign = n - n_test - n_prune
    for part, size in (("test", n_test), ("prune", n_prune), ("assign", n_assign)):
        if size <= 0:
            raise EmptySplit(part, f"n={n} is too small for the requested fractions")

    keys = [
        (tuple(int(v) for v in d.groups[i]), int(d.labels[i])) for i in range(n)
    ]
    strata: dict = {}
    for i, key in enumerate(keys):
        strata.setdefault(key, []).append(i)
    pooled: list[int] = []
    kept: list[tuple] = []
    for key in sorted(strata):
        rows = strata[key]
        if len(rows) < 2:
            pooled.extend(rows)
        else:
            kept.append((key, rows))
    if pooled:
        kept.append((("__pooled__",), sorted(pooled)))

    rng = np.random.default_rng(seed)
    shuffled = [list(np.asarray(rows)[rng.permutation(len(rows))]) for _, rows in kept]
    sizes = [len(rows) for rows in shuffled]
    take_test = _apportion(sizes, n_test)
    left = [s - t for s, t in zip(sizes, take_test)]
    take_prune = _apportion(left, n_prune)

    test_rows: list[int] = []
    prune_rows: list[int] = []
    assign_rows: list[int] = []
    for rows, t, p in zip(shuffled, take_test, take_prune):
        test_rows.extend(rows[:t])
        prune_rows.extend(rows[t : t + p])
        assign_rows.extend(rows[t + p :])

    test = d.select(np.sort(np.asarray(test_rows, dtype=np.int64)))
    prune = d.select(np.sort(np.asarray(prune_rows, dtype=np.int64)))
    assign = d.select(np.sort(np.asarray(assign_rows, dtype=np.int64)))
    if shared_assign_prune:
        non_test = d.select(np.sort(np.asarray(assign_rows + prune_rows, dtype=np.int64)))
        logger.warning(
            "shared assign/prune requested; gain certificates reuse the model"
            " selection rows"
        )
        return SplitBundle(non_test, non_test, test, seed, shared_assign_prune=True)
    return SplitBundle(assign, prune, test, seed)
