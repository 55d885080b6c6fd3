import numpy as np
import pytest

from partsys.dataset import ReportingGroup, group_counts, load_dataset, load_schema
from partsys.errors import ConfigError
from partsys.models import ERROR, empirical_risk, predict_scores
from partsys.synth import (
    clinic_bundle,
    clinic_pool,
    clinic_rules,
    clinic_schema,
    clinic_task,
    random_task,
    staged_attribute_pool,
    staged_attribute_task,
    worsened_subgroup_task,
    write_dataset_csv,
    write_schema_json,
)


class TestClinicTask:
    def test_shape_and_schema(self):
        d = clinic_task()
        assert d.n == 101
        assert d.schema == clinic_schema()
        assert d.feature_names == ("biomarker",)
        assert np.all((-1.0 <= d.features) & (d.features <= 1.0))

    def test_cell_composition_frozen(self):
        d = clinic_task()
        counts = {c.group.entries: (c.n, c.positives) for c in group_counts(d)}
        assert counts == {
            (0, 0): (24, 0),
            (0, 1): (25, 25),
            (1, 0): (25, 25),
            (1, 1): (27, 0),
        }

    def test_deterministic(self):
        assert clinic_task(seed=7).content_hash() == clinic_task(seed=7).content_hash()
        assert clinic_task(seed=7).content_hash() != clinic_task(seed=8).content_hash()

    def test_rules(self):
        personalized, baseline = clinic_rules()
        d = clinic_task()
        # the personalized rule is right except on the older-female cell
        assert empirical_risk(personalized, d, ERROR) == pytest.approx(24 / 101)
        assert empirical_risk(baseline, d, ERROR) == pytest.approx(50 / 101)
        assert personalized.spec.required_attributes == frozenset({0, 1})
        assert baseline.spec.required_attributes == frozenset()

    def test_pool_and_bundle(self):
        pool = clinic_pool()
        assert {m.id for m in pool} == {"clinic_personalized", "clinic_baseline"}
        bundle = clinic_bundle()
        assert bundle.shared_assign_prune
        assert bundle.assign is bundle.prune is bundle.test


class TestStagedAttributeTask:
    def test_composition(self):
        d = staged_attribute_task(seed=0)
        assert d.n == 100
        counts = {c.group.entries: (c.n, c.positives) for c in group_counts(d)}
        age = d.schema.attribute_index("age_group")
        # labels indicate the older age band regardless of sex
        for entries, (n, pos) in counts.items():
            assert n == 25
            assert pos == (25 if entries[age] == 0 else 0)

    def test_pool_serves_its_purpose(self):
        d = staged_attribute_task(seed=0)
        pool = staged_attribute_pool()
        legacy = pool.by_id("legacy_rule")
        age_rule = pool.by_id("age_rule")
        # the legacy guess is wrong on half of every age band; knowing age
        # fixes everything
        assert empirical_risk(legacy, d, ERROR) == pytest.approx(0.5)
        assert empirical_risk(age_rule, d, ERROR) == 0.0


class TestWorsenedSubgroupTask:
    def test_composition(self):
        d = worsened_subgroup_task(seed=0)
        counts = {c.group.entries: (c.n, c.positives) for c in group_counts(d)}
        assert counts == {
            (0, 0): (250, 250),
            (0, 1): (120, 0),
            (1, 0): (120, 0),
            (1, 1): (60, 60),
        }

    def test_additive_personalization_flips_smallest_cell(self):
        from partsys.dataset import Dataset, restrict_to
        from partsys.models import ModelSpec, train_model

        d = worsened_subgroup_task(seed=0)
        spec = ModelSpec(
            "onehot", "onehot", "logistic", "onehot",
            frozenset(range(2)), ReportingGroup.root(2),
        )
        m = train_model(spec, d, seed=0)
        smallest = restrict_to(d, ReportingGroup((1, 1)))
        assert empirical_risk(m, smallest, ERROR) > 0.5


class TestRandomTask:
    def test_deterministic(self):
        a = random_task(n=200, k=2, seed=4)
        b = random_task(n=200, k=2, seed=4)
        assert a.content_hash() == b.content_hash()
        assert a.content_hash() != random_task(n=200, k=2, seed=5).content_hash()

    def test_validation(self):
        with pytest.raises(ConfigError):
            random_task(k=4)
        with pytest.raises(ConfigError):
            random_task(n_levels=5)
        with pytest.raises(ConfigError):
            random_task(n=4, k=2)

    def test_every_group_present(self):
        d = random_task(n=400, k=2, n_levels=2, seed=0)
        assert all(c.n > 0 for c in group_counts(d))

    def test_group_signal_exists(self):
        # each cell has its own coefficient vector, so models fit per cell
        # beat one generic fit where it matters
        from partsys.dataset import restrict_to
        from partsys.models import ModelSpec, train_model

        d = random_task(n=1500, k=2, seed=1, group_shift=3.0)
        generic = train_model(
            ModelSpec("g", "generic", "logistic", "none", frozenset(), ReportingGroup.root(2)),
            d, seed=0,
        )
        improved = 0
        for g in d.schema.full_groups():
            scoped = train_model(
                ModelSpec(
                    f"s_{g.slug(d.schema)}", "subgroup", "logistic", "none",
                    frozenset(range(2)), g,
                ),
                d, seed=0,
            )
            rows = restrict_to(d, g)
            if empirical_risk(scoped, rows, ERROR) < empirical_risk(generic, rows, ERROR):
                improved += 1
        assert improved >= 3


class TestFixtureWriters:
    def test_round_trip_preserves_content(self, tmp_path):
        d = clinic_task()
        csv_path = tmp_path / "clinic.csv"
        schema_path = tmp_path / "clinic_schema.json"
        write_dataset_csv(d, csv_path)
        write_schema_json(d, schema_path)
        doc = load_schema(schema_path)
        schema, label, features = doc
        assert schema == d.schema
        assert label == "label" and features == ("biomarker",)
        with csv_path.open() as fh:
            loaded = load_dataset(fh, schema_path)
        assert loaded.content_hash() == d.content_hash()

    def test_round_trip_preserves_predictions(self, tmp_path):
        d = random_task(n=120, k=2, seed=6)
        csv_path = tmp_path / "task.csv"
        schema_path = tmp_path / "task_schema.json"
        write_dataset_csv(d, csv_path)
        write_schema_json(d, schema_path)
        with csv_path.open() as fh:
            loaded = load_dataset(fh, schema_path)
        assert np.array_equal(loaded.features, d.features)
        assert np.array_equal(loaded.labels, d.labels)
        assert np.array_equal(loaded.groups, d.groups)
