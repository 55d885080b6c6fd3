import csv
import json
from dataclasses import replace

import numpy as np
import pytest

from partsys.assembly import GainCertificate, learn_systems
from partsys.dataset import Dataset, GroupSchema, ReportingGroup, split_dataset
from partsys.errors import ConfigError
from partsys.metrics import (
    data_use,
    evaluate_system,
    group_gain_range,
    imputation_risk,
    impute_groups,
    options_pruned,
    overall_gain,
    overall_performance,
    rationality_violations,
)
from partsys.models import ERROR, fixed_rule_model
from partsys.pool import build_pool
from partsys.synth import random_task


# ---------------------------------------------------------------------------
# the three clinic columns, frozen end to end


class TestClinicPersonalizedModel:
    """The always-on personalized rule: helps three groups, harms one."""

    def test_performance(self, clinic):
        h = clinic["personalized"]
        data = clinic["bundle"].test
        assert overall_performance(h, data) == pytest.approx(24 / 101, abs=1e-15)

    def test_gain(self, clinic):
        h, h0 = clinic["personalized"], clinic["baseline"]
        data = clinic["bundle"].test
        assert overall_gain(h, data, generic=h0) == pytest.approx(26 / 101, abs=1e-15)

    def test_gain_range(self, clinic):
        h, h0 = clinic["personalized"], clinic["baseline"]
        data = clinic["bundle"].test
        assert group_gain_range(h, data, generic=h0) == (-1.0, 1.0)

    def test_one_rationality_violation(self, clinic):
        h, h0 = clinic["personalized"], clinic["baseline"]
        data = clinic["bundle"].test
        count, flags = rationality_violations(h, data, generic=h0, seed=0)
        assert count == 1
        violated = [f for f in flags if f.get("violation")]
        assert len(violated) == 1
        assert violated[0]["group"].entries == (0, 0)
        assert violated[0]["p_value"] == 0.0

    def test_imputation_risk(self, clinic):
        h = clinic["personalized"]
        data = clinic["bundle"].test
        assert imputation_risk(h, data) == -1.0

    def test_data_use(self, clinic):
        h = clinic["personalized"]
        data = clinic["bundle"].test
        assert data_use(h, data) == 1.0

    def test_full_report(self, clinic):
        report = evaluate_system(
            clinic["personalized"],
            clinic["bundle"].test,
            generic=clinic["baseline"],
            seed=0,
        )
        assert report.target_type == "model"
        assert report.policy == "truthful"
        assert report.overall_risk == pytest.approx(24 / 101, abs=1e-15)
        assert report.overall_gain == pytest.approx(26 / 101, abs=1e-15)
        assert report.group_gain_min == -1.0
        assert report.group_gain_max == 1.0
        assert report.n_violations == 1
        assert report.options_pruned is None
        assert report.data_use == 1.0
        assert report.imputation_risk == -1.0
        assert report.n_test == 101


class TestClinicBaselineModel:
    """The generic rule is its own reference: all zeros."""

    def test_full_report(self, clinic):
        h0 = clinic["baseline"]
        report = evaluate_system(h0, clinic["bundle"].test, generic=h0, seed=0)
        assert report.overall_risk == pytest.approx(50 / 101, abs=1e-15)
        assert report.overall_gain == 0.0
        assert report.n_violations == 0
        assert report.data_use == 0.0
        assert report.imputation_risk == 0.0
        assert report.group_gain_min == 0.0 and report.group_gain_max == 0.0


class TestClinicSystem:
    """The learned minimal system keeps the helpful options only."""

    def test_full_report(self, clinic):
        system = clinic["system"]
        report = evaluate_system(system, clinic["bundle"].test, seed=0)
        assert report.target_type == "system"
        assert report.policy == "gain_positive"
        assert report.overall_risk == 0.0
        assert report.overall_gain == pytest.approx(50 / 101, abs=1e-15)
        assert report.n_violations == 0
        assert report.options_pruned == 0.5
        assert report.data_use == pytest.approx(50 / 101, abs=1e-15)
        assert report.imputation_risk is None
        assert report.group_gain_min == 0.0
        assert report.group_gain_max == 1.0

    def test_group_rows(self, clinic):
        report = evaluate_system(clinic["system"], clinic["bundle"].test, seed=0)
        by_group = {g.group.entries: g for g in report.groups}
        assert by_group[(0, 1)].node_entries == (0, 1)
        assert by_group[(0, 1)].n_reported == 2
        assert by_group[(0, 1)].gain == 1.0
        # pruned groups are served at the root and lose nothing
        assert by_group[(0, 0)].node_entries == (None, None)
        assert by_group[(0, 0)].n_reported == 0
        assert by_group[(0, 0)].gain == 0.0
        assert not any(g.violation for g in report.groups)

    def test_options_pruned_counts_nodes(self, clinic):
        system = clinic["system"]
        # 4 options offered, 2 removed
        assert options_pruned(system) == 0.5

    def test_gain_identity(self, clinic):
        system = clinic["system"]
        data = clinic["bundle"].test
        gain = overall_gain(system, data)
        generic_risk = overall_performance(system.root_model, data)
        system_risk = overall_performance(system, data)
        assert gain == pytest.approx(generic_risk - system_risk, abs=1e-12)


# ---------------------------------------------------------------------------
# argument handling


class TestArgumentHandling:
    def test_model_needs_explicit_generic(self, clinic):
        with pytest.raises(ConfigError):
            overall_gain(clinic["personalized"], clinic["bundle"].test)
        with pytest.raises(ConfigError):
            evaluate_system(clinic["personalized"], clinic["bundle"].test)

    def test_rejects_other_targets(self, clinic):
        with pytest.raises(ConfigError):
            overall_performance("not a model", clinic["bundle"].test)

    def test_imputation_risk_rejects_systems(self, clinic):
        with pytest.raises(ConfigError):
            imputation_risk(clinic["system"], clinic["bundle"].test)

    def test_system_policy_override(self, clinic):
        system = clinic["system"]
        data = clinic["bundle"].test
        # certified clinic gains are strictly positive, so the two
        # disclosure policies serve identically
        assert overall_performance(system, data, policy="truthful") == \
            overall_performance(system, data, policy="gain_positive")

    def test_gain_positive_withholds_flat_gains(self, clinic):
        system = clinic["system"]
        data = clinic["bundle"].test
        node = ReportingGroup((0, 1))
        certificates = dict(system.certificates)
        certificates[node] = GainCertificate(
            metric="error", test="mcnemar", n_validation=25, p_value=0.01,
            decision="kept", leaf_risk=0.5, parent_risk=0.5, gain=0.0,
        )
        doctored = replace(system, certificates=certificates)
        assert data_use(doctored, data, policy="gain_positive") < data_use(
            doctored, data, policy="truthful"
        )


# ---------------------------------------------------------------------------
# imputation risk semantics


class TestImputationRisk:
    def test_group_blind_model_scores_zero(self, clinic):
        # ignores the membership entirely: swapping it changes nothing
        assert imputation_risk(clinic["baseline"], clinic["bundle"].test) == 0.0

    def test_never_positive(self, clinic):
        # definition starts from 0 and takes minima
        h = clinic["personalized"]
        assert imputation_risk(h, clinic["bundle"].test) <= 0.0

    def test_single_group_schema(self):
        schema = GroupSchema(("only",), (("a", "b"),))
        rule = fixed_rule_model(
            "r", schema, {(0,): 1.0, (1,): 0.0}, default=0.5,
            required_attributes=frozenset(),
        )
        rng = np.random.default_rng(0)
        d = Dataset(
            schema,
            ("x",),
            rng.normal(size=(20, 1)),
            rng.integers(0, 2, 20),
            np.zeros((20, 1), dtype=np.int64),  # one group present
        )
        assert imputation_risk(rule, d) == 0.0


# ---------------------------------------------------------------------------
# membership imputation


def _cluster_reference(separation=5.0, n_per=40, seed=0) -> Dataset:
    schema = GroupSchema(("cluster",), (("left", "right"),))
    rng = np.random.default_rng(seed)
    left = rng.normal(loc=-separation / 2, size=(n_per, 2))
    right = rng.normal(loc=+separation / 2, size=(n_per, 2))
    features = np.vstack([left, right])
    groups = np.repeat([0, 1], n_per)[:, None]
    labels = rng.integers(0, 2, 2 * n_per)
    return Dataset(schema, ("x0", "x1"), features, labels, groups)


class TestImputeGroups:
    def test_mode_returns_most_common(self, clinic):
        data = clinic["bundle"].test
        out = impute_groups(np.zeros((3, 1)), data, method="mode")
        # (1, 1) holds 27 of 101 rows, the clinic's largest cell
        assert out.tolist() == [[1, 1]] * 3

    def test_mode_tie_breaks_lexicographically(self):
        schema = GroupSchema(("g",), (("a", "b"),))
        d = Dataset(
            schema,
            ("x",),
            np.zeros((4, 1)),
            np.array([0, 1, 0, 1]),
            np.array([[1], [1], [0], [0]]),
        )
        out = impute_groups(np.zeros((1, 1)), d, method="mode")
        assert out.tolist() == [[0]]

    def test_knn_recovers_separated_clusters(self):
        ref = _cluster_reference(separation=5.0)
        rng = np.random.default_rng(1)
        left_queries = rng.normal(loc=-2.5, size=(50, 2))
        right_queries = rng.normal(loc=+2.5, size=(50, 2))
        out_left = impute_groups(left_queries, ref, method="knn")
        out_right = impute_groups(right_queries, ref, method="knn")
        accuracy = (np.concatenate([out_left[:, 0] == 0, out_right[:, 0] == 1])).mean()
        assert accuracy >= 0.95

    def test_knn_deterministic(self):
        ref = _cluster_reference()
        q = np.random.default_rng(2).normal(size=(10, 2))
        a = impute_groups(q, ref, method="knn", k_neighbors=3)
        b = impute_groups(q, ref, method="knn", k_neighbors=3)
        assert np.array_equal(a, b)

    def test_knn_vote_tie_goes_to_nearest(self):
        schema = GroupSchema(("g",), (("a", "b"),))
        ref = Dataset(
            schema,
            ("x",),
            np.array([[0.0], [1.0]]),
            np.array([0, 1]),
            np.array([[0], [1]]),
        )
        out = impute_groups(np.array([[0.1]]), ref, method="knn", k_neighbors=2)
        assert out.tolist() == [[0]]

    def test_single_row_query(self):
        ref = _cluster_reference()
        out = impute_groups(np.array([-2.5, -2.5]), ref, method="knn")
        assert out.shape == (1, 1)

    def test_dataset_query_accepted(self, clinic):
        data = clinic["bundle"].test
        out = impute_groups(data, data, method="mode")
        assert out.shape == (data.n, 2)

    def test_width_mismatch(self, clinic):
        with pytest.raises(ConfigError):
            impute_groups(np.zeros((2, 7)), clinic["bundle"].test)

    def test_unknown_method(self, clinic):
        with pytest.raises(ConfigError):
            impute_groups(np.zeros((1, 1)), clinic["bundle"].test, method="guess")


# ---------------------------------------------------------------------------
# pruning monotonicity in the certification level


ALPHAS_DESCENDING = (0.5, 0.2, 0.1, 0.02, 0.005)


@pytest.fixture(scope="module")
def ladder():
    d = random_task(n=900, k=2, seed=17)
    bundle = split_dataset(d, 0.25, 0.25, seed=0)
    pool = build_pool(bundle.assign, classes=("logistic",), seed=0)
    systems = [
        learn_systems(bundle, pool, kinds=("minimal",), metric=ERROR, alpha=a, seed=0)[0]
        for a in ALPHAS_DESCENDING
    ]
    return bundle, systems


class TestAlphaMonotonicity:
    def test_survivors_shrink_as_alpha_drops(self, ladder):
        _, systems = ladder
        for looser, stricter in zip(systems, systems[1:]):
            assert stricter.survivors <= looser.survivors

    def test_options_pruned_never_decreases_as_alpha_drops(self, ladder):
        _, systems = ladder
        fractions = [options_pruned(s) for s in systems]
        assert fractions == sorted(fractions)

    def test_data_use_never_increases_as_alpha_drops(self, ladder):
        bundle, systems = ladder
        uses = [data_use(s, bundle.test) for s in systems]
        assert uses == sorted(uses, reverse=True)


# ---------------------------------------------------------------------------
# report files


class TestReportFiles:
    def test_save_json(self, clinic, tmp_path):
        report = evaluate_system(clinic["system"], clinic["bundle"].test, seed=0)
        path = tmp_path / "report.json"
        report.save_json(path)
        doc = json.loads(path.read_text())
        assert doc["overall_risk"] == 0.0
        assert doc["n_rationality_violations"] == 0
        assert len(doc["groups"]) == 4
        assert doc["groups"][0]["label"]

    def test_save_group_csv(self, clinic, tmp_path):
        report = evaluate_system(clinic["system"], clinic["bundle"].test, seed=0)
        path = tmp_path / "groups.csv"
        report.save_group_csv(path)
        with path.open() as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 4
        by_label = {r["group"]: r for r in rows}
        served = by_label["sex=female, age_group=young"]
        assert served["n"] == "25"
        assert float(served["risk_system"]) == 0.0
        assert served["violation"] == "0"
