"""End-to-end classification protocol."""

import numpy as np
import pytest

from stablebelief import pipeline, presets
from stablebelief.errors import ConfigError, GateFailure, InsufficientDataError, InvalidParameterError
from stablebelief.pipeline import REJECT, ClassModel, Dataset
from stablebelief.stable import GaussianParams, StableParams


def gauss3(n=3000, seed=0):
    cfg = presets.preset("gauss3")
    cfg["generator"]["nPerClass"] = n
    return cfg, pipeline.dataset_from_config(cfg, seed)


class TestSplit:
    def test_exact_count(self):
        _, d = gauss3()
        learn, test = pipeline.split(d, 1 / 3, 0)
        assert len(learn) == 3000 and len(test) == 6000

    def test_deterministic(self):
        _, d = gauss3(300)
        a, _ = pipeline.split(d, 1 / 3, 4)
        b, _ = pipeline.split(d, 1 / 3, 4)
        np.testing.assert_array_equal(a.features, b.features)

    def test_class_proportions(self):
        _, d = gauss3()
        learn, _ = pipeline.split(d, 1 / 3, 1)
        props = np.bincount(learn.labels) / len(learn)
        np.testing.assert_allclose(props, 1 / 3, atol=0.03)

    def test_invalid(self):
        _, d = gauss3(100)
        with pytest.raises(InvalidParameterError):
            pipeline.split(d, 1.0, 0)


class TestDataset:
    def test_validation(self):
        with pytest.raises(InvalidParameterError):
            Dataset(np.zeros((3, 2)), [0, 1])
        with pytest.raises(InvalidParameterError):
            Dataset([[np.nan, 0]], [0])
        with pytest.raises(InvalidParameterError):
            Dataset(np.zeros((2, 2)), [0, 5])
        with pytest.raises(InvalidParameterError):
            Dataset(np.zeros((2, 3)), [0, 1])


class TestFit:
    def test_priors_and_kinds(self):
        _, d = gauss3(600)
        learn, _ = pipeline.split(d, 0.5, 0)
        ms = pipeline.fit_models(learn, "stable", "PerFeature1D")
        assert sum(m.prior for m in ms) == pytest.approx(1.0)
        assert all(isinstance(p, StableParams) for m in ms for p in m.perFeature1D)
        ms = pipeline.fit_models(learn, "gmm", "Joint2D", gmmComponents=2)
        assert all(m.joint2D.weights.size == 2 for m in ms)

    def test_error_names_class(self):
        X = np.vstack([np.random.default_rng(0).normal(size=(300, 1)), np.zeros((5, 1))])
        d = Dataset(X, [0] * 300 + [1] * 5, ("f1",), ("A", "B"))
        with pytest.raises(InsufficientDataError, match="class B"):
            pipeline.fit_models(d, "stable", "PerFeature1D")

    def test_unknown_family(self):
        _, d = gauss3(100)
        with pytest.raises(ConfigError):
            pipeline.fit_models(d, "weibull", "PerFeature1D")


def one_d_models(*laws, priors=None):
    n = len(laws)
    pri = priors or [1 / n] * n
    return [ClassModel(f"C{i + 1}", pri[i], [law]) for i, law in enumerate(laws)]


class TestClassify:
    def test_mode_far_from_others(self):
        ms = one_d_models(StableParams(1.5, 0, 1, 0), StableParams(1.5, 0, 1, 8), StableParams(1.5, 0, 1, 16))
        out = pipeline.classify_belief(ms, [[0.0]], "PerFeature1D")
        assert out.decisions[0] == 0
        assert out.plausibilities[0, 0, 0] == 1.0

    def test_midpoint_boundary(self):
        ms = one_d_models(GaussianParams(0, 1), GaussianParams(4, 1))
        x = np.array([[2 - 1e-3], [2 + 1e-3]])
        np.testing.assert_array_equal(pipeline.classify_belief(ms, x, "PerFeature1D").decisions, [0, 1])
        sweep = np.linspace(-1, 5, 601)[:, None]
        dec = pipeline.classify_belief(ms, sweep, "PerFeature1D").decisions
        assert np.all(dec == (sweep[:, 0] > 2))

    def test_aircraft_commercial(self):
        ms = one_d_models(*presets.AIRCRAFT.values())
        assert pipeline.classify_belief(ms, [[722.5]], "PerFeature1D").decisions[0] == 0

    def test_total_conflict_rejects(self):
        ms = one_d_models(GaussianParams(0, 1), GaussianParams(4, 1))
        out = pipeline.classify_belief(ms, [[1e4]], "PerFeature1D")
        assert out.decisions[0] == REJECT and np.all(np.isnan(out.betP[0]))
        out = pipeline.classify_belief(ms, [[1e4]], "PerFeature1D", rejectFallback=True)
        np.testing.assert_allclose(out.betP[0], [0.5, 0.5])

    def test_bayes_tie_and_scale(self):
        ms = one_d_models(GaussianParams(0, 1), GaussianParams(0, 1))
        dec, post = pipeline.classify_bayes(ms, [[0.3]], "PerFeature1D")
        assert dec[0] == 0 and post[0] == pytest.approx([0.5, 0.5])
        ms = one_d_models(GaussianParams(0, 1), GaussianParams(1, 2))
        x = np.linspace(-4, 4, 33)[:, None]
        a, pa = pipeline.classify_bayes(ms, x, "PerFeature1D", priors=[0.2, 0.8])
        b, pb = pipeline.classify_bayes(ms, x, "PerFeature1D", priors=[2.0, 8.0])
        np.testing.assert_array_equal(a, b)
        np.testing.assert_allclose(pa, pb)

    def test_belief_order_independent(self):
        cfg, d = gauss3(600)
        learn, test = pipeline.split(d, 0.5, 0)
        ms = pipeline.fit_models(learn, "stable", "PerFeature1D")
        full = pipeline.classify_belief(ms, test.features, "PerFeature1D").decisions
        perm = np.random.default_rng(0).permutation(len(test))
        part = pipeline.classify_belief(ms, test.features[perm], "PerFeature1D").decisions
        np.testing.assert_array_equal(full[perm], part)


def test_wilson():
    # reference values from standard binomial tables
    np.testing.assert_allclose(pipeline.wilson(50, 100), (40.383, 59.617), atol=1e-3)
    np.testing.assert_allclose(pipeline.wilson(8, 10), (49.016, 94.332), atol=1e-3)
    lo, hi = pipeline.wilson(0, 10)
    assert lo == pytest.approx(0.0, abs=1e-12) and hi > 0


def test_config_hash_canonical():
    a = {"x": 1, "y": [1, 2]}
    b = {"y": [1, 2], "x": 1}
    assert pipeline.config_hash(a) == pipeline.config_hash(b)
    assert len(pipeline.config_hash(a)) == 12


@pytest.fixture(scope="module")
def result():
    cfg, _ = gauss3()
    return pipeline.run_experiment(cfg, 0)


class TestExperiment:
    def test_invariants(self, result):
        for r in result["_objects"]:
            assert r.confusion.sum() + r.rejected == r.nTest == result["nTest"]
            assert r.ci95[0] < r.accuracy < r.ci95[1]
        assert result["nLearn"] == 3000
        assert result["nTest"] + result["outsideWindow"] == 6000

    @pytest.mark.parametrize("mode", ["PerFeature1D", "Joint2D"])
    def test_belief_bayes_overlap(self, mode):
        cfg, d = gauss3()
        learn, test = pipeline.split(d, 1 / 3, 0)
        ms = pipeline.fit_models(learn, "gaussian", mode)
        a = pipeline.classify_belief(ms, test.features, mode).decisions
        b, _ = pipeline.classify_bayes(ms, test.features, mode)
        assert np.mean(a == b) >= 0.95

    def test_joint_gaussian_belief_is_nearest_mahalanobis(self):
        # explains the Joint2D overlap: Bayes also weighs log|cov| and priors
        cfg, d = gauss3()
        learn, test = pipeline.split(d, 1 / 3, 0)
        ms = pipeline.fit_models(learn, "gaussian", "Joint2D")
        a = pipeline.classify_belief(ms, test.features, "Joint2D").decisions
        M = np.stack([m.joint2D.mahalanobis2(test.features) for m in ms], axis=1)
        np.testing.assert_array_equal(a, M.argmin(axis=1))

    def test_joint_matches_per_feature_on_independent_data(self):
        rng = np.random.default_rng(3)
        means = [(0, 0), (2, 1), (-1, 2)]
        X = np.vstack([rng.normal(m, (1.0, 1.5), (1500, 2)) for m in means])
        d = Dataset(X, np.repeat([0, 1, 2], 1500))
        learn, test = pipeline.split(d, 1 / 3, 0)
        dec = {}
        for mode in ("PerFeature1D", "Joint2D"):
            ms = pipeline.fit_models(learn, "gaussian", mode)
            dec[mode] = pipeline.classify_belief(ms, test.features, mode).decisions
        assert np.mean(dec["PerFeature1D"] == dec["Joint2D"]) >= 0.90

    def test_relabel_equivariance(self):
        cfg, d = gauss3(1000)
        perm = np.array([2, 0, 1])
        d2 = Dataset(d.features, perm[d.labels], d.featureNames, tuple(np.array(d.classNames)[np.argsort(perm)]))
        accs = []
        for data in (d, d2):
            res = pipeline.run_experiment(cfg, 0, data=data)
            accs.append([r["accuracy"] for r in res["results"]])
        np.testing.assert_allclose(accs[0], accs[1], atol=1e-9)

    def test_gate_enforced(self):
        cfg = presets.preset("stable3")
        cfg["generator"]["nPerClass"] = 1500
        cfg["models"] = {"family": "gaussian", "dimensionMode": "PerFeature1D"}
        with pytest.raises(GateFailure) as info:
            pipeline.run_experiment(cfg, 0)
        assert any(not r.passAt5pct for r in info.value.reports)
        cfg["models"]["gate"] = "skip"
        res = pipeline.run_experiment(cfg, 0)
        assert res["results"][0]["classifier"] == "none"

    def test_forced_priors_reported(self):
        cfg, _ = gauss3(600)
        cfg["models"] = {"family": "gaussian", "dimensionMode": "PerFeature1D", "priors": [0.2, 0.6, 0.2]}
        res = pipeline.run_experiment(cfg, 0)
        assert [r["classifier"] for r in res["results"]] == ["belief", "bayes", "bayes_forced_priors"]

    def test_bad_gate_mode(self):
        cfg, _ = gauss3(100)
        cfg["models"]["gate"] = "maybe"
        with pytest.raises(ConfigError):
            pipeline.run_experiment(cfg, 0)


def test_generate_mode_keeps_window():
    cfg = presets.preset("stable3")
    cfg["generator"].update(nPerClass=500, windowMode="generate")
    d = pipeline.dataset_from_config(cfg, 1)
    assert len(d) == 1500 and np.all(presets.in_window(d.features, presets.WINDOW))
    with pytest.raises(ConfigError):
        presets.generate({**cfg["generator"], "windowMode": "crop"}, 0)
