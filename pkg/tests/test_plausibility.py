"""Least-commitment plausibility functions against the min-integral identity."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from scipy import integrate
from scipy.optimize import brentq
from scipy.stats import chi2

from stablebelief import belief, bivariate, plausibility, stable
from stablebelief.bivariate import SpectralStable2D, TabulatedPdf2D
from stablebelief.errors import FlatDensityError, InvalidParameterError
from stablebelief.gmm import GmmModel, MvGaussian
from stablebelief.plausibility import PlausibilitySource
from stablebelief.presets import STABLE3_CLASSES, class_law
from stablebelief.stable import GaussianParams, StableParams


def _pdf(p, t):
    if isinstance(p, GaussianParams):
        return math.exp(-0.5 * ((t - p.mu) / p.sigma) ** 2) / (math.sqrt(2 * math.pi) * p.sigma)
    return float(stable.pdf(p, t))


def min_integral(p, x):
    """Quadrature of min(f(t), f(x)) with the conjugate point found by bracketing."""
    mu = p.mu if isinstance(p, GaussianParams) else stable.mode(p)
    scale = p.sigma if isinstance(p, GaussianParams) else p.gamma
    level = _pdf(p, x)
    side = -1 if x > mu else 1
    far = mu + side * 60 * scale
    while _pdf(p, far) > level:
        far = mu + 2 * (far - mu)
    c = brentq(lambda t: _pdf(p, t) - level, min(mu, far), max(mu, far), xtol=1e-13)
    lo, hi = sorted((x, c))
    f = lambda t: min(_pdf(p, t), level)
    tails = sum(integrate.quad(f, a, b, limit=400, epsabs=1e-11)[0]
                for a, b in ((-np.inf, lo - 50 * scale), (lo - 50 * scale, lo),
                             (hi, hi + 50 * scale), (hi + 50 * scale, np.inf)))
    return tails + (hi - lo) * level


def std_gaussian_grid(res=256):
    # weights 1/2 on the axes give identity covariance
    return bivariate.pdf_grid(SpectralStable2D(2.0, (0.5, 0.5), (0, math.pi / 2)), resolution=res)


class TestOneDimensional:
    def test_symmetric_mode(self):
        for p in (StableParams(1.5, 0, 2, 1), GaussianParams(1, 2)):
            assert plausibility.pl_symmetric_1d(p, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_symmetric_rejects_skewed(self):
        with pytest.raises(InvalidParameterError):
            plausibility.pl_symmetric_1d(StableParams(1.5, 0.5), 0.0)

    def test_gaussian_chi2(self):
        x = np.linspace(-6, 6, 61)
        want = chi2.sf(x * x, 3)
        np.testing.assert_allclose(plausibility.pl_1d(GaussianParams(0, 1), x), want, atol=1e-8)
        # the same law as S0(2, 0, 1/sqrt 2, 0)
        np.testing.assert_allclose(plausibility.pl_1d(StableParams(2, 0, 1 / math.sqrt(2)), x), want, atol=1e-8)
        g = MvGaussian([0.0], [[1.0]])
        np.testing.assert_allclose(plausibility.pl_gaussian_mv(g, x[:, None]), want, atol=1e-8)

    def test_asymmetric_equals_symmetric_on_symmetric_laws(self):
        x = np.linspace(-8, 10, 37)
        for p in (StableParams(1.5, 0, 1.2, 1), StableParams(0.9, 0), StableParams(1.0, 0, 2, -1)):
            np.testing.assert_allclose(plausibility.pl_asymmetric_1d(p, x), plausibility.pl_symmetric_1d(p, x),
                                       atol=1e-8)

    def test_cauchy_oracle(self):
        p = StableParams(1, 0)
        assert plausibility.pl_1d(p, 1.0) == pytest.approx(min_integral(p, 1.0), abs=1e-4)

    def test_skewed_oracle(self):
        p = StableParams(1.5, 0.8)
        y = stable.mode(p) + 2
        assert plausibility.pl_asymmetric_1d(p, y) == pytest.approx(min_integral(p, y), abs=1e-4)

    def test_at_mode(self):
        p = StableParams(1.3, -0.7, 2, 1)
        assert plausibility.pl_asymmetric_1d(p, stable.mode(p)) == 1.0

    def test_conjugate_point(self):
        p = StableParams(1.3, 0.7, 1.5, 0.5)
        y = np.array([-3.0, 2.0, 6.0])
        c = plausibility.conjugate_point(p, y)
        np.testing.assert_allclose(stable.pdf(p, c), stable.pdf(p, y), rtol=1e-8)
        m = stable.mode(p)
        assert np.all(np.sign(c - m) == -np.sign(y - m))

    def test_monotone_in_density(self, rng):
        p = StableParams(1.2, 0.9)
        x = rng.uniform(-10, 10, 60)
        f, pl = stable.pdf(p, x), plausibility.pl_1d(p, x)
        o = np.argsort(f)
        assert np.all(np.diff(pl[o]) >= -1e-9)

    def test_consonance(self, rng):
        # point plausibility of a consonant function: pl(I) = max over I, so nested intervals nest
        p = StableParams(1.6, 0.4)
        grid = np.linspace(-6, 6, 241)
        pl = plausibility.pl_1d(p, grid)
        for _ in range(50):
            a, b = sorted(rng.integers(0, 241, 2))
            c, d = sorted(rng.integers(a, b + 1, 2))
            assert pl[a:b + 1].max() >= pl[c:d + 1].max()


def _random_laws():
    rng = np.random.default_rng(2024)
    laws = []
    for i in range(20):
        if i % 4 == 3:
            laws.append(GaussianParams(rng.uniform(-3, 3), rng.uniform(0.5, 3)))
        else:
            b = 0.0 if i % 4 == 0 else rng.uniform(-1, 1)
            laws.append(StableParams(rng.uniform(0.8, 2.0), b, rng.uniform(0.5, 3), rng.uniform(-3, 3)))
    return laws


@pytest.mark.slow
@pytest.mark.parametrize("law", _random_laws(), ids=lambda p: repr(p))
def test_min_integral_identity_1d(law):
    rng = np.random.default_rng(abs(hash(repr(law))) % 2 ** 32)
    scale = law.sigma if isinstance(law, GaussianParams) else law.gamma
    centre = law.mu if isinstance(law, GaussianParams) else law.delta
    for x in centre + scale * rng.uniform(-6, 6, 10):
        assert plausibility.pl_1d(law, x) == pytest.approx(min_integral(law, x), abs=1e-4)


class TestMultivariate:
    def test_gaussian_examples(self):
        g = MvGaussian([1, 2], [[2, 0.3], [0.3, 1]])
        assert plausibility.pl_gaussian_mv(g, [1.0, 2.0]) == pytest.approx(1.0)
        e = MvGaussian([0, 0], np.eye(2))
        x = [math.sqrt(9.4877), 0.0]
        assert plausibility.pl_gaussian_mv(e, x) == pytest.approx(chi2.sf(9.4877, 4), abs=1e-12)
        assert plausibility.pl_gaussian_mv(e, x) == pytest.approx(0.05, abs=1e-4)

    def test_gmm(self, rng):
        a, b = MvGaussian([0, 0], np.eye(2)), MvGaussian([3, 1], [[2, 0.5], [0.5, 1]])
        x = rng.normal(size=(10, 2))
        np.testing.assert_allclose(plausibility.pl_gmm_mv(GmmModel([1.0], (a,)), x),
                                   plausibility.pl_gaussian_mv(a, x))
        assert plausibility.pl_gmm_mv(GmmModel([1.0, 0.0], (b, a)), [3.0, 1.0]) == pytest.approx(1.0)
        np.testing.assert_allclose(plausibility.pl_gmm_mv(GmmModel([0.5, 0.5], (a, b)), x),
                                   0.5 * (plausibility.pl_gaussian_mv(a, x) + plausibility.pl_gaussian_mv(b, x)))


class TestCutTable:
    def test_gaussian_grid_chi2(self):
        g = std_gaussian_grid()
        table = plausibility.build_cut_table(g)
        for r in (0.5, 1.0, 2.0):
            level = math.exp(-r * r / 2) / (2 * math.pi)
            assert table.pl_at_level(level) == pytest.approx(chi2.sf(r * r, 4), abs=2e-2)

    def test_gaussian_grid_points(self, rng):
        g = std_gaussian_grid()
        src = PlausibilitySource(g)
        x = rng.uniform(-3.5, 3.5, (200, 2))
        np.testing.assert_allclose(src.pl(x), plausibility.pl_gaussian_mv(MvGaussian([0, 0], np.eye(2)), x),
                                   atol=2e-2)

    def test_min_integral_2d(self, rng):
        g = bivariate.pdf_grid(class_law("stable2d", STABLE3_CLASSES[1]), resolution=256)
        table = plausibility.build_cut_table(g)
        for x in rng.uniform(-3, 3, (20, 2)):
            level = g.density(x)[0]
            want = plausibility.min_integral_2d(g, level, table.norm)
            assert plausibility.pl_alphacut_2d(table, g, x) == pytest.approx(want, abs=2e-2)

    def test_table_law_monotone(self):
        g = bivariate.pdf_grid(class_law("stable2d", STABLE3_CLASSES[0]))
        t = plausibility.build_cut_table(g)
        assert np.all(np.diff(t.levels) < 0)
        assert np.all(np.diff(t.cumulativePl) <= 1e-15)
        assert np.all(np.diff(t.volumes) >= 0)
        assert t.cumulativePl.max() <= 1 + 1e-3
        assert len(t.levels) >= 256

    def test_argmax_and_far(self):
        g = bivariate.pdf_grid(class_law("stable2d", STABLE3_CLASSES[0]))
        src = PlausibilitySource(g)
        assert src.pl(np.array(g.argmax())) >= 1 - 2e-2
        assert src.pl([50.0, 50.0]) <= 1e-6

    def test_flat_density(self):
        xs = ys = np.linspace(-3.9, 3.9, 128)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        disk = np.where(X ** 2 + Y ** 2 <= 4, 1 / (4 * math.pi), 0.0)
        with pytest.raises(FlatDensityError):
            plausibility.build_cut_table(TabulatedPdf2D(xs, ys, disk, (xs[1] - xs[0]) ** 2))

    def test_too_few_levels(self):
        with pytest.raises(InvalidParameterError):
            plausibility.build_cut_table(std_gaussian_grid(128), nLevels=10)


class TestGbtAndSource:
    @given(arrays(float, 3, elements=st.floats(-0.5, 1.5)))
    def test_gbt_valid_mass(self, pls):
        m = plausibility.gbt_mass(np.clip(pls, 0, 1), belief.Frame(("a", "b", "c")))
        assert np.all(m.dense >= 0) and m.dense.sum() == pytest.approx(1.0, abs=1e-12)

    def test_kinds(self):
        assert PlausibilitySource(StableParams(1.5, 0)).kind == "Symmetric1D"
        assert PlausibilitySource(StableParams(2.0, 0.5)).kind == "Symmetric1D"
        assert PlausibilitySource(StableParams(1.5, 0.5)).kind == "Asymmetric1D"
        assert PlausibilitySource(GaussianParams(0, 1)).kind == "Symmetric1D"
        assert PlausibilitySource(MvGaussian([0, 0], np.eye(2))).kind == "GaussianMv"
        assert PlausibilitySource(std_gaussian_grid(128)).kind == "AlphaCut2D"
        with pytest.raises(InvalidParameterError):
            PlausibilitySource("nope")

    def test_mode_cached(self):
        p = StableParams(1.3, 0.8, 2, 1)
        assert PlausibilitySource(p).mode == pytest.approx(stable.mode(p))
