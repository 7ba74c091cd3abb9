import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import special, stats

from scenery_lab import (
    DistributionSpec,
    InvalidParameterError,
    RngStream,
    StableParams,
    UnknownDistributionError,
    UnsupportedSkewError,
    catalog,
    stable_cf,
    stable_density,
    stable_sample,
)
from scenery_lab.stable import _sample_zipf, span_from_support

GAUSS = StableParams(2.0, 1.0, 0.0)
CAUCHY = StableParams(1.0, 1.0, 0.0)


def gauss_density(x):
    # index 2 with scale 1 is N(0, 2)
    return np.exp(-np.asarray(x) ** 2 / 4.0) / (2.0 * math.sqrt(math.pi))


def cauchy_density(x):
    return 1.0 / (math.pi * (1.0 + np.asarray(x) ** 2))


class TestCf:
    def test_at_zero(self):
        assert stable_cf(0.0, GAUSS) == 1.0 + 0.0j
        assert stable_cf(0.0, StableParams(0.7, 2.0, 0.3)) == 1.0 + 0.0j

    def test_direct_formula(self):
        assert stable_cf(1.0, GAUSS) == pytest.approx(math.exp(-1.0))

    def test_hermitian_symmetry(self):
        for u in (0.3, 1.7, 9.2):
            assert stable_cf(-u, GAUSS) == np.conj(stable_cf(u, GAUSS))

    def test_modulus(self):
        p = StableParams(1.3, 0.8, 0.2)
        u = np.array([-4.0, -0.5, 0.0, 0.5, 4.0])
        mod = np.abs(stable_cf(u, p))
        assert np.allclose(mod, np.exp(-0.8 * np.abs(u) ** 1.3), atol=1e-14)
        assert np.all((mod < 1.0) | (u == 0.0))

    def test_invalid_params(self):
        with pytest.raises(InvalidParameterError):
            StableParams(2.5, 1.0)
        with pytest.raises(InvalidParameterError):
            StableParams(1.5, -1.0)
        with pytest.raises(InvalidParameterError):
            StableParams(1.0, 1.0, 0.5)  # skew banned at index 1
        with pytest.raises(InvalidParameterError):
            StableParams(0.5, 1.0, 10.0)  # skew bound


class TestDensity:
    def test_gaussian_point(self):
        assert stable_density(0.0, GAUSS, 1e-10) == pytest.approx(
            1.0 / (2.0 * math.sqrt(math.pi)), abs=1e-10
        )

    def test_cauchy_point(self):
        assert stable_density(0.0, CAUCHY, 1e-10) == pytest.approx(
            1.0 / math.pi, abs=1e-10
        )

    def test_gaussian_grid(self):
        xs = np.arange(-3.0, 3.0 + 1e-9, 0.25)
        dens = stable_density(xs, GAUSS, 1e-10)
        assert np.max(np.abs(dens - gauss_density(xs))) <= 1e-8

    def test_cauchy_grid(self):
        xs = np.arange(-3.0, 3.0 + 1e-9, 0.25)
        dens = stable_density(xs, CAUCHY, 1e-10)
        assert np.max(np.abs(dens - cauchy_density(xs))) <= 1e-8

    def test_symmetry(self):
        p = StableParams(1.4, 0.7, 0.0)
        xs = np.array([0.3, 1.1, 2.6])
        assert np.allclose(
            stable_density(xs, p, 1e-10), stable_density(-xs, p, 1e-10), atol=1e-12
        )

    def test_nonnegative_and_rough_mass(self):
        p = StableParams(1.5, 1.0, 0.0)
        xs = np.linspace(-40, 40, 4001)
        dens = stable_density(xs, p, 1e-9)
        assert dens.min() >= -1e-9
        mass = np.trapezoid(dens, xs)
        assert mass == pytest.approx(1.0, abs=2e-3)  # heavy tail beyond the box


class TestSampling:
    def test_gaussian_variance(self):
        x = stable_sample(GAUSS, RngStream(101), 10**6)
        assert x.var() == pytest.approx(2.0, abs=0.02)

    def test_cauchy_ks(self):
        x = stable_sample(CAUCHY, RngStream(102), 10**6)
        assert stats.kstest(x, stats.cauchy.cdf).statistic < 0.002

    def test_determinism(self):
        a = stable_sample(StableParams(1.7, 1.0), RngStream(7, 3), 100)
        b = stable_sample(StableParams(1.7, 1.0), RngStream(7, 3), 100)
        assert np.array_equal(a, b)
        c = stable_sample(StableParams(1.7, 1.0), RngStream(7, 4), 100)
        assert not np.array_equal(a, c)

    def test_skew_rejected(self):
        with pytest.raises(UnsupportedSkewError):
            stable_sample(StableParams(0.5, 1.0, 0.3), RngStream(1))

    def test_general_index_matches_density(self):
        # histogram of samples against the inverted density
        p = StableParams(1.5, 1.0, 0.0)
        x = stable_sample(p, RngStream(103), 200_000)
        edges = np.linspace(-4, 4, 33)
        counts, _ = np.histogram(x, bins=edges)
        centers = 0.5 * (edges[1:] + edges[:-1])
        expected = stable_density(centers, p, 1e-9) * (edges[1] - edges[0]) * len(x)
        keep = expected > 50
        chi2 = float(((counts[keep] - expected[keep]) ** 2 / expected[keep]).sum())
        assert stats.chi2.sf(chi2, int(keep.sum()) - 1) > 1e-4


class TestCatalog:
    def test_rademacher(self):
        d = catalog("rademacher")
        assert d.declared_span == 2
        assert d.attraction.index == 2.0
        assert sum(p for _, p in d.support) == 1

    def test_lazy_uniform(self):
        d = catalog("lazy-uniform")
        assert d.declared_span == 1
        assert [v for v, _ in d.support] == [-1, 0, 1]

    def test_zeta_tail_mass_certificate(self):
        # partial sum plus an independently computed tail must bracket 1
        d = catalog("zeta-tail(0.5)")
        assert d.attraction.index == 0.5
        k = np.arange(1, 10**6 + 1, dtype=float)
        norm = 2.0 * special.zeta(1.5, 1)
        partial = 2.0 * float(np.sum(k**-1.5)) / norm
        tail = 2.0 * float(special.zeta(1.5, 10**6 + 1)) / norm
        assert abs(partial + tail - 1.0) <= 1e-12

    def test_zeta_pmf_and_span(self):
        d = catalog("zeta-tail(0.5)")
        assert d.declared_span == 1
        norm = 2.0 * special.zeta(1.5, 1)
        assert d.pmf(3) == pytest.approx(3.0**-1.5 / norm, rel=1e-12)
        assert d.pmf(0) == 0.0

    def test_centered_geometric(self):
        d = catalog("centered-geometric")
        values, probs, tail = d.truncated(1e-12)
        assert tail <= 1e-12
        assert abs(probs.sum() + tail - 1.0) <= 1e-12
        assert d.pmf(0) == pytest.approx(1.0 / 3.0)
        x = d.sample(RngStream(5).generator(), 200_000)
        assert x.mean() == pytest.approx(0.0, abs=0.02)
        assert x.var() == pytest.approx(4.0, abs=0.06)

    def test_gaussian_is_continuous(self):
        d = catalog("gaussian")
        assert not d.is_lattice
        x = d.sample(RngStream(6).generator(), 10**5)
        assert x.var() == pytest.approx(1.0, abs=0.02)

    def test_unknown(self):
        with pytest.raises(UnknownDistributionError):
            catalog("triangular")
        with pytest.raises(UnknownDistributionError):
            catalog("zeta-tail(1.0)")

    def test_span_recompute(self):
        for name in ("rademacher", "lazy-uniform"):
            d = catalog(name)
            assert span_from_support(v for v, _ in d.support) == d.declared_span

    def test_attraction_tail_constant(self):
        # 1 - Re cf(u) ~ scale * u^index for the heavy-tail entry, checked by
        # direct summation of the cosine series at u = 0.04 (truncation bound
        # ~0.15% of the value at 5e6 terms; asymptotic gap ~0.2% there)
        d = catalog("zeta-tail(0.5)")
        u = 0.04
        norm = special.zeta(1.5, 1)
        s = 0.0
        for lo in range(1, 5 * 10**6 + 1, 10**6):
            k = np.arange(lo, min(lo + 10**6, 5 * 10**6 + 1), dtype=float)
            s += float(np.sum((1.0 - np.cos(u * k)) * k**-1.5))
        est = s / norm / u**0.5
        assert est == pytest.approx(d.attraction.scale, rel=0.02)


class TestZipfSampler:
    def test_exact_head_probabilities(self):
        gen = RngStream(11).generator()
        z = _sample_zipf(gen, 1.5, 10**6)
        norm = special.zeta(1.5, 1)
        ks = np.arange(1, 10)
        obs = np.array([(z == k).sum() for k in ks])
        exp = 10**6 * ks**-1.5 / norm
        tail_obs = (z >= 10).sum()
        tail_exp = 10**6 * special.zeta(1.5, 10) / norm
        chi2 = float(
            ((obs - exp) ** 2 / exp).sum() + (tail_obs - tail_exp) ** 2 / tail_exp
        )
        assert stats.chi2.sf(chi2, 9) > 1e-4

    def test_general_exponent(self):
        gen = RngStream(12).generator()
        z = _sample_zipf(gen, 2.6, 10**5)
        norm = special.zeta(2.6, 1)
        assert (z == 1).mean() == pytest.approx(1.0 / norm, abs=0.005)

    def test_values_positive(self):
        z = _sample_zipf(RngStream(13).generator(), 1.5, 10**4)
        assert z.min() >= 1


def test_custom_spec_validation():
    with pytest.raises(InvalidParameterError):
        DistributionSpec(
            name="bad",
            kind="lattice-pmf",
            attraction=GAUSS,
            support=((0, Fraction(1, 2)),),
            declared_span=1,
        )
    with pytest.raises(InvalidParameterError):
        DistributionSpec(
            name="bad-span",
            kind="lattice-pmf",
            attraction=GAUSS,
            support=((-1, Fraction(1, 2)), (1, Fraction(1, 2))),
            declared_span=1,
        )
