"""Adaptive band selection: growth estimation and the four variants."""

import math

import numpy as np
import pytest

from akhiezer.adapt import (
    AdaptConfig,
    adapt_bisection,
    adapt_one_at_a_time,
    adapt_rayleigh,
    growth_rate,
    symmetric_simple_adapt,
)
from akhiezer.bands import BandSystem
from akhiezer.greens import build_greens, re_g
from akhiezer.iterate import akhiezer_solve
from akhiezer.linops import gen_perturbed, gen_uniform_diag
from akhiezer.sources import ClosedFormSource

SAAD_BANDS = BandSystem.from_endpoints([-2, -0.5, 0.5, 6])


class TestGrowthRate:
    def test_contained_spectrum_bounded(self):
        A = gen_uniform_diag(200, SAAD_BANDS)
        b = np.random.default_rng(0).standard_normal(200)
        r = growth_rate(A, b, SAAD_BANDS, ClosedFormSource, 20, 10)
        assert 0.8 <= r <= 1.2

    def test_outside_eigenvalue_rate(self):
        lam = np.append(np.linspace(0.5, 6, 199), 7.0)
        A = gen_uniform_diag(200, SAAD_BANDS, counts=None)
        import numpy as _np

        A = type(A).from_dense(_np.diag(_np.sort(_np.append(
            _np.linspace(0.5, 6, 150), _np.append(_np.linspace(-2, -0.5, 49), 7.0)
        ))))
        b = np.random.default_rng(1).standard_normal(200)
        r = growth_rate(A, b, SAAD_BANDS, ClosedFormSource, 40, 20)
        ev = build_greens(SAAD_BANDS)
        target = math.exp(re_g(ev, 7.0))
        assert abs(r - target) < 0.05 * target

    def test_invisible_direction(self):
        # b orthogonal to the offending eigenvector: growth invisible
        d = np.sort(np.append(np.linspace(0.5, 6, 150),
                              np.append(np.linspace(-2, -0.5, 49), 7.0)))
        A = gen_uniform_diag(200, SAAD_BANDS)
        A = type(A).from_dense(np.diag(d))
        b = np.random.default_rng(2).standard_normal(200)
        b[np.argmax(d)] = 0.0
        r = growth_rate(A, b, SAAD_BANDS, ClosedFormSource, 40, 20)
        assert r < 1.1

    def test_bad_window(self):
        A = gen_uniform_diag(20, SAAD_BANDS)
        with pytest.raises(ValueError):
            growth_rate(A, np.ones(20), SAAD_BANDS, ClosedFormSource, 0, 10)


class TestBisection:
    def test_contained_spectrum_unchanged(self):
        inner = BandSystem.from_endpoints([-1.8, -0.6, 0.6, 5.4])
        A = gen_uniform_diag(150, inner)
        b = np.random.default_rng(3).standard_normal(150)
        out = adapt_bisection(A, b, SAAD_BANDS, AdaptConfig(), ClosedFormSource)
        assert out is SAAD_BANDS

    def test_containment_of_known_spectrum(self):
        wide = BandSystem.from_endpoints([-3, -0.4, 0.4, 8])
        A = gen_uniform_diag(150, wide)
        b = np.random.default_rng(4).standard_normal(150)
        out = adapt_bisection(
            A, b, BandSystem.from_endpoints([-2, -0.5, 0.5, 6]),
            AdaptConfig(), ClosedFormSource,
        )
        d = np.diag(A.to_dense())
        gap_lo, gap_hi = out.bands[0][1], out.bands[1][0]
        assert out.endpoints[0] <= d.min()
        assert out.endpoints[-1] >= d.max()
        assert not np.any((d > gap_lo) & (d < gap_hi))

    def test_bad_initial_bands(self):
        A = gen_uniform_diag(20, SAAD_BANDS)
        with pytest.raises(ValueError):
            adapt_bisection(
                A, np.ones(20), BandSystem.from_endpoints([1, 2, 3, 4]),
                AdaptConfig(), ClosedFormSource,
            )


class TestOneAtATime:
    def test_contained_spectrum_unchanged(self):
        inner = BandSystem.from_endpoints([-1.8, -0.6, 0.6, 5.4])
        A = gen_uniform_diag(150, inner)
        b = np.random.default_rng(5).standard_normal(150)
        out = adapt_one_at_a_time(A, b, SAAD_BANDS, AdaptConfig(), ClosedFormSource)
        assert tuple(out.endpoints) == tuple(SAAD_BANDS.endpoints)

    def test_rate_no_worse_than_bisection(self):
        from akhiezer.linops import bvp_system

        op, rhs, _, _ = bvp_system(100)
        bands0 = BandSystem.from_endpoints([-2, -0.5, 0.5, 1])
        cfg = AdaptConfig(growth_n=75, growth_k=24, max_rounds=30)
        bb = adapt_bisection(op, rhs, bands0, cfg, ClosedFormSource)
        bo = adapt_one_at_a_time(op, rhs, bands0, cfg, ClosedFormSource)
        rate_b = math.exp(-re_g(build_greens(bb), 0.0))
        rate_o = math.exp(-re_g(build_greens(bo), 0.0))
        assert rate_o <= rate_b + 1e-12


class TestRayleigh:
    def test_diagonal_cluster_extremes(self):
        spectrum = BandSystem.from_endpoints([-1.5, -0.7, 0.8, 2.0])
        A = gen_uniform_diag(120, spectrum)
        b = np.random.default_rng(6).standard_normal(120)
        bands0 = BandSystem.from_endpoints([-2.0, -0.5, 0.6, 2.5])
        out = adapt_rayleigh(A, b, bands0, AdaptConfig(), ClosedFormSource)
        for got, want in zip(out.endpoints, spectrum.endpoints):
            assert abs(got - want) < 1e-10 * max(1.0, abs(want))

    def test_tight_bands_unchanged(self):
        spectrum = BandSystem.from_endpoints([-1.5, -0.7, 0.8, 2.0])
        A = gen_uniform_diag(120, spectrum)
        b = np.random.default_rng(7).standard_normal(120)
        out = adapt_rayleigh(A, b, spectrum, AdaptConfig(), ClosedFormSource)
        for got, want in zip(out.endpoints, spectrum.endpoints):
            assert abs(got - want) < 1e-10 * max(1.0, abs(want))


class TestSymmetricSimple:
    def test_contained_unchanged(self):
        spectrum = BandSystem.from_endpoints([-2.5, -0.8, 0.8, 2.5])
        A = gen_uniform_diag(100, spectrum)
        b = np.random.default_rng(8).standard_normal(100)
        out = symmetric_simple_adapt(
            A, b, 0.6, 3.0, AdaptConfig(), ClosedFormSource
        )
        assert tuple(out.endpoints) == (-3.0, -0.6, 0.6, 3.0)

    def test_outer_reaches_spectrum(self):
        spectrum = BandSystem.from_endpoints([-5.0, -0.8, 0.8, 5.0])
        A = gen_uniform_diag(100, spectrum)
        b = np.random.default_rng(9).standard_normal(100)
        out = symmetric_simple_adapt(
            A, b, 0.7, 2.0, AdaptConfig(), ClosedFormSource
        )
        # containment up to the growth-cessation threshold: the final
        # endpoint sits on a level curve within the 1.02 detection slack
        assert out.endpoints[-1] >= 5.0 * (1 - 0.01)
        assert out.endpoints[0] <= -5.0 * (1 - 0.01)
        assert out.endpoints[1] == -0.7 and out.endpoints[2] == 0.7
        x, rep = akhiezer_solve(
            A, np.ones(100), bands=out, coeff_source=ClosedFormSource(out),
            tol=1e-8, maxit=1500,
        )
        assert rep.converged

    def test_end_to_end_convergence(self):
        sym = BandSystem.from_endpoints([-4.0, -0.8, 0.8, 4.0])
        A, lam = gen_perturbed(120, sym, 0.01, seed=13)
        b = np.random.default_rng(10).standard_normal(120)
        out = symmetric_simple_adapt(
            A, b, 0.7, 2.0, AdaptConfig(), ClosedFormSource
        )
        x, rep = akhiezer_solve(
            A, b, bands=out, coeff_source=ClosedFormSource(out),
            tol=1e-8, maxit=1500,
        )
        assert rep.converged
