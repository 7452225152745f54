"""Discretized Stieltjes procedure and quadrature Stieltjes transforms."""

import math

import numpy as np
import pytest

from akhiezer.bands import BandSystem
from akhiezer.stieltjes_proc import (
    RECIPROCAL_KIND,
    WeightSpec,
    cauchy_by_quadrature,
    cauchy_table_on_grid,
    coeffs_by_stieltjes,
    stieltjes_by_quadrature,
)

THREE_BANDS = BandSystem.from_endpoints([-2, -0.5, 0.5, 0.7, 5.8, 6])


class TestWeightSpec:
    def test_unit_mass(self):
        for kind in ("akhiezer", "reciprocal"):
            w = WeightSpec(THREE_BANDS, kind=kind)
            x, om = w.discrete_measure(500)
            assert abs(np.sum(om) - 1.0) < 1e-10

    def test_two_band_normalization_is_pi(self):
        # the closed-form weight carries 1/pi exactly
        w = WeightSpec(BandSystem.from_endpoints([-1, -0.5, 0.5, 1]))
        assert w.normalization * math.pi == pytest.approx(1.0, rel=1e-12)

    def test_positive_density(self):
        w = WeightSpec(THREE_BANDS, kind=RECIPROCAL_KIND)
        for a, b in THREE_BANDS:
            xs = np.linspace(a + 1e-3, b - 1e-3, 50)
            assert np.all(w.density(xs) > 0)

    def test_bad_kind(self):
        with pytest.raises(ValueError):
            WeightSpec(THREE_BANDS, kind="unknown")


class TestCoeffs:
    def test_single_band_chebyshev(self):
        w = WeightSpec(BandSystem.from_endpoints([-1, 1]))
        coeffs = coeffs_by_stieltjes(w, 20)
        for n, rp in enumerate(coeffs):
            assert abs(rp.a) < 1e-10
            assert abs(rp.b - (1 / math.sqrt(2) if n == 0 else 0.5)) < 1e-10

    def test_three_band_reciprocal_localization(self):
        w = WeightSpec(THREE_BANDS, kind=RECIPROCAL_KIND)
        coeffs = coeffs_by_stieltjes(w, 150)
        lo, hi = THREE_BANDS.endpoints[0], THREE_BANDS.endpoints[-1]
        for rp in coeffs:
            assert rp.b > 0
            assert lo <= rp.a <= hi

    def test_discrete_orthonormality(self):
        w = WeightSpec(BandSystem.from_endpoints([-1, -0.4, 0.2, 1]))
        N = 30
        coeffs = coeffs_by_stieltjes(w, N)
        x, om = w.discrete_measure(40 * N + 200)
        P = np.empty((N // 2 + 1, x.size))
        P[0] = 1.0
        P[1] = (x - coeffs[0].a) / coeffs[0].b
        for n in range(2, N // 2 + 1):
            P[n] = (
                (x - coeffs[n - 1].a) * P[n - 1] - coeffs[n - 2].b * P[n - 2]
            ) / coeffs[n - 1].b
        gram = (P * om) @ P.T
        assert np.max(np.abs(gram - np.eye(N // 2 + 1))) < 1e-12

    def test_node_starvation_detected(self):
        w = WeightSpec(BandSystem.from_endpoints([-1, -0.5, 0.5, 1]))
        with pytest.raises(RuntimeError):
            coeffs_by_stieltjes(w, 80, nodes_per_band=12)


class TestStieltjesQuadrature:
    def test_large_z(self):
        w = WeightSpec(THREE_BANDS, kind=RECIPROCAL_KIND)
        coeffs = coeffs_by_stieltjes(w, 2)
        z = 1e5 + 0j
        val = stieltjes_by_quadrature(w, coeffs, 0, z)
        assert abs(val - (-1 / z)) < 1e-4 * abs(val)

    def test_recurrence_residual_three_band(self):
        # the C_n come from independent integrals with ~1e-13 absolute
        # accuracy, so the identity holds relatively until the values decay
        # to that floor
        w = WeightSpec(THREE_BANDS, kind=RECIPROCAL_KIND)
        coeffs = coeffs_by_stieltjes(w, 22)
        z = 4.0 + 0j
        C = np.array(
            [cauchy_by_quadrature(w, coeffs, n, z) for n in range(22)]
        )
        inh = 1 / (2j * math.pi)
        for n in range(20):
            bprev = coeffs[n - 1].b if n else 0.0
            lhs = z * C[n]
            rhs = (bprev * C[n - 1] if n else 0) + coeffs[n].a * C[n] + coeffs[n].b * C[n + 1]
            rhs -= inh if n == 0 else 0
            assert abs(lhs - rhs) < max(1e-9 * abs(lhs), 5e-13)

    def test_near_band_rejected(self):
        w = WeightSpec(THREE_BANDS)
        coeffs = coeffs_by_stieltjes(w, 2)
        with pytest.raises(ValueError):
            stieltjes_by_quadrature(w, coeffs, 0, 0.6 + 0j)

    def test_grid_table_matches_adaptive(self):
        w = WeightSpec(THREE_BANDS, kind=RECIPROCAL_KIND)
        coeffs = coeffs_by_stieltjes(w, 10)
        zs = np.array([3.25 + 3.2j, -1.25 + 1.0j, 7.0 + 0.5j])
        table = cauchy_table_on_grid(w, coeffs, 8, zs, nodes_per_band=800)
        for j, z in enumerate(zs):
            for n in (0, 3, 8):
                ref = cauchy_by_quadrature(w, coeffs, n, z)
                assert abs(table[n, j] - ref) < 1e-10 * max(abs(ref), 1e-12)
