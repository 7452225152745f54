"""Discretized Stieltjes procedure for band weights of either kind.

Recurrence coefficients for orthonormal polynomials of a weight supported on
a union of disjoint intervals are generated from a discrete approximation of
the measure: per band, Gauss-Legendre nodes under the substitution
x = mid + half*cos(theta), which absorbs the inverse-square-root endpoint
singularities of both weight families. The procedure is O(N^2) in the number
of coefficients and serves both as an independent cross-check of the
two-band closed forms and as the coefficient source for three or more bands.

Weighted Stieltjes transforms are computed by adaptive quadrature with the
same substitution, with the polynomials generated on the quadrature nodes by
their recurrence.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import roots_legendre

from .bands import BandSystem
from .polynomials import RecurrencePair

TWO_PI_I = 2j * math.pi

AKHIEZER_KIND = "akhiezer"
RECIPROCAL_KIND = "reciprocal"


def _weight_unnormalized(bands: BandSystem, kind: str, x, band_index=None, theta=None):
    """Positive weight density on band interiors, before normalization.

    The akhiezer kind is prod_j sqrt|x-b_j| (j<=g) over
    sqrt|b_{g+1}-x| * prod_j sqrt|x-a_j|; the reciprocal kind inverts that
    ratio. Absolute values pair up the sign flips so the result is positive
    on every band interior.

    When (band_index, theta) describe x = mid + half*cos(theta) on one band,
    that band's own endpoint distances are formed as 2*half*sin^2(theta/2)
    and 2*half*cos^2(theta/2), avoiding the subtractive cancellation that
    otherwise costs half the digits next to the endpoints.
    """
    x = np.asarray(x, dtype=float)
    a = np.array([ab[0] for ab in bands.bands])
    b = np.array([ab[1] for ab in bands.bands])
    if band_index is not None:
        half = 0.5 * (b[band_index] - a[band_index])
        dist_own_a = 2.0 * half * np.cos(0.5 * theta) ** 2
        dist_own_b = 2.0 * half * np.sin(0.5 * theta) ** 2

    def dist_a(j):
        if band_index is not None and j == band_index:
            return dist_own_a
        return np.abs(x - a[j])

    def dist_b(j):
        if band_index is not None and j == band_index:
            return dist_own_b
        return np.abs(x - b[j])

    num = np.ones_like(x)
    for j in range(len(b) - 1):
        num = num * np.sqrt(dist_b(j))
    den = np.sqrt(dist_b(len(b) - 1))
    for j in range(len(a)):
        den = den * np.sqrt(dist_a(j))
    if kind == AKHIEZER_KIND:
        return num / den
    if kind == RECIPROCAL_KIND:
        return den / num
    raise ValueError(f"unknown weight kind {kind!r}")


@lru_cache(maxsize=32)
def _legendre_rule(n_nodes: int):
    return roots_legendre(n_nodes)


def _band_theta_rule(band, n_nodes: int):
    """Gauss-Legendre nodes in theta for x = mid + half*cos(theta); returns
    (theta, x, weight * d x-measure jacobian)."""
    a, b = band
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    t, wt = _legendre_rule(n_nodes)
    theta = 0.5 * math.pi * (t + 1.0)
    wt = wt * (0.5 * math.pi)
    x = mid + half * np.cos(theta)
    jac = half * np.sin(theta)
    return theta, x, wt * jac


def _band_theta_grid(band, n_nodes: int):
    theta, x, om = _band_theta_rule(band, n_nodes)
    return x, om


@dataclass(frozen=True)
class WeightSpec:
    """A band weight of one of the two square-root families, normalized so
    that the measure has total mass one."""

    bands: BandSystem
    kind: str = AKHIEZER_KIND
    normalization: float = field(init=False)

    def __post_init__(self):
        if self.kind not in (AKHIEZER_KIND, RECIPROCAL_KIND):
            raise ValueError(f"unknown weight kind {self.kind!r}")
        total = 0.0
        for i, band in enumerate(self.bands):
            theta, x, om = _band_theta_rule(band, 400)
            total += float(
                np.sum(om * _weight_unnormalized(self.bands, self.kind, x, i, theta))
            )
        if not total > 0:
            raise ValueError("weight normalization must be positive")
        object.__setattr__(self, "normalization", 1.0 / total)

    def density(self, x):
        """Normalized weight density at points on band interiors."""
        return self.normalization * _weight_unnormalized(self.bands, self.kind, x)

    def density_on_band(self, band_index: int, theta):
        """Density at x = mid + half*cos(theta) on one band, with the
        endpoint factors formed cancellation-free."""
        band = self.bands.bands[band_index]
        mid, half = 0.5 * (band[0] + band[1]), 0.5 * (band[1] - band[0])
        x = mid + half * np.cos(theta)
        return self.normalization * _weight_unnormalized(
            self.bands, self.kind, x, band_index, theta
        )

    def discrete_measure(self, nodes_per_band: int):
        """Quadrature nodes and weights approximating the measure."""
        xs, ws = [], []
        for i, band in enumerate(self.bands):
            theta, x, om = _band_theta_rule(band, nodes_per_band)
            xs.append(x)
            ws.append(om * self.density_on_band(i, theta))
        return np.concatenate(xs), np.concatenate(ws)


def coeffs_by_stieltjes(
    w: WeightSpec, N: int, nodes_per_band: int | None = None
) -> list[RecurrencePair]:
    """Recurrence coefficients (a_0, b_0)..(a_N, b_N) from the discrete
    measure, by the three-term Stieltjes recursion.

    The default node count 40*N + 200 per band integrates the degree-2N
    polynomial moments of the weight to near machine precision.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    if nodes_per_band is None:
        nodes_per_band = 40 * N + 200
    x, om = w.discrete_measure(nodes_per_band)
    if x.size < 2 * (N + 1):
        raise RuntimeError(
            f"{x.size} discrete nodes cannot resolve {N + 1} recurrence pairs"
        )
    mu0 = np.sum(om)
    out = []
    p_prev = np.zeros_like(x)
    p_cur = np.full_like(x, 1.0 / math.sqrt(mu0))
    b_prev = 0.0
    for n in range(N + 1):
        a_n = float(np.sum(om * x * p_cur * p_cur))
        q = (x - a_n) * p_cur - b_prev * p_prev
        b_n = math.sqrt(max(float(np.sum(om * q * q)), 0.0))
        if b_n < 1e-13:
            raise RuntimeError(
                f"b_{n} collapsed ({b_n:g}); increase nodes_per_band for N={N}"
            )
        out.append(RecurrencePair(a=a_n, b=b_n))
        p_prev, p_cur = p_cur, q / b_n
        b_prev = b_n
    return out


def _eval_poly_recurrence(coeffs, n: int, x):
    """p_n(x) from recurrence coefficients; x may be an array."""
    pm1 = np.zeros_like(x)
    pk = np.ones_like(x)
    for j in range(n):
        a, b = coeffs[j].a, coeffs[j].b
        bprev = coeffs[j - 1].b if j > 0 else 0.0
        pk, pm1 = ((x - a) * pk - bprev * pm1) / b, pk
    return pk


def stieltjes_by_quadrature(w: WeightSpec, coeffs, n: int, z) -> complex:
    """S_n(z) = integral of p_n(s) w(s) / (s - z) ds by adaptive quadrature.

    Requires recurrence coefficients through index n-1 (none for n = 0);
    z must stay off the bands.
    """
    z = complex(z)
    if abs(z.imag) < 1e-10 and w.bands.contains(z.real, tol=1e-10):
        raise ValueError(f"shift {z} is on or within 1e-10 of the bands")
    total = 0.0 + 0.0j
    for i, band in enumerate(w.bands):
        a, b = band
        mid, half = 0.5 * (a + b), 0.5 * (b - a)

        def integrand(theta, band_index=i):
            theta = np.asarray(theta, dtype=float)
            x = mid + half * np.cos(theta)
            jac = half * np.sin(theta)
            px = _eval_poly_recurrence(coeffs, n, x)
            return px * w.density_on_band(band_index, theta) * jac / (x - z)

        # near-zero absolute floor: high-degree transforms are small through
        # cancellation and would otherwise bottom out at the default epsabs
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntegrationWarning)
            val, _ = quad(
                integrand, 0.0, math.pi, complex_func=True, limit=400,
                epsabs=1e-15, epsrel=1e-13,
            )
        total += val
    return total


def cauchy_by_quadrature(w: WeightSpec, coeffs, n: int, z) -> complex:
    """C_n(z) = S_n(z) / (2 pi i)."""
    return stieltjes_by_quadrature(w, coeffs, n, z) / TWO_PI_I


def cauchy_table_on_grid(w: WeightSpec, coeffs, n_max: int, zs, nodes_per_band=600):
    """C_n(z_j) for all n <= n_max and all z_j at once.

    Evaluates every polynomial on one dense fixed grid per band and forms the
    Cauchy kernels as a matrix product. Intended for quadrature nodes that
    keep a healthy distance from the bands (contour circles); the adaptive
    route should be used for near-band shifts.
    """
    zs = np.asarray(zs, dtype=complex)
    x, om = w.discrete_measure(nodes_per_band)
    P = np.empty((n_max + 1, x.size))
    P[0] = 1.0
    if n_max >= 1:
        P[1] = (x - coeffs[0].a) / coeffs[0].b
    for nn in range(2, n_max + 1):
        a, b = coeffs[nn - 1].a, coeffs[nn - 1].b
        bprev = coeffs[nn - 2].b
        P[nn] = ((x - a) * P[nn - 1] - bprev * P[nn - 2]) / b
    kernel = om[None, :] / (x[None, :] - zs[:, None])
    return (P @ kernel.T) / TWO_PI_I
