"""Closed-form orthonormal polynomials on two disjoint intervals.

For the standard band configuration [-1, alpha] U [beta, 1] the weight

    w(x) = (1/pi) * sqrt(x - alpha) / (sqrt(1-x) sqrt(x+1) sqrt(x-beta))

admits orthonormal polynomials p_n, their Cauchy integrals

    C_n(z) = (1/(2 pi i)) * integral of p_n(s) w(s) / (s - z) over the bands,

and their three-term recurrence coefficients, all in closed form through
Jacobi theta functions evaluated at an elliptic parametrization of the
two-interval domain. Arbitrary two-band systems are handled by an affine
change of variables; all public operations take and return values in the
original coordinates unless noted otherwise.

The transplanted variable u(x) is non-Lipschitz at x = alpha, so a guard
band around alpha routes polynomial evaluation through the recurrence and
rejects Cauchy-integral queries.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .bands import BandSystem
from .specfun import (
    DEFAULT_THETA_CFG,
    EllipticModulus,
    ThetaSeriesConfig,
    incomplete_F,
    jacobi_sn_cn_dn,
    theta1,
    theta1_deriv,
    theta4,
    theta4_deriv,
)

TWO_PI_I = 2j * math.pi


class GuardBandError(ValueError):
    """Evaluation point falls inside the numerical guard band at x = alpha."""


class OnBandError(ValueError):
    """Shift lies on the band system where the Cauchy integral jumps."""


@dataclass(frozen=True)
class RecurrencePair:
    """Three-term recurrence coefficients (a_n, b_n), b_n > 0."""

    a: float
    b: float


@dataclass(frozen=True)
class StieltjesSequence:
    """Weighted Stieltjes transforms S_n(z) and Cauchy integrals C_n(z) =
    S_n(z) / (2 pi i) for a fixed shift z, n = 0..len-1."""

    shift: complex
    values: np.ndarray
    cauchy_values: np.ndarray


@dataclass(frozen=True)
class AkhiezerParams:
    """Parameter bundle for the two-interval closed forms.

    The affine map x = scale*t + shift sends standard coordinates
    t in [-1, alpha] U [beta, 1] to the original bands. ``rho`` solves
    1 - 2 sn^2(rho, k) = alpha with 0 < rho < K.
    """

    bands: BandSystem
    scale: float
    shift: float
    alpha: float
    beta: float
    modulus: EllipticModulus
    rho: float
    theta_cfg: ThetaSeriesConfig = field(default=DEFAULT_THETA_CFG)

    @property
    def guard_delta(self) -> float:
        return 1e-6 * (self.beta - self.alpha)

    def to_standard(self, x):
        return (np.asarray(x, dtype=complex) - self.shift) / self.scale

    def from_standard(self, t):
        return self.scale * np.asarray(t, dtype=complex) + self.shift


def build_params(
    bands: BandSystem, theta_cfg: ThetaSeriesConfig = DEFAULT_THETA_CFG
) -> AkhiezerParams:
    """Construct the closed-form parameters for a two-band system."""
    if bands.genus != 1:
        raise ValueError(f"need exactly two bands, got {bands.genus + 1}")
    (a1, b1), (a2, b2) = bands.bands
    scale = (b2 - a1) / 2.0
    shift = (b2 + a1) / 2.0
    alpha = (b1 - shift) / scale
    beta = (a2 - shift) / scale
    k = math.sqrt(2.0 * (beta - alpha) / ((1.0 - alpha) * (1.0 + beta)))
    modulus = EllipticModulus.from_k(k)
    rho = incomplete_F(math.asin(math.sqrt((1.0 - alpha) / 2.0)), k).real
    params = AkhiezerParams(
        bands=bands,
        scale=scale,
        shift=shift,
        alpha=alpha,
        beta=beta,
        modulus=modulus,
        rho=rho,
        theta_cfg=theta_cfg,
    )
    # Fail fast if the nome is too large for the configured series cap.
    _theta_H(params, rho)
    _theta_T(params, rho)
    return params


# H and Theta are theta1/theta4 precomposed with z -> pi z / (2K); the
# derivative wrappers carry the chain-rule factor pi/(2K).


def _theta_H(p: AkhiezerParams, z):
    m = p.modulus
    return theta1(np.asarray(z, complex) * (math.pi / (2 * m.K)), m.q, p.theta_cfg)


def _theta_Hp(p: AkhiezerParams, z):
    m = p.modulus
    w = np.asarray(z, complex) * (math.pi / (2 * m.K))
    return theta1_deriv(w, m.q, p.theta_cfg) * (math.pi / (2 * m.K))


def _theta_T(p: AkhiezerParams, z):
    m = p.modulus
    return theta4(np.asarray(z, complex) * (math.pi / (2 * m.K)), m.q, p.theta_cfg)


def _theta_Tp(p: AkhiezerParams, z):
    m = p.modulus
    w = np.asarray(z, complex) * (math.pi / (2 * m.K))
    return theta4_deriv(w, m.q, p.theta_cfg) * (math.pi / (2 * m.K))


def u_of_x(x, p: AkhiezerParams):
    """Elliptic coordinate u(x) for x in standard coordinates.

    Branch-corrected so that |H(u - rho)/H(u + rho)| <= 1, the sheet on
    which the Cauchy integrals decay with the degree.
    """
    x = np.asarray(x, dtype=complex)
    if np.any(np.abs(x - p.alpha) < p.guard_delta):
        raise GuardBandError(
            f"u(x) is numerically unstable within {p.guard_delta:g} of alpha"
        )
    xi = (p.alpha - 1.0) * (1.0 + x) / (2.0 * (p.alpha - x))
    u = incomplete_F(np.arcsin(np.sqrt(xi)), p.modulus.k)
    u = np.asarray(u, dtype=complex)
    ratio = _theta_H(p, u - p.rho) / _theta_H(p, u + p.rho)
    # strictly greater than 1 up to rounding: on-band points sit at exactly 1
    u = np.where(np.abs(ratio) > 1.0 + 1e-9, -u, u)
    return u if u.ndim else complex(u)


def _poly_norm_const(n: int, p: AkhiezerParams):
    if n == 0:
        return 1.0
    num = math.sqrt(2.0) * float(_theta_T(p, p.rho).real)
    den = math.sqrt(
        float(_theta_T(p, (2 * n - 1) * p.rho).real)
        * float(_theta_T(p, (2 * n + 1) * p.rho).real)
    )
    return num / den


def eval_pn(n: int, x, p: AkhiezerParams):
    """Orthonormal polynomial p_n at x (original coordinates).

    Within the guard band around the image of alpha the closed form is
    replaced by recurrence-based evaluation.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    t = p.to_standard(x)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    out = np.empty_like(t)
    guarded = np.abs(t - p.alpha) < p.guard_delta
    if np.any(~guarded):
        out[~guarded] = _eval_pn_closed(n, t[~guarded], p)
    if np.any(guarded):
        out[guarded] = _eval_pn_recurrence(n, t[guarded], p)
    return complex(out[0]) if scalar else out


def _eval_pn_closed(n: int, t, p: AkhiezerParams):
    if n == 0:
        return np.ones_like(t)
    u = np.asarray(u_of_x(t, p), dtype=complex)
    rho = p.rho
    ratio = _theta_H(p, u - rho) / _theta_H(p, u + rho)
    theta_u = _theta_T(p, u)
    cn = _poly_norm_const(n, p)
    return (cn / 2.0) * (
        ratio**n * _theta_T(p, u + 2 * n * rho) / theta_u
        + ratio ** (-n) * _theta_T(p, u - 2 * n * rho) / theta_u
    )


def _eval_pn_recurrence(n: int, t, p: AkhiezerParams):
    """p_n(t) in standard coordinates by the three-term recurrence."""
    coeffs = [_recurrence_std(j, p) for j in range(max(n, 1))]
    pm1 = np.zeros_like(t)
    pk = np.ones_like(t)
    for j in range(n):
        a, b = coeffs[j]
        bprev = coeffs[j - 1][1] if j > 0 else 0.0
        pk, pm1 = ((t - a) * pk - bprev * pm1) / b, pk
    return pk


def _recurrence_std(n: int, p: AkhiezerParams):
    """Closed-form (a_n, b_n) in standard coordinates.

    a_n carries the leading-coefficient expansion constants with the signs
    the expansion produces (the d/c and base terms enter negatively), which
    is the convention the discretized-Stieltjes cross-check confirms.
    """
    rho = p.rho
    k = p.modulus.k
    sn, cn, dn = jacobi_sn_cn_dn(rho, k)
    sn1 = cn * dn
    sn2 = -sn * (dn * dn + k * k * cn * cn)
    one_m_a2 = 1.0 - p.alpha * p.alpha
    pref = one_m_a2 / (4.0 * sn * sn1)
    base = one_m_a2 * (1.0 / (8.0 * sn * sn) + sn2 / (8.0 * sn * sn1 * sn1))

    h2 = float(_theta_H(p, 2 * rho).real)
    hp2 = float(_theta_Hp(p, 2 * rho).real)
    tp_plus = float(_theta_Tp(p, (2 * n + 1) * rho).real)
    t_plus = float(_theta_T(p, (2 * n + 1) * rho).real)
    tp_minus = float(_theta_Tp(p, (2 * n - 1) * rho).real)
    t_minus = float(_theta_T(p, (2 * n - 1) * rho).real)
    a = -base + pref * (-hp2 / h2 + tp_plus / t_plus - tp_minus / t_minus) + p.alpha

    hp0 = float(_theta_Hp(p, 0.0).real)
    if n == 0:
        b = pref * (hp0 / h2) * math.sqrt(
            2.0 * float(_theta_T(p, 3 * rho).real) / float(_theta_T(p, rho).real)
        )
    else:
        b = (
            pref
            * (hp0 / h2)
            * math.sqrt(float(_theta_T(p, (2 * n + 3) * rho).real) * t_minus)
            / t_plus
        )
    return a, b


def recurrence_coeffs(n: int, p: AkhiezerParams) -> RecurrencePair:
    """Recurrence coefficients (a_n, b_n) in original coordinates."""
    if n < 0:
        raise ValueError("index must be nonnegative")
    a, b = _recurrence_std(n, p)
    return RecurrencePair(a=p.scale * a + p.shift, b=p.scale * b)


def cauchy_integral(n: int, z, p: AkhiezerParams):
    """Cauchy integral C_n(z) of p_n * w at z off the bands (original
    coordinates); the affine map contributes a 1/scale Jacobian."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    t = p.to_standard(z)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    _reject_on_band(t, p)
    if np.any(np.abs(t - p.alpha) < p.guard_delta):
        raise GuardBandError("shift falls in the guard band at alpha")
    u = np.asarray(u_of_x(t, p), dtype=complex)
    rho = p.rho
    ratio = _theta_H(p, u - rho) / _theta_H(p, u + rho)
    cn = _poly_norm_const(n, p)
    root = (
        np.sqrt(t - p.alpha)
        / (np.sqrt(t - 1.0) * np.sqrt(t + 1.0) * np.sqrt(t - p.beta))
    )
    val = (
        -(cn / TWO_PI_I)
        * ratio**n
        * (_theta_T(p, u + 2 * n * rho) / _theta_T(p, u))
        * root
    ) / p.scale
    return complex(val[0]) if scalar else val


def _reject_on_band(t, p: AkhiezerParams, tol: float = 1e-12):
    on_axis = np.abs(t.imag) < tol
    in_band = ((t.real >= -1 - tol) & (t.real <= p.alpha + tol)) | (
        (t.real >= p.beta - tol) & (t.real <= 1 + tol)
    )
    if np.any(on_axis & in_band):
        raise OnBandError("shift lies on the band system")


def stieltjes(n: int, z, p: AkhiezerParams):
    """Weighted Stieltjes transform S_n(z) = 2 pi i * C_n(z)."""
    val = cauchy_integral(n, z, p)
    return TWO_PI_I * val


def stieltjes_sequence(p: AkhiezerParams, z, count: int) -> StieltjesSequence:
    """S_0(z)..S_{count-1}(z) and the matching Cauchy integrals."""
    cvals = np.array([cauchy_integral(n, z, p) for n in range(count)])
    return StieltjesSequence(
        shift=complex(z), values=TWO_PI_I * cvals, cauchy_values=cvals
    )


def backfill_cauchy(N: int, z, coeffs, C_Np1, C_Np2):
    """Recover C_0(z)..C_N(z) from seeds C_{N+1}(z), C_{N+2}(z).

    ``coeffs`` supplies RecurrencePair entries through index N+1. The
    truncated tridiagonal system built from the Cauchy-integral recurrence
    is solved by backward substitution from its two seeded bottom rows in
    O(N); the forward direction is exponentially unstable off the bands.
    """
    if len(coeffs) < N + 2:
        raise ValueError("need recurrence coefficients through index N+1")
    z = complex(z)
    C = np.zeros(N + 1, dtype=complex)
    a = [rp.a for rp in coeffs]
    b = [rp.b for rp in coeffs]
    C_next, C_next2 = complex(C_Np1), complex(C_Np2)
    C[N] = ((z - a[N + 1]) * C_next - b[N + 1] * C_next2) / b[N]
    if N >= 1:
        C[N - 1] = ((z - a[N]) * C[N] - b[N] * C_next) / b[N - 1]
        for n in range(N - 1, 0, -1):
            C[n - 1] = ((z - a[n]) * C[n] - b[n] * C[n + 1]) / b[n - 1]
    return C


def greens_rate_two_bands(p: AkhiezerParams, z):
    """Re g(z) for the two-band exterior Green's function, closed form.

    e^{g(z)} = -H(u + rho)/H(u - rho) on the decaying sheet, so
    Re g(z) = -log|H(u - rho)/H(u + rho)| >= 0.
    """
    t = p.to_standard(z)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    u = np.asarray(u_of_x(t, p), dtype=complex)
    ratio = _theta_H(p, u - p.rho) / _theta_H(p, u + p.rho)
    val = -np.log(np.abs(ratio))
    val = np.maximum(val, 0.0)
    return float(val[0]) if scalar else val
