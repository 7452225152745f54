"""Elliptic integrals, Jacobi elliptic functions, and Jacobi theta functions.

All Akhiezer-polynomial formulae reduce to evaluations of

* the complete elliptic integral ``K(k)``,
* the incomplete elliptic integral of the first kind ``F(phi, k)``, continued
  to complex ``phi``,
* the Jacobi elliptic functions ``sn``, ``cn``, ``dn`` at real argument,
* the theta functions ``theta1``/``theta4`` and their z-derivatives at complex
  argument and real nome ``0 < q < 1``.

Complete integrals are computed by the arithmetic-geometric mean, incomplete
integrals by Carlson's symmetric form R_F (valid off the real axis), and the
theta functions by direct summation of their defining series, which converge
extremely fast for the small nomes produced by well-separated bands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ellipj


class ThetaTruncationError(RuntimeError):
    """Theta series failed to meet tolerance within the term cap.

    Signals a nome too close to 1 (bands nearly touching) or an argument too
    far from the real axis.
    """


@dataclass(frozen=True)
class ThetaSeriesConfig:
    """Truncation control for the theta series."""

    tolerance: float = 1e-15
    max_terms: int = 64

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if self.max_terms < 8:
            raise ValueError("max_terms must be at least 8")


DEFAULT_THETA_CFG = ThetaSeriesConfig()


@dataclass(frozen=True)
class EllipticModulus:
    """Bundle of the elliptic modulus k with K(k), K(k') and the nome q."""

    k: float
    K: float
    Kprime: float
    q: float

    @classmethod
    def from_k(cls, k: float) -> "EllipticModulus":
        if not 0.0 < k < 1.0:
            raise ValueError(f"modulus k must lie in (0,1), got {k}")
        K = complete_K(k)
        Kp = complete_K(math.sqrt(1.0 - k * k))
        q = math.exp(-math.pi * Kp / K)
        return cls(k=k, K=K, Kprime=Kp, q=q)


def complete_K(k: float) -> float:
    """Complete elliptic integral of the first kind, by the AGM.

    Quadratically convergent; relative accuracy close to machine precision
    for 0 <= k < 1.
    """
    if not np.isfinite(k) or k < 0.0 or k >= 1.0:
        raise ValueError(f"complete_K requires 0 <= k < 1, got {k}")
    a, b = 1.0, math.sqrt(1.0 - k * k)
    # quadratic convergence; the cap guards against ulp-level cycling
    for _ in range(64):
        if abs(a - b) <= 4e-16 * a:
            break
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return math.pi / (2.0 * a)


def _carlson_rf(x, y, z):
    """Carlson symmetric form R_F(x, y, z) for complex arguments.

    Duplication iterations followed by the fifth-order Taylor tail; arguments
    must avoid the negative real axis (on-axis values resolve to the upper
    side of the cut through numpy's sqrt convention). Accepts arrays.
    """
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    z = np.asarray(z, dtype=complex)
    x, y, z = np.broadcast_arrays(x, y, z)
    x, y, z = x.copy(), y.copy(), z.copy()
    for _ in range(200):
        sx, sy, sz = np.sqrt(x), np.sqrt(y), np.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x, y, z = 0.25 * (x + lam), 0.25 * (y + lam), 0.25 * (z + lam)
        mu = (x + y + z) / 3.0
        amu = np.abs(mu)
        if np.all(amu == 0.0):
            break
        dev = np.maximum(
            np.abs(x - mu), np.maximum(np.abs(y - mu), np.abs(z - mu))
        ) / np.where(amu == 0.0, 1.0, amu)
        if np.max(dev) < 1e-5:
            break
    mu = (x + y + z) / 3.0
    dx = (mu - x) / mu
    dy = (mu - y) / mu
    dz = (mu - z) / mu
    e2 = dx * dy - dz * dz
    e3 = dx * dy * dz
    s = 1.0 + e2 * (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) + e3 / 14.0
    out = s / np.sqrt(mu)
    return out if out.ndim else complex(out)


def incomplete_F(phi, k: float):
    """Incomplete elliptic integral of the first kind F(phi, k).

    Uses F(phi, k) = sin(phi) * R_F(cos^2 phi, 1 - k^2 sin^2 phi, 1), which
    analytically continues the real definition to complex phi with
    |Re phi| <= pi/2. Accepts scalar or array phi.
    """
    if not 0.0 < k < 1.0:
        raise ValueError(f"incomplete_F requires 0 < k < 1, got {k}")
    phi = np.asarray(phi, dtype=complex)
    if not np.all(np.isfinite(phi)):
        raise ValueError("non-finite argument")
    s = np.sin(phi)
    c = np.cos(phi)
    out = s * _carlson_rf(c * c, 1.0 - (k * s) ** 2, np.ones_like(s))
    return out if out.ndim else complex(out)


def jacobi_sn_cn_dn(u: float, k: float):
    """Jacobi elliptic triple (sn, cn, dn) at real argument u, modulus k."""
    if not 0.0 < k < 1.0:
        raise ValueError(f"jacobi_sn_cn_dn requires 0 < k < 1, got {k}")
    if not np.isfinite(u):
        raise ValueError("non-finite argument")
    sn, cn, dn, _ = ellipj(u, k * k)
    return float(sn), float(cn), float(dn)


def jacobi_sn_derivatives(u: float, k: float):
    """First and second derivatives of sn at real u: sn' = cn dn and
    sn'' = -sn (dn^2 + k^2 cn^2)."""
    sn, cn, dn = jacobi_sn_cn_dn(u, k)
    sn1 = cn * dn
    sn2 = -sn * (dn * dn + k * k * cn * cn)
    return sn1, sn2


def _theta_sum(z, q, cfg, kind, deriv):
    """Shared series driver for theta1/theta4 and their z-derivatives.

    ``kind`` is 1 or 4. Truncates when the term magnitude bound falls below
    cfg.tolerance relative to the largest partial sum encountered; raises
    ThetaTruncationError if the cap is reached first.
    """
    if not 0.0 < q < 1.0:
        raise ValueError(f"theta functions require 0 < q < 1, got q={q}")
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise ValueError("non-finite argument")
    im_max = float(np.max(np.abs(z.imag))) if z.size else 0.0

    if kind == 4:
        total = np.zeros_like(z) if deriv else np.ones_like(z)
        scale = 1.0
        j0 = 1
    else:
        total = np.zeros_like(z)
        scale = 0.0
        j0 = 0

    for j in range(j0, cfg.max_terms + 1):
        if kind == 1:
            amp = 2.0 * q ** ((j + 0.5) ** 2)
            freq = 2 * j + 1
            term = amp * (-1.0) ** j * (
                freq * np.cos(freq * z) if deriv else np.sin(freq * z)
            )
        else:
            amp = 2.0 * q ** (j * j)
            freq = 2 * j
            term = amp * (-1.0) ** j * (
                -freq * np.sin(freq * z) if deriv else np.cos(freq * z)
            )
        total = total + term
        scale = max(scale, float(np.max(np.abs(total))))
        bound = (freq if deriv else 1.0) * amp * math.exp(freq * im_max)
        if bound <= cfg.tolerance * max(scale, 1e-300):
            return total if total.ndim else complex(total)
    raise ThetaTruncationError(
        f"theta{kind} series needs more than {cfg.max_terms} terms "
        f"(q={q}, max|Im z|={im_max}); bands may be nearly touching"
    )


def theta1(z, q: float, cfg: ThetaSeriesConfig = DEFAULT_THETA_CFG):
    """Jacobi theta function theta_1(z, q); odd in z."""
    return _theta_sum(z, q, cfg, kind=1, deriv=False)


def theta4(z, q: float, cfg: ThetaSeriesConfig = DEFAULT_THETA_CFG):
    """Jacobi theta function theta_4(z, q); even in z."""
    return _theta_sum(z, q, cfg, kind=4, deriv=False)


def theta1_deriv(z, q: float, cfg: ThetaSeriesConfig = DEFAULT_THETA_CFG):
    """d/dz theta_1(z, q), by termwise differentiation."""
    return _theta_sum(z, q, cfg, kind=1, deriv=True)


def theta4_deriv(z, q: float, cfg: ThetaSeriesConfig = DEFAULT_THETA_CFG):
    """d/dz theta_4(z, q), by termwise differentiation."""
    return _theta_sum(z, q, cfg, kind=4, deriv=True)
