"""Exterior Green's function with pole at infinity for a band system.

g'(z) = Q_g(z)/R(z) with R(z)^2 the monic polynomial vanishing at all band
endpoints and Q_g the monic degree-g polynomial whose lower coefficients are
fixed by requiring the gap integrals of g' to vanish. With that choice Re g
is zero on every band, positive elsewhere, and path-independent because the
jumps of g across the gaps are purely imaginary.

Re g drives everything downstream: e^{-Re g(0)} is the guaranteed geometric
convergence factor of the polynomial iteration, nu(z; A) compares shift and
eigenvalue positions, and the level curves e^{Re g} = rho are the
multi-interval analog of Bernstein ellipses.

Closed forms are used for one band (inverse Joukowski map) and two bands
(theta-function ratio); higher genus integrates g' along explicit paths by
adaptive quadrature.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .bands import BandSystem
from .polynomials import AkhiezerParams, GuardBandError, build_params, greens_rate_two_bands
from .stieltjes_proc import _band_theta_grid


@dataclass(frozen=True)
class GreensEvaluator:
    """Green's-function data for one band system.

    ``qg_coeffs`` holds h_0..h_{g-1} of the monic gap polynomial Q_g;
    ``g1_params`` carries the two-band closed-form bundle when g = 1.
    """

    bands: BandSystem
    qg_coeffs: np.ndarray
    g1_params: AkhiezerParams | None = None


def build_greens(bands: BandSystem) -> GreensEvaluator:
    """Solve the gap-integral conditions for Q_g and bundle the evaluator."""
    g = bands.genus
    if g == 0:
        return GreensEvaluator(bands=bands, qg_coeffs=np.zeros(0))
    # moment matrix M[j, k] = integral of s^k / R(s) over gap j
    M = np.empty((g, g))
    rhs = np.empty(g)
    for j, gap in enumerate(bands.gaps):
        x, om = _band_theta_grid(gap, 400)
        rbase = _sqrt_prod(bands, x.astype(complex))
        # R vanishes like a square root at both gap ends; the theta weight
        # already carries that factor, so divide it back out cleanly
        vals = om / rbase
        if np.max(np.abs(vals.imag)) > 1e-8 * np.max(np.abs(vals.real)):
            raise AssertionError("R(s) should be real on gaps")
        vals = vals.real
        for k in range(g):
            M[j, k] = np.sum(vals * x**k)
        rhs[j] = -np.sum(vals * x**g)
    h = np.linalg.solve(M, rhs)
    params = build_params(bands) if g == 1 else None
    return GreensEvaluator(bands=bands, qg_coeffs=h, g1_params=params)


def _sqrt_prod(bands: BandSystem, z):
    """R(z) = prod sqrt(z - a_j) sqrt(z - b_j), principal branch per factor.

    Analytic off the bands (the per-gap sign flips pair up), behaving like
    z^{g+1} at infinity.
    """
    z = np.asarray(z, dtype=complex)
    out = np.ones_like(z)
    for a, b in bands:
        out = out * np.sqrt(z - a) * np.sqrt(z - b)
    return out


def _g_prime(ev: GreensEvaluator, z, overrides=()):
    """Q_g(z)/R(z). ``overrides`` supplies precomputed (z - endpoint) values
    for endpoints the current path parametrization touches, so the
    inverse-square-root factors stay accurate when z - endpoint underflows
    in direct subtraction.
    """
    z = np.asarray(z, dtype=complex)
    q = np.full_like(z, 1.0)
    for h in ev.qg_coeffs[::-1]:
        q = q * z + h
    skip = [e for e, _ in overrides]
    r = np.ones_like(z)
    for e in ev.bands.endpoints:
        if any(e == s for s in skip):
            continue
        r = r * np.sqrt(z - e)
    for _, fac in overrides:
        r = r * np.sqrt(np.asarray(fac, dtype=complex))
    return q / r


def _quad_complex(f, a, b):
    val, _ = quad(f, a, b, complex_func=True, limit=400, epsabs=1e-12, epsrel=1e-11)
    return val


def _is_endpoint(ev, z: complex):
    for e in ev.bands.endpoints:
        if abs(z - e) < 1e-14 * max(1.0, abs(e)):
            return float(e)
    return None


def _segment_integral(ev, z0, z1):
    """Integral of g' along the straight segment z0 -> z1.

    Ends that coincide with band endpoints get a quadratic substitution, and
    the vanishing square-root factor is formed from the parametrization
    rather than by subtraction.
    """
    z0, z1 = complex(z0), complex(z1)
    e0, e1 = _is_endpoint(ev, z0), _is_endpoint(ev, z1)
    d = z1 - z0
    if e0 is not None and e1 is None:
        return _quad_complex(
            lambda t: _g_prime(ev, z0 + d * t * t, [(e0, d * t * t)]) * 2 * d * t,
            0, 1,
        )
    if e1 is not None and e0 is None:
        return _quad_complex(
            lambda t: _g_prime(ev, z1 - d * t * t, [(e1, -d * t * t)]) * 2 * d * t,
            0, 1,
        )
    if e0 is not None and e1 is not None:
        # both ends singular: cosine substitution over the whole segment
        mid, half = 0.5 * (z0 + z1), 0.5 * d

        def f(theta):
            c, s_ = np.cos(theta), np.sin(theta)
            s = mid - half * c
            f0 = 2.0 * half * np.sin(theta / 2) ** 2   # s - z0
            f1 = -2.0 * half * np.cos(theta / 2) ** 2  # s - z1
            return _g_prime(ev, s, [(e0, f0), (e1, f1)]) * half * s_

        return _quad_complex(f, 0, math.pi)
    return _quad_complex(lambda t: _g_prime(ev, z0 + d * t) * d, 0, 1)


def _arc_integral(ev, band, side: int):
    """Integral of g' over a semicircular arc spanning one band."""
    a, b = band
    mid, half = 0.5 * (a + b), 0.5 * (b - a)

    def f(phi):
        theta = 0.5 * math.pi * (1.0 + np.cos(phi))
        w = np.exp(1j * side * theta)
        s = mid + half * w
        # s - a = 2 half cos(theta/2)^2 ... exact trig forms, no cancellation
        fa = 2.0 * half * np.cos(side * theta / 2) * np.exp(1j * side * theta / 2)
        fb = 2j * half * np.sin(side * theta / 2) * np.exp(1j * side * theta / 2)
        ds = 1j * side * half * w * (-0.5 * math.pi * np.sin(phi))
        return _g_prime(ev, s, [(float(a), fa), (float(b), fb)]) * ds

    return _quad_complex(f, 0, math.pi)


def _walk_to_real(ev, x: float, side: int):
    """Integral of g' from a_1 to a real target along the axis, arcing over
    every band in between."""
    total = 0.0 + 0.0j
    a1 = ev.bands.bands[0][0]
    if x <= a1:
        return _segment_integral(ev, a1, x)
    cur = a1
    for band in ev.bands:
        a, b = band
        if x <= a:
            break
        if cur < a:
            total += _segment_integral(ev, cur, a)
            cur = a
        if x >= b:
            total += _arc_integral(ev, band, side)
            cur = b
        else:
            raise ValueError(f"target {x} lies inside band [{a},{b}]")
    if x > cur:
        total += _segment_integral(ev, cur, x)
    return total


def re_g_quadrature(ev: GreensEvaluator, z, route: str = "auto") -> float:
    """Re g(z) by path quadrature of g'; works for any genus.

    Routes: "direct" integrates a_1 -> z on a straight segment (z off the
    real axis), "arcs" walks the real axis arcing over bands, "detour" takes
    a rectangular path high above the bands. Any two agree in the real part.
    """
    z = complex(z)
    a1 = ev.bands.bands[0][0]
    if route == "auto":
        route = "arcs" if z.imag == 0.0 else "direct"
    if route == "direct":
        if z.imag == 0.0:
            raise ValueError("direct route requires Im z != 0")
        val = _segment_integral(ev, a1, z)
    elif route == "arcs":
        if z.imag == 0.0:
            val = _walk_to_real(ev, z.real, side=+1)
        else:
            anchor = _real_anchor(ev, z.real)
            val = _walk_to_real(ev, anchor, side=+1) + _segment_integral(ev, anchor, z)
    elif route == "detour":
        height = max(1.0, float(np.max(ev.bands.widths)))
        top0 = a1 + 1j * height
        top1 = z.real + 1j * height
        val = (
            _segment_integral(ev, a1, top0)
            + _segment_integral(ev, top0, top1)
            + _segment_integral(ev, top1, z if z.imag != 0 else complex(z.real, 0.0))
        )
    else:
        raise ValueError(f"unknown route {route!r}")
    return float(val.real)


def _real_anchor(ev: GreensEvaluator, x: float) -> float:
    """Nearest real point off the closed bands, used to join axis walks to
    vertical segments."""
    candidates = [ev.bands.bands[0][0], ev.bands.bands[-1][1]]
    for lo, hi in ev.bands.gaps:
        candidates.append(0.5 * (lo + hi))
    if not ev.bands.contains(x):
        candidates.append(x)
    return min(candidates, key=lambda c: abs(c - x))


def re_g(ev: GreensEvaluator, z, method: str = "auto") -> float:
    """Re g(z) >= 0 for z off band interiors; 0 on the bands themselves."""
    z = complex(z)
    if z.imag == 0.0:
        for a, b in ev.bands:
            if a < z.real < b:
                raise ValueError(f"z={z.real} lies inside band [{a},{b}]")
            if z.real == a or z.real == b:
                return 0.0
    if method == "auto":
        g = ev.bands.genus
        if g == 0:
            return _re_g_joukowski(ev.bands, z)
        if g == 1:
            try:
                return float(greens_rate_two_bands(ev.g1_params, z))
            except GuardBandError:
                return re_g_quadrature(ev, z)
        return re_g_quadrature(ev, z)
    if method == "quadrature":
        return re_g_quadrature(ev, z)
    raise ValueError(f"unknown method {method!r}")


def _re_g_joukowski(bands: BandSystem, z: complex) -> float:
    (a, b) = bands.bands[0]
    w = (2.0 * z - (a + b)) / (b - a)
    v = w + cmath.sqrt(w - 1.0) * cmath.sqrt(w + 1.0)
    return abs(math.log(abs(v)))


def nu(ev: GreensEvaluator, z, eigs) -> float:
    """max_j Re g(lambda_j) - Re g(z); eigenvalues on the bands contribute
    zero growth."""
    z = complex(z)
    worst = 0.0
    for lam in np.atleast_1d(np.asarray(eigs, dtype=complex)):
        lam = complex(lam)
        if abs(lam.imag) < 1e-12 and ev.bands.contains(lam.real, tol=1e-12):
            val = 0.0
        else:
            val = re_g(ev, lam)
        worst = max(worst, val)
    return worst - re_g(ev, z)


def _re_g_grid(ev: GreensEvaluator, zs: np.ndarray) -> np.ndarray:
    """Vectorized Re g over many off-axis points via fixed-order quadrature
    of the direct path; accurate away from the bands, used for contour
    seeding only."""
    g = ev.bands.genus
    flat = zs.ravel()
    if g == 0:
        (a, b) = ev.bands.bands[0]
        w = (2.0 * flat - (a + b)) / (b - a)
        v = w + np.sqrt(w - 1.0) * np.sqrt(w + 1.0)
        out = np.abs(np.log(np.abs(v)))
    elif g == 1:
        out = np.asarray(greens_rate_two_bands(ev.g1_params, flat), dtype=float)
    else:
        a1 = ev.bands.bands[0][0]
        t, wt = np.polynomial.legendre.leggauss(220)
        tau = 0.5 * (t + 1.0)
        wt = wt * 0.5
        d = flat[:, None] - a1
        s = a1 + d * tau[None, :] ** 2
        vals = _g_prime(ev, s) * 2.0 * d * tau[None, :]
        out = (vals @ wt).real
    return out.reshape(zs.shape)


def level_curve(ev: GreensEvaluator, varrho: float, resolution: int = 220):
    """Closed polylines of the level set e^{Re g(z)} = varrho > 1.

    Contours are extracted by marching squares on an adaptively enlarged
    grid, then each vertex is polished along the local gradient until it
    satisfies the level equation to 1e-4 relative.
    """
    if not varrho > 1.0:
        raise ValueError("level curves exist only for varrho > 1")
    import contourpy

    target = math.log(varrho)
    lo, hi = ev.bands.endpoints[0], ev.bands.endpoints[-1]
    span = hi - lo
    pad = 0.35 * span
    for _ in range(12):
        xg = np.linspace(lo - pad, hi + pad, resolution)
        # even count keeps the real axis (band interiors) off the grid
        yg = np.linspace(-pad, pad, resolution + (resolution % 2 == 1))
        Z = xg[None, :] + 1j * yg[:, None]
        vals = _re_g_grid(ev, Z)
        edge_min = min(
            vals[0, :].min(), vals[-1, :].min(), vals[:, 0].min(), vals[:, -1].min()
        )
        if edge_min > target:
            break
        pad *= 1.8
    gen = contourpy.contour_generator(x=xg, y=yg, z=vals)
    lines = gen.lines(target)
    out = []
    for line in lines:
        pts = np.asarray(line)
        polished = np.array([_polish_vertex(ev, complex(x, y), target) for x, y in pts])
        if not np.allclose(polished[0], polished[-1]):
            polished = np.vstack([polished, polished[:1]])
        out.append(polished)
    return out


def _polish_vertex(ev: GreensEvaluator, z0: complex, target: float):
    """Move a marching-squares vertex along the gradient of Re g until
    |Re g - target| < 1e-5."""
    h = 1e-6 * max(1.0, abs(z0))
    f0 = _scalar_re_g_safe(ev, z0)
    gx = (_scalar_re_g_safe(ev, z0 + h) - _scalar_re_g_safe(ev, z0 - h)) / (2 * h)
    gy = (_scalar_re_g_safe(ev, z0 + 1j * h) - _scalar_re_g_safe(ev, z0 - 1j * h)) / (
        2 * h
    )
    gnorm2 = gx * gx + gy * gy
    z = z0
    f = f0
    for _ in range(40):
        if abs(f - target) < 1e-5 * max(1.0, abs(target)) or gnorm2 == 0.0:
            break
        step = (target - f) / gnorm2
        z = z + step * complex(gx, gy)
        f = _scalar_re_g_safe(ev, z)
    return np.array([z.real, z.imag])


def _scalar_re_g_safe(ev: GreensEvaluator, z: complex) -> float:
    try:
        return re_g(ev, z)
    except ValueError:
        return 0.0
