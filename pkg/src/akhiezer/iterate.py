"""Polynomial iterations: Chebyshev (one interval), the two-or-more-interval
generalization, and matrix-function evaluation by contour quadrature.

All solvers share the same skeleton: matrix polynomials p_k(A)b generated by
the orthonormal three-term recurrence, combined with scalar expansion
coefficients. No inner products with iterates are ever formed; convergence
is monitored through an increment proxy with a true residual refresh every
few steps (one extra matvec per refresh).

The expansion of the shifted inverse uses the weighted Stieltjes transforms
S_k(z); a matrix function f(A)b is assembled from Cauchy integrals at
trapezoid nodes on circles enclosing the bands, or directly from a
pole-residue representation of f.
"""

from __future__ import annotations

import cmath
import math
import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bands import BandSystem
from .linops import LinearOperator

RESIDUAL_EVERY = 5


@dataclass
class IterationReport:
    """Convergence record for one run."""

    iterations: int = 0
    converged: bool = False
    termination: str = ""
    residual_iters: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    increments: list = field(default_factory=list)
    reference_rate: float | None = None
    wall_time: float = 0.0

    def residual_array(self) -> np.ndarray:
        return np.array([self.residual_iters, self.residuals]).T

    def fitted_rate(self, window=(1.0 / 3.0, 2.0 / 3.0)) -> float:
        """Per-iteration geometric factor from a least-squares fit of the
        log-residual over the middle of the recorded history."""
        ks = np.asarray(self.residual_iters, dtype=float)
        rs = np.asarray(self.residuals, dtype=float)
        keep = rs > 0
        ks, rs = ks[keep], rs[keep]
        if ks.size < 3:
            raise ValueError("not enough residual samples to fit a rate")
        lo = ks[0] + window[0] * (ks[-1] - ks[0])
        hi = ks[0] + window[1] * (ks[-1] - ks[0])
        sel = (ks >= lo) & (ks <= hi)
        if np.count_nonzero(sel) < 2:
            sel = slice(None)
        coef = np.polyfit(ks[sel], np.log(rs[sel]), 1)
        return math.exp(coef[0])


def _maybe_real(x, is_real_problem: bool):
    if not is_real_problem or not np.iscomplexobj(x):
        return x
    scale = np.linalg.norm(x)
    imag = np.linalg.norm(x.imag)
    if scale > 0 and imag > 1e-8 * scale:
        warnings.warn(
            f"discarding imaginary part of relative size {imag / scale:.2e}"
        )
    return np.ascontiguousarray(x.real)


def chebyshev_modified_solve(
    A: LinearOperator,
    b,
    x0=None,
    *,
    alpha: float,
    c: float,
    tol: float = 1e-10,
    maxit: int = 2000,
):
    """Solve Ax = b for spectrum in [alpha-c, alpha+c] via the Chebyshev
    series of 1/x.

    The update is x_{k+1} = x_k + 2 S_k p_k with S_k a fixed geometric
    sequence, S_k/S_{k-1} the inverse Joukowski image of -alpha/c.
    """
    if alpha - c <= 0.0 <= alpha + c:
        raise ValueError("interval [alpha-c, alpha+c] must exclude the origin")
    t0 = time.perf_counter()
    b = np.asarray(b)
    real_problem = A.is_real() and not np.iscomplexobj(b)
    x0 = np.zeros(A.n) if x0 is None else np.asarray(x0)
    report = IterationReport()
    norm_b = np.linalg.norm(b)
    if norm_b == 0.0:
        report.converged = True
        report.termination = "converged"
        report.residuals = [0.0]
        report.residual_iters = [0]
        report.wall_time = time.perf_counter() - t0
        return x0.copy(), report

    b_eff = (b - (A @ x0)).astype(complex)
    s = 1.0 / (cmath.sqrt(alpha - c) * cmath.sqrt(alpha + c))
    ratio = -alpha / c - cmath.sqrt(-1.0 - alpha / c) * cmath.sqrt(1.0 - alpha / c)
    p_prev = None
    p = b_eff.copy()
    x = s * p

    def true_residual(xv):
        return np.linalg.norm(b_eff - (A @ xv)) / norm_b

    res = true_residual(x)
    report.residual_iters.append(0)
    report.residuals.append(res)
    if res < tol:
        report.converged = True
        report.termination = "converged"
        report.iterations = 0
        report.wall_time = time.perf_counter() - t0
        return _maybe_real(x + x0, real_problem), report

    for k in range(1, maxit + 1):
        if k == 1:
            p, p_prev = ((A @ p) - alpha * p) / c, p
        else:
            p, p_prev = (2.0 / c) * (A @ p) - (2.0 * alpha / c) * p - p_prev, p
        s *= ratio
        x = x + 2.0 * s * p
        inc = 2.0 * abs(s) * np.linalg.norm(p) / norm_b
        report.increments.append(inc)
        if k % RESIDUAL_EVERY == 0 or inc < tol:
            res = true_residual(x)
            report.residual_iters.append(k)
            report.residuals.append(res)
            if res < tol:
                report.converged = True
                report.termination = "converged"
                report.iterations = k
                report.wall_time = time.perf_counter() - t0
                return _maybe_real(x + x0, real_problem), report
    report.termination = "maxit"
    report.iterations = maxit
    report.wall_time = time.perf_counter() - t0
    return _maybe_real(x + x0, real_problem), report


def chebyshev_classical_solve(
    A: LinearOperator,
    b,
    x0=None,
    *,
    alpha: float,
    c: float,
    tol: float = 1e-10,
    maxit: int = 2000,
):
    """Classical Chebyshev iteration: x_k = q_k(A)b with residual polynomial
    r_k(x) = T_k((x-alpha)/c)/T_k(-alpha/c).

    Coefficient ratios of the shifted Chebyshev values at the origin are
    carried as a stable continued-fraction recurrence.
    """
    if alpha - c <= 0.0 <= alpha + c:
        raise ValueError("interval [alpha-c, alpha+c] must exclude the origin")
    t0 = time.perf_counter()
    b = np.asarray(b)
    real_problem = A.is_real() and not np.iscomplexobj(b)
    x0 = np.zeros(A.n) if x0 is None else np.asarray(x0)
    report = IterationReport()
    norm_b = np.linalg.norm(b)
    if norm_b == 0.0:
        report.converged = True
        report.termination = "converged"
        report.residuals = [0.0]
        report.residual_iters = [0]
        report.wall_time = time.perf_counter() - t0
        return x0.copy(), report

    b_eff = (b - (A @ x0)).astype(complex)
    w = -alpha / c
    # step k uses gamma_k and beta_{k-1}: gamma_0 = -alpha, beta_{-1} = 0,
    # then gamma_k = (c/2) T_{k+1}(w)/T_k(w) and beta_k = (c/2) T_k/T_{k+1},
    # with the T-value ratio phi_k advanced as a continued fraction
    phi = w
    gamma, beta = -alpha, 0.0
    r_prev, r = np.zeros_like(b_eff), b_eff.copy()
    x_prev, x = np.zeros_like(b_eff), np.zeros_like(b_eff)

    def true_residual(xv):
        return np.linalg.norm(b_eff - (A @ xv)) / norm_b

    res = np.linalg.norm(r) / norm_b
    report.residual_iters.append(0)
    report.residuals.append(res)
    if res < tol:
        report.converged = True
        report.termination = "converged"
        report.wall_time = time.perf_counter() - t0
        return _maybe_real(x + x0, real_problem), report

    for k in range(maxit):
        x_new = -(r + alpha * x + beta * x_prev) / gamma
        r_new = ((A @ r) - alpha * r - beta * r_prev) / gamma
        x_prev, x = x, x_new
        r_prev, r = r, r_new
        beta = 0.5 * c / phi
        phi = 2.0 * w - 1.0 / phi
        gamma = 0.5 * c * phi
        res = np.linalg.norm(r) / norm_b
        report.increments.append(res)
        report.residual_iters.append(k + 1)
        if (k + 1) % RESIDUAL_EVERY == 0:
            res = true_residual(x)
        report.residuals.append(res)
        if res < tol:
            report.converged = True
            report.termination = "converged"
            report.iterations = k + 1
            report.wall_time = time.perf_counter() - t0
            return _maybe_real(x + x0, real_problem), report
    report.termination = "maxit"
    report.iterations = maxit
    report.wall_time = time.perf_counter() - t0
    return _maybe_real(x + x0, real_problem), report


def akhiezer_solve(
    A: LinearOperator,
    b,
    x0=None,
    *,
    z_shift=0.0,
    bands: BandSystem,
    coeff_source,
    tol: float = 1e-10,
    maxit: int = 2000,
    eigs=None,
):
    """Approximate (A - z I)^{-1} b for spectrum on or near the bands.

    p_k(A)b carriers advance by the three-term recurrence; the update is
    x_{k+1} = x_k + S_k(z) p_k. The report's reference rate is e^{nu(z; A)}
    when eigenvalue estimates are supplied, else e^{-Re g(z)}.
    """
    z = complex(z_shift)
    if abs(z.imag) < 1e-12 and bands.contains(z.real, tol=0.0):
        raise ValueError(f"shift {z} lies on the bands")
    t0 = time.perf_counter()
    b = np.asarray(b)
    real_problem = A.is_real() and not np.iscomplexobj(b) and z.imag == 0.0
    x0 = np.zeros(A.n) if x0 is None else np.asarray(x0)
    report = IterationReport(reference_rate=_reference_rate(bands, z, eigs))
    norm_b = np.linalg.norm(b)
    if norm_b == 0.0:
        report.converged = True
        report.termination = "converged"
        report.residuals = [0.0]
        report.residual_iters = [0]
        report.wall_time = time.perf_counter() - t0
        return x0.copy(), report

    b_eff = (b - ((A @ x0) - z * x0)).astype(complex)
    chunk = 64
    svals = coeff_source.stieltjes_table(z, chunk)
    coeffs = coeff_source.recurrence(chunk)

    p_prev = None
    p = b_eff.copy()
    x = svals[0] * p

    def true_residual(xv):
        return np.linalg.norm(b_eff - ((A @ xv) - z * xv)) / norm_b

    res = true_residual(x)
    report.residual_iters.append(0)
    report.residuals.append(res)
    if res < tol:
        report.converged = True
        report.termination = "converged"
        report.wall_time = time.perf_counter() - t0
        return _maybe_real(x + x0, real_problem), report

    for k in range(1, maxit + 1):
        if k + 1 > chunk:
            chunk = min(2 * chunk, maxit + 2)
            svals = coeff_source.stieltjes_table(z, chunk)
            coeffs = coeff_source.recurrence(chunk)
        a_prev, b_prev = coeffs[k - 1].a, coeffs[k - 1].b
        if k == 1:
            p, p_prev = ((A @ p) - a_prev * p) / b_prev, p
        else:
            b_prev2 = coeffs[k - 2].b
            p, p_prev = ((A @ p) - a_prev * p - b_prev2 * p_prev) / b_prev, p
        x = x + svals[k] * p
        inc = abs(svals[k]) * np.linalg.norm(p) / norm_b
        report.increments.append(inc)
        if k % RESIDUAL_EVERY == 0 or inc < tol:
            res = true_residual(x)
            report.residual_iters.append(k)
            report.residuals.append(res)
            if res < tol:
                report.converged = True
                report.termination = "converged"
                report.iterations = k
                report.wall_time = time.perf_counter() - t0
                return _maybe_real(x + x0, real_problem), report
    report.termination = "maxit"
    report.iterations = maxit
    report.wall_time = time.perf_counter() - t0
    return _maybe_real(x + x0, real_problem), report


def _reference_rate(bands, z, eigs):
    from .greens import build_greens, nu, re_g

    try:
        ev = build_greens(bands)
        if eigs is not None:
            return math.exp(nu(ev, z, eigs))
        return math.exp(-re_g(ev, z))
    except Exception:
        return None


def akhiezer_inverse(
    A: LinearOperator,
    bands: BandSystem,
    coeff_source,
    tol: float = 1e-10,
    maxit: int = 2000,
):
    """Approximate A^{-1} by running the iteration on the identity block."""
    t0 = time.perf_counter()
    n = A.n
    report = IterationReport(reference_rate=_reference_rate(bands, 0.0, None))
    chunk = 64
    svals = coeff_source.stieltjes_table(0.0, chunk)
    coeffs = coeff_source.recurrence(chunk)
    P_prev = None
    P = np.eye(n, dtype=complex)
    X = svals[0] * P
    scale = math.sqrt(n)
    # stop half an order early: entrywise contracts (1/eigenvalue accuracy)
    # are tighter than the Frobenius-mean residual by small factors
    stop = 0.5 * tol

    def true_residual(Xm):
        return np.linalg.norm(np.eye(n) - (A @ Xm)) / scale

    for k in range(1, maxit + 1):
        if k + 1 > chunk:
            chunk = min(2 * chunk, maxit + 2)
            svals = coeff_source.stieltjes_table(0.0, chunk)
            coeffs = coeff_source.recurrence(chunk)
        a_prev, b_prev = coeffs[k - 1].a, coeffs[k - 1].b
        if k == 1:
            P, P_prev = ((A @ P) - a_prev * P) / b_prev, P
        else:
            P, P_prev = ((A @ P) - a_prev * P - coeffs[k - 2].b * P_prev) / b_prev, P
        X = X + svals[k] * P
        inc = abs(svals[k]) * np.linalg.norm(P) / scale
        report.increments.append(inc)
        if k % RESIDUAL_EVERY == 0 or inc < stop:
            res = true_residual(X)
            report.residual_iters.append(k)
            report.residuals.append(res)
            if res < stop:
                report.converged = True
                report.termination = "converged"
                report.iterations = k
                report.wall_time = time.perf_counter() - t0
                return _maybe_real(X, A.is_real()), report
    report.termination = "maxit"
    report.iterations = maxit
    report.wall_time = time.perf_counter() - t0
    return _maybe_real(X, A.is_real()), report


@dataclass(frozen=True)
class QuadratureRule:
    """Trapezoid nodes and weights on circles enclosing each band."""

    nodes: np.ndarray
    weights: np.ndarray
    centers: np.ndarray
    radii: np.ndarray
    counts: tuple


def quadrature_circles(
    bands: BandSystem,
    m_total: int = 200,
    inflate: float = 1.15,
    exclude=(),
) -> QuadratureRule:
    """One circle per band (radius = inflate * half-width), nodes split
    proportionally to band widths by largest remainder, two at minimum.

    Raises if circles intersect each other or enclose an excluded point
    (such as the origin when f has a pole there).
    """
    from .linops import proportional_counts

    g1 = len(bands.bands)
    if m_total < 2 * g1:
        raise ValueError(f"need at least {2 * g1} nodes for {g1} circles")
    counts = proportional_counts(m_total, bands.widths, minimum=2)
    centers = np.array([0.5 * (a + b) for a, b in bands])
    radii = np.array([inflate * 0.5 * (b - a) for a, b in bands])
    for i in range(g1):
        for j in range(i + 1, g1):
            if abs(centers[i] - centers[j]) <= radii[i] + radii[j]:
                raise ValueError(
                    f"circles around bands {i} and {j} intersect; "
                    f"reduce inflate={inflate}"
                )
    for pt in np.atleast_1d(np.asarray(exclude, dtype=complex)):
        if np.any(np.abs(pt - centers) < radii):
            raise ValueError(f"excluded point {pt} falls inside a contour circle")
    nodes, weights = [], []
    for c, r, m in zip(centers, radii, counts):
        theta = 2.0 * math.pi * np.arange(m) / m
        e = np.exp(1j * theta)
        nodes.append(c + r * e)
        weights.append(2j * math.pi * r / m * e)
    return QuadratureRule(
        nodes=np.concatenate(nodes),
        weights=np.concatenate(weights),
        centers=centers,
        radii=radii,
        counts=tuple(counts),
    )


def matfun_apply(
    f,
    A: LinearOperator,
    b,
    bands: BandSystem,
    quad: QuadratureRule,
    coeff_source,
    k_max: int = 2000,
    tol: float = 1e-10,
    callback=None,
):
    """Evaluate f(A)b through the contour representation.

    The expansion coefficient of p_k is alpha_k = -sum_j C_k(z_j) f(z_j) w_j;
    iteration stops once the last five increments |alpha_k| ||p_k|| all fall
    below tol times the norm of the first partial sum. ``callback(k, out)``
    observes every partial sum.
    """
    t0 = time.perf_counter()
    b = np.asarray(b)
    fz = np.asarray([f(z) for z in quad.nodes], dtype=complex)
    if not np.all(np.isfinite(fz)):
        raise ValueError("f is not finite at every quadrature node")
    fw = fz * quad.weights
    chunk = min(k_max + 1, 128)
    alphas = -(coeff_source.cauchy_table(quad.nodes, chunk) @ fw)
    coeffs = coeff_source.recurrence(chunk)

    report = IterationReport()
    p_prev = None
    p = b.astype(complex)
    out = alphas[0] * p
    ref = np.linalg.norm(out)
    if callback is not None:
        callback(0, out)
    recent = []
    for k in range(1, k_max + 1):
        if k + 1 > chunk:
            chunk = min(2 * chunk, k_max + 1)
            alphas = -(coeff_source.cauchy_table(quad.nodes, chunk) @ fw)
            coeffs = coeff_source.recurrence(chunk)
        a_prev, b_prev = coeffs[k - 1].a, coeffs[k - 1].b
        if k == 1:
            p, p_prev = ((A @ p) - a_prev * p) / b_prev, p
        else:
            p, p_prev = ((A @ p) - a_prev * p - coeffs[k - 2].b * p_prev) / b_prev, p
        out = out + alphas[k] * p
        if callback is not None:
            callback(k, out)
        inc = abs(alphas[k]) * np.linalg.norm(p) / ref
        report.increments.append(inc)
        report.residual_iters.append(k)
        report.residuals.append(inc)
        recent.append(inc)
        if len(recent) > 5:
            recent.pop(0)
        if len(recent) == 5 and max(recent) < tol:
            report.converged = True
            report.termination = "converged"
            report.iterations = k
            report.wall_time = time.perf_counter() - t0
            return _maybe_real(out, A.is_real() and not np.iscomplexobj(b)), report
    report.termination = "k_max"
    report.iterations = k_max
    report.wall_time = time.perf_counter() - t0
    return _maybe_real(out, A.is_real() and not np.iscomplexobj(b)), report


def matfun_pole_residue(
    poles_residues,
    A: LinearOperator,
    b,
    bands: BandSystem,
    coeff_source,
    k_max: int = 2000,
    tol: float = 1e-10,
):
    """Evaluate sum_i r_i (A - pole_i I)^{-1} b with shared carriers.

    Each term is a shifted resolvent, so alpha_k = sum_i r_i S_k(pole_i).
    """
    t0 = time.perf_counter()
    b = np.asarray(b)
    poles_residues = list(poles_residues)
    report = IterationReport()
    if not poles_residues:
        report.converged = True
        report.termination = "converged"
        report.wall_time = time.perf_counter() - t0
        return np.zeros_like(b, dtype=float), report
    for pole, _ in poles_residues:
        pole = complex(pole)
        if abs(pole.imag) < 1e-12 and bands.contains(pole.real, tol=1e-12):
            raise ValueError(f"pole {pole} lies on the bands")
    def alphas_for(count):
        acc = np.zeros(count, dtype=complex)
        for pole, res in poles_residues:
            acc += complex(res) * coeff_source.stieltjes_table(complex(pole), count)
        return acc

    chunk = min(k_max + 1, 128)
    alphas = alphas_for(chunk)
    coeffs = coeff_source.recurrence(chunk)

    p_prev = None
    p = b.astype(complex)
    out = alphas[0] * p
    ref = np.linalg.norm(out)
    recent = []
    for k in range(1, k_max + 1):
        if k + 1 > chunk:
            chunk = min(2 * chunk, k_max + 1)
            alphas = alphas_for(chunk)
            coeffs = coeff_source.recurrence(chunk)
        a_prev, b_prev = coeffs[k - 1].a, coeffs[k - 1].b
        if k == 1:
            p, p_prev = ((A @ p) - a_prev * p) / b_prev, p
        else:
            p, p_prev = ((A @ p) - a_prev * p - coeffs[k - 2].b * p_prev) / b_prev, p
        out = out + alphas[k] * p
        inc = abs(alphas[k]) * np.linalg.norm(p) / max(ref, 1e-300)
        report.increments.append(inc)
        report.residual_iters.append(k)
        report.residuals.append(inc)
        recent.append(inc)
        if len(recent) > 5:
            recent.pop(0)
        if len(recent) == 5 and max(recent) < tol:
            report.converged = True
            report.termination = "converged"
            report.iterations = k
            report.wall_time = time.perf_counter() - t0
            return out, report
    report.termination = "k_max"
    report.iterations = k_max
    report.wall_time = time.perf_counter() - t0
    return out, report
