"""Adaptive band selection for symmetric operators.

If the spectrum is not contained in the working bands, the matrix
polynomials p_j(A)b grow like e^{j max Re g(lambda)}. Measuring that growth
rate r and root-finding e^{Re g(x)} = r around each endpoint yields new
bands that contain the spectrum. Variants: the plain four-endpoint sweep,
a one-endpoint-at-a-time sweep with accept/revert on the measured rate, a
Rayleigh-quotient version that pins endpoints to extremal eigenvalues, and
a symmetric-interval version that only moves the outer endpoint.

The growth estimate runs the three-term recurrence on normalized carriers
and accumulates log norms, so overflow never enters; what "sufficiently
large" means for the window (n, k) is problem dependent, and one automatic
doubling retry is built in for the cases where two consecutive windows
disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bands import BandSystem
from .greens import build_greens, re_g
from .linops import LinearOperator

GROWTH_EPS = 0.02  # r < 1 + eps counts as bounded polynomial norms


@dataclass(frozen=True)
class AdaptConfig:
    gamma_o: float = 5.0
    gamma_i: float = 0.7
    growth_n: int = 20
    growth_k: int = 10
    bisect_tol: float = 1e-8
    max_rounds: int = 40

    def __post_init__(self):
        if not self.gamma_o > 1:
            raise ValueError("gamma_o must exceed 1")
        if not 0 < self.gamma_i < 1:
            raise ValueError("gamma_i must lie in (0,1)")


def _carrier_lognorms(A: LinearOperator, b, coeffs, count: int) -> np.ndarray:
    """log ||p_j(A) b|| for j = 0..count via normalized carriers."""
    v = np.asarray(b, dtype=float)
    lognorm = math.log(np.linalg.norm(v))
    v = v / np.linalg.norm(v)
    out = [lognorm]
    prev = np.zeros_like(v)
    prev_scale = 0.0  # ||p_{j-1}|| / ||p_j||
    for j in range(count):
        a_j, b_j = coeffs[j].a, coeffs[j].b
        bprev = coeffs[j - 1].b if j > 0 else 0.0
        w = ((A @ v) - a_j * v - bprev * prev_scale * prev) / b_j
        s = np.linalg.norm(w)
        if not np.isfinite(s) or s == 0.0:
            raise FloatingPointError("carrier norm collapsed or overflowed")
        prev, v = v, w / s
        prev_scale = 1.0 / s
        lognorm += math.log(s)
        out.append(lognorm)
    return np.array(out)


def growth_rate(A, b, bands: BandSystem, coeff_source, n: int, k: int) -> float:
    """Estimated per-degree growth factor of ||p_j(A)b||,
    (||p_{n+k}|| / ||p_n||)^{1/k}, with one automatic window-doubling retry
    when two consecutive windows disagree by more than 10%."""
    if n < 1 or k < 1:
        raise ValueError("need n, k >= 1")
    for attempt in range(2):
        src = coeff_source(bands) if callable(coeff_source) else coeff_source
        coeffs = src.recurrence(n + 2 * k + 1)
        logs = _carrier_lognorms(A, b, coeffs, n + 2 * k)
        r1 = math.exp((logs[n + k] - logs[n]) / k)
        r2 = math.exp((logs[n + 2 * k] - logs[n + k]) / k)
        if abs(r1 - r2) <= 0.1 * r2 or attempt == 1:
            return r2
        n, k = 2 * n, 2 * k
    return r2


def _bisect(f, lo: float, hi: float, tol: float, max_steps: int = 60):
    """Root of f by bisection; None when the bracket has no sign change."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0:
        return None
    for _ in range(max_steps):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo < tol:
            return mid
        if flo * fm < 0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _endpoint_brackets(bands: BandSystem, cfg: AdaptConfig):
    """Search brackets per endpoint, outer ones scaled by gamma_o away from
    zero and inner ones by gamma_i toward zero."""
    (a1, b1), (a2, b2) = bands.bands
    return [
        (cfg.gamma_o * a1, a1),
        (b1, cfg.gamma_i * b1),
        (cfg.gamma_i * a2, a2),
        (b2, cfg.gamma_o * b2),
    ]


def _moved_endpoint(ev, bands: BandSystem, cfg: AdaptConfig, idx: int, r: float):
    """New value for endpoint ``idx`` from bisection of e^{Re g} - r on its
    bracket, falling back to the gamma move when no sign change exists."""
    lo, hi = _endpoint_brackets(bands, cfg)[idx]
    span = bands.endpoints[-1] - bands.endpoints[0]

    def f(xx):
        return math.exp(re_g(ev, xx)) - r

    root = _bisect(f, lo, hi, cfg.bisect_tol * span)
    if root is not None:
        return float(root)
    # gamma fallback: outer endpoints push outward, inner ones pull inward
    return lo if idx in (0, 2) else hi


def _replace(bands: BandSystem, idx: int, value: float) -> BandSystem:
    flat = list(bands.endpoints)
    flat[idx] = value
    return BandSystem.from_endpoints(flat)


def _validate_two_band_start(bands: BandSystem):
    if bands.genus != 1:
        raise ValueError("adaptation runs on two-band systems")
    (a1, b1), (a2, b2) = bands.bands
    if not (b1 < 0.0 < a2):
        raise ValueError("initial bands must straddle zero (b_1 < 0 < a_2)")


def adapt_bisection(
    A, b, bands0: BandSystem, cfg: AdaptConfig, coeff_source, return_trace=False
):
    """Four-endpoint sweep per round until polynomial growth ceases.

    Each round measures one growth rate r, freezes the Green's function of
    the current bands, and moves all four endpoints to the r-level set (or
    by the gamma fallback)."""
    _validate_two_band_start(bands0)
    bands = bands0
    trace = [tuple(bands.endpoints)]
    for _ in range(cfg.max_rounds):
        r = growth_rate(A, b, bands, coeff_source, cfg.growth_n, cfg.growth_k)
        if r < 1.0 + GROWTH_EPS:
            break
        ev = build_greens(bands)
        for idx in range(4):
            bands = _replace(bands, idx, _moved_endpoint(ev, bands, cfg, idx, r))
        trace.append(tuple(bands.endpoints))
    else:
        raise RuntimeError(f"no containment after {cfg.max_rounds} rounds")
    return (bands, trace) if return_trace else bands


def adapt_one_at_a_time(
    A, b, bands0: BandSystem, cfg: AdaptConfig, coeff_source, return_trace=False
):
    """Endpoint-at-a-time variant with accept/revert on the measured rate.

    Each endpoint in turn takes the same level-curve move as the plain
    sweep (with the Green's function rebuilt after every accepted move), and
    the move is kept only when the freshly measured growth rate does not
    increase. Rounds continue until growth has ceased and a full cycle
    produces no accepted move."""
    _validate_two_band_start(bands0)
    bands = bands0
    trace = [tuple(bands.endpoints)]
    r = growth_rate(A, b, bands, coeff_source, cfg.growth_n, cfg.growth_k)
    for _ in range(cfg.max_rounds):
        if r < 1.0 + GROWTH_EPS:
            break
        accepted = False
        for idx in range(4):
            ev = build_greens(bands)
            candidate = _replace(
                bands, idx, _moved_endpoint(ev, bands, cfg, idx, r)
            )
            r_new = growth_rate(
                A, b, candidate, coeff_source, cfg.growth_n, cfg.growth_k
            )
            if r_new <= r:
                bands, r = candidate, r_new
                accepted = True
        trace.append(tuple(bands.endpoints))
        if not accepted:
            # wedged: every move reverted, nothing left to try
            break
    else:
        if r >= 1.0 + GROWTH_EPS:
            raise RuntimeError(f"no containment after {cfg.max_rounds} rounds")
    return (bands, trace) if return_trace else bands


def _rayleigh_extremal(
    A, b, bands: BandSystem, coeff_source, degree: int = 50, matvec_budget=100_000
):
    """Eigenvalue with the largest Re g for the given bands, by iterating the
    normalized filter y <- p_degree(A) y / ||.|| and taking the Rayleigh
    quotient once it stabilizes to 1e-12 relative.

    Returns (eigenvalue, per-degree growth, converged flag); the flag is
    False on stagnation, where the quotient is still a valid point in the
    numerical-range hull and safe to pin an endpoint to."""
    src = coeff_source(bands) if callable(coeff_source) else coeff_source
    coeffs = src.recurrence(degree + 1)
    y = np.asarray(b, dtype=float)
    y = y / np.linalg.norm(y)
    quot = None
    growth = 1.0
    outer_cap = min(200, max(5, matvec_budget // degree))
    for _ in range(outer_cap):
        prev = np.zeros_like(y)
        prev_scale = 0.0
        v = y.copy()
        logn = 0.0
        for j in range(degree):
            a_j, b_j = coeffs[j].a, coeffs[j].b
            bprev = coeffs[j - 1].b if j > 0 else 0.0
            w = ((A @ v) - a_j * v - bprev * prev_scale * prev) / b_j
            s = np.linalg.norm(w)
            if not np.isfinite(s) or s == 0.0:
                raise FloatingPointError("filter carrier norm collapsed")
            prev, v = v, w / s
            prev_scale = 1.0 / s
            logn += math.log(s)
        y = v
        growth = math.exp(logn / degree)
        new_quot = float(y @ (A @ y))
        if quot is not None and abs(new_quot - quot) <= 1e-12 * max(1.0, abs(quot)):
            return new_quot, growth, True
        quot = new_quot
    return quot, growth, False


RAYLEIGH_DEGREE = 50
RAYLEIGH_DEGREE_CAP = 51_200  # 50 * 8**k ladder tops out above this


def _growth_floor(degree: int) -> float:
    """Per-degree growth below which a degree-``degree`` filter cannot tell
    an outside eigenvalue from the polynomial growth of an eigenvalue
    sitting exactly on a band endpoint (|p_n| there grows like n)."""
    return (2.0 * degree) ** (1.0 / degree)


def adapt_rayleigh(
    A, b, bands0: BandSystem, cfg: AdaptConfig, coeff_source, return_trace=False
):
    """Pin every endpoint to its extremal eigenvalue via filtered power
    iterations and Rayleigh quotients.

    While growth is detected, the dominant outside eigenvalue is computed
    and the nearest endpoint moved onto it. Once the spectrum is contained,
    each endpoint not yet pinned is probed by pulling it inward (gamma_i)
    and pinning it to the extremal eigenvalue that becomes exposed.

    Eigenvalues pinned onto endpoints keep producing polynomial carrier
    growth, which limits what one filter degree can resolve; whenever the
    measurement goes blind or the quotient stagnates while endpoints may
    still be off their eigenvalues, the filter degree escalates
    geometrically and the re-pinning continues, so clustered extremes are
    resolved to the accuracy the degree cap allows."""
    _validate_two_band_start(bands0)
    bands = bands0
    trace = [tuple(bands.endpoints)]
    pinned = [False] * 4
    depth = [1, 1, 1, 1]
    scale = float(np.max(np.abs(bands.endpoints)))
    degree = RAYLEIGH_DEGREE
    sources: dict = {}

    def _source(bnds):
        key = tuple(bnds.endpoints)
        if key not in sources:
            sources[key] = (
                coeff_source(bnds) if callable(coeff_source) else coeff_source
            )
        return sources[key]

    for _ in range(cfg.max_rounds):
        lam, growth, conv = _rayleigh_extremal(A, b, bands, _source(bands), degree)
        outside = not bands.contains(lam, tol=1e-12 * scale)
        at_cap = degree >= RAYLEIGH_DEGREE_CAP
        if outside and growth >= _growth_floor(degree) and (conv or at_cap):
            # a quotient that stagnated at the degree cap is still a valid
            # point above the endpoint; pinning it keeps the re-pinning
            # cascade moving toward the extremal eigenvalue
            idx = int(np.argmin(np.abs(bands.endpoints - lam)))
            bands = _replace(bands, idx, lam)
            pinned[idx] = True
            trace.append(tuple(bands.endpoints))
            continue
        if outside and not conv and not at_cap:
            degree = min(8 * degree, RAYLEIGH_DEGREE_CAP)
            continue
        if all(pinned):
            if not at_cap:
                degree = min(8 * degree, RAYLEIGH_DEGREE_CAP)
                continue
            break
        idx = pinned.index(False)
        probe = _pull_inward(bands, cfg, idx, depth[idx])
        lam, growth, conv = _rayleigh_extremal(A, b, probe, _source(probe), degree)
        exposed = (
            growth >= _growth_floor(degree)
            and not probe.contains(lam, tol=1e-12 * scale)
        )
        if (conv or at_cap) and exposed:
            candidate = list(bands.endpoints)
            candidate[idx] = lam
            if all(x < y for x, y in zip(candidate, candidate[1:])):
                bands = _replace(bands, idx, lam)
                pinned[idx] = True
                trace.append(tuple(bands.endpoints))
                continue
            pinned[idx] = True
        elif not conv and not at_cap:
            # a crawling quotient means a barely separated exposure:
            # resolve it with a sharper filter
            degree = min(8 * degree, RAYLEIGH_DEGREE_CAP)
        elif cfg.gamma_i ** depth[idx] > 0.02:
            # converged but nothing exposed: this band's spectrum sits
            # deeper, pull the probe endpoint further
            depth[idx] += 1
        else:
            pinned[idx] = True
        trace.append(tuple(bands.endpoints))
    else:
        raise RuntimeError(f"bands not resolved after {cfg.max_rounds} rounds")
    return (bands, trace) if return_trace else bands


def _pull_inward(bands: BandSystem, cfg: AdaptConfig, idx: int, depth: int = 1):
    """Probe bands with one endpoint pulled toward its band's opposite end
    by gamma_i^depth of the band width, exposing the spectrum near it."""
    (a1, b1), (a2, b2) = bands.bands
    anchors = [b1, a1, b2, a2]
    e = bands.endpoints[idx]
    a = anchors[idx]
    return _replace(bands, idx, a + cfg.gamma_i ** depth * (e - a))


def symmetric_simple_adapt(
    A, b, a: float, b_out: float, cfg: AdaptConfig, coeff_source, return_trace=False
):
    """Adapt only the outer endpoint of symmetric bands [-b,-a] U [a,b].

    Re g is maximized at zero on [-a, a], so containment (and hence
    convergence of the zero-shift solve) only requires pushing b outward
    until growth ceases."""
    if not 0 < a < b_out:
        raise ValueError("need 0 < a < b")
    bands = BandSystem.from_endpoints([-b_out, -a, a, b_out])
    trace = [tuple(bands.endpoints)]
    for _ in range(cfg.max_rounds):
        r = growth_rate(A, b, bands, coeff_source, cfg.growth_n, cfg.growth_k)
        if r < 1.0 + GROWTH_EPS:
            break
        ev = build_greens(bands)
        out = bands.endpoints[-1]
        span = bands.endpoints[-1] - bands.endpoints[0]

        def f(xx):
            return math.exp(re_g(ev, xx)) - r

        root = _bisect(f, out, cfg.gamma_o * out, cfg.bisect_tol * span)
        new_out = float(root) if root is not None else cfg.gamma_o * out
        bands = BandSystem.from_endpoints([-new_out, -a, a, new_out])
        trace.append(tuple(bands.endpoints))
    else:
        raise RuntimeError(f"no containment after {cfg.max_rounds} rounds")
    return (bands, trace) if return_trace else bands
