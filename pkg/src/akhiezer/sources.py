"""Coefficient sources: recurrence coefficients and Stieltjes data on demand.

The iterations only ever ask three questions: the recurrence pair (a_k, b_k),
the Stieltjes transforms S_k(z) at one shift, and the Cauchy integrals
C_k(z_j) at a batch of quadrature nodes. A source answers them for one band
system.

``ClosedFormSource`` is the two-band fast path built on the theta-function
formulas; everything is O(1) per query. ``DiscretizedSource`` covers any
number of bands and either weight family through the discretized Stieltjes
procedure; Stieltjes tables at a shift are produced by quadrature of the two
highest-degree integrals followed by the stable backward tridiagonal fill.
"""

from __future__ import annotations

import math

import numpy as np

from .bands import BandSystem
from .polynomials import (
    AkhiezerParams,
    RecurrencePair,
    build_params,
    cauchy_integral,
    recurrence_coeffs,
)
from . import stieltjes_proc as sp

TWO_PI_I = 2j * math.pi


class ClosedFormSource:
    """Two-band source backed by the closed-form Akhiezer expressions."""

    def __init__(self, bands: BandSystem):
        if bands.genus != 1:
            raise ValueError("closed-form source requires exactly two bands")
        self.bands = bands
        self.params: AkhiezerParams = build_params(bands)
        self._coeffs: list[RecurrencePair] = []

    def recurrence(self, count: int) -> list[RecurrencePair]:
        while len(self._coeffs) < count:
            self._coeffs.append(recurrence_coeffs(len(self._coeffs), self.params))
        return self._coeffs[:count]

    def stieltjes_table(self, z, count: int) -> np.ndarray:
        return TWO_PI_I * self.cauchy_table(np.array([z]), count)[:, 0]

    def cauchy_table(self, zs, count: int) -> np.ndarray:
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        out = np.empty((count, zs.size), dtype=complex)
        for n in range(count):
            out[n] = cauchy_integral(n, zs, self.params)
        return out


class DiscretizedSource:
    """Any-genus source backed by the discretized Stieltjes procedure.

    ``kind`` picks the weight family ("akhiezer" or "reciprocal"). Recurrence
    coefficients are grown geometrically since the procedure is O(N^2);
    per-shift Stieltjes tables are seeded by adaptive quadrature at the top
    two degrees and backfilled downward.
    """

    def __init__(self, bands: BandSystem, kind: str = sp.AKHIEZER_KIND):
        self.bands = bands
        self.weight = sp.WeightSpec(bands, kind=kind)
        self._coeffs: list[RecurrencePair] = []
        self._tables: dict[complex, np.ndarray] = {}

    def recurrence(self, count: int) -> list[RecurrencePair]:
        if len(self._coeffs) < count:
            target = max(count, 2 * len(self._coeffs), 64)
            self._coeffs = sp.coeffs_by_stieltjes(self.weight, target - 1)
        return self._coeffs[:count]

    def stieltjes_table(self, z, count: int) -> np.ndarray:
        """S_0(z)..S_{count-1}(z) by the normalized backward fill.

        Trial values seeded with (1, 0) far enough above the requested
        range are filled downward (the decaying solution dominates that
        direction) and scaled so the inhomogeneous first recurrence row
        holds exactly; the buffer doubles until the scaled C_0 stabilizes
        to 1e-12 relative.
        """
        z = complex(z)
        tab = self._tables.get(z)
        if tab is None or tab.size < count:
            n_top = max(count, 64)
            buffer = 32
            prev = None
            while True:
                coeffs = self.recurrence(n_top + buffer + 2)
                cvals = _normalized_backward_fill(n_top + buffer, z, coeffs)
                if prev is not None and (
                    abs(cvals[0] - prev) <= 1e-12 * abs(cvals[0])
                    or buffer > 8192
                ):
                    break
                prev = cvals[0]
                buffer *= 2
            tab = TWO_PI_I * cvals
            self._tables[z] = tab
        return tab[:count]

    def cauchy_table(self, zs, count: int) -> np.ndarray:
        zs = np.atleast_1d(np.asarray(zs, dtype=complex))
        coeffs = self.recurrence(count)
        return sp.cauchy_table_on_grid(self.weight, coeffs, count - 1, zs)


def _normalized_backward_fill(N: int, z: complex, coeffs) -> np.ndarray:
    """C_0(z)..C_N(z) by backward recurrence from trial seeds (1, 0),
    rescaled through the inhomogeneous row (a_0 - z) C_0 + b_0 C_1 = 1/(2 pi i).

    The trial vector grows like the reciprocal of the decaying solution on
    the way down, so it is renormalized whenever it threatens overflow; the
    final scaling is unaffected.
    """
    a = [rp.a for rp in coeffs]
    b = [rp.b for rp in coeffs]
    v_next2, v_next = 0.0 + 0.0j, 1.0 + 0.0j
    out = np.empty(N + 1, dtype=complex)
    for n in range(N, -1, -1):
        v = ((z - a[n + 1]) * v_next - b[n + 1] * v_next2) / b[n]
        out[n] = v
        if abs(v) > 1e120:
            out[n:] /= v
            v_next2, v_next, v = v_next2 / v, v_next / v, 1.0 + 0.0j
        v_next2, v_next = v_next, v
    scale = (1.0 / TWO_PI_I) / ((a[0] - z) * out[0] + b[0] * out[1])
    return out * scale


def default_source(bands: BandSystem, kind: str | None = None):
    """Closed form for two bands unless a weight kind forces the discretized
    route; the reciprocal family always goes through the latter."""
    if bands.genus == 1 and kind in (None, sp.AKHIEZER_KIND):
        return ClosedFormSource(bands)
    return DiscretizedSource(bands, kind=kind or sp.AKHIEZER_KIND)
