"""Band systems: finite unions of disjoint closed real intervals."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BandSystem:
    """Ordered disjoint intervals [a_1,b_1], ..., [a_{g+1},b_{g+1}].

    The genus g is the number of gaps. Endpoints must be strictly
    increasing: a_1 < b_1 < a_2 < ... < b_{g+1}.
    """

    bands: tuple

    def __post_init__(self):
        bands = tuple((float(a), float(b)) for a, b in self.bands)
        object.__setattr__(self, "bands", bands)
        flat = [e for ab in bands for e in ab]
        if len(flat) < 2:
            raise ValueError("need at least one band")
        if not all(x < y for x, y in zip(flat, flat[1:])):
            raise ValueError(f"band endpoints must be strictly increasing: {flat}")

    @classmethod
    def from_endpoints(cls, endpoints) -> "BandSystem":
        endpoints = [float(e) for e in endpoints]
        if len(endpoints) % 2 != 0:
            raise ValueError("need an even number of endpoints")
        return cls(tuple(zip(endpoints[::2], endpoints[1::2])))

    @property
    def genus(self) -> int:
        return len(self.bands) - 1

    @property
    def endpoints(self) -> np.ndarray:
        return np.array([e for ab in self.bands for e in ab])

    @property
    def widths(self) -> np.ndarray:
        return np.array([b - a for a, b in self.bands])

    @property
    def gaps(self) -> tuple:
        return tuple(
            (self.bands[j][1], self.bands[j + 1][0]) for j in range(self.genus)
        )

    def contains(self, x, tol: float = 0.0) -> bool:
        """Whether a real point lies on the (closed) band system."""
        x = float(x)
        return any(a - tol <= x <= b + tol for a, b in self.bands)

    def __iter__(self):
        return iter(self.bands)

    def __str__(self):
        return " U ".join(f"[{a:g},{b:g}]" for a, b in self.bands)
