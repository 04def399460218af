"""Lattice rectangles and fields living on them."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Rect:
    """Inclusive index rectangle ``n_min..n_max`` x ``m_min..m_max``."""

    n_min: int
    n_max: int
    m_min: int
    m_max: int

    def __post_init__(self):
        if self.n_min > self.n_max or self.m_min > self.m_max:
            raise ValueError(f"empty rectangle {self}")

    @classmethod
    def square(cls, size):
        """Sites ``0..size-1`` in both directions."""
        return cls(0, size - 1, 0, size - 1)

    @property
    def shape(self):
        return self.n_max - self.n_min + 1, self.m_max - self.m_min + 1

    def __contains__(self, site):
        n, m = site
        return self.n_min <= n <= self.n_max and self.m_min <= m <= self.m_max

    def sites(self):
        """Row-major order: ``n`` outer, ``m`` inner."""
        for n in range(self.n_min, self.n_max + 1):
            for m in range(self.m_min, self.m_max + 1):
                yield n, m

    def index(self, n, m):
        return n - self.n_min, m - self.m_min


@dataclass
class AngleField:
    """Angle function ``u(n, m)`` on a rectangle."""

    rect: Rect
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.rect.shape:
            raise ValueError(f"values shape {self.values.shape} != rect shape {self.rect.shape}")

    def __call__(self, n, m):
        if (n, m) not in self.rect:
            raise IndexError(f"site {(n, m)} outside {self.rect}")
        return float(self.values[self.rect.index(n, m)])

    def __contains__(self, site):
        return site in self.rect

    def transposed(self):
        r = self.rect
        return AngleField(Rect(r.m_min, r.m_max, r.n_min, r.n_max), self.values.T.copy())


@dataclass
class FrameField:
    """Frames on a rectangle, stored as :class:`~dps.loops.NormalizedLoop` per site.

    ``V_plus``, ``V_minus`` and ``h`` are filled by the loop-group
    construction and left empty by direct integration.
    """

    rect: Rect
    frames: dict
    p: object
    q: object
    V_plus: dict = field(default_factory=dict)
    V_minus: dict = field(default_factory=dict)
    h: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)
    provenance: str = ""

    def __getitem__(self, site):
        return self.frames[site]

    def evaluate(self, site, lam):
        return self.frames[site].evaluate(lam)
