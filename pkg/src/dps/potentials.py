"""Discrete normalized and generalized potentials and their ordered products.

One-variable data are stored as :class:`Table` objects (an integer start
index plus values); reading outside the table is an error, never an
extrapolation.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, NonDiagonalAtInfinity
from .loops import ID2, LaurentLoop, NormalizedLoop, ScalarLaurent


@dataclass(frozen=True, eq=False)
class Table:
    """Values of a function of one lattice index on ``start .. start+len-1``."""

    start: int
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @property
    def stop(self):
        return self.start + len(self.values) - 1

    def __call__(self, i):
        if not self.start <= i <= self.stop:
            raise IndexError(f"index {i} outside table range [{self.start}, {self.stop}]")
        return float(self.values[i - self.start])

    def __len__(self):
        return len(self.values)

    @classmethod
    def constant(cls, value, start, stop):
        return cls(start, np.full(stop - start + 1, float(value)))

    @classmethod
    def linear(cls, slope, offset, start, stop):
        i = np.arange(start, stop + 1)
        return cls(start, offset + slope * i)

    @classmethod
    def sinusoidal(cls, amplitude, frequency, phase, offset, start, stop):
        i = np.arange(start, stop + 1)
        return cls(start, offset + amplitude * np.sin(frequency * i + phase))


def delta_plus_sq(p):
    """``1 + (p/2)^2 lambda^2``."""
    return ScalarLaurent(0, [1.0, 0.0, (p / 2) ** 2])


def delta_minus_sq(q):
    """``1 + (q/2)^2 lambda^-2``."""
    return ScalarLaurent(-2, [(q / 2) ** 2, 0.0, 1.0])


def _offdiag(a, b):
    return np.array([[0, a], [b, 0]], dtype=complex)


def xi_plus_loop(p, alpha):
    return LaurentLoop(0, [ID2, 0.5j * p * _offdiag(np.exp(-1j * alpha), np.exp(1j * alpha))])


def xi_minus_loop(q, beta):
    return LaurentLoop(-1, [-0.5j * q * _offdiag(np.exp(1j * beta), np.exp(-1j * beta)), ID2])


def xi_plus_unnormalized(pot, n):
    """``Delta_+ xi_+(n)`` as a Laurent polynomial."""
    return xi_plus_loop(pot.p(n), pot.alpha(n))


def xi_minus_unnormalized(pot, m):
    """``Delta_- xi_-(m)`` as a Laurent polynomial."""
    return xi_minus_loop(pot.q(m), pot.beta(m))


def a_plus(q):
    """``A_+`` of the worked examples: ``xi_+`` with ``p = q`` and ``alpha = 0``."""
    return NormalizedLoop(xi_plus_loop(q, 0.0), det_plus=delta_plus_sq(q))


def a_minus(q):
    """``A_-`` of the worked examples (note the sign: ``+(i/2) q`` becomes ``-``)."""
    return NormalizedLoop(xi_minus_loop(q, 0.0), det_minus=delta_minus_sq(q))


def diag_phase(x):
    """``diag(e^{ix}, e^{-ix})``."""
    return np.diag([np.exp(1j * x), np.exp(-1j * x)])


def _check_bounds(name, table):
    v = np.abs(table.values) / 2
    if np.any(v <= 0) or np.any(v >= 1):
        bad = table.start + int(np.argmax((v <= 0) | (v >= 1)))
        raise ConfigError(f"|{name}/2| must lie in (0, 1); violated at index {bad} "
                          f"({name}={table(bad)})")


class _Products:
    """Append-only cache of ordered products, filled under a lock."""

    def __init__(self, init, step):
        self._init = init
        self._step = step
        self._cache = {0: init}
        self._lock = threading.Lock()

    def __call__(self, n, max_band=None):
        got = self._cache.get(n)
        if got is not None:
            return got
        with self._lock:
            direction = 1 if n > 0 else -1
            k = 0
            while k + direction in self._cache:
                k += direction
            cur = self._cache[k]
            while k != n:
                if direction > 0:
                    cur = cur.multiply(self._step(k), max_band=max_band)
                else:
                    cur = cur.multiply(self._step(k - 1).inverse(), max_band=max_band)
                k += direction
                self._cache[k] = cur
            return cur


def _as_normalized(m):
    if m is None:
        return NormalizedLoop.identity()
    if isinstance(m, NormalizedLoop):
        return m
    if isinstance(m, LaurentLoop):
        return NormalizedLoop(m)
    return NormalizedLoop.constant(m)


@dataclass(frozen=True, eq=False)
class PotentialPair:
    """Normalized potential data ``alpha(n), beta(m), p(n), q(m)``.

    Tables must cover every step used: ``alpha``/``p`` at ``n`` define the step
    ``n -> n+1``.  The loop-group construction is stated for ``alpha(0) = 0``;
    potentials read off a generic surface have ``alpha(0) = (u(1,0) - u(0,0))/2``
    and the construction still goes through, so ``require_alpha0=False``
    admits them.
    """

    alpha: Table
    beta: Table
    p: Table
    q: Table
    F_init: Optional[np.ndarray] = None
    G_init: Optional[np.ndarray] = None
    check: bool = True
    require_alpha0: bool = True
    _F: _Products = field(init=False, repr=False)
    _G: _Products = field(init=False, repr=False)

    def __post_init__(self):
        if self.check:
            self.validate()
        object.__setattr__(self, "_F", _Products(_as_normalized(self.F_init), self.step_n))
        object.__setattr__(self, "_G", _Products(_as_normalized(self.G_init), self.step_m))

    def validate(self):
        if (self.require_alpha0 and self.alpha.start <= 0 <= self.alpha.stop
                and abs(self.alpha(0)) > 1e-14):
            raise ConfigError(f"alpha(0) must vanish, got {self.alpha(0)}")
        _check_bounds("p", self.p)
        _check_bounds("q", self.q)

    @property
    def n_range(self):
        return max(self.alpha.start, self.p.start), min(self.alpha.stop, self.p.stop)

    @property
    def m_range(self):
        return max(self.beta.start, self.q.start), min(self.beta.stop, self.q.stop)

    def xi_plus(self, n):
        p = self.p(n)
        return NormalizedLoop(xi_plus_loop(p, self.alpha(n)), det_plus=delta_plus_sq(p))

    def xi_minus(self, m):
        q = self.q(m)
        return NormalizedLoop(xi_minus_loop(q, self.beta(m)), det_minus=delta_minus_sq(q))

    step_n = xi_plus
    step_m = xi_minus

    def F_plus(self, n, max_band=None):
        return self._F(n, max_band)

    def G_minus(self, m, max_band=None):
        return self._G(m, max_band)

    def k_increment(self, n):
        """``2 alpha(n) - theta_l(n) + theta_r(n)`` (no dressing here)."""
        return 2.0 * self.alpha(n)


@dataclass(frozen=True, eq=False)
class DressedPotential:
    """Generalized potentials ``eta_n = Pl_- xi_+ Pr_-``, ``eta_m = Pl_+ xi_- Pr_+``.

    Dressing factors are callables of one index returning a loop (plain
    matrix, :class:`LaurentLoop` or :class:`NormalizedLoop`); ``None`` means
    the identity.  Initial conditions may be constant matrices or loops.
    """

    base: PotentialPair
    P_minus_left: Optional[Callable] = None
    P_minus_right: Optional[Callable] = None
    P_plus_left: Optional[Callable] = None
    P_plus_right: Optional[Callable] = None
    F_init: object = None
    G_init: object = None
    _F: _Products = field(init=False, repr=False)
    _G: _Products = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_F", _Products(_as_normalized(self.F_init), self.step_n))
        object.__setattr__(self, "_G", _Products(_as_normalized(self.G_init), self.step_m))

    @property
    def p(self):
        return self.base.p

    @property
    def q(self):
        return self.base.q

    @property
    def alpha(self):
        return self.base.alpha

    @property
    def beta(self):
        return self.base.beta

    @property
    def n_range(self):
        return self.base.n_range

    @property
    def m_range(self):
        return self.base.m_range

    @staticmethod
    def _factor(f, i):
        return _as_normalized(None if f is None else f(i))

    def step_n(self, n):
        return (self._factor(self.P_minus_left, n) @ self.base.xi_plus(n)
                @ self._factor(self.P_minus_right, n))

    def step_m(self, m):
        return (self._factor(self.P_plus_left, m) @ self.base.xi_minus(m)
                @ self._factor(self.P_plus_right, m))

    def F_plus(self, n, max_band=None):
        return self._F(n, max_band)

    def G_minus(self, m, max_band=None):
        return self._G(m, max_band)

    def theta(self, side, n):
        f = self.P_minus_left if side == "l" else self.P_minus_right
        return theta_at_infinity(self._factor(f, n))

    def k_increment(self, n):
        return 2.0 * self.alpha(n) - self.theta("l", n) + self.theta("r", n)


def theta_at_infinity(P, tol=1e-12):
    """Angle ``theta`` with ``P(lambda=inf) = diag(e^{i theta/2}, e^{-i theta/2})``."""
    loop = P.loop.trimmed(0.0)
    if loop.hi > 0 or P.det_plus.trimmed(0.0).hi > 0:
        raise NonDiagonalAtInfinity("dressing factor has positive powers of lambda")
    scale = P.det_minus[0] * P.det_plus[0]
    v = loop[0] / np.sqrt(scale)
    if abs(v[0, 1]) > tol or abs(v[1, 0]) > tol:
        raise NonDiagonalAtInfinity(f"off-diagonal part {max(abs(v[0, 1]), abs(v[1, 0])):.2e} at infinity")
    return 2.0 * float(np.angle(v[0, 0]))


@dataclass(frozen=True)
class DiagonalCorrection:
    """``k(n)`` on a range of ``n`` containing 0, with ``D(n) = diag(e^{ik/2}, e^{-ik/2})``."""

    start: int
    values: tuple

    def k(self, n):
        i = n - self.start
        if not 0 <= i < len(self.values):
            raise IndexError(f"k({n}) outside computed range")
        return self.values[i]

    def D(self, n):
        return diag_phase(0.5 * self.k(n))


def diagonal_correction(pot, n_min=None, n_max=None):
    """Alternating sums ``k(n+1) = -k(n) - (2 alpha - theta_l + theta_r)(n)``, ``k(0) = 0``."""
    lo, hi = pot.n_range
    n_min = lo if n_min is None else n_min
    n_max = hi + 1 if n_max is None else n_max
    ks = {0: 0.0}
    for n in range(0, n_max):
        ks[n + 1] = -ks[n] - pot.k_increment(n)
    for n in range(-1, n_min - 1, -1):
        ks[n] = -ks[n + 1] - pot.k_increment(n)
    return DiagonalCorrection(n_min, tuple(ks[n] for n in range(n_min, n_max + 1)))


def normalized_potential(alpha, beta, p, q, n_range, m_range, F_init=None, G_init=None,
                         require_alpha0=True):
    """Convenience constructor from scalars, arrays or callables.

    ``n_range = (n_min, n_max)`` are the lattice sites; steps are needed on
    ``n_min .. n_max - 1`` and tables are sized accordingly.
    """
    def table(v, lo, hi):
        if isinstance(v, Table):
            return v
        if callable(v):
            return Table(lo, [v(i) for i in range(lo, hi + 1)])
        v = np.asarray(v, dtype=float)
        if v.ndim == 0:
            return Table.constant(float(v), lo, hi)
        return Table(lo, v)

    n0, n1 = n_range
    m0, m1 = m_range
    return PotentialPair(table(alpha, n0, n1), table(beta, m0, m1),
                         table(p, n0, n1), table(q, m0, m1), F_init, G_init,
                         require_alpha0=require_alpha0)
