"""2x2 matrix Laurent polynomials in the spectral parameter lambda.

A :class:`LaurentLoop` stores the coefficients ``c_lo .. c_hi`` of
``sum_k c_k lambda**k`` as a read-only ``(hi - lo + 1, 2, 2)`` complex array.
Scalar Laurent polynomials (determinants, normalizers) live in
:class:`ScalarLaurent`.  Frames of the lattice construction are Laurent
polynomials only after the square-root normalizers are stripped; the pair
(polynomial, stripped determinant) is kept together in
:class:`NormalizedLoop` and the square root is taken pointwise at real
positive lambda only.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass

import numpy as np

from .errors import PoleAtZero, SingularFrame, TruncationError

ID2 = np.eye(2, dtype=complex)
SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)

TRIM_TOL = 1e-14


def _frozen(a):
    a = np.array(a, dtype=complex)
    a.flags.writeable = False
    return a


def _check_band(lo, hi, max_band):
    if max_band is not None and hi - lo > max_band:
        raise TruncationError(f"band [{lo}, {hi}] exceeds maximum width {max_band}")


class LoopClass(enum.Enum):
    FULL = "full"
    PLUS_NORMALIZED = "plus_normalized"
    PLUS = "plus"
    MINUS_NORMALIZED = "minus_normalized"
    MINUS = "minus"


@dataclass(frozen=True, eq=False)
class ScalarLaurent:
    lo: int
    coeff: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeff, dtype=complex))
        if c.ndim != 1 or c.size == 0:
            raise ValueError("scalar Laurent coefficients must be a nonempty 1-d array")
        object.__setattr__(self, "coeff", _frozen(c))
        object.__setattr__(self, "lo", int(self.lo))

    @property
    def hi(self):
        return self.lo + len(self.coeff) - 1

    @classmethod
    def constant(cls, c=1.0):
        return cls(0, [c])

    @classmethod
    def from_dict(cls, terms):
        lo, hi = min(terms), max(terms)
        c = np.zeros(hi - lo + 1, dtype=complex)
        for k, v in terms.items():
            c[k - lo] += v
        return cls(lo, c)

    def __getitem__(self, k):
        if self.lo <= k <= self.hi:
            return self.coeff[k - self.lo]
        return 0j

    def __mul__(self, other):
        if isinstance(other, ScalarLaurent):
            return ScalarLaurent(self.lo + other.lo, np.convolve(self.coeff, other.coeff))
        return ScalarLaurent(self.lo, self.coeff * other)

    __rmul__ = __mul__

    def _aligned(self, other):
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        a = np.zeros(hi - lo + 1, dtype=complex)
        b = np.zeros(hi - lo + 1, dtype=complex)
        a[self.lo - lo:self.hi - lo + 1] = self.coeff
        b[other.lo - lo:other.hi - lo + 1] = other.coeff
        return lo, a, b

    def __add__(self, other):
        lo, a, b = self._aligned(other)
        return ScalarLaurent(lo, a + b)

    def __sub__(self, other):
        lo, a, b = self._aligned(other)
        return ScalarLaurent(lo, a - b)

    def evaluate(self, lam):
        lam = complex(lam)
        if lam == 0 and self.lo < 0:
            raise PoleAtZero("scalar Laurent polynomial has negative powers")
        return complex(np.dot(self.coeff, lam ** np.arange(self.lo, self.hi + 1, dtype=float)))

    def band_norm(self):
        return float(np.abs(self.coeff).sum())

    def trimmed(self, tol=TRIM_TOL):
        return ScalarLaurent(*_trim(self.lo, self.coeff, tol))

    def flipped(self):
        """Substitute lambda -> 1/lambda."""
        return ScalarLaurent(-self.hi, self.coeff[::-1])

    def roots(self):
        """Nonzero roots (the factor lambda**lo is ignored)."""
        c = np.trim_zeros(np.asarray(self.coeff), "b")
        if len(c) <= 1:
            return np.array([], dtype=complex)
        return np.roots(c[::-1])


def _trim(lo, coeff, tol):
    mag = np.abs(coeff).reshape(len(coeff), -1).max(axis=1)
    keep = np.nonzero(mag > tol)[0]
    if keep.size == 0:
        return 0, np.zeros((1,) + coeff.shape[1:], dtype=complex)
    a, b = keep[0], keep[-1]
    return lo + int(a), coeff[a:b + 1]


@dataclass(frozen=True, eq=False)
class LaurentLoop:
    lo: int
    coeff: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeff, dtype=complex)
        if c.ndim == 2:
            c = c[None]
        if c.ndim != 3 or c.shape[1:] != (2, 2) or c.shape[0] == 0:
            raise ValueError("loop coefficients must have shape (n, 2, 2)")
        object.__setattr__(self, "coeff", _frozen(c))
        object.__setattr__(self, "lo", int(self.lo))

    # construction

    @classmethod
    def identity(cls):
        return cls(0, ID2[None])

    @classmethod
    def constant(cls, m):
        return cls(0, np.asarray(m, dtype=complex)[None])

    @classmethod
    def monomial(cls, m, k):
        return cls(k, np.asarray(m, dtype=complex)[None])

    @classmethod
    def from_dict(cls, terms):
        """Build from ``{power: 2x2 matrix}``."""
        lo, hi = min(terms), max(terms)
        c = np.zeros((hi - lo + 1, 2, 2), dtype=complex)
        for k, v in terms.items():
            c[k - lo] += np.asarray(v, dtype=complex)
        return cls(lo, c)

    # access

    @property
    def hi(self):
        return self.lo + len(self.coeff) - 1

    @property
    def band(self):
        return self.lo, self.hi

    def __getitem__(self, k):
        if self.lo <= k <= self.hi:
            return self.coeff[k - self.lo]
        return np.zeros((2, 2), dtype=complex)

    def padded(self, lo, hi):
        """Coefficient array on the band ``[lo, hi]`` (must contain the own band)."""
        out = np.zeros((hi - lo + 1, 2, 2), dtype=complex)
        a, b = max(lo, self.lo), min(hi, self.hi)
        if a <= b:
            out[a - lo:b - lo + 1] = self.coeff[a - self.lo:b - self.lo + 1]
        return out

    def entry(self, i, j):
        return ScalarLaurent(self.lo, self.coeff[:, i, j])

    # algebra

    def multiply(self, other, max_band=None):
        return multiply(self, other, max_band=max_band)

    def __matmul__(self, other):
        return multiply(self, other)

    def __add__(self, other):
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return LaurentLoop(lo, self.padded(lo, hi) + other.padded(lo, hi))

    def __sub__(self, other):
        lo, hi = min(self.lo, other.lo), max(self.hi, other.hi)
        return LaurentLoop(lo, self.padded(lo, hi) - other.padded(lo, hi))

    def __neg__(self):
        return LaurentLoop(self.lo, -self.coeff)

    def scale(self, s):
        """Multiply by a complex number or a :class:`ScalarLaurent`."""
        if isinstance(s, ScalarLaurent):
            c = np.zeros((len(self.coeff) + len(s.coeff) - 1, 2, 2), dtype=complex)
            for j, sj in enumerate(s.coeff):
                c[j:j + len(self.coeff)] += sj * self.coeff
            return LaurentLoop(self.lo + s.lo, c)
        return LaurentLoop(self.lo, self.coeff * s)

    def left(self, m):
        """Constant matrix times loop."""
        return LaurentLoop(self.lo, np.asarray(m) @ self.coeff)

    def right(self, m):
        """Loop times constant matrix."""
        return LaurentLoop(self.lo, self.coeff @ np.asarray(m))

    def det(self):
        return det(self)

    def adjugate(self):
        return adjugate(self)

    def evaluate(self, lam):
        return evaluate(self, lam)

    def band_norm(self):
        return float(np.linalg.norm(self.coeff, ord=2, axis=(1, 2)).sum())

    def trimmed(self, tol=TRIM_TOL):
        return LaurentLoop(*_trim(self.lo, self.coeff, tol))

    def flipped(self):
        """Substitute lambda -> 1/lambda."""
        return LaurentLoop(-self.hi, self.coeff[::-1])

    def loop_class(self, tol=0.0):
        """Finest :class:`LoopClass` the loop belongs to (up to ``tol``)."""
        t = self.trimmed(tol) if tol > 0 else self
        if np.all(np.abs(t.coeff) == 0):
            return LoopClass.FULL
        c0_is_id = np.allclose(t[0], ID2, rtol=0, atol=max(tol, 0.0))
        if t.lo >= 0:
            return LoopClass.PLUS_NORMALIZED if c0_is_id else LoopClass.PLUS
        if t.hi <= 0:
            return LoopClass.MINUS_NORMALIZED if c0_is_id else LoopClass.MINUS
        return LoopClass.FULL

    # serialization

    def to_json(self):
        coeff = [[[float(z.real), float(z.imag)] for z in c.reshape(4)] for c in self.coeff]
        return json.dumps({"lo": self.lo, "hi": self.hi, "coeff": coeff})

    @classmethod
    def from_json(cls, text):
        d = json.loads(text) if isinstance(text, str) else text
        c = np.array([[re + 1j * im for re, im in row] for row in d["coeff"]])
        loop = cls(d["lo"], c.reshape(-1, 2, 2))
        if loop.hi != d["hi"]:
            raise ValueError("inconsistent band in serialized loop")
        return loop

    def __repr__(self):
        return f"LaurentLoop(band=[{self.lo}, {self.hi}])"


def multiply(a, b, max_band=None):
    """Cauchy product of two matrix Laurent polynomials."""
    lo, hi = a.lo + b.lo, a.hi + b.hi
    _check_band(lo, hi, max_band)
    if len(a.coeff) > len(b.coeff):
        out = np.zeros((hi - lo + 1, 2, 2), dtype=complex)
        for j, bj in enumerate(b.coeff):
            out[j:j + len(a.coeff)] += a.coeff @ bj
    else:
        out = np.zeros((hi - lo + 1, 2, 2), dtype=complex)
        for j, aj in enumerate(a.coeff):
            out[j:j + len(b.coeff)] += aj @ b.coeff
    return LaurentLoop(lo, out)


def evaluate(loop, lam):
    lam = complex(lam)
    if lam == 0:
        if loop.lo < 0:
            raise PoleAtZero("loop has negative powers of lambda")
        return np.array(loop[0])
    powers = lam ** np.arange(loop.lo, loop.hi + 1, dtype=float)
    return np.tensordot(powers, loop.coeff, axes=1)


def det(loop):
    c = loop.coeff
    a = ScalarLaurent(loop.lo, c[:, 0, 0]) * ScalarLaurent(loop.lo, c[:, 1, 1])
    b = ScalarLaurent(loop.lo, c[:, 0, 1]) * ScalarLaurent(loop.lo, c[:, 1, 0])
    return a - b


def adjugate(loop):
    c = loop.coeff
    out = np.empty_like(c)
    out[:, 0, 0] = c[:, 1, 1]
    out[:, 1, 1] = c[:, 0, 0]
    out[:, 0, 1] = -c[:, 0, 1]
    out[:, 1, 0] = -c[:, 1, 0]
    return LaurentLoop(loop.lo, out)


def lambda_derivative(loop):
    """The loop ``lambda * d/dlambda L`` (again a Laurent polynomial)."""
    k = np.arange(loop.lo, loop.hi + 1)
    return LaurentLoop(loop.lo, loop.coeff * k[:, None, None])


def lambda_log_derivative(loop, lam0):
    """``lambda dL/dlambda L^{-1}`` evaluated at ``lam0``."""
    m = evaluate(loop, lam0)
    if not np.all(np.isfinite(m)) or abs(np.linalg.det(m)) < 1e-300 or np.linalg.cond(m) > 1e13:
        raise SingularFrame(f"loop is singular at lambda={lam0}")
    return evaluate(lambda_derivative(loop), lam0) @ np.linalg.inv(m)


def check_twisted(loop, tol=1e-12):
    """Diagonal entries in even powers only, off-diagonal in odd powers only."""
    k = np.arange(loop.lo, loop.hi + 1)
    c = loop.coeff
    odd = (k % 2) == 1
    diag = np.abs(np.stack([c[:, 0, 0], c[:, 1, 1]], axis=1))
    off = np.abs(np.stack([c[:, 0, 1], c[:, 1, 0]], axis=1))
    return bool(np.all(diag[odd] <= tol) and np.all(off[~odd] <= tol))


def check_unitary_on_ray(loop, lam0, tol=1e-12):
    """Unitarity at a real positive lambda; accepts plain or normalized loops."""
    m = loop.evaluate(lam0)
    return bool(np.abs(m @ m.conj().T - ID2).max() <= tol)


def traceless(m):
    return m - 0.5 * np.trace(m) * ID2


@dataclass(frozen=True, eq=False)
class NormalizedLoop:
    """The SL2 loop ``loop / sqrt(det_plus * det_minus)``.

    ``det_plus`` is a polynomial in lambda with value 1 at 0 and no zeros in
    the closed unit disk, ``det_minus`` the mirror image in 1/lambda, and
    ``det(loop) == det_plus * det_minus``.  Both are positive on the real
    positive axis for all loops built here, which fixes the square root.
    """

    loop: LaurentLoop
    det_plus: ScalarLaurent = ScalarLaurent.constant()
    det_minus: ScalarLaurent = ScalarLaurent.constant()

    @classmethod
    def identity(cls):
        return cls(LaurentLoop.identity())

    @classmethod
    def constant(cls, m):
        return cls(LaurentLoop.constant(m))

    def __matmul__(self, other):
        return self.multiply(other)

    def multiply(self, other, max_band=None):
        return NormalizedLoop(
            multiply(self.loop, other.loop, max_band=max_band),
            self.det_plus * other.det_plus,
            self.det_minus * other.det_minus,
        )

    def inverse(self):
        return NormalizedLoop(adjugate(self.loop), self.det_plus, self.det_minus)

    def left(self, m):
        return NormalizedLoop(self.loop.left(m), self.det_plus, self.det_minus)

    def right(self, m):
        return NormalizedLoop(self.loop.right(m), self.det_plus, self.det_minus)

    def scalar_norm(self, lam):
        """``sqrt(det_plus * det_minus)`` at real positive ``lam``."""
        lam = float(np.real(lam))
        if lam <= 0:
            raise ValueError("normalizers are evaluated on the positive real axis only")
        d = (self.det_plus.evaluate(lam) * self.det_minus.evaluate(lam)).real
        return np.sqrt(d)

    def evaluate(self, lam):
        return evaluate(self.loop, lam) / self.scalar_norm(lam)

    def det_defect(self):
        """Band norm of ``det(loop) - det_plus * det_minus``."""
        return (det(self.loop) - self.det_plus * self.det_minus).band_norm()

    def __repr__(self):
        return f"NormalizedLoop(band=[{self.loop.lo}, {self.loop.hi}])"
