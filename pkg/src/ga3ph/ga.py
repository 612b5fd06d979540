"""Geometric algebra G(2,0) over a generic coefficient ring.

Basis ``e0`` (scalar), ``e1``, ``e2`` (square to +1) and ``e12 = e1 e2``
(squares to -1).  The algebra is isomorphic to real 2x2 matrices through

    x  <->  [[c0 + c1, c2 + c12],
             [c2 - c12, c0 - c1]]

and that map is used throughout the tests as the independent oracle.
"""
from __future__ import annotations

import numbers
from dataclasses import dataclass

import numpy as np

from .errors import ZeroDivisor
from .polyrat import CLUSTER_RTOL, Poly, RatFun, _den_cofactors, _match_roots, poly_roots, ratfun_reduce

REAL_ZERO_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class MV4:
    """Multivector ``c0 e0 + c1 e1 + c2 e2 + c12 e12``.

    Coefficients may be floats, complex numbers, :class:`Poly` or
    :class:`RatFun`; anything closed under ``+``, ``-`` and ``*``.
    """

    c0: object = 0.0
    c1: object = 0.0
    c2: object = 0.0
    c12: object = 0.0

    @property
    def coeffs(self):
        return (self.c0, self.c1, self.c2, self.c12)

    def map(self, fn) -> "MV4":
        return MV4(*(fn(c) for c in self.coeffs))

    def __add__(self, other):
        if not isinstance(other, MV4):
            return NotImplemented
        return MV4(*(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        if not isinstance(other, MV4):
            return NotImplemented
        return MV4(*(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return MV4(*(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, MV4):
            return gp(self, other)
        return MV4(*(a * other for a in self.coeffs))

    def __rmul__(self, other):
        # scalars commute with every basis element
        return MV4(*(other * a for a in self.coeffs))

    def __truediv__(self, other):
        if isinstance(other, MV4):
            return gp(self, mv_inverse(other))
        return MV4(*(a / other for a in self.coeffs))

    def __repr__(self):
        return f"MV4(c0={self.c0!r}, c1={self.c1!r}, c2={self.c2!r}, c12={self.c12!r})"


E0 = MV4(1.0, 0.0, 0.0, 0.0)
E1 = MV4(0.0, 1.0, 0.0, 0.0)
E2 = MV4(0.0, 0.0, 1.0, 0.0)
E12 = MV4(0.0, 0.0, 0.0, 1.0)


def gp(a: MV4, b: MV4) -> MV4:
    """Geometric product ``a b`` (associative, not commutative)."""
    a0, a1, a2, a3 = a.coeffs
    b0, b1, b2, b3 = b.coeffs
    return MV4(
        a0 * b0 + a1 * b1 + a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 - a2 * b3 + a3 * b2,
        a0 * b2 + a2 * b0 + a1 * b3 - a3 * b1,
        a0 * b3 + a3 * b0 + a1 * b2 - a2 * b1,
    )


def conj(a: MV4) -> MV4:
    """Clifford conjugate: flips the sign of the e1, e2 and e12 parts."""
    return MV4(a.c0, -a.c1, -a.c2, -a.c12)


def cnorm(a: MV4):
    """Scalar part of ``conj(a) a``; equals the determinant of the matrix image."""
    return a.c0 * a.c0 - a.c1 * a.c1 - a.c2 * a.c2 + a.c12 * a.c12


def dual(x: MV4) -> MV4:
    return gp(x, E12)


def _is_ring_zero(x, scale=1.0) -> bool:
    if isinstance(x, (RatFun, Poly)):
        return x.is_zero()
    return abs(x) <= REAL_ZERO_RTOL * scale


def mv_inverse(a: MV4) -> MV4:
    """``conj(a) / cnorm(a)``; raises :class:`ZeroDivisor` if the norm vanishes."""
    n = cnorm(a)
    if isinstance(n, Poly):
        raise TypeError("polynomial multivectors are inverted through GaTf")
    scale = 1.0
    if not isinstance(n, RatFun):
        scale = sum(abs(c) ** 2 for c in a.coeffs)
    if _is_ring_zero(n, scale):
        raise ZeroDivisor(f"{a!r} is a zero divisor (Clifford norm {n!r})")
    return conj(a) / n


def mv_to_mat2(x: MV4):
    """2x2 matrix image of ``x``; numpy array for numeric rings, nested list otherwise."""
    c0, c1, c2, c3 = x.coeffs
    m = [[c0 + c1, c2 + c3], [c2 - c3, c0 - c1]]
    if all(isinstance(c, numbers.Number) for c in x.coeffs):
        return np.array(m)
    return m


def mat2_to_mv(m) -> MV4:
    (a, b), (c, d) = m[0], m[1]
    return MV4((a + d) * 0.5, (a - d) * 0.5, (b + c) * 0.5, (b - c) * 0.5)


def mat2_mul(a, b):
    """Product of 2x2 matrices given as nested sequences over any ring."""
    return [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]


def mv_mat_mul(a, b):
    """Product of 2x2 matrices whose entries are multivectors (order kept)."""
    return [
        [gp(a[i][0], b[0][j]) + gp(a[i][1], b[1][j]) for j in range(2)]
        for i in range(2)
    ]


class GaTf:
    """GA-valued transfer function ``n(p) / d(p)`` with a scalar denominator.

    ``n`` is an :class:`MV4` of :class:`Poly`; ``d`` a nonzero :class:`Poly`.
    Construction normalizes ``d`` to be monic; :meth:`reduce` removes factors
    of ``d`` shared by all four numerator coefficients.

    ``roots`` optionally records the roots of ``d`` when they are known
    exactly (e.g. a common denominator assembled from factors); re-deriving
    them from the expanded coefficients loses accuracy for clustered roots.
    """

    __slots__ = ("n", "d", "roots")

    def __init__(self, n: MV4, d=1.0, roots=None):
        d = d if isinstance(d, Poly) else Poly(d)
        if d.is_zero():
            raise ZeroDivisor("GA transfer function with zero denominator")
        n = n.map(lambda c: c if isinstance(c, Poly) else Poly(c))
        if all(c.is_zero() for c in n.coeffs):
            d = Poly([1.0])
        lead = d.lead
        if lead != 1.0:
            n = n.map(lambda c: c / lead)
            d = d / lead
        self.n = n
        self.d = d
        if roots is not None:
            roots = np.asarray(roots, dtype=complex)
            if len(roots) != d.degree:
                roots = None
        self.roots = roots

    # -- constructors ------------------------------------------------------
    @classmethod
    def from_ratfuns(cls, c0=0.0, c1=0.0, c2=0.0, c12=0.0) -> "GaTf":
        parts = [c if isinstance(c, RatFun) else RatFun._coerce(c) for c in (c0, c1, c2, c12)]
        # least common denominator assembled from root lists, so shared
        # factors between coefficient denominators are not repeated
        den_roots = np.zeros(0, dtype=complex)
        for f in parts:
            if f.is_zero() or f.den.degree < 1:
                continue
            r = poly_roots(f.den)
            found, _ = _match_roots(r, [den_roots])
            den_roots = np.concatenate([den_roots, np.delete(r, found)])
        den = Poly.from_roots(den_roots)
        nums = []
        for f in parts:
            if f.is_zero() or f.den.degree < 1:
                nums.append(f.num * den)
                continue
            _, (used,) = _match_roots(poly_roots(f.den), [den_roots])
            nums.append(f.num * Poly.from_roots(np.delete(den_roots, used)))
        return cls(MV4(*nums), den, den_roots).reduce()

    @classmethod
    def from_mv(cls, x: MV4) -> "GaTf":
        return cls.from_ratfuns(*x.coeffs)

    @classmethod
    def scalar(cls, value) -> "GaTf":
        f = value if isinstance(value, RatFun) else RatFun._coerce(value)
        return cls(MV4(f.num, 0.0, 0.0, 0.0), f.den)

    @classmethod
    def const(cls, x: MV4) -> "GaTf":
        return cls(x.map(lambda c: Poly([float(c)])), 1.0)

    @classmethod
    def zero(cls) -> "GaTf":
        return cls(MV4(), 1.0)

    @classmethod
    def identity(cls) -> "GaTf":
        return cls.const(E0)

    # -- views -------------------------------------------------------------
    def _reduced(self, num) -> RatFun:
        return ratfun_reduce(RatFun(num, self.d), den_roots=self.roots)

    def coeff(self, i: int) -> RatFun:
        """Coefficient ``i`` (0..3 for e0, e1, e2, e12) as a reduced RatFun."""
        return self._reduced(self.n.coeffs[i])

    def ratfuns(self):
        return tuple(self.coeff(i) for i in range(4))

    def to_mv(self) -> MV4:
        return MV4(*self.ratfuns())

    def to_mat2(self):
        c0, c1, c2, c3 = self.n.coeffs
        return [
            [self._reduced(c0 + c1), self._reduced(c2 + c3)],
            [self._reduced(c2 - c3), self._reduced(c0 - c1)],
        ]

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.n.coeffs)

    def max_num_abs(self) -> float:
        return max(c.max_abs() for c in self.n.coeffs)

    def __call__(self, p) -> MV4:
        dv = self.d(p)
        return MV4(*(c(p) / dv for c in self.n.coeffs))

    def mat2_at(self, p):
        return mv_to_mat2(self(p))

    def poles(self):
        if self.roots is not None:
            return self.roots.copy()
        return poly_roots(self.d) if self.d.degree >= 1 else np.zeros(0, dtype=complex)

    def is_proper(self) -> bool:
        return all(c.degree <= self.d.degree for c in self.n.coeffs)

    # -- algebra -----------------------------------------------------------
    def reduce(self, rtol=CLUSTER_RTOL) -> "GaTf":
        return gatf_reduce(self, rtol)

    def conj(self) -> "GaTf":
        return GaTf(conj(self.n), self.d, self.roots)

    def cnorm(self) -> RatFun:
        return RatFun(cnorm(self.n), self.d * self.d).reduce()

    def inverse(self) -> "GaTf":
        """``d conj(n) / cnorm(n)``, keeping the denominator scalar."""
        if all(c.is_zero() for c in self.n.coeffs[1:]):
            if self.n.c0.is_zero():
                raise ZeroDivisor(f"{self!r} is a zero divisor (identically-zero Clifford norm)")
            return GaTf(MV4(self.d, Poly(), Poly(), Poly()), self.n.c0).reduce()
        nn = cnorm(self.n)
        if nn.is_zero():
            raise ZeroDivisor(f"{self!r} is a zero divisor (identically-zero Clifford norm)")
        return GaTf(conj(self.n).map(lambda c: c * self.d), nn).reduce()

    @staticmethod
    def _coerce(x):
        if isinstance(x, GaTf):
            return x
        if isinstance(x, MV4):
            return GaTf.const(x)
        if isinstance(x, (numbers.Real, RatFun, Poly)):
            return GaTf.scalar(x)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.d == other.d:
            roots = self.roots if self.roots is not None else other.roots
            return GaTf(self.n + other.n, self.d, roots).reduce()
        c1, c2 = _den_cofactors(self.d, other.d)
        n = self.n.map(lambda c: c * c2) + other.n.map(lambda c: c * c1)
        return GaTf(n, self.d * c2).reduce()

    __radd__ = __add__

    def __neg__(self):
        return GaTf(-self.n, self.d, self.roots)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Real):
            return GaTf(self.n.map(lambda c: c * float(other)), self.d, self.roots)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GaTf(gp(self.n, other.n), self.d * other.d).reduce()

    def __rmul__(self, other):
        if isinstance(other, numbers.Real):
            return self * other
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self

    def __repr__(self):
        return f"GaTf(n={self.n!r}, d={self.d!r})"

    def __str__(self):
        names = ("e0", "e1", "e2", "e12")
        return "\n".join(f"{nm}: {f}" for nm, f in zip(names, self.ratfuns()))


def gatf_reduce(g: GaTf, rtol=CLUSTER_RTOL) -> GaTf:
    """Cancel denominator roots shared by every nonzero numerator coefficient."""
    if g.d.degree < 1 or g.is_zero():
        return g
    nonzero = [i for i, c in enumerate(g.n.coeffs) if not c.is_zero()]
    if any(g.n.coeffs[i].degree < 1 for i in nonzero):
        return g
    rd = g.poles()
    rns = [poly_roots(g.n.coeffs[i]) for i in nonzero]
    cancel_den, cancel_nums = _match_roots(rd, rns, rtol)
    if not cancel_den:
        return g
    coeffs = list(g.n.coeffs)
    for i, roots, drop in zip(nonzero, rns, cancel_nums):
        keep = np.delete(roots, drop)
        coeffs[i] = Poly.from_roots(keep, coeffs[i].lead)
    kept = np.delete(rd, cancel_den)
    return GaTf(MV4(*coeffs), Poly.from_roots(kept, g.d.lead), kept)
