"""Plant representations of a three-phase system in the alpha-beta frame.

* :class:`RealMimo2` -- 2x2 matrix of real transfer functions.
* :class:`ComplexSiso` -- the pair ``G1, G2`` acting on ``u`` and ``conj(u)``.
* :class:`GaSiso` -- a single GA transfer function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .ga import E0, E1, E2, E12, MV4, GaTf, gp, mv_mat_mul
from .polyrat import Poly, RatFun

SQRT3 = math.sqrt(3.0)
BALANCED_RTOL = 1e-9


@dataclass(frozen=True)
class CircuitParams:
    """Line inductance ``L`` [H], unbalanced-phase inductance ``Lu`` [H], load ``R`` [ohm]."""

    L: float = 3e-3
    Lu: float = 3e-2
    R: float = 22.0

    def __post_init__(self):
        for name in ("L", "Lu", "R"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"circuit parameter {name} must be positive, got {v!r}")


DEFAULT_PARAMS = CircuitParams()


@dataclass(frozen=True)
class RealMimo2:
    ga: RatFun
    gb: RatFun
    gc: RatFun
    gd: RatFun

    @classmethod
    def from_matrix(cls, m) -> "RealMimo2":
        return cls(m[0][0], m[0][1], m[1][0], m[1][1])

    @classmethod
    def identity(cls) -> "RealMimo2":
        one, zero = RatFun.const(1.0), RatFun()
        return cls(one, zero, zero, one)

    def as_matrix(self):
        return [[self.ga, self.gb], [self.gc, self.gd]]

    def entries(self):
        return (self.ga, self.gb, self.gc, self.gd)

    def at(self, p):
        """Complex 2x2 frequency-response matrix at ``p``."""
        import numpy as np

        return np.array([[self.ga(p), self.gb(p)], [self.gc(p), self.gd(p)]], dtype=complex)


@dataclass(frozen=True)
class ComplexSiso:
    """``y = G1 u + G2 conj(u)``; each C-TF stored as (real part, imaginary part)."""

    g1: tuple
    g2: tuple

    def g1_at(self, p):
        return self.g1[0](p) + 1j * self.g1[1](p)

    def g2_at(self, p):
        return self.g2[0](p) + 1j * self.g2[1](p)


@dataclass(frozen=True)
class GaSiso:
    g: GaTf


def rl_denominator(params: CircuitParams) -> Poly:
    """``d(p) = 2 (R + L p)(3R + (L + 2 Lu) p)``."""
    L, Lu, R = params.L, params.Lu, params.R
    return Poly([2 * R, 2 * L]) * Poly([3 * R, L + 2 * Lu])


def build_rl_model(params: CircuitParams = DEFAULT_PARAMS, balanced: bool = False) -> RealMimo2:
    """Closed-form alpha-beta model of the RL three-phase circuit.

    The unbalanced variant has inductance ``Lu`` on phase b and ``L`` on
    phases a and c, with the wye load neutral left floating.
    """
    L, Lu, R = params.L, params.Lu, params.R
    if balanced:
        g = RatFun(Poly([R]), Poly([R, L]))
        return RealMimo2(g, RatFun(), RatFun(), g)
    d = rl_denominator(params)
    ga = RatFun(Poly([2 * R, L + Lu]) * (3 * R), d).reduce()
    off = RatFun(Poly([0.0, -SQRT3 * R * (L - Lu)]), d).reduce()
    gd = RatFun(Poly([6 * R, 5 * L + Lu]) * R, d).reduce()
    return RealMimo2(ga, off, off, gd)


def real_to_complex(m: RealMimo2) -> ComplexSiso:
    g1 = ((m.ga + m.gd) * 0.5, (m.gc - m.gb) * 0.5)
    g2 = ((m.ga - m.gd) * 0.5, (m.gb + m.gc) * 0.5)
    return ComplexSiso(g1, g2)


def complex_to_real(c: ComplexSiso) -> RealMimo2:
    (r1, i1), (r2, i2) = c.g1, c.g2
    return RealMimo2(r1 + r2, i2 - i1, i2 + i1, r1 - r2)


def real_to_ga(m: RealMimo2) -> GaSiso:
    """Coefficient map ``g0=(Ga+Gd)/2, g1=(Ga-Gd)/2, g2=(Gb+Gc)/2, g12=(Gb-Gc)/2``."""
    g = GaTf.from_ratfuns(
        (m.ga + m.gd) * 0.5,
        (m.ga - m.gd) * 0.5,
        (m.gb + m.gc) * 0.5,
        (m.gb - m.gc) * 0.5,
    )
    return GaSiso(g)


def ga_to_real(g) -> RealMimo2:
    g = g.g if isinstance(g, GaSiso) else g
    return RealMimo2.from_matrix(g.to_mat2())


def tg_matrix():
    """The involutive transformation ``1/2 [[e0+e1, -e2+e12], [-e2-e12, e0-e1]]``."""
    h = 0.5
    return [
        [(E0 + E1) * h, (E12 - E2) * h],
        [(-E2 - E12) * h, (E0 - E1) * h],
    ]


def conjugate_by_tg(m: RealMimo2):
    """``T_G M T_G`` with the real entries embedded as scalar multivectors."""
    t = tg_matrix()
    embedded = [[MV4(f, RatFun(), RatFun(), RatFun()) for f in row] for row in m.as_matrix()]
    return mv_mat_mul(mv_mat_mul(t, embedded), t)


def real_to_ga_by_conjugation(m: RealMimo2) -> GaTf:
    """Upper-left entry of ``T_G M T_G``.

    With ``e12 = e1 e2`` this route yields the e2/e12 parts with the opposite
    sign of :func:`real_to_ga`; the two agree up to the automorphism
    ``x -> e1 x e1`` (see :func:`reflect_e1`).
    """
    return GaTf.from_mv(conjugate_by_tg(m)[0][0])


def reflect_e1(x):
    """``e1 x e1``: negates the e2 and e12 parts."""
    if isinstance(x, GaTf):
        return GaTf(gp(gp(E1.map(lambda c: Poly([c])), x.n), E1.map(lambda c: Poly([c]))), x.d, x.roots)
    return gp(gp(E1, x), E1)


def _scale_of(entries) -> float:
    return max([f.num.max_abs() for f in entries if not f.is_zero()], default=0.0)


def _negligible(f: RatFun, scale: float, rtol=BALANCED_RTOL) -> bool:
    return f.is_zero() or f.num.max_abs() < rtol * scale


def is_balanced(model, rtol=BALANCED_RTOL) -> bool:
    """True when the conjugate-input channel G2 vanishes (no e1, e2 parts)."""
    if isinstance(model, RealMimo2):
        model = real_to_ga(model)
    g = model.g if isinstance(model, GaSiso) else model
    parts = g.ratfuns()
    scale = _scale_of(parts)
    if scale == 0.0:
        return True
    return all(_negligible(f, scale, rtol) for f in parts[1:3])


def reference_model(params: CircuitParams = DEFAULT_PARAMS, balanced=False) -> GaSiso:
    return real_to_ga(build_rl_model(params, balanced))
