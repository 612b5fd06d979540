"""Youla-parameterized GA controllers for stable plants.

For a stable plant ``G`` every stabilizing unity-feedback controller is

    C = (e0 - Q G)^-1 Q,     Q stable and proper,

and the resulting closed loop is simply ``G Q``.  Choosing
``Q = q0 conj(G) / g0`` makes ``Q G = q0 cnorm(G) / g0`` a scalar, so the
closed loop has no e1, e2, e12 parts: the alpha and beta channels decouple.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import closed_loop
from .errors import AlgebraicLoop, DegeneratePlant, NotSymmetric, PlantNotStable, QNotAdmissible, ZeroDivisor
from .ga import MV4, GaTf, cnorm, conj, gp
from .polyrat import Poly, RatFun, hurwitz_stable, poly_roots

SYMMETRY_RTOL = 1e-8


@dataclass(frozen=True)
class QParam:
    q: GaTf
    q0: float = 1.0
    note: str = ""


@dataclass
class Admissibility:
    ok: bool
    reasons: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


@dataclass(frozen=True)
class DecouplingCheck:
    offdiag_residual: float
    diag: RatFun | None


def _stable_den(d: Poly) -> bool:
    return d.degree < 1 or hurwitz_stable(d)


def q_admissible(q) -> Admissibility:
    """Stable scalar denominator and proper coefficients."""
    g = q.q if isinstance(q, QParam) else q
    reasons = []
    if not _stable_den(g.d):
        bad = [r for r in poly_roots(g.d) if r.real >= 0]
        reasons.append("unstable pole(s) " + ", ".join(f"{complex(r):.6g}" for r in bad))
    for name, c in zip(("e0", "e1", "e2", "e12"), g.n.coeffs):
        if c.degree > g.d.degree:
            reasons.append(f"{name} coefficient improper (numerator degree {c.degree} > denominator degree {g.d.degree})")
    return Admissibility(not reasons, reasons)


def youla_controller(plant: GaTf, q) -> GaTf:
    """``C = (e0 - Q G)^-1 Q`` with Q multiplied on the left of G."""
    g = q.q if isinstance(q, QParam) else q
    if not _stable_den(plant.d):
        raise PlantNotStable(f"plant denominator {plant.d} is not Hurwitz")
    adm = q_admissible(g)
    if not adm:
        raise QNotAdmissible("; ".join(adm.reasons))
    if g.is_zero():
        return GaTf.zero()
    # e0 - Q G = x / (d_q d_p) with x a polynomial multivector
    dd = g.d * plant.d
    x = MV4(dd, Poly(), Poly(), Poly()) - gp(g.n, plant.n)
    try:
        inv = GaTf(x, 1.0).inverse()  # = conj(x)/cnorm(x), or 1/x0 if scalar
    except ZeroDivisor as exc:
        raise AlgebraicLoop("e0 - Q G is not invertible (identically-zero Clifford norm)") from exc
    # (e0 - QG)^-1 Q = d_q d_p inv * n_q / d_q = d_p inv n_q
    num = gp(inv.n, g.n).map(lambda c: c * plant.d)
    return GaTf(num, inv.d).reduce()


def decoupling_q(plant: GaTf) -> QParam:
    """``Q = q0 conj(G) / g0`` with q0 giving the closed loop unity DC gain."""
    n0 = plant.n.c0
    if n0.is_zero():
        raise DegeneratePlant("e0 coefficient of the plant is identically zero")
    # g0(0) / cnorm(G)(0) = n0(0) d(0) / cnorm(n)(0), taken from the raw polynomials
    try:
        q0 = float(n0(0.0) * plant.d(0.0) / cnorm(plant.n)(0.0))
        note = "q0 = g0(0)/cnorm(G)(0) for positive unity DC gain of the closed loop"
    except ZeroDivisionError:
        q0 = np.inf
    if not np.isfinite(q0) or q0 == 0.0:
        q0 = 1.0
        note = "cnorm(G)(0) or g0(0) vanishes; unity DC gain unreachable, q0 = 1"
    q = GaTf(conj(plant.n).map(lambda c: c * q0), n0).reduce()
    adm = q_admissible(q)
    if not adm:
        raise QNotAdmissible("decoupling Q is not admissible: " + "; ".join(adm.reasons))
    return QParam(q, q0, note)


def verify_decoupled(plant: GaTf, ctrl: GaTf, strict: bool = True) -> DecouplingCheck:
    """Off-diagonal size of the real 2x2 closed loop, relative to its diagonal.

    Both sizes are peak magnitudes of the frequency response over
    :func:`frequency_grid`, which makes the ratio independent of the time
    unit carried by p.

    With ``strict`` (default) unequal diagonal entries raise
    :class:`NotSymmetric`; otherwise ``diag`` is returned as ``None``.
    """
    g = closed_loop(plant, ctrl)
    c0, c1, c2, c3 = g.n.coeffs
    w = frequency_grid(g)
    dv = np.abs(g.d(1j * w))
    peak = lambda n: float(np.max(np.abs(n(1j * w)) / dv))
    diag_scale = max(peak(c0 + c1), peak(c0 - c1))
    off = max(peak(c2 + c3), peak(c2 - c3))
    if diag_scale == 0.0:
        residual = 0.0 if off == 0.0 else np.inf
    else:
        residual = off / diag_scale
    asym = peak(c1) / diag_scale if diag_scale > 0 else 0.0
    if asym > SYMMETRY_RTOL:
        if strict:
            exc = NotSymmetric(f"diagonal entries differ (relative size of the e1 part {asym:.3g})")
            exc.offdiag_residual = residual
            raise exc
        return DecouplingCheck(residual, None)
    return DecouplingCheck(residual, g.coeff(0))


def frequency_grid(g: GaTf, points: int = 400) -> np.ndarray:
    """DC plus a log grid three decades around every pole/zero magnitude."""
    mags = [abs(r) for r in g.poles() if abs(r) > 0]
    for c in g.n.coeffs:
        if c.degree >= 1:
            mags += [abs(r) for r in poly_roots(c) if abs(r) > 0]
    lo, hi = (min(mags), max(mags)) if mags else (1.0, 1.0)
    return np.concatenate([[0.0], np.logspace(np.log10(lo) - 3, np.log10(hi) + 3, points)])


def design_decoupling(plant: GaTf):
    """Convenience: ``(QParam, controller, DecouplingCheck)``."""
    q = decoupling_q(plant)
    c = youla_controller(plant, q)
    return q, c, verify_decoupled(plant, c)
