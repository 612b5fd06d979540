"""Unity negative-feedback closed loops of GA transfer functions.

With ``G = n_p / d_p`` and ``C = n_c / d_c`` (scalar denominators),

    d_pc = d_p d_c e0 + n_p n_c,      d_cl = conj(d_pc) d_pc,
    G C (e0 + G C)^-1 = n_p n_c conj(d_pc) / d_cl.

``d_cl`` is a real polynomial (the non-scalar parts of ``conj(x) x``
vanish identically), so closed-loop stability reduces to a Hurwitz test.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlgebraicLoop
from .ga import MV4, GaTf, conj, gp
from .polyrat import CLUSTER_RTOL, Poly, hurwitz_stable, poly_roots

SCALAR_RTOL = 1e-10
INTERNAL_RTOL = 1e-5


@dataclass(frozen=True)
class ClosedLoopReport:
    g_cl: GaTf
    d_cl: Poly
    minimal_poles: np.ndarray
    stable: bool
    d_pc: MV4
    nonscalar_residual: float


def _as_gatf(x) -> GaTf:
    return x if isinstance(x, GaTf) else GaTf._coerce(x)


def loop_polynomials(plant: GaTf, ctrl: GaTf):
    """``(d_pc, conj(d_pc) d_pc)`` for the loop gain ``G C`` (plant first)."""
    plant, ctrl = _as_gatf(plant), _as_gatf(ctrl)
    dd = plant.d * ctrl.d
    d_pc = gp(plant.n, ctrl.n) + MV4(dd, Poly(), Poly(), Poly())
    return d_pc, gp(conj(d_pc), d_pc)


def _nonscalar_residual(full: MV4) -> float:
    scale = full.c0.max_abs()
    rest = max(c.max_abs() for c in full.coeffs[1:])
    if rest == 0.0:
        return 0.0
    return rest / scale if scale > 0 else np.inf


def char_poly(plant: GaTf, ctrl: GaTf) -> Poly:
    """Unreduced characteristic polynomial ``d_cl``."""
    _, full = loop_polynomials(plant, ctrl)
    res = _nonscalar_residual(full)
    if full.c0.is_zero():
        raise AlgebraicLoop("e0 + G C has an identically-zero Clifford norm")
    if res > SCALAR_RTOL:
        raise ArithmeticError(f"conj(d_pc) d_pc has a non-scalar residual {res:.3g}")
    return full.c0


def closed_loop(plant: GaTf, ctrl: GaTf) -> GaTf:
    """``G C (e0 + G C)^-1``, reduced."""
    plant, ctrl = _as_gatf(plant), _as_gatf(ctrl)
    d_pc, _ = loop_polynomials(plant, ctrl)
    d_cl = char_poly(plant, ctrl)
    loop = gp(plant.n, ctrl.n)
    if all(c.is_zero() for c in d_pc.coeffs[1:]):
        # scalar d_pc: d_cl = d_pc^2 and one factor cancels exactly
        return GaTf(loop, d_pc.c0).reduce()
    return GaTf(gp(loop, conj(d_pc)), d_cl).reduce()


def minimal_poles(plant: GaTf, ctrl: GaTf) -> np.ndarray:
    """Poles of the reduced closed loop.

    When the loop transmission ``G C`` vanishes identically the feedback path
    is open and the closed loop inherits the plant and controller poles.
    """
    plant, ctrl = _as_gatf(plant), _as_gatf(ctrl)
    g = closed_loop(plant, ctrl)
    if g.is_zero():
        d = plant.d * ctrl.d
        return poly_roots(d) if d.degree >= 1 else np.zeros(0, dtype=complex)
    return g.poles()


def is_cl_stable(plant: GaTf, ctrl: GaTf) -> bool:
    return hurwitz_stable(char_poly(plant, ctrl))


def analyze(plant: GaTf, ctrl: GaTf) -> ClosedLoopReport:
    plant, ctrl = _as_gatf(plant), _as_gatf(ctrl)
    d_pc, full = loop_polynomials(plant, ctrl)
    d_cl = char_poly(plant, ctrl)
    return ClosedLoopReport(
        g_cl=closed_loop(plant, ctrl),
        d_cl=d_cl,
        minimal_poles=minimal_poles(plant, ctrl),
        stable=hurwitz_stable(d_cl),
        d_pc=d_pc,
        nonscalar_residual=_nonscalar_residual(full),
    )


def loop_maps(plant: GaTf, ctrl: GaTf, rtol=CLUSTER_RTOL) -> dict:
    """The four maps that define internal stability of the feedback loop.

    ``S = (e0 + G C)^-1`` (reference to error), ``C S`` (reference to
    control), ``S G`` (input disturbance to error) and ``(e0 + C G)^-1``
    (input disturbance to control input).  Each is written over the
    unreduced ``d_cl`` with polynomial numerators and reduced once (root
    matching at ``rtol``), which avoids chaining inversions.
    """
    plant, ctrl = _as_gatf(plant), _as_gatf(ctrl)
    d_pc, _ = loop_polynomials(plant, ctrl)
    d_cl = char_poly(plant, ctrl)
    d_cp = gp(ctrl.n, plant.n) + MV4(plant.d * ctrl.d, Poly(), Poly(), Poly())
    dd = plant.d * ctrl.d
    w = conj(d_pc)
    scale = lambda x, f: x.map(lambda c: c * f)
    return {
        "S": GaTf(scale(w, dd), d_cl).reduce(rtol),
        "CS": GaTf(scale(gp(ctrl.n, w), plant.d), d_cl).reduce(rtol),
        "SG": GaTf(scale(gp(w, plant.n), ctrl.d), d_cl).reduce(rtol),
        "Si": GaTf(scale(conj(d_cp), dd), d_cl).reduce(rtol),
    }


def is_internally_stable(plant: GaTf, ctrl: GaTf, rtol=INTERNAL_RTOL) -> bool:
    """True when all four :func:`loop_maps` have Hurwitz denominators.

    Unlike :func:`is_cl_stable` this does not count roots of ``d_cl`` that
    cancel in every entry of every loop map.  Such roots come from writing
    the controller over a scalar denominator: at a controller pole where the
    numerator matrix drops rank, ``det(d_p d_c I + N_p N_c)`` counts the pole
    once more than the loop actually has.  Youla controllers with unstable
    poles are the typical case.  ``d_cl`` for these loops has repeated roots,
    so the cancellation tolerance is looser than the default clustering one.
    """
    for g in loop_maps(plant, ctrl, rtol).values():
        if g.d.degree >= 1 and not hurwitz_stable(g.d):
            return False
    return True


def slowest_root(poly: Poly) -> complex:
    """Root with the largest real part."""
    r = poly_roots(poly)
    return r[np.argmax(r.real)]
