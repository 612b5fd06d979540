"""Shared comparison and random-instance helpers for the test-suite."""
import numpy as np

from ga3ph.ga import MV4, GaTf
from ga3ph.polyrat import Poly, RatFun


def coeff_close(poly, expected, rtol=1e-10):
    """Ascending coefficient arrays agree relative to the largest coefficient."""
    a = np.asarray(poly.coeffs if isinstance(poly, Poly) else poly, dtype=float)
    b = np.asarray(expected, dtype=float)
    n = max(len(a), len(b))
    a = np.pad(a, (0, n - len(a)))
    b = np.pad(b, (0, n - len(b)))
    scale = max(np.max(np.abs(b)), 1e-300)
    return np.max(np.abs(a - b)) <= rtol * scale


def ratfun_close(f, pair, rtol=1e-10):
    """``f`` equals the (num, den) pair with monic den, coefficient-wise."""
    if pair is None:
        return f.is_zero()
    num, den = pair
    return coeff_close(f.den, den, rtol) and coeff_close(f.num, num, rtol)


def ratfun_value_close(f, g, rtol=1e-9, points=None):
    pts = points if points is not None else [0.3j, 1.0 + 2j, 50j, 700j, 9000j, -3.0 + 40j]
    for s in pts:
        a, b = f(s), g(s)
        if abs(a - b) > rtol * max(1.0, abs(a), abs(b)):
            return False
    return True


def random_stable_poly(rng, degree, lo=0.5, hi=20.0):
    """Monic Hurwitz polynomial with real or complex-pair roots."""
    roots = []
    while len(roots) < degree:
        if degree - len(roots) >= 2 and rng.random() < 0.3:
            re = -rng.uniform(lo, hi)
            im = rng.uniform(0.2, hi)
            roots += [complex(re, im), complex(re, -im)]
        else:
            roots.append(-rng.uniform(lo, hi))
    return Poly.from_roots(roots)


def random_poly(rng, degree, scale=2.0):
    return Poly(rng.uniform(-scale, scale, degree + 1))


def random_ratfun(rng, num_deg=1, den_deg=2):
    return RatFun(random_poly(rng, num_deg), random_stable_poly(rng, den_deg))


def random_gatf(rng, den_deg=2, num_deg=None):
    num_deg = den_deg if num_deg is None else num_deg
    n = MV4(*(random_poly(rng, num_deg) for _ in range(4)))
    return GaTf(n, random_stable_poly(rng, den_deg))


def random_real_mv(rng):
    return MV4(*rng.normal(size=4))


# -- real 2x2 matrix route (independent of the GA product) -------------------
def rmat_mul(a, b):
    return [[a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)] for i in range(2)]


def rmat_closed_loop(m, c):
    """``M C (I + M C)^-1`` entirely in RatFun matrix arithmetic."""
    loop = rmat_mul(m, c)
    one = RatFun.const(1.0)
    a, b = loop[0][0] + one, loop[0][1]
    cc, d = loop[1][0], loop[1][1] + one
    det = a * d - b * cc
    inv = [[d / det, -b / det], [-cc / det, a / det]]
    return [[f.reduce() for f in row] for row in rmat_mul(loop, inv)]


def pmat_closed_loop(plant, ctrl):
    """Matrix-fraction form of ``M C (I + M C)^-1`` from polynomial matrices.

    With ``M = N_m / d_m`` and ``C = N_c / d_c`` (polynomial matrix images of
    the GA numerators), ``P = N_m N_c`` and ``D = d_m d_c`` give
    ``T = P adj(D I + P) / det(D I + P)``, with no intermediate divisions.
    """
    nm = [[c for c in row] for row in _poly_image(plant.n)]
    nc = [[c for c in row] for row in _poly_image(ctrl.n)]
    p = rmat_mul(nm, nc)
    dd = plant.d * ctrl.d
    a, b, c, d = p[0][0] + dd, p[0][1], p[1][0], p[1][1] + dd
    det = a * d - b * c
    adj = [[d, -b], [-c, a]]
    t = rmat_mul(p, adj)
    return [[RatFun(f, det).reduce() for f in row] for row in t]


def _poly_image(n):
    c0, c1, c2, c3 = n.coeffs
    return [[c0 + c1, c2 + c3], [c2 - c3, c0 - c1]]


def lcm_roots(root_sets, rtol=1e-6):
    """Multiset union (maximum multiplicity) of several root lists."""
    out = []
    for roots in root_sets:
        pool = list(out)
        extra = []
        for r in roots:
            j = next((k for k, s in enumerate(pool) if abs(s - r) <= rtol * max(1.0, abs(r))), None)
            if j is None:
                extra.append(r)
            else:
                pool.pop(j)
        out += extra
    return np.array(out, dtype=complex)


def matrix_poles(entries):
    return lcm_roots([f.poles() for f in entries if not f.is_zero() and f.den.degree >= 1])


def roots_match(a, b, rtol=1e-6):
    """Pairwise match of two root multisets, relative to each root's size."""
    a, b = list(a), list(b)
    if len(a) != len(b):
        return False
    for r in a:
        j = min(range(len(b)), key=lambda k: abs(b[k] - r))
        if abs(b[j] - r) > rtol * max(1.0, abs(r)):
            return False
        b.pop(j)
    return True


# -- acceptance reporting ----------------------------------------------------
ACCEPTANCE = {}


def report(number, ok, detail):
    """Record and print one pass/fail line for an acceptance criterion."""
    line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok
