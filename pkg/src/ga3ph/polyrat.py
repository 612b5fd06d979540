"""Real polynomials in the operator ``p`` and their quotients.

Coefficients are stored in ascending degree order as float64 arrays.  Because
the three-phase models carry irrational coefficients (sqrt(3)) the ring is
floating point; common factors are detected by clustering roots rather than by
a symbolic GCD.
"""
from __future__ import annotations

import numbers
import re

import numpy as np

from .errors import DivByZero, NoRoots

# relative size below which a sum of two coefficients is treated as an exact cancellation
CANCEL_RTOL = 1e-12
# relative radius used to decide that a numerator root and a denominator root coincide
CLUSTER_RTOL = 1e-7
# default epsilon of Poly.trim (relative to the largest coefficient)
TRIM_RTOL = 1e-12
MERGE_RTOL = 1e-7


def _as_poly(x):
    if isinstance(x, Poly):
        return x
    if isinstance(x, numbers.Real):
        return Poly([float(x)])
    return NotImplemented


class Poly:
    """Real polynomial ``c[0] + c[1] p + ... + c[n] p**n``.

    The coefficient array is read-only.  Trailing zeros are stripped, so the
    leading coefficient of a nonzero polynomial is always nonzero and the zero
    polynomial is ``Poly([0.0])``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=(0.0,)):
        if isinstance(coeffs, Poly):
            c = coeffs.coeffs.copy()
        else:
            c = np.atleast_1d(np.asarray(coeffs, dtype=float)).copy()
        if c.ndim != 1:
            raise ValueError("polynomial coefficients must be one-dimensional")
        if not np.all(np.isfinite(c)):
            raise ValueError(f"non-finite polynomial coefficient in {c!r}")
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else np.zeros(1)
        c.setflags(write=False)
        self.coeffs = c

    @classmethod
    def from_roots(cls, roots, lead=1.0):
        roots = np.asarray(roots, dtype=complex)
        c = np.array([1.0 + 0j])
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(lead * c.real)

    @classmethod
    def p(cls):
        """The indeterminate itself."""
        return cls([0.0, 1.0])

    # -- structure ---------------------------------------------------------
    @property
    def degree(self) -> int:
        return -1 if self.is_zero() else len(self.coeffs) - 1

    @property
    def lead(self) -> float:
        return float(self.coeffs[-1])

    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0.0

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs)))

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        return Poly(self.coeffs / self.coeffs[-1])

    def trim(self, rtol=TRIM_RTOL) -> "Poly":
        """Drop trailing coefficients below ``rtol * max|coeff|``."""
        c = np.array(self.coeffs)
        tol = rtol * self.max_abs()
        while len(c) > 1 and abs(c[-1]) <= tol:
            c = c[:-1]
        if len(c) == 1 and abs(c[0]) <= tol:
            c = np.zeros(1)
        return Poly(c)

    def derivative(self) -> "Poly":
        if len(self.coeffs) == 1:
            return Poly([0.0])
        return Poly(self.coeffs[1:] * np.arange(1, len(self.coeffs)))

    def roots(self):
        return poly_roots(self)

    # -- evaluation --------------------------------------------------------
    def __call__(self, x):
        x = np.asarray(x)
        out = np.zeros_like(x, dtype=np.result_type(x, float))
        for c in self.coeffs[::-1]:
            out = out * x + c
        return out[()] if out.ndim == 0 else out

    # -- arithmetic --------------------------------------------------------
    def _addsub(self, other, sign):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n)
        b = np.zeros(n)
        a[: len(self.coeffs)] = self.coeffs
        b[: len(other.coeffs)] = other.coeffs
        b *= sign
        c = a + b
        c[np.abs(c) <= CANCEL_RTOL * (np.abs(a) + np.abs(b))] = 0.0
        return Poly(c)

    def __add__(self, other):
        return self._addsub(other, 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        return self._addsub(other, -1.0)

    def __rsub__(self, other):
        return (-self)._addsub(other, 1.0)

    def __neg__(self):
        return Poly(-self.coeffs)

    def __pos__(self):
        return self

    def __mul__(self, other):
        if isinstance(other, numbers.Real):
            return Poly(self.coeffs * float(other))
        if not isinstance(other, Poly):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return Poly([0.0])
        return Poly(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Real):
            if other == 0:
                raise DivByZero("polynomial divided by zero")
            return Poly(self.coeffs / float(other))
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("only non-negative integer powers are supported")
        out = Poly([1.0])
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = _as_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"Poly({self.coeffs.tolist()!r})"

    def __str__(self):
        return format_poly(self)


def poly_from_roots(roots, lead=1.0) -> Poly:
    return Poly.from_roots(roots, lead)


def _polish(c, roots, iters=2):
    """Newton steps on all roots at once; a step is kept only if it lowers |f|."""
    f = Poly(c)
    df = f.derivative()
    out = np.array(roots, dtype=complex)
    fr = np.abs(f(out))
    active = np.ones(out.shape, dtype=bool)
    for _ in range(iters):
        d = df(out)
        active &= d != 0
        if not active.any():
            break
        step = np.zeros_like(out)
        step[active] = f(out[active]) / d[active]
        cand = out - step
        fc = np.abs(f(cand))
        better = active & (fc < fr)
        out[better] = cand[better]
        fr[better] = fc[better]
        active = better
    return out


def _merge_clusters(roots, rtol=MERGE_RTOL):
    """Replace tight root clusters by their mean.

    Floating-point eigenvalues split an m-fold root into a ring of radius
    ~eps^(1/m); the cluster mean is accurate to ~eps.
    """
    roots = np.array(roots, dtype=complex)
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= rtol * max(abs(roots[i]), abs(roots[j])):
                parent[find(i)] = find(j)
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    for members in groups.values():
        if len(members) > 1:
            roots[members] = roots[members].mean()
    return roots


def _conjugate_symmetrize(roots):
    roots = np.asarray(roots, dtype=complex)
    scale = np.maximum(np.abs(roots), np.finfo(float).tiny)
    real_mask = np.abs(roots.imag) <= 1e-12 * scale
    out = list(roots[real_mask].real.astype(complex))
    upper = [r for r in roots[~real_mask] if r.imag > 0]
    lower = [r for r in roots[~real_mask] if r.imag < 0]
    for r in upper:
        if not lower:
            out.append(complex(r.real, 0.0))
            continue
        j = int(np.argmin([abs(r - np.conj(s)) for s in lower]))
        s = lower.pop(j)
        re = 0.5 * (r.real + s.real)
        im = 0.5 * (r.imag - s.imag)
        out.extend([complex(re, im), complex(re, -im)])
    out.extend(complex(s.real, 0.0) for s in lower)
    return np.array(sorted(out, key=lambda z: (z.real, z.imag)), dtype=complex)


def poly_roots(poly: Poly):
    """All ``degree`` roots of ``poly`` with multiplicity.

    Companion-matrix eigenvalues followed by a guarded Newton polish.  Exact
    zero low-order coefficients give exact zero roots, and complex roots are
    returned as exact conjugate pairs.
    """
    poly = Poly(poly) if not isinstance(poly, Poly) else poly
    if poly.degree < 1:
        raise NoRoots(f"polynomial of degree {poly.degree} has no roots")
    c = poly.coeffs
    k = int(np.flatnonzero(c)[0])
    c = c[k:]
    n = len(c) - 1
    if n == 0:
        rest = np.zeros(0, dtype=complex)
    elif n == 1:
        rest = np.array([-c[0] / c[1]], dtype=complex)
    else:
        comp = np.zeros((n, n))
        comp[1:, :-1] = np.eye(n - 1)
        comp[:, -1] = -c[:-1] / c[-1]
        rest = _merge_clusters(_polish(c, np.linalg.eigvals(comp)))
    return _conjugate_symmetrize(np.concatenate([np.zeros(k, dtype=complex), rest]))


def hurwitz_stable(poly: Poly) -> bool:
    """Routh-Hurwitz test: True iff every root has strictly negative real part.

    Roots on the imaginary axis count as unstable.
    """
    if poly.is_zero():
        raise ValueError("stability of the zero polynomial is undefined")
    c = poly.coeffs[::-1] / poly.lead
    if len(c) == 1:
        return True
    if np.any(c <= 0):
        return False
    prev = np.array(c[0::2], dtype=float)
    cur = np.zeros(len(prev))
    cur[: len(c[1::2])] = c[1::2]
    for _ in range(len(c) - 2):
        if cur[0] <= 0:
            return False
        nxt = np.zeros(len(prev))
        for j in range(len(prev) - 1):
            lhs = cur[0] * prev[j + 1]
            rhs = prev[0] * cur[j + 1]
            v = (lhs - rhs) / cur[0]
            if abs(lhs - rhs) <= 8 * np.finfo(float).eps * (abs(lhs) + abs(rhs)):
                v = 0.0
            nxt[j] = v
        prev, cur = cur, nxt
    return bool(cur[0] > 0)


def _match_roots(den_roots, num_root_sets, rtol=CLUSTER_RTOL):
    """Indices of denominator roots shared by every numerator root set.

    Returns ``(cancel_den, cancel_nums)`` where ``cancel_nums[i]`` lists the
    consumed indices into ``num_root_sets[i]``.
    """
    if len(den_roots) == 0:
        return [], [[] for _ in num_root_sets]
    scale = max(1.0, float(np.max(np.abs(den_roots))))
    floor = 1e-12 * scale
    used = [set() for _ in num_root_sets]
    cancel_den = []
    for i, r in enumerate(den_roots):
        picks = []
        for k, roots in enumerate(num_root_sets):
            best, bestd = None, np.inf
            for j, s in enumerate(roots):
                if j in used[k]:
                    continue
                d = abs(r - s)
                if d < bestd:
                    best, bestd = j, d
            if best is None or bestd > max(rtol * max(abs(r), abs(roots[best])), floor):
                picks = None
                break
            picks.append(best)
        if picks is None:
            continue
        cancel_den.append(i)
        for k, j in enumerate(picks):
            used[k].add(j)
    return cancel_den, [sorted(u) for u in used]


def _drop_roots(poly: Poly, roots, drop):
    if not drop:
        return poly
    keep = np.delete(np.asarray(roots), drop)
    return Poly.from_roots(keep, poly.lead)


class RatFun:
    """Quotient ``num / den`` of real polynomials with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num=0.0, den=1.0):
        num = num if isinstance(num, Poly) else Poly(num)
        den = den if isinstance(den, Poly) else Poly(den)
        if den.is_zero():
            raise DivByZero("rational function with zero denominator")
        if num.is_zero():
            den = Poly([1.0])
        lead = den.lead
        self.num = num / lead if lead != 1.0 else num
        self.den = den / lead if lead != 1.0 else den

    @classmethod
    def const(cls, value) -> "RatFun":
        return cls(Poly([float(value)]))

    @classmethod
    def p(cls) -> "RatFun":
        return cls(Poly.p())

    def __call__(self, x):
        return self.num(x) / self.den(x)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_proper(self) -> bool:
        return is_proper(self)

    def poles(self):
        return poly_roots(self.den) if self.den.degree >= 1 else np.zeros(0, dtype=complex)

    def zeros(self):
        return poly_roots(self.num) if self.num.degree >= 1 else np.zeros(0, dtype=complex)

    def dcgain(self) -> float:
        return float(self(0.0))

    def inverse(self) -> "RatFun":
        if self.is_zero():
            raise DivByZero("inverse of the zero rational function")
        return RatFun(self.den, self.num)

    def reduce(self, rtol=CLUSTER_RTOL) -> "RatFun":
        return ratfun_reduce(self, rtol)

    # -- arithmetic --------------------------------------------------------
    @staticmethod
    def _coerce(x):
        if isinstance(x, RatFun):
            return x
        if isinstance(x, Poly):
            return RatFun(x)
        if isinstance(x, numbers.Real):
            return RatFun.const(x)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.den == other.den:
            return ratfun_reduce(RatFun(self.num + other.num, self.den))
        c1, c2 = _den_cofactors(self.den, other.den)
        return ratfun_reduce(RatFun(self.num * c2 + other.num * c1, self.den * c2))

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, numbers.Real):
            return RatFun(self.num * float(other), self.den)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return RatFun()
        # cancel across the operands first so no repeated roots are formed
        x = ratfun_reduce(RatFun(self.num, other.den))
        y = ratfun_reduce(RatFun(other.num, self.den))
        return ratfun_reduce(RatFun(x.num * y.num, x.den * y.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Real):
            if other == 0:
                raise DivByZero("rational function divided by zero")
            return RatFun(self.num / float(other), self.den)
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise DivByZero("division by an identically-zero rational function")
        return self * other.inverse()

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ValueError("only integer powers are supported")
        base = self if n >= 0 else self.inverse()
        out = RatFun.const(1.0)
        for _ in range(abs(n)):
            out = out * base
        return out

    def __repr__(self):
        return f"RatFun({self.num.coeffs.tolist()!r}, {self.den.coeffs.tolist()!r})"

    def __str__(self):
        return format_ratfun(self)


def _den_cofactors(d1: Poly, d2: Poly, rtol=CLUSTER_RTOL):
    """Cofactors ``c1, c2`` with ``d1 c2 = d2 c1 = lcm(d1, d2)`` (monic inputs)."""
    if d1.degree < 1 or d2.degree < 1:
        return d1, d2
    r1, r2 = poly_roots(d1), poly_roots(d2)
    shared1, (shared2,) = _match_roots(r1, [r2], rtol)
    c1 = Poly.from_roots(np.delete(r1, shared1)) if shared1 else d1
    c2 = Poly.from_roots(np.delete(r2, shared2)) if shared2 else d2
    return c1, c2


def ratfun_reduce(f: RatFun, rtol=CLUSTER_RTOL, den_roots=None) -> RatFun:
    """Cancel numerator/denominator roots closer than ``rtol`` (relative).

    ``den_roots`` may supply the denominator roots when they are known more
    accurately than a fresh factorization of the coefficients would give.
    """
    if f.is_zero() or f.num.degree < 1 or f.den.degree < 1:
        return f
    rd = poly_roots(f.den) if den_roots is None else np.asarray(den_roots, dtype=complex)
    rn = poly_roots(f.num)
    cancel_den, (cancel_num,) = _match_roots(rd, [rn], rtol)
    if not cancel_den:
        return f
    if den_roots is not None:
        # the cancelled factor is known accurately: divide it out of the
        # numerator instead of rebuilding it from its own computed roots
        factor = Poly.from_roots(rd[cancel_den])
        q, _ = np.polydiv(f.num.coeffs[::-1], factor.coeffs[::-1])
        num = Poly(np.real_if_close(q)[::-1].astype(float))
    else:
        num = _drop_roots(f.num, rn, cancel_num)
    return RatFun(num, _drop_roots(f.den, rd, cancel_den))


def ratfun_arith(a: RatFun, b: RatFun, op: str) -> RatFun:
    ops = {
        "add": lambda: a + b,
        "sub": lambda: a - b,
        "mul": lambda: a * b,
        "div": lambda: a / b,
    }
    try:
        return ops[op]()
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None


def is_proper(f: RatFun) -> bool:
    return f.num.degree <= f.den.degree


# -- text form ------------------------------------------------------------

def _fmt(x: float, digits: int) -> str:
    s = f"{x:.{digits}g}"
    return "0" if s in ("-0", "0") else s


def format_poly(poly: Poly, var="p", digits=12) -> str:
    """Ascending-power text, e.g. ``22 + 0.003p`` or ``-1 + 2p - p^2``."""
    if poly.is_zero():
        return "0"
    parts = []
    for k, c in enumerate(poly.coeffs):
        if c == 0:
            continue
        mag = _fmt(abs(c), digits)
        if k == 0:
            body = mag
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if mag == "1" else f"{mag}{mono}"
        sign = "-" if c < 0 else "+"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def format_ratfun(f: RatFun, var="p", digits=12) -> str:
    num = format_poly(f.num, var, digits)
    if f.den.degree == 0:
        return num
    if len(np.flatnonzero(f.num.coeffs)) > 1:
        num = f"({num})"
    return f"{num}/({format_poly(f.den, var, digits)})"


_TERM = re.compile(
    r"""\s*([+-])?\s*
        (?:(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)\s*\*?\s*)?
        (p(?:\s*\^\s*(\d+))?)?\s*""",
    re.VERBOSE,
)


def parse_poly(text: str, var="p") -> Poly:
    """Inverse of :func:`format_poly` (also accepts ``*`` and ``**``)."""
    s = text.replace("**", "^").replace(var, "p").strip()
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    coeffs = {}
    pos = 0
    while pos < len(s):
        m = _TERM.match(s, pos)
        if not m or m.end() == pos or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"cannot parse polynomial {text!r} near {s[pos:]!r}")
        if pos > 0 and m.group(1) is None:
            raise ValueError(f"missing operator in polynomial {text!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        mag = float(m.group(2)) if m.group(2) else 1.0
        power = 0 if m.group(3) is None else int(m.group(4) or 1)
        coeffs[power] = coeffs.get(power, 0.0) + sign * mag
        pos = m.end()
    if not coeffs:
        raise ValueError(f"empty polynomial {text!r}")
    c = np.zeros(max(coeffs) + 1)
    for k, v in coeffs.items():
        c[k] = v
    return Poly(c)


def parse_ratfun(text: str, var="p") -> RatFun:
    """Parse ``num`` or ``num/den`` where each side is a polynomial."""
    depth = 0
    split = None
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            if split is not None:
                raise ValueError(f"more than one '/' in {text!r}")
            split = i
    if split is None:
        return RatFun(parse_poly(text, var))
    return RatFun(parse_poly(text[:split], var), parse_poly(text[split + 1:], var))
