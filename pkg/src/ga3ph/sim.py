"""Sampled-data closed-loop simulation in the alpha-beta frame.

The controller is a bank of difference equations obtained by the bilinear
(Tustin) map with frequency prewarping; it runs once per period ``Ts``.
The plant is the continuous real 2x2 model, realized entry by entry in
controllable canonical form and integrated with classical RK4 at
``Ts / substeps`` while the control input is held constant (zero-order hold).
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field, replace
from math import comb

import numpy as np

from .circuits import CLARKE_K, CLARKE_K_PINV
from .errors import BadPrewarp, Diverged, NotRealizable
from .ga import GaTf
from .models import RealMimo2
from .polyrat import RatFun

DIVERGENCE_LIMIT = 1e9
TRACE_COLUMNS = ("t", "ref_alpha", "ref_beta", "y_alpha", "y_beta", "u_alpha", "u_beta", "va", "vb", "vc")


# -- Clarke frame -----------------------------------------------------------
def clarke(sample):
    """abc -> (alpha, beta), amplitude invariant."""
    return CLARKE_K @ np.asarray(sample, dtype=float)


def inv_clarke(ab):
    """(alpha, beta) -> abc with zero common mode."""
    return CLARKE_K_PINV @ np.asarray(ab, dtype=float)


# -- discrete filters -------------------------------------------------------
class DiscreteFilter:
    """Direct-form II transposed IIR section, ``a[0] == 1``.

    ``b`` and ``a`` are coefficients of ascending powers of ``z^-1``.
    """

    def __init__(self, b, a):
        b = np.atleast_1d(np.asarray(b, dtype=float))
        a = np.atleast_1d(np.asarray(a, dtype=float))
        if a[0] == 0.0:
            raise ValueError("a[0] must be nonzero")
        if len(b) > len(a):
            raise NotRealizable("feedforward longer than feedback: filter is not causal")
        b, a = b / a[0], a / a[0]
        n = len(a)
        self.b = np.concatenate([b, np.zeros(n - len(b))])
        self.a = a
        self.state = np.zeros(n - 1)

    @property
    def order(self) -> int:
        return len(self.a) - 1

    def reset(self):
        self.state[:] = 0.0

    def step(self, x: float) -> float:
        s = self.state
        y = self.b[0] * x + (s[0] if len(s) else 0.0)
        for i in range(len(s)):
            nxt = s[i + 1] if i + 1 < len(s) else 0.0
            s[i] = nxt + self.b[i + 1] * x - self.a[i + 1] * y
        return y

    def filter(self, xs) -> np.ndarray:
        return np.array([self.step(float(x)) for x in xs])

    def response(self, z):
        """Transfer function value at ``z``."""
        zi = 1.0 / np.asarray(z, dtype=complex)
        return np.polyval(self.b[::-1], zi) / np.polyval(self.a[::-1], zi)

    def is_static(self) -> bool:
        return self.order == 0 or (np.all(self.b[1:] == 0) and np.all(self.a[1:] == 0))

    def __repr__(self):
        return f"DiscreteFilter(b={self.b.tolist()!r}, a={self.a.tolist()!r})"


def tustin_constant(Ts: float, prewarp_omega: float) -> float:
    """The factor c in ``p <- c (z - 1)/(z + 1)``; ``2/Ts`` without prewarp."""
    if not Ts > 0:
        raise ValueError(f"sample period must be positive, got {Ts!r}")
    if prewarp_omega < 0 or prewarp_omega * Ts >= math.pi:
        raise BadPrewarp(f"prewarp frequency {prewarp_omega!r} rad/s is not below Nyquist for Ts={Ts!r}")
    if prewarp_omega == 0:
        return 2.0 / Ts
    return prewarp_omega / math.tan(prewarp_omega * Ts / 2.0)


def _binomial_poly(i: int, m: int) -> np.ndarray:
    """Coefficients (in z^-1) of ``(1 - z^-1)^i (1 + z^-1)^(m - i)``."""
    minus = np.array([comb(i, k) * (-1.0) ** k for k in range(i + 1)])
    plus = np.array([float(comb(m - i, k)) for k in range(m - i + 1)])
    return np.convolve(minus, plus)


def discretize(f: RatFun, Ts: float, prewarp_omega: float) -> DiscreteFilter:
    """Bilinear map with prewarp: exact frequency response at ``prewarp_omega``."""
    c = tustin_constant(Ts, prewarp_omega)
    if not f.is_proper():
        raise NotRealizable(f"improper transfer function {f}")
    if f.is_zero():
        return DiscreteFilter([0.0], [1.0])
    m = f.den.degree
    b = np.zeros(m + 1)
    a = np.zeros(m + 1)
    for i, ni in enumerate(f.num.coeffs):
        b += ni * c**i * _binomial_poly(i, m)
    for i, di in enumerate(f.den.coeffs):
        a += di * c**i * _binomial_poly(i, m)
    return DiscreteFilter(b, a)


def realize_ga_controller(c, Ts: float, prewarp_omega: float):
    """2x2 list of filters for the real matrix equivalent of ``c``."""
    m = c.to_mat2() if isinstance(c, GaTf) else c.as_matrix()
    bank = [[None, None], [None, None]]
    for i in range(2):
        for j in range(2):
            try:
                bank[i][j] = discretize(m[i][j], Ts, prewarp_omega)
            except NotRealizable as exc:
                raise NotRealizable(f"controller entry ({i + 1},{j + 1}) is improper: {m[i][j]}") from exc
    return bank


def bank_response(bank, z) -> np.ndarray:
    return np.array([[bank[i][j].response(z) for j in range(2)] for i in range(2)], dtype=complex)


# -- continuous plant -------------------------------------------------------
def realize(f: RatFun):
    """Scaled controllable-canonical ``(A, B, C, D)`` of a proper RatFun."""
    if not f.is_proper():
        raise NotRealizable(f"improper plant entry {f}")
    den = f.den.coeffs
    m = len(den) - 1
    num = np.zeros(m + 1)
    num[: len(f.num.coeffs)] = f.num.coeffs
    d = num[m] if m >= 0 else 0.0
    if m == 0:
        return np.zeros((0, 0)), np.zeros((0, 1)), np.zeros((1, 0)), float(num[0])
    resid = num[:m] - d * den[:m]
    A = np.zeros((m, m))
    A[:-1, 1:] = np.eye(m - 1)
    A[-1, :] = -den[:m]
    B = np.zeros((m, 1))
    B[-1, 0] = 1.0
    C = resid.reshape(1, m)
    # state scaling x_i -> w^i x_i keeps the entries of A near w
    w = abs(den[0]) ** (1.0 / m) if den[0] != 0 else 1.0
    t = w ** np.arange(m)
    A = (t[:, None] * A) / t[None, :]
    B = t[:, None] * B
    C = C / t[None, :]
    return A, B, C, float(d)


@dataclass
class StateSpace:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    @classmethod
    def from_mimo(cls, m: RealMimo2) -> "StateSpace":
        blocks = []
        for i, row in enumerate(m.as_matrix()):
            for j, f in enumerate(row):
                blocks.append((i, j, realize(f)))
        n = sum(b[2][0].shape[0] for b in blocks)
        A = np.zeros((n, n))
        B = np.zeros((n, 2))
        C = np.zeros((2, n))
        D = np.zeros((2, 2))
        k = 0
        for i, j, (a, b, c, d) in blocks:
            s = a.shape[0]
            A[k : k + s, k : k + s] = a
            B[k : k + s, j] = b[:, 0]
            C[i, k : k + s] = c[0]
            D[i, j] = d
            k += s
        return cls(A, B, C, D)

    def rk4_step_matrices(self, h: float, substeps: int):
        """``x+ = Phi x + Gamma u`` equal to ``substeps`` RK4 steps with constant u."""
        n = self.A.shape[0]
        I = np.eye(n)
        hA = h * self.A
        hA2 = hA @ hA
        hA3 = hA2 @ hA
        M = I + hA + hA2 / 2 + hA3 / 6 + hA3 @ hA / 24
        N = h * (I + hA / 2 + hA2 / 6 + hA3 / 24) @ self.B
        phi, gamma = I.copy(), np.zeros_like(self.B)
        for _ in range(substeps):
            phi, gamma = M @ phi, M @ gamma + N
        return phi, gamma


# -- configuration and traces ------------------------------------------------
@dataclass
class Step:
    time: float = 0.05
    channel: str = "beta"
    magnitude: float | None = None  # default 0.1 * V


@dataclass
class SimConfig:
    plant: RealMimo2
    controller: object = None  # GaTf or RealMimo2; None means e0
    Ts: float = 1e-4
    substeps: int = 10
    duration: float = 0.1
    V: float = 155.0
    omega: float = 2 * math.pi * 60
    prewarp_omega: float | None = None  # defaults to omega
    step: Step = field(default_factory=Step)
    open_loop: bool = False

    def __post_init__(self):
        if not self.Ts > 0:
            raise ValueError("Ts must be positive")
        if int(self.substeps) < 1:
            raise ValueError("substeps must be at least 1")
        if self.step.channel not in ("alpha", "beta"):
            raise ValueError("step channel must be 'alpha' or 'beta'")
        if not self.step.time < self.duration:
            raise ValueError("step time must precede the end of the run")

    @property
    def step_magnitude(self) -> float:
        return 0.1 * self.V if self.step.magnitude is None else float(self.step.magnitude)

    @property
    def n_samples(self) -> int:
        return int(round(self.duration / self.Ts))


@dataclass
class SimTrace:
    t: np.ndarray
    ref_alpha: np.ndarray
    ref_beta: np.ndarray
    y_alpha: np.ndarray
    y_beta: np.ndarray
    u_alpha: np.ndarray
    u_beta: np.ndarray
    va: np.ndarray
    vb: np.ndarray
    vc: np.ndarray

    def columns(self):
        return [getattr(self, c) for c in TRACE_COLUMNS]

    def __len__(self):
        return len(self.t)

    def truncated(self, n: int) -> "SimTrace":
        return SimTrace(*(c[:n] for c in self.columns()))

    def to_csv(self) -> str:
        out = io.StringIO()
        out.write(",".join(TRACE_COLUMNS) + "\n")
        for row in zip(*self.columns()):
            out.write(",".join(repr(float(v)) for v in row) + "\n")
        return out.getvalue()

    def write_csv(self, path):
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            fh.write(self.to_csv())

    @classmethod
    def read_csv(cls, path) -> "SimTrace":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(*(data[:, k].copy() for k in range(len(TRACE_COLUMNS))))


def references(cfg: SimConfig, with_step=True):
    """Alpha-beta references per controller tick (balanced three-phase source)."""
    n = cfg.n_samples
    t = np.arange(n) * cfg.Ts
    phases = np.array([0.0, -2 * math.pi / 3, 2 * math.pi / 3])
    abc = cfg.V * np.cos(cfg.omega * t[None, :] + phases[:, None])
    ref = CLARKE_K @ abc
    if with_step and cfg.step_magnitude != 0.0:
        k = 0 if cfg.step.channel == "alpha" else 1
        ref[k, t >= cfg.step.time - 0.5 * cfg.Ts] += cfg.step_magnitude
    return t, ref


def run_closed_loop(cfg: SimConfig, with_step: bool = True) -> SimTrace:
    """Simulate ``cfg``; ``with_step=False`` gives the paired no-step run."""
    ctrl = cfg.controller if cfg.controller is not None else GaTf.identity()
    prewarp = cfg.omega if cfg.prewarp_omega is None else cfg.prewarp_omega
    bank = realize_ga_controller(ctrl, cfg.Ts, prewarp)
    ss = StateSpace.from_mimo(cfg.plant)
    phi, gamma = ss.rk4_step_matrices(cfg.Ts / int(cfg.substeps), int(cfg.substeps))
    t, ref = references(cfg, with_step)
    n = len(t)
    y = np.zeros((2, n))
    u = np.zeros((2, n))
    x = np.zeros(ss.A.shape[0])
    u_prev = np.zeros(2)
    for k in range(n):
        # with a direct feedthrough the output depends on the held input
        yk = ss.C @ x + ss.D @ u_prev
        if not np.all(np.isfinite(yk)) or np.max(np.abs(yk)) > DIVERGENCE_LIMIT:
            partial = _assemble(t, ref, y, u, k)
            raise Diverged(f"simulation diverged at t = {float(t[k])!r} s", time=float(t[k]), trace=partial)
        y[:, k] = yk
        e = ref[:, k] if cfg.open_loop else ref[:, k] - yk
        uk = np.array(
            [
                bank[0][0].step(e[0]) + bank[0][1].step(e[1]),
                bank[1][0].step(e[0]) + bank[1][1].step(e[1]),
            ]
        )
        u[:, k] = uk
        x = phi @ x + gamma @ uk
        u_prev = uk
    return _assemble(t, ref, y, u, n)


def _assemble(t, ref, y, u, n) -> SimTrace:
    abc = CLARKE_K_PINV @ y[:, :n]
    return SimTrace(t[:n], ref[0, :n], ref[1, :n], y[0, :n], y[1, :n], u[0, :n], u[1, :n], abc[0], abc[1], abc[2])


# -- metrics ----------------------------------------------------------------
def step_response(trace: SimTrace, cfg: SimConfig, baseline: SimTrace | None = None):
    """Paired-run differences ``(t, dy_alpha, dy_beta)`` from the step onward."""
    if baseline is None:
        baseline = run_closed_loop(cfg, with_step=False)
    mask = trace.t >= cfg.step.time - 0.5 * cfg.Ts
    return (
        trace.t[mask] - trace.t[mask][0],
        (trace.y_alpha - baseline.y_alpha)[mask],
        (trace.y_beta - baseline.y_beta)[mask],
    )


def decoupling_metric(trace: SimTrace, cfg: SimConfig, window: float = 0.02, baseline=None) -> float:
    """Peak deviation of the non-stepped channel, per unit step magnitude."""
    t, da, db = step_response(trace, cfg, baseline)
    other = da if cfg.step.channel == "beta" else db
    sel = t <= window + 1e-12
    return float(np.max(np.abs(other[sel])) / abs(cfg.step_magnitude))


def time_constant(trace: SimTrace, cfg: SimConfig, window: float = 0.02, baseline=None) -> float:
    """First-order time constant of the stepped channel by the area method.

    For ``y = 1 - exp(-t / tau)`` the area between the final value and the
    normalized response is exactly ``tau``; the sum is taken over controller
    samples starting at the step.
    """
    t, da, db = step_response(trace, cfg, baseline)
    own = db if cfg.step.channel == "beta" else da
    sel = t <= window + 1e-12
    own = own[sel]
    final = own[-1]
    if final == 0.0:
        raise ValueError("stepped channel shows no response")
    return float(np.sum(1.0 - own / final) * cfg.Ts)


def tone_amplitude(trace: SimTrace, cfg: SimConfig, cycles: int = 2, end: float | None = None) -> float:
    """Amplitude of ``y_alpha + j y_beta`` at the source frequency (single-bin DFT).

    The window holds ``cycles`` whole periods ending at ``end`` (the step time
    by default), so the start-up transient should be over by ``end`` minus
    the window length.
    """
    end = cfg.step.time if end is None else end
    n = int(round(cycles * 2 * math.pi / cfg.omega / cfg.Ts))
    stop = int(round(end / cfg.Ts))
    if n < 1 or stop - n < 0:
        raise ValueError("tone window does not fit before the requested end time")
    sl = slice(stop - n, stop)
    z = trace.y_alpha[sl] + 1j * trace.y_beta[sl]
    return float(abs(np.sum(z * np.exp(-1j * cfg.omega * trace.t[sl]))) / n)


def with_overrides(cfg: SimConfig, **kw) -> SimConfig:
    return replace(cfg, **kw)
