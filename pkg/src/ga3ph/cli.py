"""``ga3ph`` command-line front end.

Exit codes: 0 success, 2 parse/config/netlist errors, 3 algebraic loop,
4 synthesis failure, 5 simulation divergence, 6 improper (unrealizable)
controller.
"""
from __future__ import annotations

import argparse
import configparser
import math
import sys
from dataclasses import dataclass, field
from importlib import resources

from . import analysis, circuits, models, sim, synthesis
from .errors import (
    AlgebraicLoop,
    BadPrewarp,
    ConfigError,
    DegeneratePlant,
    Diverged,
    NetlistError,
    NotRealizable,
    NotSymmetric,
    PlantNotStable,
    QNotAdmissible,
)
from .ga import MV4, GaTf
from .polyrat import format_ratfun, parse_ratfun
from .svgplot import trace_svg

EXIT_OK, EXIT_PARSE, EXIT_LOOP, EXIT_SYNTH, EXIT_DIVERGED, EXIT_IMPROPER = 0, 2, 3, 4, 5, 6

# section -> key -> converter
CONFIG_SCHEMA = {
    "circuit": {"L": float, "Lu": float, "R": float, "balanced": "bool"},
    "source": {"V": float, "freq_hz": float},
    "sim": {
        "Ts": float,
        "duration": float,
        "substeps": int,
        "step_time": float,
        "step_channel": str,
        "step_magnitude": float,
    },
    "controller": {"type": str, "k": float, "e0": str, "e1": str, "e2": str, "e12": str},
}
POSITIVE = {"L", "Lu", "R", "V", "freq_hz", "Ts", "duration", "substeps"}
CONTROLLER_TYPES = ("proportional", "decoupling", "custom", "identity")


@dataclass
class RunConfig:
    L: float = 3e-3
    Lu: float = 3e-2
    R: float = 22.0
    balanced: bool = False
    V: float = 155.0
    freq_hz: float = 60.0
    Ts: float = 1e-4
    duration: float = 0.1
    substeps: int = 10
    step_time: float = 0.05
    step_channel: str = "beta"
    step_magnitude: float | None = None
    controller: str = "decoupling"
    k: float = 10.0
    coeffs: dict = field(default_factory=dict)

    @property
    def params(self) -> models.CircuitParams:
        return models.CircuitParams(self.L, self.Lu, self.R)


def load_config(path) -> RunConfig:
    """Read a sectioned ``key = value`` file; unknown sections or keys are errors."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str  # keys are case-sensitive (L vs Lu)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    cfg = RunConfig()
    for section in cp.sections():
        if section not in CONFIG_SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        schema = CONFIG_SCHEMA[section]
        for key, raw in cp.items(section):
            if key not in schema:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            conv = schema[key]
            try:
                if conv == "bool":
                    value = cp.getboolean(section, key)
                else:
                    value = conv(raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {section}.{key}: {raw!r}") from exc
            if key in POSITIVE and not value > 0:
                raise ConfigError(f"{section}.{key} must be positive, got {raw!r}")
            if section == "controller" and key in ("e0", "e1", "e2", "e12"):
                cfg.coeffs[key] = value
            elif section == "controller" and key == "type":
                if value not in CONTROLLER_TYPES:
                    raise ConfigError(f"controller type must be one of {CONTROLLER_TYPES}, got {value!r}")
                cfg.controller = value
            else:
                setattr(cfg, key, value)
    if cfg.step_channel not in ("alpha", "beta"):
        raise ConfigError("sim.step_channel must be 'alpha' or 'beta'")
    return cfg


# -- shared helpers ---------------------------------------------------------
def _run_config(args) -> RunConfig:
    cfg = load_config(args.config) if getattr(args, "config", None) else RunConfig()
    if getattr(args, "balanced", None) is not None:
        cfg.balanced = args.balanced
    if getattr(args, "controller", None):
        cfg.controller = args.controller
    if getattr(args, "k", None) is not None:
        cfg.k = args.k
    for item in getattr(args, "coeff", None) or []:
        name, _, expr = item.partition("=")
        if name not in ("e0", "e1", "e2", "e12") or not expr:
            raise ConfigError(f"--coeff expects NAME=EXPR with NAME in e0,e1,e2,e12, got {item!r}")
        cfg.coeffs[name] = expr
    return cfg


def plant_mimo(cfg: RunConfig) -> models.RealMimo2:
    return models.build_rl_model(cfg.params, cfg.balanced)


def build_controller(cfg: RunConfig, plant: GaTf) -> GaTf:
    if cfg.controller == "proportional":
        return GaTf.const(MV4(cfg.k, cfg.k, 0.0, 0.0))
    if cfg.controller == "identity":
        return GaTf.identity()
    if cfg.controller == "decoupling":
        q = synthesis.decoupling_q(plant)
        return synthesis.youla_controller(plant, q)
    if cfg.controller == "custom":
        try:
            parts = [parse_ratfun(cfg.coeffs.get(n, "0")) for n in ("e0", "e1", "e2", "e12")]
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return GaTf.from_ratfuns(*parts)
    raise ConfigError(f"unknown controller type {cfg.controller!r}")


def bundled_netlist(name: str = "rl_unbalanced.cir") -> str:
    return resources.files("ga3ph").joinpath("data", name).read_text(encoding="utf-8")


# -- model text formats -----------------------------------------------------
FORMAT_LABELS = {
    "rv": ("Ga", "Gb", "Gc", "Gd"),
    "cv": ("G1.re", "G1.im", "G2.re", "G2.im"),
    "ga": ("e0", "e1", "e2", "e12"),
}


def render_model(m: models.RealMimo2, fmt: str) -> str:
    if fmt == "rv":
        parts = m.entries()
    elif fmt == "cv":
        c = models.real_to_complex(m)
        parts = (c.g1[0], c.g1[1], c.g2[0], c.g2[1])
    elif fmt == "ga":
        parts = models.real_to_ga(m).g.ratfuns()
    else:
        raise ConfigError(f"unknown format {fmt!r}")
    return "".join(f"{lab}: {format_ratfun(f)}\n" for lab, f in zip(FORMAT_LABELS[fmt], parts))


def parse_model_text(text: str) -> models.RealMimo2:
    """Inverse of :func:`render_model`; the format is detected from the labels."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        label, sep, expr = line.partition(":")
        if not sep:
            raise ConfigError(f"model line {lineno} lacks a 'label:' prefix")
        try:
            values[label.strip()] = parse_ratfun(expr.strip())
        except ValueError as exc:
            raise ConfigError(f"model line {lineno}: {exc}") from exc
    for fmt, labels in FORMAT_LABELS.items():
        if set(values) == set(labels):
            a, b, c, d = (values[x] for x in labels)
            if fmt == "rv":
                return models.RealMimo2(a, b, c, d)
            if fmt == "cv":
                return models.complex_to_real(models.ComplexSiso((a, b), (c, d)))
            return models.ga_to_real(GaTf.from_ratfuns(a, b, c, d))
    raise ConfigError(f"unrecognized model labels {sorted(values)}")


def _fmt_complex(z) -> str:
    z = complex(z)
    return f"{z.real:.12g}{z.imag:+.12g}j"


# -- commands ---------------------------------------------------------------
def cmd_model(args) -> int:
    if args.source is not None:
        text = sys.stdin.read() if args.source == "-" else open(args.source, encoding="utf-8").read()
        m = parse_model_text(text)
    elif args.netlist:
        m = circuits.netlist_model(circuits.parse_netlist(_read_netlist(args.netlist)))
    else:
        m = plant_mimo(_run_config(args))
    sys.stdout.write(render_model(m, args.format))
    return EXIT_OK


def _read_netlist(path: str) -> str:
    if path in ("rl-unbalanced", "rl-balanced"):
        return bundled_netlist("rl_unbalanced.cir" if path == "rl-unbalanced" else "rl_balanced.cir")
    with open(path, encoding="utf-8", newline=None) as fh:
        return fh.read()


def _gains(args, cfg):
    if args.sweep:
        if len(args.sweep) not in (2, 3):
            raise ConfigError("--sweep expects KMIN KMAX [POINTS_PER_DECADE]")
        kmin, kmax = args.sweep[0], args.sweep[1]
        per = int(args.sweep[2]) if len(args.sweep) == 3 else 1
        if not (0 < kmin <= kmax) or per < 1:
            raise ConfigError("--sweep needs 0 < KMIN <= KMAX and POINTS_PER_DECADE >= 1")
        n = int(round(math.log10(kmax / kmin) * per))
        return [float(f"{kmin * 10 ** (i / per):.12g}") for i in range(n + 1)]
    return [cfg.k]


def cmd_stability(args) -> int:
    cfg = _run_config(args)
    plant = models.real_to_ga(plant_mimo(cfg)).g
    out = sys.stdout
    out.write("k,stable,slowest_root,d_cl,roots,minimal_poles\n")
    for k in sorted(_gains(args, cfg)):
        ctrl = GaTf.const(MV4(k, k, 0.0, 0.0)) if k != 0 else GaTf.zero()
        rep = analysis.analyze(plant, ctrl)
        roots = analysis.poly_roots(rep.d_cl) if rep.d_cl.degree >= 1 else []
        slow = analysis.slowest_root(rep.d_cl) if rep.d_cl.degree >= 1 else float("nan")
        out.write(
            ",".join(
                [
                    repr(float(k)),
                    str(rep.stable).lower(),
                    _fmt_complex(slow),
                    " ".join(repr(float(c)) for c in rep.d_cl.coeffs),
                    " ".join(_fmt_complex(r) for r in roots),
                    " ".join(_fmt_complex(r) for r in rep.minimal_poles),
                ]
            )
            + "\n"
        )
    return EXIT_OK


def cmd_design_decouple(args) -> int:
    cfg = _run_config(args)
    plant = models.real_to_ga(plant_mimo(cfg)).g
    q = synthesis.decoupling_q(plant)
    c = synthesis.youla_controller(plant, q)
    chk = synthesis.verify_decoupled(plant, c)
    adm = synthesis.q_admissible(q)
    out = sys.stdout
    out.write(f"# q0 = {q.q0!r} ({q.note})\n")
    out.write("[Q]\n" + str(q.q) + "\n")
    out.write(f"[admissible] {str(bool(adm)).lower()}\n")
    out.write("[controller]\n" + str(c) + "\n")
    out.write(f"[controller proper] {str(c.is_proper()).lower()}\n")
    out.write(f"[closed-loop diagonal] {format_ratfun(chk.diag)}\n")
    out.write(f"[dc gain] {chk.diag.dcgain()!r}\n")
    out.write(f"[offdiag residual] {chk.offdiag_residual!r}\n")
    return EXIT_OK if chk.offdiag_residual < 1e-8 else EXIT_SYNTH


def _sim_config(cfg: RunConfig, plant_m, ctrl, open_loop=False) -> sim.SimConfig:
    return sim.SimConfig(
        plant=plant_m,
        controller=ctrl,
        Ts=cfg.Ts,
        substeps=cfg.substeps,
        duration=cfg.duration,
        V=cfg.V,
        omega=2 * math.pi * cfg.freq_hz,
        step=sim.Step(cfg.step_time, cfg.step_channel, cfg.step_magnitude),
        open_loop=open_loop,
    )


def cmd_simulate(args) -> int:
    cfg = _run_config(args)
    m = plant_mimo(cfg)
    plant = models.real_to_ga(m).g
    ctrl = GaTf.identity() if args.open_loop else build_controller(cfg, plant)
    scfg = _sim_config(cfg, m, ctrl, open_loop=args.open_loop)
    try:
        trace = sim.run_closed_loop(scfg)
    except Diverged as exc:
        if exc.trace is not None:
            _write_outputs(exc.trace, args)
        raise
    _write_outputs(trace, args)
    base = sim.run_closed_loop(scfg, with_step=False)
    err = sys.stderr
    err.write(f"decoupling_metric {sim.decoupling_metric(trace, scfg, baseline=base)!r}\n")
    try:
        err.write(f"time_constant {sim.time_constant(trace, scfg, baseline=base)!r}\n")
    except ValueError:
        err.write("time_constant nan\n")
    ratio = sim.tone_amplitude(base, scfg, end=scfg.n_samples * scfg.Ts) / scfg.V
    err.write(f"steady_amplitude_ratio {ratio!r}\n")
    return EXIT_OK


def _write_outputs(trace, args):
    if args.out:
        trace.write_csv(args.out)
    if args.svg:
        with open(args.svg, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(trace_svg(trace))


def cmd_discretize(args) -> int:
    cfg = _run_config(args)
    plant = models.real_to_ga(plant_mimo(cfg)).g
    ctrl = build_controller(cfg, plant)
    bank = sim.realize_ga_controller(ctrl, args.Ts, 2 * math.pi * args.prewarp_hz)
    out = sys.stdout
    out.write("# entry order: (1,1) (1,2) (2,1) (2,2); coefficients of z^0, z^-1, ...\n")
    for i in range(2):
        for j in range(2):
            f = bank[i][j]
            out.write(f"({i + 1},{j + 1}) b: {' '.join(repr(float(x)) for x in f.b)}\n")
            out.write(f"({i + 1},{j + 1}) a: {' '.join(repr(float(x)) for x in f.a)}\n")
    return EXIT_OK


def cmd_netlist_check(args) -> int:
    net = circuits.parse_netlist(_read_netlist(args.netlist))
    out = sys.stdout
    out.write(f"elements: {len(net.elements)}\n")
    out.write(f"nodes: {' '.join(net.nodes())}\n")
    out.write(f"inputs: {' '.join(net.inputs)}\n")
    out.write(f"outputs: {' '.join(net.outputs)}\n")
    out.write(f"ground: {net.ground}\n")
    out.write(render_model(circuits.netlist_model(net), "rv"))
    return EXIT_OK


# -- argument parsing -------------------------------------------------------
def _add_plant_args(p):
    p.add_argument("--config", help="INI file with [circuit] [source] [sim] [controller] sections")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--balanced", dest="balanced", action="store_true", default=None)
    g.add_argument("--unbalanced", dest="balanced", action="store_false")


def _add_controller_args(p):
    p.add_argument("--controller", choices=CONTROLLER_TYPES)
    p.add_argument("--k", type=float, help="gain of the proportional controller k(e0 + e1)")
    p.add_argument("--coeff", action="append", metavar="NAME=EXPR", help="custom controller coefficient, e.g. e0='1 + 100/(p)'")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ga3ph", description="GA transfer-function tools for three-phase systems")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("model", help="print the plant as real (rv), complex (cv) or GA (ga) coefficients")
    _add_plant_args(p)
    p.add_argument("--netlist", help="netlist file, or 'rl-unbalanced' / 'rl-balanced' for the bundled circuits")
    p.add_argument("--from", dest="source", metavar="FILE", help="re-read a printed model ('-' for stdin) and convert it")
    p.add_argument("--format", choices=("rv", "cv", "ga"), default="ga")
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("stability", help="closed-loop stability of the proportional controller k(e0 + e1)")
    _add_plant_args(p)
    p.add_argument("--controller", choices=("proportional",), default="proportional")
    p.add_argument("--k", type=float)
    p.add_argument("--sweep", type=float, nargs="+", metavar="K", help="KMIN KMAX [POINTS_PER_DECADE]")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("design-decouple", help="synthesize the decoupling Youla controller")
    _add_plant_args(p)
    p.set_defaults(func=cmd_design_decouple)

    p = sub.add_parser(
        "simulate",
        help="sampled-data closed-loop run; the default step (0.1 V on beta at 0.05 s) is a modelling choice",
    )
    _add_plant_args(p)
    _add_controller_args(p)
    p.add_argument("--open-loop", action="store_true", help="feed the references straight to the plant")
    p.add_argument("--out", help="CSV trace path")
    p.add_argument("--svg", help="SVG plot path")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("discretize", help="print the Tustin/prewarp filter bank of a controller")
    _add_plant_args(p)
    _add_controller_args(p)
    p.add_argument("--Ts", type=float, default=1e-4)
    p.add_argument("--prewarp-hz", type=float, default=60.0)
    p.set_defaults(func=cmd_discretize)

    p = sub.add_parser("netlist-check", help="parse a netlist and print its alpha-beta model")
    p.add_argument("netlist")
    p.set_defaults(func=cmd_netlist_check)
    return ap


ERROR_CODES = (
    ((ConfigError, NetlistError, BadPrewarp, OSError, ValueError), EXIT_PARSE),
    ((AlgebraicLoop,), EXIT_LOOP),
    ((PlantNotStable, QNotAdmissible, DegeneratePlant, NotSymmetric), EXIT_SYNTH),
    ((Diverged,), EXIT_DIVERGED),
    ((NotRealizable,), EXIT_IMPROPER),
)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # map the error families onto exit codes
        for types, code in ERROR_CODES:
            if isinstance(exc, types):
                sys.stderr.write(f"ga3ph: error: {exc}\n")
                return code
        raise


if __name__ == "__main__":
    sys.exit(main())
