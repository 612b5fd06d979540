"""Three-phase netlists solved by modified nodal analysis over RatFun.

Netlist grammar (one statement per line, ``#`` starts a comment)::

    <Name> <node+> <node-> <value|label>    kind from the name's first letter: R, L, C, V
    .inputs <label_a> <label_b> <label_c>   voltage-source labels driving phases a, b, c
    .outputs <node_a> <node_b> <node_c>     nodes whose voltages are measured
    .ground <node>                          reference node (default ``0``)

Values accept an optional SI suffix (``f p n u m k meg g``).  Node ids and
element names are case-insensitive.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import NetlistError, Singular
from .models import CircuitParams, RealMimo2
from .polyrat import Poly, RatFun

# amplitude-invariant Clarke transform, beta along (b - c)
CLARKE_K = (2.0 / 3.0) * np.array(
    [[1.0, -0.5, -0.5], [0.0, math.sqrt(3.0) / 2.0, -math.sqrt(3.0) / 2.0]]
)
CLARKE_K_PINV = np.array(
    [[1.0, 0.0], [-0.5, math.sqrt(3.0) / 2.0], [-0.5, -math.sqrt(3.0) / 2.0]]
)

_SUFFIX = {"f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "m": 1e-3, "k": 1e3, "meg": 1e6, "g": 1e9}
_VALUE = re.compile(r"^([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(meg|[fpnumkg])?$", re.IGNORECASE)


@dataclass(frozen=True)
class Element:
    name: str
    kind: str
    node_plus: str
    node_minus: str
    value: object
    line: int = 0


@dataclass
class Netlist:
    elements: list = field(default_factory=list)
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)
    ground: str = "0"

    def nodes(self):
        seen = []
        for e in self.elements:
            for n in (e.node_plus, e.node_minus):
                if n not in seen:
                    seen.append(n)
        return seen


@dataclass(frozen=True)
class TfMatrix3:
    """Phase-domain transfer matrix; ``m[i][j]`` maps source j to output node i."""

    m: tuple

    def __getitem__(self, ij):
        i, j = ij
        return self.m[i][j]


def _parse_value(tok: str, lineno: int) -> float:
    m = _VALUE.match(tok)
    if not m:
        raise NetlistError(f"bad element value {tok!r}", lineno)
    v = float(m.group(1))
    if m.group(2):
        v *= _SUFFIX[m.group(2).lower()]
    if v < 0:
        raise NetlistError(f"negative element value {tok!r}", lineno)
    return v


def parse_netlist(text: str) -> Netlist:
    net = Netlist()
    names = set()
    seen = {}
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        last = lineno
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        head = toks[0]
        if head.startswith("."):
            directive = head.lower()
            args = [t.lower() for t in toks[1:]]
            if directive in (".inputs", ".outputs"):
                if len(args) != 3:
                    raise NetlistError(f"{directive} expects 3 arguments, got {len(args)}", lineno)
                setattr(net, directive[1:], args)
                seen[directive] = lineno
            elif directive == ".ground":
                if len(args) != 1:
                    raise NetlistError(f".ground expects 1 argument, got {len(args)}", lineno)
                net.ground = args[0]
                seen[directive] = lineno
            else:
                raise NetlistError(f"unknown directive {head!r}", lineno)
            continue
        kind = head[0].upper()
        if kind not in "RLCV":
            raise NetlistError(f"unknown element kind {head[0]!r}", lineno)
        if len(toks) != 4:
            raise NetlistError(f"element {head!r} expects 3 fields after the name, got {len(toks) - 1}", lineno)
        key = head.lower()
        if key in names:
            raise NetlistError(f"duplicate element name {head!r}", lineno)
        names.add(key)
        value = toks[3].lower() if kind == "V" else _parse_value(toks[3], lineno)
        net.elements.append(Element(head, kind, toks[1].lower(), toks[2].lower(), value, lineno))
    for directive in (".inputs", ".outputs"):
        if directive not in seen:
            raise NetlistError(f"missing {directive} directive", last)
    labels = {e.value for e in net.elements if e.kind == "V"}
    for lab in net.inputs:
        if lab not in labels:
            raise NetlistError(f"input label {lab!r} does not name a voltage source", seen[".inputs"])
    nodes = set(net.nodes())
    for n in net.outputs:
        if n not in nodes and n != net.ground:
            raise NetlistError(f"output node {n!r} is not connected to any element", seen[".outputs"])
    return net


def _degree(f: RatFun) -> int:
    return f.num.degree + f.den.degree


def _solve(a, b, labels):
    """Gaussian elimination over RatFun; ``b`` has several right-hand sides."""
    n = len(a)
    a = [row[:] for row in a]
    b = [row[:] for row in b]
    for k in range(n):
        candidates = [i for i in range(k, n) if not a[i][k].is_zero()]
        if not candidates:
            raise Singular(f"singular MNA system at elimination step {k} (unknown {labels[k]})")
        piv = min(candidates, key=lambda i: (_degree(a[i][k]), i))
        a[k], a[piv] = a[piv], a[k]
        b[k], b[piv] = b[piv], b[k]
        inv = a[k][k].inverse()
        for i in range(k + 1, n):
            if a[i][k].is_zero():
                continue
            factor = a[i][k] * inv
            for j in range(k + 1, n):
                if not a[k][j].is_zero():
                    a[i][j] = a[i][j] - factor * a[k][j]
            for j in range(len(b[i])):
                if not b[k][j].is_zero():
                    b[i][j] = b[i][j] - factor * b[k][j]
            a[i][k] = RatFun()
    x = [[RatFun() for _ in b[0]] for _ in range(n)]
    for k in range(n - 1, -1, -1):
        inv = a[k][k].inverse()
        for j in range(len(b[0])):
            acc = b[k][j]
            for m in range(k + 1, n):
                if not a[k][m].is_zero() and not x[m][j].is_zero():
                    acc = acc - a[k][m] * x[m][j]
            x[k][j] = acc * inv
    return x


def mna_transfer(net: Netlist) -> TfMatrix3:
    """Output-node voltages per unit value of each input source."""
    if len(net.inputs) != 3 or len(net.outputs) != 3:
        raise NetlistError("three-phase extraction needs 3 inputs and 3 outputs")
    nodes = [n for n in net.nodes() if n != net.ground]
    index = {n: i for i, n in enumerate(nodes)}
    labels = [f"V({n})" for n in nodes]
    branches = []
    for e in net.elements:
        if e.kind == "V" or (e.kind in "RL" and e.value == 0.0):
            branches.append(e)
            labels.append(f"I({e.name})")
    size = len(labels)
    a = [[RatFun() for _ in range(size)] for _ in range(size)]
    b = [[RatFun() for _ in range(3)] for _ in range(size)]

    def stamp_admittance(e, y):
        i, j = index.get(e.node_plus), index.get(e.node_minus)
        if i is not None:
            a[i][i] = a[i][i] + y
        if j is not None:
            a[j][j] = a[j][j] + y
        if i is not None and j is not None:
            a[i][j] = a[i][j] - y
            a[j][i] = a[j][i] - y

    for e in net.elements:
        if e.kind == "R" and e.value > 0:
            stamp_admittance(e, RatFun.const(1.0 / e.value))
        elif e.kind == "L" and e.value > 0:
            stamp_admittance(e, RatFun(Poly([1.0]), Poly([0.0, e.value])))
        elif e.kind == "C" and e.value > 0:
            stamp_admittance(e, RatFun(Poly([0.0, e.value])))
    for k, e in enumerate(branches, start=len(nodes)):
        i, j = index.get(e.node_plus), index.get(e.node_minus)
        one = RatFun.const(1.0)
        if i is not None:
            a[i][k] = a[i][k] + one
            a[k][i] = a[k][i] + one
        if j is not None:
            a[j][k] = a[j][k] - one
            a[k][j] = a[k][j] - one
        if e.kind == "V" and e.value in net.inputs:
            b[k][net.inputs.index(e.value)] = one
    x = _solve(a, b, labels)
    rows = []
    for node in net.outputs:
        if node == net.ground:
            rows.append((RatFun(), RatFun(), RatFun()))
        else:
            rows.append(tuple(x[index[node]]))
    return TfMatrix3(tuple(rows))


def clarke_project(m3: TfMatrix3) -> RealMimo2:
    """``K M K+``, discarding the zero-sequence channel."""
    km = [[RatFun() for _ in range(3)] for _ in range(2)]
    for i in range(2):
        for j in range(3):
            acc = RatFun()
            for k in range(3):
                if CLARKE_K[i, k] != 0.0 and not m3[k, j].is_zero():
                    acc = acc + m3[k, j] * float(CLARKE_K[i, k])
            km[i][j] = acc
    out = [[RatFun(), RatFun()], [RatFun(), RatFun()]]
    for i in range(2):
        for j in range(2):
            acc = RatFun()
            for k in range(3):
                if CLARKE_K_PINV[k, j] != 0.0 and not km[i][k].is_zero():
                    acc = acc + km[i][k] * float(CLARKE_K_PINV[k, j])
            out[i][j] = acc
    return RealMimo2.from_matrix(out)


def rl_netlist_text(La: float, Lb: float, Lc: float, R: float) -> str:
    """Wye sources, series line inductances, wye load with a floating neutral."""
    return "\n".join(
        [
            "# three-phase RL circuit: ideal wye sources, series line inductance,",
            "# wye resistive load with a floating neutral node n",
            "Va a 0 va",
            "Vb b 0 vb",
            "Vc c 0 vc",
            f"La a oa {La!r}",
            f"Lb b ob {Lb!r}",
            f"Lc c oc {Lc!r}",
            f"Ra oa n {R!r}",
            f"Rb ob n {R!r}",
            f"Rc oc n {R!r}",
            ".inputs va vb vc",
            ".outputs oa ob oc",
            ".ground 0",
            "",
        ]
    )


def reference_netlist(params: CircuitParams, balanced=False) -> Netlist:
    lb = params.L if balanced else params.Lu
    return parse_netlist(rl_netlist_text(params.L, lb, params.L, params.R))


def netlist_model(net: Netlist) -> RealMimo2:
    return clarke_project(mna_transfer(net))
