import importlib.resources
import math

import numpy as np
import pytest

from ga3ph.circuits import (
    CLARKE_K,
    CLARKE_K_PINV,
    TfMatrix3,
    clarke_project,
    mna_transfer,
    netlist_model,
    reference_netlist,
    parse_netlist,
    rl_netlist_text,
)
from ga3ph.errors import NetlistError, Singular
from ga3ph.models import CircuitParams, build_rl_model
from ga3ph.polyrat import RatFun

from helpers import ratfun_close, ratfun_value_close


def bundled(name):
    return importlib.resources.files("ga3ph").joinpath("data", name).read_text()


def entries_close(a, b, rtol=1e-8):
    return all(ratfun_value_close(f, g, rtol) for f, g in zip(a.entries(), b.entries()))


# -- parsing ------------------------------------------------------------------
def test_single_resistor():
    net = parse_netlist("R1 n1 0 22.0\nV1 n1 0 va\n.inputs va va va\n.outputs n1 n1 n1\n")
    r = net.elements[0]
    assert (r.kind, r.node_plus, r.node_minus, r.value) == ("R", "n1", "0", 22.0)


def test_bundled_reference_netlist():
    net = parse_netlist(bundled("rl_unbalanced.cir"))
    assert len(net.elements) == 9
    assert net.inputs == ["va", "vb", "vc"]
    assert net.outputs == ["oa", "ob", "oc"]
    assert sorted(e.kind for e in net.elements) == ["L"] * 3 + ["R"] * 3 + ["V"] * 3


def test_unknown_kind_reports_line():
    with pytest.raises(NetlistError) as err:
        parse_netlist("X1 n1 n2 5")
    assert "unknown element kind 'X' at line 1" in str(err.value)
    assert err.value.line == 1


@pytest.mark.parametrize(
    "text,line,fragment",
    [
        ("V1 a 0 va\nR1 a 0\n", 2, "expects 3 fields"),
        ("V1 a 0 va\nR1 a 0 1\nr1 a 0 2\n", 3, "duplicate"),
        ("V1 a 0 va\n.bogus x\n", 2, "unknown directive"),
        ("V1 a 0 va\n.outputs a a a\n", 2, "missing .inputs"),
        ("V1 a 0 va\n.inputs va va va\n", 2, "missing .outputs"),
        ("V1 a 0 va\n.inputs va vb vc\n.outputs a a a\n", 2, "voltage source"),
        ("V1 a 0 va\n.inputs va va va\n.outputs a q a\n", 3, "not connected"),
        ("R1 a 0 1z\n", 1, "bad element value"),
        ("V1 a 0 va\n.inputs va va\n", 2, "expects 3 arguments"),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, fragment):
    with pytest.raises(NetlistError) as err:
        parse_netlist(text)
    assert err.value.line == line
    assert fragment in str(err.value)
    assert f"at line {line}" in str(err.value)


def test_crlf_comments_case_and_suffixes():
    text = bundled("rl_unbalanced.cir").replace("\n", "\r\n").replace("La a oa 0.003", "LA A OA 3m  # phase a")
    net = parse_netlist(text)
    la = [e for e in net.elements if e.name == "LA"][0]
    assert la.value == pytest.approx(3e-3) and la.node_plus == "a"
    assert parse_netlist("C1 x 0 10u\nV1 x 0 v\n.inputs v v v\n.outputs x x x\n").elements[0].value == pytest.approx(1e-5)
    assert parse_netlist("R1 x 0 2meg\nV1 x 0 v\n.inputs v v v\n.outputs x x x\n").elements[0].value == 2e6


# -- MNA vs closed form ---------------------------------------------------
def test_unbalanced_rl_circuit_matches_nodal_oracle(oracle):
    m = netlist_model(parse_netlist(bundled("rl_unbalanced.cir")))
    for f, pair in zip(m.entries(), oracle["rv_unbalanced"]):
        assert ratfun_close(f, pair, 1e-8)


def test_balanced_rl_circuit(balanced_mimo):
    m = netlist_model(parse_netlist(bundled("rl_balanced.cir")))
    assert entries_close(m, balanced_mimo, 1e-10)
    assert m.gb.is_zero() or m.gb.num.max_abs() < 1e-9
    assert m.ga.den.degree == 1


def test_off_diagonal_sign_fixes_clarke_convention(params):
    m = netlist_model(reference_netlist(params))
    L, Lu, R = params.L, params.Lu, params.R
    d = 2 * (R + L * 1j) * (3 * R + (L + 2 * Lu) * 1j)
    want = -math.sqrt(3) * R * 1j * (L - Lu) / d
    assert m.gb(1j) == pytest.approx(want, rel=1e-9)
    assert want.imag > 0  # Lu > L makes the off-diagonal positive on the jw axis


def test_random_parameters_agree_with_closed_form(rng):
    for _ in range(50):
        p = CircuitParams(L=rng.uniform(1e-4, 5e-2), Lu=rng.uniform(1e-4, 5e-2), R=rng.uniform(1.0, 100.0))
        got = netlist_model(reference_netlist(p))
        want = build_rl_model(p)
        assert entries_close(got, want, 1e-8)
        for f, g in zip(got.entries(), want.entries()):
            assert f.den.degree == g.den.degree


def test_zero_inductance_gives_identity():
    m = netlist_model(parse_netlist(rl_netlist_text(0.0, 0.0, 0.0, 10.0)))
    assert np.allclose(m.at(7j), np.eye(2), atol=1e-12)
    assert m.gb.is_zero() and m.ga.den.degree == 0


def test_relabeling_and_reordering_invariance(params):
    text = rl_netlist_text(params.L, params.Lu, params.L, params.R)
    base = netlist_model(parse_netlist(text))
    lines = text.splitlines()
    body = [ln for ln in lines if ln and not ln.startswith((".", "#"))]
    directives = [ln for ln in lines if ln.startswith(".")]
    rename = {"n": "star", "oa": "out_a", "ob": "out_b", "oc": "out_c"}
    renamed = "\n".join(" ".join(rename.get(t, t) for t in ln.split()) for ln in list(reversed(body)) + directives)
    other = netlist_model(parse_netlist(renamed))
    assert entries_close(other, base, 1e-10)


def test_capacitor_low_pass_phase_matrix():
    # each phase: source -> R -> output node -> C -> ground
    text = "\n".join(
        [f"V{x} {x} 0 v{x}\nR{x} {x} o{x} 1k\nC{x} o{x} 0 1u" for x in "abc"]
        + [".inputs va vb vc", ".outputs oa ob oc"]
    )
    m3 = mna_transfer(parse_netlist(text))
    h = RatFun([1.0], [1.0, 1e-3])
    for i in range(3):
        for j in range(3):
            if i == j:
                assert ratfun_value_close(m3[i, j], h, 1e-10)
            else:
                assert m3[i, j].is_zero()


def test_floating_subcircuit_is_singular():
    text = "Va a 0 va\nVb b 0 vb\nVc c 0 vc\nR1 a 0 1\nR2 x y 1\n.inputs va vb vc\n.outputs a b c\n"
    with pytest.raises(Singular) as err:
        mna_transfer(parse_netlist(text))
    assert "step" in str(err.value)


def test_source_loop_is_singular():
    text = "Va a 0 va\nVb a 0 vb\nVc c 0 vc\nR1 a 0 1\nR2 c 0 1\n.inputs va vb vc\n.outputs a a c\n"
    with pytest.raises(Singular):
        mna_transfer(parse_netlist(text))


# -- Clarke -------------------------------------------------------------------
def test_clarke_algebra():
    assert np.allclose(CLARKE_K @ CLARKE_K_PINV, np.eye(2), rtol=0, atol=1e-15)
    assert np.allclose(CLARKE_K @ np.ones(3), 0.0, atol=1e-16)


def test_clarke_of_identity_is_identity():
    one, zero = RatFun.const(1.0), RatFun()
    m = clarke_project(TfMatrix3(((one, zero, zero), (zero, one, zero), (zero, zero, one))))
    assert np.allclose(m.at(1j), np.eye(2), atol=1e-15)
