import numpy as np
import pytest

from tailwave import expr as E
from tailwave.equation import WaveEquation
from tailwave.errors import IndeterminateTermination, NotCpp, NotTerminating
from tailwave.kundt_newman import (Status, build_pw0, build_sequence, exact_solution,
                                   verify_amplitude_equations, wave_residual)
from tailwave.registry import get
from tailwave.waveforms import TableWave

from oracles import multipole1_general


@pytest.mark.parametrize("l", range(5))
def test_multipole_double_terminates_with_order_l(l):
    seq = build_sequence(get(f"multipole_{l}").eq, k_max=8)
    assert seq.status is Status.DOUBLE_TERMINATING
    assert seq.N == l
    assert seq.k1 == l and seq.k2 == -l


def test_klein_gordon_does_not_terminate():
    seq = build_sequence(get("klein_gordon_1").eq, k_max=8)
    assert seq.status is Status.NON_TERMINATING
    assert seq.to_json()["status"] == "NonTerminating(8)"
    assert seq.N is None
    with pytest.raises(NotTerminating):
        exact_solution(seq)


@pytest.mark.parametrize("name", ["multipole_2", "multipole_3", "lambda_sincos", "klein_gordon_1"])
def test_two_sided_sequence_is_consistent(name):
    # j_k l_k = 1 links the chains: with j_k := 1/l_k for k <= 0 the j-recursion
    # must hold across the whole two-sided sequence, including k = 0
    eq = get(name).eq
    seq = build_sequence(eq, k_max=4)
    u, v = eq.sample_points(100)
    assert np.allclose(E.evaluate(seq.j(0) * seq.l(0), u, v), 1.0, rtol=1e-12)
    k_lo = -(len(seq.l_chain) - 1)
    J = {k: seq.j(k) for k in range(len(seq.j_chain))}
    J.update({k: 1 / seq.l(k) for k in range(k_lo, 0)})
    for k in range(k_lo + 1, len(seq.j_chain) - 1):
        lhs = E.evaluate(J[k + 1] / J[k], u, v) * np.ones_like(u)
        rhs = E.evaluate(J[k] / J[k - 1] - E.mixed(E.ln(J[k])), u, v) * np.ones_like(u)
        scale = max(1.0, np.max(np.abs(rhs)))
        assert np.max(np.abs(lhs - rhs)) <= 1e-9 * scale, k


def test_multipole1_amplitudes():
    eq = get("multipole_1").eq
    pw = exact_solution(build_sequence(eq), [0, 0, 0, 1], [0, 0, 1])
    u, v = eq.sample_points(100, seed=3)
    r = v - u
    want = {"f0": 2 / r, "f1": 1.0, "g0": -2 / r, "g1": 1.0}
    got = {"f0": pw.f[0], "f1": pw.f[1], "g0": pw.g[0], "g1": pw.g[1]}
    for key in want:
        vals = E.evaluate(got[key], u, v) * np.ones_like(u)
        assert np.max(np.abs(vals - want[key])) <= 1e-12, key
    np.testing.assert_allclose(pw(u, v), multipole1_general([0, 0, 0, 1], [0, 0, 1], u, v),
                               rtol=1e-12)


@pytest.mark.parametrize("l", range(5))
def test_exact_solution_residual_and_order(l):
    eq = get(f"multipole_{l}").eq
    seq = build_sequence(eq)
    pw = exact_solution(seq, [0.5, -1, 0, 1, 2, 0, 1], [1, 0, 3, 0, 0, -1])
    assert pw.order == seq.N == l
    assert wave_residual(pw, eq) <= 1e-8


def test_multipole1_residual_is_absolute_small():
    eq = get("multipole_1").eq
    pw = exact_solution(build_sequence(eq), [0, 0, 0, 1], [0, 0, 1])
    u, v = eq.sample_points(100)
    assert np.max(np.abs(E.evaluate(eq.residual(pw.as_expr()), u, v))) <= 1e-8


def test_amplitude_systems():
    eq = get("multipole_1").eq
    pw = exact_solution(build_sequence(eq))
    res = verify_amplitude_equations(pw, eq)
    assert set(res) == {"f0", "f1", "g0", "g1", "f_top", "g_top"}
    assert max(res.values()) <= 1e-10
    for name in ("trivial", "lambda_uv", "lambda_sincos"):
        eq = get(name).eq
        res = verify_amplitude_equations(build_pw0(eq), eq)
        assert set(res) == {"f0_wave", "g0_wave", "f0_transport", "g0_transport"}
        assert max(res.values()) <= 1e-10


def test_pw0_requires_cpp():
    with pytest.raises(NotCpp):
        build_pw0(get("klein_gordon_1").eq)


def test_pw0_closed_form():
    eq = get("lambda_uv").eq
    pw = build_pw0(eq, [0, 1], [0, 0, 1])
    u, v = eq.sample_points(20)
    np.testing.assert_allclose(pw(u, v), np.exp(-u * v) * (u + v ** 2), rtol=1e-14)


def test_table_waveforms_match_polynomials():
    eq = get("multipole_2").eq
    pw = exact_solution(build_sequence(eq))
    x = np.linspace(-0.2, 1.2, 400)
    poly = pw.with_waveforms([0, 1, 0, 2], [1, 0, -1])
    table = pw.with_waveforms(TableWave(x, x + 2 * x ** 3), TableWave(x, 1 - x ** 2))
    u, v = eq.sample_points(20)
    np.testing.assert_allclose(table(u, v), poly(u, v), rtol=1e-6, atol=1e-6)


def test_indeterminate_when_everything_is_singular():
    eq = WaveEquation.from_strings("0", "0", "1/(u*v - v*u)")
    with pytest.raises(IndeterminateTermination):
        build_sequence(eq)


def test_kmax_validation_and_json_truncation():
    with pytest.raises(ValueError):
        build_sequence(get("trivial").eq, k_max=0)
    doc = build_sequence(get("multipole_4").eq).to_json(max_chars=40)
    assert doc["status"] == "DoubleTerminating" and doc["N"] == 4
    assert all(len(s) <= 43 for s in doc["j"] + doc["l"])
