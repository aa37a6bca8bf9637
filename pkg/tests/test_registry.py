import numpy as np
import pytest

from tailwave import expr as E
from tailwave.equation import WaveEquation
from tailwave.kundt_newman import ProgressingWave, wave_residual
from tailwave.registry import (Known, RegistryEntry, get, klein_gordon, multipole,
                               multipole_l1_delta_solution, names, registry)
from tailwave.riemann import UP, VP, closed_form_residuals
from tailwave.expr import EvalPoint


def test_registry_contents():
    got = names()
    for n in ["trivial", "klein_gordon_1", "lambda_uv", "lambda_sincos"] + \
             [f"multipole_{l}" for l in range(5)]:
        assert n in got
    assert len(registry()) == len(got)
    with pytest.raises(KeyError):
        get("nope")


def test_known_examples():
    assert get("multipole_1").known.pw_order == 1
    assert get("klein_gordon_1").known.cpp is False
    d = get("lambda_uv").known.riemann
    want = E.exp(E.parse("u*v") - UP * VP)
    u, v = np.array([0.1, 0.5]), np.array([0.3, 0.2])
    np.testing.assert_allclose(E.evaluate(d, u, v, up=0.9, vp=0.7),
                               E.evaluate(want, u, v, up=0.9, vp=0.7), rtol=1e-15)


def test_every_closed_form_has_small_residual():
    for entry in registry():
        k = entry.known
        base = EvalPoint(entry.work_rect.u_hi, entry.work_rect.v_hi)
        if k.riemann is not None:
            adj, _ = closed_form_residuals(entry.eq, k.riemann, base)
            assert adj <= 1e-8, entry.name
        if k.general_solution is not None:
            pw = k.general_solution.with_waveforms([0.2, 1, 0, 1], [0, 0, 1])
            assert wave_residual(pw, entry.eq) <= 1e-8, entry.name


def test_klein_gordon_oracle_matches_series():
    entry = klein_gordon(2.0)
    assert entry.name == "klein_gordon_2"
    assert entry.eq.W.value == 4.0
    from oracles import kg_riemann
    u, v = np.array([0.1, 0.4]), np.array([0.2, 0.5])
    np.testing.assert_allclose(entry.known.riemann_oracle(u, v, 1.0, 1.0),
                               kg_riemann(u, v, 1.0, 1.0, mu=2.0), atol=1e-14)


def test_wrong_closed_form_fails_registration():
    eq = WaveEquation.from_strings("0", "0", "2/(v-u)^2", singular_lines=(0.0,))
    bad = ProgressingWave(1, (1 / (E.V - E.U), E.ONE), (-2 / (E.V - E.U), E.ONE))
    with pytest.raises(AssertionError):
        RegistryEntry("bad", eq, Known(general_solution=bad))
    with pytest.raises(AssertionError):
        RegistryEntry("bad", eq, Known(cpp=True))
    with pytest.raises(AssertionError):
        RegistryEntry("bad", eq, Known(pw_order=2))


def test_higher_multipoles_have_no_stated_solution_but_terminate():
    e = multipole(3)
    assert e.known.general_solution is None and e.known.pw_order == 3


def test_delta_solution_branches():
    u = np.array([0.2, 0.4, 0.6, 0.8])
    v = np.full(4, 0.1)
    ret = multipole_l1_delta_solution(0.5, 0.0).smooth(u, v)
    assert np.all(ret[:2] == 0.0) and np.all(ret[2:] != 0.0)
    adv = multipole_l1_delta_solution(0.5, -1.0).smooth(u, v)
    assert np.all(adv[2:] == 0.0) and np.all(adv[:2] != 0.0)
    gen = multipole_l1_delta_solution(0.5, 0.5).smooth(u, v)
    assert np.all(gen != 0.0)
    # on the data line v = 0 the smooth part vanishes: all data sit in the delta
    assert np.all(multipole_l1_delta_solution(0.5, 0.5).smooth(u, 0 * u) == 0.0)
    assert multipole_l1_delta_solution(0.5, 0.0).singular["kind"] == "delta"
    with pytest.raises(ValueError):
        multipole_l1_delta_solution(0.0)


def test_delta_smooth_part_solves_the_equation():
    ref = multipole_l1_delta_solution(0.5, 0.3)
    u = np.linspace(0.55, 0.95, 9)
    v = np.linspace(0.05, 0.3, 9)
    from oracles import mixed_fd
    res = mixed_fd(ref.smooth, u, v, 1e-3) + 2 / (v - u) ** 2 * ref.smooth(u, v)
    assert np.max(np.abs(res)) < 1e-7


def test_entries_export_as_equation_json(tmp_path):
    for entry in registry():
        path = tmp_path / f"{entry.name}.json"
        entry.eq.dump(path)
        back = WaveEquation.load(path)
        assert back.singular_lines == entry.eq.singular_lines
        u, v = entry.eq.sample_points(10)
        for a, b in ((back.U, entry.eq.U), (back.V, entry.eq.V), (back.W, entry.eq.W)):
            np.testing.assert_allclose(E.evaluate(a, u, v), E.evaluate(b, u, v), rtol=1e-15)
