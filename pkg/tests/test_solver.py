import numpy as np
import pytest

from tailwave import expr as E
from tailwave.equation import WaveEquation, classify_cpp
from tailwave.errors import CflViolation, ExactScheme, SingularPath, SupportNotAligned
from tailwave.grid import Grid, TimeGrid
from tailwave.kundt_newman import build_pw0
from tailwave.registry import MULTIPOLE_WORK_RECT, get
from tailwave.solver import (CauchyData, CharacteristicData, convergence_order, convergence_run,
                             solve_cauchy, solve_goursat)
from tailwave.waveforms import Bump, PolynomialWave

from oracles import kg_goursat, multipole1_general

TRIVIAL = WaveEquation.from_strings()
UNIT = Grid(0.0, 1.0, 64, 0.0, 1.0, 64)


def test_trivial_goursat_is_exact():
    r = lambda u: np.sin(3 * u) + u ** 2  # noqa: E731
    s = lambda v: v * np.exp(v)  # noqa: E731
    f = solve_goursat(TRIVIAL, CharacteristicData(r, s), UNIT)
    uu, vv = UNIT.mesh()
    assert np.max(np.abs(f.values - (r(uu) + s(vv)))) <= 1e-13


def test_trivial_convergence_is_flagged_exact():
    data = CharacteristicData(lambda u: u ** 2, lambda v: np.cos(v) - 1)
    with pytest.raises(ExactScheme):
        convergence_order(TRIVIAL, data, Grid(0, 1, 16, 0, 1, 16))


def multipole_data():
    R, S = [0, 0, 0, 1], [0, 0, 1]
    r = MULTIPOLE_WORK_RECT

    def exact(u, v):
        return multipole1_general(R, S, u, v)

    data = CharacteristicData(lambda u: exact(u, r.v_lo), lambda v: exact(r.u_lo, v))
    return exact, data


def test_multipole_goursat_matches_exact_wave():
    eq = get("multipole_1").eq
    exact, data = multipole_data()
    errs = []
    for n in (32, 64, 128):
        g = Grid.square(MULTIPOLE_WORK_RECT, n)
        f = solve_goursat(eq, data, g)
        errs.append(np.max(np.abs(f.values - exact(*g.mesh()))))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all((orders > 1.8) & (orders < 2.2))
    p = convergence_order(eq, data, Grid.square(MULTIPOLE_WORK_RECT, 32))
    assert 1.8 <= p <= 2.2


def test_klein_gordon_goursat_against_riemann_representation():
    eq = get("klein_gordon_1").eq
    b = Bump(0.3, 0.2)
    data = CharacteristicData.from_waveforms(b, None)
    g = Grid(0, 1, 40, 0, 1, 40)
    run = convergence_run(eq, data, g)
    assert 1.8 <= run.order <= 2.2
    uu, vv = g.mesh()
    pick = (slice(None, None, 4), slice(None, None, 4))
    want = kg_goursat(b, uu[pick], vv[pick], 0.2, 0.4)
    errs = [np.max(np.abs(f.coarsen(k)[pick] - want)) for f, k in zip(run.fields, (1, 2, 4))]
    assert errs[2] < 1e-4
    assert 3.0 < errs[0] / errs[1] < 5.0 and 3.0 < errs[1] / errs[2] < 5.0


def test_linearity():
    eq = get("lambda_sincos").eq
    d1 = CharacteristicData(lambda u: np.sin(u), lambda v: np.sin(v))
    d2 = CharacteristicData(lambda u: u ** 2 + 1, lambda v: np.exp(v))
    a, b = 2.5, -0.75
    combo = CharacteristicData(lambda u: a * np.sin(u) + b * (u ** 2 + 1),
                               lambda v: a * np.sin(v) + b * np.exp(v))
    f1, f2, f12 = (solve_goursat(eq, d, UNIT).values for d in (d1, d2, combo))
    assert np.max(np.abs(f12 - (a * f1 + b * f2))) <= 1e-12
    assert np.max(np.abs(solve_goursat(eq, d1.scaled(3.0), UNIT).values - 3 * f1)) <= 1e-13


def test_causality_bitwise():
    eq = get("klein_gordon_1").eq
    base = CharacteristicData(lambda u: np.sin(5 * u), lambda v: np.sin(5 * v))
    f0 = solve_goursat(eq, base, UNIT).values
    i0, j0 = 30, 20
    cut_u, cut_v = UNIT.u[i0], UNIT.v[j0]
    pert = CharacteristicData(lambda u: np.sin(5 * u) + np.where(u > cut_u, 1.0, 0.0),
                              lambda v: np.sin(5 * v) + np.where(v > cut_v, 1.0, 0.0))
    f1 = solve_goursat(eq, pert, UNIT).values
    assert np.array_equal(f0[: i0 + 1, : j0 + 1], f1[: i0 + 1, : j0 + 1])
    assert not np.array_equal(f0, f1)


@pytest.mark.parametrize("name", ["lambda_uv", "lambda_sincos"])
def test_cpp_factor_and_pw0_consistency(name):
    eq = get(name).eq
    lam = classify_cpp(eq).lam
    pw = build_pw0(eq, [0.0, 1.0, 0.0, 1.0], [0.0, 0.0, 2.0])
    data = CharacteristicData(lambda u: pw(u, 0 * u), lambda v: pw(0 * v, v))
    cross, errs = [], []
    for n in (32, 64):
        g = Grid(0, 1, n, 0, 1, n)
        f = solve_goursat(eq, data, g)
        uu, vv = g.mesh()
        errs.append(np.max(np.abs(f.values - pw(uu, vv))))
        psi = f.values * np.exp(E.evaluate(lam, uu, vv))
        cross.append(np.max(np.abs(psi[1:, 1:] - psi[1:, :-1] - psi[:-1, 1:] + psi[:-1, :-1])) / g.cell_area)
    assert 3.4 < errs[0] / errs[1] < 4.6
    assert 3.0 < cross[0] / cross[1] < 5.0


def test_support_alignment_enforced():
    data = CharacteristicData.from_waveforms(Bump(0.3, 0.2), None)
    with pytest.raises(SupportNotAligned):
        solve_goursat(TRIVIAL, data, Grid(0, 1, 64, 0, 1, 64))


def test_corner_compatibility():
    with pytest.raises(ValueError):
        solve_goursat(TRIVIAL, CharacteristicData(lambda u: u + 1, lambda v: v), UNIT)


def test_multipole_unit_square_refused():
    with pytest.raises(SingularPath):
        solve_goursat(get("multipole_1").eq, CharacteristicData.zero(), UNIT)


# ---- Cauchy


def cauchy_grid(n_x=600):
    return TimeGrid.with_cfl(0.0, 2.0, -3.0, 3.0, n_x)


def test_cauchy_trivial_splits_into_half_bumps():
    b = Bump(0.0, 0.2)
    g = cauchy_grid()
    f = solve_cauchy(TRIVIAL, CauchyData.from_waveforms(b, None), g)
    x = g.x
    want = 0.5 * (b(x - 2.0) + b(x + 2.0))
    assert np.max(np.abs(f.values[-1] - want)) <= 1e-12
    inner = np.abs(x) < 2.0 - 0.1 - 2 * g.hx
    assert np.max(np.abs(f.values[-1, inner])) <= 1e-10


def test_cauchy_klein_gordon_interior():
    b = Bump(0.0, 0.2)
    g = cauchy_grid()
    f = solve_cauchy(get("klein_gordon_1").eq, CauchyData.from_waveforms(b, None), g)
    inner = np.abs(g.x) < 2.0 - 0.1 - 2 * g.hx
    assert np.max(np.abs(f.values[-1, inner])) > 1e-2


def test_cauchy_massless_velocity_plateau():
    b = Bump(0.0, 0.2)
    g = cauchy_grid()
    f = solve_cauchy(TRIVIAL, CauchyData.from_waveforms(None, b), g)
    # d'Alembert: phi = (1/2) int_{x-t}^{x+t} phi1, i.e. half the mass once the fronts have passed
    for k in (g.n_t // 2, g.n_t):
        t = g.t[k]
        inner = np.abs(g.x) < t - 0.1 - 2 * g.hx
        np.testing.assert_allclose(f.values[k, inner], b.mass / 2, atol=1e-12)


def test_cfl_violation():
    g = TimeGrid(0.0, 1.0, 10, -1.0, 1.0, 40)
    with pytest.raises(CflViolation):
        solve_cauchy(TRIVIAL, CauchyData.from_waveforms(Bump(0.0, 0.2), None), g)


def test_cauchy_second_order_below_cfl_one():
    eq = get("klein_gordon_1").eq
    data = CauchyData(lambda x: np.exp(-20 * x ** 2), lambda x: np.zeros_like(x))
    g = TimeGrid.with_cfl(0.0, 1.0, -4.0, 4.0, 160, cfl=0.5)
    p = convergence_order(eq, data, g)
    assert 1.8 <= p <= 2.2


def test_polynomial_wave_helper():
    w = PolynomialWave([1.0, 2.0, 3.0])
    assert w(2.0) == 17.0 and w(2.0, 1) == 14.0 and w(2.0, 3) == 0.0
