"""Canonical equations with their known closed forms.

Each entry is checked against its own closed forms when it is built, so a
wrong formula fails loudly at registration rather than inside a test.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from . import expr as E
from .equation import WaveEquation, classify_cpp
from .expr import EvalPoint, Expr, Rect
from .kundt_newman import ProgressingWave, build_sequence, wave_residual
from .riemann import UP, VP, closed_form_residuals

RESIDUAL_TOL = 1e-8
MULTIPOLE_MAX_L = 4
UNIT_SQUARE = Rect(0.0, 1.0, 0.0, 1.0)
# above the line u = v, clear of it by more than the margin
MULTIPOLE_WORK_RECT = Rect(0.0, 0.45, 0.55, 1.0)


@dataclass(frozen=True)
class Known:
    riemann: Expr | None = None
    riemann_oracle: Callable | None = None  # (u, v, up, vp) -> Delta, when no Expr exists
    general_solution: ProgressingWave | None = None
    pw_order: int | None = None
    cpp: bool | None = None


@dataclass(frozen=True, eq=False)
class RegistryEntry:
    name: str
    eq: WaveEquation
    known: Known = field(default_factory=Known)
    work_rect: Rect = UNIT_SQUARE
    description: str = ""

    def __post_init__(self):
        self.verify()

    def verify(self):
        """Check every stated closed form; raises AssertionError on mismatch."""
        eq, known = self.eq, self.known
        if known.cpp is not None:
            got = classify_cpp(eq).is_cpp
            if got != known.cpp:
                raise AssertionError(f"{self.name}: classifier says cpp={got}, entry says {known.cpp}")
        base = EvalPoint(self.work_rect.u_hi, self.work_rect.v_hi)
        if known.riemann is not None:
            adj, _ = closed_form_residuals(eq, known.riemann, base)
            if adj > RESIDUAL_TOL:
                raise AssertionError(f"{self.name}: Riemann closed form residual {adj:.3g}")
        if known.riemann_oracle is not None:
            res = _oracle_adjoint_residual(eq, known.riemann_oracle, base)
            if res > 1e-5:
                raise AssertionError(f"{self.name}: Riemann oracle residual {res:.3g}")
        if known.general_solution is not None:
            pw = known.general_solution.with_waveforms([0.0, 0.0, 0.0, 1.0], [0.0, 0.0, 1.0])
            res = wave_residual(pw, eq)
            if res > RESIDUAL_TOL:
                raise AssertionError(f"{self.name}: general solution residual {res:.3g}")
        if known.pw_order is not None:
            seq = build_sequence(eq)
            if seq.N != known.pw_order:
                raise AssertionError(f"{self.name}: sequence order {seq.N}, entry says {known.pw_order}")

    def to_json(self) -> dict:
        return self.eq.to_json()

    def summary(self) -> dict:
        k = self.known
        return {
            "name": self.name,
            "U": E.to_string(self.eq.U),
            "V": E.to_string(self.eq.V),
            "W": E.to_string(self.eq.W),
            "cpp": k.cpp,
            "pw_order": k.pw_order,
            "riemann": None if k.riemann is None else E.to_string(k.riemann),
            "description": self.description,
        }


def _oracle_adjoint_residual(eq, oracle, base, count=32, h=1e-3):
    """Adjoint residual of a callable Riemann function by centred differences."""
    u, v = eq.sample_points(count, seed=1)
    keep = (u < base.u - 2 * h) & (v < base.v - 2 * h)
    u, v = u[keep], v[keep]

    def D(du, dv):
        return oracle(u + du, v + dv, base.u, base.v)

    def coef(c, du=0.0, dv=0.0):
        return E.evaluate(c, u + du, v + dv) * np.ones_like(u)

    d_uv = (D(h, h) - D(h, -h) - D(-h, h) + D(-h, -h)) / (4 * h * h)
    ud_u = (coef(eq.U, h) * D(h, 0) - coef(eq.U, -h) * D(-h, 0)) / (2 * h)
    vd_v = (coef(eq.V, 0, h) * D(0, h) - coef(eq.V, 0, -h) * D(0, -h)) / (2 * h)
    res = d_uv - ud_u - vd_v + coef(eq.W) * D(0, 0)
    return float(np.max(np.abs(res))) if res.size else 0.0


# ---------------------------------------------------------------- families


def _pw0(amplitude: Expr) -> ProgressingWave:
    return ProgressingWave(0, (amplitude,), (amplitude,))


def trivial() -> RegistryEntry:
    eq = WaveEquation.from_strings("0", "0", "0", name="trivial")
    known = Known(riemann=E.ONE, general_solution=_pw0(E.ONE), pw_order=0, cpp=True)
    return RegistryEntry("trivial", eq, known, description="phi_uv = 0")


def klein_gordon(mu: float = 1.0) -> RegistryEntry:
    """phi_uv + mu^2 phi = 0; Riemann function J0(2 mu sqrt((up - u)(vp - v)))."""
    name = f"klein_gordon_{mu:g}"
    eq = WaveEquation(E.ZERO, E.ZERO, E.const(mu * mu), name=name)

    def oracle(u, v, up, vp):
        return special.j0(2 * mu * np.sqrt(np.maximum((up - u) * (vp - v), 0.0)))

    known = Known(riemann_oracle=oracle, cpp=mu == 0)
    return RegistryEntry(name, eq, known, description=f"phi_uv + {mu * mu:g} phi = 0")


def multipole(l: int) -> RegistryEntry:  # noqa: E741
    """phi_uv + l(l+1)/(v-u)^2 phi = 0 with the singular line u = v."""
    name = f"multipole_{l}"
    eq = WaveEquation(E.ZERO, E.ZERO, E.const(l * (l + 1)) / (E.V - E.U) ** 2,
                      singular_lines=(0.0,), name=name)
    general = None
    if l == 0:
        general = _pw0(E.ONE)
    elif l == 1:
        r = E.V - E.U
        general = ProgressingWave(1, (2 / r, E.ONE), (-2 / r, E.ONE))
    known = Known(general_solution=general, pw_order=l, cpp=l == 0)
    return RegistryEntry(name, eq, known, work_rect=MULTIPOLE_WORK_RECT,
                         description=f"multipole order {l}")


def lambda_family(lam: str | Expr, name: str | None = None) -> RegistryEntry:
    """U = Lambda_v, V = Lambda_u, W = Lambda_uv + Lambda_u Lambda_v; always CPP."""
    lam = E.parse(lam) if isinstance(lam, str) else lam
    lu, lv = E.diff(lam, "u"), E.diff(lam, "v")
    name = name or f"lambda[{E.to_string(lam)}]"
    eq = WaveEquation(lv, lu, E.diff(lu, "v") + lu * lv, name=name)
    riemann = E.exp(lam - E.substitute(lam, {"u": UP, "v": VP}))
    known = Known(riemann=riemann, general_solution=_pw0(E.exp(-lam)), pw_order=0, cpp=True)
    return RegistryEntry(name, eq, known, description=f"Lambda = {E.to_string(lam)}")


_BUILDERS = {
    "trivial": trivial,
    "klein_gordon_1": lambda: klein_gordon(1.0),
    **{f"multipole_{l}": functools.partial(multipole, l) for l in range(MULTIPOLE_MAX_L + 1)},
    "lambda_uv": lambda: lambda_family("u*v", "lambda_uv"),
    "lambda_sincos": lambda: lambda_family("sin(u)*cos(v)", "lambda_sincos"),
}


def names() -> list:
    return list(_BUILDERS)


@functools.lru_cache(maxsize=None)
def get(name: str) -> RegistryEntry:
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"no registry entry {name!r}; known: {', '.join(_BUILDERS)}") from None
    return builder()


def registry() -> list:
    return [get(name) for name in _BUILDERS]


# ---------------------------------------------------------------- point-source limit


@dataclass(frozen=True)
class DeltaLimitReference:
    """Solution of the l = 1 multipole equation for data delta(u - u0) on v = 0, zero on u = 0.

    ``smooth`` is the regular part (2/u0^2) uv/(v-u) [theta(u-u0) + c]; the
    distributional part is a unit delta on the line u = u0, recorded in
    ``singular`` and never evaluated.
    """

    u0: float
    c: float

    @property
    def singular(self) -> dict:
        return {"kind": "delta", "line": "u = u0", "u0": self.u0, "weight": 1.0}

    def smooth(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        step = np.where(u > self.u0, 1.0, 0.0) + self.c
        return 2.0 / self.u0 ** 2 * u * v / (v - u) * step


def multipole_l1_delta_solution(u0: float, c: float = 0.0) -> DeltaLimitReference:
    if u0 <= 0:
        raise ValueError("u0 must be positive")
    return DeltaLimitReference(float(u0), float(c))
