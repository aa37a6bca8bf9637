"""Goursat (characteristic) and Cauchy solvers for the null-coordinate wave equation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import expr as E
from .equation import WaveEquation
from .errors import CflViolation, ExactScheme, SingularPath, SupportNotAligned
from .grid import Grid, TimeGrid, march

ROUND_OFF = 1e3 * np.finfo(float).eps


@dataclass(frozen=True)
class CharacteristicData:
    """phi(u, v0) = along_u(u) and phi(u0, v) = along_v(v) on the grid's lower and left edges.

    Supports, when given, are the intervals outside which the data vanish;
    their ends must fall on grid nodes.
    """

    along_u: Callable
    along_v: Callable
    support_u: tuple | None = None
    support_v: tuple | None = None
    corner_value: float | None = None

    @classmethod
    def zero(cls):
        return cls(lambda u: np.zeros_like(u), lambda v: np.zeros_like(v))

    @classmethod
    def from_waveforms(cls, wave_u=None, wave_v=None):
        """Data from waveforms (e.g. Bump) on each edge; None means zero there.

        Supports are taken from the waveforms' ``support`` attribute.
        """
        def pick(w):
            if w is None:
                return (lambda x: np.zeros_like(x)), None
            return (lambda x: w(x)), getattr(w, "support", None)

        fu, su = pick(wave_u)
        fv, sv = pick(wave_v)
        return cls(fu, fv, su, sv)

    def sample(self, grid: Grid):
        fu = np.asarray(self.along_u(grid.u), dtype=float) * np.ones(grid.n_u + 1)
        fv = np.asarray(self.along_v(grid.v), dtype=float) * np.ones(grid.n_v + 1)
        scale = max(1.0, abs(fu[0]), abs(fv[0]))
        if abs(fu[0] - fv[0]) > 1e-12 * scale:
            raise ValueError(f"data disagree at the corner: {fu[0]!r} vs {fv[0]!r}")
        if self.corner_value is not None and abs(fu[0] - self.corner_value) > 1e-12 * scale:
            raise ValueError("corner value does not match the data")
        _check_aligned(self.support_u, grid.u_lo, grid.hu, "u")
        _check_aligned(self.support_v, grid.v_lo, grid.hv, "v")
        return fu, fv

    def scaled(self, a: float) -> "CharacteristicData":
        return CharacteristicData(lambda u: a * self.along_u(u), lambda v: a * self.along_v(v),
                                  self.support_u, self.support_v,
                                  None if self.corner_value is None else a * self.corner_value)


def _check_aligned(support, lo, h, name):
    if support is None:
        return
    for edge in support:
        k = (edge - lo) / h
        if abs(k - round(k)) > 1e-9:
            raise SupportNotAligned(f"support edge {name} = {edge} is not a grid node (h = {h})")


@dataclass(frozen=True)
class CauchyData:
    """phi(t0, x) = phi0(x), phi_t(t0, x) = phi1(x); ``support`` bounds both."""

    phi0: Callable
    phi1: Callable
    support: tuple | None = None

    @classmethod
    def from_waveforms(cls, phi0=None, phi1=None):
        """Data from compactly supported waveforms; the support is the hull of both."""
        sups = [w.support for w in (phi0, phi1) if w is not None and w.support is not None]
        support = (min(s[0] for s in sups), max(s[1] for s in sups)) if sups else None
        zero = lambda x: np.zeros_like(x)  # noqa: E731
        return cls(phi0 if phi0 is not None else zero, phi1 if phi1 is not None else zero, support)

    def sample(self, x):
        zeros = np.zeros_like(x)
        return (np.asarray(self.phi0(x), dtype=float) + zeros,
                np.asarray(self.phi1(x), dtype=float) + zeros)

    def scaled(self, a: float) -> "CauchyData":
        return CauchyData(lambda x: a * self.phi0(x), lambda x: a * self.phi1(x), self.support)


@dataclass(frozen=True, eq=False)
class Field:
    grid: Grid | TimeGrid
    values: np.ndarray

    @property
    def axis_names(self):
        return self.grid.axis_names

    def coarsen(self, factor: int) -> np.ndarray:
        return self.values[::factor, ::factor]

    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


def _coefficients_at(eq: WaveEquation, u, v):
    out = []
    for c in (eq.U, eq.V, eq.W):
        val = E.evaluate_masked(c, u, v) * np.ones(np.shape(u))
        if not np.all(np.isfinite(val)):
            raise SingularPath(f"coefficient {E.to_string(c)} is singular on the grid")
        out.append(val)
    return out


def solve_goursat(eq: WaveEquation, data: CharacteristicData, grid: Grid) -> Field:
    """Solve the equation on ``grid`` from data on its lower (v = v_lo) and left (u = u_lo) edges."""
    eq.check_rect(grid.rect)
    along_u, along_v = data.sample(grid)
    A, B, C = _coefficients_at(eq, *grid.centers())
    return Field(grid, march(A, B, C, along_u, along_v, grid.hu, grid.hv))


def solve_cauchy(eq: WaveEquation, data: CauchyData, grid: TimeGrid) -> Field:
    """Three-level leapfrog for

        phi_tt - phi_xx + (U+V) phi_t + (V-U) phi_x + W phi = 0,   u = (t-x)/2, v = (t+x)/2,

    with phi = 0 held at both x ends. The first step uses the Taylor
    expansion with phi_tt taken from the equation. No artificial dissipation.
    """
    if grid.cfl > 1.0 + 1e-12:
        raise CflViolation(f"h_t/h_x = {grid.cfl:.6g} exceeds 1")
    t, x = grid.t, grid.x
    k, h = grid.ht, grid.hx
    tt, xx = np.meshgrid(t, x, indexing="ij")
    uu, vv = (tt - xx) / 2, (tt + xx) / 2
    for c in eq.singular_lines:
        if np.any(np.abs(uu - vv - c) <= eq.margin):
            raise SingularPath(f"grid comes within {eq.margin} of the line u = v + {c}")
    Uc, Vc, Wc = _coefficients_at(eq, uu, vv)
    a, b, c = Uc + Vc, Vc - Uc, Wc

    phi = np.zeros((grid.n_t + 1, grid.n_x + 1))
    p0, p1 = data.sample(x)
    if data.support is not None:
        _check_aligned(data.support, grid.x_lo, h, "x")
    phi[0] = p0
    phi[0, [0, -1]] = 0.0
    pxx = np.zeros_like(p0)
    px = np.zeros_like(p0)
    pxx[1:-1] = (p0[2:] - 2 * p0[1:-1] + p0[:-2]) / h ** 2
    px[1:-1] = (p0[2:] - p0[:-2]) / (2 * h)
    ptt = pxx - a[0] * p1 - b[0] * px - c[0] * p0
    phi[1] = p0 + k * p1 + 0.5 * k ** 2 * ptt
    phi[1, [0, -1]] = 0.0

    r2 = (k / h) ** 2
    for n in range(1, grid.n_t):
        cur, prev = phi[n], phi[n - 1]
        an, bn, cn = a[n, 1:-1], b[n, 1:-1], c[n, 1:-1]
        lap = cur[2:] - 2 * cur[1:-1] + cur[:-2]
        dx = cur[2:] - cur[:-2]
        rhs = (2 * cur[1:-1] - prev[1:-1] + r2 * lap + 0.5 * k * an * prev[1:-1]
               - 0.5 * k ** 2 / h * bn * dx - k ** 2 * cn * cur[1:-1])
        phi[n + 1, 1:-1] = rhs / (1.0 + 0.5 * k * an)
    return Field(grid, phi)


def solve(eq, data, grid):
    if isinstance(grid, TimeGrid):
        return solve_cauchy(eq, data, grid)
    return solve_goursat(eq, data, grid)


@dataclass(frozen=True)
class ConvergenceRun:
    order: float
    diffs: tuple  # (|phi_h - phi_h/2|, |phi_h/2 - phi_h/4|) on the coarse nodes
    fields: tuple


def convergence_run(eq, data, grid) -> ConvergenceRun:
    """Solve on grid, grid/2 and grid/4 and estimate the observed order."""
    fields = tuple(solve(eq, data, grid.refine(f)) for f in (1, 2, 4))
    coarse = [fields[0].values, fields[1].coarsen(2), fields[2].coarsen(4)]
    d1 = float(np.max(np.abs(coarse[0] - coarse[1])))
    d2 = float(np.max(np.abs(coarse[1] - coarse[2])))
    scale = max(1.0, fields[2].sup())
    if d2 <= ROUND_OFF * scale:
        order = math.inf
    else:
        order = math.log2(d1 / d2) if d1 > 0 else -math.inf
    return ConvergenceRun(order, (d1, d2), fields)


def convergence_order(eq, data, grid) -> float:
    """Richardson estimate log2(|phi_h - phi_h/2| / |phi_h/2 - phi_h/4|) in the max norm.

    Raises ExactScheme when the differences are at round-off level.
    """
    run = convergence_run(eq, data, grid)
    if math.isinf(run.order):
        raise ExactScheme(f"grid differences {run.diffs} are at round-off level")
    return run.order
