"""Uniform grids and the characteristic cell march shared by the solvers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnstableCell
from .expr import Rect

PIVOT_TOL = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform node grid on ``[u_lo, u_hi] x [v_lo, v_hi]`` with n_u x n_v cells."""

    u_lo: float
    u_hi: float
    n_u: int
    v_lo: float
    v_hi: float
    n_v: int

    def __post_init__(self):
        if self.n_u < 1 or self.n_v < 1:
            raise ValueError("grid needs at least one cell per direction")
        if not (self.u_hi > self.u_lo and self.v_hi > self.v_lo):
            raise ValueError("grid must have positive extent")

    axis_names = ("u", "v")

    @classmethod
    def square(cls, rect: Rect, n: int) -> "Grid":
        return cls(rect.u_lo, rect.u_hi, n, rect.v_lo, rect.v_hi, n)

    @classmethod
    def with_spacing(cls, rect: Rect, h: float) -> "Grid":
        n_u = round((rect.u_hi - rect.u_lo) / h)
        n_v = round((rect.v_hi - rect.v_lo) / h)
        return cls(rect.u_lo, rect.u_hi, n_u, rect.v_lo, rect.v_hi, n_v)

    @property
    def hu(self):
        return (self.u_hi - self.u_lo) / self.n_u

    @property
    def hv(self):
        return (self.v_hi - self.v_lo) / self.n_v

    @property
    def u(self):
        return np.linspace(self.u_lo, self.u_hi, self.n_u + 1)

    @property
    def v(self):
        return np.linspace(self.v_lo, self.v_hi, self.n_v + 1)

    @property
    def rect(self) -> Rect:
        return Rect(self.u_lo, self.u_hi, self.v_lo, self.v_hi)

    @property
    def axes(self):
        return self.u, self.v

    @property
    def cell_area(self):
        return self.hu * self.hv

    def mesh(self):
        return np.meshgrid(self.u, self.v, indexing="ij")

    def centers(self):
        uc = self.u_lo + (np.arange(self.n_u) + 0.5) * self.hu
        vc = self.v_lo + (np.arange(self.n_v) + 0.5) * self.hv
        return np.meshgrid(uc, vc, indexing="ij")

    def refine(self, factor: int) -> "Grid":
        return Grid(self.u_lo, self.u_hi, self.n_u * factor, self.v_lo, self.v_hi, self.n_v * factor)

    def to_json(self):
        return {"u": [self.u_lo, self.u_hi], "n_u": self.n_u,
                "v": [self.v_lo, self.v_hi], "n_v": self.n_v}


@dataclass(frozen=True)
class TimeGrid:
    """Uniform (t, x) grid: n_t time steps of size h_t, n_x cells in x."""

    t0: float
    t1: float
    n_t: int
    x_lo: float
    x_hi: float
    n_x: int

    axis_names = ("t", "x")

    @classmethod
    def with_cfl(cls, t0, t1, x_lo, x_hi, n_x, cfl=1.0) -> "TimeGrid":
        hx = (x_hi - x_lo) / n_x
        n_t = int(np.ceil((t1 - t0) / (cfl * hx) - 1e-9))
        return cls(t0, t1, n_t, x_lo, x_hi, n_x)

    @property
    def ht(self):
        return (self.t1 - self.t0) / self.n_t

    @property
    def hx(self):
        return (self.x_hi - self.x_lo) / self.n_x

    @property
    def cfl(self):
        return self.ht / self.hx

    @property
    def t(self):
        return np.linspace(self.t0, self.t1, self.n_t + 1)

    @property
    def x(self):
        return np.linspace(self.x_lo, self.x_hi, self.n_x + 1)

    @property
    def axes(self):
        return self.t, self.x

    @property
    def cell_area(self):
        return self.ht * self.hx

    def refine(self, factor: int) -> "TimeGrid":
        return TimeGrid(self.t0, self.t1, self.n_t * factor, self.x_lo, self.x_hi, self.n_x * factor)

    def to_json(self):
        return {"t": [self.t0, self.t1], "n_t": self.n_t,
                "x": [self.x_lo, self.x_hi], "n_x": self.n_x}


def march(A, B, C, along_x, along_y, hx, hy):
    """Solve f_xy + A f_x + B f_y + C f = 0 on a grid from data on x = 0 and y = 0.

    ``A``, ``B``, ``C`` hold coefficient values at the cell centres, shape
    (nx, ny); ``along_x`` are the nx+1 values on y = 0 and ``along_y`` the
    ny+1 values on x = 0. Each cell is closed by the cross difference for
    f_xy, cell-centred differences for f_x and f_y, and the four-corner mean
    for f, which is second-order accurate at the centre. Cells on one
    anti-diagonal are independent and are updated together.
    """
    A, B, C = (np.asarray(c, dtype=float) for c in (A, B, C))
    nx, ny = A.shape
    f = np.empty((nx + 1, ny + 1))
    f[:, 0] = along_x
    f[0, :] = along_y
    a = A * (hy / 2)
    b = B * (hx / 2)
    c = C * (hx * hy / 4)
    pivot = 1.0 + a + b + c
    small = np.abs(pivot) < PIVOT_TOL
    if small.any() or not np.all(np.isfinite(pivot)):
        i, j = np.argwhere(small | ~np.isfinite(pivot))[0]
        raise UnstableCell(f"cell ({i}, {j}) has pivot {pivot[i, j]!r}")
    w10 = (1.0 - a + b - c) / pivot
    w01 = (1.0 + a - b - c) / pivot
    w00 = -(1.0 - a - b + c) / pivot
    for d in range(nx + ny - 1):
        i = np.arange(max(0, d - ny + 1), min(d, nx - 1) + 1)
        j = d - i
        f[i + 1, j + 1] = w10[i, j] * f[i + 1, j] + w01[i, j] * f[i, j + 1] + w00[i, j] * f[i, j]
    return f
