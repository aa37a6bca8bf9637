"""Tail measurements for compactly supported data.

A tail is field that survives where no characteristic from the data support
reaches. For Goursat data this is the corner region beyond both data strips;
for Cauchy data it is the interior of the cone between the two outgoing
fronts. Sizes are reported in the max norm plus a plain discrete L2 sum
(a proxy only, there is no canonical tail energy here).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .equation import WaveEquation
from .errors import RegionEmpty
from .grid import Grid, TimeGrid
from .solver import CauchyData, CharacteristicData, Field, solve_cauchy, solve_goursat

MIN_MARGIN_CELLS = 2
TOL_FACTOR = 10.0
ROUND_OFF_FLOOR = 1e-12


class Verdict(enum.Enum):
    TAIL_FREE = "TailFree"
    TAILED = "Tailed"
    TAILED_PLATEAU = "TailedPlateau"  # nonzero but constant in time (massless, nonzero-mean phi_t)


@dataclass(frozen=True)
class TailRegion:
    """Where a tail would live.

    ``goursat_strip``: {u > b + m, v > d + m} for data supports [a, b] on the
    lower edge and [c, d] on the left edge; an edge without data contributes
    its own coordinate in place of b or d.

    ``cauchy_cone_interior``: {t - t0 > (x - a) + m and t - t0 > (b - x) + m}
    for support [a, b] at t = t0, the points strictly behind both fronts.
    """

    kind: str
    support_u: tuple | None = None
    support_v: tuple | None = None
    support_x: tuple | None = None
    t0: float = 0.0
    margin: float | None = None  # None: MIN_MARGIN_CELLS grid cells

    @classmethod
    def goursat(cls, support_u, support_v, margin=None):
        return cls("goursat_strip", support_u=support_u, support_v=support_v, margin=margin)

    @classmethod
    def cauchy(cls, support, t0=0.0, margin=None):
        return cls("cauchy_cone_interior", support_x=tuple(support), t0=t0, margin=margin)

    def _margin(self, h):
        if self.margin is None:
            return MIN_MARGIN_CELLS * h
        if self.margin < MIN_MARGIN_CELLS * h * (1 - 1e-9):
            raise ValueError(f"tail margin {self.margin} is below {MIN_MARGIN_CELLS} cells (h = {h})")
        return self.margin

    def mask(self, grid) -> np.ndarray:
        if self.kind == "goursat_strip":
            m = self._margin(max(grid.hu, grid.hv))
            b = self.support_u[1] if self.support_u is not None else grid.u_lo
            d = self.support_v[1] if self.support_v is not None else grid.v_lo
            uu, vv = grid.mesh()
            out = (uu > b + m) & (vv > d + m)
        elif self.kind == "cauchy_cone_interior":
            m = self._margin(max(grid.ht, grid.hx))
            a, b = self.support_x
            tt, xx = np.meshgrid(grid.t, grid.x, indexing="ij")
            s = tt - self.t0
            out = (s > (xx - a) + m) & (s > (b - xx) + m)
            out[:, [0, -1]] = False
        else:
            raise ValueError(f"unknown tail region kind {self.kind!r}")
        if not out.any():
            raise RegionEmpty(f"{self.kind} region is empty on this grid")
        return out

    def to_json(self):
        return {"kind": self.kind, "support_u": self.support_u, "support_v": self.support_v,
                "support_x": self.support_x, "t0": self.t0, "margin": self.margin}


@dataclass(frozen=True, eq=False)
class TailReport:
    sup_tail: float
    energy_tail: float
    sup_total: float
    verdict: Verdict
    tol: float
    truncation: float | None = None  # max |phi_h - phi_{h/2}| used for the default tol
    drift: float | None = None  # Cauchy only: late-time change of the tail values
    region: TailRegion | None = None
    field: Field | None = None

    @property
    def tail_free(self) -> bool:
        return self.verdict is Verdict.TAIL_FREE

    def to_json(self):
        return {
            "sup_tail": self.sup_tail,
            "energy_tail": self.energy_tail,
            "sup_total": self.sup_total,
            "verdict": self.verdict.value,
            "tol": self.tol,
            "truncation": self.truncation,
            "drift": self.drift,
            "region": None if self.region is None else self.region.to_json(),
        }


def _metrics(field: Field, mask):
    vals = field.values[mask]
    return (float(np.max(np.abs(vals))), float(np.sum(vals ** 2) * field.grid.cell_area),
            field.sup())


def _truncation(field: Field, fine: Field):
    diff = float(np.max(np.abs(field.values - fine.coarsen(2))))
    return diff, max(diff, ROUND_OFF_FLOOR * max(1.0, field.sup()))


def measure_goursat_tail(eq: WaveEquation, data: CharacteristicData, grid: Grid,
                         tol: float | None = None, margin: float | None = None) -> TailReport:
    """Solve the Goursat problem and measure the field beyond both data strips.

    Without ``tol`` the verdict threshold is TOL_FACTOR times the observed
    difference between this grid and its halving, floored at round-off.
    """
    along_u, along_v = data.sample(grid)
    if along_u[0] != 0.0:
        raise ValueError("tail measurements need data vanishing at the corner")
    for vals, support, edge in ((along_u, data.support_u, "v = v_lo"),
                                (along_v, data.support_v, "u = u_lo")):
        if support is None and np.any(vals != 0.0):
            raise ValueError(f"data on {edge} need a compact support")
    for support, lo, hi in ((data.support_u, grid.u_lo, grid.u_hi),
                            (data.support_v, grid.v_lo, grid.v_hi)):
        if support is not None and not (lo < support[0] < support[1] < hi):
            raise ValueError(f"support {support} is not strictly inside [{lo}, {hi}]")
    region = TailRegion.goursat(data.support_u, data.support_v, margin)
    mask = region.mask(grid)
    field = solve_goursat(eq, data, grid)
    sup_tail, energy, sup_total = _metrics(field, mask)
    truncation = None
    if tol is None:
        truncation, est = _truncation(field, solve_goursat(eq, data, grid.refine(2)))
        tol = TOL_FACTOR * est
    elif not tol > 0:
        raise ValueError("tolerance must be positive")
    verdict = Verdict.TAIL_FREE if sup_tail <= tol else Verdict.TAILED
    return TailReport(sup_tail, energy, sup_total, verdict, tol, truncation, None, region, field)


def measure_cauchy_tail(eq: WaveEquation, data: CauchyData, grid: TimeGrid,
                        tol: float | None = None, margin: float | None = None) -> TailReport:
    """Solve the Cauchy problem and measure the field inside the cone behind both fronts.

    ``drift`` is the largest change of the tail values between the last time
    level and the level halfway through the time span, over the x-nodes in the
    region at both levels. A tail whose drift is within ``tol`` is reported as
    a constant plateau (TailedPlateau) rather than a radiating tail.
    """
    if data.support is None:
        raise ValueError("Cauchy tail measurements need data with a compact support")
    a, b = data.support
    if not (grid.x_lo < a < b < grid.x_hi):
        raise ValueError(f"support {data.support} is not strictly inside the x-range")
    region = TailRegion.cauchy(data.support, grid.t0, margin)
    mask = region.mask(grid)
    field = solve_cauchy(eq, data, grid)
    sup_tail, energy, sup_total = _metrics(field, mask)
    truncation = None
    if tol is None:
        truncation, est = _truncation(field, solve_cauchy(eq, data, grid.refine(2)))
        tol = TOL_FACTOR * est
    elif not tol > 0:
        raise ValueError("tolerance must be positive")

    last, mid = grid.n_t, grid.n_t // 2
    both = mask[last] & mask[mid]
    drift = float(np.max(np.abs(field.values[last, both] - field.values[mid, both]))) \
        if both.any() else math.nan
    if sup_tail <= tol:
        verdict = Verdict.TAIL_FREE
    elif drift <= tol:
        verdict = Verdict.TAILED_PLATEAU
    else:
        verdict = Verdict.TAILED
    return TailReport(sup_tail, energy, sup_total, verdict, tol, truncation, drift, region, field)


def halving_stability(measure, eq, data, grid, **kwargs):
    """sup_tail on ``grid`` and on its halving, with the relative change."""
    coarse = measure(eq, data, grid, **kwargs)
    fine = measure(eq, data, grid.refine(2), **kwargs)
    change = abs(fine.sup_tail - coarse.sup_tail) / max(coarse.sup_tail, np.finfo(float).tiny)
    return coarse, fine, change
