"""Riemann function of the advanced Green function.

G(u, v; u', v') = Delta(u, v; u', v') * theta(u' - u) * theta(v' - v), where
Delta solves the adjoint equation

    Delta_uv - (U Delta)_u - (V Delta)_v + W Delta = 0

with Delta(u, v') = exp(-int_u^{u'} V(s, v') ds) and
Delta(u', v) = exp(-int_v^{v'} U(u', s) ds).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.interpolate import RegularGridInterpolator

from . import expr as E
from .equation import WaveEquation, classify_cpp
from .errors import NotCpp, SingularPath
from .expr import EvalPoint, Expr
from .grid import Grid, march


@dataclass(frozen=True)
class GreenSupport:
    """Closed quadrant {u <= u', v <= v'} below the base point."""

    base: EvalPoint

    def contains(self, u, v):
        return (np.asarray(u) <= self.base.u) & (np.asarray(v) <= self.base.v)


@dataclass(frozen=True, eq=False)
class RiemannField:
    base: EvalPoint
    grid: Grid
    values: np.ndarray  # values[i, j] = Delta(u_i, v_j; base)

    @property
    def support(self) -> GreenSupport:
        return GreenSupport(self.base)

    def green(self, u, v):
        """Advanced Green function sampled by bilinear interpolation; exactly 0 off the support."""
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        interp = RegularGridInterpolator(self.grid.axes, self.values, bounds_error=False,
                                         fill_value=np.nan)
        inside = self.support.contains(u, v)
        out = np.zeros(np.broadcast(u, v).shape)
        pts = np.stack(np.broadcast_arrays(u, v), axis=-1)
        if inside.any():
            out[inside] = interp(pts[inside])
        return out


def _segment_integrals(f: Expr, var_name: str, fixed_name: str, fixed: float, nodes):
    """Integrals of ``f`` over each interval [nodes[i], nodes[i+1]] along ``var_name``."""
    if f.is_const:
        return f.value * np.diff(nodes)
    lo = nodes[:-1]
    h = np.diff(nodes)

    def integrand(t):
        env = {var_name: lo + t * h, fixed_name: fixed}
        return E.evaluate_masked(f, **env) * h

    vals, _ = integrate.quad_vec(integrand, 0.0, 1.0, epsabs=1e-10, epsrel=1e-13, norm="max")
    if not np.all(np.isfinite(vals)):
        raise SingularPath(f"characteristic {fixed_name} = {fixed} meets a singular point")
    return vals


def characteristic_data(eq: WaveEquation, base: EvalPoint, grid: Grid):
    """Delta on v = v' (over grid.u) and on u = u' (over grid.v)."""
    u, v = grid.u, grid.v
    seg_u = _segment_integrals(eq.V, "u", "v", base.v, u)
    seg_v = _segment_integrals(eq.U, "v", "u", base.u, v)
    # int_{u_i}^{u'}: reverse cumulative sums
    tail_u = np.concatenate([np.cumsum(seg_u[::-1])[::-1], [0.0]])
    tail_v = np.concatenate([np.cumsum(seg_v[::-1])[::-1], [0.0]])
    return np.exp(-tail_u), np.exp(-tail_v)


def riemann_numeric(eq: WaveEquation, base: EvalPoint, grid: Grid | None = None,
                    n: int = 64, lower: EvalPoint | None = None) -> RiemannField:
    """March the adjoint equation from the base corner towards decreasing u and v.

    ``grid`` must have its upper-right corner at ``base``; by default the
    grid spans from ``lower`` (the domain's lower-left corner) to ``base``
    with ``n`` cells per direction.
    """
    if grid is None:
        if lower is None:
            lower = EvalPoint(eq.domain.u_lo, eq.domain.v_lo)
        grid = Grid(lower.u, base.u, n, lower.v, base.v, n)
    if not (np.isclose(grid.u_hi, base.u) and np.isclose(grid.v_hi, base.v)):
        raise ValueError("the grid's upper-right corner must be the base point")
    eq.check_rect(grid.rect)
    along_u, along_v = characteristic_data(eq, base, grid)

    uc, vc = grid.centers()
    # reversed coordinates x = u' - u, y = v' - v flip both first-order signs
    A = E.evaluate_masked(eq.U, uc, vc)
    B = E.evaluate_masked(eq.V, uc, vc)
    C = E.evaluate_masked(eq.W - E.diff(eq.U, "u") - E.diff(eq.V, "v"), uc, vc)
    flip = (slice(None, None, -1), slice(None, None, -1))
    if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B)) and np.all(np.isfinite(C))):
        raise SingularPath("coefficients are singular inside the grid")
    f = march(A[flip], B[flip], C[flip], along_u[::-1], along_v[::-1], grid.hu, grid.hv)
    values = f[flip].copy()
    values[-1, -1] = 1.0
    return RiemannField(base=base, grid=grid, values=values)


UP = E.var("up")
VP = E.var("vp")


def riemann_closed_form_cpp(eq: WaveEquation) -> Expr:
    """Delta = exp(Lambda(u, v) - Lambda(up, vp)) for CPP equations."""
    verdict = classify_cpp(eq)
    if not verdict.is_cpp:
        raise NotCpp(f"equation {eq.name or ''} does not have the characteristic propagation property")
    lam = verdict.lam
    lam_base = E.substitute(lam, {"u": UP, "v": VP})
    return E.exp(lam - lam_base)


def evaluate_closed_form(delta: Expr, u, v, base: EvalPoint):
    return E.evaluate(delta, u, v, up=base.u, vp=base.v)


def _centered(f, hu, hv):
    fu = (f[2:, 1:-1] - f[:-2, 1:-1]) / (2 * hu)
    fv = (f[1:-1, 2:] - f[1:-1, :-2]) / (2 * hv)
    fuv = (f[2:, 2:] - f[2:, :-2] - f[:-2, 2:] + f[:-2, :-2]) / (4 * hu * hv)
    return fu, fv, fuv


def verify_adjoint(eq: WaveEquation, field: RiemannField, cpp: bool | None = None) -> dict:
    """Residuals of the adjoint equation at interior nodes by centred differences.

    For CPP equations also reports the residual of Delta_uv - W Delta = 0.
    """
    g = field.grid
    uu, vv = g.mesh()
    D = field.values
    Uv = E.evaluate_masked(eq.U, uu, vv) * np.ones_like(D)
    Vv = E.evaluate_masked(eq.V, uu, vv) * np.ones_like(D)
    Wv = E.evaluate_masked(eq.W, uu, vv) * np.ones_like(D)
    _, _, d_uv = _centered(D, g.hu, g.hv)
    ud_u, _, _ = _centered(Uv * D, g.hu, g.hv)
    _, vd_v, _ = _centered(Vv * D, g.hu, g.hv)
    inner = (slice(1, -1), slice(1, -1))
    res = d_uv - ud_u - vd_v + Wv[inner] * D[inner]
    report = {
        "max_residual": float(np.max(np.abs(res))),
        "rms_residual": float(np.sqrt(np.mean(res ** 2))),
    }
    if cpp is None:
        cpp = classify_cpp(eq).is_cpp
    if cpp:
        res2 = d_uv - Wv[inner] * D[inner]
        report["max_residual_reduced"] = float(np.max(np.abs(res2)))
        report["rms_residual_reduced"] = float(np.sqrt(np.mean(res2 ** 2)))
    return report


def closed_form_residuals(eq: WaveEquation, delta: Expr, base: EvalPoint, count=100, seed=0):
    """Symbolic check of a four-variable closed form at random points of the support.

    Returns max |adjoint residual| and max |Delta_uv - W Delta|.
    """
    u, v = eq.sample_points(count, seed)
    keep = (u <= base.u) & (v <= base.v)
    u, v = u[keep], v[keep]
    adj = E.evaluate(eq.adjoint_residual(delta), u, v, up=base.u, vp=base.v)
    red = E.evaluate(E.mixed(delta) - eq.W * delta, u, v, up=base.u, vp=base.v)
    return float(np.max(np.abs(adj))), float(np.max(np.abs(red)))
