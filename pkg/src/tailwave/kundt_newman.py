"""Substitution sequences, exact progressing-wave solutions and PW0 builders.

From the v-normal form d/dv(j0 dphi0/du) - j1 phi0 = 0 the sequence

    j_{k+1} = j_k * (j_k / j_{k-1} - d2/dudv ln|j_k|)

is iterated upward, and symmetrically

    l_{k-1} = l_k * (l_k / l_{k+1} - d2/dvdu ln|l_k|)

downward from (l0, l_{-1}). When j_{k1+1} and l_{k2-1} vanish identically
the general solution is a progressing wave of order max(k1, -k2).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import expr as E
from .equation import WaveEquation, classify_cpp, factor_transforms, normal_form
from .errors import AllPointsSingular, IndeterminateTermination, NotCpp, NotTerminating
from .expr import Expr
from .waveforms import PolynomialWave, as_waveform


class Status(enum.Enum):
    DOUBLE_TERMINATING = "DoubleTerminating"
    NON_TERMINATING = "NonTerminating"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class SubstitutionSequence:
    j_chain: tuple  # j_0, j_1, ..., j_{k1} (or up to k_max)
    l_chain: tuple  # l_0, l_{-1}, ..., l_{k2}
    k1: int | None
    k2: int | None
    k_max: int
    status: Status
    sigma: Expr = E.ZERO
    tau: Expr = E.ZERO

    @property
    def N(self):
        if self.k1 is None or self.k2 is None:
            return None
        return max(self.k1, -self.k2)

    def j(self, k):
        return self.j_chain[k]

    def l(self, k):  # noqa: E743
        return self.l_chain[-k]

    def to_json(self, max_chars=2000):
        def show(e):
            s = E.to_string(e)
            return s if len(s) <= max_chars else s[:max_chars] + "..."

        status = self.status.value
        if self.status is Status.NON_TERMINATING:
            status = f"NonTerminating({self.k_max})"
        return {
            "status": status,
            "k1": self.k1,
            "k2": self.k2,
            "N": self.N,
            "k_max": self.k_max,
            "j": [show(e) for e in self.j_chain],
            "l": [show(e) for e in self.l_chain],
        }


def _next(cur, prev, ordered_mixed):
    """cur * (cur/prev - mixed ln|cur|), kept in unreduced product form."""
    return cur * (cur / prev - ordered_mixed(E.ln(cur)))


def _mixed_uv(e):
    return E.diff(E.diff(e, "v"), "u")


def _mixed_vu(e):
    return E.diff(E.diff(e, "u"), "v")


def _chain(eq, first, second, step_mixed, k_max, trials, tol):
    """Iterate one chain; returns (elements up to the last nonzero one, index or None)."""
    chain = [first]
    prev, cur = first, second
    for k in range(k_max):
        if eq.is_zero(cur, trials=trials, tol=tol):
            return chain, k
        chain.append(cur)
        prev, cur = cur, _next(cur, prev, step_mixed)
    return chain, None


def build_sequence(eq: WaveEquation, k_max: int = 8, trials: int = 64,
                   tol: float = 1e-9) -> SubstitutionSequence:
    """Build both chains, stopping each at its first identically zero element or at k_max."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    ft = factor_transforms(eq)
    nf = normal_form(eq, ft)
    try:
        j_chain, k1 = _chain(eq, nf.j0, nf.j1, _mixed_uv, k_max, trials, tol)
        l_chain, m = _chain(eq, nf.l0, nf.l_minus1, _mixed_vu, k_max, trials, tol)
    except AllPointsSingular as exc:
        raise IndeterminateTermination(str(exc)) from exc
    k2 = None if m is None else -m
    status = Status.DOUBLE_TERMINATING if (k1 is not None and k2 is not None) \
        else Status.NON_TERMINATING
    return SubstitutionSequence(tuple(j_chain), tuple(l_chain), k1, k2, k_max, status,
                                ft.sigma, ft.tau)


# ---------------------------------------------------------------- progressing waves


@dataclass(frozen=True, eq=False)
class ProgressingWave:
    """phi(u, v) = sum_i f_i(u, v) R^(i)(u) + sum_i g_i(u, v) S^(i)(v)."""

    order: int
    f: tuple
    g: tuple
    R: object = None
    S: object = None
    meta: dict = field(default_factory=dict)

    def with_waveforms(self, R, S) -> "ProgressingWave":
        return ProgressingWave(self.order, self.f, self.g, as_waveform(R), as_waveform(S), self.meta)

    def __call__(self, u, v):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        out = np.zeros(np.broadcast(u, v).shape)
        for i, fi in enumerate(self.f):
            if not (fi.is_const and fi.value == 0.0):
                out = out + E.evaluate(fi, u, v) * self.R(u, i)
        for i, gi in enumerate(self.g):
            if not (gi.is_const and gi.value == 0.0):
                out = out + E.evaluate(gi, u, v) * self.S(v, i)
        return out

    def as_expr(self) -> Expr:
        """Closed form when both waveforms are polynomials."""
        if not (isinstance(self.R, PolynomialWave) and isinstance(self.S, PolynomialWave)):
            raise TypeError("symbolic form needs polynomial waveforms")
        out = E.ZERO
        for i, fi in enumerate(self.f):
            out = out + fi * self.R.as_expr("u", i)
        for i, gi in enumerate(self.g):
            out = out + gi * self.S.as_expr("v", i)
        return out

    def characteristic_data(self, u0, v0):
        """Data on v = v0 and u = u0 induced by this wave."""
        from .solver import CharacteristicData

        return CharacteristicData(lambda u: self(u, v0 + 0 * u), lambda v: self(u0 + 0 * v, v))


def _apply_chain(coeffs, weight, var_name):
    """Coefficients of weight * d/dvar (sum_i c_i W^(i)) in the basis W^(i)."""
    d = [E.diff(c, var_name) for c in coeffs] + [E.ZERO]
    shifted = [E.ZERO] + list(coeffs)
    return [weight * (a + b) for a, b in zip(d, shifted)]


def _nested_coefficients(chain, k_end, var_name):
    """Operator (1/c1) d(c1/c2 d(... c_{k-1}/c_k d(c_k X))) as derivative coefficients of X.

    ``chain`` is indexed so that chain[m] is c_m (j_m or l_{-m}); k_end = 0
    gives the identity.
    """
    if k_end == 0:
        return [E.ONE]
    coeffs = [chain[k_end]]
    for m in range(k_end - 1, 0, -1):
        coeffs = _apply_chain(coeffs, chain[m] / chain[m + 1], var_name)
    return _apply_chain(coeffs, 1 / chain[1], var_name)


def exact_solution(seq: SubstitutionSequence, R=None, S=None) -> ProgressingWave:
    """General solution phi = exp(-sigma) (phi_A + l0 phi_R) of a double-terminating equation."""
    if seq.status is not Status.DOUBLE_TERMINATING:
        raise NotTerminating(f"sequence status is {seq.status.value}")
    k1, k2 = seq.k1, seq.k2
    g_op = _nested_coefficients(seq.j_chain, k1, "v")
    f_op = _nested_coefficients(seq.l_chain, -k2, "u")
    factor = E.exp(E.neg(seq.sigma))
    l0 = seq.l_chain[0]
    f = [factor * l0 * c for c in f_op]
    g = [factor * c for c in g_op]
    n = seq.N
    f += [E.ZERO] * (n + 1 - len(f))
    g += [E.ZERO] * (n + 1 - len(g))
    wave = ProgressingWave(n, tuple(f), tuple(g), meta={"k1": k1, "k2": k2})
    return wave.with_waveforms(R, S)


def build_pw0(eq: WaveEquation, r=None, s=None) -> ProgressingWave:
    """phi = exp(-Lambda) (r(u) + s(v)) for a CPP equation (alpha = beta = 1)."""
    verdict = classify_cpp(eq)
    if not verdict.is_cpp:
        raise NotCpp("PW0 form requires the characteristic propagation property")
    amp = E.exp(E.neg(verdict.lam))
    wave = ProgressingWave(0, (amp,), (amp,), meta={"lambda": E.to_string(verdict.lam)})
    return wave.with_waveforms(r, s)


def amplitude_residuals(pw: ProgressingWave, eq: WaveEquation) -> dict:
    """Symbolic residuals of the amplitude equations.

    Order 0 (equation coefficients U, V, W):
        f0_uv + U f0_u + V f0_v + W f0,   g0 likewise,
        f0_v + U f0,   g0_u + V g0.
    Order N > 0, in the v-normal form with amplitudes F_i = exp(sigma) f_i:
        (j0 F0_u)_v - j1 F0,   (j0 Fi_u)_v - j1 Fi + (j0 F_{i-1})_v,   (j0 F_N)_v,
        (j0 G0_u)_v - j1 G0,   (j0 Gi_u)_v - j1 Gi + j0 G_{i-1,u},     G_N,u.
    """
    d = E.diff
    if pw.order == 0:
        f0, g0 = pw.f[0], pw.g[0]
        return {
            "f0_wave": eq.residual(f0),
            "g0_wave": eq.residual(g0),
            "f0_transport": d(f0, "v") + eq.U * f0,
            "g0_transport": d(g0, "u") + eq.V * g0,
        }
    ft = factor_transforms(eq)
    nf = normal_form(eq, ft)
    j0, j1 = nf.j0, nf.j1
    lift = E.exp(ft.sigma)
    F = [lift * fi for fi in pw.f]
    G = [lift * gi for gi in pw.g]
    n = pw.order
    out = {"f0": d(j0 * d(F[0], "u"), "v") - j1 * F[0],
           "g0": d(j0 * d(G[0], "u"), "v") - j1 * G[0]}
    for i in range(1, n + 1):
        out[f"f{i}"] = d(j0 * d(F[i], "u"), "v") - j1 * F[i] + d(j0 * F[i - 1], "v")
        out[f"g{i}"] = d(j0 * d(G[i], "u"), "v") - j1 * G[i] + j0 * d(G[i - 1], "u")
    out["f_top"] = d(j0 * F[n], "v")
    out["g_top"] = d(G[n], "u")
    return out


def verify_amplitude_equations(pw: ProgressingWave, eq: WaveEquation, count=100, seed=0) -> dict:
    """Max |residual| of each amplitude equation over random regular points."""
    u, v = eq.sample_points(count, seed)
    return {name: float(np.max(np.abs(E.evaluate(res, u, v) * np.ones_like(u))))
            for name, res in amplitude_residuals(pw, eq).items()}


def wave_residual(pw: ProgressingWave, eq: WaveEquation, count=100, seed=0) -> float:
    """Max equation residual of a polynomial-waveform wave at random regular points.

    Each residual is divided by max(1, |phi_uv| + |U phi_u| + |V phi_v| + |W phi|),
    so it is absolute for O(1) terms and relative where the terms are large
    (near singular lines they can exceed 1e8 and round-off dominates).
    """
    u, v = eq.sample_points(count, seed)
    phi = pw.as_expr()
    terms = [E.mixed(phi), eq.U * E.diff(phi, "u"), eq.V * E.diff(phi, "v"), eq.W * phi]
    vals = [E.evaluate(t, u, v) * np.ones_like(u) for t in terms]
    scale = np.maximum(1.0, sum(np.abs(x) for x in vals))
    return float(np.max(np.abs(sum(vals)) / scale))
