"""The two-dimensional wave equation in null coordinates.

    d2phi/du dv + U dphi/du + V dphi/dv + W phi = 0

with factor transforms, normal forms and the characteristic propagation
property (CPP) test in coordinate form.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import expr as E
from .errors import AllPointsSingular, IndeterminateTermination, SingularPath
from .expr import EvalPoint, Expr, Rect

DEFAULT_MARGIN = 0.05


@dataclass(frozen=True)
class WaveEquation:
    U: Expr
    V: Expr
    W: Expr
    domain: Rect = Rect(0.0, 1.0, 0.0, 1.0)
    singular_lines: tuple = ()  # offsets c of lines u = v + c
    margin: float = DEFAULT_MARGIN
    name: str = ""

    def __post_init__(self):
        for attr in ("U", "V", "W"):
            value = getattr(self, attr)
            if not isinstance(value, Expr):
                object.__setattr__(self, attr, E.as_expr(value))
        object.__setattr__(self, "singular_lines", tuple(float(c) for c in self.singular_lines))

    @classmethod
    def from_strings(cls, U="0", V="0", W="0", **kwargs):
        return cls(E.parse(U), E.parse(V), E.parse(W), **kwargs)

    # -- geometry

    def check_rect(self, rect: Rect):
        """Raise SingularPath unless ``rect`` lies in the domain and clear of singular lines."""
        tol = 1e-12
        d = self.domain
        if not (d.u_lo - tol <= rect.u_lo and rect.u_hi <= d.u_hi + tol
                and d.v_lo - tol <= rect.v_lo and rect.v_hi <= d.v_hi + tol):
            raise SingularPath(f"rectangle {rect} leaves the equation domain {d}")
        lo, hi = rect.u_lo - rect.v_hi, rect.u_hi - rect.v_lo
        for c in self.singular_lines:
            if lo - self.margin < c < hi + self.margin:
                raise SingularPath(f"rectangle {rect} comes within {self.margin} of the line u = v + {c}")

    def sample_rect(self) -> Rect:
        """The domain shrunk by 5%, used for zero tests."""
        return self.domain.shrink(0.05)

    def is_zero(self, e: Expr, **kwargs) -> bool:
        kwargs.setdefault("singular_offsets", self.singular_lines)
        kwargs.setdefault("margin", self.margin)
        return E.is_zero(e, self.sample_rect(), **kwargs)

    def sample_points(self, count=100, seed=0):
        return E.sample_points(self.sample_rect(), count, self.singular_lines, self.margin, seed)

    def residual(self, phi: Expr) -> Expr:
        """Symbolic left-hand side of the equation applied to ``phi``."""
        return (E.mixed(phi) + self.U * E.diff(phi, "u") + self.V * E.diff(phi, "v")
                + self.W * phi)

    def adjoint_residual(self, delta: Expr) -> Expr:
        """d2/dudv delta - d/du(U delta) - d/dv(V delta) + W delta."""
        return (E.mixed(delta) - E.diff(self.U * delta, "u") - E.diff(self.V * delta, "v")
                + self.W * delta)

    # -- serialisation

    def to_json(self) -> dict:
        d = self.domain
        return {
            "U": E.to_string(self.U),
            "V": E.to_string(self.V),
            "W": E.to_string(self.W),
            "domain": {"u": [d.u_lo, d.u_hi], "v": [d.v_lo, d.v_hi]},
            "singular_lines": [{"offset": c} for c in self.singular_lines],
        }

    @classmethod
    def from_json(cls, doc: dict, name: str = "") -> "WaveEquation":
        missing = [k for k in ("U", "V", "W", "domain") if k not in doc]
        if missing:
            raise ValueError(f"equation document lacks {', '.join(missing)}")
        dom = doc["domain"]
        rect = Rect(float(dom["u"][0]), float(dom["u"][1]), float(dom["v"][0]), float(dom["v"][1]))
        lines = tuple(float(item["offset"]) for item in doc.get("singular_lines", []))
        return cls.from_strings(doc["U"], doc["V"], doc["W"], domain=rect,
                                singular_lines=lines, name=name)

    @classmethod
    def load(cls, path) -> "WaveEquation":
        path = Path(path)
        return cls.from_json(json.loads(path.read_text()), name=path.stem)

    def dump(self, path):
        Path(path).write_text(json.dumps(self.to_json(), indent=2) + "\n")


@dataclass(frozen=True)
class FactorTransform:
    sigma: Expr
    tau: Expr
    base: EvalPoint
    lam: Expr | None = None


@dataclass(frozen=True)
class NormalForm:
    j0: Expr
    j1: Expr
    l0: Expr
    l_minus1: Expr


@dataclass(frozen=True)
class CppVerdict:
    """Outcome of the CPP test.

    ``curl_free``: dU/du = dV/dv, so U, V derive from a potential Lambda.
    ``w_balanced``: dU/du + UV - W = 0.
    """

    curl_free: bool
    w_balanced: bool
    lam: Expr | None = None
    checks: dict = field(default_factory=dict)

    @property
    def is_cpp(self) -> bool:
        return self.curl_free and self.w_balanced


def _check_path(eq: WaveEquation, base: EvalPoint):
    """The integration paths from ``base`` sweep the domain's lower-left rectangle."""
    d = eq.domain
    eq.check_rect(Rect(min(base.u, d.u_lo), max(base.u, d.u_hi),
                       min(base.v, d.v_lo), max(base.v, d.v_hi)))


def factor_transforms(eq: WaveEquation, base: EvalPoint | None = None) -> FactorTransform:
    """sigma = int_{base.u}^{u} V du',  tau = int_{base.v}^{v} U dv'.

    Closed forms come from the antiderivative table; anything else becomes a
    quadrature node evaluated to 1e-10 absolute.
    """
    if base is None:
        base = EvalPoint(eq.domain.u_lo, eq.domain.v_lo)
    if eq.singular_lines and not (eq.V.is_const and eq.U.is_const):
        _check_path(eq, base)
    sigma = E.definite_integral(eq.V, "u", base.u)
    tau = E.definite_integral(eq.U, "v", base.v)
    lam = None
    if _curl_free(eq):
        lam = E.substitute(sigma, {"v": E.const(base.v)}) + tau
    return FactorTransform(sigma=sigma, tau=tau, base=base, lam=lam)


def _curl_free(eq, **kwargs):
    try:
        return eq.is_zero(E.diff(eq.U, "u") - E.diff(eq.V, "v"), **kwargs)
    except AllPointsSingular as exc:
        raise IndeterminateTermination(str(exc)) from exc


def normal_form(eq: WaveEquation, ft: FactorTransform | None = None) -> NormalForm:
    if ft is None:
        ft = factor_transforms(eq)
    j0 = E.exp(ft.tau - ft.sigma)
    l0 = 1 / j0
    uv = eq.U * eq.V
    j1 = (E.diff(eq.V, "v") + uv - eq.W) * j0
    l_minus1 = (E.diff(eq.U, "u") + uv - eq.W) * l0
    return NormalForm(j0=j0, j1=j1, l0=l0, l_minus1=l_minus1)


def potential(eq: WaveEquation, base: EvalPoint | None = None) -> Expr:
    """Lambda with dLambda/dv = U and dLambda/du = V, assuming dU/du = dV/dv.

    Lambda(u, v) = sigma(u, v0) + tau(u, v), i.e. integrate V along v = v0 and
    then U along the line of constant u. tau alone differs from Lambda by a
    function of u unless V vanishes on the base line.
    """
    ft = factor_transforms(eq, base)
    if ft.lam is None:
        base = ft.base
        return E.substitute(ft.sigma, {"v": E.const(base.v)}) + ft.tau
    return ft.lam


def classify_cpp(eq: WaveEquation, trials: int = 64, tol: float = 1e-9) -> CppVerdict:
    """Test dU/du = dV/dv and dU/du + UV - W = 0 by sampling."""
    du_u = E.diff(eq.U, "u")
    curl_free = _curl_free(eq, trials=trials, tol=tol)
    try:
        w_balanced = eq.is_zero(du_u + eq.U * eq.V - eq.W, trials=trials, tol=tol)
    except AllPointsSingular as exc:
        raise IndeterminateTermination(str(exc)) from exc
    lam = None
    checks = {}
    if curl_free and w_balanced:
        lam = potential(eq)
        u, v = eq.sample_points(16)
        checks["max|dLambda/du - V|"] = float(np.max(np.abs(
            E.evaluate_masked(E.diff(lam, "u") - eq.V, u, v))))
        checks["max|dLambda/dv - U|"] = float(np.max(np.abs(
            E.evaluate_masked(E.diff(lam, "v") - eq.U, u, v))))
    return CppVerdict(curl_free, w_balanced, lam, checks)


def hp_verdict(eq: WaveEquation) -> bool:
    """Huygens' principle never holds in two dimensions: the Riemann function
    is nonzero on the whole interior of the past cone."""
    return False
