"""One-variable waveforms R(u), S(v) with derivative access."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial as _Poly
from scipy.interpolate import make_interp_spline

from . import expr as E


@dataclass(frozen=True)
class PolynomialWave:
    """sum_k coeffs[k] * x**k; differentiates exactly and has an Expr form."""

    coeffs: tuple

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in coeffs))

    kind = "polynomial"
    support = None

    def derivative(self, n=1):
        return _Poly(self.coeffs).deriv(n) if n else _Poly(self.coeffs)

    def __call__(self, x, n=0):
        return self.derivative(n)(np.asarray(x, dtype=float))

    def as_expr(self, var_name, n=0) -> E.Expr:
        poly = self.derivative(n)
        x = E.var(var_name)
        out = E.ZERO
        for k, c in enumerate(poly.coef):
            if c:
                out = out + E.const(c) * E.power(x, k)
        return out


@dataclass(frozen=True)
class Bump:
    """amplitude * cos^2(pi (x - center) / width) on |x - center| <= width/2, else 0.

    C^1 with compact support; the second derivative jumps at the edges.
    """

    center: float
    width: float
    amplitude: float = 1.0

    kind = "bump"

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("bump width must be positive")

    @classmethod
    def unit_mass(cls, center, width):
        """Bump normalised to unit integral (the integral of cos^2 over the support is width/2)."""
        return cls(center, width, 2.0 / width)

    @property
    def support(self):
        return (self.center - self.width / 2, self.center + self.width / 2)

    @property
    def mass(self):
        return self.amplitude * self.width / 2

    def __call__(self, x, n=0):
        x = np.asarray(x, dtype=float)
        theta = math.pi * (x - self.center) / self.width
        inside = np.abs(x - self.center) <= self.width / 2
        if n == 0:
            val = self.amplitude * np.cos(theta) ** 2
        else:
            # cos^2 = (1 + cos 2theta)/2
            k = 2 * math.pi / self.width
            val = 0.5 * self.amplitude * k ** n * np.cos(2 * theta + n * math.pi / 2)
        return np.where(inside, val, 0.0)

    def derivative(self, n=1):
        return lambda x: self(x, n)


@dataclass(frozen=True, eq=False)
class TableWave:
    """Sampled waveform interpolated by a quintic spline (derivatives up to order 4)."""

    x: np.ndarray
    y: np.ndarray

    kind = "table"
    support = None

    def __post_init__(self):
        object.__setattr__(self, "_spline", make_interp_spline(self.x, self.y, k=5))

    def __call__(self, x, n=0):
        if n > 4:
            raise ValueError("quintic spline derivatives are only reliable up to order 4")
        return self._spline(np.asarray(x, dtype=float), nu=n)

    def derivative(self, n=1):
        return lambda x: self(x, n)


def as_waveform(spec):
    """Accept a waveform, a coefficient list (polynomial) or a zero placeholder."""
    if spec is None or (isinstance(spec, (int, float)) and spec == 0):
        return PolynomialWave([0.0])
    if isinstance(spec, (list, tuple)):
        return PolynomialWave(spec)
    return spec
