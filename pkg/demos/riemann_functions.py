"""Numerical Riemann functions against their closed forms.

Klein-Gordon is compared with J0(2 sqrt((u'-u)(v'-v))) and the Lambda = uv
equation with exp(uv - u'v'), at three resolutions to show the h^2 decay.
"""

import numpy as np
from scipy import special

from tailwave import EvalPoint, riemann_closed_form_cpp, riemann_numeric
from tailwave.registry import get
from tailwave.riemann import evaluate_closed_form

BASE = EvalPoint(1.0, 1.0)


def kg_exact(u, v):
    return special.j0(2 * np.sqrt((BASE.u - u) * (BASE.v - v)))


def main():
    lam = get("lambda_uv").eq
    delta = riemann_closed_form_cpp(lam)
    cases = [("klein_gordon_1", get("klein_gordon_1").eq, kg_exact),
             ("lambda_uv", lam, lambda u, v: evaluate_closed_form(delta, u, v, BASE))]
    for name, eq, exact in cases:
        prev = None
        for n in (32, 64, 128, 256):
            f = riemann_numeric(eq, BASE, n=n)
            err = float(np.max(np.abs(f.values - exact(*f.grid.mesh()))))
            ratio = "" if prev is None else f"  ratio {prev / err:.2f}"
            print(f"{name:<15} n={n:<4} max error {err:.3e}{ratio}")
            prev = err


if __name__ == "__main__":
    main()
