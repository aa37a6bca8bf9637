"""Narrow unit-mass bumps for the l = 1 multipole equation.

As the bump on v = 0 narrows around u0, the field behind it approaches the
retarded point-source solution (2/u0^2) uv/(v-u) for u > u0. The relative
error roughly quarters with each halving of the width.
"""

import numpy as np

from tailwave import Bump, CharacteristicData, Grid, Rect, multipole_l1_delta_solution, solve_goursat
from tailwave.registry import get


def main(u0=0.5):
    eq = get("multipole_1").eq
    ref = multipole_l1_delta_solution(u0, c=0.0)
    grid = Grid.with_spacing(Rect(0.3125, 1.0, 0.0, 0.25), 1 / 1280)
    uu, vv = grid.mesh()
    for width in (0.1, 0.05, 0.025, 0.0125):
        data = CharacteristicData.from_waveforms(Bump.unit_mass(u0, width), None)
        field = solve_goursat(eq, data, grid)
        behind = uu > u0 + width
        s = ref.smooth(uu[behind], vv[behind])
        err = np.max(np.abs(field.values[behind] - s)) / np.max(np.abs(s))
        ahead = np.max(np.abs(field.values[uu < u0 - width]))
        print(f"width {width:<7} relative error behind {err:.2e}   max |phi| ahead {ahead:.1e}")
    for c in (0.0, -1.0, 0.5):
        r = multipole_l1_delta_solution(u0, c)
        print(f"c = {c:+.1f}: smooth part at u = 0.4 -> {r.smooth(0.4, 1.0):+.3f}, "
              f"at u = 0.6 -> {r.smooth(0.6, 1.0):+.3f}")


if __name__ == "__main__":
    main()
