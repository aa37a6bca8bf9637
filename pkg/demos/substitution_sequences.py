"""Substitution sequences for the multipole family and Klein-Gordon.

The multipole equation of order l terminates after l steps on both chains and
so has an exact progressing-wave solution; the constant-mass equation never
terminates. For l = 1 the exact amplitudes are printed and the resulting wave
is checked against the equation.
"""

import numpy as np

from tailwave import build_sequence, evaluate, exact_solution, verify_amplitude_equations
from tailwave.kundt_newman import wave_residual
from tailwave.registry import get


def main():
    for name in [f"multipole_{l}" for l in range(5)] + ["klein_gordon_1"]:
        seq = build_sequence(get(name).eq, k_max=8)
        print(f"{name:<16} {seq.to_json()['status']:<20} k1={seq.k1} k2={seq.k2} N={seq.N}")

    eq = get("multipole_1").eq
    wave = exact_solution(build_sequence(eq), R=[0, 0, 0, 1], S=[0, 0, 1])
    u, v = np.array([0.1, 0.2]), np.array([0.7, 0.9])
    print(f"\nmultipole_1 amplitudes at (u, v) = (0.1, 0.7) and (0.2, 0.9), with 2/(v-u) for reference:")
    print(f"  2/(v-u) = {2 / (v - u)}")
    for label, amps in (("f", wave.f), ("g", wave.g)):
        for i, a in enumerate(amps):
            print(f"  {label}{i} = {evaluate(a, u, v) * np.ones_like(u)}")
    print(f"wave residual with R = u^3, S = v^2: {wave_residual(wave, eq):.1e}")
    worst = max(verify_amplitude_equations(wave, eq).values())
    print(f"largest amplitude-equation residual: {worst:.1e}")
    r = v - u
    by_hand = 2 * u**3 / r + 3 * u**2 - 2 * v**2 / r + 2 * v
    print(f"phi = {wave(u, v)}; 2R/r + R' - 2S/r + S' = {by_hand}")


if __name__ == "__main__":
    main()
