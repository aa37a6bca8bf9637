"""Which registry equations leave a tail behind a compact bump?

For each entry a cos^2 bump is placed on the lower characteristic edge and
the field is measured in the corner region that no characteristic from the
bump reaches. CPP equations come out TailFree at round-off; the others keep
a field there that does not shrink under grid halving.
"""

from tailwave import Bump, CharacteristicData, Grid
from tailwave.registry import registry
from tailwave.tails import halving_stability, measure_goursat_tail


def main():
    print(f"{'equation':<16} {'verdict':<10} {'sup_tail':>11} {'tol':>10} {'halving change':>15}")
    for entry in registry():
        rect = entry.work_rect
        grid = Grid.square(rect, 128)
        length = rect.u_hi - rect.u_lo
        bump = Bump(rect.u_lo + length / 4, length / 4)
        data = CharacteristicData.from_waveforms(bump, None)
        coarse, _, change = halving_stability(measure_goursat_tail, entry.eq, data, grid)
        # for a TailFree verdict sup_tail is round-off, so its change means nothing
        shown = f"{change:.2%}" if not coarse.tail_free else "-"
        print(f"{entry.name:<16} {coarse.verdict.value:<10} {coarse.sup_tail:11.3e} "
              f"{coarse.tol:10.2e} {shown:>15}")


if __name__ == "__main__":
    main()
