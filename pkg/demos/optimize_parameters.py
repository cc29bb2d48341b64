"""Parameter-optimization sweeps for both engines.

Reproduces the two headline simulation results:
  - nomon: entry rate over (W_c, W_max); W_c=3 dominates and the default
    (3, 17) sits within a few percent of the grid maximum
  - scanning: completion placement x letter ordering x W_max; word
    predictions on top with frequency ordering win everywhere, peaking
    near W_max=7

Writes CSVs (and PNG curves if matplotlib is importable) under results/.

Usage: python3 demos/optimize_parameters.py [--quick]
"""

import sys
import time

from singleswitch.core import CompletionPlacement, Ordering
from singleswitch.lab import (SweepCell, SweepSpec, bundled_phrases_path,
                              emit, load_phrases, run_sweep)

QUICK = "--quick" in sys.argv
SEED = 0
REPS = 25 if QUICK else 150
WORKERS = 8


def phrases():
    return load_phrases(bundled_phrases_path(), seed=SEED, count=REPS)


def nomon_sweep():
    wmaxes = [1, 2, 3, 5, 8, 11, 14, 17, 20, 26, 38, 52, 65, 78]
    cells = [SweepCell(engine="nomon", w_c=wc, w_max=wm)
             for wc in (1, 2, 3) for wm in wmaxes if wm <= 26 * wc]
    spec = SweepSpec(engine="nomon", cells=cells, phrases=phrases(),
                     repetitions=REPS, seed=SEED)
    res = run_sweep(spec, workers=WORKERS)
    emit(res, "results/nomon_sweep")
    by = {(c.cell.w_c, c.cell.w_max): c.mean_wpm for c in res.cells}
    print("\nnomon mean wpm")
    print("W_max   Wc=1    Wc=2    Wc=3")
    for wm in wmaxes:
        row = [by.get((wc, wm)) for wc in (1, 2, 3)]
        print(f"{wm:5d} " + " ".join("   --  " if v is None else f"{v:7.3f}"
                                     for v in row))
    best = max(by, key=by.get)
    print(f"grid max at Wc={best[0]}, W_max={best[1]} ({by[best]:.3f} wpm); "
          f"default (3,17) = {by[(3, 17)]:.3f}")
    return by, wmaxes


def rcs_sweep():
    cells = [SweepCell(engine="rcs", ordering=o, placement=p, w_max=wm)
             for o in (Ordering.FREQUENCY, Ordering.ALPHABETICAL)
             for p in (CompletionPlacement.TOP, CompletionPlacement.BOTTOM)
             for wm in range(1, 19)]
    spec = SweepSpec(engine="rcs", cells=cells, phrases=phrases(),
                     repetitions=REPS, seed=SEED)
    res = run_sweep(spec, workers=WORKERS)
    emit(res, "results/rcs_sweep")
    by = {(c.cell.ordering.value, c.cell.placement.value, c.cell.w_max):
          c.mean_wpm for c in res.cells}
    print("\nscanning mean wpm")
    print("W_max  freq/top  freq/bottom  alpha/top  alpha/bottom")
    combos = [("frequency", "top"), ("frequency", "bottom"),
              ("alphabetical", "top"), ("alphabetical", "bottom")]
    for wm in range(1, 19):
        print(f"{wm:5d} " + "  ".join(f"{by[(o, p, wm)]:9.3f}"
                                      for o, p in combos))
    ft = [by[("frequency", "top", wm)] for wm in range(1, 19)]
    print(f"frequency/top peak at W_max={ft.index(max(ft)) + 1}")
    return by


def plot(nomon_by, wmaxes, rcs_by):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        return
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(11, 4))
    for wc in (1, 2, 3):
        pts = [(wm, nomon_by[(wc, wm)]) for wm in wmaxes
               if (wc, wm) in nomon_by]
        ax1.plot(*zip(*pts), marker="o", label=f"$W_c$={wc}")
    ax1.set(xlabel="$W_{max}$", ylabel="mean wpm", title="nomon")
    ax1.legend()
    for o, p in [("frequency", "top"), ("frequency", "bottom"),
                 ("alphabetical", "top"), ("alphabetical", "bottom")]:
        ys = [rcs_by[(o, p, wm)] for wm in range(1, 19)]
        ax2.plot(range(1, 19), ys, marker="o", label=f"{o[:5]}/{p}")
    ax2.set(xlabel="$W_{max}$", ylabel="mean wpm", title="row-column scanning")
    ax2.legend()
    fig.tight_layout()
    fig.savefig("results/sweeps.png", dpi=120)
    print("wrote results/sweeps.png")


def main():
    t0 = time.time()
    nomon_by, wmaxes = nomon_sweep()
    rcs_by = rcs_sweep()
    plot(nomon_by, wmaxes, rcs_by)
    print(f"\ntotal {time.time() - t0:.0f}s")


if __name__ == "__main__":
    main()
