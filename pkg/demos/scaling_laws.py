"""How selection cost grows with the number of options.

The clock engine asks for more clicks as the target set grows, but only
logarithmically; a scanner's cost grows like sqrt(n) on a square grid.

Usage: python3 demos/scaling_laws.py
"""

import math

from singleswitch.lab import run_scaling_study


def main():
    nomon = run_scaling_study("nomon", [4, 16, 64, 256], seed=0)
    print("nomon picture task (uniform priors)")
    for r in nomon.rows:
        print(f"  n={r.n:4d}  {r.mean:6.3f} clicks/selection")
    a, b, rss = nomon.log_fit
    print(f"  log fit    {a:6.3f} + {b:.3f} ln n   rss {rss:.4f}")
    a, b, rss = nomon.linear_fit
    print(f"  linear fit {a:6.3f} + {b:.4f} n      rss {rss:.4f}")

    rcs = run_scaling_study("rcs", [16, 36, 64, 100])
    print("\nrow-column scanning, ideal user, square grids")
    for r in rcs.rows:
        dev = (r.mean - math.sqrt(r.n)) / math.sqrt(r.n)
        print(f"  n={r.n:4d}  {r.mean:6.3f} scans/selection  "
              f"(sqrt n = {math.sqrt(r.n):.1f}, {dev:+.1%})")


if __name__ == "__main__":
    main()
