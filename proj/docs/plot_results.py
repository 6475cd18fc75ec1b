#!/usr/bin/env python3
"""Plot mean delay against the swept parameter from a results.csv.

Usage: plot_results.py results.csv [out.png]

Rows are grouped by the `param` column (e.g. "lambda=0.2"), seeds averaged.
"""

import csv
import sys
from collections import defaultdict


def main() -> int:
    if len(sys.argv) < 2:
        print(__doc__.strip())
        return 2
    path = sys.argv[1]
    out = sys.argv[2] if len(sys.argv) > 2 else None

    groups: dict[str, list[float]] = defaultdict(list)
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            groups[row["param"]].append(float(row["mean_delay_slots"]))

    points = []
    for param, delays in groups.items():
        value = float(param.split("=", 1)[1]) if "=" in param else 0.0
        points.append((value, sum(delays) / len(delays)))
    points.sort()

    for value, delay in points:
        print(f"{value:g}\t{delay:.3f}")

    if out:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        plt.plot(xs, ys, marker="o")
        plt.xlabel("swept parameter")
        plt.ylabel("mean delay (slots)")
        plt.grid(True, alpha=0.3)
        plt.savefig(out, dpi=150, bbox_inches="tight")
        print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
