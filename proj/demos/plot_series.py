#!/usr/bin/env python3
"""Plot survival probability, activity, and packet moments from a run
directory's series.csv.

Usage: plot_series.py <run-dir> [out.png]
"""
import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    run_dir = Path(sys.argv[1])
    out = sys.argv[2] if len(sys.argv) > 2 else run_dir / "series.png"
    t, p, k, com = [], [], [], []
    with open(run_dir / "series.csv") as f:
        for row in csv.DictReader(f):
            t.append(float(row["t"]))
            p.append(float(row["p_sur"]))
            k.append(float(row["activity"]))
            com.append(float(row["com"]))

    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
    ax1.plot(t, p, "k-", label=r"$P_\mathrm{sur}$")
    ax1.plot(t, [max(x, 1e-12) for x in k], "r--", label=r"$\langle K\rangle/\gamma$")
    ax1.set_yscale("log")
    ax1.set_ylim(1e-7, 2)
    ax1.legend()
    ax2.plot(t, com, "b-")
    ax2.set_xlabel(r"$\gamma t$")
    ax2.set_ylabel("packet center (sites)")
    fig.tight_layout()
    fig.savefig(out, dpi=160)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
