#!/usr/bin/env python3
"""Plot a ring mode spectrum produced by `subrad spectrum`.

Usage: plot_spectrum.py <run-dir-with-spectrum.csv> [out.png]
"""
import csv
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    run_dir = Path(sys.argv[1])
    out = sys.argv[2] if len(sys.argv) > 2 else run_dir / "spectrum.png"
    p, v, g, sub = [], [], [], []
    with open(run_dir / "spectrum.csv") as f:
        for row in csv.DictReader(f):
            p.append(float(row["p_a_over_pi"]))
            v.append(float(row["v_k"]))
            g.append(float(row["gamma_k"]))
            sub.append(int(row["subradiant"]))

    fig, (ax1, ax2) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
    colors = ["tab:red" if s == 0 else "tab:blue" for s in sub]
    ax1.scatter(p, g, c=colors, s=14)
    ax1.axhline(1.0, color="grey", lw=0.8, ls="--")
    ax1.set_yscale("log")
    ax1.set_ylabel(r"$\Gamma_k/\gamma$")
    ax2.scatter(p, v, c=colors, s=14)
    ax2.set_xlabel(r"$p(k)\,a/\pi$")
    ax2.set_ylabel(r"$V_k/\gamma$")
    fig.tight_layout()
    fig.savefig(out, dpi=160)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
