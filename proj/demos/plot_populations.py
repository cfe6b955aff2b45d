#!/usr/bin/env python3
"""Heat map of per-site populations (summed over internal levels) from a
run directory's populations.csv.

Usage: plot_populations.py <run-dir> [out.png]
"""
import csv
import sys
from pathlib import Path

import matplotlib
import numpy as np

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def main():
    run_dir = Path(sys.argv[1])
    out = sys.argv[2] if len(sys.argv) > 2 else run_dir / "populations.png"
    times, rows = [], []
    with open(run_dir / "populations.csv") as f:
        reader = csv.reader(f)
        header = next(reader)
        site_cols = [i for i, name in enumerate(header) if name.startswith("pop")]
        n_sites = len(site_cols) // 3
        for row in reader:
            times.append(float(row[0]))
            vals = np.array([float(row[i]) for i in site_cols]).reshape(n_sites, 3)
            rows.append(vals.sum(axis=1))
    grid = np.array(rows).T  # sites x times

    fig, ax = plt.subplots(figsize=(7, 4))
    mesh = ax.pcolormesh(times, np.arange(grid.shape[0]), grid, shading="nearest",
                         cmap="magma")
    fig.colorbar(mesh, ax=ax, label=r"$\sum_m |c_\alpha^m|^2$")
    ax.set_xlabel(r"$\gamma t$")
    ax.set_ylabel(r"site $\alpha$")
    fig.tight_layout()
    fig.savefig(out, dpi=160)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
