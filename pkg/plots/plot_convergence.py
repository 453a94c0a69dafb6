#!/usr/bin/env python3
"""Render a grid-size convergence study: |delta_vs_final| against N, log scale.

Input: one schema-1 CSV with columns N, value, delta_vs_final (as produced
by ``chebgibbs integrate --sweep-N``).  Zero deltas (the reference row) are
left out of the logarithmic panel.
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from plotcsv import SchemaError, read_table, require


def render(csv_path, out_path, title=None):
    table = read_table(csv_path)
    require(table, ["N", "value", "delta_vs_final"], csv_path)
    ns = table["N"]
    deltas = table["delta_vs_final"]
    shown = [(n, d) for n, d in zip(ns, deltas) if d > 0.0]

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if shown:
        ax.semilogy([n for n, _ in shown], [d for _, d in shown], "o-", color="tab:green")
    ax.set_xlabel("grid size N")
    ax.set_ylabel("|estimate(N) - reference|")
    ax.set_title(title or "convergence of the weak estimate")
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="sweep CSV (columns N, value, delta_vs_final)")
    parser.add_argument("--out", required=True, help="output image path (.png or .svg)")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)
    try:
        render(args.csv, args.out, args.title)
    except (SchemaError, OSError) as bad:
        print(f"error: {bad}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
