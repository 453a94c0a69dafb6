#!/usr/bin/env python3
"""Compare Fourier-transform estimates from several methods over one grid.

Inputs: one schema-1 CSV per method (columns xi, re, im, abs, ...), all on
the same frequency grid.  The left panel overlays the magnitudes; with two
or more inputs the right panel shows each method's deviation from the
first input (the reference, conventionally the oracle) on a log scale.
"""

import argparse
import math
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from plotcsv import SchemaError, read_table, require

STYLES = ["k-", "g-", "C1-.", "b:", "r--", "m-"]


def render(csv_paths, labels, out_path, title=None):
    tables = []
    for path in csv_paths:
        table = read_table(path)
        require(table, ["xi", "re", "im", "abs"], path)
        tables.append(table)
    xi = tables[0]["xi"]
    for path, table in zip(csv_paths[1:], tables[1:]):
        if table["xi"] != xi:
            raise SchemaError(f"{path}: xi grid differs from {csv_paths[0]}")

    n_panels = 2 if len(tables) > 1 else 1
    fig, axes = plt.subplots(1, n_panels, figsize=(6.0 * n_panels, 4.0), squeeze=False)
    left = axes[0][0]
    for i, (table, label) in enumerate(zip(tables, labels)):
        left.plot(xi, table["abs"], STYLES[i % len(STYLES)], label=label, lw=1.2)
    left.set_xlabel("frequency xi")
    left.set_ylabel("|mu_hat(xi)|")
    left.legend()
    left.set_title(title or "Fourier transform estimates")

    if n_panels == 2:
        right = axes[0][1]
        ref = tables[0]
        for i, (table, label) in enumerate(zip(tables[1:], labels[1:]), start=1):
            errs = [
                math.hypot(a - b, c - d)
                for a, b, c, d in zip(table["re"], ref["re"], table["im"], ref["im"])
            ]
            shown = [(x, e) for x, e in zip(xi, errs) if e > 0.0]
            if shown:
                right.semilogy([x for x, _ in shown], [e for _, e in shown],
                               STYLES[i % len(STYLES)], label=label, lw=1.2)
        right.set_xlabel("frequency xi")
        right.set_ylabel(f"|error vs {labels[0]}|")
        right.legend()
        right.set_title("absolute error")
    for row in axes:
        for ax in row:
            ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csvs", nargs="+", help="one CSV per method; first is the reference")
    parser.add_argument("--out", required=True, help="output image path (.png or .svg)")
    parser.add_argument("--labels", nargs="+", default=None, help="one label per CSV")
    parser.add_argument("--title", default=None)
    args = parser.parse_args(argv)
    labels = args.labels or [f"method {i}" for i in range(len(args.csvs))]
    if len(labels) != len(args.csvs):
        print("error: need as many labels as CSVs", file=sys.stderr)
        return 2
    try:
        render(args.csvs, labels, args.out, args.title)
    except (SchemaError, OSError) as bad:
        print(f"error: {bad}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
