#!/usr/bin/env python3
"""Render a high-frequency window: reference vs Monte Carlo magnitudes + error.

Input: one schema-1 CSV from a Monte Carlo sweep that carries reference
columns (xi, re, im, abs, ..., ref_abs, abs_error).  Overlays |reference|
and |estimate| over the window and traces the per-frequency error.
"""

import argparse
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from plotcsv import SchemaError, read_table, require


def render(csv_path, out_path, title=None, log_y=False):
    table = read_table(csv_path)
    require(table, ["xi", "abs", "ref_abs", "abs_error"], csv_path)
    xi = table["xi"]

    fig, ax = plt.subplots(figsize=(7.5, 4.2))
    ax.plot(xi, table["ref_abs"], "k-", lw=1.2, label="reference")
    ax.plot(xi, table["abs"], "C1-.", lw=1.2, label="Monte Carlo")
    ax.plot(xi, table["abs_error"], "r--", lw=1.0, label="error")
    if log_y:
        ax.set_yscale("log")
    ax.set_xlabel("frequency xi")
    ax.set_ylabel("magnitude")
    ax.set_title(title or "high-frequency window")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_path)
    plt.close(fig)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("csv", help="MC sweep CSV with ref_abs/abs_error columns")
    parser.add_argument("--out", required=True, help="output image path (.png or .svg)")
    parser.add_argument("--title", default=None)
    parser.add_argument("--log-y", action="store_true", help="logarithmic magnitude axis")
    args = parser.parse_args(argv)
    try:
        render(args.csv, args.out, args.title, log_y=args.log_y)
    except (SchemaError, OSError) as bad:
        print(f"error: {bad}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
