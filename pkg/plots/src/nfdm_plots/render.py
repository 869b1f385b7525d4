"""Render figures from nfdm experiment CSV outputs.

Plots never recompute physics: they display the documented CSV schemas only.
Rendering is deterministic (fixed style, size and DPI) so re-running on the
same inputs reproduces the same image.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

SUPPORTED_SCHEMA = "nfdm.v1"
FIGURE_KINDS = ("rate_curve", "constellation_scatter", "spectrum_overlay",
                "pdf_histogram")
_STYLE = {"dpi": 120, "figsize": (6.0, 4.0)}


class MissingColumn(ValueError):
    """A required CSV column is absent; the message names it."""


class EmptyData(ValueError):
    """The CSV carries no data rows."""


class SchemaMismatch(ValueError):
    """The CSV schema version differs from the supported one."""


@dataclass(frozen=True)
class FigureSpec:
    """What to draw: input CSVs, figure kind, output path."""

    inputs: tuple
    kind: str
    output: str
    column: str | None = None     # histogram value column override

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"kind must be one of {FIGURE_KINDS}, got {self.kind!r}")
        if not self.inputs:
            raise ValueError("need at least one input CSV")


def read_table(path):
    """Parse an nfdm CSV: schema comment line, header row, float-ish columns."""
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith("# schema="):
            raise SchemaMismatch(f"{path}: missing schema comment line")
        schema = first.split()[1].split("=", 1)[1]
        if schema != SUPPORTED_SCHEMA:
            raise SchemaMismatch(
                f"{path}: schema {schema!r} != supported {SUPPORTED_SCHEMA!r}")
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyData(f"{path}: no header row") from None
        rows = [row for row in reader if row]
    if not rows:
        raise EmptyData(f"{path}: no data rows")
    cols = {}
    for i, name in enumerate(header):
        vals = []
        for row in rows:
            try:
                vals.append(float(row[i]))
            except ValueError:
                vals.append(np.nan)
        cols[name] = np.array(vals)
    return cols


def _require(cols, candidates, path):
    for name in candidates:
        if name in cols:
            return name
    raise MissingColumn(
        f"{path}: none of the columns {candidates} present "
        f"(header has {sorted(cols)})")


def _new_axes():
    fig, ax = plt.subplots(figsize=_STYLE["figsize"], dpi=_STYLE["dpi"])
    ax.grid(True, alpha=0.3)
    return fig, ax


def render(spec: FigureSpec) -> str:
    """Draw the figure and write it to spec.output; returns the path.

    Raises MissingColumn / EmptyData / SchemaMismatch before anything is
    written, so a failed render leaves no file behind.
    """
    tables = [(path, read_table(path)) for path in spec.inputs]

    if spec.kind == "rate_curve":
        fig, ax = _new_axes()
        for path, cols in tables:
            x = _require(cols, ("launch_power", "snr_db", "launch_amplitude"), path)
            y = _require(cols, ("rate_bits", "mi_bits", "capacity_bits",
                                "rho_bits_s_hz"), path)
            order = np.argsort(cols[x])
            ax.plot(cols[x][order], cols[y][order], "o-", label=str(path))
            ax.set_xlabel(x)
            ax.set_ylabel(y)
        if x == "launch_power":
            ax.set_xscale("log")
        if len(tables) > 1:
            ax.legend(fontsize=7)
        ax.set_title("achievable rate")
    elif spec.kind == "constellation_scatter":
        fig, ax = _new_axes()
        for path, cols in tables:
            xr = _require(cols, ("act_re", "re_lambda"), path)
            xi = _require(cols, ("act_im", "im_lambda"), path)
            ax.plot(cols[xr], cols[xi], ".", markersize=2, alpha=0.4)
        ax.set_xlabel("Re shift")
        ax.set_ylabel("Im shift")
        ax.set_title("received-eigenvalue scatter")
        ax.set_aspect("equal", adjustable="datalim")
    elif spec.kind == "spectrum_overlay":
        fig, ax = _new_axes()
        for path, cols in tables:
            lam = _require(cols, ("lambda",), path)
            for part in ("tx", "rx"):
                re = _require(cols, (f"re_{part}",), path)
                im = _require(cols, (f"im_{part}",), path)
                mag = np.hypot(cols[re], cols[im])
                ax.plot(cols[lam], mag, label=part)
        ax.set_xlabel("lambda")
        ax.set_ylabel("|q_hat|")
        ax.legend()
        ax.set_title("continuous spectrum overlay")
    else:   # pdf_histogram
        fig, ax = _new_axes()
        for path, cols in tables:
            name = spec.column or _require(cols, ("act_im", "act_re"), path)
            if name not in cols:
                raise MissingColumn(f"{path}: column {name!r} not present")
            vals = cols[name]
            ax.hist(vals, bins=60, density=True, alpha=0.6)
            mu, sd = float(np.mean(vals)), float(np.std(vals))
            if sd > 0:
                xx = np.linspace(vals.min(), vals.max(), 400)
                ax.plot(xx, np.exp(-((xx - mu) ** 2) / (2 * sd**2))
                        / np.sqrt(2 * np.pi * sd**2), "k-", linewidth=1)
            ax.set_xlabel(name)
        ax.set_ylabel("density")
        ax.set_title("empirical density")

    fig.tight_layout()
    fig.savefig(spec.output, dpi=_STYLE["dpi"], metadata={"Software": "nfdm-plots"})
    plt.close(fig)
    return spec.output


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="nfdm-plot", description=__doc__)
    parser.add_argument("--input", required=True, nargs="+",
                        help="experiment CSV file(s)")
    parser.add_argument("--output", required=True, help="image path to write")
    parser.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    parser.add_argument("--column", default=None,
                        help="value column for pdf_histogram")
    args = parser.parse_args(argv)
    try:
        render(FigureSpec(tuple(args.input), args.kind, args.output,
                          column=args.column))
    except (MissingColumn, EmptyData, SchemaMismatch, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
