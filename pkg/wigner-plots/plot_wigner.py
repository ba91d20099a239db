"""Render a gkp-breeding Wigner CSV file as a heatmap image.

Pure reader of the fixed CSV contract (two `# x:`/`# p:` header comments, an
`x,p,W` column header, then n_x * n_p data rows with p as the outer loop).
No physics is recomputed; the input file is never modified.

Usage: plot-wigner <in.csv> <out.png> [--title T] [--dpi N]
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np


class CsvFormatError(Exception):
    """Malformed input; the message carries the offending line number."""


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    output_image: str
    title: str | None = None
    dpi: int = 150


@dataclass(frozen=True)
class WignerCsv:
    x_min: float
    x_max: float
    n_x: int
    p_min: float
    p_max: float
    n_p: int
    values: np.ndarray  # shape (n_p, n_x)


def _parse_axis_header(line: str, axis: str, lineno: int) -> tuple[float, float, int]:
    prefix = f"# {axis}:"
    if not line.startswith(prefix):
        raise CsvFormatError(f"line {lineno}: expected header {prefix!r}, got {line[:40]!r}")
    parts = line[len(prefix):].strip().split(",")
    if len(parts) != 3:
        raise CsvFormatError(f"line {lineno}: header needs 'min,max,n', got {line.strip()!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as err:
        raise CsvFormatError(f"line {lineno}: {err}") from err
    if count < 2 or hi <= lo:
        raise CsvFormatError(f"line {lineno}: degenerate {axis} grid {line.strip()!r}")
    return lo, hi, count


def read_wigner_csv(path: str) -> WignerCsv:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if len(lines) < 3:
        raise CsvFormatError("line 1: file too short for the Wigner CSV contract")
    x_min, x_max, n_x = _parse_axis_header(lines[0], "x", 1)
    p_min, p_max, n_p = _parse_axis_header(lines[1], "p", 2)
    if lines[2].strip() != "x,p,W":
        raise CsvFormatError(f"line 3: expected column header 'x,p,W', got {lines[2]!r}")
    data = [line for line in lines[3:] if line.strip()]
    expected = n_x * n_p
    if len(data) != expected:
        raise CsvFormatError(
            f"line {len(lines)}: {len(data)} data rows but headers declare "
            f"{n_x} x {n_p} = {expected}"
        )
    values = np.empty((n_p, n_x))
    for idx, line in enumerate(data):
        lineno = idx + 4
        parts = line.split(",")
        if len(parts) != 3:
            raise CsvFormatError(f"line {lineno}: expected 'x,p,W', got {line!r}")
        try:
            w = float(parts[2])
        except ValueError as err:
            raise CsvFormatError(f"line {lineno}: bad value {parts[2]!r}") from err
        values[idx // n_x, idx % n_x] = w
    if not np.all(np.isfinite(values)):
        raise CsvFormatError("non-finite Wigner values in data rows")
    return WignerCsv(x_min, x_max, n_x, p_min, p_max, n_p, values)


def render(spec: PlotSpec) -> WignerCsv:
    """Validate, render and save; returns the parsed grid."""
    grid = read_wigner_csv(spec.input_csv)
    vmax = float(np.abs(grid.values).max()) or 1.0
    fig, ax = plt.subplots(figsize=(6.0, 5.0))
    im = ax.imshow(
        grid.values,
        origin="lower",
        cmap="RdBu_r",
        vmin=-vmax,
        vmax=vmax,
        extent=(grid.x_min, grid.x_max, grid.p_min, grid.p_max),
        interpolation="nearest",
        aspect="auto",
    )
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    if spec.title:
        ax.set_title(spec.title)
    fig.colorbar(im, ax=ax, label="W(x, p)")
    fig.tight_layout()
    fig.savefig(spec.output_image, dpi=spec.dpi, metadata={"Software": "plot-wigner"})
    plt.close(fig)
    return grid


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plot-wigner", description="Render a Wigner CSV file as a heatmap image"
    )
    parser.add_argument("input_csv")
    parser.add_argument("output_image")
    parser.add_argument("--title", default=None)
    parser.add_argument("--dpi", type=int, default=150)
    args = parser.parse_args(argv)
    spec = PlotSpec(args.input_csv, args.output_image, args.title, args.dpi)
    try:
        grid = render(spec)
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except CsvFormatError as err:
        print(f"error: {spec.input_csv}: {err}", file=sys.stderr)
        return 1
    print(
        f"rendered {grid.n_x}x{grid.n_p} grid to {spec.output_image} "
        f"(max |W| = {np.abs(grid.values).max():.4f})"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
