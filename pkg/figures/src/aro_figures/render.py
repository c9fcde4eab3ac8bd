"""Render simulation CSVs to raster figures.

Three kinds are supported, keyed to the producing CSV schema:

  branches     t, lambda_1..lambda_N, populated_1..populated_N
  yield_curve  s0_over_pi, yield_tdse [, yield_adiabatic]
  heatmap      s0_over_pi, delta_tau0, yield_tdse

Rendering never mutates its inputs; with pinned library versions the output
bytes are reproducible.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

KINDS = ("branches", "yield_curve", "heatmap")

DPI = 150


class HeaderMismatchError(ValueError):
    """The CSV header does not match the requested figure kind."""


@dataclass(frozen=True)
class FigureRequest:
    """What to draw: kind, input CSV path(s), output image path, styling.

    highlight lists 1-based branch numbers to thicken on a branches plot;
    when omitted, the populated flags stored in the CSV select them.
    """

    kind: str
    inputs: tuple[str, ...]
    output: str
    highlight: tuple[int, ...] | None = None
    xlim: tuple[float, float] | None = None
    ylim: tuple[float, float] | None = None
    title: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; expected one of {KINDS}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


def _read_csv(path):
    """Header and data rows of a delimited file; empty data is an error."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"input CSV not found: {path}")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path} is empty (no header row)") from None
        rows = [[float(x) for x in row] for row in reader if row]
    if not rows:
        raise ValueError(f"{path} has a header but no data rows")
    return header, np.asarray(rows)


def _check_header(kind: str, expected: list[str], found: list[str], path) -> None:
    if expected != found:
        raise HeaderMismatchError(
            f"{path} does not look like a {kind} CSV: expected columns "
            f"{','.join(expected)} but found {','.join(found)}"
        )


def _branches_columns(header: list[str], path) -> int:
    """Validate a branches header and return the branch count."""
    n = (len(header) - 1) // 2
    expected = (
        ["t"]
        + [f"lambda_{b}" for b in range(1, n + 1)]
        + [f"populated_{b}" for b in range(1, n + 1)]
    )
    if n < 1 or header != expected:
        guess = max((len(header) - 1) // 2, 2)
        shape = (
            ["t"]
            + [f"lambda_1..lambda_{guess}"]
            + [f"populated_1..populated_{guess}"]
        )
        raise HeaderMismatchError(
            f"{path} does not look like a branches CSV: expected columns "
            f"{','.join(shape)} but found {','.join(header)}"
        )
    return n


def _render_branches(req: FigureRequest, ax) -> None:
    header, data = _read_csv(req.inputs[0])
    n = _branches_columns(header, req.inputs[0])
    t = data[:, 0]
    populated = data[0, 1 + n :].astype(bool)
    highlight = (
        set(req.highlight)
        if req.highlight is not None
        else {b + 1 for b in range(n) if populated[b]}
    )
    palette = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for b in range(1, n + 1):
        thick = b in highlight
        ax.plot(
            t,
            data[:, b],
            color=palette[(b - 1) % len(palette)],
            lw=2.8 if thick else 1.0,
            label=f"branch {b}" + (" (populated)" if thick else ""),
        )
    ax.set_xlabel(r"$t/\tau_0$")
    ax.set_ylabel(r"dressed energy $\lambda \tau_0$")
    ax.legend(fontsize="small", ncol=2)


def _render_yield_curve(req: FigureRequest, ax) -> None:
    two_col = ["s0_over_pi", "yield_tdse"]
    three_col = two_col + ["yield_adiabatic"]
    for k, input_path in enumerate(req.inputs):
        header, data = _read_csv(input_path)
        if header not in (two_col, three_col):
            _check_header("yield_curve", three_col, header, input_path)
        suffix = "" if len(req.inputs) == 1 else f" [{Path(input_path).stem}]"
        ax.plot(
            data[:, 0],
            data[:, 1],
            color="black" if k == 0 else "tab:blue",
            ls="-" if k == 0 else "--",
            lw=1.4,
            label="numerical" + suffix,
        )
        if len(header) == 3:
            ax.plot(
                data[:, 0],
                data[:, 2],
                color="red",
                ls=":",
                lw=1.8,
                label="analytic" + suffix,
            )
    ax.set_xlabel(r"pulse area $S_0/\pi$")
    ax.set_ylabel("target population")
    ax.set_ylim(-0.02, 1.02)
    ax.legend(fontsize="small")


def _render_heatmap(req: FigureRequest, ax) -> None:
    expected = ["s0_over_pi", "delta_tau0", "yield_tdse"]
    header, data = _read_csv(req.inputs[0])
    _check_header("heatmap", expected, header, req.inputs[0])
    areas = np.unique(data[:, 0])
    deltas = np.unique(data[:, 1])
    grid = np.full((deltas.size, areas.size), np.nan)
    ai = np.searchsorted(areas, data[:, 0])
    di = np.searchsorted(deltas, data[:, 1])
    grid[di, ai] = data[:, 2]
    mesh = ax.pcolormesh(areas, deltas, grid, cmap="viridis", vmin=0.0, vmax=1.0)
    plt.colorbar(mesh, ax=ax, label="target population")
    ax.set_xlabel(r"pulse area $S_0/\pi$")
    ax.set_ylabel(r"splitting $\delta\tau_0$")


_RENDERERS = {
    "branches": _render_branches,
    "yield_curve": _render_yield_curve,
    "heatmap": _render_heatmap,
}


def render(req: FigureRequest) -> Path:
    """Draw the requested figure and write it to req.output.

    Validates the CSV header against the kind before any file is created, so
    a failed render leaves no output behind.
    """
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    try:
        _RENDERERS[req.kind](req, ax)
        if req.xlim is not None:
            ax.set_xlim(*req.xlim)
        if req.ylim is not None:
            ax.set_ylim(*req.ylim)
        if req.title:
            ax.set_title(req.title)
        fig.tight_layout()
        out = Path(req.output)
        out.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out, dpi=DPI)
    finally:
        plt.close(fig)
    return Path(req.output)
