"""CSV and SVG writers for sweeps and trajectories."""

from __future__ import annotations

import csv
import io
import math
from xml.sax.saxutils import escape

from .spectra import BROKEN, EXCEPTIONAL, REAL
from .sweep import ERROR, SweepAxis, SweepCell, SweepGrid

PHASE_COLORS = {
    REAL: "#2b83ba",
    BROKEN: "#d7191c",
    EXCEPTIONAL: "#fdae61",
    ERROR: "#bdbdbd",
}


def fmt(v) -> str:
    return format(float(v), ".17g")


def sweep_columns(grid: SweepGrid) -> list[str]:
    return [ax.param for ax in grid.axes] + ["max_im", "min_pseudo_norm", "phase"]


def write_sweep_csv(grid: SweepGrid, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(sweep_columns(grid))
    for cell in grid.cells:
        w.writerow(
            [fmt(cell.values[ax.param]) for ax in grid.axes]
            + [fmt(cell.max_im), fmt(cell.min_pseudo_norm), cell.phase]
        )


def sweep_csv(grid: SweepGrid) -> str:
    buf = io.StringIO()
    write_sweep_csv(grid, buf)
    return buf.getvalue()


def read_sweep_csv(text: str, model: str = "") -> SweepGrid:
    """Rebuild a grid from its CSV; axes are recovered from the distinct values."""
    rows = list(csv.reader(io.StringIO(text)))
    header, body = rows[0], rows[1:]
    if header[-3:] != ["max_im", "min_pseudo_norm", "phase"] or not 1 <= len(header) - 3 <= 2:
        raise ValueError(f"not a sweep CSV header: {header}")
    names = header[:-3]
    cols = [[float(r[i]) for r in body] for i in range(len(names))]
    axes = []
    for name, col in zip(names, cols):
        uniq = sorted(set(col))
        axes.append(SweepAxis(name, uniq[0], uniq[-1], len(uniq)))
    cells = []
    for r in body:
        vals = {name: float(r[i]) for i, name in enumerate(names)}
        cells.append(SweepCell(vals, float(r[-3]), float(r[-2]), r[-1]))
    return SweepGrid(model, axes, cells)


def write_trajectory_csv(tr, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    dim = tr.states.shape[1]
    w.writerow(["t"] + [f"z{k}" for k in range(1, dim + 1)])
    for t, z in zip(tr.times, tr.states):
        w.writerow([fmt(t)] + [fmt(v) for v in z])


def _tick(v) -> str:
    return format(float(v), ".4g")


def sweep_svg(grid: SweepGrid, cell: int = 12, title: str | None = None) -> str:
    """Self-contained heatmap, one rect per cell.

    The last axis runs left to right; a first axis (2D sweeps) runs bottom to
    top.  Colours are the fixed ``PHASE_COLORS``.
    """
    if len(grid.axes) == 2:
        ya, xa = grid.axes
    else:
        ya, xa = None, grid.axes[0]
    nx = xa.n
    ny = ya.n if ya else 1
    ch = cell if ya else max(cell, 24)
    left, top, right, bottom = 70, 30 if title else 12, 140, 50
    w = left + nx * cell + right
    h = top + ny * ch + bottom
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{w}" height="{h}" fill="#ffffff"/>',
    ]
    if title:
        out.append(f'<text x="{left}" y="18" font-size="13">{escape(title)}</text>')
    for k, c in enumerate(grid.cells):
        iy, ix = divmod(k, nx)
        x = left + ix * cell
        y = top + (ny - 1 - iy) * ch
        color = PHASE_COLORS.get(c.phase, PHASE_COLORS[ERROR])
        label = ", ".join(f"{n}={_tick(v)}" for n, v in c.values.items())
        out.append(
            f'<rect x="{x}" y="{y}" width="{cell}" height="{ch}" fill="{color}">'
            f"<title>{escape(label)}: {escape(c.phase)}</title></rect>"
        )
    x0, x1 = left, left + nx * cell
    y0, y1 = top, top + ny * ch
    out.append(f'<rect x="{x0}" y="{y0}" width="{x1 - x0}" height="{y1 - y0}" fill="none" stroke="#000000"/>')
    out.append(f'<text x="{x0}" y="{y1 + 14}" text-anchor="start">{_tick(xa.lo)}</text>')
    out.append(f'<text x="{x1}" y="{y1 + 14}" text-anchor="end">{_tick(xa.hi)}</text>')
    out.append(f'<text x="{(x0 + x1) / 2}" y="{y1 + 34}" text-anchor="middle">{escape(xa.param)}</text>')
    if ya:
        out.append(f'<text x="{x0 - 4}" y="{y1}" text-anchor="end">{_tick(ya.lo)}</text>')
        out.append(f'<text x="{x0 - 4}" y="{y0 + 10}" text-anchor="end">{_tick(ya.hi)}</text>')
        cy = (y0 + y1) / 2
        out.append(
            f'<text x="{x0 - 40}" y="{cy}" text-anchor="middle" '
            f'transform="rotate(-90 {x0 - 40} {cy})">{escape(ya.param)}</text>'
        )
    lx = x1 + 16
    for k, (name, color) in enumerate(PHASE_COLORS.items()):
        ly = y0 + 18 * k
        out.append(f'<rect x="{lx}" y="{ly}" width="12" height="12" fill="{color}" stroke="#000000"/>')
        out.append(f'<text x="{lx + 18}" y="{ly + 10}">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def boundary_decimals(tol: float) -> int:
    return max(0, int(math.ceil(-math.log10(tol) - 1e-12)))


def unique_frequencies(values, tol: float = 1e-9) -> list[float]:
    """Sorted distinct |lambda| of the real eigenvalues (zero excluded)."""
    out: list[float] = []
    for v in sorted(abs(complex(z).real) for z in values if abs(complex(z).imag) <= tol * max(1.0, abs(z))):
        if v > tol and (not out or v - out[-1] > 1e-9 * max(1.0, v)):
            out.append(v)
    return out

