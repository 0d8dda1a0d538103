"""Render spinmetro CSV datasets into figures.

Input files follow the spinmetro dialect: one leading '#' metadata line
carrying key=value tokens (including the generating command), a header
row, then comma-separated numeric rows. Every input is fully parsed and
validated before any output file is touched, so a failed job leaves no
partial image behind. Rendering never modifies its inputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class SchemaMismatch(Exception):
    """CSV does not carry the expected command or columns."""


@dataclass(frozen=True)
class FigureJob:
    """One rendering task: figure kind, input CSVs, output image path."""

    kind: str
    csv_paths: tuple[str, ...]
    out_path: str


@dataclass(frozen=True)
class Table:
    meta: dict
    columns: dict

    def col(self, name: str) -> np.ndarray:
        return self.columns[name]


EXPECTED_COMMAND = {
    "dimension": "fig-dimension",
    "surface": "fig-surface",
    "contour": "fig-contour",
    "appendix": "fig-appendix",
}

REQUIRED_COLUMNS = {
    "dimension": ("m", "p", "mqfi"),
    "surface": ("theta", "xi1_sq", "p"),
    "contour": ("xi2_sq", "theta", "p_total"),
    "appendix": ("xi3", "p_xi2_zero", "p_xi1_zero"),
}


def _parse_meta(lines: list[str]) -> dict:
    meta: dict = {}
    for line in lines:
        for token in line.lstrip("#").split():
            if "=" in token:
                key, value = token.split("=", 1)
                meta[key] = value
    return meta


def load_table(path, kind: str) -> Table:
    """Parse and validate one CSV against the figure kind's schema."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise SchemaMismatch(f"{path}: cannot read ({exc})") from exc
    lines = text.splitlines()
    meta_lines = []
    while lines and lines[0].startswith("#"):
        meta_lines.append(lines.pop(0))
    meta = _parse_meta(meta_lines)
    command = meta.get("command")
    if command != EXPECTED_COMMAND[kind]:
        raise SchemaMismatch(
            f"{path}: metadata command {command!r} does not match figure kind "
            f"{kind!r} (expected {EXPECTED_COMMAND[kind]!r})")
    if not lines:
        raise SchemaMismatch(f"{path}: no header row")
    header = lines.pop(0).split(",")
    for name in REQUIRED_COLUMNS[kind]:
        if name not in header:
            raise SchemaMismatch(f"{path}: missing column {name!r}")
    raw = [line.split(",") for line in lines if line]
    if not raw:
        raise SchemaMismatch(f"{path}: no data rows")
    columns: dict = {}
    for j, name in enumerate(header):
        try:
            columns[name] = np.array([float(row[j]) for row in raw])
        except (ValueError, IndexError) as exc:
            raise SchemaMismatch(f"{path}: column {name!r} is not numeric ({exc})") from exc
    return Table(meta=meta, columns=columns)


def _regular_grid(x, y, z):
    """Reshape long-format columns into a (ny, nx) grid."""
    xu = np.unique(x)
    yu = np.unique(y)
    grid = np.full((yu.size, xu.size), np.nan)
    xi = np.searchsorted(xu, x)
    yi = np.searchsorted(yu, y)
    grid[yi, xi] = z
    return xu, yu, grid


def _draw_dimension(tables, fig):
    table = tables[0]
    ax = fig.subplots()
    ax.plot(table.col("m"), table.col("p"), "o-", color="tab:blue",
            label="success probability")
    ax.set_xlabel("m")
    ax.set_ylabel("success probability", color="tab:blue")
    ax.tick_params(axis="y", labelcolor="tab:blue")
    twin = ax.twinx()
    twin.plot(table.col("m"), table.col("mqfi"), "s-", color="tab:red",
              label="peak QFI")
    twin.set_ylabel("peak QFI", color="tab:red")
    twin.tick_params(axis="y", labelcolor="tab:red")
    ax.set_title("postselection success and peak QFI vs dimension")


def _draw_surface(tables, fig):
    n = len(tables)
    rows = 1 if n == 1 else 2
    cols = 1 if n == 1 else 2
    axes = fig.subplots(rows, cols, squeeze=False).ravel()
    for ax in axes[n:]:
        ax.set_visible(False)
    for ax, table in zip(axes, tables):
        theta, xi1_sq, grid = _regular_grid(
            table.col("theta"), table.col("xi1_sq"), table.col("p"))
        mesh = ax.pcolormesh(theta, xi1_sq, grid, shading="nearest",
                             vmin=0.0, vmax=1.0, cmap="viridis")
        xi2_sq = table.meta.get("xi2_sq")
        if xi2_sq is not None:
            ridge = (1.0 - float(xi2_sq)) / 2.0
            ax.axhline(ridge, color="white", linestyle=":", linewidth=1.2)
            ax.set_title(f"$\\xi_2^2$ = {float(xi2_sq):g}")
        ax.set_xlabel(r"$\theta$")
        ax.set_ylabel(r"$\xi_1^2$")
        fig.colorbar(mesh, ax=ax)


def _draw_contour(tables, fig):
    table = tables[0]
    ax = fig.subplots()
    xi2_sq, theta, grid = _regular_grid(
        table.col("xi2_sq"), table.col("theta"), table.col("p_total"))
    mesh = ax.contourf(xi2_sq, theta, grid, levels=20, cmap="viridis")
    third = 1.0 / 3.0
    if xi2_sq.min() <= third <= xi2_sq.max():
        ax.axvline(third, color="black", linestyle=":", linewidth=1.2)
        ax.annotate(r"$\xi_2^2 = 1/3$", xy=(third, theta.mean()),
                    xytext=(5, 0), textcoords="offset points", color="black")
    ax.set_xlabel(r"$\xi_2^2$")
    ax.set_ylabel(r"$\theta$")
    ax.set_title("combined success probability")
    fig.colorbar(mesh, ax=ax)


def _draw_appendix(tables, fig):
    table = tables[0]
    ax = fig.subplots()
    ax.plot(table.col("xi3"), table.col("p_xi2_zero"), linestyle=":",
            color="tab:blue", label=r"$\xi_2 = 0,\ \theta = 0$")
    ax.plot(table.col("xi3"), table.col("p_xi1_zero"), linestyle="-",
            color="tab:orange", label=r"$\xi_1 = 0,\ \theta = \pi/2$")
    ax.set_xlabel(r"$\xi_3$")
    ax.set_ylabel("success probability")
    ax.set_ylim(0.0, 1.05)
    ax.legend()
    ax.set_title("degenerate-regime success probabilities")


_DRAWERS = {
    "dimension": _draw_dimension,
    "surface": _draw_surface,
    "contour": _draw_contour,
    "appendix": _draw_appendix,
}


def render(job: FigureJob) -> Path:
    """Validate all inputs, draw the figure, write the image file."""
    if job.kind not in _DRAWERS:
        raise ValueError(f"unknown figure kind {job.kind!r}")
    if job.kind == "surface":
        if not 1 <= len(job.csv_paths) <= 4:
            raise ValueError("surface figures take 1 to 4 CSVs")
    elif len(job.csv_paths) != 1:
        raise ValueError(f"{job.kind} figures take exactly one CSV")
    tables = [load_table(path, job.kind) for path in job.csv_paths]

    size = (9.0, 7.0) if job.kind == "surface" and len(tables) > 1 else (6.4, 4.8)
    fig = plt.figure(figsize=size)
    try:
        _DRAWERS[job.kind](tables, fig)
        fig.tight_layout()
        out = Path(job.out_path)
        fig.savefig(out, dpi=130, metadata={"Software": "figplot"})
    finally:
        plt.close(fig)
    return out
