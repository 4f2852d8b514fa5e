"""Figure rendering for run artifacts.

Every entry point writes a PNG next to the delimited output and returns the
path; nothing is displayed interactively.  Figures are diagnostic views of
the data already persisted in CSV / field files, never an extra source of
numbers.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

__all__ = ["table_figure", "trace_figure", "field_figure",
           "snapshot_figure"]

_ERROR_TABLES = {1, 3, 5, 7, 9, 11, 13, 14, 15}
_GAMMA_TABLES = {2, 4}
_ENERGY_TABLES = {8, 10, 12}


def _numeric_cells(row, start):
    xs, ys = [], []
    for j, cell in enumerate(row[start:]):
        if isinstance(cell, float):
            xs.append(j)
            ys.append(cell)
    return xs, ys


def table_figure(result, out_dir):
    """Render one TableResult as a PNG; returns the path (or None)."""
    path = os.path.join(out_dir, f"table{result.table:02d}.png")
    ncols = len(result.columns)
    first_value = next((j for j, name in enumerate(result.columns)
                        if name.split("=")[0] in ("h", "gamma")
                        or name in ("E_g", "build_s")), ncols)
    fig, ax = plt.subplots(figsize=(7.0, 4.6))
    if result.table in _ERROR_TABLES or result.table in _GAMMA_TABLES:
        labels = [c for c in result.columns[first_value:]]
        for row in result.rows:
            xs, ys = _numeric_cells(row, first_value)
            if not ys or row[0] == "rate":
                continue
            tag = " ".join(str(c) for c in row[:first_value]
                           if c not in (None, ""))
            ax.semilogy([labels[j] for j in xs], ys, marker="o",
                        label=tag[:48])
        ax.set_xlabel(result.columns[first_value].split("=")[0])
        ax.set_ylabel("relative max-norm error")
        ax.legend(fontsize=5.5, loc="best")
    elif result.table in _ENERGY_TABLES:
        names = result.columns
        bi = names.index("beta")
        betas = [float(r[bi]) for r in result.rows]
        for col in ("E_g", "mu_g", "E_kin", "E_pot", "E_int"):
            ci = names.index(col)
            ax.plot(betas, [r[ci] for r in result.rows], marker="o",
                    label=col)
        ax.set_xlabel("beta")
        ax.set_ylabel("energy")
        ax.legend(fontsize=8)
    elif result.table == 6:
        names = result.columns
        ni, si = names.index("N"), names.index("solve_s")
        N = [int(r[ni]) for r in result.rows]
        ax.loglog(N, [r[si] for r in result.rows], marker="o",
                  label="solve")
        ax.loglog(N, [r[names.index('build_s')] for r in result.rows],
                  marker="s", label="build")
        ax.set_xlabel("points per axis")
        ax.set_ylabel("seconds")
        ax.legend(fontsize=8)
    else:
        plt.close(fig)
        return None
    ax.set_title(result.title, fontsize=9)
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def trace_figure(trace, path):
    """Mass drift and energy components of a DynamicsTrace vs time."""
    t = np.asarray(trace.times)
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.6))
    mass = np.asarray(trace.mass)
    axes[0].plot(t, mass - mass[0], marker=".")
    axes[0].set_xlabel("t")
    axes[0].set_ylabel("mass - mass(0)")
    axes[0].set_title("mass drift", fontsize=9)
    for name, series in (("E", trace.e_total), ("E_kin", trace.e_kin),
                         ("E_pot", trace.e_pot), ("E_int", trace.e_int)):
        axes[1].plot(t, series, marker=".", label=name)
    axes[1].set_xlabel("t")
    axes[1].set_title("energy components", fontsize=9)
    axes[1].legend(fontsize=8)
    for ax in axes:
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def _axis_coords(grid, axis):
    n = grid.npoints[axis]
    hw = grid.halfwidth[axis]
    return -hw + (2.0 * hw / n) * np.arange(n)


def field_figure(field, path, title=""):
    """Render a scalar field: line (1D), filled contours (2D), mid-slice (3D)."""
    grid = field.grid
    vals = np.abs(field.values) if np.iscomplexobj(field.values) \
        else field.values
    fig, ax = plt.subplots(figsize=(5.6, 4.4))
    if grid.dim == 1:
        ax.plot(_axis_coords(grid, 0), vals)
        ax.set_xlabel("x")
    elif grid.dim == 2:
        m = ax.contourf(_axis_coords(grid, 0), _axis_coords(grid, 1),
                        vals.T, levels=40)
        fig.colorbar(m, ax=ax)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_aspect("equal")
    else:
        mid = grid.npoints[2] // 2
        m = ax.contourf(_axis_coords(grid, 0), _axis_coords(grid, 1),
                        vals[:, :, mid].T, levels=40)
        fig.colorbar(m, ax=ax)
        ax.set_xlabel("x")
        ax.set_ylabel("y (z = 0 slice)")
        ax.set_aspect("equal")
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path


def snapshot_figure(snapshots, grid, path):
    """Contour panel of density snapshots from a dynamics run."""
    n = len(snapshots)
    if n == 0:
        return None
    ncol = min(4, n)
    nrow = (n + ncol - 1) // ncol
    fig, axes = plt.subplots(nrow, ncol,
                             figsize=(3.0 * ncol, 2.7 * nrow),
                             squeeze=False)
    x, y = _axis_coords(grid, 0), _axis_coords(grid, 1)
    for k, (t, psi) in enumerate(snapshots):
        ax = axes[k // ncol][k % ncol]
        dens = np.abs(np.asarray(psi)) ** 2
        if dens.ndim == 3:
            dens = dens[:, :, dens.shape[2] // 2]
        ax.contourf(x, y, dens.T, levels=30)
        ax.set_title(f"t = {t:g}", fontsize=8)
        ax.set_aspect("equal")
        ax.tick_params(labelsize=6)
    for k in range(n, nrow * ncol):
        axes[k // ncol][k % ncol].axis("off")
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
    return path
