"""Command-line front end.

Subcommands: potential, groundstate, dynamics, reproduce-table.  Every run
writes its delimited outputs, field dumps and rendered figures into --out
together with a manifest (config echo, library version, wall time).
Single-threaded reruns of the same config reproduce bit-identical numbers.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from contextlib import ExitStack

import numpy as np

from . import __version__, report, solvers, tables
from .config import ConfigError, parse_config
from .dynamics import DynamicsConfig, SplittingScheme, evolve, \
    honeycomb_potential
from .fieldio import write_field
from .grid import ScalarField, make_grid
from .groundstate import GfdnConfig, compute_ground_state
from .kernels import KernelSpec
from .reference import GaussianDensitySpec, error_eh, reference_potential

_DEMO_CONFIG = """[dynamics]
kernel = coulomb2d
beta = 5
L = 32
N = {N}
tau = {tau}
t_end = {t_end}
trap = honeycomb
order = 2
snapshots = {snaps}
"""


def _fmt_row(cells):
    out = []
    for c in cells:
        if c is None:
            out.append("")
        elif isinstance(c, float):
            out.append(f"{c:.12E}")
        else:
            out.append(str(c))
    return ",".join(out)


def _write_csv_row(path, header, cells):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(",".join(header) + "\n")
        fh.write(_fmt_row(cells) + "\n")


def _harmonic(omegas):
    om = tuple(float(w) for w in omegas)

    def trap(*xs):
        return 0.5 * sum((w * x) ** 2 for w, x in zip(om, xs))
    return trap


def _run_potential(cfg, out):
    opts, grid, kern = cfg.options, cfg.grid, cfg.kernel
    spec = GaussianDensitySpec(sigma=opts["sigma"], gamma=opts["gamma"],
                               dim=kern.dim)
    rho = spec.values(grid)
    method, tol = opts["method"], opts["tol"]
    t0 = time.perf_counter()
    if method == "dst":
        u = solvers.solve_dst(rho, grid, kern)
    elif method == "fft":
        u = solvers.solve_fft(rho, grid, kern)
    elif method == "fdm":
        u = solvers.solve_fdm_radial(rho, grid, kern)
    else:
        op = solvers.make_operator(grid, kern, method=method, tol=tol)
        u = op.solve(rho)
    solve_s = time.perf_counter() - t0
    ref = reference_potential(kern, spec, grid, tol=min(tol, 1e-13))
    e_h = error_eh(ref, u)
    h = 2.0 * grid.halfwidth[0] / grid.npoints[0]
    _write_csv_row(
        os.path.join(out, "potential.csv"),
        ["kernel", "epsilon", "sigma", "gamma", "L", "N", "h", "method",
         "tol", "e_h", "max_u", "solve_s"],
        [kern.family, kern.epsilon, opts["sigma"], opts["gamma"],
         grid.halfwidth[0], grid.npoints[0], h, method, tol,
         e_h, float(np.max(np.abs(u))), solve_s])
    fld = ScalarField(grid, u, kind="potential")
    write_field(os.path.join(out, "potential_u.field"), fld)
    report.field_figure(fld, os.path.join(out, "potential_u.png"),
                        title=f"{kern.family} potential, {method}")
    print(f"e_h = {e_h:.3E}  (method {method}, {grid.npoints[0]} points "
          f"per axis, {solve_s:.3f} s)")
    return ["potential.csv", "potential_u.field", "potential_u.png"]


def _run_groundstate(cfg, out):
    opts, grid, kern = cfg.options, cfg.grid, cfg.kernel
    omegas = opts["trap_omegas"] or (1.0,) * kern.dim
    method = opts["method"]
    params = {"pad_factor": 1.5} if kern.dim == 3 and method == "nufft" \
        else {}
    gcfg = GfdnConfig(grid=grid, kernel=kern, beta=opts["beta"],
                      trap=_harmonic(omegas), tau=opts["tau"],
                      eps0=opts["eps0"], method=method,
                      solver_tol=opts["tol"], solver_params=params,
                      ladder=opts["ladder"])
    t0 = time.perf_counter()
    res = compute_ground_state(gcfg)
    wall = time.perf_counter() - t0
    r = res.report
    _write_csv_row(
        os.path.join(out, "energy.csv"),
        ["beta", "E_g", "mu_g", "E_kin", "E_pot", "E_int", "I_h", "steps",
         "wall_s"],
        [opts["beta"], r.e_total, r.mu, r.e_kin, r.e_pot, r.e_int,
         r.virial_residual, res.steps, wall])
    write_field(os.path.join(out, "phi_g.field"), res.phi)
    report.field_figure(res.phi, os.path.join(out, "phi_g.png"),
                        title=f"ground state, beta = {opts['beta']:g}")
    print(f"E = {r.e_total:.6f}  mu = {r.mu:.6f}  steps = {res.steps}  "
          f"({wall:.1f} s)")
    return ["energy.csv", "phi_g.field", "phi_g.png"]


def _run_dynamics(cfg, out):
    opts, grid, kern = cfg.options, cfg.grid, cfg.kernel
    trap_kind = opts["trap"]
    if trap_kind == "harmonic":
        trap = _harmonic(opts["trap_omegas"] or (1.0,) * grid.dim)
    elif trap_kind == "honeycomb":
        trap = honeycomb_potential
    else:
        trap = None
    params = {"pad_factor": 1.5} if grid.dim == 3 else {}
    dcfg = DynamicsConfig(
        grid=grid, tau=opts["tau"], t_end=opts["t_end"], kernel=kern,
        beta=opts["beta"], trap=trap,
        scheme=SplittingScheme(opts["order"]), method=opts["method"],
        solver_tol=opts["tol"], solver_params=params,
        sample_every=opts["sample_every"] or None,
        snapshot_times=opts["snapshots"])
    width = opts["psi0_width"]
    r2 = sum(x**2 for x in grid.meshes)
    psi0 = np.exp(-r2 / (2.0 * width**2)).astype(complex)
    t0 = time.perf_counter()
    state, trace, snapshots = evolve(psi0, dcfg)
    wall = time.perf_counter() - t0
    names, data = trace.columns()
    keep = [j for j, col in enumerate(data)
            if not np.all(np.isnan(np.asarray(col, dtype=float)))]
    trace_path = os.path.join(out, "trace.csv")
    with open(trace_path, "w", encoding="ascii") as fh:
        fh.write(",".join(names[j] for j in keep) + "\n")
        for row in zip(*(data[j] for j in keep)):
            fh.write(_fmt_row([float(v) for v in row]) + "\n")
    artifacts = ["trace.csv", "trace.png", "psi_final.field"]
    report.trace_figure(trace, os.path.join(out, "trace.png"))
    write_field(os.path.join(out, "psi_final.field"), state)
    for t, psi in snapshots:
        dens = ScalarField(grid, np.abs(psi) ** 2, kind="density")
        name = f"density_t{t:g}.field"
        write_field(os.path.join(out, name), dens)
        artifacts.append(name)
    if snapshots:
        report.snapshot_figure(snapshots, grid,
                               os.path.join(out, "snapshots.png"))
        artifacts.append("snapshots.png")
    mass = np.asarray(trace.mass)
    drift = float(np.max(np.abs(mass - mass[0])) / mass[0])
    print(f"evolved to t = {dcfg.t_end:g} in {dcfg.n_steps} steps; "
          f"relative mass drift {drift:.3E}  ({wall:.1f} s)")
    return artifacts


def _run_reproduce(cfg, out, full):
    tid = cfg.options["table"]
    result = tables.reproduce_table(tid, full=full or cfg.options["full"])
    name = f"table{tid:02d}.csv"
    tables.write_csv(result, os.path.join(out, name))
    artifacts = [name]
    fig = report.table_figure(result, out)
    if fig:
        artifacts.append(os.path.basename(fig))
    print(f"table {tid}: {len(result.rows)} rows -> "
          f"{os.path.join(out, name)}")
    return artifacts


def _demo_text(full):
    if full:
        snaps = ",".join(f"{0.5 * k:g}" for k in range(8))
        return _DEMO_CONFIG.format(N=1024, tau=1e-4, t_end=3.5, snaps=snaps)
    return _DEMO_CONFIG.format(N=512, tau=1e-3, t_end=1.0, snaps="0,0.5,1")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="nlse-nonlocal",
        description="Spectral evaluation of nonlocal interaction potentials "
                    "and NLSE ground states / dynamics.")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "potential": "solve one interaction potential for a Gaussian "
                     "density and report its error",
        "groundstate": "normalized gradient-flow ground state",
        "dynamics": "time-splitting evolution (default: honeycomb demo)",
        "reproduce-table": "recompute a published table as CSV "
                           "(config key: table = 1..15; 6 is the "
                           "timing-scaling replacement)",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", metavar="PATH",
                       help="INI-style run configuration")
        p.add_argument("--out", metavar="DIR", default=None,
                       help="output directory (default runs/<command>)")
        p.add_argument("--tol", type=float, default=None,
                       help="override the solver tolerance")
        p.add_argument("--threads", type=int, default=1,
                       help="FFT/compute threads (default 1, deterministic)")
        p.add_argument("--full", action="store_true",
                       help="paper-scale instead of desk-scale runs")
    args = parser.parse_args(argv)

    command = args.command
    try:
        if args.config is not None:
            with open(args.config, "r", encoding="utf-8") as fh:
                text = fh.read()
        elif command == "dynamics":
            text = _demo_text(args.full)
        else:
            parser.error(f"{command} requires --config")
        cfg = parse_config(text)
        if cfg.command != command:
            raise ConfigError(
                f"config section [{cfg.command}] does not match the "
                f"{command} subcommand")
        if args.tol is not None:
            if args.tol <= 0:
                raise ConfigError("--tol must be positive")
            cfg.options["tol"] = args.tol
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out = args.out or os.path.join("runs", command)
    os.makedirs(out, exist_ok=True)
    t0 = time.perf_counter()
    try:
        with ExitStack() as stack:
            from scipy import fft as sfft
            stack.enter_context(sfft.set_workers(max(1, args.threads)))
            try:
                import numba
                numba.set_num_threads(max(1, args.threads))
            except ImportError:
                pass
            if command == "potential":
                artifacts = _run_potential(cfg, out)
            elif command == "groundstate":
                artifacts = _run_groundstate(cfg, out)
            elif command == "dynamics":
                artifacts = _run_dynamics(cfg, out)
            else:
                artifacts = _run_reproduce(cfg, out, args.full)
    except (ValueError, RuntimeError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    wall = time.perf_counter() - t0
    manifest = {
        "command": command,
        "library_version": __version__,
        "wall_s": wall,
        "threads": max(1, args.threads),
        "config": cfg.text,
        "artifacts": sorted(artifacts + ["manifest.json"]),
    }
    with open(os.path.join(out, "manifest.json"), "w",
              encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
