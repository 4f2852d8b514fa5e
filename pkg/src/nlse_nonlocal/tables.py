"""Reproduction of the published accuracy, energy and dynamics tables.

Each builder returns a TableResult whose rows carry full provenance (method,
kernel, density, box, step sizes) next to the values, so every CSV cell can
be audited.  Heavy runs (ground states, long evolutions, anisotropic
references) are cached on disk under NLSE_NONLOCAL_CACHE keyed by their
complete configuration; cached reruns reproduce bit-identical numbers.

Desk-scale policy: cells whose grids exceed the default size cap are left
empty unless ``full=True``; the structure of every table is always complete.
Table 6 (Fortran wall-clock comparisons) is replaced by a solve-time scaling
run on this machine.
"""

from __future__ import annotations

import hashlib
import os
import time
from dataclasses import dataclass, field

import numpy as np

from . import solvers
from .dynamics import DynamicsConfig, SplittingScheme, evolve
from .grid import make_grid
from .groundstate import GfdnConfig, compute_ground_state
from .kernels import KernelSpec
from .reference import GaussianDensitySpec, error_eh, reference_potential

__all__ = ["TABLE_IDS", "TableResult", "reproduce_table", "write_csv",
           "ground_state_run", "dynamics_run", "timing_scaling"]

TABLE_IDS = frozenset(range(1, 16))

_H_LABEL = {2.0: "h=2", 1.0: "h=1", 0.5: "h=1/2", 0.25: "h=1/4",
            0.125: "h=1/8", 0.0625: "h=1/16", 0.03125: "h=1/32",
            0.015625: "h=1/64", 0.0078125: "h=1/128"}


def _hlab(h):
    return _H_LABEL.get(h, f"h={h:g}")


@dataclass
class TableResult:
    table: int
    title: str
    columns: list
    rows: list = field(default_factory=list)
    notes: str = ""

    def add(self, *cells):
        if len(cells) != len(self.columns):
            raise ValueError(
                f"row has {len(cells)} cells, table has {len(self.columns)}")
        self.rows.append(list(cells))


def _fmt(cell):
    if cell is None:
        return ""
    if isinstance(cell, float):
        return f"{cell:.3E}"
    return str(cell)


def write_csv(result, path):
    """Write a TableResult as CSV (scientific notation, 4 significant digits)."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"# table {result.table}: {result.title}\n")
        if result.notes:
            for line in result.notes.splitlines():
                fh.write(f"# {line}\n")
        fh.write(",".join(result.columns) + "\n")
        for row in result.rows:
            fh.write(",".join(_fmt(c) for c in row) + "\n")


# ---------------------------------------------------------------------------
# disk cache for heavy runs
# ---------------------------------------------------------------------------

def _run_cache_path(tag):
    root = os.environ.get("NLSE_NONLOCAL_CACHE")
    if not root:
        return None
    os.makedirs(root, exist_ok=True)
    digest = hashlib.sha256(tag.encode()).hexdigest()[:20]
    return os.path.join(root, f"run_{digest}.npz")


def _run_cache_load(tag):
    path = _run_cache_path(tag)
    if path is None or not os.path.exists(path):
        return None
    with np.load(path, allow_pickle=False) as payload:
        if str(payload["tag"]) != tag:
            return None
        return {k: payload[k] for k in payload.files if k != "tag"}


def _run_cache_store(tag, **data):
    path = _run_cache_path(tag)
    if path is None:
        return
    np.savez(path, tag=tag, **data)


# ---------------------------------------------------------------------------
# single-potential accuracy cells (Tables 1-5)
# ---------------------------------------------------------------------------

def _aniso_grid(dim, L, gamma, N):
    halfwidth = (L,) * (dim - 1) + (L / gamma,)
    return make_grid(dim, halfwidth, (N,) * dim)


def potential_error(kernel, sigma, gamma, L, h, method, tol=1e-14,
                    ref_tol=1e-13, **params):
    """e_h of one table cell: Gaussian density, one solve, frozen reference."""
    N = round(2.0 * L / h)
    grid = _aniso_grid(kernel.dim, L, gamma, N)
    spec = GaussianDensitySpec(sigma=sigma, gamma=gamma, dim=kernel.dim)
    rho = spec.values(grid)
    if method == "dst":
        u = solvers.solve_dst(rho, grid, kernel)
    elif method == "fft":
        u = solvers.solve_fft(rho, grid, kernel)
    else:
        op = solvers.make_operator(grid, kernel, method=method, tol=tol,
                                   **params)
        u = op.solve(rho)
    ref = reference_potential(kernel, spec, grid, tol=ref_tol)
    return error_eh(ref, u)


def _accuracy_block(result, kernel, sigma, method, L_list, h_list, cap,
                    tol=1e-14, gamma=1.0):
    for L in L_list:
        cells = []
        for h in h_list:
            N = round(2.0 * L / h)
            if N > cap:
                cells.append(None)
                continue
            params = {}
            if kernel.dim == 3 and method == "nufft" and N >= 256:
                # decayed-density cells: reduced padding keeps the padded
                # transform within memory; exact for these densities
                params["pad_factor"] = 1.5
            cells.append(potential_error(kernel, sigma, gamma, L, h, method,
                                         tol=tol, **params))
        result.add("e_h", method, kernel.family, f"{sigma:.6g}",
                   f"{gamma:g}", f"{L:g}", *cells)


def _table_1(full):
    h_list = [2.0, 1.0, 0.5, 0.25, 0.125]
    cap = 384 if full else 256
    cols = ["quantity", "method", "kernel", "sigma", "gamma", "L"] + \
        [_hlab(h) for h in h_list]
    t = TableResult(1, "3D Coulomb potential accuracy", cols,
                    notes="Gaussian density, isotropic; empty cells exceed "
                          "the desk-scale grid cap")
    kern = KernelSpec("coulomb3d")
    _accuracy_block(t, kern, 1.1, "nufft", [4, 8, 16], h_list, cap)
    for method in ("dst", "fft"):
        _accuracy_block(t, kern, 1.1, method, [4, 8, 16, 32, 64], h_list, cap)
    return t


def _table_2(full):
    gammas = [1, 2, 4, 8]
    cols = ["quantity", "method", "kernel", "sigma", "L", "h"] + \
        [f"gamma={g}" for g in gammas]
    t = TableResult(
        2, "3D Coulomb potential accuracy, anisotropic densities", cols,
        notes="box [-L,L]^2 x [-L/gamma, L/gamma], h_z = h/gamma; "
              "sigma follows the square-root convention (sigma^2 = 2): the "
              "printed machine-accuracy values are unreachable for a width-2 "
              "Gaussian on this box, whose own tail truncation saturates "
              "near 2e-8")
    kern = KernelSpec("coulomb3d")
    sigma = float(np.sqrt(2.0))
    for method in ("nufft", "dst", "fft"):
        cells = [potential_error(kern, sigma, g, 8.0, 0.25, method)
                 for g in gammas]
        t.add("e_h", method, kern.family, f"{sigma:.6g}", "8", "1/4", *cells)
    return t


def _table_3(full):
    h_list = [2.0, 1.0, 0.5, 0.25, 0.125]
    cap = 2048 if full else 1024
    cols = ["quantity", "method", "kernel", "sigma", "gamma", "L"] + \
        [_hlab(h) for h in h_list]
    t = TableResult(3, "2D Coulomb potential accuracy", cols)
    kern = KernelSpec("coulomb2d")
    sigma = float(np.sqrt(1.2))
    _accuracy_block(t, kern, sigma, "nufft", [4, 8, 16], h_list, cap)
    for method in ("dst", "fft"):
        _accuracy_block(t, kern, sigma, method, [4, 8, 16, 32, 64], h_list,
                        cap)
    return t


def _table_4(full):
    gammas = [1, 2, 4, 8]
    cols = ["quantity", "method", "kernel", "sigma", "L", "h"] + \
        [f"gamma={g}" for g in gammas]
    t = TableResult(
        4, "2D Coulomb potential accuracy, anisotropic densities", cols,
        notes="box [-L,L] x [-L/gamma, L/gamma], h_y = h/gamma")
    kern = KernelSpec("coulomb2d")
    for method in ("nufft", "dst", "fft"):
        cells = [potential_error(kern, 2.0, g, 12.0, 0.125, method)
                 for g in gammas]
        t.add("e_h", method, kern.family, "2", "12", "1/8", *cells)
    return t


def _table_5(full):
    h_list = [2.0, 1.0, 0.5, 0.25, 0.125]
    fdm_h = [0.125, 0.0625, 0.03125, 0.015625, 0.0078125]
    cap = 2048 if full else 1024
    cols = ["quantity", "method", "kernel", "sigma", "gamma", "L"] + \
        [_hlab(h) for h in h_list] + [_hlab(h) for h in fdm_h]
    t = TableResult(
        5, "2D Poisson potential accuracy (spectral vs finite differences)",
        cols, notes="NUFFT cells use the coarse h grid; FDM cells the fine "
                    "one; rate rows are log2 ratios of successive FDM errors")
    kern = KernelSpec("laplace2d")
    sigma0 = float(np.sqrt(1.3))
    pad = [None] * len(fdm_h)
    for L in (4, 8, 16):
        cells = []
        for h in h_list:
            N = round(2.0 * L / h)
            cells.append(None if N > cap else
                         potential_error(kern, sigma0, 1.0, L, h, "nufft"))
        t.add("e_h", "nufft", kern.family, f"{sigma0:.6g}", "1", f"{L:g}",
              *cells, *pad)
    lead = [None] * len(h_list)
    for L in (4, 8, 16):
        errs = [potential_error(kern, sigma0, 1.0, L, h, "fdm")
                for h in fdm_h]
        t.add("e_h", "fdm", kern.family, f"{sigma0:.6g}", "1", f"{L:g}",
              *lead, *errs)
        rates = [None] + [f"{np.log2(errs[i - 1] / errs[i]):.4f}"
                          for i in range(1, len(errs))]
        t.add("rate", "fdm", kern.family, f"{sigma0:.6g}", "1", f"{L:g}",
              *lead, *rates)
    return t


def timing_scaling(h_list=(0.5, 0.25, 0.125), L=8.0, repeats=3):
    """Solve-time scaling of the 2D Poisson NUFFT path on a fixed box.

    Returns rows (h, N, build seconds, per-solve seconds, ratio to the
    previous h).  Near-linear complexity in grid points shows as ratios
    staying well below the point-count factor of 4.
    """
    kern = KernelSpec("laplace2d")
    rows = []
    prev = None
    for h in h_list:
        N = round(2.0 * L / h)
        grid = make_grid(2, L, N)
        rho = GaussianDensitySpec(sigma=1.0, dim=2).values(grid)
        t0 = time.perf_counter()
        op = solvers.make_operator(grid, kern, tol=1e-14)
        op.solve(rho)
        build = time.perf_counter() - t0
        t0 = time.perf_counter()
        for _ in range(repeats):
            op.solve(rho)
        per = (time.perf_counter() - t0) / repeats
        ratio = None if prev is None else per / prev
        prev = per
        rows.append((h, N, build, per, ratio))
    return rows


def _table_6(full):
    cols = ["quantity", "method", "kernel", "L", "h", "N",
            "build_s", "solve_s", "ratio"]
    t = TableResult(
        6, "2D Poisson NUFFT solve-time scaling (replaces the published "
           "wall-clock table)", cols,
        notes="absolute times are machine-specific; the audited property is "
              "the solve-time ratio per mesh halving")
    for h, N, build, per, ratio in timing_scaling():
        t.add("time", "nufft", "laplace2d", "8", f"{h:g}", str(N),
              build, per, None if ratio is None else f"{ratio:.2f}")
    return t


# ---------------------------------------------------------------------------
# ground-state runs (Tables 7-12)
# ---------------------------------------------------------------------------

def _harmonic(omegas):
    om = tuple(float(w) for w in omegas)

    def trap(*xs):
        return 0.5 * sum((w * x) ** 2 for w, x in zip(om, xs))
    return trap


def ground_state_run(kernel, L, N, beta, omegas, method="nufft",
                     tol=1e-12, tau=1e-2, eps0=1e-10, solver_params=None,
                     cache=True):
    """Ground state with disk caching; returns a dict of results.

    Keys: phi (array), e_total, mu, e_kin, e_pot, e_int, virial, steps,
    wall_s.  The cache key covers the whole configuration.
    """
    solver_params = dict(solver_params or {})
    tag = "|".join([
        "gf1", kernel.family, repr(kernel.epsilon), f"L{L:g}", f"N{N}",
        f"beta{beta:.17g}", "om" + ",".join(f"{w:g}" for w in omegas),
        method, f"tol{tol:.3g}", f"tau{tau:.3g}", f"eps{eps0:.3g}",
        repr(sorted(solver_params.items()))])
    if cache:
        hit = _run_cache_load(tag)
        if hit is not None:
            return hit
    grid = make_grid(kernel.dim, L, N)
    cfg = GfdnConfig(grid=grid, kernel=kernel, beta=beta,
                     trap=_harmonic(omegas), tau=tau, eps0=eps0,
                     method=method, solver_tol=tol,
                     solver_params=solver_params)
    t0 = time.perf_counter()
    res = compute_ground_state(cfg)
    wall = time.perf_counter() - t0
    r = res.report
    out = dict(phi=res.phi.values, e_total=np.float64(r.e_total),
               mu=np.float64(r.mu), e_kin=np.float64(r.e_kin),
               e_pot=np.float64(r.e_pot), e_int=np.float64(r.e_int),
               virial=np.float64(np.nan if r.virial_residual is None
                                 else r.virial_residual),
               steps=np.int64(res.steps), wall_s=np.float64(wall))
    if cache:
        _run_cache_store(tag, **out)
    return out


def _gf_errors(kernel, L, N_run, beta, omegas, method, ref, tol=1e-12,
               eps0=1e-10, solver_params=None):
    """(e_phi_g, e_varphi) of one run against a finer reference state.

    The interaction potential of the run is evaluated with the run's own
    solver so that the saturation of the comparison methods shows; the
    reference potential always uses the spectrally accurate path.
    """
    run = ground_state_run(kernel, L, N_run, beta, omegas, method=method,
                           tol=tol, eps0=eps0, solver_params=solver_params)
    grid = make_grid(kernel.dim, L, N_run)
    ref_grid = make_grid(kernel.dim, L, int(ref["phi"].shape[0]))
    phi_ref = _restrict(np.asarray(ref["phi"]), ref_grid, grid)
    phi_run = np.asarray(run["phi"])
    # align the free sign of the real ground state
    if float(np.vdot(phi_run, phi_ref).real) < 0:
        phi_run = -phi_run
    e_state = float(np.max(np.abs(phi_run - phi_ref))
                    / np.max(np.abs(phi_ref)))
    rho_run = np.abs(phi_run) ** 2
    rho_ref = np.abs(phi_ref) ** 2
    if kernel.dim <= 2:
        op = solvers.get_operator(grid, kernel, method="nufft-cached",
                                  tol=1e-13)
    else:
        op = solvers.get_operator(grid, kernel, tol=1e-13,
                                  **(solver_params or {}))
    if method == "dst":
        u_run = solvers.solve_dst(rho_run, grid, kernel)
    elif method == "fft":
        u_run = solvers.solve_fft(rho_run, grid, kernel)
    else:
        u_run = op.solve(rho_run)
    u_ref = op.solve(rho_ref)
    e_pot = float(np.max(np.abs(u_run - u_ref)) / np.max(np.abs(u_ref)))
    return e_state, e_pot


def _restrict(values, fine, coarse):
    """Restrict samples on a refining grid to a coarser one (same box)."""
    if fine.halfwidth != coarse.halfwidth:
        raise ValueError("grids cover different boxes")
    steps = []
    for nf_, nc in zip(fine.npoints, coarse.npoints):
        if nf_ % nc:
            raise ValueError("fine grid does not refine the coarse one")
        steps.append(nf_ // nc)
    sl = tuple(slice(0, None, s) for s in steps)
    return values[sl]


def _gf_convergence_table(tid, title, kernel, L, omegas, h_list, ref_h,
                          methods, full, dst_L_scan=None, notes=""):
    cols = ["quantity", "method", "kernel", "trap", "L", "beta"] + \
        [_hlab(h) for h in h_list]
    t = TableResult(tid, title, cols, notes=notes)
    trap_desc = "harmonic " + ",".join(f"{w:g}" for w in omegas)
    if kernel.dim <= 2:
        # the 2D flows are cheap; run them tight enough that the finest
        # mesh resolves the spectral floor rather than the stopping error
        conv_eps, conv_tol = 1e-13, 1e-14
        params = {}
    else:
        conv_eps, conv_tol = 1e-10, 1e-12
        params = {"pad_factor": 1.5}
    refs = {}
    for beta in (-5.0, 5.0):
        N_ref = round(2.0 * L / ref_h)
        refs[beta] = ground_state_run(kernel, L, N_ref, beta, omegas,
                                      tol=conv_tol, eps0=conv_eps,
                                      solver_params=params)
    for method in methods:
        for quantity in ("e_phi_g", "e_varphi"):
            for beta in (-5.0, 5.0):
                cells = []
                for h in h_list:
                    N = round(2.0 * L / h)
                    pair = _gf_errors(kernel, L, N, beta, omegas, method,
                                      refs[beta], tol=conv_tol,
                                      eps0=conv_eps, solver_params=params)
                    cells.append(pair[0] if quantity == "e_phi_g"
                                 else pair[1])
                t.add(quantity, "gf-" + method, kernel.family, trap_desc,
                      f"{L:g}", f"{beta:g}", *cells)
    if dst_L_scan:
        h = dst_L_scan["h"]
        for quantity in ("e_phi_g", "e_varphi"):
            for beta in (-5.0, 5.0):
                cells = []
                for L2 in dst_L_scan["L_list"]:
                    N = round(2.0 * L2 / h)
                    ref2 = ground_state_run(kernel, L2,
                                            round(2.0 * L2 / ref_h), beta,
                                            omegas, tol=conv_tol,
                                            eps0=conv_eps)
                    pair = _gf_errors(kernel, L2, N, beta, omegas, "dst",
                                      ref2, tol=conv_tol, eps0=conv_eps)
                    cells.append(pair[0] if quantity == "e_phi_g"
                                 else pair[1])
                pad = [None] * (len(h_list) - len(cells))
                t.add(quantity, "gf-dst " + _hlab(h) + " L scan "
                      + ",".join(f"{x:g}" for x in dst_L_scan["L_list"]),
                      kernel.family, trap_desc, "scan", f"{beta:g}",
                      *cells, *pad)
    return t


def _table_7(full):
    return _gf_convergence_table(
        7, "3D Coulomb ground states: spectral convergence",
        KernelSpec("coulomb3d"), 8.0, (1.0, 1.0, 1.0),
        [2.0, 1.0, 0.5, 0.25], 0.125, ["nufft", "dst"], full,
        notes="errors against the h=1/8 run of the same flow")


def _table_9(full):
    scan = {"h": 0.125, "L_list": [8, 16, 32, 64] if full else [8, 16, 32]}
    return _gf_convergence_table(
        9, "2D Coulomb ground states: spectral convergence",
        KernelSpec("coulomb2d"), 8.0, (1.0, 2.0),
        [1.0, 0.5, 0.25, 0.125], 0.0625, ["nufft", "dst"], full,
        dst_L_scan=scan,
        notes="errors against the h=1/16 run; the trailing rows scan the "
              "Dirichlet box size at fixed h")


def _table_11(full):
    return _gf_convergence_table(
        11, "2D Poisson ground states: spectral convergence",
        KernelSpec("laplace2d"), 8.0, (1.0, 2.0),
        [1.0, 0.5, 0.25, 0.125], 0.0625, ["nufft"], full,
        notes="errors against the h=1/16 run of the same flow")


def _gf_energy_table(tid, title, kernel, L, h, omegas, notes=""):
    cols = ["method", "kernel", "trap", "L", "h", "beta",
            "E_g", "mu_g", "E_kin", "E_pot", "E_int", "I_h", "steps",
            "wall_s"]
    t = TableResult(tid, title, cols, notes=notes)
    trap_desc = "harmonic " + ",".join(f"{w:g}" for w in omegas)
    N = round(2.0 * L / h)
    params = {"pad_factor": 1.5} if kernel.dim == 3 else {}
    for beta in (-10.0, -5.0, -1.0, 1.0, 5.0, 10.0):
        run = ground_state_run(kernel, L, N, beta, omegas,
                               solver_params=params)
        t.add("gf-nufft", kernel.family, trap_desc, f"{L:g}", _hlab(h),
              f"{beta:g}", float(run["e_total"]), float(run["mu"]),
              float(run["e_kin"]), float(run["e_pot"]),
              float(run["e_int"]), float(run["virial"]),
              str(int(run["steps"])), float(run["wall_s"]))
    return t


def _table_8(full):
    return _gf_energy_table(
        8, "3D Coulomb ground states: energies across interaction strengths",
        KernelSpec("coulomb3d"), 8.0, 0.125, (1.0, 1.0, 2.0))


def _table_10(full):
    return _gf_energy_table(
        10, "2D Coulomb ground states: energies across interaction strengths",
        KernelSpec("coulomb2d"), 8.0, 0.125, (1.0, 2.0))


def _table_12(full):
    return _gf_energy_table(
        12, "2D Poisson ground states: energies across interaction strengths",
        KernelSpec("laplace2d"), 8.0, 0.125, (1.0, 2.0))


# ---------------------------------------------------------------------------
# dynamics runs (Tables 13-15)
# ---------------------------------------------------------------------------

def dynamics_run(kernel, dim, L, N, beta, tau, t_end, order=4,
                 method="nufft", tol=1e-12, solver_params=None, cache=True):
    """Evolve the standard Gaussian data in the isotropic harmonic trap.

    Initial state exp(-|x|^2/2), V = |x|^2/2.  Returns dict with the final
    complex state ``psi``, the relative mass drift, and wall seconds.
    """
    solver_params = dict(solver_params or {})
    fam = "none" if kernel is None else kernel.family
    tag = "|".join([
        "dyn1", fam, f"d{dim}", f"L{L:g}", f"N{N}", f"beta{beta:.17g}",
        f"tau{tau:.17g}", f"T{t_end:.17g}", f"o{order}", method,
        f"tol{tol:.3g}", repr(sorted(solver_params.items()))])
    if cache:
        hit = _run_cache_load(tag)
        if hit is not None:
            return hit
    grid = make_grid(dim, L, N)
    r2 = sum(x**2 for x in grid.meshes)
    psi0 = np.exp(-r2 / 2.0)
    cfg = DynamicsConfig(grid=grid, tau=tau, t_end=t_end, kernel=kernel,
                         beta=beta, trap=lambda *xs: 0.5 * sum(
                             x**2 for x in xs),
                         scheme=SplittingScheme(order), method=method,
                         solver_tol=tol, solver_params=solver_params,
                         sample_every=max(1, round(t_end / tau) // 8))
    t0 = time.perf_counter()
    state, trace, _ = evolve(psi0, cfg)
    wall = time.perf_counter() - t0
    drift = float(np.max(np.abs(np.asarray(trace.mass) - trace.mass[0]))
                  / trace.mass[0])
    out = dict(psi=state.values, mass_drift=np.float64(drift),
               wall_s=np.float64(wall))
    if cache:
        _run_cache_store(tag, **out)
    return out


def _dyn_errors(kernel, dim, L, N, beta, tau, t_end, order, method, ref,
                ref_grid, solver_params=None):
    """(e_psi, e_phi, e_rho) of a run against a finer-grid reference run."""
    run = dynamics_run(kernel, dim, L, N, beta, tau, t_end, order=order,
                       method=method, solver_params=solver_params)
    grid = make_grid(dim, L, N)
    psi_ref = _restrict(np.asarray(ref["psi"]), ref_grid, grid)
    psi = np.asarray(run["psi"])
    scale = float(np.max(np.abs(psi_ref)))
    e_psi = float(np.max(np.abs(psi - psi_ref))) / scale
    rho, rho_ref = np.abs(psi) ** 2, np.abs(psi_ref) ** 2
    e_rho = float(np.max(np.abs(rho - rho_ref)) / np.max(rho_ref))
    if dim <= 2:
        op = solvers.get_operator(grid, kernel, method="nufft-cached",
                                  tol=1e-13)
    else:
        op = solvers.get_operator(grid, kernel, tol=1e-13,
                                  **(solver_params or {}))
    if method == "dst":
        u_run = solvers.solve_dst(rho, grid, kernel)
    elif method == "fft":
        u_run = solvers.solve_fft(rho, grid, kernel)
    else:
        u_run = op.solve(rho)
    u_ref = op.solve(rho_ref)
    e_phi = float(np.max(np.abs(u_run - u_ref)) / np.max(np.abs(u_ref)))
    return e_psi, e_phi, e_rho


def _dynamics_table(tid, title, kernel, dim, L, tau, t_end, h_list, ref_h,
                    methods, full, dst_L_scan=None, notes=""):
    cols = ["quantity", "method", "kernel", "L", "tau", "t", "beta"] + \
        [_hlab(h) for h in h_list]
    t = TableResult(tid, title, cols, notes=notes)
    params3 = {"pad_factor": 1.5} if dim == 3 else {}
    refs = {}
    ref_grid = make_grid(dim, L, round(2.0 * L / ref_h))
    for beta in (-5.0, 5.0):
        refs[beta] = dynamics_run(kernel, dim, L, ref_grid.npoints[0], beta,
                                  tau, t_end, order=4,
                                  solver_params=params3)
    for method in methods:
        for quantity in ("e_psi", "e_phi", "e_rho"):
            for beta in (-5.0, 5.0):
                cells = []
                for h in h_list:
                    N = round(2.0 * L / h)
                    trip = _dyn_errors(kernel, dim, L, N, beta, tau, t_end,
                                       4, method, refs[beta], ref_grid,
                                       solver_params=params3)
                    idx = ("e_psi", "e_phi", "e_rho").index(quantity)
                    cells.append(trip[idx])
                t.add(quantity, "ts-" + method, kernel.family, f"{L:g}",
                      f"{tau:g}", f"{t_end:g}", f"{beta:g}", *cells)
    if dst_L_scan:
        h = dst_L_scan["h"]
        for quantity in ("e_psi", "e_phi"):
            for beta in (-5.0, 5.0):
                cells = []
                for L2 in dst_L_scan["L_list"]:
                    rg2 = make_grid(dim, L2, round(2.0 * L2 / ref_h))
                    ref2 = dynamics_run(kernel, dim, L2, rg2.npoints[0],
                                        beta, tau, t_end, order=4)
                    trip = _dyn_errors(kernel, dim, L2,
                                       round(2.0 * L2 / h), beta, tau,
                                       t_end, 4, "dst", ref2, rg2)
                    idx = ("e_psi", "e_phi").index(quantity)
                    cells.append(trip[idx])
                pad = [None] * (len(h_list) - len(cells))
                t.add(quantity, "ts-dst " + _hlab(h) + " L scan "
                      + ",".join(f"{x:g}" for x in dst_L_scan["L_list"]),
                      kernel.family, "scan", f"{tau:g}", f"{t_end:g}",
                      f"{beta:g}", *cells, *pad)
    return t


def _table_13(full):
    h_list = [1.0, 0.5, 0.25, 0.125] if full else [1.0, 0.5, 0.25]
    ref_h = 0.0625 if full else 0.125
    return _dynamics_table(
        13, "3D Coulomb dynamics: errors at t = 1/8",
        KernelSpec("coulomb3d"), 3, 8.0, 1e-3, 0.125, h_list, ref_h,
        ["nufft", "dst"], full,
        notes="fourth-order splitting; errors against the same integrator "
              f"on the h={ref_h:g} grid")


def _table_14(full):
    tau = 1e-4 if full else 1e-3
    scan = {"h": 0.125, "L_list": [8, 16, 32, 64] if full else [8, 16, 32]}
    return _dynamics_table(
        14, "2D Coulomb dynamics: errors at t = 0.5",
        KernelSpec("coulomb2d"), 2, 16.0, tau, 0.5,
        [1.0, 0.5, 0.25, 0.125], 0.0625, ["nufft", "dst"], full,
        dst_L_scan=scan,
        notes="fourth-order splitting; desk-scale default runs tau=1e-3 "
              "(the saturation structure is step-size independent); --full "
              "restores tau=1e-4")


def _table_15(full):
    tau = 1e-4 if full else 1e-3
    return _dynamics_table(
        15, "2D Poisson dynamics: errors at t = 0.5",
        KernelSpec("laplace2d"), 2, 16.0, tau, 0.5,
        [1.0, 0.5, 0.25, 0.125], 0.0625, ["nufft"], full,
        notes="fourth-order splitting; desk-scale default runs tau=1e-3; "
              "--full restores tau=1e-4")


_BUILDERS = {1: _table_1, 2: _table_2, 3: _table_3, 4: _table_4,
             5: _table_5, 6: _table_6, 7: _table_7, 8: _table_8,
             9: _table_9, 10: _table_10, 11: _table_11, 12: _table_12,
             13: _table_13, 14: _table_14, 15: _table_15}


def reproduce_table(table_id, full=False):
    """Build one published table (see TABLE_IDS); 6 is the timing run."""
    try:
        builder = _BUILDERS[int(table_id)]
    except (KeyError, ValueError):
        raise ValueError(
            f"unknown table id {table_id!r}; known ids 1..15") from None
    return builder(bool(full))
