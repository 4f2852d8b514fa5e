"""Nonuniform frequency transforms between a uniform grid and scattered nodes.

Both directions are accelerated by Gaussian gridding on a twofold oversampled
fine grid (spreading msp cells each side, tolerance-controlled), with direct
slow transforms provided as the reference implementation.

Conventions (grid points x_j = -L + j h, so x_j = J h with J = j - N/2):

    u2n:  rho_hat(y_m) = prod(h_a) * sum_j f_j exp(-i y_m . x_j)
    n2u:  u(x_j)       = sum_m c_m exp(+i y_m . x_j)

Nodes must lie inside the grid band, |y_a| <= pi/h_a per axis.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.fft as sfft

from .gridding import GATHER, SPREAD, SPREAD_COMP


@dataclass
class FrequencyNodeSet:
    """Scattered frequency nodes with quadrature weights."""

    nodes: np.ndarray      # (M, d)
    weights: np.ndarray    # (M,)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        self.weights = np.asarray(self.weights, dtype=float)
        if self.nodes.shape[0] != self.weights.shape[0]:
            raise ValueError("node and weight counts differ")

    @property
    def count(self):
        return self.nodes.shape[0]

    @property
    def dim(self):
        return self.nodes.shape[1]

    def radii(self):
        return np.sqrt(np.sum(self.nodes**2, axis=1))


def spreading_width(tol):
    """Half-width in fine-grid cells of the truncated Gaussian window."""
    if not (1e-16 <= tol <= 1e-1):
        raise ValueError("tolerance must lie in [1e-16, 1e-1]")
    return int(np.clip(np.ceil(3.0 / (2.0 * np.pi) * np.log(0.1 / tol)), 4, 18))


@dataclass
class NufftPlan:
    """Precomputed geometry for repeated transforms on fixed nodes."""

    grid: object
    nodes: FrequencyNodeSet
    tol: float
    msp: int
    i0: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    table: np.ndarray
    deconv_fine: list      # per-axis factors applied on the uniform N-grid, n2u
    deconv_coarse: list    # per-axis factors applied before fft, u2n
    padded_shape: tuple
    compensated: bool = False

    def n2u(self, coeffs):
        return nufft_n2u(self, coeffs)

    def u2n(self, values):
        return nufft_u2n(self, values)


def make_plan(grid, nodes, tol=1e-14, msp=None, tau_scale=1.0, compensated=None):
    """Build a transform plan for the given grid and node set.

    ``msp`` and ``tau_scale`` override the width and variance of the
    spreading window; the defaults follow the usual Gaussian gridding
    error bound for ``tol``.  ``compensated`` selects Kahan-compensated
    spreading; by default it is on for tolerances at or below 1e-13,
    where deconvolution-amplified accumulation roundoff would otherwise
    dominate the error.
    """
    if nodes.dim != grid.dim:
        raise ValueError("node dimension does not match grid")
    msp = spreading_width(tol) if msp is None else int(msp)
    if compensated is None:
        compensated = tol <= 1.0e-13
    d = grid.dim
    M = nodes.count
    margin = msp + 2
    i0 = np.empty((M, d), dtype=np.int64)
    e1 = np.empty((M, d))
    e2 = np.empty((M, d))
    W = 2 * msp + 1
    table = np.empty((d, W))
    deconv_fine, deconv_coarse = [], []
    padded = []
    for a in range(d):
        n = grid.npoints[a]
        h = grid.spacing[a]
        mr = 2 * n
        dth = 2.0 * np.pi / mr
        tau = tau_scale * np.pi * msp / (3.0 * n * n)
        omega = nodes.nodes[:, a] * h
        if np.max(np.abs(omega)) > np.pi * (1.0 + 1e-12):
            raise ValueError(f"frequency nodes exceed the grid band on axis {a}")
        t = omega / dth
        near = np.rint(t)
        f0 = near - t
        i0[:, a] = near.astype(np.int64) + (mr // 2 + margin - msp)
        e1[:, a] = np.exp(-(dth * dth) * f0 * f0 / (4.0 * tau))
        e2[:, a] = np.exp(-(dth * dth) * f0 / (2.0 * tau))
        tp = np.arange(-msp, msp + 1)
        table[a] = np.exp(-(dth * dth) * tp * tp / (4.0 * tau))
        J = np.arange(-n // 2, n // 2)
        gauss = np.exp(J * J * tau)
        deconv_fine.append(np.sqrt(np.pi / tau) * gauss)
        deconv_coarse.append(gauss * (2.0 * np.pi / mr) * h / (2.0 * np.sqrt(np.pi * tau)))
        padded.append(mr + 2 * margin)
    return NufftPlan(grid, nodes, tol, msp, i0, e1, e2, table,
                     deconv_fine, deconv_coarse, tuple(padded), bool(compensated))


def _broadcastable(vec, axis, d):
    shape = [1] * d
    shape[axis] = len(vec)
    return vec.reshape(shape)


def _fold_margins(arr, grid, margin):
    """Fold wrap-around margins of a padded fine grid back onto the core."""
    d = grid.dim
    for a in range(d):
        mr = 2 * grid.npoints[a]
        full = [slice(None)] * d

        def sl(lo, hi):
            s = list(full)
            s[a] = slice(lo, hi)
            return tuple(s)

        arr[sl(mr, mr + margin)] += arr[sl(0, margin)]
        arr[sl(margin, 2 * margin)] += arr[sl(mr + margin, mr + 2 * margin)]
    core = tuple(slice(margin, margin + 2 * grid.npoints[a]) for a in range(d))
    return arr[core]


def nufft_n2u(plan, coeffs):
    """Evaluate u(x_j) = sum_m c_m exp(i y_m . x_j) on the grid."""
    grid = plan.grid
    d = grid.dim
    c = np.ascontiguousarray(np.asarray(coeffs, dtype=complex))
    if c.shape != (plan.nodes.count,):
        raise ValueError("coefficient count does not match plan nodes")
    margin = plan.msp + 2
    re = np.zeros(plan.padded_shape)
    im = np.zeros(plan.padded_shape)
    cr = np.ascontiguousarray(c.real)
    ci = np.ascontiguousarray(c.imag)
    if plan.compensated:
        qr = np.zeros(plan.padded_shape)
        qi = np.zeros(plan.padded_shape)
        SPREAD_COMP[d](re, im, qr, qi, cr, ci,
                       plan.i0, plan.e1, plan.e2, plan.table, plan.msp)
        re -= qr
        im -= qi
    else:
        SPREAD[d](re, im, cr, ci,
                  plan.i0, plan.e1, plan.e2, plan.table, plan.msp)
    core = _fold_margins(re, grid, margin) + 1j * _fold_margins(im, grid, margin)
    S = sfft.ifftn(sfft.ifftshift(core))
    S = sfft.fftshift(S)
    block = tuple(slice(grid.npoints[a] // 2, 3 * grid.npoints[a] // 2) for a in range(d))
    out = S[block].copy()
    for a in range(d):
        out *= _broadcastable(plan.deconv_fine[a], a, d)
    return out


def nufft_u2n(plan, values):
    """Evaluate rho_hat(y_m) = h^d sum_j f_j exp(-i y_m . x_j) at the nodes."""
    grid = plan.grid
    d = grid.dim
    f = np.asarray(values)
    if f.shape != grid.shape:
        raise ValueError("value shape does not match grid")
    b = np.asarray(f, dtype=complex).copy()
    for a in range(d):
        b *= _broadcastable(plan.deconv_coarse[a], a, d)
    centered = np.zeros(tuple(2 * n for n in grid.npoints), dtype=complex)
    block = tuple(slice(grid.npoints[a] // 2, 3 * grid.npoints[a] // 2) for a in range(d))
    centered[block] = b
    Bf = sfft.fftn(sfft.ifftshift(centered))
    Bf = sfft.fftshift(Bf)
    margin = plan.msp + 2
    Bp = np.pad(Bf, margin, mode="wrap")
    outr = np.empty(plan.nodes.count)
    outi = np.empty(plan.nodes.count)
    GATHER[d](np.ascontiguousarray(Bp.real), np.ascontiguousarray(Bp.imag),
              outr, outi, plan.i0, plan.e1, plan.e2, plan.table, plan.msp)
    return outr + 1j * outi


# ---------------------------------------------------------------------------
# direct (slow) reference transforms
# ---------------------------------------------------------------------------

def _axis_phases(grid, nodes, sign, chunk):
    for a in range(grid.dim):
        x = grid.axis_points(a)
        yield np.exp(sign * 1j * np.outer(nodes[chunk, a], x))


def nudft_direct_u2n(grid, nodes, values, chunk_size=2048):
    """Brute-force h^d sum_j f_j exp(-i y.x_j), chunked over nodes."""
    pts = nodes.nodes if isinstance(nodes, FrequencyNodeSet) else np.atleast_2d(nodes)
    f = np.asarray(values, dtype=complex)
    out = np.empty(pts.shape[0], dtype=complex)
    for lo in range(0, pts.shape[0], chunk_size):
        sel = slice(lo, min(lo + chunk_size, pts.shape[0]))
        ph = [np.exp(-1j * np.outer(pts[sel, a], grid.axis_points(a)))
              for a in range(grid.dim)]
        if grid.dim == 1:
            out[sel] = ph[0] @ f
        elif grid.dim == 2:
            out[sel] = np.einsum("ma,mb,ab->m", ph[0], ph[1], f, optimize=True)
        else:
            out[sel] = np.einsum("ma,mb,mc,abc->m", ph[0], ph[1], ph[2], f,
                                 optimize=True)
    return out * grid.cell_volume


def nudft_direct_n2u(grid, nodes, coeffs, chunk_size=2048):
    """Brute-force sum_m c_m exp(i y_m . x_j) on the grid, chunked over nodes."""
    pts = nodes.nodes if isinstance(nodes, FrequencyNodeSet) else np.atleast_2d(nodes)
    c = np.asarray(coeffs, dtype=complex)
    out = np.zeros(grid.shape, dtype=complex)
    for lo in range(0, pts.shape[0], chunk_size):
        sel = slice(lo, min(lo + chunk_size, pts.shape[0]))
        ph = [np.exp(1j * np.outer(pts[sel, a], grid.axis_points(a)))
              for a in range(grid.dim)]
        if grid.dim == 1:
            out += c[sel] @ ph[0]
        elif grid.dim == 2:
            out += np.einsum("m,ma,mb->ab", c[sel], ph[0], ph[1], optimize=True)
        else:
            out += np.einsum("m,ma,mb,mc->abc", c[sel], ph[0], ph[1], ph[2],
                             optimize=True)
    return out


# ---------------------------------------------------------------------------
# quadrature node constructors (ball rules in frequency space)
# ---------------------------------------------------------------------------

def composite_gauss_radial(radius, n_panels, q_per_panel):
    edges = np.linspace(0.0, radius, n_panels + 1)
    xs, ws = [], []
    base_x, base_w = np.polynomial.legendre.leggauss(q_per_panel)
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        xs.append(mid + half * base_x)
        ws.append(half * base_w)
    return np.concatenate(xs), np.concatenate(ws)


def build_spherical_nodes(radius, n_radial_panels, q_per_panel, n_theta, n_phi):
    """Tensor quadrature for int_0^P int_0^pi int_0^2pi (.) sin(t) d|k| dt dp.

    Radial: composite Gauss-Legendre panels.  Polar angle: Gauss-Legendre in
    cos(t), which absorbs the sin(t) factor exactly.  Azimuth: trapezoid.
    The weights sum to 4*pi*radius.
    """
    r, wr = composite_gauss_radial(radius, n_radial_panels, q_per_panel)
    ct, wt = np.polynomial.legendre.leggauss(int(n_theta))
    st = np.sqrt(np.clip(1.0 - ct * ct, 0.0, None))
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    wp = 2.0 * np.pi / n_phi
    R, CT, PH = np.meshgrid(r, ct, phi, indexing="ij")
    _, ST, _ = np.meshgrid(r, st, phi, indexing="ij")
    kx = (R * ST * np.cos(PH)).ravel()
    ky = (R * ST * np.sin(PH)).ravel()
    kz = (R * CT).ravel()
    WR, WT, _ = np.meshgrid(wr, wt, np.full(int(n_phi), wp), indexing="ij")
    w = (WR * WT * wp).ravel()
    meta = dict(kind="spherical", radius=float(radius),
                n_radial_panels=int(n_radial_panels), q_per_panel=int(q_per_panel),
                n_theta=int(n_theta), n_phi=int(n_phi))
    return FrequencyNodeSet(np.stack([kx, ky, kz], axis=1), w, meta)


def build_polar_nodes(radius, n_radial_panels, q_per_panel, n_phi):
    """Tensor quadrature for int_0^P int_0^2pi (.) d|k| dp; weights sum to 2*pi*radius."""
    r, wr = composite_gauss_radial(radius, n_radial_panels, q_per_panel)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    R, PH = np.meshgrid(r, phi, indexing="ij")
    kx = (R * np.cos(PH)).ravel()
    ky = (R * np.sin(PH)).ravel()
    w = np.repeat(wr, int(n_phi)) * (2.0 * np.pi / n_phi)
    meta = dict(kind="polar", radius=float(radius),
                n_radial_panels=int(n_radial_panels), q_per_panel=int(q_per_panel),
                n_phi=int(n_phi))
    return FrequencyNodeSet(np.stack([kx, ky], axis=1), w, meta)


def build_corner_nodes(radius, n_angular_octant, q_radial):
    """Nodes covering the four corners of [-P,P]^2 outside the inscribed disk.

    On sampled data the square is the natural integration region: the tensor
    band tiles the plane under aliasing, so completing the disk to the square
    removes the truncation error on grid points.  Weights carry the plain
    cartesian measure d^2k (the polar Jacobian is folded in here).
    """
    P = float(radius)
    xg, wg = np.polynomial.legendre.leggauss(int(q_radial))
    ag, awg = np.polynomial.legendre.leggauss(int(n_angular_octant))
    oct_w = 0.125 * np.pi
    starts = oct_w * np.arange(8)
    phi = (starts[:, None] + oct_w * 0.5 * (ag[None, :] + 1.0)).ravel()
    wphi = np.tile(awg * oct_w * 0.5, 8)
    rmax = P / np.maximum(np.abs(np.cos(phi)), np.abs(np.sin(phi)))
    half = 0.5 * (rmax - P)
    r = P + (xg[None, :] + 1.0) * half[:, None]
    w = (wg[None, :] * half[:, None]) * wphi[:, None] * r
    kx = (r * np.cos(phi)[:, None]).ravel()
    ky = (r * np.sin(phi)[:, None]).ravel()
    meta = dict(kind="corner2d", radius=P, n_angular_octant=int(n_angular_octant),
                q_radial=int(q_radial))
    return FrequencyNodeSet(np.stack([kx, ky], axis=1), w.ravel(), meta)


def merge_node_sets(a, b):
    nodes = np.concatenate([a.nodes, b.nodes], axis=0)
    weights = np.concatenate([a.weights, b.weights])
    return FrequencyNodeSet(nodes, weights, dict(kind="merged",
                                                 parts=[a.meta, b.meta]))


# ---------------------------------------------------------------------------
# automatic sizing
# ---------------------------------------------------------------------------

def density_decay_radius(values, grid, cutoff=1e-16):
    """Smallest frequency radius beyond which the density spectrum is negligible.

    Uses axis-collapsed profiles (their 1D transforms equal the full transform
    restricted to the axes) on a fourfold refined frequency grid.
    """
    f = np.asarray(values, dtype=float)
    radius = 0.0
    for a in range(grid.dim):
        other = tuple(i for i in range(grid.dim) if i != a)
        profile = f.sum(axis=other) * np.prod([grid.spacing[i] for i in other]) \
            if other else f
        n = grid.npoints[a]
        pad = np.zeros(4 * n)
        pad[:n] = profile
        spec = np.abs(np.fft.fft(pad)) * grid.spacing[a]
        k = 2.0 * np.pi * np.fft.fftfreq(4 * n, d=grid.spacing[a])
        top = np.max(spec)
        if top == 0.0:
            continue
        alive = np.abs(k)[spec >= cutoff * top]
        r = float(np.max(alive)) if alive.size else 0.0
        radius = max(radius, min(r + 2.0 * np.pi / (n * grid.spacing[a]),
                                 grid.bandwidth[a]))
    return radius if radius > 0 else min(grid.bandwidth)


def suggest_ball_rule(r_cut, phase_diag, q_per_panel=16, max_phase_per_panel=21.0):
    """Node counts for a ball rule resolving the oscillation exp(i k.x).

    r_cut: frequency radius out to which the integrand is non-negligible.
    phase_diag: largest |x|-like factor in the phase (box diagonal, with
    frequency scaling folded in for anisotropic grids).  The total phase
    budget B = r_cut * phase_diag sets the angular counts and the number of
    radial Gauss panels (about 21 radians per 16-point panel).
    """
    B = max(r_cut * phase_diag, 1.0)
    n_theta = int(np.ceil(B / 2.0)) + 8
    n_phi = 2 * (int(np.ceil(B / 2.0)) + 8)
    per_panel = max_phase_per_panel * q_per_panel / 16.0
    n_panels = max(int(np.ceil(B / per_panel)), 2)
    return dict(n_radial_panels=n_panels, q_per_panel=int(q_per_panel),
                n_theta=n_theta, n_phi=n_phi)


def suggest_corner_rule(radius, phase_diag):
    """Node counts for the square-minus-disk corner regions (2D)."""
    B = max(radius * phase_diag, 1.0)
    q_radial = int(np.ceil(0.4142 * B / 2.0)) + 8
    n_angular_octant = int(np.ceil(np.sqrt(2.0) * B * np.pi / 8.0)) + 8
    return dict(n_angular_octant=n_angular_octant, q_radial=int(q_radial))
