"""Uniform tensor-product grids and normalized spectral transforms.

Conventions
-----------
Grid points per axis: x_j = -L + j*h, j = 0..N-1, h = 2L/N (left-inclusive,
right-exclusive).  Fourier modes: k_m = pi*m/L, m = -N/2..N/2-1; the largest
representable magnitude per axis is K = pi*N/(2L).

``fft_forward`` returns centered coefficients c_m with

    f(x_j) = sum_m c_m exp(i k_m . x_j),

so c_m approximates the Fourier-series coefficient (1/|O|) int f exp(-i k.x) dx
under trapezoidal quadrature.  The continuum transform of a decaying density is
recovered as rho_hat(k_m) ~= prod(2 L_a) * c_m.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.fft as sfft


def _as_tuple(value, dim, cast):
    if np.isscalar(value):
        return (cast(value),) * dim
    out = tuple(cast(v) for v in value)
    if len(out) != dim:
        raise ValueError(f"expected {dim} per-axis values, got {len(out)}")
    return out


@dataclass(frozen=True)
class UniformGrid:
    """Tensor-product grid on the box prod_a [-L_a, L_a)."""

    dim: int
    halfwidth: tuple
    npoints: tuple

    def __post_init__(self):
        if self.dim not in (1, 2, 3):
            raise ValueError("dim must be 1, 2 or 3")
        for n in self.npoints:
            if n % 2 != 0 or n < 4:
                raise ValueError("npoints must be even and >= 4 per axis")
        for length in self.halfwidth:
            if not length > 0:
                raise ValueError("halfwidth must be positive per axis")

    @property
    def spacing(self):
        return tuple(2.0 * L / n for L, n in zip(self.halfwidth, self.npoints))

    @property
    def shape(self):
        return self.npoints

    @property
    def size(self):
        return int(np.prod(self.npoints))

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @property
    def box_volume(self):
        return float(np.prod([2.0 * L for L in self.halfwidth]))

    @property
    def bandwidth(self):
        """Largest representable |k| per axis, K_a = pi N_a / (2 L_a)."""
        return tuple(np.pi * n / (2.0 * L) for L, n in zip(self.halfwidth, self.npoints))

    def axis_points(self, axis):
        L, n = self.halfwidth[axis], self.npoints[axis]
        h = 2.0 * L / n
        return -L + h * np.arange(n)

    def axis_modes(self, axis):
        """Centered mode values k_m = pi m / L, m = -N/2..N/2-1."""
        L, n = self.halfwidth[axis], self.npoints[axis]
        return (np.pi / L) * np.arange(-n // 2, n // 2)

    @cached_property
    def meshes(self):
        axes = [self.axis_points(a) for a in range(self.dim)]
        return np.meshgrid(*axes, indexing="ij")

    @cached_property
    def mode_meshes(self):
        axes = [self.axis_modes(a) for a in range(self.dim)]
        return np.meshgrid(*axes, indexing="ij")

    @cached_property
    def mode_sq(self):
        """|k_m|^2 on the centered mode lattice."""
        out = np.zeros(self.npoints)
        for a in range(self.dim):
            k = self.axis_modes(a)
            shape = [1] * self.dim
            shape[a] = self.npoints[a]
            out = out + (k**2).reshape(shape)
        return out

    @cached_property
    def mode_sq_rfft(self):
        """|k_m|^2 in real-FFT layout (standard order, last axis halved)."""
        out = np.zeros(tuple(
            n if a < self.dim - 1 else n // 2 + 1
            for a, n in enumerate(self.npoints)))
        for a in range(self.dim):
            n, L = self.npoints[a], self.halfwidth[a]
            if a < self.dim - 1:
                k = np.pi / L * np.concatenate(
                    [np.arange(0, n // 2), np.arange(-n // 2, 0)])
            else:
                k = np.pi / L * np.arange(n // 2 + 1)
            shape = [1] * self.dim
            shape[a] = k.size
            out = out + (k**2).reshape(shape)
        return out

    @cached_property
    def radius_meshes(self):
        r2 = np.zeros(self.npoints)
        for x in self.meshes:
            r2 = r2 + x**2
        return np.sqrt(r2)

    def interior_shape(self):
        return tuple(n - 1 for n in self.npoints)

    @cached_property
    def sine_eigenvalues(self):
        """Eigenvalues of -Laplace for the interior sine basis, summed over axes."""
        out = np.zeros(self.interior_shape())
        for a in range(self.dim):
            m = np.arange(1, self.npoints[a])
            lam = (np.pi * m / (2.0 * self.halfwidth[a])) ** 2
            shape = [1] * self.dim
            shape[a] = self.npoints[a] - 1
            out = out + lam.reshape(shape)
        return out


def make_grid(dim, halfwidths, npoints) -> UniformGrid:
    dim = int(dim)
    return UniformGrid(dim, _as_tuple(halfwidths, dim, float), _as_tuple(npoints, dim, int))


@dataclass
class ScalarField:
    """Samples of a scalar function on a UniformGrid."""

    grid: UniformGrid
    values: np.ndarray
    kind: str = "density"

    _KINDS = ("density", "potential", "wavefunction")

    def __post_init__(self):
        self.values = np.asarray(self.values)
        if self.kind not in self._KINDS:
            raise ValueError(f"kind must be one of {self._KINDS}")
        if self.values.shape != self.grid.shape:
            raise ValueError(
                f"value shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if self.kind == "density":
            if np.iscomplexobj(self.values):
                raise ValueError("density fields must be real")
            vmax = float(np.max(self.values)) if self.values.size else 0.0
            if vmax > 0 and float(np.min(self.values)) < -1e-12 * vmax:
                raise ValueError("density fields must be nonnegative up to roundoff")


def values_of(field):
    """Accept either a ScalarField or a bare array."""
    return field.values if isinstance(field, ScalarField) else np.asarray(field)


# ---------------------------------------------------------------------------
# periodic transforms (centered convention)
# ---------------------------------------------------------------------------

def fft_forward(field, grid=None):
    """Centered Fourier coefficients c_m with f = sum c_m exp(i k_m . x)."""
    f = values_of(field)
    if isinstance(field, ScalarField):
        grid = field.grid
    if grid is not None and f.shape != grid.shape:
        raise ValueError("field shape does not match grid")
    c = sfft.fftshift(sfft.fftn(sfft.ifftshift(f)))
    return c / f.size


def fft_backward(coeffs, grid=None):
    c = np.asarray(coeffs)
    if grid is not None and c.shape != grid.shape:
        raise ValueError("coefficient shape does not match grid")
    return sfft.fftshift(sfft.ifftn(sfft.ifftshift(c))) * c.size


def density_transform(field, grid):
    """Continuum-normalized transform rho_hat(k_m) ~= h^d sum rho exp(-i k.x)."""
    return fft_forward(field, grid) * grid.box_volume


def spectral_gradient(field, grid=None):
    """Per-axis derivatives by i*k_m multipliers; Nyquist mode zeroed."""
    f = values_of(field)
    if isinstance(field, ScalarField):
        grid = field.grid
    if grid is None:
        raise ValueError("grid required")
    c = fft_forward(f, grid)
    out = []
    for a in range(grid.dim):
        k = grid.axis_modes(a).copy()
        k[0] = 0.0  # unpaired Nyquist mode carries no odd-derivative information
        shape = [1] * grid.dim
        shape[a] = grid.npoints[a]
        out.append(fft_backward(c * (1j * k.reshape(shape)), grid))
    return out


# ---------------------------------------------------------------------------
# sine transforms on interior points (homogeneous Dirichlet)
# ---------------------------------------------------------------------------

def dst_forward(interior_values, grid):
    """Sine coefficients b_m with g(x_j) = sum_m b_m prod_a sin(pi m_a (x_a+L_a)/(2 L_a)).

    Input holds the N_a - 1 interior samples per axis (j = 1..N-1).
    """
    g = np.asarray(interior_values)
    if g.shape != grid.interior_shape():
        raise ValueError("expected interior samples of shape " + str(grid.interior_shape()))
    return sfft.dstn(g, type=1) / float(np.prod(grid.npoints))


def dst_backward(coeffs, grid):
    b = np.asarray(coeffs)
    if b.shape != grid.interior_shape():
        raise ValueError("expected coefficients of shape " + str(grid.interior_shape()))
    return sfft.dstn(b, type=1) / (2.0 ** grid.dim)


def embed_interior(interior_values, grid):
    """Place interior samples into a full grid array with zeros on the j=0 ring."""
    full = np.zeros(grid.shape, dtype=np.asarray(interior_values).dtype)
    full[tuple(slice(1, None) for _ in range(grid.dim))] = interior_values
    return full


def extract_interior(full_values, grid):
    return np.asarray(full_values)[tuple(slice(1, None) for _ in range(grid.dim))]


# ---------------------------------------------------------------------------
# resampling between grids (used by the ground-state continuation ladder)
# ---------------------------------------------------------------------------

def fourier_upsample(values, grid, fine_grid):
    """Zero-padded spectral interpolation onto a finer grid with the same box."""
    if tuple(grid.halfwidth) != tuple(fine_grid.halfwidth):
        raise ValueError("grids must share the same box")
    c = fft_forward(np.asarray(values), grid)
    pad = np.zeros(fine_grid.shape, dtype=complex)
    sl = []
    for a in range(grid.dim):
        n, nf = grid.npoints[a], fine_grid.npoints[a]
        if nf < n:
            raise ValueError("target grid must be at least as fine")
        lo = (nf - n) // 2
        sl.append(slice(lo, lo + n))
    pad[tuple(sl)] = c
    out = fft_backward(pad, fine_grid)
    if not np.iscomplexobj(values):
        out = out.real
    return out
