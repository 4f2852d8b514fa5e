"""Interaction kernels: Fourier symbols, screened near fields, and the
smooth/singular frequency splitting used by the lattice fast path.

Families
--------
coulomb3d   1/(4 pi |x|)            symbol 1/|k|^2          (3D)
coulomb2d   1/(2 pi |x|)            symbol 1/|k|            (2D)
laplace3d   1/(4 pi |x|)            symbol 1/|k|^2          (3D, same as coulomb3d)
laplace2d   -(1/2 pi) ln|x|         symbol 1/|k|^2          (2D)
laplace1d   -|x|/2                  symbol 1/k^2            (1D)
confined2d  transverse-averaged 3D Coulomb, symbol W1(|k|)/|k|
confined1d  doubly-averaged 3D Coulomb, assembled from W2 and W3

The confined symbols are defined by semi-infinite integrals and evaluated by
adaptive quadrature; closed forms in terms of scaled erfc / E1 are kept
alongside as independent checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import specfun as sf

FAMILIES = ("coulomb3d", "coulomb2d", "laplace3d", "laplace2d", "laplace1d",
            "confined2d", "confined1d")

_DIMS = {"coulomb3d": 3, "laplace3d": 3, "coulomb2d": 2, "laplace2d": 2,
         "confined2d": 2, "laplace1d": 1, "confined1d": 1}

# Screening width for the moment-deflated log/linear kernels, as a multiple of
# 1/P where P is the frequency ball radius: sigma = SCREEN_FACTOR / P leaves a
# truncated Gaussian tail below 1e-15 at |k| = P.
SCREEN_FACTOR = 8.5


@dataclass(frozen=True)
class KernelSpec:
    family: str
    epsilon: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown kernel family {self.family!r}")
        if self.family.startswith("confined"):
            if self.epsilon is None or not self.epsilon > 0:
                raise ValueError(f"kernel {self.family} requires epsilon > 0")
        elif self.epsilon is not None:
            raise ValueError(f"kernel {self.family} takes no epsilon")

    @property
    def dim(self):
        return _DIMS[self.family]

    @property
    def singular_power(self):
        """p with symbol ~ 1/|k|^p near the origin."""
        return 1 if self.family in ("coulomb2d", "confined2d") else 2


def fourier_symbol(kernel, ksq):
    """Pointwise symbol U_hat(|k|) given |k|^2; infinite at k = 0 where singular."""
    ksq = np.asarray(ksq, dtype=float)
    fam = kernel.family
    with np.errstate(divide="ignore"):
        if fam in ("coulomb3d", "laplace3d", "laplace2d", "laplace1d"):
            return 1.0 / ksq
        if fam == "coulomb2d":
            return 1.0 / np.sqrt(ksq)
        if fam == "confined2d":
            k = np.sqrt(ksq)
            return confined_w1(k, kernel.epsilon) / k
    raise ValueError(f"no pointwise symbol for {fam}")


def radial_symbol(kernel, r):
    """Symbol times the radial Jacobian |k|^(d-1), as used by ball quadrature.

    Finite everywhere, including r = 0.
    """
    r = np.asarray(r, dtype=float)
    fam = kernel.family
    if fam in ("coulomb3d", "laplace3d", "coulomb2d"):
        return np.ones_like(r)
    if fam == "confined2d":
        return confined_w1(r, kernel.epsilon)
    raise ValueError(f"no ball-quadrature symbol for {fam}")


# ---------------------------------------------------------------------------
# confined (dimension-reduced) symbols
# ---------------------------------------------------------------------------

def _per_unique(k, func):
    k = np.asarray(k, dtype=float)
    flat = np.abs(k).ravel()
    uniq, inv = np.unique(flat, return_inverse=True)
    vals = np.array([func(u) for u in uniq])
    out = vals[inv].reshape(np.shape(k))
    return out if np.ndim(k) else float(out)


def confined_w1(k, eps, tol=1e-13):
    """W1(k) = (2/pi) int_0^inf exp(-eps^2 k^2 t^2 / 2) / (1+t^2) dt."""
    def one(kv):
        c = 0.5 * (eps * kv) ** 2

        def f(t):
            return (2.0 / np.pi) * np.exp(-c * t * t) / (1.0 + t * t)

        return sf.adaptive_gk15(f, 0.0, np.inf, tol=tol)

    return _per_unique(k, one)


def confined_w1_closed(k, eps):
    """Closed form W1(k) = erfcx(sqrt(b)), b = eps^2 k^2 / 2."""
    b = 0.5 * (eps * np.asarray(k, dtype=float)) ** 2
    return sf.erfcx(np.sqrt(b))


def confined_w2(k, eps, tol=1e-13):
    """W2(k) = int_0^inf exp(-eps^2 k^2 s / 2) / (1+s)^2 ds."""
    def one(kv):
        a = 0.5 * (eps * kv) ** 2

        def f(s):
            return np.exp(-a * s) / (1.0 + s) ** 2

        return sf.adaptive_gk15(f, 0.0, np.inf, tol=tol)

    return _per_unique(k, one)


def confined_w2_closed(k, eps):
    """Closed form W2 = 1 - a e^a E1(a), a = eps^2 k^2 / 2; W2(0) = 1."""
    a = 0.5 * (eps * np.asarray(k, dtype=float)) ** 2
    with np.errstate(invalid="ignore"):
        out = 1.0 - a * sf.exp_e1_scaled(a)
    out = np.where(a == 0.0, 1.0, out)
    return out if np.ndim(k) else float(out)


def confined_w3(k, eps, tol=1e-13):
    """W3(k) = (k/2) int_0^inf exp(-eps^2 k^2 s / 2) / (1+s) ds."""
    def one(kv):
        if kv == 0.0:
            return 0.0
        a = 0.5 * (eps * kv) ** 2

        def f(s):
            return np.exp(-a * s) / (1.0 + s)

        return 0.5 * kv * sf.adaptive_gk15(f, 0.0, np.inf, tol=tol)

    sign = np.sign(np.asarray(k, dtype=float))
    out = _per_unique(k, one) * sign
    return out if np.ndim(k) else float(out)


def confined_w3_closed(k, eps):
    """Closed form W3 = (k/2) e^a E1(a), a = eps^2 k^2 / 2; odd in k."""
    k = np.asarray(k, dtype=float)
    a = 0.5 * (eps * k) ** 2
    with np.errstate(invalid="ignore"):
        out = 0.5 * k * sf.exp_e1_scaled(a)
    return np.where(k == 0.0, 0.0, out)


# ---------------------------------------------------------------------------
# screened near fields for the moment-deflated log / linear kernels
# ---------------------------------------------------------------------------

def gaussian_screen(ksq, sigma):
    """Fourier transform exp(-sigma^2 |k|^2 / 2) of the screening Gaussian."""
    return np.exp(-0.5 * sigma * sigma * np.asarray(ksq, dtype=float))


def screened_log_kernel(r, sigma):
    """(U_2D * G_sigma)(x) for U_2D = -(1/2 pi) ln|x|; finite at r = 0."""
    r = np.asarray(r, dtype=float)
    z = r * r / (2.0 * sigma * sigma)
    out = np.empty_like(r)
    pos = z > 0
    out[pos] = -(sf.exp_e1(z[pos]) + 2.0 * np.log(r[pos])) / (4.0 * np.pi)
    out[~pos] = (sf.euler_gamma - np.log(2.0 * sigma * sigma)) / (4.0 * np.pi)
    return out


def screened_log_gradient_kernel(r, sigma):
    """Radial profile g(r) with the first-moment kernel (x/r) g(r); g(0) = 0.

    g(r) = -(1 - exp(-r^2 / 2 sigma^2)) / (2 pi r).
    """
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    pos = r > 0
    rp = r[pos]
    out[pos] = -(-np.expm1(-rp * rp / (2.0 * sigma * sigma))) / (2.0 * np.pi * rp)
    return out


def screened_linear_kernel(x, sigma):
    """(U_1D * G_sigma)(x) for U_1D = -|x|/2."""
    x = np.asarray(x, dtype=float)
    s2 = sigma * np.sqrt(2.0)
    return -(sigma / np.sqrt(2.0 * np.pi)) * np.exp(-x * x / (2.0 * sigma * sigma)) \
        - 0.5 * x * sf.erf(x / s2)


def screened_linear_gradient_kernel(x, sigma):
    """First-moment kernel for the 1D linear potential: -(1/2) erf(x / sigma sqrt(2))."""
    return -0.5 * sf.erf(np.asarray(x, dtype=float) / (sigma * np.sqrt(2.0)))


# ---------------------------------------------------------------------------
# smooth/singular frequency splitting (lattice fast path)
# ---------------------------------------------------------------------------

def split_scale(band_radius):
    """Gaussian partition scale delta = P/6: the singular patch exp(-|k|^2/delta^2)
    falls below 1e-15 at the band edge |k| = P."""
    return band_radius / 6.0


def regular_symbol(family, kvecs_sq, delta):
    """(1 - exp(-|k|^2/delta^2)) * U_hat(k), continuous at k = 0."""
    ksq = np.asarray(kvecs_sq, dtype=float)
    if family in ("coulomb3d", "laplace3d"):
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -np.expm1(-ksq / delta**2) / ksq
        return np.where(ksq == 0.0, 1.0 / delta**2, out)
    if family == "coulomb2d":
        k = np.sqrt(ksq)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -np.expm1(-ksq / delta**2) / k
        return np.where(k == 0.0, 0.0, out)
    raise ValueError(f"no frequency splitting for {family}")


def patch_kernel(family, r, delta):
    """Inverse transform of exp(-|k|^2/delta^2) * U_hat(k); smooth and even.

    coulomb3d / laplace3d: erf(delta r / 2) / (4 pi r)
    coulomb2d:             (delta / 4 sqrt(pi)) e^{-z} I0(z), z = delta^2 r^2 / 8
    """
    r = np.asarray(r, dtype=float)
    if family in ("coulomb3d", "laplace3d"):
        out = np.empty_like(r)
        pos = r > 0
        out[pos] = sf.erf(0.5 * delta * r[pos]) / (4.0 * np.pi * r[pos])
        out[~pos] = delta / (4.0 * np.pi**1.5)
        return out
    if family == "coulomb2d":
        z = delta * delta * r * r / 8.0
        return (delta / (4.0 * np.sqrt(np.pi))) * sf.bessel_i0e(z)
    raise ValueError(f"no frequency splitting for {family}")
