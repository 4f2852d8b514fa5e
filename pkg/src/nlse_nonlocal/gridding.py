"""Gaussian spreading and interpolation kernels for the nonuniform transforms.

These are the hot inner loops: scattering node strengths onto an oversampled
fine grid and gathering fine-grid values back at nodes, with a truncated
Gaussian window.  The per-node window weights are built by the standard
fast-Gaussian-gridding factorization

    w(t) = E1 * E2**t * E3[t],   t = -msp..msp,

so each node costs one pow and O(msp) multiplies per axis instead of O(msp)
exponentials.  The fine grids carry wrap-free margins; periodic folding is
done afterwards with vectorized slab adds in the caller.

The ``*_comp`` spread variants use Kahan-compensated accumulation.  Each fine
cell receives thousands of sequential adds, and the resulting roundoff is
amplified by the output-side deconvolution near the box edge; compensation
keeps it at a few ulp, which matters for tolerances at the 1e-14 level.
They must not use fastmath, or the compensation term would be optimized away.
"""

from __future__ import annotations

import numpy as np
from numba import njit

_JIT = dict(cache=True, fastmath=True, nogil=True)


@njit(**_JIT)
def _window(e1, e2, table, msp, out):
    p = e2 ** (-msp)
    for t in range(2 * msp + 1):
        out[t] = e1 * p * table[t]
        p *= e2


@njit(**_JIT)
def spread_1d(re, im, cr, ci, i0, e1, e2, table, msp):
    w = np.empty(2 * msp + 1)
    for m in range(cr.shape[0]):
        _window(e1[m, 0], e2[m, 0], table[0], msp, w)
        a = i0[m, 0]
        gr, gi = cr[m], ci[m]
        for t in range(2 * msp + 1):
            re[a + t] += gr * w[t]
            im[a + t] += gi * w[t]


@njit(**_JIT)
def spread_2d(re, im, cr, ci, i0, e1, e2, table, msp):
    W = 2 * msp + 1
    wx = np.empty(W)
    wy = np.empty(W)
    for m in range(cr.shape[0]):
        _window(e1[m, 0], e2[m, 0], table[0], msp, wx)
        _window(e1[m, 1], e2[m, 1], table[1], msp, wy)
        a, b = i0[m, 0], i0[m, 1]
        gr, gi = cr[m], ci[m]
        for tx in range(W):
            fr = gr * wx[tx]
            fi = gi * wx[tx]
            for ty in range(W):
                re[a + tx, b + ty] += fr * wy[ty]
                im[a + tx, b + ty] += fi * wy[ty]


@njit(**_JIT)
def spread_3d(re, im, cr, ci, i0, e1, e2, table, msp):
    W = 2 * msp + 1
    wx = np.empty(W)
    wy = np.empty(W)
    wz = np.empty(W)
    for m in range(cr.shape[0]):
        _window(e1[m, 0], e2[m, 0], table[0], msp, wx)
        _window(e1[m, 1], e2[m, 1], table[1], msp, wy)
        _window(e1[m, 2], e2[m, 2], table[2], msp, wz)
        a, b, c = i0[m, 0], i0[m, 1], i0[m, 2]
        gr, gi = cr[m], ci[m]
        for tx in range(W):
            pr = gr * wx[tx]
            pi = gi * wx[tx]
            for ty in range(W):
                fr = pr * wy[ty]
                fi = pi * wy[ty]
                for tz in range(W):
                    re[a + tx, b + ty, c + tz] += fr * wz[tz]
                    im[a + tx, b + ty, c + tz] += fi * wz[tz]


@njit(**_JIT)
def gather_1d(re, im, outr, outi, i0, e1, e2, table, msp):
    w = np.empty(2 * msp + 1)
    for m in range(outr.shape[0]):
        _window(e1[m, 0], e2[m, 0], table[0], msp, w)
        a = i0[m, 0]
        sr = 0.0
        si = 0.0
        for t in range(2 * msp + 1):
            sr += re[a + t] * w[t]
            si += im[a + t] * w[t]
        outr[m] = sr
        outi[m] = si


@njit(**_JIT)
def gather_2d(re, im, outr, outi, i0, e1, e2, table, msp):
    W = 2 * msp + 1
    wx = np.empty(W)
    wy = np.empty(W)
    for m in range(outr.shape[0]):
        _window(e1[m, 0], e2[m, 0], table[0], msp, wx)
        _window(e1[m, 1], e2[m, 1], table[1], msp, wy)
        a, b = i0[m, 0], i0[m, 1]
        sr = 0.0
        si = 0.0
        for tx in range(W):
            rr = 0.0
            ri = 0.0
            for ty in range(W):
                rr += re[a + tx, b + ty] * wy[ty]
                ri += im[a + tx, b + ty] * wy[ty]
            sr += rr * wx[tx]
            si += ri * wx[tx]
        outr[m] = sr
        outi[m] = si


@njit(**_JIT)
def gather_3d(re, im, outr, outi, i0, e1, e2, table, msp):
    W = 2 * msp + 1
    wx = np.empty(W)
    wy = np.empty(W)
    wz = np.empty(W)
    for m in range(outr.shape[0]):
        _window(e1[m, 0], e2[m, 0], table[0], msp, wx)
        _window(e1[m, 1], e2[m, 1], table[1], msp, wy)
        _window(e1[m, 2], e2[m, 2], table[2], msp, wz)
        a, b, c = i0[m, 0], i0[m, 1], i0[m, 2]
        sr = 0.0
        si = 0.0
        for tx in range(W):
            pr = 0.0
            pi = 0.0
            for ty in range(W):
                rr = 0.0
                ri = 0.0
                for tz in range(W):
                    rr += re[a + tx, b + ty, c + tz] * wz[tz]
                    ri += im[a + tx, b + ty, c + tz] * wz[tz]
                pr += rr * wy[ty]
                pi += ri * wy[ty]
            sr += pr * wx[tx]
            si += pi * wx[tx]
        outr[m] = sr
        outi[m] = si


_JIT_EXACT = dict(cache=True, fastmath=False, nogil=True)


@njit(**_JIT_EXACT)
def spread_1d_comp(re, im, qr, qi, cr, ci, i0, e1, e2, table, msp):
    w = np.empty(2 * msp + 1)
    for m in range(cr.shape[0]):
        _window(e1[m, 0], e2[m, 0], table[0], msp, w)
        a = i0[m, 0]
        gr, gi = cr[m], ci[m]
        for t in range(2 * msp + 1):
            v = gr * w[t]
            y = v - qr[a + t]
            s = re[a + t] + y
            qr[a + t] = (s - re[a + t]) - y
            re[a + t] = s
            v = gi * w[t]
            y = v - qi[a + t]
            s = im[a + t] + y
            qi[a + t] = (s - im[a + t]) - y
            im[a + t] = s


@njit(**_JIT_EXACT)
def spread_2d_comp(re, im, qr, qi, cr, ci, i0, e1, e2, table, msp):
    W = 2 * msp + 1
    wx = np.empty(W)
    wy = np.empty(W)
    for m in range(cr.shape[0]):
        _window(e1[m, 0], e2[m, 0], table[0], msp, wx)
        _window(e1[m, 1], e2[m, 1], table[1], msp, wy)
        a, b = i0[m, 0], i0[m, 1]
        gr, gi = cr[m], ci[m]
        for tx in range(W):
            fr = gr * wx[tx]
            fi = gi * wx[tx]
            for ty in range(W):
                v = fr * wy[ty]
                y = v - qr[a + tx, b + ty]
                s = re[a + tx, b + ty] + y
                qr[a + tx, b + ty] = (s - re[a + tx, b + ty]) - y
                re[a + tx, b + ty] = s
                v = fi * wy[ty]
                y = v - qi[a + tx, b + ty]
                s = im[a + tx, b + ty] + y
                qi[a + tx, b + ty] = (s - im[a + tx, b + ty]) - y
                im[a + tx, b + ty] = s


@njit(**_JIT_EXACT)
def spread_3d_comp(re, im, qr, qi, cr, ci, i0, e1, e2, table, msp):
    W = 2 * msp + 1
    wx = np.empty(W)
    wy = np.empty(W)
    wz = np.empty(W)
    for m in range(cr.shape[0]):
        _window(e1[m, 0], e2[m, 0], table[0], msp, wx)
        _window(e1[m, 1], e2[m, 1], table[1], msp, wy)
        _window(e1[m, 2], e2[m, 2], table[2], msp, wz)
        a, b, c = i0[m, 0], i0[m, 1], i0[m, 2]
        gr, gi = cr[m], ci[m]
        for tx in range(W):
            pr = gr * wx[tx]
            pi = gi * wx[tx]
            for ty in range(W):
                fr = pr * wy[ty]
                fi = pi * wy[ty]
                for tz in range(W):
                    v = fr * wz[tz]
                    y = v - qr[a + tx, b + ty, c + tz]
                    s = re[a + tx, b + ty, c + tz] + y
                    qr[a + tx, b + ty, c + tz] = (s - re[a + tx, b + ty, c + tz]) - y
                    re[a + tx, b + ty, c + tz] = s
                    v = fi * wz[tz]
                    y = v - qi[a + tx, b + ty, c + tz]
                    s = im[a + tx, b + ty, c + tz] + y
                    qi[a + tx, b + ty, c + tz] = (s - im[a + tx, b + ty, c + tz]) - y
                    im[a + tx, b + ty, c + tz] = s


SPREAD = {1: spread_1d, 2: spread_2d, 3: spread_3d}
SPREAD_COMP = {1: spread_1d_comp, 2: spread_2d_comp, 3: spread_3d_comp}
GATHER = {1: gather_1d, 2: gather_2d, 3: gather_3d}
