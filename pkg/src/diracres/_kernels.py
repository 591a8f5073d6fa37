"""Compiled inner loops (transfer products and exponential sums)."""

import os

import numba
import numpy as np

numba.config.THREADING_LAYER = "workqueue"

_threads = os.environ.get("DIRAC_RES_THREADS")
if _threads:
    numba.set_num_threads(max(1, min(int(_threads), numba.config.NUMBA_NUM_THREADS)))

# fast-math without the no-NaN/no-Inf assumptions, so overflow checks survive
_FASTMATH = {"nsz", "arcp", "contract", "afn", "reassoc"}

# Series branch for cosh(x), sinh(x)/x in w = x**2; nine terms give < 1e-17 for |w| < 0.25.
_SERIES_W = 0.25


@numba.njit(cache=True, fastmath=_FASTMATH)
def _cell_coeffs(lam2, d):
    """Return cosh(lam d) and sinh(lam d)/lam for lam**2 = lam2."""
    w = lam2 * d * d
    if abs(w) < _SERIES_W:
        c = 1.0 + w * (1 / 2 + w * (1 / 24 + w * (1 / 720 + w * (1 / 40320 + w * (
            1 / 3628800 + w * (1 / 479001600 + w * (1 / 87178291200 + w / 20922789888000)))))))
        s = 1.0 + w * (1 / 6 + w * (1 / 120 + w * (1 / 5040 + w * (1 / 362880 + w * (
            1 / 39916800 + w * (1 / 6227020800 + w * (1 / 1307674368000 + w / 355687428096000)))))))
        return c, s * d
    lam = np.sqrt(lam2)
    return np.cosh(lam * d), np.sinh(lam * d) / lam


@numba.njit(cache=True, fastmath=_FASTMATH)
def _cell_coeffs_dw(lam2, d):
    """Derivatives of cosh(lam d) and sinh(lam d)/lam with respect to lam**2."""
    w = lam2 * d * d
    if abs(w) < _SERIES_W:
        # d/dw of the series above, rescaled by d**2 (chain rule for lam2)
        dc = (1 / 2 + w * (2 / 24 + w * (3 / 720 + w * (4 / 40320 + w * (
            5 / 3628800 + w * (6 / 479001600 + w * (7 / 87178291200 + 8 * w / 20922789888000)))))))
        ds = (1 / 6 + w * (2 / 120 + w * (3 / 5040 + w * (4 / 362880 + w * (
            5 / 39916800 + w * (6 / 6227020800 + w * (7 / 1307674368000 + 8 * w / 355687428096000)))))))
        return dc * d * d, ds * d * d * d
    lam = np.sqrt(lam2)
    c = np.cosh(lam * d)
    s = np.sinh(lam * d) / lam
    return 0.5 * d * s, (d * c - s) / (2.0 * lam2)


@numba.njit(cache=True, fastmath=_FASTMATH)
def _first_column(q, d, z, u1, u2):
    """Backward-propagate the first Jost column from x = gamma to x = 0.

    Returns -1 on success, otherwise the index of the first cell where the
    iterate stopped being finite.
    """
    n = q.size
    gamma = d * n
    z2 = z * z
    a = np.exp(1j * z * gamma)
    b = 0.0j
    for j in range(n - 1, -1, -1):
        qj = q[j]
        c, s = _cell_coeffs(qj.real * qj.real + qj.imag * qj.imag - z2, d)
        isz = s * 1j * z
        na = (c - isz) * a - s * qj * b
        nb = -s * np.conj(qj) * a + (c + isz) * b
        a = na
        b = nb
        if not (np.isfinite(a.real) and np.isfinite(a.imag) and np.isfinite(b.real) and np.isfinite(b.imag)):
            u1[0] = a
            u2[0] = b
            return j
    u1[0] = a
    u2[0] = b
    return -1


@numba.njit(cache=True, parallel=True)
def jost_function_many(q, d, z):
    """psi(z) = f11(0, z) - f21(0, z) for every entry of ``z``.

    The second return value holds, per point, the failing cell (-1 if none).
    """
    out = np.empty(z.size, np.complex128)
    bad = np.empty(z.size, np.int64)
    for i in numba.prange(z.size):
        u1 = np.empty(1, np.complex128)
        u2 = np.empty(1, np.complex128)
        bad[i] = _first_column(q, d, z[i], u1, u2)
        out[i] = u1[0] - u2[0]
        if bad[i] < 0 and not (np.isfinite(out[i].real) and np.isfinite(out[i].imag)):
            bad[i] = 0
    return out, bad


@numba.njit(cache=True, fastmath=_FASTMATH)
def jost_matrix_one(q, d, z):
    """Full 2x2 matrix f(0, z) and the failing cell index (-1 if finite)."""
    n = q.size
    gamma = d * n
    z2 = z * z
    f = np.zeros((2, 2), np.complex128)
    f[0, 0] = np.exp(1j * z * gamma)
    f[1, 1] = np.exp(-1j * z * gamma)
    for j in range(n - 1, -1, -1):
        qj = q[j]
        c, s = _cell_coeffs(qj.real * qj.real + qj.imag * qj.imag - z2, d)
        isz = s * 1j * z
        p00 = c - isz
        p01 = -s * qj
        p10 = -s * np.conj(qj)
        p11 = c + isz
        for col in range(2):
            a = f[0, col]
            b = f[1, col]
            f[0, col] = p00 * a + p01 * b
            f[1, col] = p10 * a + p11 * b
        ok = True
        for r in range(2):
            for col in range(2):
                if not (np.isfinite(f[r, col].real) and np.isfinite(f[r, col].imag)):
                    ok = False
        if not ok:
            return f, j
    return f, -1


@numba.njit(cache=True, parallel=True)
def jost_sensitivities(q, d, z):
    """psi on ``z`` and its derivatives with respect to Re q_j and Im q_j.

    Uses prefix/suffix products of the per-cell propagators:
    psi = e^T P_0 ... P_{n-1} v with e = (1, -1) and v = (e^{iz gamma}, 0).
    """
    n = q.size
    m = z.size
    gamma = d * n
    psi = np.empty(m, np.complex128)
    d_re = np.empty((n, m), np.complex128)
    d_im = np.empty((n, m), np.complex128)
    for i in numba.prange(m):
        zi = z[i]
        z2 = zi * zi
        # right vectors R_j = P_{j+1} ... P_{n-1} v, stored for every j
        ra = np.empty(n, np.complex128)
        rb = np.empty(n, np.complex128)
        a = np.exp(1j * zi * gamma)
        b = 0.0j
        for j in range(n - 1, -1, -1):
            ra[j] = a
            rb[j] = b
            qj = q[j]
            c, s = _cell_coeffs(qj.real * qj.real + qj.imag * qj.imag - z2, d)
            isz = s * 1j * zi
            na = (c - isz) * a - s * qj * b
            nb = -s * np.conj(qj) * a + (c + isz) * b
            a = na
            b = nb
        psi[i] = a - b
        # left row vectors L_j = e^T P_0 ... P_{j-1}
        la = 1.0 + 0.0j
        lb = -1.0 + 0.0j
        for j in range(n):
            qj = q[j]
            lam2 = qj.real * qj.real + qj.imag * qj.imag - z2
            c, s = _cell_coeffs(lam2, d)
            dc, ds = _cell_coeffs_dw(lam2, d)
            isz = s * 1j * zi
            # dP = dc I - ds A - s dA, with dlam2/dRe q = 2 Re q, dlam2/dIm q = 2 Im q
            for which in range(2):
                if which == 0:
                    dl = 2.0 * qj.real
                    e01 = 1.0 + 0.0j
                    e10 = 1.0 + 0.0j
                else:
                    dl = 2.0 * qj.imag
                    e01 = 1.0j
                    e10 = -1.0j
                dcc = dc * dl
                dss = ds * dl
                p00 = dcc - dss * 1j * zi
                p01 = -dss * qj - s * e01
                p10 = -dss * np.conj(qj) - s * e10
                p11 = dcc + dss * 1j * zi
                va = p00 * ra[j] + p01 * rb[j]
                vb = p10 * ra[j] + p11 * rb[j]
                val = la * va + lb * vb
                if which == 0:
                    d_re[j, i] = val
                else:
                    d_im[j, i] = val
            p00 = c - isz
            p01 = -s * qj
            p10 = -s * np.conj(qj)
            p11 = c + isz
            nla = la * p00 + lb * p10
            nlb = la * p01 + lb * p11
            la = nla
            lb = nlb
    return psi, d_re, d_im


@numba.njit(cache=True, parallel=True)
def exp_sums(g, h, w):
    """S0 = sum_m g_m e^{w m h} and S1 = sum_m m g_m e^{w m h} by Horner's rule."""
    m = w.size
    n = g.size
    s0 = np.empty(m, np.complex128)
    s1 = np.empty(m, np.complex128)
    for i in numba.prange(m):
        r = np.exp(w[i] * h)
        a = 0.0j
        b = 0.0j
        for j in range(n - 1, -1, -1):
            a = a * r + g[j]
            b = b * r + j * g[j]
        s0[i] = a
        s1[i] = b
    return s0, s1
