"""Forward problem: Jost solution, Jost function, profile and scattering matrix."""

from dataclasses import dataclass

import numpy as np
from scipy.signal import czt
from scipy.signal.windows import hann

from . import _kernels
from .exceptions import (DivisionError, RangeOverflowError, ResolutionError, UndersampledError,
                         ValidationError)
from .jost import JostFunction, profile_l1, profile_l2

LEAK_TOL = 1e-3
S_FLOOR = 1e-12


@dataclass(frozen=True)
class JostMatrix:
    """Value of the 2x2 Jost solution f(0, z)."""

    entries: np.ndarray
    z: complex

    @property
    def det(self):
        e = self.entries
        return e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0]

    @property
    def psi(self):
        return self.entries[0, 0] - self.entries[1, 0]


def _as_z(z):
    z = np.asarray(z, dtype=np.complex128)
    if not np.all(np.isfinite(z)):
        raise ValidationError("spectral parameter must be finite")
    return z


def jost_solution(q, z):
    """f(0, z) by backward propagation of exact per-cell exponentials from x = gamma."""
    z = complex(_as_z(z))
    entries, bad = _kernels.jost_matrix_one(q.samples, q.step, z)
    if bad >= 0:
        raise RangeOverflowError(f"non-finite Jost solution in cell {bad} at z = {z}", cell=int(bad))
    return JostMatrix(entries, z)


def jost_function(q, z):
    """psi(z) = f11(0, z) - f21(0, z) for scalar or array ``z``."""
    z = _as_z(z)
    flat = np.ascontiguousarray(z.ravel())
    psi, bad = _kernels.jost_function_many(q.samples, q.step, flat)
    if np.any(bad >= 0):
        i = int(np.argmax(bad >= 0))
        raise RangeOverflowError(
            f"non-finite Jost function in cell {bad[i]} at z = {flat[i]}", cell=int(bad[i]))
    psi = psi.reshape(z.shape)
    return psi[()] if psi.ndim == 0 else psi


def k_grid(k_max, n_k):
    """Uniform grid on [-k_max, k_max) with ``n_k`` points."""
    return -k_max + np.arange(n_k) * (2.0 * k_max / n_k)


def _check_grid(k_max, n_k):
    if not k_max > 0:
        raise ValidationError("k_max must be positive")
    if n_k < 2 or n_k & (n_k - 1):
        raise ValidationError(f"n_k must be a power of two, got {n_k}")


def _edge_transform(a, b, gamma, k):
    """F of the linear function a + b s on [0, gamma], in closed form."""
    w = 2j * k
    small = np.abs(w * gamma) < 1e-6
    ws = np.where(small, 1.0, w)
    e = np.exp(ws * gamma)
    i0 = np.where(small, gamma, (e - 1) / ws)
    i1 = np.where(small, gamma ** 2 / 2, gamma * e / ws - (e - 1) / ws ** 2)
    return a * i0 + b * i1


def jost_profile(q, k_max=200.0, n_k=16384, *, n_profile=4096, leak_tol=LEAK_TOL):
    """Profile g of psi = 1 + F g from samples of psi on [-k_max, k_max).

    The linear function joining the one-sided limits
    g(0+) = conj q(0) + ||q||^2 and g(gamma-) = conj q(gamma-) is removed
    analytically before the discrete inverse transform, so the remainder
    is continuous at both ends and free of Gibbs ringing. The inverse
    transform is evaluated on ``n_profile + 1`` nodes of [0, gamma] by a
    chirp z-transform. ``leakage`` is the energy of the remainder outside
    [0, gamma] relative to the total energy, measured on the native grid
    ds = pi / (2 k_max).
    """
    _check_grid(k_max, n_k)
    gamma = q.gamma
    k = k_grid(k_max, n_k)
    dk = 2.0 * k_max / n_k
    psi = jost_function(q, k.astype(np.complex128))

    a = np.conj(q.samples[0]) + q.l2_norm() ** 2
    b = (np.conj(q.samples[-1]) - a) / gamma
    h = psi - 1.0 - _edge_transform(a, b, gamma, k)

    sig = gamma / n_profile
    s = np.arange(n_profile + 1) * sig
    rem = (dk / np.pi) * np.exp(2j * k_max * s) * czt(h, n_profile + 1, w=np.exp(-2j * dk * sig), a=1.0)
    g = rem + a + b * s

    ds = np.pi / (2.0 * k_max)
    sn = np.arange(n_k) * ds
    full = (dk / np.pi) * np.fft.fft(h) * np.exp(2j * k_max * sn)
    sn = np.where(sn >= n_k * ds / 2, sn - n_k * ds, sn)
    outside = ds * float(np.sum(np.abs(full[(sn < 0) | (sn > gamma)]) ** 2))
    total = outside + profile_l2(g, sig) ** 2
    leakage = outside / total if total > 0 else 0.0
    if leakage > leak_tol:
        raise ResolutionError(
            f"transform leakage {leakage:.2e} exceeds {leak_tol:.0e}; increase k_max or n_k")
    return JostFunction(gamma, g, leakage=leakage)


def scattering_matrix(q, z):
    """S(z) = conj(psi(z)) / psi(z) for real ``z``."""
    z = np.asarray(z)
    if np.iscomplexobj(z) and np.any(np.imag(z) != 0):
        raise ValidationError("the scattering matrix is evaluated on the real line only")
    psi = np.asarray(jost_function(q, np.real(z).astype(np.complex128)))
    if np.any(np.abs(psi) < S_FLOOR):
        raise DivisionError("psi vanishes on the real line; the input is not a valid potential")
    s = np.conj(psi) / psi
    return s[()] if s.ndim == 0 else s


@dataclass(frozen=True, eq=False)
class ScatteringSamples:
    """S sampled on the symmetric grid [-k_max, k_max) with ``n_k`` points."""

    gamma: float
    k_max: float
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.complex128).ravel()
        _check_grid(self.k_max, v.size)
        object.__setattr__(self, "values", v)

    @property
    def n_k(self):
        return self.values.size

    @property
    def k(self):
        return k_grid(self.k_max, self.n_k)


def scattering_samples(q, k_max=200.0, n_k=16384):
    _check_grid(k_max, n_k)
    return ScatteringSamples(q.gamma, k_max, scattering_matrix(q, k_grid(k_max, n_k)))


def winding_number(s_samples, *, max_jump=np.pi / 2):
    """Revolutions of a unimodular sequence around 0 with the S = exp(-2i phi) convention.

    Returns ``(W, residual)`` with ``W = round((phi_end - phi_start) / pi)``.
    With this convention (z - i)/(z + i) on an increasing grid gives W = -1.

    Raises
    ------
    UndersampledError
        When two neighbours differ in phase by more than ``max_jump``; the
        unwrapping would then be ambiguous.
    """
    s = np.asarray(s_samples, dtype=np.complex128).ravel()
    if s.size < 2:
        return 0, 0.0
    jumps = np.angle(s[1:] / s[:-1])
    worst = float(np.max(np.abs(jumps)))
    if worst > max_jump:
        raise UndersampledError(f"phase jump {worst:.3f} between neighbours; refine the grid")
    phi = -np.sum(jumps) / 2.0
    w = phi / np.pi
    n = int(round(w))
    return n, float(abs(w - n))


@dataclass
class SMatrixReport:
    passed: bool
    failures: list
    winding: int
    winding_residual: float
    unitarity_error: float
    leakage: float
    l2_norm: float
    l1_norm: float

    def __bool__(self):
        return self.passed


def _inverse_on_grid(k_max, values):
    """(1/pi) int h(k) e^{-2iks} dk on s in [-P/2, P/2), P = n_k pi / (2 k_max)."""
    n = values.size
    dk = 2.0 * k_max / n
    ds = np.pi / (2.0 * k_max)
    s = np.arange(n) * ds
    f = (dk / np.pi) * np.fft.fft(values) * np.exp(2j * k_max * s)
    s = np.where(s >= n * ds / 2, s - n * ds, s)
    order = np.argsort(s)
    return s[order], f[order], ds


def verify_smatrix(s_profile, *, delta=None, leak_tol=LEAK_TOL, unit_tol=1e-10):
    """Check that sampled S belongs to the scattering class.

    F = F^{-1}(S - 1) is computed with a Hann taper in k (it turns the
    1/k decay of S - 1 into rapidly decaying side lobes); the energy of F
    below ``-gamma - delta`` relative to the total must stay under
    ``leak_tol`` and the winding number must vanish. ``delta`` defaults to
    a tenth of gamma.
    """
    gamma = s_profile.gamma
    delta = 0.1 * gamma if delta is None else delta
    values = s_profile.values
    failures = []
    unit = float(np.max(np.abs(np.abs(values) - 1.0)))
    if unit > unit_tol:
        failures.append(f"|S| deviates from 1 by {unit:.2e}")
    try:
        w, res = winding_number(values)
    except UndersampledError as exc:
        w, res = 0, float("nan")
        failures.append(str(exc))
    if w != 0:
        failures.append(f"winding number {w}")
    s, f, ds = _inverse_on_grid(s_profile.k_max, (values - 1.0) * hann(values.size, sym=False))
    energy = np.abs(f) ** 2
    total = float(np.sum(energy))
    below = float(np.sum(energy[s < -gamma - delta]))
    leakage = below / total if total > 0 else 0.0
    if leakage > leak_tol:
        failures.append(f"support leakage {leakage:.2e} below -gamma - delta")
    keep = s >= -gamma
    l2 = float(np.sqrt(ds * np.sum(energy[keep])))
    l1 = float(ds * np.sum(np.abs(f[keep])))
    return SMatrixReport(not failures, failures, w, res, unit, leakage, l2, l1)
