"""Jost functions psi = 1 + F g with profiles g supported on [0, gamma].

Conventions used throughout the package::

    (F g)(k)      = int g(s) exp(2iks) ds
    (F^{-1} h)(s) = (1/pi) int h(k) exp(-2iks) dk

so Plancherel reads ||F g||^2 = pi ||g||^2.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import _kernels
from .exceptions import IncompatibleDomainError, RangeOverflowError, ValidationError
from .potential import SUPPORT_CELLS, SUPPORT_TOL

# exp() overflows at ~709.78; keep headroom for the prefactors.
OVERFLOW_GUARD = 690.0
REAL_FLOOR = 1e-8


def _a_series(x):
    # (e^x - 1 - x) / x^2 and its derivative, power series for |x| < 0.1
    c = [1 / 2, 1 / 6, 1 / 24, 1 / 120, 1 / 720, 1 / 5040, 1 / 40320, 1 / 362880, 1 / 3628800]
    a = np.zeros_like(x)
    da = np.zeros_like(x)
    for m in range(len(c) - 1, -1, -1):
        a = a * x + c[m]
    for m in range(len(c) - 1, 0, -1):
        da = da * x + m * c[m]
    return a, da


def _filon_a(x):
    """A(x) = (e^x - 1 - x)/x^2 and A'(x), vectorised with a series branch."""
    x = np.asarray(x, dtype=np.complex128)
    small = np.abs(x) < 0.1
    xs = np.where(small, 1.0, x)
    ex = np.exp(xs)
    a = (ex - 1 - xs) / xs ** 2
    da = (ex - 1) / xs ** 2 - 2 * (ex - 1 - xs) / xs ** 3
    if np.any(small):
        sa, sda = _a_series(x[small])
        a = np.where(small, 0, a)
        da = np.where(small, 0, da)
        a[small] = sa
        da[small] = sda
    return a, da


def filon_transform(samples, step, z, *, derivative=False):
    """Exact F of the piecewise-linear interpolant of nodal ``samples``.

    Returns ``int_0^{T} g(s) e^{2izs} ds`` (and its z-derivative when asked)
    for every ``z``; ``T = step * (len(samples) - 1)``.
    """
    g = np.ascontiguousarray(samples, dtype=np.complex128)
    z = np.asarray(z, dtype=np.complex128)
    shape = z.shape
    z = np.ascontiguousarray(z.ravel())
    n = g.size - 1
    total = step * n
    w = 2j * z
    x = w * step
    a_p, da_p = _filon_a(x)
    a_m, da_m = _filon_a(-x)
    kern = a_p + a_m
    s0, s1 = _kernels.exp_sums(g, step, w)
    end = np.exp(w * total)
    val = step * (kern * s0 + (a_p - kern) * g[0] + (a_m - kern) * end * g[n])
    if not derivative:
        return val.reshape(shape)
    dx = 2j * step
    dkern = (da_p - da_m) * dx
    ds0 = 2j * step * s1
    dval = step * (dkern * s0 + kern * ds0 + (da_p * dx - dkern) * g[0]
                   + (-da_m * dx - dkern) * end * g[n] + (a_m - kern) * 2j * total * end * g[n])
    return val.reshape(shape), dval.reshape(shape)


def profile_l2(samples, step):
    """L2 norm of the piecewise-linear interpolant (exact)."""
    a = np.asarray(samples)
    sq = np.abs(a[:-1]) ** 2 + np.abs(a[1:]) ** 2 + np.real(a[:-1] * np.conj(a[1:]))
    return float(np.sqrt(step * np.sum(sq) / 3.0))


def profile_l1(samples, step):
    """Trapezoid L1 norm of nodal samples."""
    a = np.abs(np.asarray(samples))
    return float(step * (a.sum() - 0.5 * (a[0] + a[-1])))


@dataclass(frozen=True, eq=False)
class JostFunction:
    """psi(z) = 1 + int_0^gamma g(s) e^{2izs} ds with nodal profile samples.

    ``g_samples`` has ``n + 1`` entries on ``s_m = m * gamma / n``; the first
    and last entries are the one-sided limits g(0+) and g(gamma-).
    """

    gamma: float
    g_samples: np.ndarray
    leakage: float = 0.0
    verified: bool = field(default=False)

    def __post_init__(self):
        g = np.ascontiguousarray(np.asarray(self.g_samples, dtype=np.complex128).ravel())
        if g.size < 2:
            raise ValidationError("a profile needs at least two nodes")
        if not self.gamma > 0:
            raise ValidationError("gamma must be positive")
        g.setflags(write=False)
        object.__setattr__(self, "g_samples", g)
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "leakage", float(self.leakage))

    @property
    def n_intervals(self):
        return self.g_samples.size - 1

    @property
    def step(self):
        return self.gamma / self.n_intervals

    @property
    def nodes(self):
        return np.linspace(0.0, self.gamma, self.g_samples.size)

    @classmethod
    def identity(cls, gamma=1.0, n_intervals=256):
        """psi == 1 (zero profile); not a member of the Jost class."""
        return cls(gamma, np.zeros(n_intervals + 1, dtype=np.complex128))

    def _check_range(self, z):
        worst = 2.0 * self.gamma * np.max(np.maximum(-np.imag(z), 0.0), initial=0.0)
        if worst > OVERFLOW_GUARD:
            raise RangeOverflowError(
                f"2*gamma*|Im z| = {worst:.1f} exceeds the overflow guard {OVERFLOW_GUARD}")

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        """Value of psi at ``z`` (scalar or array)."""
        z = np.asarray(z, dtype=np.complex128)
        self._check_range(z)
        val = 1.0 + filon_transform(self.g_samples, self.step, z)
        return val[()] if val.ndim == 0 else val

    def derivative(self, z):
        """psi'(z), differentiating under the integral sign."""
        z = np.asarray(z, dtype=np.complex128)
        self._check_range(z)
        _, d = filon_transform(self.g_samples, self.step, z, derivative=True)
        return d[()] if d.ndim == 0 else d

    def eval_with_derivative(self, z):
        z = np.asarray(z, dtype=np.complex128)
        self._check_range(z)
        v, d = filon_transform(self.g_samples, self.step, z, derivative=True)
        return 1.0 + v, d

    def resample(self, n_intervals):
        """Linear interpolation of the profile onto ``n_intervals`` intervals."""
        s = np.linspace(0.0, self.gamma, n_intervals + 1)
        g = np.interp(s, self.nodes, self.g_samples.real) + 1j * np.interp(s, self.nodes, self.g_samples.imag)
        return replace(self, g_samples=g, verified=False)

    def profile_norm(self):
        return profile_l2(self.g_samples, self.step)

    def __repr__(self):
        return (f"JostFunction(gamma={self.gamma:g}, n_intervals={self.n_intervals}, "
                f"leakage={self.leakage:.2e}, verified={self.verified})")


def eval(f, z):
    """Module-level alias of :meth:`JostFunction.eval`."""
    return f.eval(z)


def _aligned(f1, f2):
    if not np.isclose(f1.gamma, f2.gamma, rtol=1e-12, atol=0):
        raise IncompatibleDomainError(f"different supports: gamma={f1.gamma} vs {f2.gamma}")
    if f1.n_intervals == f2.n_intervals:
        return f1.g_samples, f2.g_samples
    n = max(f1.n_intervals, f2.n_intervals)
    if n % f1.n_intervals or n % f2.n_intervals:
        raise IncompatibleDomainError(
            f"profile grids are not nested ({f1.n_intervals} vs {f2.n_intervals} intervals)")
    return f1.resample(n).g_samples, f2.resample(n).g_samples


def metric_J(f1, f2):
    """L2(0, gamma) distance between the profiles of two Jost functions."""
    a, b = _aligned(f1, f2)
    return profile_l2(a - b, f1.gamma / (a.size - 1))


@dataclass
class JostReport:
    passed: bool
    failures: list
    support_mass: float
    zero_count: int
    count_residual: float
    radius: float
    min_real_modulus: float
    jost: JostFunction = None

    def __bool__(self):
        return self.passed


def verify_jost(f, *, window_cells=SUPPORT_CELLS, support_tol=SUPPORT_TOL, real_floor=REAL_FLOOR,
                n_real=4096, max_radius=None):
    """Check that ``f`` belongs to the Jost class.

    Three checks: the profile support reaches gamma; the argument principle
    over the boundary of [-R, R] x [0, R] finds no zeros in the closed upper
    half-plane; and |psi| stays above ``real_floor`` on a real grid.
    When all pass, ``report.jost`` is a copy of ``f`` with ``verified=True``.
    """
    from ._contour import winding_count

    failures = []
    g = f.g_samples
    norm = f.profile_norm()
    k = min(window_cells, f.n_intervals)
    tail = profile_l2(g[-(k + 1):], f.step)
    if not (norm > 0 and tail > support_tol * norm):
        failures.append("profile support does not reach gamma")

    radius = 20.0 / f.gamma
    max_radius = max_radius or 64 * radius
    count, residual = 0, 0.0
    while True:
        verts = [complex(-radius, 0), complex(radius, 0), complex(radius, radius), complex(-radius, radius)]
        res = winding_count(f, verts, floor=1e-12)
        count, residual = res.count, res.residual
        upper = abs(sum(res.edge_integral[1:]))
        if upper < 1e-3 or radius >= max_radius:
            break
        radius *= 2
    if count != 0:
        failures.append(f"{count} zero(s) in the closed upper half-plane")

    x = np.linspace(-radius, radius, n_real)
    min_mod = float(np.min(np.abs(f.eval(x))))
    if not min_mod > real_floor:
        failures.append(f"|psi| drops to {min_mod:.2e} on the real line")

    passed = not failures
    out = replace(f, verified=True) if passed else None
    return JostReport(passed, failures, tail, int(count), float(residual), radius, min_mod, out)
