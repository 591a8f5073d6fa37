"""Half-line Wiener algebra: elements c + F h with h on [0, T], T the horizon.

Profiles are stored as nodal samples on s_m = m * step. Products use
Gregory-corrected convolution quadrature (fourth order). Frequency values
use the exact transform of the piecewise-linear interpolant of a cubic
spline upsampling of the nodes, which keeps the error near fourth order.
"""

from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import fftconvolve

from .exceptions import ConvergenceError, DomainError, IncompatibleDomainError, ResolutionError
from .jost import _filon_a, filon_transform

TAIL_TOL = 1e-8
REFINE = 4
LOG_BOUND = 2.78
CERT_REAL = 2048
CERT_RAYS = 8

# endpoint corrections of the fourth-order Gregory rule (weights minus one)
_GREGORY = np.array([17 / 48, 59 / 48, 43 / 48, 49 / 48]) - 1.0
_SHORT_RULES = {
    1: [1 / 2, 1 / 2],
    2: [1 / 3, 4 / 3, 1 / 3],
    3: [3 / 8, 9 / 8, 9 / 8, 3 / 8],
    4: [1 / 3, 4 / 3, 2 / 3, 4 / 3, 1 / 3],
    5: [1 / 3, 4 / 3, 1 / 3 + 3 / 8, 9 / 8, 9 / 8, 3 / 8],
    6: [1 / 3, 4 / 3, 2 / 3, 4 / 3, 2 / 3, 4 / 3, 1 / 3],
}


def upsample(h, factor=REFINE):
    """Cubic-spline values on a grid ``factor`` times finer (same end points)."""
    if factor == 1 or h.size < 4:
        return h
    x = np.arange(h.size)
    xf = np.arange((h.size - 1) * factor + 1) / factor
    return CubicSpline(x, h)(xf)


def spline_transform(h, step, k, refine=REFINE):
    """int_0^T h(s) e^{2iks} ds for the cubic-spline interpolant of nodal ``h``."""
    return filon_transform(upsample(h, refine), step / refine, k)


def simpson_weights(n_nodes):
    """Composite Simpson weights (3/8 rule on the last panel for even panel counts)."""
    m = n_nodes - 1
    if m == 0:
        return np.zeros(1)
    if m in _SHORT_RULES:
        return np.asarray(_SHORT_RULES[m])
    w = np.zeros(n_nodes)
    body = m if m % 2 == 0 else m - 3
    w[:body + 1:2] = 2 / 3
    w[1:body:2] = 4 / 3
    w[0] = w[body] = 1 / 3
    if body < m:
        w[body:] += np.array([3 / 8, 9 / 8, 9 / 8, 3 / 8])
    return w


def _short_convolution(a, b, m_max):
    """Convolution at nodes 1..m_max from the interpolating polynomials through the first nodes.

    Gregory weights need seven nodes; below that the integrand is
    replaced by the product of degree <= 7 interpolants, integrated by
    Gauss-Legendre, which keeps the start of the profile as accurate as
    the interior.
    """
    p = min(a.size, 8)
    x = np.arange(p, dtype=float)
    va = np.polynomial.polynomial.polyfit(x, a[:p], p - 1)
    vb = np.polynomial.polynomial.polyfit(x, b[:p], p - 1)
    gx, gw = np.polynomial.legendre.leggauss(8)
    out = np.zeros(m_max + 1, dtype=np.complex128)
    for m in range(1, m_max + 1):
        t = 0.5 * m * (gx + 1.0)
        pa = np.polynomial.polynomial.polyval(t, va)
        pb = np.polynomial.polynomial.polyval(m - t, vb)
        out[m] = 0.5 * m * np.sum(gw * pa * pb)
    return out


def causal_convolution(a, b, step):
    """(a * b)(s_m) = int_0^{s_m} a(t) b(s_m - t) dt on the nodes of the shorter input."""
    n = min(a.size, b.size)
    a = np.asarray(a[:n], dtype=np.complex128)
    b = np.asarray(b[:n], dtype=np.complex128)
    full = fftconvolve(a, b)[:n]
    out = full.copy()
    m = np.arange(n)
    big = m >= 7
    for j, d in enumerate(_GREGORY):
        out[big] += d * (a[j] * b[m[big] - j] + a[m[big] - j] * b[j])
    out[0] = 0.0
    if n > 1:
        short = min(6, n - 1)
        out[1:short + 1] = _short_convolution(a, b, short)[1:]
    return step * out


@dataclass(frozen=True, eq=False)
class WienerElement:
    """c + F h, h sampled at n + 1 nodes on [0, T] with spacing ``step``.

    ``tail_bound`` bounds the L1 mass of h beyond the horizon T.
    """

    c: complex
    h_samples: np.ndarray
    step: float
    tail_bound: float = 0.0

    def __post_init__(self):
        h = np.ascontiguousarray(np.asarray(self.h_samples, dtype=np.complex128).ravel())
        if h.size < 2:
            raise ValueError("a profile needs at least two nodes")
        h.setflags(write=False)
        object.__setattr__(self, "h_samples", h)
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "step", float(self.step))
        object.__setattr__(self, "tail_bound", float(self.tail_bound))

    @property
    def n_nodes(self):
        return self.h_samples.size

    @property
    def horizon(self):
        return self.step * (self.n_nodes - 1)

    @property
    def nodes(self):
        return np.arange(self.n_nodes) * self.step

    @classmethod
    def constant(cls, c, step, horizon):
        n = int(round(horizon / step))
        return cls(c, np.zeros(n + 1), step)

    @classmethod
    def unit(cls, step=0.01, horizon=1.0):
        return cls.constant(1.0, step, horizon)

    def __call__(self, k):
        """Frequency value c + int_0^T h(s) e^{2iks} ds."""
        return self.c + spline_transform(self.h_samples, self.step, k)

    def l1(self):
        return float(self.step * np.sum(simpson_weights(self.n_nodes) * np.abs(self.h_samples)))

    def l2(self):
        return float(np.sqrt(self.step * np.sum(simpson_weights(self.n_nodes) * np.abs(self.h_samples) ** 2)))

    def profile_norm(self):
        """L1 + L2 norm of the profile part plus the tail bound."""
        return self.l1() + self.l2() + self.tail_bound

    def with_constant(self, c):
        return replace(self, c=c)

    def extend(self, horizon):
        """Zero-pad (or truncate) the stored profile to a new horizon."""
        n = int(round(horizon / self.step)) + 1
        h = self.h_samples
        if n <= h.size:
            return replace(self, h_samples=h[:n],
                           tail_bound=self.tail_bound + _tail_l1(h[n - 1:], self.step))
        return replace(self, h_samples=np.concatenate([h, np.zeros(n - h.size)]))

    def __add__(self, other):
        a, b = _common(self, other)
        return WienerElement(a.c + b.c, a.h_samples + b.h_samples, a.step, a.tail_bound + b.tail_bound)

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, factor):
        return WienerElement(factor * self.c, factor * self.h_samples, self.step, abs(factor) * self.tail_bound)

    def __mul__(self, other):
        return multiply(self, other)

    def __repr__(self):
        return (f"WienerElement(c={self.c:.4g}, horizon={self.horizon:g}, step={self.step:g}, "
                f"tail_bound={self.tail_bound:.1e})")


def _tail_l1(h, step):
    return float(step * np.sum(simpson_weights(h.size) * np.abs(h))) if h.size > 1 else 0.0


def _common(w1, w2, resample=False):
    if not np.isclose(w1.step, w2.step, rtol=1e-12, atol=0):
        if not resample:
            raise IncompatibleDomainError(f"steps differ ({w1.step} vs {w2.step}); pass resample=True")
        step = min(w1.step, w2.step)
        w1, w2 = resample_element(w1, step), resample_element(w2, step)
    horizon = max(w1.horizon, w2.horizon)
    return w1.extend(horizon), w2.extend(horizon)


def resample_element(w, step):
    """Linear interpolation of the profile onto a new step (same horizon, rounded)."""
    n = int(round(w.horizon / step))
    s = np.arange(n + 1) * step
    h = np.interp(s, w.nodes, w.h_samples.real) + 1j * np.interp(s, w.nodes, w.h_samples.imag)
    return WienerElement(w.c, h, step, w.tail_bound)


def norm(w):
    """|c| + ||h||_L1 + ||h||_L2 + tail_bound."""
    return abs(w.c) + w.profile_norm()


def multiply(w1, w2, *, resample=False):
    """Product (c1 c2, c1 h2 + c2 h1 + h1 * h2) truncated to the common horizon."""
    a, b = _common(w1, w2, resample)
    ha, hb = a.h_samples, b.h_samples
    n = ha.size
    conv = causal_convolution(ha, hb, a.step)
    h = a.c * hb + b.c * ha + conv
    # mass of h1 * h2 pushed beyond the horizon: bounded by ||h1||_1 ||h2||_1 restricted
    # to pairs of points whose sum exceeds T, i.e. below the product of the L1 norms
    discarded = _beyond_horizon(ha, hb, a.step)
    ta, tb = a.tail_bound, b.tail_bound
    la, lb = a.l1(), b.l1()
    tail = abs(a.c) * tb + abs(b.c) * ta + ta * (lb + tb) + tb * la + discarded
    return WienerElement(a.c * b.c, h[:n], a.step, tail)


def _beyond_horizon(ha, hb, step):
    full = step * fftconvolve(np.abs(ha), np.abs(hb))
    return float(step * np.sum(full[ha.size:])) if full.size > ha.size else 0.0


def _certificate_points(w, n_real=CERT_REAL, n_rays=CERT_RAYS, n_radial=64):
    scale = 1.0 / max(w.step, 1e-12)
    theta = np.linspace(-np.pi / 2, np.pi / 2, n_real + 2)[1:-1]
    real = np.tan(theta) * min(scale, 10.0 / max(w.horizon, 1e-12) + 1.0)
    radii = np.geomspace(1e-3, 2 * scale, n_radial)
    ang = np.pi * (np.arange(n_rays) + 0.5) / n_rays
    rays = (radii[None, :] * np.exp(1j * ang[:, None])).ravel()
    return np.concatenate([real.astype(np.complex128), rays])


@dataclass
class SpectrumReport:
    invertible: bool
    min_modulus: float
    limit_value: complex
    cut_distance: float
    n_points: int

    def __iter__(self):
        return iter((self.invertible, self.min_modulus, self.limit_value))


def spectrum_test(w, *, n_real=CERT_REAL, n_rays=CERT_RAYS, floor=1e-12):
    """Sampled invertibility certificate on the real line and upper-half-plane rays.

    Unpacks as ``(invertible, min_modulus, limit_value)``; ``cut_distance``
    is the smallest distance of a sampled value to (-inf, 0], used by the
    logarithm.
    """
    k = _certificate_points(w, n_real, n_rays)
    vals = w(k)
    mod = float(np.min(np.abs(vals)))
    dist = np.where(vals.real <= 0, np.abs(vals.imag), np.abs(vals))
    inv = bool(mod > floor and abs(w.c) > floor)
    return SpectrumReport(inv, min(mod, abs(w.c)), w.c, float(np.min(dist)), k.size)


def _edge_transform(j0, j1, j2, beta, k):
    """F of (j0 + j1 s + j2 s^2 / 2) e^{-beta s} on the half-line."""
    d = beta - 2j * k
    return j0 / d + j1 / d ** 2 + j2 / d ** 3


def _start_derivatives(h, step):
    """h'(0) and h''(0) by five-point one-sided differences."""
    if h.size < 5:
        d1 = (h[1] - h[0]) / step
        return d1, 0.0
    d1 = (-25 * h[0] + 48 * h[1] - 36 * h[2] + 16 * h[3] - 3 * h[4]) / (12 * step)
    d2 = (35 * h[0] - 104 * h[1] + 114 * h[2] - 56 * h[3] + 11 * h[4]) / (12 * step ** 2)
    return d1, d2


def log_element(w, *, refine=REFINE, leak_tol=1e-6):
    """Profile of log(w) for w = 1 + F h in the logarithmic domain.

    The profile is upsampled by a cubic spline, its transform is sampled on
    the real line and the principal logarithm taken (checked against phase
    unwrapping anchored at the band edge, where w -> 1). An exponential edge
    function matching log w and its first two derivatives at s = 0 is
    removed analytically before the discrete inverse transform. The
    piecewise-linear quadrature error is second order in the fine step, so
    the results at ``refine`` and ``2 * refine`` are Richardson-combined.
    """
    if abs(w.c - 1.0) > 1e-12:
        raise DomainError("log_element expects an element with constant part 1")
    cert = spectrum_test(w)
    if not cert.cut_distance > 1e-12:
        raise DomainError("the element takes values on (-inf, 0]; log is not defined")
    n = w.n_nodes
    coarse = _log_profile(w, refine, leak_tol)
    fine = _log_profile(w, 2 * refine, leak_tol)
    prof = (4 * fine[:coarse.size] - coarse) / 3
    tail = _tail_l1(prof[n - 1:], w.step) + w.tail_bound * np.exp(norm(w))
    return WienerElement(0.0, prof[:n], w.step, tail)


def _log_profile(w, refine, leak_tol):
    """log w's profile on the original node spacing, out to twice the horizon or more."""
    h = upsample(w.h_samples, refine)
    step = w.step / refine
    big_n = 1 << int(np.ceil(np.log2(4 * h.size)))
    dk = np.pi / (big_n * step)
    j = np.arange(big_n) - big_n // 2
    k = j * dk
    s0 = big_n * np.fft.ifft(h, big_n)[j % big_n]
    x = 2j * k * step
    a_p, _ = _filon_a(x)
    a_m, _ = _filon_a(-x)
    kern = a_p + a_m
    end = np.exp(2j * k * w.horizon)
    f = 1.0 + step * (kern * s0 + (a_p - kern) * h[0] + (a_m - kern) * end * h[-1])

    logf = np.log(f)
    phase = np.unwrap(np.angle(f)[::-1])[::-1]
    phase -= 2 * np.pi * np.round(phase[-1] / (2 * np.pi))
    if np.max(np.abs(phase - logf.imag)) > 1e-6:
        raise DomainError("the phase of the element winds across the cut on the real line")

    beta = 30.0 / max(w.horizon, 30 * step)
    # edge function matches l = h0, l' = h0' - h0^2 / 2, l'' = h0'' - h0 h0' + h0^3 / 3 at 0+
    h0 = w.h_samples[0]
    d1, d2 = _start_derivatives(w.h_samples, w.step)
    j0 = h0
    j1 = d1 - 0.5 * h0 ** 2 + beta * j0
    j2 = d2 - h0 * d1 + h0 ** 3 / 3 + 2 * beta * j1 - beta ** 2 * j0
    rem = logf - _edge_transform(j0, j1, j2, beta, k)
    # r(s_m) = (dk/pi) sum_j rem_j e^{-2 i k_j s_m}, s_m = m step, period big_n * step
    r = (dk / np.pi) * np.fft.fft(np.fft.ifftshift(rem))
    half = big_n // 2
    leak = float(np.sum(np.abs(r[half:]) ** 2) / max(np.sum(np.abs(r) ** 2), 1e-300))
    if leak > leak_tol:
        raise ResolutionError(f"causality leakage {leak:.2e} in log_element; refine the grid")
    s = np.arange(half) * step
    return (r[:half] + (j0 + j1 * s + 0.5 * j2 * s ** 2) * np.exp(-beta * s))[::refine]


def exp_element(w, *, tol=1e-12, max_terms=60, max_halvings=10):
    """exp(w) for c = 0 by the power series, with automatic scaling and squaring."""
    if abs(w.c) > 1e-12:
        raise DomainError("exp_element expects an element with constant part 0")
    for halvings in range(max_halvings + 1):
        part = w.scale(0.5 ** halvings)
        try:
            out = _exp_series(part, tol, max_terms)
        except ConvergenceError:
            continue
        for _ in range(halvings):
            out = multiply(out, out)
        return out
    raise ConvergenceError(f"exp series did not converge after {max_halvings} halvings")


def _exp_series(w, tol, max_terms):
    acc_h = np.zeros(w.n_nodes, dtype=np.complex128)
    term = w.h_samples.copy()
    for m in range(1, max_terms + 1):
        acc_h += term
        tn = _tail_l1(term, w.step)
        if tn < tol * max(_tail_l1(acc_h, w.step), 1e-300):
            tail = w.tail_bound * np.exp(norm(w))
            return WienerElement(1.0, acc_h, w.step, tail)
        term = causal_convolution(term, w.h_samples, w.step) / (m + 1)
    raise ConvergenceError(
        f"exp series not converged in {max_terms} terms; use exp(w) = exp(w/2)^2")


def log_element_contour(w, *, n_points=64, max_terms=80, tol=1e-14):
    """Riesz-Dunford cross-check for small elements.

    On the circle |lambda| = 2 ||f|| the resolvent (lambda - f)^{-1} is the
    Neumann series sum f^m / lambda^{m+1}; the n_points trapezoid rule then
    turns the contour integral into sum_m a_m f^m with
    a_m = mean_j log(1 + lambda_j) lambda_j^{-m}.
    """
    f = w.with_constant(0.0)
    r = norm(f)
    if r == 0:
        return WienerElement(0.0, np.zeros(w.n_nodes), w.step)
    if not 2 * r < 1:
        raise DomainError("the contour route needs ||f|| < 1/2")
    lam = 2 * r * np.exp(2j * np.pi * np.arange(n_points) / n_points)
    phi = np.log1p(lam)
    acc = np.zeros(w.n_nodes, dtype=np.complex128)
    power = f.h_samples.copy()
    for m in range(1, max_terms + 1):
        a_m = np.mean(phi * lam ** (-m))
        acc += a_m * power
        if abs(a_m) * r ** m < tol:
            break
        power = causal_convolution(power, f.h_samples, w.step)
    return WienerElement(0.0, acc, w.step, f.tail_bound * 2)


@dataclass
class LogBoundReport:
    bound_ok: bool
    ratio: float
    log_norm: float
    norm: float

    def __iter__(self):
        return iter((self.bound_ok, self.ratio))


def log_norm_bound(w, *, constant=LOG_BOUND):
    """ratio = ||log w|| / ||w - 1||, required to stay below ``constant`` when ||w - 1|| < 1/4."""
    f = w.with_constant(w.c - 1.0)
    size = norm(f)
    if size >= 0.25:
        raise DomainError(f"||w - 1|| = {size:.3g} is not below 1/4")
    if size == 0:
        return LogBoundReport(True, 0.0, 0.0, 0.0)
    ln = norm(log_element(w))
    ratio = ln / size
    return LogBoundReport(bool(ratio <= constant), float(ratio), float(ln), float(size))


def _check_lower(k0, name="k0"):
    if not np.imag(k0) < 0:
        raise DomainError(f"{name} = {k0} must lie in the open lower half-plane")


def atom_horizon(k0, rho, tail_tol=TAIL_TOL):
    """Smallest horizon T with |rho| e^{2 Im k0 T} / |Im k0| below ``tail_tol``."""
    y = abs(np.imag(k0))
    if rho == 0:
        return 1.0
    return max(1.0, np.log(abs(rho) / (y * tail_tol)) / (2 * y))


def default_step(k0):
    return min(0.01, 0.05 / max(abs(2 * k0), 1e-12))


def atom(k0, rho, *, step=None, horizon=None, tail_tol=TAIL_TOL):
    """Element 1 + rho / (k0 - k), profile 2 i rho e^{-2 i k0 s}."""
    k0, rho = complex(k0), complex(rho)
    _check_lower(k0)
    step = default_step(k0) if step is None else step
    horizon = atom_horizon(k0, rho, tail_tol) if horizon is None else horizon
    n = int(np.ceil(horizon / step))
    s = np.arange(n + 1) * step
    h = 2j * rho * np.exp(-2j * k0 * s)
    y = abs(k0.imag)
    tail = abs(rho) * np.exp(-2 * y * s[-1]) / y
    return WienerElement(1.0, h, step, tail)


def atom_log(k0, rho, *, step=None, horizon=None, tail_tol=TAIL_TOL):
    """Closed-form profile of log(1 + rho / (k0 - k)).

    h(s) = e^{-2 i k0 s} (1 - e^{-2 i rho s}) / s, with h(0) = 2 i rho.
    """
    k0, rho = complex(k0), complex(rho)
    _check_lower(k0)
    _check_lower(k0 + rho, "k0 + rho")
    step = default_step(k0) if step is None else step
    y0, y1 = abs(k0.imag), abs((k0 + rho).imag)
    if horizon is None:
        horizon = 1.0
        while (np.exp(-2 * y0 * horizon) / (2 * y0) + np.exp(-2 * y1 * horizon) / (2 * y1)) / horizon > tail_tol:
            horizon *= 1.25
        horizon = horizon if rho != 0 else 1.0
    n = int(np.ceil(horizon / step))
    s = np.arange(n + 1) * step
    h = np.empty(n + 1, dtype=np.complex128)
    h[0] = 2j * rho
    ss = s[1:]
    h[1:] = np.exp(-2j * k0 * ss) * (-np.expm1(-2j * rho * ss)) / ss
    big_t = s[-1]
    tail = (np.exp(-2 * y0 * big_t) / (2 * y0) + np.exp(-2 * y1 * big_t) / (2 * y1)) / big_t if rho else 0.0
    return WienerElement(0.0, h, step, tail)


def atom_norm(k0, rho):
    """|rho| |Im k0|^{-1/2} (1 + |Im k0|^{-1/2}): the exact norm of an atom's profile."""
    y = abs(np.imag(k0))
    return abs(rho) / np.sqrt(y) * (1 + 1 / np.sqrt(y))
