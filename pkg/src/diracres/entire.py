"""Entire functions of exponential type: zero products, counting and growth checks."""

import csv
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DegenerateError, ValidationError


def modulus_order(z, rtol=1e-9):
    """Indices sorting ``z`` by modulus; moduli equal to ``rtol`` count as ties, broken by ascending Re."""
    z = np.asarray(z, dtype=np.complex128).ravel()
    if z.size == 0:
        return np.zeros(0, dtype=int)
    order = np.argsort(np.abs(z), kind="stable")
    mod = np.abs(z[order])
    # consecutive moduli closer than rtol share a group label
    new_group = np.concatenate([[True], np.diff(mod) > rtol * np.maximum(1.0, mod[1:])])
    group = np.cumsum(new_group)
    return order[np.lexsort((z[order].real, group))]


def sort_zeros(zeros):
    """Sort by modulus, ties broken by ascending real part."""
    z = np.asarray(zeros, dtype=np.complex128).ravel()
    return z[modulus_order(z)]


@dataclass(frozen=True, eq=False)
class HadamardData:
    """C k^p e^{i kappa k} prod (1 - k/k_n) for nonzero zeros k_n."""

    zeros: np.ndarray
    C: complex = 1.0
    kappa: float = 0.0
    p: int = 0

    def __post_init__(self):
        z = sort_zeros(self.zeros)
        if np.any(z == 0):
            raise ValidationError("zeros at the origin go into p, not the zero list")
        if self.p < 0:
            raise ValidationError("p must be nonnegative")
        z.setflags(write=False)
        object.__setattr__(self, "zeros", z)
        object.__setattr__(self, "C", complex(self.C))
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "p", int(self.p))


@dataclass
class TailModel:
    """Asymptotic model of the zeros beyond the stored list.

    ``radius`` is where the modelled continuum of tail zeros begins.

    Zeros come in pairs near ``+-x - i (a + b ln x)`` with total density
    ``density`` per unit radius.
    """

    radius: float
    density: float
    a: float
    b: float

    @property
    def first_moment(self):
        # sum over the tail of 1/k_n; purely imaginary for the pair model
        r = self.radius
        return 1j * self.density * (self.a + self.b * (np.log(r) + 1.0)) / r

    @property
    def second_moment(self):
        # sum over the tail of 1/k_n^2
        return self.density / self.radius


def fit_tail(zeros, density=None):
    """Fit the tail model on the outer two thirds of the stored zeros.

    ``density`` is the number of zeros per unit radius (both sides counted);
    by default it is estimated from the stored list.
    """
    z = sort_zeros(zeros)
    if z.size == 0:
        raise DegenerateError("no zeros to fit a tail to")
    r = float(np.abs(z[-1]))
    if density is None:
        density = z.size / r
    # the continuum of the tail starts half a zero spacing past the last stored zero (midpoint rule)
    start = r + 1.0 / density
    outer = z[np.abs(z) > r / 3]
    if outer.size >= 4:
        b, a = np.polyfit(np.log(np.abs(outer)), np.abs(outer.imag), 1)
    else:
        a, b = float(np.mean(np.abs(z.imag))), 0.0
    return TailModel(start, float(density), float(a), float(b))


def hadamard_eval(h, k, *, tail=False, density=None, return_tail=False):
    """Evaluate the truncated Hadamard product at ``k``.

    Factors are accumulated in modulus order. The first-order truncation
    estimate ``|k * sum_tail 1/k_n| + |k|^2 |sum_tail 1/k_n^2| / 2`` comes from
    a fitted :class:`TailModel`; with ``tail=True`` the modelled tail factor
    ``exp(-k m1 - k^2 m2 / 2)`` is also applied. ``density`` overrides the
    fitted zero density (2 gamma / pi for a Jost function).

    Returns the value, or ``(value, tail_estimate)`` when ``return_tail``.
    """
    if h.zeros.size == 0 and h.p == 0 and h.C == 0:
        raise DegenerateError("C = 0 with no zeros and p = 0 is the zero function")
    k = np.asarray(k, dtype=np.complex128)
    val = h.C * k ** h.p * np.exp(1j * h.kappa * k)
    for zn in h.zeros:
        val = val * (1.0 - k / zn)
    est = np.zeros(k.shape)
    if tail or return_tail:
        if h.zeros.size:
            model = fit_tail(h.zeros, density)
            m1, m2 = model.first_moment, model.second_moment
            est = np.abs(k * m1) + 0.5 * np.abs(k) ** 2 * abs(m2)
            if tail:
                val = val * np.exp(-k * m1 - 0.5 * k ** 2 * m2)
    if val.ndim == 0:
        val, est = val[()], float(est)
    return (val, est) if return_tail else val


def counting_function(zeros, r, multiplicities=None):
    """n(r): zeros with |k_n| <= r, counted with multiplicity."""
    z = np.asarray(zeros, dtype=np.complex128).ravel()
    m = np.ones(z.size, dtype=int) if multiplicities is None else np.asarray(multiplicities, dtype=int)
    r = np.asarray(r, dtype=float)
    out = (m[None, :] * (np.abs(z)[None, :] <= r.reshape(-1, 1))).sum(axis=1)
    return int(out[0]) if r.ndim == 0 else out


def geometric_radii(r_min, r_max, n=20):
    return np.geomspace(r_min, r_max, n)


def levinson_slope(zeros, r_min, r_max, n_radii=20):
    """Least-squares slope of n(r) against r on a geometric radius grid.

    Returns ``(slope, rms_residual)``. The fit has an intercept, so the
    finite offset of n(r) does not bias the slope.
    """
    z = np.asarray(zeros).ravel()
    if z.size == 0:
        return 0.0, 0.0
    if not 0 < r_min < r_max:
        raise DegenerateError("need 0 < r_min < r_max for a slope fit")
    r = geometric_radii(r_min, r_max, max(n_radii, 2))
    n = counting_function(z, r)
    slope, icpt = np.polyfit(r, n, 1)
    res = n - (slope * r + icpt)
    return float(slope), float(np.sqrt(np.mean(res ** 2)))


@dataclass
class LindelofReport:
    radii: np.ndarray
    partial_sums: np.ndarray
    count_ratio: np.ndarray
    imag_sums: np.ndarray
    max_partial_sum: float
    flags: list = field(default_factory=list)

    @property
    def passed(self):
        return not self.flags

    def __bool__(self):
        return self.passed


def _keeps_growing(values, rel=0.75, floor=1e-2):
    # on a geometric grid a divergent (harmonic-like) sum gains as much over
    # the second half as over the first; a convergent one gains clearly less
    h = values.size // 2
    first = abs(values[h] - values[0])
    last = abs(values[-1] - values[h])
    return last > rel * first and last > floor * abs(values[-1])


def _trends_up(values, factor=1.5):
    q = max(1, values.size // 4)
    return np.mean(values[-q:]) > factor * np.mean(values[:q])


def lindelof_check(zeros, r_grid=None):
    """Partial sums of 1/k_n, n(r)/r and sum |Im k_n|/|k_n|^2 on a radius grid.

    The two sums are flagged when their increment over the upper half of
    the (geometric) grid is not clearly smaller than over the lower half;
    n(r)/r is flagged when its last-quartile mean is 1.5 times the first.
    """
    z = sort_zeros(zeros)
    if r_grid is None:
        if z.size == 0:
            r_grid = np.array([1.0])
        else:
            r_grid = geometric_radii(np.abs(z[0]), np.abs(z[-1]))
    r = np.asarray(r_grid, dtype=float)
    inside = np.abs(z)[None, :] <= r[:, None]
    sums = np.abs(inside @ (1.0 / z)) if z.size else np.zeros(r.size)
    ratio = inside.sum(axis=1) / r
    imag = inside @ (np.abs(z.imag) / np.abs(z) ** 2) if z.size else np.zeros(r.size)
    flags = []
    if r.size >= 4:
        if _keeps_growing(sums):
            flags.append("partial sums of 1/k_n keep growing")
        if _trends_up(ratio):
            flags.append("n(r)/r keeps growing")
        if _keeps_growing(imag):
            flags.append("sum |Im k_n|/|k_n|^2 keeps growing")
    return LindelofReport(r, sums, ratio, imag, float(np.max(sums, initial=0.0)), flags)


@dataclass
class SandwichReport:
    passed: bool
    precondition_ok: bool
    max_shift: float
    violations: list

    def __bool__(self):
        return self.passed


def perturbed_count_compare(zeros_o, zeros, s_bound, r_grid=None):
    """Check n_o(r - 2s) <= n(r) <= n_o(r + 2s) with zeros paired by index."""
    zo = np.asarray(zeros_o, dtype=np.complex128).ravel()
    z = np.asarray(zeros, dtype=np.complex128).ravel()
    m = min(zo.size, z.size)
    zo, z = zo[:m], z[:m]
    shift = float(np.max(np.abs(z - zo), initial=0.0))
    violations = []
    pre_ok = shift <= s_bound * (1 + 1e-12)
    if not pre_ok:
        violations.append(f"pairing shift {shift:.3g} exceeds s_bound {s_bound:.3g}")
    if r_grid is None:
        top = float(np.max(np.abs(zo), initial=1.0))
        r_grid = np.linspace(0.0, top, 200)
    # only radii at which both lists are complete can be compared
    limit = min(np.max(np.abs(zo), initial=0.0), np.max(np.abs(z), initial=0.0)) - 2 * s_bound
    for r in np.asarray(r_grid, dtype=float):
        if r > limit:
            continue
        lo = counting_function(zo, max(r - 2 * s_bound, 0.0)) if r - 2 * s_bound >= 0 else 0
        mid = counting_function(z, r)
        hi = counting_function(zo, r + 2 * s_bound)
        if not lo <= mid <= hi:
            violations.append(f"r = {r:.4g}: {lo} <= {mid} <= {hi} fails")
    return SandwichReport(not violations, pre_ok, shift, violations)


def counting_rows(zeros, gamma, radii):
    """Rows (r, n(r), n(r) pi / (2 gamma r))."""
    r = np.asarray(radii, dtype=float)
    n = counting_function(zeros, r)
    return [(float(ri), int(ni), float(ni * np.pi / (2 * gamma * ri)) if ri > 0 else 0.0)
            for ri, ni in zip(r, n)]


def write_counting_csv(path, zeros, gamma, radii):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["r", "n_r", "normalized"])
        w.writerows(counting_rows(zeros, gamma, radii))
