"""Zeros of Jost functions in the lower half-plane."""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from ._contour import polygon, winding_count
from .entire import modulus_order
from .exceptions import (BoundaryError, DomainError, NumericalError, UnresolvedCellError,
                         ValidationError)

BOUNDARY_FLOOR = 1e-6
COUNT_RESIDUAL = 1e-2


@dataclass(frozen=True)
class Rect:
    """Axis-parallel rectangle [re_min, re_max] x [im_min, im_max]."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValidationError(f"degenerate rectangle {self}")

    @classmethod
    def coerce(cls, rect):
        return rect if isinstance(rect, cls) else cls(*map(float, rect))

    @property
    def center(self):
        return complex(0.5 * (self.re_min + self.re_max), 0.5 * (self.im_min + self.im_max))

    @property
    def width(self):
        return self.re_max - self.re_min

    @property
    def height(self):
        return self.im_max - self.im_min

    def vertices(self):
        return [complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max)]

    def contains(self, k, pad=0.0):
        return (self.re_min - pad <= k.real <= self.re_max + pad
                and self.im_min - pad <= k.imag <= self.im_max + pad)

    def dilate(self, factor):
        c, hw, hh = self.center, 0.5 * self.width * factor, 0.5 * self.height * factor
        im_max = min(c.imag + hh, 0.0) if self.im_max <= 0 else c.imag + hh
        return Rect(c.real - hw, c.real + hw, c.imag - hh, im_max)

    def quarters(self, at=None):
        """Four subrectangles meeting at ``at`` (default: the centre)."""
        c = self.center if at is None else complex(at)
        return [Rect(self.re_min, c.real, self.im_min, c.imag), Rect(c.real, self.re_max, self.im_min, c.imag),
                Rect(self.re_min, c.real, c.imag, self.im_max), Rect(c.real, self.re_max, c.imag, self.im_max)]

    def as_dict(self):
        return {"re_min": self.re_min, "re_max": self.re_max, "im_min": self.im_min, "im_max": self.im_max}


@dataclass(eq=False)
class ResonanceList:
    """Resonances with multiplicities, sorted by modulus (ties by ascending Re k)."""

    k: np.ndarray
    mult: np.ndarray
    region: Rect = None
    count_residual: float = 0.0

    def __post_init__(self):
        k = np.asarray(self.k, dtype=np.complex128).ravel()
        m = np.asarray(self.mult, dtype=int).ravel()
        if k.size != m.size:
            raise ValidationError("one multiplicity per resonance")
        if np.any(k.imag >= 0):
            raise ValidationError("resonances lie in the open lower half-plane")
        if np.any(m < 1):
            raise ValidationError("multiplicities are positive")
        order = modulus_order(k)
        self.k, self.mult = k[order], m[order]
        if self.region is not None:
            self.region = Rect.coerce(self.region)

    def __len__(self):
        return self.k.size

    @property
    def total(self):
        return int(self.mult.sum())

    @property
    def zeros(self):
        """Zeros repeated according to multiplicity."""
        return np.repeat(self.k, self.mult)

    def __iter__(self):
        return iter(zip(self.k, self.mult))


def _floor(gamma):
    return lambda z: BOUNDARY_FLOOR * np.maximum(1.0, np.exp(2 * gamma * np.maximum(-np.imag(z), 0.0)))


def _count(f, rect, gamma):
    dphase = np.pi / 4
    for _ in range(3):
        res = winding_count(f, polygon(rect.vertices()), floor=_floor(gamma), max_dphase=dphase)
        if res.residual < COUNT_RESIDUAL:
            return res
        dphase /= 2
    raise BoundaryError(f"argument-principle residual {res.residual:.2e} on {rect}")


def count_zeros_rect(f, rect, *, dilations=3, full_output=False):
    """Zeros of ``f`` inside ``rect`` by the argument principle.

    When a zero sits on (or numerically next to) the boundary the
    rectangle is dilated by 1% about its centre, at most ``dilations`` times.
    With ``full_output`` returns ``(count, residual, rect_used)``.
    """
    rect = Rect.coerce(rect)
    gamma = getattr(f, "gamma", 0.0)
    for attempt in range(dilations + 1):
        try:
            res = _count(f, rect, gamma)
            break
        except BoundaryError:
            if attempt == dilations:
                raise
            rect = rect.dilate(1.01)
    return (res.count, res.residual, rect) if full_output else res.count


def _newton(f, cell, gamma, tol, mult=1, max_iter=60):
    k = cell.center
    reach = 2.0 * max(cell.width, cell.height)
    for _ in range(max_iter):
        v, d = f.eval_with_derivative(k)
        if d == 0 or not np.isfinite(v):
            return k, False
        step = mult * v / d
        k = k - step
        if abs(k - cell.center) > reach:
            return k, False
        if abs(step) < 1e-14 * max(1.0, abs(k)):
            break
    scale = max(1.0, np.exp(2 * gamma * max(-k.imag, 0.0)))
    return k, bool(abs(f.eval(k)) < tol * scale)


# split points tried in turn when a zero sits on the dividing lines
_SPLITS = ((0.5, 0.5), (0.5 + 1 / 37, 0.5 - 1 / 53), (0.5 - 1 / 29, 0.5 + 1 / 41))


def _subdivide(f, cell, gamma):
    for i, (a, b) in enumerate(_SPLITS):
        at = complex(cell.re_min + a * cell.width, cell.im_min + b * cell.height)
        quarters = cell.quarters(at)
        try:
            return quarters, [_count(f, c, gamma).count for c in quarters]
        except BoundaryError:
            if i == len(_SPLITS) - 1:
                raise


def _cluster_centre(f, cell, n, nodes=128):
    """Mean of the n zeros inside ``cell``: (1 / 2 pi i n) times the contour integral of k psi'/psi."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    verts = cell.vertices()
    m0 = m1 = 0.0
    for a, b in zip(verts, verts[1:] + verts[:1]):
        z = 0.5 * (a + b) + 0.5 * (b - a) * x
        v, d = f.eval_with_derivative(z)
        ratio = w * d / v * 0.5 * (b - a)
        m0 += ratio.sum()
        m1 += (z * ratio).sum()
    if abs(m0 / (2j * np.pi) - n) > COUNT_RESIDUAL:
        raise UnresolvedCellError(f"moment quadrature does not reproduce {n} zeros in {cell}", cell=cell)
    return complex(m1 / (2j * np.pi * n))


def find_resonances(f, rect, tol=1e-10, *, min_size=1e-7, max_cells=20000):
    """All zeros of ``f`` inside ``rect`` (which must lie in the lower half-plane).

    Cells are quadrisected until each holds at most one zero (counted by the
    argument principle; the split point moves off-centre when a zero lies on
    a dividing line); Newton's method from the cell centre then polishes
    it to ``|psi(k)| < tol * max(1, exp(2 gamma |Im k|))``. A cell whose
    Newton iterate leaves it is subdivided further. Cells shrinking below
    ``min_size`` with a count above one, or whose split lines all pass under
    the boundary floor, are treated as a multiple zero: polished with the
    multiplicity-corrected Newton step, or, when the cluster has split
    numerically and Newton cannot settle, placed at the mean of its zeros.
    """
    rect = Rect.coerce(rect)
    if rect.im_max > 0:
        raise DomainError("the search rectangle must lie in the closed lower half-plane")
    gamma = f.gamma
    total, residual, rect = count_zeros_rect(f, rect, full_output=True)
    roots, mults = [], []
    stack = [(rect, total)]
    n_cells = 0
    while stack:
        cell, n = stack.pop()
        n_cells += 1
        if n_cells > max_cells:
            raise UnresolvedCellError("cell budget exhausted", cell=cell)
        if n == 0:
            continue
        small = max(cell.width, cell.height) < min_size * max(1.0, abs(cell.center))
        if n == 1 or small:
            k, ok = _newton(f, cell, gamma, tol, mult=n)
            if ok and cell.contains(k, pad=1e-9 * max(1.0, abs(k))) and k.imag < 0:
                roots.append(k)
                mults.append(n)
                continue
            if small:
                raise UnresolvedCellError(f"could not polish {n} zero(s) in {cell}", cell=cell)
        try:
            quarters, counts = _subdivide(f, cell, gamma)
        except BoundaryError:
            if n == 1:
                raise
            # |psi| stays under the floor on every split line: an unresolvable cluster of n zeros
            k, ok = _newton(f, cell, gamma, tol, mult=n)
            if not (ok and cell.contains(k)):
                k = _cluster_centre(f, cell, n)
            if not (cell.contains(k) and k.imag < 0):
                raise UnresolvedCellError(f"could not separate or polish {n} zeros in {cell}", cell=cell)
            roots.append(k)
            mults.append(n)
            continue
        if sum(counts) != n:
            raise NumericalError(f"subcell counts {counts} do not add up to {n} in {cell}")
        stack.extend(zip(quarters, counts))
    return ResonanceList(np.array(roots, dtype=np.complex128), np.array(mults, dtype=int), rect, residual)


def default_rect(gamma, r):
    """Rectangle reaching |Re k| <= r and deep enough for the zeros up to that radius."""
    depth = max(2.0, np.log(2 * r + 1.0) / gamma + 1.0)
    return Rect(-r, r, -depth, -1e-9)


@dataclass
class ForbiddenDomainReport:
    C: float
    eps: float
    slack: np.ndarray

    @property
    def finite(self):
        return bool(np.isfinite(self.C))


def forbidden_domain_check(rl, gamma, eps=0.5):
    """Smallest C >= 0 with 2 gamma Im k_n <= ln(eps + C/|k_n|) for all stored k_n."""
    if eps <= 0:
        raise ValidationError("eps must be positive")
    k = rl.k if isinstance(rl, ResonanceList) else np.asarray(rl, dtype=np.complex128)
    if k.size == 0:
        raise ValidationError("forbidden-domain fit needs at least one resonance")
    need = np.abs(k) * (np.exp(2 * gamma * k.imag) - eps)
    c = float(max(0.0, need.max()))
    slack = np.log(eps + c / np.abs(k)) - 2 * gamma * k.imag
    return ForbiddenDomainReport(c, eps, slack)


def strip_count(rl, A):
    """Stored resonances with Im k > -A; the searched region must cover the strip."""
    if not A > 0:
        raise ValidationError("strip height must be positive")
    if rl.region is not None and -A < rl.region.im_min - 1e-12 * max(1.0, abs(rl.region.im_min)):
        raise DomainError(f"searched region stops at Im k = {rl.region.im_min}, above -{A}")
    return int(rl.mult[rl.k.imag > -A].sum())


class ResonanceFinder(BaseEstimator):
    """Estimator wrapper: ``fit(jost)`` stores ``resonances_``.

    Parameters
    ----------
    radius : float
        Half-width of the default search rectangle when ``rect`` is None.
    rect : tuple, optional
        (re_min, re_max, im_min, im_max) search rectangle.
    tol : float
        Relative residual for Newton polishing.
    """

    def __init__(self, radius=20.0, rect=None, tol=1e-10):
        self.radius = radius
        self.rect = rect
        self.tol = tol

    def fit(self, f, y=None):
        rect = self.rect if self.rect is not None else default_rect(f.gamma, self.radius)
        self.resonances_ = find_resonances(f, rect, self.tol)
        self.n_resonances_ = self.resonances_.total
        return self

    def predict(self, f=None):
        """Resonances (with multiplicity) from the last fit."""
        return self.resonances_.zeros
