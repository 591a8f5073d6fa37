"""Piecewise-constant complex potentials supported on [0, gamma]."""

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .exceptions import IncompatibleDomainError, ValidationError

# Effective-support window (in cells) and relative tail-mass threshold.
SUPPORT_CELLS = 4
SUPPORT_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class Potential:
    """Cell values of q on a uniform grid over [0, gamma].

    Cell ``j`` covers ``[j*step, (j+1)*step)`` and carries the constant value
    ``samples[j]``. The piecewise-constant form makes the per-cell transfer
    matrices of the forward solver exact.
    """

    gamma: float
    samples: np.ndarray
    step: float = field(default=None)

    def __post_init__(self):
        samples = np.ascontiguousarray(np.asarray(self.samples, dtype=np.complex128).ravel())
        if samples.size == 0:
            raise ValidationError("a potential needs at least one cell")
        gamma = float(self.gamma)
        if not gamma > 0 or not np.isfinite(gamma):
            raise ValidationError(f"gamma must be positive and finite, got {self.gamma!r}")
        step = gamma / samples.size
        if self.step is not None and not np.isclose(float(self.step), step, rtol=1e-12, atol=0):
            raise ValidationError(
                f"step {self.step!r} inconsistent with gamma/n_cells = {step!r}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "gamma", gamma)
        object.__setattr__(self, "step", step)

    @property
    def n_cells(self):
        return self.samples.size

    @property
    def edges(self):
        return np.linspace(0.0, self.gamma, self.n_cells + 1)

    @property
    def midpoints(self):
        return (np.arange(self.n_cells) + 0.5) * self.step

    def l2_norm(self):
        return float(np.sqrt(self.step * np.sum(np.abs(self.samples) ** 2)))

    @classmethod
    def from_function(cls, func, gamma, n_cells, *, order=4):
        """Cell averages of ``func`` computed with ``order``-point Gauss-Legendre per cell."""
        nodes, weights = np.polynomial.legendre.leggauss(order)
        step = gamma / n_cells
        left = np.arange(n_cells) * step
        x = left[:, None] + 0.5 * step * (nodes[None, :] + 1.0)
        vals = np.asarray(func(x), dtype=np.complex128)
        return cls(gamma, 0.5 * vals @ weights)

    @classmethod
    def constant(cls, value, gamma=1.0, n_cells=256):
        return cls(gamma, np.full(n_cells, value, dtype=np.complex128))

    def refine(self, factor):
        """Same function on a grid ``factor`` times finer."""
        return Potential(self.gamma, np.repeat(self.samples, int(factor)))

    def coarsen(self, factor):
        """Average groups of ``factor`` neighbouring cells."""
        factor = int(factor)
        if self.n_cells % factor:
            raise ValidationError(f"{self.n_cells} cells cannot be grouped by {factor}")
        return Potential(self.gamma, self.samples.reshape(-1, factor).mean(axis=1))

    def __repr__(self):
        return f"Potential(gamma={self.gamma:g}, n_cells={self.n_cells}, norm={self.l2_norm():.4g})"


def _common_grid(q1, q2, resample):
    if not np.isclose(q1.gamma, q2.gamma, rtol=1e-12, atol=0):
        raise IncompatibleDomainError(
            f"potentials live on different supports: gamma={q1.gamma} vs {q2.gamma}")
    if q1.n_cells == q2.n_cells:
        return q1.samples, q2.samples, q1.step
    if not resample:
        raise IncompatibleDomainError(
            f"grids differ ({q1.n_cells} vs {q2.n_cells} cells); pass resample=True")
    n = q1.n_cells * q2.n_cells // gcd(q1.n_cells, q2.n_cells)
    a = np.repeat(q1.samples, n // q1.n_cells)
    b = np.repeat(q2.samples, n // q2.n_cells)
    return a, b, q1.gamma / n


def metric_P(q1, q2, *, resample=False):
    """L2(0, gamma) distance between two potentials (exact for cell values)."""
    a, b, step = _common_grid(q1, q2, resample)
    return float(np.sqrt(step * np.sum(np.abs(a - b) ** 2)))


@dataclass
class MembershipReport:
    passed: bool
    failures: list
    norm: float
    tail_mass: float
    window: float

    def __bool__(self):
        return self.passed


def validate_membership(q, *, window_cells=SUPPORT_CELLS, support_tol=SUPPORT_TOL):
    """Check finiteness, a nonzero norm and that the support really reaches gamma.

    The support test looks at the L2 mass on the last ``window_cells`` cells,
    i.e. on [gamma - delta, gamma], and requires it to exceed
    ``support_tol`` times the total norm.
    """
    failures = []
    samples = q.samples
    finite = bool(np.all(np.isfinite(samples)))
    if not finite:
        failures.append("non-finite samples")
        return MembershipReport(False, failures, float("nan"), float("nan"), window_cells * q.step)
    norm = q.l2_norm()
    if norm == 0.0:
        failures.append("zero norm")
    tail = samples[-min(window_cells, samples.size):]
    tail_mass = float(np.sqrt(q.step * np.sum(np.abs(tail) ** 2)))
    if not tail_mass > support_tol * norm or norm == 0.0:
        failures.append("effective support does not reach gamma")
    return MembershipReport(not failures, failures, norm, tail_mass, window_cells * q.step)
