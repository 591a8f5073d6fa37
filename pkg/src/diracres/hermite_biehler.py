"""Dirac-type Hermite-Biehler functions E(k) = -i e^{-i gamma k} psi(k)."""

from dataclasses import dataclass

import numpy as np

from .exceptions import DomainError, IncompatibleDomainError
from .jost import JostFunction, metric_J, profile_l2
from .perturbation import perturb_multiplier


@dataclass(frozen=True, eq=False)
class HermiteBiehler:
    """E(k) = -i e^{-i gamma k} psi(k), stored through its Jost function."""

    jost: JostFunction

    @property
    def gamma(self):
        return self.jost.gamma

    def __call__(self, k):
        k = np.asarray(k, dtype=np.complex128)
        return -1j * np.exp(-1j * self.gamma * k) * self.jost.eval(k)

    def derivative(self, k):
        k = np.asarray(k, dtype=np.complex128)
        v, d = self.jost.eval_with_derivative(k)
        return -1j * np.exp(-1j * self.gamma * k) * (d - 1j * self.gamma * v)

    def eval_with_derivative(self, k):
        return self(k), self.derivative(k)

    def eval(self, k):
        return self(k)

    def profile(self):
        """F^{-1} E on (-gamma/2, gamma/2): nodes and values -i g(s + gamma/2)."""
        s = self.jost.nodes - self.gamma / 2
        return s, -1j * self.jost.g_samples


def from_jost(f, *, waive_support=False):
    """Wrap a verified Jost function. ``waive_support`` admits unverified input (e.g. psi == 1)."""
    if not (f.verified or waive_support):
        raise DomainError("from_jost needs a Jost function that passed verify_jost")
    return HermiteBiehler(f)


def hb_distance(e1, e2, *, check=True):
    """L2(-gamma/2, gamma/2) norm of F^{-1}(E1 - E2).

    Multiplying by e^{-i gamma k} shifts the profile by -gamma/2, so the
    distance equals metric_J of the underlying Jost functions; with
    ``check`` both sides are computed and compared.
    """
    if not np.isclose(e1.gamma, e2.gamma, rtol=1e-12, atol=0):
        raise IncompatibleDomainError("Hermite-Biehler functions with different gamma")
    d = metric_J(e1.jost, e2.jost)
    if check:
        a, b = e1.jost, e2.jost
        if a.n_intervals != b.n_intervals:
            n = max(a.n_intervals, b.n_intervals)
            a, b = a.resample(n), b.resample(n)
        s, p1 = HermiteBiehler(a).profile()
        _, p2 = HermiteBiehler(b).profile()
        direct = profile_l2(p1 - p2, s[1] - s[0])
        if abs(direct - d) > 1e-12 * max(1.0, d):
            raise ArithmeticError(f"modulation identity broken: {direct} vs {d}")
    return d


def perturb_hb(e_o, s, **kwargs):
    """from_jost(perturb_multiplier(e_o.jost, s))."""
    return from_jost(perturb_multiplier(e_o.jost, s, **kwargs), waive_support=True)


def hb_sample_points(gamma, *, n_random=200, n_near=20, seed=0):
    """Pseudorandom points in {|z| <= 40/gamma, 0 < Im z <= 10} plus near-real points."""
    rng = np.random.default_rng(seed)
    radius = 40.0 / gamma
    pts = []
    while len(pts) < n_random:
        x = rng.uniform(-radius, radius)
        y = rng.uniform(0.0, min(10.0, radius))
        if y > 0 and x * x + y * y <= radius * radius:
            pts.append(complex(x, y))
    near = np.linspace(-radius, radius, n_near) + 1e-3j
    return np.concatenate([np.array(pts), near])


@dataclass
class HBReport:
    passed: bool
    min_ratio: float
    n_points: int
    worst_point: complex

    def __bool__(self):
        return self.passed


def hb_inequality(e, *, n_random=200, n_near=20, seed=0, points=None):
    """Check |E(z)| > |E(conj z)| at sampled points of the upper half-plane."""
    z = hb_sample_points(e.gamma, n_random=n_random, n_near=n_near, seed=seed) if points is None \
        else np.asarray(points, dtype=np.complex128)
    up = np.abs(e(z))
    down = np.abs(e(np.conj(z)))
    ratio = up / down
    i = int(np.argmin(ratio))
    return HBReport(bool(np.all(ratio > 1.0)), float(ratio[i]), z.size, complex(z[i]))
