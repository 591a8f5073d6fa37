"""Relocating finitely many zeros of a Jost function.

Two constructions of f = f_o * prod (1 + rho_n / (k_n - k)):

* the multiplier route composes one rational factor at a time directly on
  the profile. The factor's profile is 2 i rho e^{-2 i k_n s}, and its
  convolution with the (piecewise-linear) profile of f_o is integrated
  exactly by an exponential recurrence;
* the log-exp route sums the closed-form logarithms of the factors in the
  Wiener algebra, exponentiates and multiplies.

Both keep only [0, gamma]; what the exact product puts beyond gamma is
proportional to f_o(k_n) and is reported as leakage.
"""

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import lfilter

from .exceptions import (ConstructionError, MismatchError, ResolutionError, ShiftRejectedError,
                         ValidationError)
from .jost import JostFunction, _filon_a, metric_J, profile_l2, verify_jost
from .wiener import LOG_BOUND, atom_log, atom_norm, causal_convolution, exp_element, norm

MATCH_TOL = 1e-4
LEAK_TOL = 1e-6
SPLIT_NORM = 0.25


@dataclass(frozen=True)
class ShiftSet:
    """Pairs (k_old, rho) moving the zero k_old of a Jost function to k_old + rho."""

    pairs: tuple = ()
    declared_tail_l1: float = 0.0

    def __post_init__(self):
        pairs = tuple((complex(k), complex(r)) for k, r in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        if self.declared_tail_l1 < 0:
            raise ValidationError("declared tail mass must be nonnegative")

    @classmethod
    def from_arrays(cls, k_old, rho, declared_tail_l1=0.0):
        return cls(tuple(zip(np.atleast_1d(k_old), np.atleast_1d(rho))), declared_tail_l1)

    def __len__(self):
        return len(self.pairs)

    @property
    def k_old(self):
        return np.array([p[0] for p in self.pairs], dtype=np.complex128)

    @property
    def rho(self):
        return np.array([p[1] for p in self.pairs], dtype=np.complex128)

    @property
    def k_new(self):
        return self.k_old + self.rho

    @property
    def l1(self):
        return float(np.sum(np.abs(self.rho)))

    def scaled(self, t):
        return ShiftSet(tuple((k, t * r) for k, r in self.pairs), t * self.declared_tail_l1)


@dataclass
class ShiftReport:
    passed: bool
    l1: float
    C1: float
    residuals: np.ndarray
    tail_bound: float = 0.0


def validate_shifts(f_o, s, *, match_tol=MATCH_TOL):
    """Check that each k_old is a zero of ``f_o`` and each k_old + rho stays in the lower half-plane.

    Raises
    ------
    ShiftRejectedError
        A shifted zero lands on or above the real line.
    MismatchError
        ``|psi_o(k_old)|`` exceeds ``match_tol * exp(2 gamma |Im k_old|)``.
    """
    for k, r in s.pairs:
        if not k.imag < 0:
            raise ShiftRejectedError(f"k_old = {k} is not in the open lower half-plane", pair=(k, r))
        if not (k + r).imag < 0:
            raise ShiftRejectedError(f"shift {r} moves {k} to {k + r}, outside the lower half-plane",
                                     pair=(k, r))
    if not s.pairs:
        return ShiftReport(True, 0.0, 0.0, np.zeros(0), 0.0)
    k = s.k_old
    scale = np.exp(2 * f_o.gamma * np.abs(k.imag))
    res = np.abs(f_o.eval(k)) / scale
    bad = np.nonzero(res >= match_tol)[0]
    if bad.size:
        i = int(bad[0])
        raise MismatchError(f"k_old = {k[i]} is not a zero of the source (scaled |psi| = {res[i]:.2e})")
    y = np.abs(k.imag)
    c1 = float(np.max(y ** -0.5 * (1 + y ** -0.5)))
    tail = LOG_BOUND * c1 * s.declared_tail_l1
    return ShiftReport(True, s.l1, c1, res, tail)


def _apply_factor(g, step, k0, rho):
    """Profile of (1 + F g)(1 + rho/(k0 - k)) on the nodes of g, plus the tail energy beyond them."""
    alpha = -2j * k0
    z = alpha * step
    phi2, _ = _filon_a(np.array([z]))
    phi2 = phi2[0]
    phi1 = 1.0 + z * phi2
    e = np.exp(z)
    # I_{m+1} = e I_m + step ((phi1 - phi2) g_m + phi2 g_{m+1}),  I(s) = int_0^s e^{alpha(s-t)} g(t) dt
    c = step * ((phi1 - phi2) * g[:-1] + phi2 * g[1:])
    inc = lfilter([1.0], [1.0, -e], c)
    integral = np.concatenate([[0.0], inc])
    s = np.arange(g.size) * step
    a = 2j * rho * np.exp(alpha * s)
    new = g + a + 2j * rho * integral
    # beyond the last node only the exponential survives: 2 i rho e^{alpha s} (1 + int g e^{-alpha t})
    amp = 2j * rho * (np.exp(alpha * s[-1]) + integral[-1])
    tail_energy = abs(amp) ** 2 / (2 * abs(alpha.real))
    return new, tail_energy


def _finish(f_o, g, leakage, leak_tol, verify):
    if leakage > leak_tol:
        raise ResolutionError(f"perturbed profile leaks {leakage:.2e} beyond gamma; "
                              "check that the shifted points are zeros of the source")
    out = JostFunction(f_o.gamma, g, leakage=leakage)
    if verify:
        rep = verify_jost(out)
        if not rep.passed:
            raise ConstructionError("perturbed function fails the Jost-class check: " + "; ".join(rep.failures))
        out = rep.jost
    return out


def _compose(g, step, pairs):
    tail = 0.0
    for k0, rho in pairs:
        if rho == 0:
            continue
        g, t = _apply_factor(g, step, k0, rho)
        tail += t
    return g, tail


def perturb_multiplier(f_o, s, *, refine=1, leak_tol=LEAK_TOL, verify=True, validate=True):
    """f = f_o * prod (1 + rho_n / (k_n - k)) built factor by factor on the profile.

    ``refine`` first re-grids f_o onto a finer node set (the represented
    function is unchanged) so the nodal sampling of the new profile is finer.
    """
    if validate:
        validate_shifts(f_o, s)
    if not s.pairs:
        return f_o
    base = f_o.resample(f_o.n_intervals * refine) if refine > 1 else f_o
    g, tail = _compose(base.g_samples.copy(), base.step, s.pairs)
    energy = profile_l2(g, base.step) ** 2
    leakage = tail / (tail + energy) if tail + energy > 0 else 0.0
    return _finish(f_o, g, leakage, leak_tol, verify)


@dataclass
class LogExpResult:
    jost: JostFunction
    log_norm: float
    bound: float
    n_split: int
    notes: list = field(default_factory=list)

    @property
    def bound_ok(self):
        return self.log_norm <= self.bound * (1 + 1e-9)


def perturb_logexp(f_o, s, *, split_norm=SPLIT_NORM, leak_tol=LEAK_TOL, verify=True, validate=True,
                   full_output=False):
    """Same construction through F = sum log(1 + rho_n/(k_n - k)) and exp(F).

    Pairs whose factor has norm >= ``split_norm`` are applied exactly by the
    multiplier route first. ``log_norm`` is the algebra norm of F and
    ``bound`` is 2.78 * C1 * ||rho||_1 over the remaining pairs.
    """
    rep = validate_shifts(f_o, s) if validate else None
    if not s.pairs:
        res = LogExpResult(f_o, 0.0, 0.0, 0)
        return res if full_output else f_o
    big = [p for p in s.pairs if atom_norm(*p) >= split_norm]
    small = [p for p in s.pairs if atom_norm(*p) < split_norm and p[1] != 0]
    g = f_o.g_samples.copy()
    step, n = f_o.step, f_o.n_intervals
    tail_big = 0.0
    if big:
        g, tail_big = _compose(g, step, big)
    notes = [f"{len(big)} large shift(s) composed directly"] if big else []
    log_norm, bound = 0.0, 0.0
    if small:
        # the product on [0, gamma] only needs F on [0, gamma]; twice that shows the leakage
        horizon = 2 * f_o.gamma
        logs = [atom_log(k, r, step=step, horizon=horizon) for k, r in small]
        F = logs[0]
        for extra in logs[1:]:
            F = F + extra
        full = [atom_log(k, r, step=step) for k, r in small]
        log_norm = float(sum(norm(x) for x in full)) if len(full) == 1 else _sum_norm(full)
        y = np.array([abs(k.imag) for k, _ in small])
        c1 = float(np.max(y ** -0.5 * (1 + y ** -0.5)))
        bound = LOG_BOUND * c1 * float(sum(abs(r) for _, r in small))
        e = exp_element(F).h_samples
        gp = np.concatenate([g, np.zeros(e.size - g.size)])
        prod = gp + e + causal_convolution(gp, e, step)
        g = prod[:n + 1]
        outside = step * float(np.sum(np.abs(prod[n + 1:]) ** 2))
    else:
        outside = 0.0
    energy = profile_l2(g, step) ** 2
    tail = outside + tail_big
    leakage = tail / (tail + energy) if tail + energy > 0 else 0.0
    out = _finish(f_o, g, leakage, leak_tol, verify)
    res = LogExpResult(out, log_norm, bound, len(big), notes)
    if rep is not None and rep.tail_bound:
        res.notes.append(f"declared tail adds at most {rep.tail_bound:.3g} to ||F||")
    return res if full_output else out


def _sum_norm(elements):
    total = elements[0]
    for x in elements[1:]:
        total = total + x
    return norm(total)


@dataclass
class StabilityCurve:
    scales: np.ndarray
    l1: np.ndarray
    distances: np.ndarray
    notes: list

    def ratios(self):
        d = self.distances
        return d[1:] / d[:-1]


def stability_curve(f_o, s, scales, **kwargs):
    """metric_J(f_t, f_o) for the shift set scaled by each t; invalid scales are skipped with a note."""
    ts, l1s, dist, notes = [], [], [], []
    for t in scales:
        st = s.scaled(t)
        try:
            f_t = perturb_multiplier(f_o, st, **kwargs) if t != 0 else f_o
        except (ShiftRejectedError, MismatchError, ResolutionError, ConstructionError) as exc:
            notes.append(f"t = {t}: skipped ({exc})")
            continue
        ts.append(t)
        l1s.append(st.l1)
        dist.append(metric_J(f_t, f_o))
    return StabilityCurve(np.array(ts), np.array(l1s), np.array(dist), notes)


def relabel(f, **changes):
    return replace(f, **changes)
