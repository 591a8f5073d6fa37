"""Potential reconstruction from a Jost function by damped Gauss-Newton."""

from dataclasses import asdict, dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from . import _kernels
from .exceptions import DiracResError, DomainError, ValidationError
from .forward import jost_function, jost_profile
from .jost import verify_jost
from .potential import Potential, metric_P
from .perturbation import ShiftSet, perturb_multiplier, validate_shifts
from .resonances import Rect, find_resonances

INITS = ("born", "zero", "supplied")


@dataclass
class ReconstructionOptions:
    """Solver settings.

    ``k_band`` and ``n_k`` set the real frequency grid on which the
    residual (1/pi) int |psi(k, q) - psi_target(k)|^2 dk is sampled; by
    Plancherel it equals the squared L2(0, gamma) profile mismatch. The
    band should exceed n_cells * pi / (2 gamma) so every cell is resolved.
    """

    n_cells: int = 128
    max_iters: int = 15
    damping: float = 1e-3
    tol_residual: float = 1e-24
    tol_step: float = 1e-9
    init: str = "born"
    k_band: float = None
    n_k: int = None

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValidationError("max_iters must be at least 1")
        if self.damping < 0:
            raise ValidationError("damping must be nonnegative")
        if not (self.tol_residual > 0 and self.tol_step > 0):
            raise ValidationError("tolerances must be positive")
        if self.init not in INITS:
            raise ValidationError(f"init must be one of {INITS}")
        if self.n_cells < 1:
            raise ValidationError("n_cells must be positive")

    def band(self, gamma):
        k_band = self.k_band if self.k_band is not None else 3.0 * self.n_cells * np.pi / (2 * gamma)
        # the residual integrand is the transform of a function on [0, gamma]:
        # a spacing below pi/(2 gamma) samples it without aliasing
        n_k = self.n_k if self.n_k is not None else int(2 ** np.ceil(np.log2(2 * k_band * gamma / 1.2)))
        return float(k_band), int(n_k)


def frequency_grid(k_band, n_k):
    dk = 2.0 * k_band / n_k
    return -k_band + (np.arange(n_k) + 0.5) * dk, dk


def born_init(f, n_cells=None):
    """q0 = conj(g) averaged over cells (first-order inversion of psi = 1 + F conj q)."""
    n = f.n_intervals if n_cells is None else n_cells
    edges = np.linspace(0.0, f.gamma, n + 1)
    # cell averages of the piecewise-linear interpolant via its running integral
    s = f.nodes
    g = np.conj(f.g_samples)
    cum = np.concatenate([[0.0], np.cumsum(0.5 * (g[1:] + g[:-1]) * np.diff(s))])
    at = np.interp(edges, s, cum.real) + 1j * np.interp(edges, s, cum.imag)
    return Potential(f.gamma, np.diff(at) / np.diff(edges))


def residual_vector(q, k, dk, target):
    psi, _ = _kernels.jost_function_many(q.samples, q.step, k.astype(np.complex128))
    return np.sqrt(dk / np.pi) * (psi - target)


def jacobian(q, k, dk):
    """Complex residual and its derivatives with respect to Re q_j and Im q_j.

    Returns ``(r, d_re, d_im)`` with ``d_re`` of shape (n_k, n_cells).
    """
    psi, d_re, d_im = _kernels.jost_sensitivities(q.samples, q.step, k.astype(np.complex128))
    w = np.sqrt(dk / np.pi)
    return w * psi, w * d_re.T, w * d_im.T


def jacobian_check(q, k, *, eps=1e-6, cells=None, seed=0):
    """Largest relative mismatch between sensitivity columns and central differences."""
    rng = np.random.default_rng(seed)
    cells = rng.choice(q.n_cells, size=min(5, q.n_cells), replace=False) if cells is None else cells
    _, d_re, d_im = _kernels.jost_sensitivities(q.samples, q.step, k.astype(np.complex128))
    worst = 0.0
    for j in cells:
        for part, col in ((1.0, d_re[j]), (1j, d_im[j])):
            up = q.samples.copy()
            dn = q.samples.copy()
            up[j] += part * eps
            dn[j] -= part * eps
            fd = (jost_function(Potential(q.gamma, up), k) - jost_function(Potential(q.gamma, dn), k)) / (2 * eps)
            worst = max(worst, float(np.max(np.abs(fd - col)) / max(np.max(np.abs(col)), 1e-300)))
    return worst


@dataclass
class ReconstructionReport:
    converged: bool
    iterations: int
    residual_history: list
    damping_history: list
    message: str
    k_band: float
    n_k: int
    options: dict = field(default_factory=dict)


def _target_values(f_target, k):
    return f_target.eval(k.astype(np.complex128))


def reconstruct(f_target, opts=None, *, q_init=None, verify=True):
    """Recover the potential whose Jost function is ``f_target``.

    Levenberg-Marquardt on R(q) = (1/pi) int_{-K}^{K} |psi(k, q) - psi_t(k)|^2 dk
    over the real and imaginary parts of the cell values. The damping is
    halved after an accepted step and multiplied by four after a rejected
    one (floor 1e-12), so accepted residuals never increase.

    Returns ``(potential, report)``; non-convergence is reported, not raised.
    """
    opts = opts or ReconstructionOptions()
    if verify and not f_target.verified:
        rep = verify_jost(f_target)
        if not rep.passed:
            raise DomainError("target is not a Jost function: " + "; ".join(rep.failures))
    gamma = f_target.gamma
    k_band, n_k = opts.band(gamma)
    k, dk = frequency_grid(k_band, n_k)
    target = np.sqrt(dk / np.pi) * _target_values(f_target, k)

    if opts.init == "supplied":
        if q_init is None:
            raise ValidationError("init='supplied' needs q_init")
        q = Potential(gamma, q_init.samples) if q_init.n_cells == opts.n_cells else _regrid(q_init, opts.n_cells)
    elif opts.init == "born":
        q = born_init(f_target, opts.n_cells)
    else:
        q = Potential(gamma, np.zeros(opts.n_cells))

    r = residual_vector(q, k, dk, target / np.sqrt(dk / np.pi))
    res = float(np.vdot(r, r).real)
    history, damp_hist = [res], []
    lam = opts.damping
    converged = res < opts.tol_residual
    message = "initial guess meets the residual tolerance" if converged else ""
    it = 0
    n = opts.n_cells
    while not converged and it < opts.max_iters:
        it += 1
        psi_w, d_re, d_im = jacobian(q, k, dk)
        r = psi_w - target
        jac = np.block([[d_re.real, d_im.real], [d_re.imag, d_im.imag]])
        rr = np.concatenate([r.real, r.imag])
        jtj = jac.T @ jac
        jtr = jac.T @ rr
        scale = np.trace(jtj) / jtj.shape[0]
        accepted = False
        for _ in range(30):
            a = jtj + lam * scale * np.eye(2 * n)
            delta = np.linalg.solve(a, -jtr)
            cand = Potential(gamma, q.samples + delta[:n] + 1j * delta[n:])
            rc = residual_vector(cand, k, dk, target / np.sqrt(dk / np.pi))
            rc_val = float(np.vdot(rc, rc).real)
            if rc_val <= res:
                accepted = True
                break
            lam = lam * 4.0
        damp_hist.append(lam)
        if not accepted:
            message = "no decrease found along the damped direction"
            break
        step = float(np.sqrt(cand.step * np.sum(np.abs(cand.samples - q.samples) ** 2)))
        q, res = cand, rc_val
        history.append(res)
        lam = max(lam / 2.0, 1e-12)
        if res < opts.tol_residual:
            converged, message = True, "residual tolerance reached"
        elif step < opts.tol_step * max(1.0, q.l2_norm()):
            converged, message = True, "step tolerance reached"
    if not converged and not message:
        message = f"stopped after {opts.max_iters} iterations"
    report = ReconstructionReport(converged, it, history, damp_hist, message, k_band, n_k, asdict(opts))
    return q, report


def _regrid(q, n):
    if q.n_cells % n == 0:
        return q.coarsen(q.n_cells // n)
    if n % q.n_cells == 0:
        return q.refine(n // q.n_cells)
    x = (np.arange(n) + 0.5) * q.gamma / n
    idx = np.minimum((x / q.step).astype(int), q.n_cells - 1)
    return Potential(q.gamma, q.samples[idx])


def locate_shifts(f, s, radius=0.05):
    """Replace each k_old by the zero of ``f`` found nearest to it."""
    pairs = []
    for k, r in s.pairs:
        top = min(k.imag + radius, -1e-9)
        found = find_resonances(f, Rect(k.real - radius, k.real + radius, k.imag - radius, top)).k
        if found.size == 0:
            raise DomainError(f"no zero of the source within {radius} of {k}")
        pairs.append((found[np.argmin(np.abs(found - k))], r))
    return ShiftSet(tuple(pairs), s.declared_tail_l1)


@dataclass
class StabilityReport:
    scales: list
    l1: list
    distances: list
    residuals: list
    notes: list
    uniqueness_gap: float = float("nan")
    curve: list = field(default_factory=list)


def stability_experiment(q_o, s, scales, opts=None, *, k_max=None, n_k=16384, witness=True):
    """Forward, relocate zeros, reconstruct and measure ||q_t - q_o|| for each scale t.

    The shift set ``s`` must hold zeros of the forward Jost function of
    ``q_o``. With ``witness`` the perturbed function at the first nonzero
    scale is reconstructed from both a Born and a zero start and the gap
    between the two results is reported.
    """
    opts = opts or ReconstructionOptions(n_cells=q_o.n_cells)
    k_max = k_max if k_max is not None else opts.band(q_o.gamma)[0] * 1.5
    f_o = verify_jost(jost_profile(q_o, k_max, n_k)).jost
    s = locate_shifts(f_o, s)
    validate_shifts(f_o, s)
    out = StabilityReport([], [], [], [], [])
    first = None
    for t in scales:
        st = s.scaled(t)
        try:
            f_t = perturb_multiplier(f_o, st) if t != 0 else f_o
            q_t, rep = reconstruct(f_t, opts)
        except DiracResError as exc:
            out.notes.append(f"t = {t}: {type(exc).__name__}: {exc}")
            continue
        d = metric_P(q_t, q_o, resample=True)
        out.scales.append(float(t))
        out.l1.append(st.l1)
        out.distances.append(d)
        out.residuals.append(rep.residual_history[-1])
        out.curve.append((st.l1, d))
        if first is None and t != 0:
            first = (f_t, q_t)
    if witness and first is not None:
        f_t, q_born = first
        zero_opts = ReconstructionOptions(**{**asdict(opts), "init": "zero"})
        q_zero, _ = reconstruct(f_t, zero_opts)
        out.uniqueness_gap = metric_P(q_born, q_zero)
    return out


class PotentialReconstructor(BaseEstimator):
    """Estimator wrapper around :func:`reconstruct`.

    ``fit(jost)`` stores ``potential_`` and ``report_``; ``predict(k)``
    evaluates the Jost function of the fitted potential.
    """

    def __init__(self, n_cells=128, max_iters=15, damping=1e-3, tol_residual=1e-24, tol_step=1e-9,
                 init="born", k_band=None, n_k=None):
        self.n_cells = n_cells
        self.max_iters = max_iters
        self.damping = damping
        self.tol_residual = tol_residual
        self.tol_step = tol_step
        self.init = init
        self.k_band = k_band
        self.n_k = n_k

    def fit(self, f_target, y=None, q_init=None):
        opts = ReconstructionOptions(**self.get_params())
        self.potential_, self.report_ = reconstruct(f_target, opts, q_init=q_init)
        return self

    def predict(self, k):
        return jost_function(self.potential_, k)

    def score(self, f_target, y=None):
        """Negative profile residual against ``f_target``."""
        k_band, n_k = ReconstructionOptions(**self.get_params()).band(f_target.gamma)
        k, dk = frequency_grid(k_band, n_k)
        r = residual_vector(self.potential_, k, dk, f_target.eval(k.astype(np.complex128)))
        return -float(np.vdot(r, r).real)
