"""Command-line interface: ``dirac-res <command> [options]``."""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import io
from .entire import counting_rows, geometric_radii, levinson_slope
from .exceptions import DiracResError, ShiftRejectedError, ValidationError
from .forward import jost_profile, scattering_samples, verify_smatrix
from .hermite_biehler import from_jost, hb_inequality
from .jost import verify_jost
from .perturbation import perturb_logexp, perturb_multiplier
from .potential import validate_membership
from .reconstruction import ReconstructionOptions, reconstruct, stability_experiment
from .resonances import Rect, default_rect, find_resonances

EXIT_OK, EXIT_IO, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2, 3

EPILOG = """\
exit codes:
  0  success
  1  input/output problem (missing, unreadable or malformed file; output exists without --overwrite)
  2  validation failure (input outside the admissible class, rejected shift, failed verification)
  3  numerical failure (unresolved transform, failed convergence of a numerical stage)

The environment variable DIRAC_RES_THREADS caps the number of worker threads.
"""


class StageError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _floats(text, n=None):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise argparse.ArgumentTypeError(f"expected {n} numbers, got {len(vals)}")
    return vals


def _rect(text):
    return _floats(text, 4)


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _inputs(args):
    return [Path(getattr(args, a)).resolve() for a in ("potential", "jost", "shifts", "resonances")
            if getattr(args, a, None)]


def _out(args, path=None):
    """Output path checked against inputs and existing files."""
    p = Path(path or args.out)
    if p.resolve() in _inputs(args) and not args.overwrite:
        raise StageError(EXIT_VALIDATION, f"output {p} would overwrite an input (use --overwrite)")
    if p.exists() and not args.overwrite:
        raise StageError(EXIT_IO, f"{p} exists (use --overwrite)")
    return p


def _sibling(path, suffix):
    p = Path(path)
    return p.with_name(p.stem + suffix)


def _config(args):
    skip = {"func", "overwrite"}
    return {"command": args.command, **{k: v for k, v in sorted(vars(args).items()) if k not in skip}}


def _stage(name, func, *a, **kw):
    """Run one pipeline stage, tagging failures with its name."""
    try:
        return func(*a, **kw)
    except ShiftRejectedError as exc:
        pair = f" (offending pair k_old = {exc.pair[0]}, rho = {exc.pair[1]})" if exc.pair else ""
        raise StageError(EXIT_VALIDATION, f"{name}: {exc}{pair}") from exc
    except (OSError, io.FileFormatError) as exc:
        raise StageError(EXIT_IO, f"{name}: {exc}") from exc
    except ValidationError as exc:
        raise StageError(EXIT_VALIDATION, f"{name}: {exc}") from exc
    except (DiracResError, ArithmeticError) as exc:
        raise StageError(EXIT_NUMERICAL, f"{name}: {type(exc).__name__}: {exc}") from exc


def _load_verified(args):
    f = _stage("load", io.load_jost, args.jost)
    rep = _stage("verify", verify_jost, f)
    if not rep.passed:
        raise StageError(EXIT_VALIDATION, "verify: " + "; ".join(rep.failures))
    return rep.jost


def _search_rect(args, gamma):
    return Rect(*args.rect) if args.rect else default_rect(gamma, args.radius)


def cmd_forward(args):
    q = _stage("load", io.load_potential, args.potential)
    rep = validate_membership(q)
    if not rep.passed:
        raise StageError(EXIT_VALIDATION, "membership: " + "; ".join(rep.failures))
    out = _out(args)
    s_out = _out(args, _sibling(out, ".smatrix.json"))
    f = _stage("jost_profile", jost_profile, q, args.kmax, args.nk)
    s = _stage("scattering", scattering_samples, q, args.kmax, args.nk)
    srep = _stage("verify_smatrix", verify_smatrix, s)
    cfg = _config(args)
    io.save_jost(out, f, cfg)
    io.save_smatrix(s_out, s, cfg)
    print(f"leakage {f.leakage:.3e}")
    print(f"W(S) {srep.winding}")
    print(f"wrote {out} and {s_out}")
    return EXIT_OK


def cmd_resonances(args):
    f = _stage("load", io.load_jost, args.jost)
    out = _out(args)
    rl = _stage("find_resonances", find_resonances, f, _search_rect(args, f.gamma), args.tol)
    io.save_resonances(out, rl, _config(args))
    for k, m in rl:
        print(f"{k.real: .12f} {k.imag: .12f}  x{m}")
    print(f"{rl.total} resonance(s) in {rl.region}")
    return EXIT_OK


def cmd_perturb(args):
    f = _load_verified(args)
    s = _stage("load", io.load_shifts, args.shifts)
    out = _out(args)
    route = perturb_logexp if args.route == "logexp" else perturb_multiplier
    g = _stage("perturb", route, f, s)
    io.save_jost(out, g, _config(args))
    print(f"relocated {len(s)} zero(s); leakage {g.leakage:.3e}; wrote {out}")
    return EXIT_OK


def cmd_reconstruct(args):
    f = _load_verified(args)
    out = _out(args)
    rep_out = _out(args, _sibling(out, ".report.json"))
    opts = _stage("options", ReconstructionOptions, n_cells=args.cells, max_iters=args.max_iters,
                  tol_step=args.tol, init=args.init, k_band=args.band)
    q, rep = _stage("reconstruct", reconstruct, f, opts)
    cfg = _config(args)
    io.save_potential(out, q, cfg)
    io.save_report(rep_out, residual_history=rep.residual_history, converged=rep.converged,
                   iterations=rep.iterations, message=rep.message, config=cfg)
    print(f"{rep.message}; {rep.iterations} iteration(s); residual {rep.residual_history[-1]:.3e}")
    return EXIT_OK if rep.converged else EXIT_NUMERICAL


def cmd_verify(args):
    f = _stage("load", io.load_jost, args.jost)
    rep = _stage("verify", verify_jost, f)
    print(f"support mass {rep.support_mass:.3e}; zeros in upper half-plane {rep.zero_count}; "
          f"min |psi| on R {rep.min_real_modulus:.3e}")
    if not rep.passed:
        raise StageError(EXIT_VALIDATION, "verify: " + "; ".join(rep.failures))
    print("passed")
    return EXIT_OK


def cmd_hb(args):
    f = _load_verified(args)
    out = _out(args)
    e = from_jost(f)
    rep = hb_inequality(e, seed=args.seed)
    print(f"min |E(z)|/|E(conj z)| = {rep.min_ratio:.6f} over {rep.n_points} points")
    if not rep.passed:
        raise StageError(EXIT_NUMERICAL, f"hb: inequality fails at {rep.worst_point}")
    io.save_hb(out, e, _config(args))
    return EXIT_OK


def cmd_counting(args):
    if args.resonances:
        rl = _stage("load", io.load_resonances, args.resonances)
        gamma = args.gamma
    else:
        if not args.jost:
            raise StageError(EXIT_VALIDATION, "counting needs --jost or --resonances")
        f = _stage("load", io.load_jost, args.jost)
        gamma = f.gamma
        rl = _stage("find_resonances", find_resonances, f, _search_rect(args, gamma), args.tol)
    out = _out(args)
    zeros = rl.zeros
    r_max = args.radius if args.rect is None else min(abs(args.rect[0]), abs(args.rect[1]))
    radii = geometric_radii(max(r_max / 8, 1e-3), r_max, 20)
    io.write_csv(out, ["r", "n_r", "normalized"], counting_rows(zeros, gamma, radii), _config(args))
    if zeros.size:
        slope, _ = _stage("levinson_slope", levinson_slope, zeros, r_max / 4, r_max)
        print(f"normalized slope {slope * np.pi / (2 * gamma):.4f}")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_stability(args):
    q = _stage("load", io.load_potential, args.potential)
    s = _stage("load", io.load_shifts, args.shifts)
    out = _out(args)
    rep_out = _out(args, _sibling(out, ".report.json"))
    opts = _stage("options", ReconstructionOptions, n_cells=q.n_cells, tol_step=args.tol)
    rep = _stage("stability", stability_experiment, q, s, args.scales, opts, k_max=args.kmax, n_k=args.nk)
    cfg = _config(args)
    rows = [(t, a, b) for t, a, b in zip(rep.scales, rep.l1, rep.distances)]
    io.write_csv(out, ["scale", "l1", "distance"], rows, cfg)
    io.save_report(rep_out, curve=rep.curve, residual_history=rep.residuals, converged=not rep.notes,
                   uniqueness_gap=rep.uniqueness_gap, notes=rep.notes, config=cfg)
    for t, a, b in rows:
        print(f"t = {t:g}: ||rho||_1 = {a:.4g}, ||q_t - q_o|| = {b:.4e}")
    for note in rep.notes:
        print(note, file=sys.stderr)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="dirac-res", description="Resonances and inverse problems for Dirac operators "
                                "with compactly supported potentials.",
                                epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        c = sub.add_parser(name, help=help_, epilog=EPILOG, formatter_class=argparse.RawDescriptionHelpFormatter)
        c.set_defaults(func=func)
        c.add_argument("--overwrite", action="store_true", help="allow replacing existing files")
        return c

    c = add("forward", cmd_forward, "potential -> Jost function and S-matrix files")
    c.add_argument("--potential", required=True)
    c.add_argument("--out", required=True, help="Jost file; the S-matrix goes to <stem>.smatrix.json")
    c.add_argument("--kmax", type=_positive, default=200.0)
    c.add_argument("--nk", type=int, default=16384)

    c = add("resonances", cmd_resonances, "zeros of a Jost function in a rectangle")
    c.add_argument("--jost", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--rect", type=_rect, help="re0,re1,im0,im1 (write --rect=-6,6,-3,-0.01 when it starts with a minus)")
    c.add_argument("--radius", type=_positive, default=20.0, help="default rectangle half-width")
    c.add_argument("--tol", type=_positive, default=1e-10)

    c = add("perturb", cmd_perturb, "relocate zeros listed in a shift file")
    c.add_argument("--jost", required=True)
    c.add_argument("--shifts", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--route", choices=("multiplier", "logexp"), default="multiplier")

    c = add("reconstruct", cmd_reconstruct, "recover a potential from a Jost function")
    c.add_argument("--jost", required=True)
    c.add_argument("--out", required=True, help="potential file; the report goes to <stem>.report.json")
    c.add_argument("--cells", type=int, default=128)
    c.add_argument("--max-iters", type=int, default=15)
    c.add_argument("--init", choices=("born", "zero"), default="born")
    c.add_argument("--band", type=_positive, help="frequency half-band of the residual")
    c.add_argument("--tol", type=_positive, default=1e-9, help="step tolerance")

    c = add("verify", cmd_verify, "check that a file holds a Jost function")
    c.add_argument("--jost", required=True)

    c = add("hb", cmd_hb, "Hermite-Biehler function of a Jost function")
    c.add_argument("--jost", required=True)
    c.add_argument("--out", required=True)
    c.add_argument("--seed", type=int, default=0)

    c = add("counting", cmd_counting, "counting function n(r) as CSV")
    c.add_argument("--jost")
    c.add_argument("--resonances")
    c.add_argument("--gamma", type=_positive, default=1.0, help="support length when reading --resonances")
    c.add_argument("--out", required=True)
    c.add_argument("--rect", type=_rect, help="re0,re1,im0,im1 (use the --rect=... form)")
    c.add_argument("--radius", type=_positive, default=20.0)
    c.add_argument("--tol", type=_positive, default=1e-10)

    c = add("stability", cmd_stability, "distance curve ||q_t - q_o|| against scaled shifts, as CSV")
    c.add_argument("--potential", required=True)
    c.add_argument("--shifts", required=True)
    c.add_argument("--out", required=True, help="CSV; the report goes to <stem>.report.json")
    c.add_argument("--scales", type=_floats, default=[1.0, 0.5, 0.25])
    c.add_argument("--kmax", type=_positive)
    c.add_argument("--nk", type=int, default=16384)
    c.add_argument("--tol", type=_positive, default=1e-9)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
