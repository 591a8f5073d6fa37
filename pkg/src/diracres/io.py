"""JSON and CSV files for potentials, Jost functions, resonances, shifts and reports.

Complex numbers are stored as ``[re, im]`` pairs. Every writer embeds a
``config`` block and its SHA-256 ``fingerprint`` so outputs can be traced to
the settings that produced them. Floats are written with ``repr`` precision,
so a load/save round trip is exact.
"""

import csv
import hashlib
import json
from pathlib import Path

import numpy as np

from .exceptions import FileFormatError
from .forward import ScatteringSamples
from .hermite_biehler import HermiteBiehler
from .jost import JostFunction
from .perturbation import ShiftSet
from .potential import Potential
from .resonances import Rect, ResonanceList

FORMAT_VERSION = 1


def fingerprint(config):
    blob = json.dumps(config or {}, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def pairs(z):
    z = np.asarray(z, dtype=np.complex128).ravel()
    return [[float(v.real), float(v.imag)] for v in z]


def unpairs(rows):
    a = np.asarray(rows, dtype=float)
    if a.ndim != 2 or a.shape[1] != 2:
        raise FileFormatError("expected a list of [re, im] pairs")
    return a[:, 0] + 1j * a[:, 1]


def _cplx(pair):
    return complex(float(pair[0]), float(pair[1]))


def _write(path, kind, body, config):
    doc = {"kind": kind, "version": FORMAT_VERSION, **body,
           "config": config or {}, "fingerprint": fingerprint(config)}
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")
    return doc


def read_json(path, kind=None):
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: top level must be an object")
    if kind is not None and doc.get("kind", kind) != kind:
        raise FileFormatError(f"{path}: holds a {doc['kind']!r} document, expected {kind!r}")
    return doc


def _field(doc, name, path):
    try:
        return doc[name]
    except KeyError:
        raise FileFormatError(f"{path}: missing field {name!r}") from None


def save_potential(path, q, config=None):
    return _write(path, "potential", {"gamma": q.gamma, "step": q.step, "samples": pairs(q.samples)}, config)


def load_potential(path):
    doc = read_json(path, "potential")
    return Potential(_field(doc, "gamma", path), unpairs(_field(doc, "samples", path)), doc.get("step"))


def _jost_body(f):
    return {"gamma": f.gamma, "step": f.step, "g_samples": pairs(f.g_samples), "leakage": f.leakage}


def save_jost(path, f, config=None):
    return _write(path, "jost", _jost_body(f), config)


def load_jost(path, kind="jost"):
    """Load a Jost function; the ``verified`` flag is never trusted from disk."""
    doc = read_json(path, kind)
    f = JostFunction(_field(doc, "gamma", path), unpairs(_field(doc, "g_samples", path)), doc.get("leakage", 0.0))
    step = doc.get("step")
    if step is not None and not np.isclose(step, f.step, rtol=1e-12, atol=0):
        raise FileFormatError(f"{path}: step {step} does not match gamma / n_intervals")
    return f


def save_hb(path, e, config=None):
    return _write(path, "hermite-biehler", _jost_body(e.jost), config)


def load_hb(path):
    return HermiteBiehler(load_jost(path, "hermite-biehler"))


def save_smatrix(path, s, config=None):
    body = {"gamma": s.gamma, "k_max": s.k_max, "n_k": s.n_k, "dk": 2 * s.k_max / s.n_k,
            "values": pairs(s.values)}
    return _write(path, "s-matrix", body, config)


def load_smatrix(path):
    doc = read_json(path, "s-matrix")
    return ScatteringSamples(_field(doc, "gamma", path), _field(doc, "k_max", path),
                             unpairs(_field(doc, "values", path)))


def save_resonances(path, rl, config=None):
    body = {"region": rl.region.as_dict() if rl.region is not None else None,
            "count_residual": rl.count_residual,
            "items": [{"k": [float(k.real), float(k.imag)], "mult": int(m)} for k, m in rl]}
    return _write(path, "resonances", body, config)


def load_resonances(path):
    doc = read_json(path, "resonances")
    items = _field(doc, "items", path)
    region = doc.get("region")
    return ResonanceList(np.array([_cplx(i["k"]) for i in items], dtype=np.complex128),
                         np.array([int(i.get("mult", 1)) for i in items], dtype=int),
                         Rect(**region) if region else None, doc.get("count_residual", 0.0))


def save_shifts(path, s, config=None):
    body = {"pairs": [{"k_old": [k.real, k.imag], "rho": [r.real, r.imag]} for k, r in s.pairs],
            "declared_tail_l1": s.declared_tail_l1}
    return _write(path, "shifts", body, config)


def load_shifts(path):
    doc = read_json(path, "shifts")
    raw = _field(doc, "pairs", path)
    try:
        pairs_ = tuple((_cplx(p["k_old"]), _cplx(p["rho"])) for p in raw)
    except (KeyError, TypeError, IndexError) as exc:
        raise FileFormatError(f"{path}: each pair needs k_old and rho as [re, im]") from exc
    return ShiftSet(pairs_, float(doc.get("declared_tail_l1", 0.0)))


def save_report(path, *, curve=(), residual_history=(), converged=False, config=None, **extra):
    body = {"curve": [[float(a), float(b)] for a, b in curve],
            "residual_history": [float(r) for r in residual_history],
            "converged": bool(converged), **extra}
    return _write(path, "report", body, config)


def load_report(path):
    return read_json(path, "report")


def write_csv(path, header, rows, config=None):
    """CSV with a leading ``# fingerprint`` comment line."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# fingerprint {fingerprint(config)}\n")
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
