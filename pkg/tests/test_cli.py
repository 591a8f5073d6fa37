import json

import numpy as np
import pytest

from diracres import Potential, ShiftSet, io
from diracres.cli import main
from oracles import constant_zeros


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    io.save_potential(d / "q.json", Potential.constant(1.0, 1.0, 64))
    z = constant_zeros(4)
    z = z[np.argsort(np.abs(z))]
    io.save_shifts(d / "s.json", ShiftSet.from_arrays([z[0]], [0.05]))
    io.save_shifts(d / "bad.json", ShiftSet.from_arrays([z[0]], [2j]))
    assert main(["forward", "--potential", str(d / "q.json"), "--out", str(d / "f.json"),
                 "--kmax", "200", "--nk", "8192"]) == 0
    return d


def run(d, *args):
    return main([a.format(d=d) for a in args])


def test_forward_writes_both_files(work, capsys):
    assert (work / "f.smatrix.json").exists()
    assert json.loads((work / "f.json").read_text())["kind"] == "jost"


def test_existing_output_and_missing_input(work):
    assert run(work, "forward", "--potential", "{d}/q.json", "--out", "{d}/f.json") == 1
    assert run(work, "verify", "--jost", "{d}/nope.json") == 1
    assert run(work, "perturb", "--jost", "{d}/f.json", "--shifts", "{d}/s.json", "--out", "{d}/f.json") == 2


def test_zero_potential_is_outside_the_class(work):
    io.save_potential(work / "zero.json", Potential(1.0, np.zeros(8)))
    assert run(work, "forward", "--potential", "{d}/zero.json", "--out", "{d}/fz.json") == 2


def test_verify_and_hb(work, capsys):
    assert run(work, "verify", "--jost", "{d}/f.json") == 0
    assert "passed" in capsys.readouterr().out
    assert run(work, "hb", "--jost", "{d}/f.json", "--out", "{d}/e.json") == 0
    assert io.load_hb(work / "e.json").gamma == 1.0


def test_resonances_and_counting(work, capsys):
    assert run(work, "resonances", "--jost", "{d}/f.json", "--out", "{d}/r.json", "--rect=-6,6,-3,-0.01") == 0
    rl = io.load_resonances(work / "r.json")
    z = constant_zeros(6)
    z = z[(np.abs(z.real) < 6) & (z.imag > -3)]
    assert rl.total == z.size
    assert run(work, "counting", "--resonances", "{d}/r.json", "--out", "{d}/n.csv", "--radius", "6") == 0
    assert (work / "n.csv").read_text().startswith("# fingerprint")


def test_perturb_routes_and_rejection(work, capsys):
    assert run(work, "perturb", "--jost", "{d}/f.json", "--shifts", "{d}/s.json", "--out", "{d}/g.json") == 0
    assert run(work, "perturb", "--jost", "{d}/f.json", "--shifts", "{d}/s.json", "--out", "{d}/g2.json",
               "--route", "logexp") == 0
    a, b = io.load_jost(work / "g.json"), io.load_jost(work / "g2.json")
    assert np.max(np.abs(a.g_samples - b.g_samples)) < 1e-5
    capsys.readouterr()
    assert run(work, "perturb", "--jost", "{d}/f.json", "--shifts", "{d}/bad.json", "--out", "{d}/g3.json") == 2
    assert "offending pair" in capsys.readouterr().err


def test_reconstruct(work):
    assert run(work, "reconstruct", "--jost", "{d}/f.json", "--out", "{d}/qr.json", "--cells", "16") == 0
    q = io.load_potential(work / "qr.json")
    np.testing.assert_allclose(q.samples, 1.0, atol=1e-3)
    assert io.load_report(work / "qr.report.json")["converged"]


def test_stability(work):
    assert run(work, "stability", "--potential", "{d}/q.json", "--shifts", "{d}/s.json",
               "--out", "{d}/st.csv", "--scales", "1,0.5", "--nk", "8192") == 0
    rep = io.load_report(work / "st.report.json")
    d = [row[1] for row in rep["curve"]]
    assert len(d) == 2 and d[1] < d[0]
    assert rep["uniqueness_gap"] < 1e-6


def test_outputs_are_deterministic(work):
    cmd = ["forward", "--potential", "{d}/q.json", "--out", "{d}/d.json", "--kmax", "200", "--nk", "8192",
           "--overwrite"]
    assert run(work, *cmd) == 0
    first = (work / "d.json").read_bytes(), (work / "d.smatrix.json").read_bytes()
    assert run(work, *cmd) == 0
    assert first == ((work / "d.json").read_bytes(), (work / "d.smatrix.json").read_bytes())
