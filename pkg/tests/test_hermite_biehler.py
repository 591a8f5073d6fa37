import numpy as np
import pytest

from diracres import JostFunction, from_jost, hb_distance, hb_inequality, metric_J, perturb_hb
from diracres.exceptions import DomainError, IncompatibleDomainError
from diracres.hermite_biehler import hb_sample_points


def test_definition_and_derivative(psi_one):
    e = from_jost(psi_one)
    k = np.array([0.3 + 0.2j, -1.5 + 2j])
    np.testing.assert_allclose(e(k), -1j * np.exp(-1j * k) * psi_one.eval(k))
    h = 1e-5
    fd = (e(k + h) - e(k - h)) / (2 * h)
    np.testing.assert_allclose(e.derivative(k), fd, rtol=1e-6)


def test_unverified_input_needs_waiver():
    f = JostFunction.identity(1.0)
    with pytest.raises(DomainError):
        from_jost(f)
    assert from_jost(f, waive_support=True).gamma == 1.0


def test_sample_points_lie_in_region():
    z = hb_sample_points(2.0, n_random=200, n_near=20)
    assert z.size == 220
    assert np.all(z.imag > 0) and np.all(z.imag <= 10)
    assert np.all(np.abs(z[:200]) <= 20.0)


def test_inequality_forward_and_perturbed(psi_one, psi_shifted):
    for f in (psi_one, psi_shifted):
        rep = hb_inequality(from_jost(f))
        assert rep.passed and rep.n_points == 220 and rep.min_ratio > 1


def test_inequality_fails_for_a_zero_in_the_upper_half_plane(psi_one):
    class Flipped:
        gamma = 1.0

        def __call__(self, z):
            return np.asarray(z) - 1j

    rep = hb_inequality(Flipped(), points=[1j, 2 + 0.5j])
    assert not rep.passed


def test_distance_matches_metric_j(psi_one, shifts3):
    e_o = from_jost(psi_one)
    e = perturb_hb(e_o, shifts3)
    assert abs(hb_distance(e, e_o) - metric_J(e.jost, psi_one)) < 1e-8
    assert hb_distance(e_o, e_o) == 0.0


def test_distance_needs_same_gamma(psi_one):
    other = from_jost(JostFunction.identity(2.0), waive_support=True)
    with pytest.raises(IncompatibleDomainError):
        hb_distance(from_jost(psi_one), other)


def test_trivial_function_is_a_pure_exponential():
    e = from_jost(JostFunction.identity(1.0), waive_support=True)
    assert abs(e(1j)) == pytest.approx(np.e) and abs(e(-1j)) == pytest.approx(np.exp(-1))
    np.testing.assert_allclose(e(np.array([0.5, 2.0])), -1j * np.exp(-1j * np.array([0.5, 2.0])))


def test_zeros_and_real_modulus_match_psi(psi_one):
    from diracres import Rect, find_resonances

    e = from_jost(psi_one)
    rect = Rect(-10, 10, -3, -0.01)
    ze, zp = find_resonances(e, rect).k, find_resonances(psi_one, rect).k
    assert ze.size == zp.size
    assert np.max(np.abs(np.sort_complex(ze) - np.sort_complex(zp))) < 1e-8
    k = np.linspace(-20, 20, 41)
    np.testing.assert_allclose(np.abs(e(k)), np.abs(psi_one.eval(k)))


def test_perturbation_moves_zeros_and_empty_is_identity(psi_one, shifts3):
    from diracres import ShiftSet

    e_o = from_jost(psi_one)
    assert hb_distance(perturb_hb(e_o, ShiftSet()), e_o) == 0.0
    k, r = shifts3.pairs[0]
    e = perturb_hb(e_o, ShiftSet(((k, r),)))
    assert abs(e(k + r)) < 1e-6
    d = [hb_distance(perturb_hb(e_o, shifts3.scaled(t)), e_o) for t in (0.5, 0.25, 0.125)]
    assert d[2] / d[1] == pytest.approx(0.5, abs=0.02) and d[1] / d[0] == pytest.approx(0.5, abs=0.02)
