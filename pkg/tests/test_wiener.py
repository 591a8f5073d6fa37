import numpy as np
import pytest

from diracres import WienerElement, exp_element, log_element, multiply, norm, spectrum_test
from diracres.exceptions import ConvergenceError, DomainError, IncompatibleDomainError
from diracres.wiener import (LOG_BOUND, atom, atom_log, causal_convolution, atom_norm, log_element_contour,
                             log_norm_bound, simpson_weights)
from oracles import random_element


def test_unit_norm_and_simpson_weights():
    assert norm(WienerElement.unit()) == 1.0
    for n in range(2, 12):
        w = simpson_weights(n)
        assert w.sum() == pytest.approx(n - 1)
        if n >= 4:  # exact for cubics once Simpson or the 3/8 rule applies
            s = np.linspace(0, 1, n)
            assert (w * s ** 3).sum() / (n - 1) == pytest.approx(0.25, rel=1e-12)


@pytest.mark.parametrize("k0, rho, expected", [(-1j, 0.1, 0.2), (-4j, 0.1, 0.075)])
def test_atom_norm_matches_closed_form(k0, rho, expected):
    w = atom(k0, rho, horizon=12.0)
    assert norm(w.with_constant(0.0)) == pytest.approx(expected, rel=1e-6)
    assert atom_norm(k0, rho) == pytest.approx(expected)


def test_atom_domain_and_trivial_cases():
    with pytest.raises(DomainError):
        atom(1j, 0.1)
    with pytest.raises(DomainError):
        atom_log(-1j, 2j)
    assert norm(atom(-1j, 0.0).with_constant(0.0)) == 0.0
    assert norm(atom_log(-1j, 0.0)) == 0.0


def test_atom_frequency_values(rng):
    k0, rho = -1j, 0.1
    w = atom(k0, rho, step=0.005)
    k = rng.uniform(-20, 20, 20)
    np.testing.assert_allclose(w(k), 1 + rho / (k0 - k), atol=1e-6)


def test_convolution_of_exponentials():
    step = 0.01
    s = np.arange(301) * step
    a, b = np.exp(-s), np.exp(-2 * s)
    np.testing.assert_allclose(causal_convolution(a, b, step), np.exp(-s) - np.exp(-2 * s), atol=1e-10)


def test_multiply_unit_and_axioms(rng):
    w1, w2, w3 = (random_element(rng, 0.5, c=1.0) for _ in range(3))
    unit = WienerElement.unit(0.01, w1.horizon)
    np.testing.assert_array_equal(multiply(w1, unit).h_samples, w1.h_samples)
    a = multiply(multiply(w1, w2), w3).h_samples
    b = multiply(w1, multiply(w2, w3)).h_samples
    assert np.max(np.abs(a - b)) < 1e-8 * np.max(np.abs(a))
    c, d = multiply(w1, w2).h_samples, multiply(w2, w1).h_samples
    assert np.max(np.abs(c - d)) < 1e-8 * np.max(np.abs(c))


def test_multiply_needs_equal_steps():
    a = WienerElement(1.0, np.ones(11), 0.1)
    b = WienerElement(1.0, np.ones(21), 0.05)
    with pytest.raises(IncompatibleDomainError):
        multiply(a, b)
    assert multiply(a, b, resample=True).step == 0.05


def test_multiply_frequency_check(rng):
    w1, w2 = random_element(rng, 0.8, c=1.0), random_element(rng, 0.6, c=0.5)
    k = rng.uniform(-15, 15, 20)
    np.testing.assert_allclose(multiply(w1, w2)(k), w1(k) * w2(k), atol=1e-4)


def test_submultiplicative(rng):
    for _ in range(100):
        w1 = random_element(rng, rng.uniform(0.1, 2), c=rng.normal())
        w2 = random_element(rng, rng.uniform(0.1, 2), c=rng.normal())
        assert norm(multiply(w1, w2)) <= norm(w1) * norm(w2) * (1 + 1e-6)


def test_spectrum_examples():
    inv, mod, lim = spectrum_test(WienerElement.unit())
    assert inv and lim == 1
    assert spectrum_test(atom(-1j, 0.9 - 0.5j)).invertible
    assert not spectrum_test(WienerElement(0.0, np.ones(11), 0.1)).invertible


def test_log_of_unit_is_zero():
    assert norm(log_element(WienerElement.unit())) == pytest.approx(0.0, abs=1e-12)


def test_log_rejects_wrong_constant_and_cut():
    with pytest.raises(DomainError):
        log_element(WienerElement(2.0, np.zeros(11), 0.1))
    with pytest.raises(DomainError):
        log_element(atom(-1j, 3j))  # zero at 2i: the values wind around the origin


def test_log_of_atom_matches_closed_form():
    w = atom(-1j, 0.1)
    lg = log_element(w)
    ref = atom_log(-1j, 0.1, step=w.step, horizon=w.horizon)
    assert norm(lg - ref) < 1e-5


def test_atom_log_matches_numerical_inverse_transform():
    k0, rho, step = -2j, 0.3, 0.005
    ref = atom_log(k0, rho, step=step)
    n = 1 << 20
    big_k = np.pi / (2 * step) * 8
    dk = 2 * big_k / n
    k = -big_k + dk * np.arange(n)
    x = rho / (k0 - k)
    # the atom itself transforms exactly; only the remainder log(1 + x) - x goes through the FFT
    rem = np.log1p(x) - x
    s = np.arange(n) * np.pi / (n * dk)
    inv = (dk / np.pi) * np.fft.fft(rem) * np.exp(2j * big_k * s)
    m = ref.n_nodes
    grid = np.arange(m) * step
    idx = np.rint(grid / (s[1] - s[0])).astype(int)
    num = 2j * rho * np.exp(-2j * k0 * grid) + inv[idx]
    err = np.sqrt(step * np.sum(simpson_weights(m) * np.abs(num - ref.h_samples) ** 2))
    assert err < 1e-4


def test_atom_log_obeys_log_bound():
    k0, rho = -1j, 0.1
    assert norm(atom_log(k0, rho)) <= LOG_BOUND * norm(atom(k0, rho).with_constant(0.0))


def test_exp_examples(rng):
    assert norm(exp_element(WienerElement(0.0, np.zeros(11), 0.1)) - WienerElement.unit(0.1, 1.0)) == 0.0
    w = atom(-1j, 0.1)
    e = exp_element(atom_log(-1j, 0.1, step=w.step, horizon=w.horizon))
    assert norm(e - w) < 1e-5
    f = random_element(rng, 0.7)
    k = rng.uniform(-10, 10, 20)
    np.testing.assert_allclose(exp_element(f)(k), np.exp(f(k)), atol=1e-5)
    with pytest.raises(DomainError):
        exp_element(WienerElement(1.0, np.zeros(11), 0.1))


def test_exp_uses_scaling_and_squaring(rng):
    f = random_element(rng, 6.0)
    k = rng.uniform(-5, 5, 5)
    np.testing.assert_allclose(exp_element(f)(k), np.exp(f(k)), rtol=1e-4)
    with pytest.raises(ConvergenceError):
        exp_element(f, max_terms=3, max_halvings=0)


def test_exp_log_round_trip(rng):
    for _ in range(3):
        w = random_element(rng, 0.2, c=1.0)
        assert norm(exp_element(log_element(w)) - w) < 1e-6


def test_log_norm_bound(rng):
    small = random_element(rng, 1e-3, c=1.0)
    assert log_norm_bound(small).ratio == pytest.approx(1.0, abs=1e-2)
    assert log_norm_bound(WienerElement.unit()).ratio == 0.0
    with pytest.raises(DomainError):
        log_norm_bound(random_element(rng, 0.3, c=1.0))
    for _ in range(20):
        k0 = rng.uniform(-3, 3) - 1j * rng.uniform(0.8, 3)
        rho = 0.05 * (rng.normal() + 1j * rng.normal())
        a = atom(k0, rho)
        if norm(a.with_constant(0.0)) < 0.25:
            assert log_norm_bound(a).bound_ok


def test_contour_log_agrees_with_frequency_route(rng):
    w = random_element(rng, 0.2, step=0.005, c=1.0)
    assert norm(log_element_contour(w) - log_element(w)) < 1e-5
    with pytest.raises(DomainError):
        log_element_contour(random_element(rng, 0.6, c=1.0))
