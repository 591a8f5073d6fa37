import numpy as np
import pytest

from diracres import JostFunction, metric_J, verify_jost
from diracres.exceptions import IncompatibleDomainError, RangeOverflowError, ValidationError
from diracres.jost import filon_transform, profile_l1, profile_l2


def test_filon_is_exact_for_linear_profiles():
    gamma, a, b = 1.3, 0.4 - 0.2j, 1.1 + 0.5j
    s = np.linspace(0, gamma, 7)
    z = np.array([0.0, 0.01, 3.2, -7 + 0.4j, 2 - 1.5j])
    w = 2j * z
    ws = np.where(z == 0, 1, w)
    e = np.exp(ws * gamma)
    exact = np.where(z == 0, a * gamma + b * gamma ** 2 / 2,
                     a * (e - 1) / ws + b * (gamma * e / ws - (e - 1) / ws ** 2))
    np.testing.assert_allclose(filon_transform(a + b * s, s[1], z), exact, rtol=1e-12, atol=1e-14)


def test_derivative_matches_finite_differences(psi_one):
    z = np.array([0.7 - 0.3j, -4 + 1j])
    h = 1e-4
    fd = (psi_one.eval(z + h) - psi_one.eval(z - h)) / (2 * h)
    np.testing.assert_allclose(psi_one.derivative(z), fd, rtol=1e-6)
    v, d = psi_one.eval_with_derivative(z)
    np.testing.assert_allclose(v, psi_one(z))
    np.testing.assert_allclose(d, psi_one.derivative(z))


def test_plancherel_constant(rng):
    # ||F g||_{L2(R)} = sqrt(pi) ||g||_{L2}; smooth profiles vanishing at both ends decay fast in k
    gamma = 1.0
    s = np.linspace(0, gamma, 4097)
    k = np.linspace(-300, 300, 24001)
    for _ in range(3):
        c = rng.normal(size=4) + 1j * rng.normal(size=4)
        g = np.sin(np.pi * s / gamma) ** 4 * np.polyval(c, s)
        fg = filon_transform(g, s[1], k)
        lhs = np.sqrt(np.trapezoid(np.abs(fg) ** 2, k))
        assert lhs / profile_l2(g, s[1]) == pytest.approx(np.sqrt(np.pi), rel=1e-6)


def test_norm_helpers_on_constant():
    g = np.full(11, 2.0 + 0j)
    assert profile_l2(g, 0.1) == pytest.approx(2.0)
    assert profile_l1(g, 0.1) == pytest.approx(2.0)


def test_identity_and_validation():
    f = JostFunction.identity(1.0, 8)
    assert f(3.0 + 1j) == 1.0
    with pytest.raises(ValidationError):
        JostFunction(1.0, [1.0])
    with pytest.raises(ValidationError):
        JostFunction(0.0, np.zeros(4))


def test_overflow_guard():
    with pytest.raises(RangeOverflowError):
        JostFunction(1.0, np.ones(5)).eval(-400j)


def test_metric_on_nested_grids():
    a = JostFunction(1.0, np.linspace(0, 1, 5))
    b = JostFunction(1.0, np.linspace(0, 1, 9))
    assert metric_J(a, b) == pytest.approx(0.0, abs=1e-15)
    assert metric_J(a, JostFunction(1.0, np.linspace(0, 1, 5) + 1)) == pytest.approx(1.0)
    with pytest.raises(IncompatibleDomainError):
        metric_J(a, JostFunction(1.0, np.zeros(8)))
    with pytest.raises(IncompatibleDomainError):
        metric_J(a, JostFunction(2.0, np.zeros(5)))


def test_resample_keeps_the_function(psi_one):
    np.testing.assert_allclose(psi_one.resample(8192)(np.array([0.3, 5.0])), psi_one(np.array([0.3, 5.0])),
                               atol=1e-12)
    assert not psi_one.resample(8192).verified


def test_verify_accepts_forward_output(psi_one):
    assert psi_one.verified
    rep = verify_jost(psi_one)
    assert rep.passed and rep.zero_count == 0


def test_verify_rejects_identity():
    rep = verify_jost(JostFunction.identity())
    assert not rep.passed
    assert "profile support does not reach gamma" in rep.failures
    assert rep.jost is None


def test_verify_finds_upper_half_plane_zero():
    # psi = 1 - (e^{2iz} - 1)/(iz) vanishes at z = iy with y = 1 - e^{-2y}
    rep = verify_jost(JostFunction(1.0, np.full(257, -2.0 + 0j)))
    assert not rep.passed
    assert rep.zero_count == 1
