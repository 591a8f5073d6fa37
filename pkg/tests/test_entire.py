import csv

import numpy as np
import pytest

from diracres import HadamardData, hadamard_eval, levinson_slope, lindelof_check, perturbed_count_compare
from diracres.entire import counting_function, counting_rows, fit_tail, sort_zeros, write_counting_csv
from diracres.exceptions import DegenerateError, ValidationError
from oracles import constant_jost, constant_zeros


def disk_points(radius=5.0, n=41):
    x, y = np.meshgrid(np.linspace(-radius, radius, n) + 1e-3, np.linspace(-radius, radius, n))
    k = (x + 1j * y).ravel()
    return k[np.abs(k) <= radius]


def test_sort_by_modulus_then_real_part():
    np.testing.assert_array_equal(sort_zeros([2, 1j, -1, 1]), [-1, 1j, 1, 2])


def test_trivial_products():
    assert hadamard_eval(HadamardData([]), 3.0 + 1j) == 1.0
    assert hadamard_eval(HadamardData([-1j]), -1j) == 0.0
    assert hadamard_eval(HadamardData([], C=2.0, p=2, kappa=0.5), 2.0) == pytest.approx(8 * np.exp(1j))
    with pytest.raises(DegenerateError):
        hadamard_eval(HadamardData([], C=0.0), 1.0)
    with pytest.raises(ValidationError):
        HadamardData([0.0, 1.0])


def test_polynomial_is_reproduced_exactly(rng):
    roots = rng.normal(size=5) + 1j * rng.normal(size=5)
    k = rng.normal(size=7) + 1j * rng.normal(size=7)
    c = np.prod(-roots)
    np.testing.assert_allclose(hadamard_eval(HadamardData(roots, C=c), k), np.polyval(np.poly(roots), k),
                               rtol=1e-12)


def test_truncated_product_of_constant_potential():
    k = disk_points()
    ref = constant_jost(1.0, 1.0, k)
    errs, tails = [], []
    for r in (20, 30, 40):
        h = HadamardData(constant_zeros(r), C=np.e, kappa=1.0)
        val, est = hadamard_eval(h, k, return_tail=True)
        errs.append(np.max(np.abs(val / ref - 1)))
        tails.append(np.max(np.abs(hadamard_eval(h, k, tail=True, density=2 / np.pi) / ref - 1)))
        assert est.max() > 0
    # nested truncations improve monotonically; the tail model makes |k| <= 5 good to 1e-2 at r = 30
    assert errs[0] > errs[1] > errs[2]
    assert tails[1] < 1e-2
    assert tails[0] > tails[1] > tails[2]


def test_tail_model_on_pairs():
    model = fit_tail(constant_zeros(30), density=2 / np.pi)
    assert model.first_moment.real == 0
    assert model.second_moment > 0
    assert model.radius > np.abs(constant_zeros(30)[-1])


def test_counting_function_examples():
    z = np.array([1, 2j, -3])
    assert counting_function(z, 0.0) == 0
    assert counting_function(z, 2.0) == 2
    np.testing.assert_array_equal(counting_function(z, [0.5, 1, 3]), [0, 1, 3])
    assert counting_function(z, 2.0, multiplicities=[2, 1, 1]) == 3
    r = np.linspace(0, 4, 50)
    assert np.all(np.diff(counting_function(z, r)) >= 0)


def test_levinson_slope_of_arithmetic_progression():
    gamma = 1.5
    z = np.arange(1, 400) * np.pi / (2 * gamma) - 1j
    slope, _ = levinson_slope(z, 10.0, 300.0)
    assert slope == pytest.approx(2 * gamma / np.pi, rel=1e-2)
    assert levinson_slope([], 1.0, 2.0) == (0.0, 0.0)
    with pytest.raises(DegenerateError):
        levinson_slope(z, 5.0, 5.0)


def test_levinson_slope_of_constant_potential():
    slope, _ = levinson_slope(constant_zeros(), 10.0, 40.0)
    assert 0.85 <= slope * np.pi / 2 <= 1.15


def test_lindelof_examples():
    n = np.arange(1, 200)
    assert lindelof_check(-1j * n ** 2.0).passed
    rep = lindelof_check(n.astype(complex))
    assert "partial sums of 1/k_n keep growing" in rep.flags
    good = lindelof_check(constant_zeros(40))
    assert good.passed, good.flags
    assert good.max_partial_sum < 1.0


def test_sandwich_examples():
    zo = constant_zeros(40)
    assert perturbed_count_compare(zo, zo, 0.0).passed
    assert perturbed_count_compare(zo, zo - 0.1j, 0.1).passed
    rep = perturbed_count_compare(zo, zo[::-1], 0.1)
    assert not rep.precondition_ok and not rep.passed


def test_counting_csv(tmp_path):
    path = tmp_path / "n.csv"
    write_counting_csv(path, constant_zeros(), 1.0, [5.0, 10.0])
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["r", "n_r", "normalized"]
    assert counting_rows(constant_zeros(), 1.0, [5.0])[0] == (5.0, 2, pytest.approx(2 * np.pi / 10))
    assert len(rows) == 3
