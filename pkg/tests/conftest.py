import numpy as np
import pytest

from diracres import Potential, jost_profile, verify_jost

_CRITERIA = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def q_one():
    return Potential.constant(1.0, 1.0, 256)


@pytest.fixture(scope="session")
def psi_one(q_one):
    """Verified Jost function of q == 1 on [0, 1]."""
    return verify_jost(jost_profile(q_one, 200.0, 16384)).jost


@pytest.fixture(scope="session")
def q_smooth():
    return Potential.from_function(lambda x: 0.8 * np.exp(1j * x) * (1.2 - x), 1.0, 128)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def zeros_one(psi_one):
    """Resonances of q == 1 with |Re k| <= 42, found by the argument-principle finder."""
    from diracres import ResonanceFinder

    return ResonanceFinder(radius=42.0).fit(psi_one).resonances_


@pytest.fixture(scope="session")
def shifts3():
    """Moves the three smallest-modulus resonances of q == 1 by 0.05 in varied directions."""
    from diracres import ShiftSet
    from oracles import constant_zeros

    z = constant_zeros(10)
    z = z[np.argsort(np.abs(z))][:3]
    return ShiftSet.from_arrays(z, 0.05 * np.exp(1j * np.array([0.3, 1.9, -2.2])))


@pytest.fixture(scope="session")
def psi_shifted(psi_one, shifts3):
    from diracres import perturb_multiplier

    return perturb_multiplier(psi_one, shifts3)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    detail = "; ".join(str(v) for k, v in item.user_properties if k == "detail")
    results = item.config.stash.setdefault(_CRITERIA, {})
    results[mark.args[0]] = (mark.args[1], "PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_CRITERIA, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        name, verdict, detail = results[n]
        terminalreporter.write_line(f"{verdict} {n:2d} {name}: {detail}")
