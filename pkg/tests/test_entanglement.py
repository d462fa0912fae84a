import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esdsim.dynamics import evolve_analytic
from esdsim.entanglement import (
    concurrence,
    concurrence_xstate,
    optimal_phase,
    probability_phi,
    witness_operator,
    witness_reading,
    wootters_eigenvalues,
    _wootters_roots,
)
from esdsim.errors import NotXForm
from esdsim.states import (
    DensityMatrix,
    InitialState,
    XStateParams,
    bell_phi,
    initial_state_density,
    random_product_state,
    random_xstate,
    xstate_to_density,
)

from oracles import local_phase

EVOLVED = XStateParams(1 / 8, 1 / 8, 5 / 8, 1 / 4)


@pytest.mark.parametrize("theta", [0.0, 1.0, math.pi, -2.5])
def test_bell_is_maximally_entangled(theta):
    assert concurrence(bell_phi(theta)) == pytest.approx(1, abs=1e-12)


def test_product_state_has_zero_concurrence():
    assert concurrence(initial_state_density(InitialState(1, 0))) == 0


def test_unequal_superposition():
    # 2 |alpha beta| with alpha^2 = 1/3
    rho = initial_state_density(InitialState(math.sqrt(1 / 3), math.sqrt(2 / 3)))
    assert concurrence(rho) == pytest.approx(2 * math.sqrt(2) / 3, abs=1e-12)


@pytest.mark.parametrize("seed", range(20))
def test_random_pure_state_against_determinant_formula(seed):
    rng = np.random.default_rng(seed)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    # basis (11, 10, 01, 00): amplitudes a11 d, a10 c, a01 b, a00 a
    d, c, b, a = psi
    expected = 2 * abs(a * d - b * c)
    assert concurrence(DensityMatrix(np.outer(psi, psi.conj()))) == pytest.approx(expected, abs=1e-12)


def test_spectrum_routes_agree():
    rng = np.random.default_rng(5)
    for _ in range(20):
        g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        m = g @ g.conj().T
        rho = DensityMatrix(m / np.trace(m))
        np.testing.assert_allclose(np.sort(_wootters_roots(rho.matrix) ** 2)[::-1], wootters_eigenvalues(rho), atol=1e-12)
        assert concurrence(rho, method="eigen") == pytest.approx(concurrence(rho), abs=1e-9)


def test_xstate_closed_form_examples():
    assert concurrence_xstate(EVOLVED) == pytest.approx(1 / 4)
    assert concurrence(xstate_to_density(EVOLVED)) == pytest.approx(1 / 4, abs=1e-12)
    assert concurrence_xstate(XStateParams(0.3, 0.1, 0.5, 0.1)) == 0
    assert concurrence_xstate(XStateParams(0.5, 0, 0.5, 0.5)) == 1


@settings(max_examples=300, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_general_matches_closed_form(seed):
    p = random_xstate(seed)
    assert abs(concurrence(xstate_to_density(p)) - concurrence_xstate(p)) <= 1e-9


def test_probability_phi_examples():
    assert probability_phi(bell_phi(0.8), 0.8) == pytest.approx(1)
    vacuum = initial_state_density(InitialState(1, 0))
    for theta in np.linspace(0, 2 * math.pi, 7):
        assert probability_phi(vacuum, theta) == pytest.approx(0.5)
        assert witness_reading(vacuum, theta).expectation == pytest.approx(0, abs=1e-15)
    # (1 - 1/4 + 1/2) / 2
    assert probability_phi(xstate_to_density(EVOLVED), 0.0) == pytest.approx(5 / 8)


def test_probability_is_witness_trace():
    rho = xstate_to_density(random_xstate(3))
    for theta in (0.1, 2.0):
        w = np.real(np.trace(rho.matrix @ witness_operator(theta)))
        assert w == pytest.approx(witness_reading(rho, theta).expectation, abs=1e-14)


def test_witness_reading_fields():
    r = witness_reading(bell_phi(1.1), 1.1)
    assert r.expectation == pytest.approx(-1)
    assert r.expectation == 1 - 2 * r.probability
    r = witness_reading(xstate_to_density(EVOLVED), 0.0)
    assert r.expectation == pytest.approx(-1 / 4)


@pytest.mark.parametrize("seed", range(30))
def test_witness_nonnegative_on_separable(seed):
    rho = random_product_state(seed)
    for theta in np.linspace(0, 2 * math.pi, 32, endpoint=False):
        assert witness_reading(rho, theta).expectation >= -1e-9
    assert concurrence(rho) <= 1e-9


@pytest.mark.parametrize("theta0", [0.0, 0.7, 3.0, 5.5, -1.0])
def test_optimal_phase_is_preparation_phase(theta0):
    rho = initial_state_density(InitialState(0.6, 0.8, theta0))
    theta, p_max = optimal_phase(rho)
    assert theta == pytest.approx(theta0 % (2 * math.pi), abs=1e-12)
    assert p_max == pytest.approx((1 + 2 * 0.48) / 2)


def test_optimal_phase_real_positive_z():
    assert optimal_phase(xstate_to_density(EVOLVED))[0] == 0


@pytest.mark.parametrize("seed", range(10))
def test_optimal_phase_beats_grid_search(seed):
    rho = xstate_to_density(random_xstate(seed))
    _, p_max = optimal_phase(rho)
    grid = np.linspace(0, 2 * math.pi, 10_000, endpoint=False)
    best = max(probability_phi(rho, t) for t in grid)
    assert best <= p_max + 1e-12
    assert best >= p_max - 1e-6


def test_optimal_phase_requires_xform():
    m = np.eye(4) / 4
    m[1, 2] = m[2, 1] = 0.1
    with pytest.raises(NotXForm):
        optimal_phase(DensityMatrix(m))


@pytest.mark.parametrize("a2", np.linspace(0, 1, 7))
@pytest.mark.parametrize("tau", np.linspace(0, 4, 9))
def test_concurrence_is_twice_excess_probability(a2, tau):
    s = InitialState.from_populations(a2, 1 - a2, 1.3)
    rho = xstate_to_density(evolve_analytic(s.xstate(), 1.0, tau))
    c = concurrence(rho)
    p = probability_phi(rho, s.theta)
    assert abs(c - max(0.0, 2 * p - 1)) <= 1e-9
    _, p_max = optimal_phase(rho)
    if p_max >= 0.5:
        assert abs(c - 2 * (p_max - 0.5)) <= 1e-9
    else:
        assert c == 0


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi))
def test_concurrence_invariant_under_local_phases(seed, t1, t2):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    g[:, 2:] *= 0.1  # push towards entangled, low-rank states
    m = g @ g.conj().T
    rho = DensityMatrix(m / np.trace(m))
    u = local_phase(t1, t2)
    rotated = DensityMatrix(u @ rho.matrix @ u.conj().T)
    assert abs(concurrence(rotated) - concurrence(rho)) <= 1e-10
