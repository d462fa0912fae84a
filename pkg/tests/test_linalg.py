import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from esdsim.errors import DimensionMismatch, NonSquare
from esdsim.linalg import (
    SIGMA_MINUS,
    SIGMA_PLUS,
    SIGMA_X,
    SIGMA_Y,
    add,
    dagger,
    eigenvalues,
    embed_operator,
    kron,
    matmul,
    real_spectrum,
    scale,
    trace,
)
from esdsim.states import bell_phi

from oracles import charpoly, hermitian_roots_by_bisection


def _random(rng, n, m=None):
    m = n if m is None else m
    return rng.normal(size=(n, m)) + 1j * rng.normal(size=(n, m))


def test_kron_identity():
    np.testing.assert_array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))


def test_kron_sigma_y_corner():
    assert kron(SIGMA_Y, SIGMA_Y)[0, 3] == -1


def test_kron_diagonal():
    np.testing.assert_array_equal(kron(np.diag([1, 2]), np.diag([3, 4])), np.diag([3, 4, 6, 8]))


def test_kron_associative_and_trace():
    rng = np.random.default_rng(1)
    # Gaussian integers: every product is exact, so equality is bitwise
    a, b, c = (rng.integers(-9, 9, (n, n)) + 1j * rng.integers(-9, 9, (n, n)) for n in (2, 3, 2))
    np.testing.assert_array_equal(kron(kron(a, b), c), kron(a, kron(b, c)))
    a, b = _random(rng, 2), _random(rng, 3)
    t = trace(kron(a, b))
    assert abs(t - trace(a) * trace(b)) <= 1e-12 * abs(t)


def test_dagger():
    np.testing.assert_array_equal(dagger(np.eye(3)), np.eye(3))
    np.testing.assert_array_equal(dagger([[0, 1], [0, 0]]), [[0, 0], [1, 0]])
    a = _random(np.random.default_rng(2), 4)
    np.testing.assert_array_equal(dagger(dagger(a)), a)


def test_matmul_trace_and_ladder():
    assert trace(np.eye(4)) == 4
    # sigma_- sigma_+ = |0><0|; basis here is (|1>, |0>)
    np.testing.assert_array_equal(matmul(SIGMA_MINUS, SIGMA_PLUS), np.diag([0, 1]))
    a = _random(np.random.default_rng(3), 3)
    assert trace(matmul(a, dagger(a))).real >= 0


def test_dimension_errors():
    with pytest.raises(DimensionMismatch):
        matmul(np.eye(2), np.eye(3))
    with pytest.raises(DimensionMismatch):
        add(np.eye(2), np.eye(3))
    with pytest.raises(NonSquare):
        eigenvalues(np.ones((2, 3)))
    with pytest.raises(NonSquare):
        trace(np.ones((2, 3)))
    np.testing.assert_array_equal(scale(2, np.eye(2)), 2 * np.eye(2))


def test_eigenvalues_diagonal():
    np.testing.assert_allclose(np.sort(eigenvalues(np.diag([3, 1, 2, 0])).real), [0, 1, 2, 3])


def test_eigenvalues_bell_wootters_product():
    rho = bell_phi(0).matrix
    s = kron(SIGMA_Y, SIGMA_Y)
    ev = real_spectrum(rho @ s @ rho.conj() @ s)
    np.testing.assert_allclose(ev, [1, 0, 0, 0], atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("n", [2, 4, 8, 12])
def test_eigenvalues_match_charpoly_bisection(seed, n):
    a = _random(np.random.default_rng(seed), n)
    h = (a + a.conj().T) / 2
    ev = eigenvalues(h)
    assert np.abs(ev.imag).max() < 1e-10
    np.testing.assert_allclose(np.sort(ev.real), hermitian_roots_by_bisection(h), atol=1e-7)


def test_eigenvalues_are_charpoly_roots_for_nonhermitian():
    a = _random(np.random.default_rng(7), 4)
    c = charpoly(a)
    for lam in eigenvalues(a):
        assert abs(np.polyval(c, lam)) < 1e-10 * np.abs(c).max()


@settings(max_examples=50, deadline=None)
@given(st.integers(min_value=1, max_value=16), st.integers(min_value=0, max_value=2**31))
def test_eigenvalue_sum_is_trace(n, seed):
    a = _random(np.random.default_rng(seed), n)
    h = (a + a.conj().T) / 2
    ev = eigenvalues(h)
    assert abs(ev.sum() - np.trace(h)) < 1e-10 * max(1.0, np.abs(h).sum())
    assert np.abs(ev.imag).max() < 1e-10 * max(1.0, np.abs(h).max())


def test_eigenvalues_rejects_large():
    with pytest.raises(ValueError):
        eigenvalues(np.eye(17))


def test_embed_operator_matches_kron():
    rng = np.random.default_rng(4)
    a, b = _random(rng, 2), _random(rng, 3)
    np.testing.assert_allclose(embed_operator(a, (2, 3), [0]), kron(a, np.eye(3)))
    np.testing.assert_allclose(embed_operator(b, (2, 3), [1]), kron(np.eye(2), b))
    # non-adjacent pair: factors (0, 2) of a 2x2x3 space
    full = embed_operator(kron(a, b), (2, 2, 3), [0, 2])
    psi = [rng.normal(size=d) + 0j for d in (2, 2, 3)]
    lhs = full @ kron(psi[0][:, None], psi[1][:, None], psi[2][:, None]).ravel()
    rhs = kron((a @ psi[0])[:, None], psi[1][:, None], (b @ psi[2])[:, None]).ravel()
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_embed_sigma_x_on_middle():
    u = embed_operator(SIGMA_X, (2, 2, 3), [1])
    np.testing.assert_array_equal(u, kron(np.eye(2), SIGMA_X, np.eye(3)))
