import numpy as np
import pytest

from conftest import make_rng
from polyexp.errors import SingularMatrix
from polyexp.numlin import EPS, condition_number, eig, eig_condition, invariant_subspace, lstsq, solve, svd_values

# multiplication matrix of x1 printed for the second worked example
M1_THREE_POINT = np.array([[5 / 4, -5 / 16, 0], [1, 91 / 20, 96 / 25], [0, -1, 1 / 5]])


def test_eig_diagonal():
    res = eig(np.diag([1.0, 2.0, 3.0]))
    assert sorted(res.values.real) == [1, 2, 3]
    assert np.allclose(np.linalg.norm(res.vectors, axis=0), 1)


def test_eig_example_matrix():
    values = np.sort_complex(eig(M1_THREE_POINT).values)
    assert np.allclose(values, [1, 2, 3], atol=1e-12)


def test_eig_backward_error_on_random_matrices():
    rng = make_rng("eig")
    for n in (1, 4, 10, 25):
        A = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        res = eig(A)
        assert res.backward_error <= 1e3 * EPS * n
        normA = np.linalg.norm(A, 2)
        for lam, v in zip(res.values, res.vectors.T):
            assert np.linalg.norm(A @ v - lam * v) <= (res.backward_error + n * EPS) * normA


def test_eig_rejects_non_finite():
    with pytest.raises(ValueError):
        eig([[np.nan, 0], [0, 1]])


def test_eig_condition_of_normal_and_defective_like():
    _, cond, _ = eig_condition(np.diag([1.0, 2.0]))
    assert np.allclose(cond, 1)
    _, cond, _ = eig_condition([[1.0, 1e6], [0.0, 1.0 + 1e-3]])
    assert np.all(cond > 1e8)


def test_svd_values():
    assert np.array_equal(svd_values(np.zeros((3, 2))), [0, 0])
    assert np.allclose(svd_values(np.eye(4)), np.ones(4))
    rng = make_rng("svd")
    u, v = rng.standard_normal(5), rng.standard_normal(3)
    s = svd_values(np.outer(u, v))
    assert len(s) == 3
    assert s[0] == pytest.approx(np.linalg.norm(u) * np.linalg.norm(v))
    assert np.all(s[1:] < 1e-14 * s[0])
    assert np.all(np.diff(svd_values(rng.standard_normal((6, 6)))) <= 0)


def test_solve():
    B = np.arange(6.0).reshape(3, 2)
    assert np.allclose(solve(np.eye(3), B), B)
    assert np.allclose(solve([[2.0]], [4.0]), [2.0])
    rng = make_rng("solve")
    A = rng.standard_normal((8, 8)) + 8 * np.eye(8)
    B = rng.standard_normal((8, 3))
    X = solve(A, B)
    assert np.linalg.norm(A @ X - B) <= 1e-12 * np.linalg.norm(A) * np.linalg.norm(X)


def test_solve_singular_reports_condition():
    with pytest.raises(SingularMatrix) as info:
        solve([[1.0, 1.0], [1.0, 1.0]], [1.0, 2.0])
    assert info.value.condition > 1e14


def test_condition_and_lstsq():
    assert condition_number(np.diag([1.0, 1e-3])) == pytest.approx(1e3)
    A = np.vstack([np.eye(2), np.ones((1, 2))])
    x = lstsq(A, [1.0, 2.0, 3.0])
    assert np.allclose(x, [1, 2])


def test_invariant_subspace():
    A = np.diag([1.0, 5.0, 2.0])
    Z = invariant_subspace(A, lambda z: abs(z) < 3)
    assert Z.shape == (3, 2)
    assert np.allclose(Z.conj().T @ Z, np.eye(2))
    assert np.allclose(np.abs(Z[1]), 0)


def test_deterministic():
    rng = make_rng("determinism")
    A = rng.standard_normal((7, 7))
    a, b = eig(A), eig(A)
    assert np.array_equal(a.values, b.values) and np.array_equal(a.vectors, b.vectors)
