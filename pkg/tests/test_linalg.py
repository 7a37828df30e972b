import numpy as np
import pytest
import scipy.sparse as sps

from utilities.errors import DimensionError, FactorizationError
from utilities.linalg import (BandedSymmetricOperator, DenseOperator, IdentityOperator, KroneckerOperator,
                              KroneckerSumOperator, ProductOperator, SparseOperator, StackedOperator,
                              banded_cholesky, cgls_solve, cholesky_factor, difference_matrix,
                              difference_operators_2d, gmrf_precision, image_side, load_matrix_csv,
                              save_matrix_csv, second_difference_matrix)


def _adjoint_gap(op, rng):
    x = rng.standard_normal(op.cols)
    y = rng.standard_normal(op.rows)
    return abs(op.apply(x) @ y - x @ op.apply_transpose(y)) / max(1.0, abs(op.apply(x) @ y))


def test_adjoint_identity_holds_for_every_operator(rng):
    left = rng.standard_normal((4, 3))
    right = sps.random(5, 2, density=0.6, random_state=1)
    operators = [
        DenseOperator(rng.standard_normal((6, 4))),
        SparseOperator(sps.random(7, 5, density=0.4, random_state=2)),
        KroneckerOperator(left, right),
        KroneckerSumOperator(second_difference_matrix(5), scale=2.5),
        StackedOperator([DenseOperator(rng.standard_normal((3, 4))), IdentityOperator(4)]),
        ProductOperator(DenseOperator(rng.standard_normal((3, 6))), DenseOperator(rng.standard_normal((6, 4)))),
        DenseOperator(rng.standard_normal((5, 3))).scaled(rng.uniform(0.5, 2.0, 5)),
        DenseOperator(rng.standard_normal((5, 3))).T,
    ]
    for op in operators:
        assert _adjoint_gap(op, rng) < 1e-10, repr(op)


def test_kronecker_matches_dense_product(rng):
    left = rng.standard_normal((3, 4))
    right = rng.standard_normal((2, 5))
    op = KroneckerOperator(left, right)
    x = rng.standard_normal(op.cols)
    np.testing.assert_allclose(op.apply(x), np.kron(left, right) @ x, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(op.to_dense(), np.kron(left, right), atol=1e-12)


def test_apply_rejects_wrong_length():
    op = DenseOperator(np.ones((3, 2)))
    with pytest.raises(DimensionError, match=r"\(2,\)"):
        op.apply(np.ones(3))
    with pytest.raises(DimensionError):
        op.apply_transpose(np.ones(2))


def test_difference_matrix_squares_to_second_difference():
    for n in (1, 2, 7, 30):
        d = difference_matrix(n).to_dense()
        assert d.shape == (n + 1, n)
        np.testing.assert_array_equal(d.T @ d, second_difference_matrix(n).toarray())


def test_2d_differences_square_to_kronecker_sum():
    side = 5
    horizontal, vertical = difference_operators_2d(side)
    h, v = horizontal.to_dense(), vertical.to_dense()
    expected = KroneckerSumOperator(second_difference_matrix(side)).to_dense()
    np.testing.assert_allclose(h.T @ h + v.T @ v, expected, atol=1e-12)


def test_gmrf_precision_is_scaled_laplacian():
    q = gmrf_precision(6, 3.0)
    assert isinstance(q, BandedSymmetricOperator)
    np.testing.assert_allclose(q.to_dense(), 3.0 * second_difference_matrix(6).toarray())
    q2 = gmrf_precision(16, 2.0, dims=2)
    assert q2.shape == (16, 16)
    with pytest.raises(ValueError):
        gmrf_precision(5, 0.0)
    with pytest.raises(ValueError):
        gmrf_precision(15, 1.0, dims=2)


def test_image_side():
    assert image_side(64) == 8
    with pytest.raises(ValueError):
        image_side(10)


def test_cholesky_reconstructs_spd_matrix(rng):
    a = rng.standard_normal((8, 8))
    m = a @ a.T + 8 * np.eye(8)
    factor = cholesky_factor(m)
    np.testing.assert_allclose(factor.reconstruct(), m, rtol=1e-12, atol=1e-10)
    assert np.allclose(np.tril(factor.lower), factor.lower)
    np.testing.assert_allclose(factor.logdet(), np.linalg.slogdet(m)[1], rtol=1e-12)
    rhs = rng.standard_normal(8)
    np.testing.assert_allclose(m @ factor.solve(rhs), rhs, atol=1e-9)


def test_cholesky_reports_failing_pivot():
    m = np.diag([4.0, 1.0, -2.0, 3.0])
    with pytest.raises(FactorizationError) as error:
        cholesky_factor(m)
    assert error.value.pivot == 2
    assert "index 2" in str(error.value)
    assert isinstance(error.value, np.linalg.LinAlgError)


def test_banded_cholesky_matches_dense_logdet():
    q = gmrf_precision(10, 2.0)
    factor = banded_cholesky(q)
    np.testing.assert_allclose(factor.logdet(), np.linalg.slogdet(q.to_dense())[1], rtol=1e-12)
    q2 = gmrf_precision(9, 1.5, dims=2)
    np.testing.assert_allclose(banded_cholesky(q2).logdet(), np.linalg.slogdet(q2.to_dense())[1], rtol=1e-10)


def test_cgls_matches_dense_least_squares(rng):
    for _ in range(5):
        a = rng.standard_normal((50, 20))
        b = rng.standard_normal(50)
        result = cgls_solve(a, b, max_iter=500, tol=1e-11)
        expected = np.linalg.lstsq(a, b, rcond=None)[0]
        assert result.converged
        np.testing.assert_allclose(result.x, expected, rtol=1e-8, atol=1e-8)


def test_cgls_zero_rhs_and_iteration_cap(rng):
    a = rng.standard_normal((30, 10))
    zero = cgls_solve(a, np.zeros(30))
    assert zero.converged and zero.iterations == 0
    np.testing.assert_array_equal(zero.x, np.zeros(10))

    capped = cgls_solve(a, rng.standard_normal(30), max_iter=2, tol=1e-14)
    assert not capped.converged
    assert capped.iterations == 2


def test_cgls_stops_cleanly_when_the_search_direction_vanishes():
    # op p underflows to zero while op^T rhs does not
    tiny = DenseOperator(1e-120 * np.eye(3))
    result = cgls_solve(tiny, np.ones(3), max_iter=50)
    assert result.converged
    assert result.iterations == 0
    np.testing.assert_array_equal(result.x, np.zeros(3))


def test_cgls_validates_input(rng):
    a = rng.standard_normal((5, 3))
    with pytest.raises(DimensionError):
        cgls_solve(a, np.ones(4))
    with pytest.raises(ValueError):
        cgls_solve(a, np.ones(5), tol=0.0)


def test_matrix_csv_round_trip(tmp_path, rng):
    m = rng.standard_normal((4, 3))
    path = tmp_path / "A.csv"
    save_matrix_csv(path, DenseOperator(m))
    np.testing.assert_array_equal(load_matrix_csv(path), m)
