# Linear algebra underpinning the Markov random field precisions, direct Gaussian sampling
# and the randomize-then-optimize least-squares solves.
#
# Vectors that represent N x N images are column-stacked, so a Kronecker product acts as
#   (A kron B) vec(X) = vec(B X A^T)
# and is applied without ever forming the product matrix.

from dataclasses import dataclass
import logging

import numpy as np
import pandas as pd
import scipy.linalg
import scipy.linalg.lapack
import scipy.sparse as sps

from utilities.errors import DimensionError, FactorizationError

logger = logging.getLogger(__name__)

# Kronecker-structured operators are only materialized up to this image side length
MATERIALIZE_LIMIT = 64


class MatrixOperator:
    """Linear map with an explicit transpose. Subclasses implement `_apply` and `_apply_transpose`."""

    representation = "operator"

    def __init__(self, rows, cols):
        self.rows = int(rows)
        self.cols = int(cols)

    @property
    def shape(self):
        return self.rows, self.cols

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.cols,):
            raise DimensionError(f"{type(self).__name__}.apply", (self.cols,), x.shape)
        return self._apply(x)

    def apply_transpose(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape != (self.rows,):
            raise DimensionError(f"{type(self).__name__}.apply_transpose", (self.rows,), y.shape)
        return self._apply_transpose(y)

    def _apply(self, x):
        raise NotImplementedError

    def _apply_transpose(self, y):
        raise NotImplementedError

    def to_dense(self):
        """
        Materialize the operator by applying it to the columns of the identity.

        :return: {np.ndarray} rows x cols matrix
        """
        dense = np.empty((self.rows, self.cols))
        unit = np.zeros(self.cols)
        for j in range(self.cols):
            unit[j] = 1.0
            dense[:, j] = self._apply(unit)
            unit[j] = 0.0
        return dense

    @property
    def T(self):
        return TransposedOperator(self)

    def scaled(self, weights):
        """Row-scaled operator diag(weights) @ self; a scalar weight scales every row."""
        return RowScaledOperator(self, weights)

    def __matmul__(self, other):
        if isinstance(other, MatrixOperator):
            return ProductOperator(self, other)
        return self.apply(other)

    def __repr__(self):
        return f"{type(self).__name__}({self.rows}x{self.cols})"


class DenseOperator(MatrixOperator):
    representation = "dense"

    def __init__(self, matrix):
        matrix = np.atleast_2d(np.array(matrix, dtype=float))
        super().__init__(*matrix.shape)
        self.matrix = matrix
        self.matrix.setflags(write=False)

    def _apply(self, x):
        return self.matrix @ x

    def _apply_transpose(self, y):
        return self.matrix.T @ y

    def to_dense(self):
        return np.array(self.matrix)


class SparseOperator(MatrixOperator):
    representation = "sparse"

    def __init__(self, matrix):
        matrix = sps.csr_matrix(matrix, dtype=float)
        super().__init__(*matrix.shape)
        self.matrix = matrix
        self._matrix_t = matrix.T.tocsr()

    def _apply(self, x):
        return self.matrix @ x

    def _apply_transpose(self, y):
        return self._matrix_t @ y

    def to_dense(self):
        return self.matrix.toarray()


class BandedSymmetricOperator(SparseOperator):
    """Symmetric matrix with a known half-bandwidth (number of non-zero super-diagonals)."""

    representation = "banded symmetric"

    def __init__(self, matrix, bandwidth):
        super().__init__(matrix)
        if self.rows != self.cols:
            raise DimensionError("BandedSymmetricOperator", "square matrix", self.shape)
        self.bandwidth = int(bandwidth)

    def _apply_transpose(self, y):
        return self.matrix @ y

    def to_banded(self):
        """Upper banded storage as used by LAPACK: ab[bw + i - j, j] = a[i, j] for i <= j."""
        return _upper_band_storage(self.matrix, self.bandwidth)


class KroneckerOperator(MatrixOperator):
    """The Kronecker product left (x) right acting on column-stacked arrays."""

    representation = "kronecker"

    def __init__(self, left, right):
        self.left = _as_matrix(left)
        self.right = _as_matrix(right)
        rows = self.left.shape[0] * self.right.shape[0]
        cols = self.left.shape[1] * self.right.shape[1]
        super().__init__(rows, cols)

    def _apply(self, x):
        # vec(B X A^T) with X of shape (B.cols, A.cols)
        grid = x.reshape(self.right.shape[1], self.left.shape[1], order="F")
        out = self.left @ (self.right @ grid).T
        return np.asarray(out).T.reshape(-1, order="F")

    def _apply_transpose(self, y):
        # vec(B^T Y A) with Y of shape (B.rows, A.rows)
        grid = y.reshape(self.right.shape[0], self.left.shape[0], order="F")
        out = self.left.T @ (self.right.T @ grid).T
        return np.asarray(out).T.reshape(-1, order="F")

    def to_dense(self):
        if max(self.left.shape + self.right.shape) > MATERIALIZE_LIMIT + 1:
            raise MemoryError(f"Refusing to materialize a {self.rows}x{self.cols} Kronecker product")
        return sps.kron(sps.csr_matrix(self.left), sps.csr_matrix(self.right)).toarray()


class KroneckerSumOperator(MatrixOperator):
    """scale * (I_N (x) L_N + L_N (x) I_N) for a symmetric N x N matrix L_N, applied matrix-free."""

    representation = "kronecker sum"

    def __init__(self, base, scale=1.0):
        self.base = sps.csr_matrix(base, dtype=float)
        if self.base.shape[0] != self.base.shape[1]:
            raise DimensionError("KroneckerSumOperator base", "square matrix", self.base.shape)
        self.side = self.base.shape[0]
        self.scale = float(scale)
        super().__init__(self.side ** 2, self.side ** 2)

    def _apply(self, x):
        grid = x.reshape(self.side, self.side, order="F")
        # (I kron L) vec(X) = vec(L X), (L kron I) vec(X) = vec(X L^T) = vec((L X^T)^T)
        out = self.base @ grid + (self.base @ grid.T).T
        return self.scale * np.asarray(out).reshape(-1, order="F")

    def _apply_transpose(self, y):
        return self._apply(y)

    @property
    def bandwidth(self):
        return self.side

    def to_sparse(self):
        identity = sps.identity(self.side, format="csr")
        return self.scale * (sps.kron(identity, self.base) + sps.kron(self.base, identity)).tocsr()

    def to_dense(self):
        if self.side > MATERIALIZE_LIMIT:
            raise MemoryError(f"Refusing to materialize a Kronecker sum of side {self.side} "
                              f"(limit {MATERIALIZE_LIMIT})")
        return self.to_sparse().toarray()

    def to_banded(self):
        return _upper_band_storage(self.to_sparse(), self.bandwidth)


class StackedOperator(MatrixOperator):
    """Vertical stack [A_1; A_2; ...] of operators with a common number of columns."""

    representation = "stacked"

    def __init__(self, blocks):
        blocks = [as_operator(block) for block in blocks]
        cols = {block.cols for block in blocks}
        if len(cols) != 1:
            raise DimensionError("StackedOperator blocks", "equal column counts", sorted(cols))
        super().__init__(sum(block.rows for block in blocks), cols.pop())
        self.blocks = blocks
        self._splits = np.cumsum([block.rows for block in blocks])[:-1]

    def _apply(self, x):
        return np.concatenate([block._apply(x) for block in self.blocks])

    def _apply_transpose(self, y):
        parts = np.split(y, self._splits)
        return sum(block._apply_transpose(part) for block, part in zip(self.blocks, parts))


class RowScaledOperator(MatrixOperator):
    representation = "row scaled"

    def __init__(self, operator, weights):
        operator = as_operator(operator)
        super().__init__(operator.rows, operator.cols)
        self.operator = operator
        weights = np.asarray(weights, dtype=float)
        if weights.ndim == 1 and weights.shape != (operator.rows,):
            raise DimensionError("RowScaledOperator weights", (operator.rows,), weights.shape)
        self.weights = weights

    def _apply(self, x):
        return self.weights * self.operator._apply(x)

    def _apply_transpose(self, y):
        return self.operator._apply_transpose(self.weights * y)


class ProductOperator(MatrixOperator):
    representation = "product"

    def __init__(self, outer, inner):
        if outer.cols != inner.rows:
            raise DimensionError("ProductOperator", outer.cols, inner.rows)
        super().__init__(outer.rows, inner.cols)
        self.outer = outer
        self.inner = inner

    def _apply(self, x):
        return self.outer._apply(self.inner._apply(x))

    def _apply_transpose(self, y):
        return self.inner._apply_transpose(self.outer._apply_transpose(y))


class TransposedOperator(MatrixOperator):
    representation = "transposed"

    def __init__(self, operator):
        super().__init__(operator.cols, operator.rows)
        self.operator = operator

    def _apply(self, x):
        return self.operator._apply_transpose(x)

    def _apply_transpose(self, y):
        return self.operator._apply(y)

    @property
    def T(self):
        return self.operator


class IdentityOperator(MatrixOperator):
    representation = "identity"

    def __init__(self, n):
        super().__init__(n, n)

    def _apply(self, x):
        return np.array(x)

    def _apply_transpose(self, y):
        return np.array(y)


def as_operator(obj):
    """
    Wrap arrays and sparse matrices as MatrixOperator; operators pass through unchanged.

    :param obj: MatrixOperator, scipy sparse matrix or array-like
    :return: {MatrixOperator}
    """
    if isinstance(obj, MatrixOperator):
        return obj
    if sps.issparse(obj):
        return SparseOperator(obj)
    return DenseOperator(obj)


@dataclass(frozen=True)
class CholeskyFactor:
    """Dense lower-triangular factor L with L @ L.T equal to the factorized matrix."""
    lower: np.ndarray

    def reconstruct(self):
        return self.lower @ self.lower.T

    def solve(self, rhs):
        """Solve (L L^T) x = rhs."""
        return scipy.linalg.cho_solve((self.lower, True), rhs)

    def solve_transpose(self, rhs):
        """Solve L^T x = rhs; for standard normal rhs the result has covariance (L L^T)^-1."""
        return scipy.linalg.solve_triangular(self.lower, rhs, trans="T", lower=True)

    def logdet(self):
        return 2.0 * np.sum(np.log(np.diag(self.lower)))


@dataclass(frozen=True)
class BandedCholeskyFactor:
    """Upper banded factor U (LAPACK storage) with U^T U equal to the factorized matrix."""
    upper_band: np.ndarray
    bandwidth: int

    def solve_upper(self, rhs):
        """Solve U x = rhs; for standard normal rhs the result has covariance (U^T U)^-1."""
        return scipy.linalg.solve_banded((0, self.bandwidth), self.upper_band, rhs)

    def logdet(self):
        return 2.0 * np.sum(np.log(self.upper_band[self.bandwidth]))


def cholesky_factor(m):
    """
    Cholesky factorization of a symmetric positive definite matrix.

    :param m: SPD MatrixOperator or array
    :return: {CholeskyFactor} lower-triangular L with L L^T = m
    """
    dense = m.to_dense() if isinstance(m, MatrixOperator) else np.array(m, dtype=float)
    if dense.ndim != 2 or dense.shape[0] != dense.shape[1]:
        raise DimensionError("cholesky_factor", "square matrix", dense.shape)
    lower, info = scipy.linalg.lapack.dpotrf(dense, lower=1, clean=1)
    if info > 0:
        raise FactorizationError(info - 1)
    if info < 0:
        raise ValueError(f"dpotrf rejected argument {-info}")
    return CholeskyFactor(lower)


def banded_cholesky(m):
    """
    Cholesky factorization of a banded SPD operator without densifying it.

    :param m: {BandedSymmetricOperator | KroneckerSumOperator}
    :return: {BandedCholeskyFactor}
    """
    band = m.to_banded()
    upper, info = scipy.linalg.lapack.dpbtrf(band, lower=0)
    if info > 0:
        raise FactorizationError(info - 1)
    if info < 0:
        raise ValueError(f"dpbtrf rejected argument {-info}")
    return BandedCholeskyFactor(upper, m.bandwidth)


@dataclass(frozen=True)
class CGLSResult:
    x: np.ndarray
    converged: bool
    iterations: int
    relative_residual: float


def cgls_solve(op, rhs, max_iter=1000, tol=1e-6, x0=None):
    """
    Conjugate gradient least squares for min ||op x - rhs||_2.

    Stops when ||op^T (rhs - op x)|| / ||op^T rhs|| <= tol. Running out of iterations is not an
    error: the last iterate (the one with the smallest least-squares residual so far) is returned
    with converged=False.

    :param {MatrixOperator} op: Operator with apply and apply_transpose
    :param {np.ndarray} rhs: Right-hand side of length op.rows
    :param {int} max_iter: Maximum number of iterations
    :param {float} tol: Relative normal-equation residual tolerance, > 0
    :param {np.ndarray} x0: Optional starting point
    :return: {CGLSResult}
    """
    op = as_operator(op)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (op.rows,):
        raise DimensionError("cgls_solve rhs", (op.rows,), rhs.shape)
    if tol <= 0:
        raise ValueError(f"cgls_solve tol must be positive, got {tol}")

    norm_atb = np.linalg.norm(op.apply_transpose(rhs))
    if norm_atb == 0.0:
        return CGLSResult(np.zeros(op.cols), True, 0, 0.0)

    x = np.zeros(op.cols) if x0 is None else np.array(x0, dtype=float)
    r = rhs - op.apply(x) if x0 is not None else rhs.copy()
    s = op.apply_transpose(r)
    p = s.copy()
    gamma = s @ s
    relative = np.sqrt(gamma) / norm_atb
    if relative <= tol:
        return CGLSResult(x, True, 0, relative)

    for iteration in range(1, max_iter + 1):
        q = op.apply(p)
        delta = q @ q
        if delta == 0.0:
            # p lies in the null space of op; x already minimizes the residual
            return CGLSResult(x, True, iteration - 1, relative)
        alpha = gamma / delta
        x += alpha * p
        r -= alpha * q
        s = op.apply_transpose(r)
        gamma_new = s @ s
        relative = np.sqrt(gamma_new) / norm_atb
        if relative <= tol:
            return CGLSResult(x, True, iteration, relative)
        p = s + (gamma_new / gamma) * p
        gamma = gamma_new

    logger.debug("CGLS stopped after %s iterations at relative residual %.3e", max_iter, relative)
    return CGLSResult(x, False, max_iter, relative)


def second_difference_matrix(n):
    """Tridiagonal L_n with 2 on the diagonal and -1 off the diagonal, as a sparse matrix."""
    off = -np.ones(n - 1)
    return sps.diags([off, 2.0 * np.ones(n), off], [-1, 0, 1], format="csr")


def gmrf_precision(n, d, dims=1):
    """
    Precision matrix of a zero-boundary first-order GMRF.

    :param {int} n: Number of parameters (N^2 for dims=2)
    :param {float} d: Precision, > 0
    :param {int} dims: 1 for signals, 2 for column-stacked square images
    :return: {MatrixOperator} d * L_n (banded) or d * (I kron L_N + L_N kron I) (Kronecker sum)
    """
    if d <= 0:
        raise ValueError(f"GMRF precision must be positive, got {d}")
    if n < 1:
        raise ValueError(f"GMRF size must be at least 1, got {n}")
    if dims == 1:
        return BandedSymmetricOperator(d * second_difference_matrix(n), bandwidth=1)
    if dims == 2:
        side = image_side(n)
        return KroneckerSumOperator(second_difference_matrix(side), scale=d)
    raise ValueError(f"dims must be 1 or 2, got {dims}")


def difference_matrix(n):
    """
    (n+1) x n first-order difference matrix with zero boundary conditions.

    First row [1, 0, ...], interior rows [-1, 1], last row [..., 0, -1]; D^T D = L_n.

    :param {int} n: Number of parameters, >= 1
    :return: {SparseOperator}
    """
    if n < 1:
        raise ValueError(f"difference_matrix needs n >= 1, got {n}")
    return SparseOperator(sps.diags([np.ones(n), -np.ones(n)], [0, -1], shape=(n + 1, n), format="csr"))


def difference_operators_2d(side):
    """
    Horizontal and vertical difference operators (I kron D_N, D_N kron I) for column-stacked images.

    :param {int} side: Image side length N
    :return: {tuple} two KroneckerOperator, each with (N+1)N rows
    """
    d = difference_matrix(side).matrix
    identity = sps.identity(side, format="csr")
    return KroneckerOperator(identity, d), KroneckerOperator(d, identity)


def image_side(n):
    side = int(round(np.sqrt(n)))
    if side * side != n:
        raise ValueError(f"2D fields need a square number of parameters, got {n}")
    return side


def save_matrix_csv(path, matrix):
    """Write a dense matrix as header-free, row-major CSV."""
    dense = matrix.to_dense() if isinstance(matrix, MatrixOperator) else np.atleast_2d(matrix)
    pd.DataFrame(dense).to_csv(path, header=False, index=False, float_format="%.17g")


def load_matrix_csv(path):
    """Read a header-free CSV matrix written by `save_matrix_csv` (or by hand)."""
    return pd.read_csv(path, header=None, float_precision="round_trip").to_numpy(dtype=float)


def _as_matrix(obj):
    if isinstance(obj, MatrixOperator):
        obj = obj.matrix if hasattr(obj, "matrix") else obj.to_dense()
    if sps.issparse(obj):
        return sps.csr_matrix(obj, dtype=float)
    return np.atleast_2d(np.asarray(obj, dtype=float))


def _upper_band_storage(matrix, bandwidth):
    matrix = sps.csr_matrix(matrix)
    n = matrix.shape[0]
    band = np.zeros((bandwidth + 1, n))
    for k in range(bandwidth + 1):
        band[bandwidth - k, k:] = matrix.diagonal(k)
    return band
