"""Ambient-space elements, linear maps with adjoints, and dense kernels.

Elements of the ambient Euclidean space are plain numpy arrays: 1-d for the
vector variant, 2-d for the matrix variant.  The inner product is the sum of
entrywise products, so the induced norm is the Euclidean norm for vectors and
the Frobenius norm for matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import InfeasibleTargetError, InvalidInputError

GROUP_TOL = 1e-8


def as_element(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim not in (1, 2):
        raise InvalidInputError(f"element must be 1-d or 2-d, got ndim={x.ndim}")
    return x


def inner(x, y) -> float:
    """Euclidean / Frobenius inner product ⟨x, y⟩."""
    return float(np.sum(np.asarray(x) * np.asarray(y)))


def norm(x) -> float:
    """Euclidean norm for vectors, Frobenius norm for matrices."""
    return float(np.linalg.norm(np.asarray(x)))


def _require_finite(x, what="input"):
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"{what} has non-finite entries")


class LinearMap:
    """A linear operator between element spaces, with an adjoint."""

    in_shape: tuple
    out_shape: tuple

    def __call__(self, x):
        raise NotImplementedError

    def adjoint(self, y):
        raise NotImplementedError

    def as_matrix(self) -> np.ndarray:
        """Dense matrix acting on the vectorized (row-major) input."""
        raise NotImplementedError

    def operator_norm(self) -> float:
        return float(np.linalg.norm(self.as_matrix(), 2))

    @property
    def is_identity(self) -> bool:
        return False


@dataclass(frozen=True)
class IdentityMap(LinearMap):
    shape: tuple

    def __post_init__(self):
        object.__setattr__(self, "shape", tuple(self.shape))

    @property
    def in_shape(self):
        return self.shape

    @property
    def out_shape(self):
        return self.shape

    def __call__(self, x):
        return np.asarray(x, dtype=float)

    def adjoint(self, y):
        return np.asarray(y, dtype=float)

    def as_matrix(self):
        n = int(np.prod(self.shape))
        return np.eye(n)

    def operator_norm(self):
        return 1.0

    @property
    def is_identity(self):
        return True


@dataclass(frozen=True)
class DenseMap(LinearMap):
    """Matrix acting on the vectorized input; output is a vector."""

    matrix: np.ndarray
    in_shape: tuple

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.matrix, dtype=float))
        _require_finite(m, "dense map matrix")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "in_shape", tuple(self.in_shape))
        if m.shape[1] != int(np.prod(self.in_shape)):
            raise InvalidInputError(
                f"dense map has {m.shape[1]} columns but input shape "
                f"{self.in_shape} vectorizes to {int(np.prod(self.in_shape))}"
            )

    @property
    def out_shape(self):
        return (self.matrix.shape[0],)

    def __call__(self, x):
        return self.matrix @ np.asarray(x, dtype=float).reshape(-1)

    def adjoint(self, y):
        return (self.matrix.T @ np.asarray(y, dtype=float)).reshape(self.in_shape)

    def as_matrix(self):
        return self.matrix

    @cached_property
    def _pinv(self) -> np.ndarray:
        return np.linalg.pinv(self.matrix, rcond=1e-12)


@dataclass(frozen=True)
class CoordinateSelectMap(LinearMap):
    """Selects a list of entries of the input element, in order.

    Indices are (i, j) pairs for matrix inputs or bare ints for vectors.
    Covers operators such as X ↦ (X₁₁, X₂₂).
    """

    indices: tuple
    in_shape: tuple

    def __post_init__(self):
        idx = tuple(tuple(np.atleast_1d(i)) if np.ndim(i) else (int(i),) for i in self.indices)
        idx = tuple(tuple(int(k) for k in i) for i in idx)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "in_shape", tuple(self.in_shape))
        ndim = len(self.in_shape)
        for i in idx:
            if len(i) != ndim:
                raise InvalidInputError(f"index {i} does not match input shape {self.in_shape}")
        if len(set(idx)) != len(idx):
            raise InvalidInputError("coordinate-select indices must be distinct")

    @property
    def out_shape(self):
        return (len(self.indices),)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.array([x[i] for i in self.indices])

    def adjoint(self, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros(self.in_shape)
        for i, yi in zip(self.indices, y):
            out[i] = yi
        return out

    def as_matrix(self):
        n = int(np.prod(self.in_shape))
        m = np.zeros((len(self.indices), n))
        for row, i in enumerate(self.indices):
            m[row, int(np.ravel_multi_index(i, self.in_shape))] = 1.0
        return m

    def operator_norm(self):
        return 1.0


@dataclass(frozen=True)
class SvdFactorization:
    """Full SVD X = U Σ̂ Vᵀ with grouping of equal singular values.

    U is m×m, V is n×n, sigma has length min(m, n), sorted non-increasing.
    Two singular values are treated as equal when they differ by at most
    group_tol · max(1, σ₁); rank counts those above the same threshold.
    """

    U: np.ndarray
    sigma: np.ndarray
    V: np.ndarray
    group_tol: float = GROUP_TOL
    shape: tuple = field(default=None)

    @property
    def _scale(self) -> float:
        return max(1.0, float(self.sigma[0])) if self.sigma.size else 1.0

    @property
    def rank(self) -> int:
        return int(np.sum(self.sigma > self.group_tol * self._scale))

    def groups(self):
        """Index blocks of equal singular values (nonzero ones only)."""
        r = self.rank
        blocks, start = [], 0
        for i in range(1, r + 1):
            if i == r or abs(self.sigma[i] - self.sigma[i - 1]) > self.group_tol * self._scale:
                blocks.append(range(start, i))
                start = i
        return blocks

    def reconstruct(self) -> np.ndarray:
        m, n = self.shape
        smat = np.zeros((m, n))
        k = min(m, n)
        smat[:k, :k] = np.diag(self.sigma)
        return self.U @ smat @ self.V.T

    def count_at_least(self, level: float, tol: float) -> int:
        """Number of singular values ≥ level − tol."""
        return int(np.sum(self.sigma >= level - tol))


def _fix_signs(U, V):
    """Deterministic sign convention: the largest-magnitude entry of each
    column of V is positive; paired U columns flip with it.  Unpaired
    tail columns of U and V are fixed the same way independently."""
    k = min(U.shape[1], V.shape[1])
    for j in range(k):
        i = int(np.argmax(np.abs(V[:, j])))
        if V[i, j] < 0:
            V[:, j] = -V[:, j]
            U[:, j] = -U[:, j]
    for M in (U, V):
        for j in range(k, M.shape[1]):
            i = int(np.argmax(np.abs(M[:, j])))
            if M[i, j] < 0:
                M[:, j] = -M[:, j]
    return U, V


def svd(X, group_tol: float = GROUP_TOL) -> SvdFactorization:
    """Full singular value decomposition with deterministic signs.

    Wide inputs (m > n) are transposed internally and U/V swapped back, so
    sigma always has length min(m, n).
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    _require_finite(X, "svd input")
    m, n = X.shape
    transposed = m > n
    work = X.T if transposed else X
    U, s, Vt = np.linalg.svd(work, full_matrices=True)
    V = Vt.T
    if transposed:
        U, V = V, U
    U, V = _fix_signs(U.copy(), V.copy())
    return SvdFactorization(U=U, sigma=s, V=V, group_tol=group_tol, shape=(m, n))


def sym_eig(M):
    """Eigendecomposition of a symmetric matrix: eigenvalues descending,
    orthogonal eigenvectors as columns, deterministic signs."""
    M = np.asarray(M, dtype=float)
    _require_finite(M, "sym_eig input")
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInputError("sym_eig requires a square matrix")
    scale = max(1.0, float(np.linalg.norm(M)))
    if np.linalg.norm(M - M.T) > 1e-10 * scale:
        raise InvalidInputError("sym_eig input is not symmetric")
    w, Q = np.linalg.eigh((M + M.T) / 2.0)
    w, Q = w[::-1].copy(), Q[:, ::-1].copy()
    for j in range(Q.shape[1]):
        i = int(np.argmax(np.abs(Q[:, j])))
        if Q[i, j] < 0:
            Q[:, j] = -Q[:, j]
    return w, Q


def psd_project(M):
    """Nearest (Frobenius) positive semidefinite matrix.

    Symmetrizes, eigendecomposes, clips negative eigenvalues.  The squared
    distance to the input decomposes as ‖skew part‖² + Σ min(λᵢ, 0)².
    """
    M = np.asarray(M, dtype=float)
    _require_finite(M, "psd_project input")
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidInputError("psd_project requires a square matrix")
    H = (M + M.T) / 2.0
    w, Q = np.linalg.eigh(H)
    S = Q @ np.diag(np.maximum(w, 0.0)) @ Q.T
    return (S + S.T) / 2.0


def affine_project(x, A: LinearMap, y_bar, *, tol: float = 1e-9):
    """Exact projection of x onto {z : A(z) = ȳ}.

    Raises InfeasibleTargetError when ȳ is not in the range of A.
    """
    x = np.asarray(x, dtype=float)
    y_bar = np.asarray(y_bar, dtype=float)
    if A.is_identity:
        return y_bar.reshape(x.shape)
    if isinstance(A, CoordinateSelectMap):
        out = x.copy()
        for i, yi in zip(A.indices, np.atleast_1d(y_bar)):
            out[i] = yi
        return out
    # dense: z = x − A⁺(A(x) − ȳ) via the SVD pseudoinverse
    residual = A(x) - y_bar
    pinv = A._pinv if isinstance(A, DenseMap) else np.linalg.pinv(A.as_matrix(), rcond=1e-12)
    z = (x.reshape(-1) - pinv @ residual).reshape(x.shape)
    if norm(A(z) - y_bar) > tol * max(1.0, norm(y_bar)):
        raise InfeasibleTargetError(
            "target is not in the range of the linear map "
            f"(projection residual {norm(A(z) - y_bar):.3e})"
        )
    return z
