import numpy as np
import pytest

from ebound.errors import InfeasibleTargetError, InvalidInputError
from ebound.space import (
    CoordinateSelectMap,
    DenseMap,
    IdentityMap,
    affine_project,
    inner,
    norm,
    psd_project,
    svd,
    sym_eig,
)

from oracles import eig_2x2_sym


def reconstruction_error(fac, X):
    return np.linalg.norm(fac.reconstruct() - X)


class TestSvd:
    def test_diagonal(self):
        fac = svd(np.diag([3.0, 1.0]))
        np.testing.assert_allclose(fac.sigma, [3.0, 1.0])
        np.testing.assert_allclose(fac.U, np.eye(2), atol=1e-14)
        np.testing.assert_allclose(fac.V, np.eye(2), atol=1e-14)

    def test_psd_2x2_matches_eigenvalue_oracle(self):
        delta = 0.1
        X = np.array([[2 + delta**2, delta], [delta, 1 + 2 * delta**2]])
        fac = svd(X)
        np.testing.assert_allclose(fac.sigma, eig_2x2_sym(X), rtol=1e-13)

    def test_zero_matrix(self):
        fac = svd(np.zeros((3, 2)))
        np.testing.assert_allclose(fac.sigma, [0.0, 0.0])
        np.testing.assert_allclose(fac.U.T @ fac.U, np.eye(3), atol=1e-14)
        assert fac.rank == 0

    def test_invariants_on_random_matrices(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            m, n = rng.integers(1, 9, size=2)
            X = rng.standard_normal((m, n)) * rng.uniform(0.1, 10)
            fac = svd(X)
            scale = max(1.0, np.linalg.norm(X))
            assert reconstruction_error(fac, X) <= 1e-10 * scale
            assert np.linalg.norm(fac.U.T @ fac.U - np.eye(m)) <= 1e-10
            assert np.linalg.norm(fac.V.T @ fac.V - np.eye(n)) <= 1e-10
            assert np.all(np.diff(fac.sigma) <= 0)

    def test_wide_matrix_transposed_internally(self):
        rng = np.random.default_rng(1)
        X = rng.standard_normal((2, 5))
        fac = svd(X)
        assert fac.U.shape == (2, 2) and fac.V.shape == (5, 5)
        assert fac.sigma.size == 2
        assert reconstruction_error(fac, X) <= 1e-12

    def test_deterministic(self):
        X = np.random.default_rng(2).standard_normal((4, 4))
        a, b = svd(X), svd(X)
        assert np.array_equal(a.U, b.U) and np.array_equal(a.V, b.V)

    def test_nonfinite_rejected(self):
        with pytest.raises(InvalidInputError):
            svd(np.array([[1.0, np.nan], [0.0, 1.0]]))

    def test_singular_value_lipschitz(self):
        # |σ_i(X) − σ_i(Y)| ≤ ‖X − Y‖_F on random pairs
        rng = np.random.default_rng(3)
        for _ in range(100):
            X = rng.standard_normal((5, 4))
            Y = rng.standard_normal((5, 4))
            gap = np.max(np.abs(svd(X).sigma - svd(Y).sigma))
            assert gap <= np.linalg.norm(X - Y) + 1e-9

    def test_groups_and_rank(self):
        fac = svd(np.diag([2.0, 2.0 + 1e-12, 1.0]))
        assert fac.rank == 3
        assert [list(g) for g in fac.groups()] == [[0, 1], [2]]
        assert fac.count_at_least(2.0, 1e-8) == 2


class TestSymEig:
    def test_diagonal(self):
        w, Q = sym_eig(np.diag([2.0, -1.0]))
        np.testing.assert_allclose(w, [2.0, -1.0])
        np.testing.assert_allclose(Q, np.eye(2), atol=1e-14)

    def test_offdiagonal_matches_oracle(self):
        M = np.array([[0.0, 1.0], [1.0, 0.0]])
        w, Q = sym_eig(M)
        np.testing.assert_allclose(w, eig_2x2_sym(M), atol=1e-14)
        np.testing.assert_allclose(Q @ np.diag(w) @ Q.T, M, atol=1e-12)

    def test_identity(self):
        w, _ = sym_eig(np.eye(3))
        np.testing.assert_allclose(w, np.ones(3))

    def test_reconstruction_random(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            A = rng.standard_normal((5, 5))
            M = (A + A.T) / 2
            w, Q = sym_eig(M)
            scale = max(1.0, np.linalg.norm(M))
            assert np.linalg.norm(Q @ np.diag(w) @ Q.T - M) <= 1e-10 * scale

    def test_asymmetric_rejected(self):
        with pytest.raises(InvalidInputError):
            sym_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestPsdProject:
    def test_clips_negative_eigenvalue(self):
        out = psd_project(np.diag([1.0, -2.0]))
        np.testing.assert_allclose(out, np.diag([1.0, 0.0]), atol=1e-14)
        assert abs(norm(np.diag([1.0, -2.0]) - out) - 2.0) <= 1e-12

    def test_skew_projects_to_zero(self):
        M = np.array([[0.0, 1.0], [-1.0, 0.0]])
        out = psd_project(M)
        np.testing.assert_allclose(out, np.zeros((2, 2)), atol=1e-14)
        assert abs(norm(M - out) - np.sqrt(2.0)) <= 1e-12

    def test_idempotent_on_psd(self):
        rng = np.random.default_rng(5)
        A = rng.standard_normal((4, 4))
        P = A @ A.T
        np.testing.assert_allclose(psd_project(P), P, atol=1e-10)

    def test_distance_decomposition(self):
        # ‖M − proj‖² = ‖skew(M)‖² + Σ min(λ_i(sym(M)), 0)²
        rng = np.random.default_rng(6)
        for _ in range(50):
            M = rng.standard_normal((4, 4))
            S = psd_project(M)
            H = (M + M.T) / 2
            expected = np.linalg.norm((M - M.T) / 2) ** 2
            expected += np.sum(np.minimum(np.linalg.eigvalsh(H), 0.0) ** 2)
            assert abs(norm(M - S) ** 2 - expected) <= 1e-10

    def test_beats_random_psd_candidates(self):
        rng = np.random.default_rng(7)
        M = rng.standard_normal((3, 3))
        S = psd_project(M)
        best = norm(M - S)
        for _ in range(10**4):
            B = S + 0.05 * rng.standard_normal((3, 3))
            cand = B @ B.T / max(np.linalg.norm(B), 1.0)  # PSD by construction
            t = rng.random()
            cand = (1 - t) * S + t * cand  # PSD cone is convex
            assert norm(M - cand) >= best - 1e-9


class TestAffineProject:
    def test_identity_map(self):
        y = np.array([1.0, 2.0])
        np.testing.assert_allclose(affine_project(np.zeros(2), IdentityMap((2,)), y), y)

    def test_coordinate_select(self):
        A = CoordinateSelectMap(((0, 0), (1, 1)), (2, 2))
        X = np.array([[5.0, 7.0], [8.0, 9.0]])
        out = affine_project(X, A, np.array([1.0, 0.0]))
        np.testing.assert_allclose(out, [[1.0, 7.0], [8.0, 0.0]])

    def test_dense_matches_lagrange_oracle(self):
        # project onto {x : ⟨a, x⟩ = y}: x + a (y − ⟨a, x⟩)/‖a‖²
        A = DenseMap(np.array([[1.0, 1.0]]), (2,))
        out = affine_project(np.zeros(2), A, np.array([2.0]))
        np.testing.assert_allclose(out, [1.0, 1.0], atol=1e-12)

    def test_idempotent_and_nonexpansive(self):
        rng = np.random.default_rng(8)
        A = DenseMap(rng.standard_normal((2, 5)), (5,))
        y = A(rng.standard_normal(5))
        x, z = rng.standard_normal(5), rng.standard_normal(5)
        px, pz = affine_project(x, A, y), affine_project(z, A, y)
        np.testing.assert_allclose(affine_project(px, A, y), px, atol=1e-10)
        assert norm(px - pz) <= norm(x - z) + 1e-12

    def test_inconsistent_target_rejected(self):
        A = DenseMap(np.array([[1.0, 0.0], [1.0, 0.0]]), (2,))
        with pytest.raises(InfeasibleTargetError):
            affine_project(np.zeros(2), A, np.array([0.0, 1.0]))

    def test_dense_map_on_matrix_elements(self):
        rng = np.random.default_rng(11)
        A = DenseMap(rng.standard_normal((2, 4)), (2, 2))
        X = rng.standard_normal((2, 2))
        y = A(rng.standard_normal((2, 2)))
        out = affine_project(X, A, y)
        assert out.shape == (2, 2)
        assert norm(A(out) - y) <= 1e-9
        np.testing.assert_allclose(affine_project(out, A, y), out, atol=1e-10)


class TestLinearMaps:
    def test_adjoint_consistency(self):
        rng = np.random.default_rng(9)
        maps = [
            DenseMap(rng.standard_normal((3, 6)), (6,)),
            DenseMap(rng.standard_normal((2, 4)), (2, 2)),
            CoordinateSelectMap(((0, 0), (1, 1)), (2, 2)),
            IdentityMap((4,)),
        ]
        for A in maps:
            for _ in range(50):
                x = rng.standard_normal(A.in_shape)
                y = rng.standard_normal(A.out_shape)
                lhs = inner(A(x), y)
                rhs = inner(x, A.adjoint(y))
                assert abs(lhs - rhs) <= 1e-12 * (1.0 + norm(x) * norm(y))

    def test_coordinate_select_adjoint_places_entries(self):
        A = CoordinateSelectMap(((0, 0), (1, 1)), (2, 2))
        np.testing.assert_allclose(A.adjoint(np.array([3.0, 4.0])),
                                   np.diag([3.0, 4.0]))

    def test_as_matrix_agrees_with_forward(self):
        rng = np.random.default_rng(10)
        A = CoordinateSelectMap(((0, 1), (1, 0)), (2, 2))
        X = rng.standard_normal((2, 2))
        np.testing.assert_allclose(A.as_matrix() @ X.reshape(-1), A(X))

    def test_duplicate_indices_rejected(self):
        with pytest.raises(InvalidInputError):
            CoordinateSelectMap(((0, 0), (0, 0)), (2, 2))
