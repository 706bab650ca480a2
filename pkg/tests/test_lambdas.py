import numpy as np
import pytest

from framedec import BlockPartition, LambdaFamily


def random_family(rng, count=5, shape=(4, 3)):
    return LambdaFamily(
        [
            rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
            for _ in range(count)
        ]
    )


def test_svd_identity():
    fam = LambdaFamily([np.eye(2)])
    mu, u, v = fam.svd_k(0)
    np.testing.assert_allclose(mu, [1.0, 1.0])
    assert fam.rank(0) == 2


def test_svd_rank_deficient_diagonal():
    fam = LambdaFamily([np.diag([3.0, 0.0])])
    mu, _, _ = fam.svd_k(0)
    np.testing.assert_allclose(mu, [3.0])
    assert fam.rank(0) == 1


def test_svd_column_vector():
    fam = LambdaFamily([np.array([[1.0], [1.0]])])
    mu, u, v = fam.svd_k(0)
    # oracle: normal equations Lambda^H Lambda = [[2]]
    np.testing.assert_allclose(mu, [np.sqrt(2.0)], rtol=1e-14)
    np.testing.assert_allclose(np.abs(v), [[1.0]], atol=1e-14)
    np.testing.assert_allclose(np.abs(u[:, 0]), [1 / np.sqrt(2)] * 2, atol=1e-14)
    rec = (u * mu) @ v.conj().T
    np.testing.assert_allclose(rec, [[1.0], [1.0]], atol=1e-10)


def test_svd_reconstruction_and_orthonormality():
    rng = np.random.default_rng(20)
    fam = random_family(rng)
    for k in range(len(fam)):
        mu, u, v = fam.svd_k(k)
        assert np.all(np.diff(mu) <= 1e-15)
        np.testing.assert_allclose(
            u.conj().T @ u, np.eye(mu.size), atol=1e-12
        )
        np.testing.assert_allclose(
            v.conj().T @ v, np.eye(mu.size), atol=1e-12
        )
        np.testing.assert_allclose((u * mu) @ v.conj().T, fam.matrices[k], atol=1e-10)


def test_zero_matrix_rank_zero():
    fam = LambdaFamily([np.zeros((3, 2))])
    assert fam.rank(0) == 0
    np.testing.assert_allclose(fam.pinv_apply(0, np.ones(3)), np.zeros(2))


def test_pinv_examples():
    fam = LambdaFamily([np.eye(2)])
    np.testing.assert_allclose(fam.pinv_apply(0, np.array([2.0, 5.0])), [2, 5])
    col = LambdaFamily([np.array([[1.0], [1.0]])])
    np.testing.assert_allclose(col.pinv_apply(0, np.array([1.0, 1.0])), [1.0], atol=1e-14)
    # oracle: brute-force least squares over a fine grid of h
    grid = np.linspace(-2, 2, 4001)
    resid = np.abs(grid - 1.0) ** 2 + np.abs(grid - 0.0) ** 2
    h_star = grid[np.argmin(resid)]
    assert h_star == pytest.approx(0.5, abs=1e-3)
    np.testing.assert_allclose(col.pinv_apply(0, np.array([1.0, 0.0])), [0.5], atol=1e-14)


def test_pinv_is_minimum_norm_least_squares():
    rng = np.random.default_rng(21)
    fam = random_family(rng, count=8)
    for k in range(len(fam)):
        w = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        h = fam.pinv_apply(k, w)
        oracle = np.linalg.lstsq(fam.matrices[k], w, rcond=None)[0]
        np.testing.assert_allclose(h, oracle, atol=1e-10)


def test_moore_penrose_identities():
    rng = np.random.default_rng(22)
    for _ in range(10):
        mat = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        fam = LambdaFamily([mat])
        mu, u, v = fam.svd_k(0)
        pinv = v @ np.diag(1.0 / mu) @ u.conj().T
        np.testing.assert_allclose(mat @ pinv @ mat, mat, atol=1e-10)
        np.testing.assert_allclose(pinv @ mat @ pinv, pinv, atol=1e-10)
        np.testing.assert_allclose(mat @ pinv, (mat @ pinv).conj().T, atol=1e-10)
        np.testing.assert_allclose(pinv @ mat, (pinv @ mat).conj().T, atol=1e-10)


def test_nullspace_projector_examples():
    full = LambdaFamily([np.array([[2.0, 0.0], [0.0, 1.0], [1.0, 1.0]])])
    np.testing.assert_allclose(full.nullspace_projector(0), np.zeros((2, 2)), atol=1e-12)
    zero = LambdaFamily([np.zeros((3, 2))])
    np.testing.assert_allclose(zero.nullspace_projector(0), np.eye(2), atol=1e-15)
    rowmat = LambdaFamily([np.array([[1.0, 0.0]])])
    np.testing.assert_allclose(
        rowmat.nullspace_projector(0), np.diag([0.0, 1.0]), atol=1e-12
    )


def test_nullspace_projector_properties_and_pinv_orthogonality():
    rng = np.random.default_rng(23)
    fam = LambdaFamily([rng.standard_normal((2, 4)) + 1j * rng.standard_normal((2, 4))])
    p = fam.nullspace_projector(0)
    np.testing.assert_allclose(p @ p, p, atol=1e-12)
    np.testing.assert_allclose(p, p.conj().T, atol=1e-12)
    w = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    h = fam.pinv_apply(0, w)
    assert np.linalg.norm(p @ h) <= 1e-10 * np.linalg.norm(h)


def test_injectivity_check():
    fam = LambdaFamily([np.eye(2), np.eye(2)])
    assert fam.injectivity_check() == (True, None)
    bad = LambdaFamily([np.eye(2), np.array([[1.0, 0.0], [0.0, 0.0]])])
    ok, k = bad.injectivity_check()
    assert not ok and k == 1


def test_rank_tol_configurable():
    mat = np.diag([1.0, 1e-8])
    assert LambdaFamily([mat]).rank(0) == 2
    assert LambdaFamily([mat], rank_tol=1e-6).rank(0) == 1


# ---------------------------------------------------------------- blocks


def test_block_partition_validation():
    mats = [np.ones((2, 2)), np.ones((2, 2))]
    bp = BlockPartition([[0], [1]], [[0], [1]], mats, n_components=(2, 2))
    assert len(bp) == 2
    with pytest.raises(ValueError):
        BlockPartition([[0], [0]], [[0], [1]], mats, n_components=(2, 2))
    with pytest.raises(ValueError):
        BlockPartition([[0], [2]], [[0], [1]], mats, n_components=(2, 2))
    with pytest.raises(ValueError):
        BlockPartition([[0], [1]], [[0], [1]], [np.ones((2, 3)), np.ones((2, 2))],
                       n_components=(2, 2))


def test_block_partition_grouped_shapes():
    # one group couples two x-indices with one y-index: (N*1) x (M*2)
    bp = BlockPartition(
        [[0, 1]], [[0]], [np.ones((1, 4))], n_components=(2, 1)
    )
    assert bp.x_size == 2 and bp.y_size == 1
    h = bp.pinv_apply(0, np.array([2.0]))
    np.testing.assert_allclose(bp.block_matrices[0] @ h, [2.0], atol=1e-12)
