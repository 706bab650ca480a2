import numpy as np
import pytest
import scipy.linalg

from framedec import (
    ComponentSpace,
    Frame,
    NotAFrameError,
    certify_bounds,
    dual_exact,
    dual_neumann,
)

R2 = ComponentSpace(2)
REDUNDANT = np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0]])
MB = np.array(
    [[0.0, 1.0], [-np.sqrt(3) / 2, -0.5], [np.sqrt(3) / 2, -0.5]]
)


def random_complex(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


# ---------------------------------------------------------------- analyze


def test_analyze_orthonormal_basis():
    fr = Frame(R2, np.eye(2))
    np.testing.assert_allclose(fr.analyze(np.array([1.0, 0.0])), [1, 0], atol=1e-15)


def test_analyze_redundant_frame():
    fr = Frame(R2, REDUNDANT)
    np.testing.assert_allclose(
        fr.analyze(np.array([1.0, 1.0])), [1, 1, 1], atol=1e-15
    )


def test_analyze_mercedes_benz_with_tightness_oracle():
    fr = Frame(R2, MB)
    coeffs = fr.analyze(np.array([0.0, 1.0]))
    np.testing.assert_allclose(coeffs, [1.0, -0.5, -0.5], atol=1e-14)
    # oracle: eigendecomposition of the explicitly assembled frame operator
    s_mat = sum(np.outer(e, e.conj()) for e in MB)
    eigs = np.linalg.eigvalsh(s_mat)
    np.testing.assert_allclose(eigs, [1.5, 1.5], atol=1e-14)
    assert np.sum(np.abs(coeffs) ** 2) == pytest.approx(1.5 * 1.0, rel=1e-12)


def test_analyze_norm_sandwich():
    rng = np.random.default_rng(2)
    fr = Frame(R2, MB)
    b1, b2 = fr.bounds
    for _ in range(50):
        x = random_complex(rng, 2)
        c2 = np.sum(np.abs(fr.analyze(x)) ** 2)
        n2 = fr.space.norm(x) ** 2
        assert b1 * n2 * (1 - 1e-10) <= c2 <= b2 * n2 * (1 + 1e-10)


# ---------------------------------------------------------------- synthesize


def test_synthesize_examples():
    fr = Frame(R2, REDUNDANT)
    np.testing.assert_allclose(fr.synthesize(np.zeros(3)), [0, 0], atol=1e-15)
    np.testing.assert_allclose(
        fr.synthesize(np.array([1.0, 0.0, 1.0])), [2, 0], atol=1e-15
    )
    basis = Frame(R2, np.eye(2))
    np.testing.assert_allclose(basis.synthesize(np.array([2.0, 3.0])), [2, 3])


def test_adjoint_identity():
    rng = np.random.default_rng(3)
    space = ComponentSpace(4, rng.uniform(0.3, 2.5, 4))
    fr = Frame(space, rng.standard_normal((7, 4)) + 1j * rng.standard_normal((7, 4)))
    for _ in range(30):
        x = random_complex(rng, 4)
        a = random_complex(rng, 7)
        lhs = np.sum(fr.analyze(x) * np.conj(a))
        rhs = space.inner(x, fr.synthesize(a))
        assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), abs(rhs))


# ---------------------------------------------------------------- S and bounds


def test_frame_operator_examples():
    basis = Frame(R2, np.eye(2))
    x = np.array([0.3, -0.7 + 0.2j])
    np.testing.assert_allclose(basis.frame_operator_apply(x), x, atol=1e-15)
    fr = Frame(R2, REDUNDANT)
    np.testing.assert_allclose(
        fr.frame_operator_apply(np.array([1.0, 1.0])), [2, 1], atol=1e-15
    )
    mb = Frame(R2, MB)
    np.testing.assert_allclose(
        mb.frame_operator_apply(np.array([1.0, 0.0])), [1.5, 0], atol=1e-14
    )


def test_certify_bounds_examples():
    assert certify_bounds(np.eye(2), R2) == pytest.approx((1.0, 1.0))
    assert certify_bounds(REDUNDANT, R2) == pytest.approx((1.0, 2.0))
    b1, b2 = certify_bounds(MB, R2)
    assert (b1, b2) == pytest.approx((1.5, 1.5), rel=1e-12)
    assert Frame(R2, MB).tight


def test_certify_bounds_weighted_against_dense_oracle():
    rng = np.random.default_rng(4)
    w = rng.uniform(0.2, 3.0, 3)
    space = ComponentSpace(3, w)
    elems = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
    b1, b2 = certify_bounds(elems, space)
    # oracle: generalized eigenvalues of the quadratic-form pair
    an = np.conj(elems) * w[None, :]
    q = an.conj().T @ an
    vals = scipy.linalg.eigh(q, np.diag(w), eigvals_only=True)
    assert b1 == pytest.approx(vals[0], rel=1e-10)
    assert b2 == pytest.approx(vals[-1], rel=1e-10)


def test_not_a_frame():
    with pytest.raises(NotAFrameError):
        certify_bounds(np.array([[1.0, 0.0], [2.0, 0.0]]), R2)
    with pytest.raises(NotAFrameError):
        certify_bounds(np.array([[1.0, 1.0]]), R2)


def test_exactness_flag():
    assert Frame(R2, np.eye(2)).exact
    assert not Frame(R2, REDUNDANT).exact


# ---------------------------------------------------------------- duals


def test_dual_exact_examples():
    mb = Frame(R2, MB)
    d = dual_exact(mb)
    np.testing.assert_allclose(d.elements, MB / 1.5, atol=1e-12)
    fr = Frame(R2, REDUNDANT)
    d2 = dual_exact(fr)
    np.testing.assert_allclose(
        d2.elements, [[0.5, 0], [0, 1], [0.5, 0]], atol=1e-12
    )
    basis = Frame(R2, np.eye(2))
    np.testing.assert_allclose(dual_exact(basis).elements, np.eye(2), atol=1e-14)


def test_dual_exact_reconstruction_identities():
    rng = np.random.default_rng(5)
    space = ComponentSpace(4, rng.uniform(0.3, 2.0, 4))
    fr = Frame(space, rng.standard_normal((9, 4)) + 1j * rng.standard_normal((9, 4)))
    d = dual_exact(fr)
    worst = 0.0
    for _ in range(100):
        x = random_complex(rng, 4)
        rec1 = d.elements.T @ fr.analyze(x)
        rec2 = fr.elements.T @ d.analyze(x)
        nx = space.norm(x)
        worst = max(worst, space.norm(x - rec1) / nx, space.norm(x - rec2) / nx)
    assert worst <= 1e-9


def test_dual_exact_dual_bounds():
    fr = Frame(R2, REDUNDANT)
    d = dual_exact(fr)
    b1, b2 = certify_bounds(d.elements, R2)
    assert b1 == pytest.approx(1.0 / fr.bounds[1], rel=1e-10)
    assert b2 == pytest.approx(1.0 / fr.bounds[0], rel=1e-10)


def test_dual_exact_ill_conditioned_warning():
    eps = 1e-7  # condition number B2/B1 = 1e14 > 1e12
    fr = Frame(ComponentSpace(2), np.array([[1.0, 0.0], [0.0, eps]]))
    d = dual_exact(fr)
    assert d.condition_warning is not None
    well = Frame(R2, MB)
    assert dual_exact(well).condition_warning is None


def test_dual_neumann_tight_frame_is_immediate():
    mb = Frame(R2, MB)
    d = dual_neumann(mb, 0.5)
    assert d.method == ("neumann", 0)
    np.testing.assert_allclose(d.elements, MB / 1.5, atol=1e-12)
    assert d.certified_error == 0.0


def test_dual_neumann_iteration_count():
    fr = Frame(R2, REDUNDANT)
    d = dual_neumann(fr, 1e-6)
    # smallest N with (1/3)^{N+1} <= 1e-6
    assert d.method == ("neumann", 12)
    assert d.certified_error == pytest.approx((1 / 3) ** 13)


def test_dual_neumann_geometric_convergence_factor():
    fr = Frame(R2, REDUNDANT)
    exact_first = np.array([0.5, 0.0])
    errs = []
    for n in range(6):
        d = dual_neumann(fr, (1 / 3) ** (n + 1) * 1.000001)
        assert d.method == ("neumann", n)
        errs.append(np.linalg.norm(d.elements[0] - exact_first))
    ratios = [errs[i + 1] / errs[i] for i in range(len(errs) - 1)]
    np.testing.assert_allclose(ratios, 1 / 3, rtol=1e-10)


def test_dual_neumann_error_regression():
    rng = np.random.default_rng(6)
    fr = Frame(R2, REDUNDANT)
    b1, b2 = fr.bounds
    rho = (b2 - b1) / (b2 + b1)
    for n in range(0, 21, 4):
        d = dual_neumann(fr, rho ** (n + 1) * 1.000001)
        assert d.method == ("neumann", n)
        bound = rho ** (n + 1)
        for _ in range(100):
            x = random_complex(rng, 2)
            rec = d.elements.T @ fr.analyze(x)
            assert np.linalg.norm(x - rec) <= bound * np.linalg.norm(x) * (
                1 + 1e-9
            ) + 1e-14


def test_dual_neumann_rejects_bad_eps():
    with pytest.raises(ValueError):
        dual_neumann(Frame(R2, REDUNDANT), 0.0)


# ---------------------------------------------------------------- economy, projector


def test_dual_coefficients_are_most_economical():
    rng = np.random.default_rng(11)
    fr = Frame(R2, REDUNDANT)
    d = dual_exact(fr)
    null = scipy.linalg.null_space(fr.elements.T.astype(complex))
    assert null.shape[1] == 1
    for _ in range(50):
        x = random_complex(rng, 2)
        best = d.analyze(x)
        np.testing.assert_allclose(fr.synthesize(best), x, atol=1e-12)
        z = null @ random_complex(rng, null.shape[1])
        alt = best + z
        np.testing.assert_allclose(fr.synthesize(alt), x, atol=1e-12)
        assert np.sum(np.abs(alt) ** 2) > np.sum(np.abs(best) ** 2)


def test_analysis_dual_synthesis_is_orthogonal_projector():
    rng = np.random.default_rng(12)
    space = ComponentSpace(3, rng.uniform(0.5, 1.5, 3))
    fr = Frame(space, rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3)))
    d = dual_exact(fr)
    # P = F tilde-F^* on coefficient space
    p = (np.conj(fr.elements) * space.weights[None, :]) @ d.elements.T
    np.testing.assert_allclose(p @ p, p, atol=1e-10)
    np.testing.assert_allclose(p, p.conj().T, atol=1e-10)


def test_frame_bound_sandwich_1000_random():
    rng = np.random.default_rng(13)
    space = ComponentSpace(3, rng.uniform(0.5, 2.0, 3))
    fr = Frame(space, rng.standard_normal((7, 3)) + 1j * rng.standard_normal((7, 3)))
    b1, b2 = fr.bounds
    for _ in range(1000):
        x = random_complex(rng, 3)
        c2 = float(np.sum(np.abs(fr.analyze(x)) ** 2))
        n2 = space.norm(x) ** 2
        assert b1 * n2 * (1 - 1e-10) <= c2 <= b2 * n2 * (1 + 1e-10)
