import numpy as np
import pytest

from framedec import (
    FilterSpec,
    NoisyData,
    ProductVector,
    choose_alpha_discrepancy,
    filtered_reconstruct,
    norm,
    reconstruct,
    stability_bound_check,
)
from framedec.models.convolution import ConvolutionSpec, convolution_decomposition
from framedec.regularization import alpha_grid

from helpers import random_pv, synthetic_decomposition


@pytest.fixture(scope="module")
def conv_dec():
    return convolution_decomposition(ConvolutionSpec.preset(64, "inverse_quadratic"))


def noisy(dec, y, level, rng):
    g = random_pv(dec.y_space, rng)
    delta = level * norm(dec.y_space, y)
    g = (delta / norm(dec.y_space, g)) * g
    return NoisyData(y + g, delta)


def smooth_truth(dec, n):
    t = np.arange(n) / n
    return ProductVector([np.exp(-30 * (t - 0.4) ** 2) + 0j])


def test_filter_spec_validation():
    with pytest.raises(ValueError):
        FilterSpec("unknown", 0.1)
    with pytest.raises(ValueError):
        FilterSpec("tikhonov", -1.0)


def test_truncated_below_min_mu_equals_reconstruct(conv_dec):
    rng = np.random.default_rng(100)
    y = random_pv(conv_dec.y_space, rng)
    plain = reconstruct(conv_dec, y)
    filt = filtered_reconstruct(conv_dec, NoisyData(y, 0.0), FilterSpec("truncated", 1e-15))
    assert norm(conv_dec.x_space, plain.solution - filt.solution) <= 1e-12 * norm(
        conv_dec.x_space, plain.solution
    )


def test_tikhonov_alpha_one_halves_unit_coefficients():
    dec = synthetic_decomposition(np.eye(3), np.eye(3), np.ones(3))
    y = ProductVector([np.array([2.0, -4.0, 6.0])])
    res = filtered_reconstruct(dec, NoisyData(y, 0.0), FilterSpec("tikhonov", 1.0))
    np.testing.assert_allclose(res.solution.blocks[0], [1.0, -2.0, 3.0], atol=1e-12)


def test_landweber_polynomial_filter_requires_iterations():
    dec = synthetic_decomposition(np.eye(2), np.eye(2), np.array([1.0, 0.5]))
    y = ProductVector([np.array([1.0, 1.0])])
    res = filtered_reconstruct(dec, NoisyData(y, 0.0), FilterSpec("landweber", 200))
    # many iterations approach the exact inverse
    np.testing.assert_allclose(res.solution.blocks[0], [1.0, 2.0], rtol=1e-3)


def test_filter_boundedness():
    mus = np.linspace(1e-6, 3.0, 500)
    for filt in (FilterSpec("tikhonov", 0.3), FilterSpec("truncated", 0.2)):
        vals = filt.evaluate(mus, 3.0) * mus
        assert np.max(vals) <= 1.0 + 1e-12


def test_stability_bound_zero_noise(conv_dec):
    rng = np.random.default_rng(101)
    y = random_pv(conv_dec.y_space, rng)
    lhs, rhs, ok = stability_bound_check(conv_dec, FilterSpec("tikhonov", 0.5), y, y)
    assert lhs == 0.0 and ok


def test_stability_bound_equality_case():
    dec = synthetic_decomposition(np.eye(2), np.eye(2), np.ones(2))
    rng = np.random.default_rng(102)
    y = random_pv(dec.y_space, rng)
    yd = random_pv(dec.y_space, rng)
    lhs, rhs, ok = stability_bound_check(dec, FilterSpec("tikhonov", 1.0), y, yd)
    # orthonormal frames, unit coefficients: both sides equal ||y-yd||^2 / 4
    assert ok
    assert lhs == pytest.approx(norm(dec.y_space, y - yd) ** 2 / 4, rel=1e-12)
    assert rhs == pytest.approx(lhs, rel=1e-10)


def test_stability_bound_across_alpha_grid(conv_dec):
    rng = np.random.default_rng(103)
    y = conv_dec.operator.apply(smooth_truth(conv_dec, 64))
    yd = noisy(conv_dec, y, 0.01, rng).y_delta
    for alpha in alpha_grid(conv_dec, 10):
        _, _, ok = stability_bound_check(conv_dec, FilterSpec("tikhonov", alpha), y, yd)
        assert ok


def test_discrepancy_rejects_noiseless():
    dec = synthetic_decomposition(np.eye(2), np.eye(2), np.ones(2))
    with pytest.raises(ValueError, match="noiseless"):
        choose_alpha_discrepancy(dec, NoisyData(ProductVector([np.ones(2)]), 0.0))


def test_discrepancy_huge_delta_returns_largest_alpha(conv_dec):
    rng = np.random.default_rng(104)
    y = conv_dec.operator.apply(smooth_truth(conv_dec, 64))
    data = NoisyData(y, 10.0 * norm(conv_dec.y_space, y))
    alpha = choose_alpha_discrepancy(conv_dec, data, "tikhonov", 1.5)
    grid = alpha_grid(conv_dec, 40)
    assert alpha == pytest.approx(grid[-1])


def test_discrepancy_small_delta_small_alpha(conv_dec):
    rng = np.random.default_rng(105)
    y = conv_dec.operator.apply(smooth_truth(conv_dec, 64))
    data = noisy(conv_dec, y, 1e-9, rng)
    grid = alpha_grid(conv_dec, 40)
    alpha = choose_alpha_discrepancy(conv_dec, data, "tikhonov", 1.5)
    assert alpha <= grid[8]


def test_discrepancy_residual_bracket(conv_dec):
    rng = np.random.default_rng(106)
    y = conv_dec.operator.apply(smooth_truth(conv_dec, 64))
    tau = 1.5
    data = noisy(conv_dec, y, 0.01, rng)
    alpha = choose_alpha_discrepancy(conv_dec, data, "tikhonov", tau)
    res = filtered_reconstruct(conv_dec, data, FilterSpec("tikhonov", alpha))
    residual = norm(
        conv_dec.y_space, conv_dec.operator.apply(res.solution) - data.y_delta
    )
    assert data.delta <= residual <= 2 * tau * data.delta


def test_semi_convergence_interior_minimum(conv_dec):
    rng = np.random.default_rng(107)
    x0 = smooth_truth(conv_dec, 64)
    y = conv_dec.operator.apply(x0)
    data = noisy(conv_dec, y, 0.01, rng)
    errs = []
    for alpha in alpha_grid(conv_dec, 40):
        res = filtered_reconstruct(conv_dec, data, FilterSpec("tikhonov", alpha))
        errs.append(norm(conv_dec.x_space, res.solution - x0))
    best = int(np.argmin(errs))
    assert 0 < best < len(errs) - 1
    assert errs[best] < errs[0] and errs[best] < errs[-1]


def test_error_non_increasing_in_delta(conv_dec):
    x0 = smooth_truth(conv_dec, 64)
    y = conv_dec.operator.apply(x0)
    means = []
    for li, level in enumerate((1e-1, 1e-2, 1e-3)):
        errs = []
        for draw in range(10):
            rng = np.random.default_rng([200, li, draw])
            data = noisy(conv_dec, y, level, rng)
            alpha = choose_alpha_discrepancy(conv_dec, data, "tikhonov", 1.5)
            res = filtered_reconstruct(conv_dec, data, FilterSpec("tikhonov", alpha))
            errs.append(norm(conv_dec.x_space, res.solution - x0))
        means.append(np.mean(errs))
    assert means[0] >= means[1] >= means[2]
