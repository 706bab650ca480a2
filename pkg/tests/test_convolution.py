import numpy as np
import pytest

from framedec import ProductVector, norm, reconstruct, verify_assumption
from framedec.models.convolution import (
    ConvolutionSpec,
    convolution_decomposition,
    convolution_operator,
    named_symbol,
)


def test_identity_symbol_round_trip():
    dec = convolution_decomposition(ConvolutionSpec.preset(16, "ones"))
    rng = np.random.default_rng(60)
    y = ProductVector([rng.standard_normal(16) + 1j * rng.standard_normal(16)])
    res = reconstruct(dec, y)
    assert norm(dec.y_space, res.solution - y) <= 1e-12 * norm(dec.y_space, y)


def test_verification_residual_tiny():
    dec = convolution_decomposition(ConvolutionSpec.preset(32, "inverse_quadratic"))
    rep = verify_assumption(dec.operator, dec, probes=10)
    assert rep.max_relation_residual <= 1e-12


def test_smooth_round_trip():
    n = 64
    dec = convolution_decomposition(ConvolutionSpec.preset(n, "inverse_quadratic"))
    t = np.arange(n) / n
    x0 = ProductVector([np.exp(-40 * (t - 0.5) ** 2) + 0j])
    y = dec.operator.apply(x0)
    res = reconstruct(dec, y)
    assert norm(dec.x_space, res.solution - x0) / norm(dec.x_space, x0) <= 1e-8


def test_pure_fourier_mode_maps_to_symbol_times_mode():
    n = 32
    spec = ConvolutionSpec.preset(n, "inverse_quadratic")
    op = convolution_operator(spec)
    t = np.arange(n) / n
    for k in (0, 1, 5):
        mode = np.exp(2j * np.pi * k * t)
        out = op.apply(ProductVector([mode])).blocks[0]
        np.testing.assert_allclose(out, spec.symbol[k] * mode, atol=1e-12)


def test_zero_dc_symbol_fails_injectivity_at_zero():
    dec = convolution_decomposition(ConvolutionSpec.preset(16, "zero_dc"))
    ok, k = dec.lambdas.injectivity_check()
    assert not ok and k == 0


def test_nonvanishing_symbol_injectivity():
    dec = convolution_decomposition(ConvolutionSpec.preset(16, "inverse_quadratic"))
    assert dec.lambdas.injectivity_check() == (True, None)


def test_reconstruct_equals_fourier_division_oracle():
    rng = np.random.default_rng(61)
    for name in ("ones", "inverse_quadratic", "gaussian"):
        n = 48
        spec = ConvolutionSpec.preset(n, name)
        dec = convolution_decomposition(spec)
        y = ProductVector([rng.standard_normal(n) + 1j * rng.standard_normal(n)])
        res = reconstruct(dec, y)
        oracle = np.fft.ifft(np.fft.fft(y.blocks[0]) / spec.symbol)
        err = np.linalg.norm(res.solution.blocks[0] - oracle) / np.linalg.norm(oracle)
        assert err <= 1e-10


def test_unknown_preset_rejected():
    with pytest.raises(ValueError):
        named_symbol("nope", 8)
