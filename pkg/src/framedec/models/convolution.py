"""Periodic convolution testbed, diagonal in the discrete Fourier basis.

The operator on n uniform samples of [0, 1) multiplies the k-th Fourier
coefficient by the symbol value at frequency k (FFT ordering), so the
orthonormal exponential frames decompose it exactly with scalar
coefficients, and reconstruction reduces to Fourier division.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..decomposition import FrameDecomposition, LinearOperatorHandle
from ..frames import Frame
from ..lambdas import LambdaFamily
from ..spaces import ComponentSpace, ProductSpaceSpec, ProductVector

__all__ = ["ConvolutionSpec", "convolution_operator", "convolution_decomposition", "named_symbol"]


def named_symbol(name, n):
    """Shipped symbol presets over n FFT-ordered integer frequencies."""
    xi = np.fft.fftfreq(n, d=1.0 / n)
    if name == "ones":
        return np.ones(n, dtype=complex)
    if name == "inverse_quadratic":
        return 1.0 / (1.0 + xi**2) + 0.0j
    if name == "gaussian":
        return np.exp(-0.5 * (xi / max(1.0, n / 8)) ** 2) + 0.0j
    if name == "zero_dc":
        sym = 1.0 / (1.0 + np.abs(xi))
        sym[0] = 0.0
        return sym + 0.0j
    raise ValueError(f"unknown symbol preset {name!r}")


@dataclass(frozen=True)
class ConvolutionSpec:
    """Grid size and per-frequency symbol (FFT ordering)."""

    n: int
    symbol: np.ndarray

    def __post_init__(self):
        sym = np.asarray(self.symbol, dtype=complex)
        if sym.shape != (self.n,):
            raise ValueError(f"symbol must have shape ({self.n},)")
        object.__setattr__(self, "symbol", sym)

    @classmethod
    def preset(cls, n, name):
        return cls(n, named_symbol(name, n))


def _space(n):
    return ProductSpaceSpec((ComponentSpace(n, np.full(n, 1.0 / n)),))


def convolution_operator(spec: ConvolutionSpec) -> LinearOperatorHandle:
    sym = spec.symbol

    def apply(pv):
        return ProductVector([np.fft.ifft(sym * np.fft.fft(pv.blocks[0]))])

    def apply_adjoint(pv):
        return ProductVector([np.fft.ifft(np.conj(sym) * np.fft.fft(pv.blocks[0]))])

    space = _space(spec.n)
    return LinearOperatorHandle(apply, apply_adjoint, space, space)


def fourier_frame(n):
    """Orthonormal exponential frame on the weighted grid (FFT frequency order)."""
    t = np.arange(n) / n
    xi = np.fft.fftfreq(n, d=1.0 / n)
    elements = np.exp(2j * np.pi * xi[:, None] * t[None, :])
    return Frame(ComponentSpace(n, np.full(n, 1.0 / n)), elements)


def convolution_decomposition(spec: ConvolutionSpec) -> FrameDecomposition:
    """Exact frame decomposition: Fourier frames with the symbol as coefficients."""
    op = convolution_operator(spec)
    frame = fourier_frame(spec.n)
    family = LambdaFamily([np.array([[val]]) for val in spec.symbol])
    dec = FrameDecomposition(
        op.domain,
        op.codomain,
        [frame],
        [frame],
        family,
        operator=op,
    )
    dec.meta["symbol"] = spec.symbol
    return dec
