"""Desk-scale model problems with known structure."""

from .convolution import ConvolutionSpec, convolution_decomposition, convolution_operator
from .radon import RadonProblem, RadonSpec, radon_adjoint, radon_forward, radon_frame_system
from .tomography import (
    TomographySpec,
    tomography_blocks,
    tomography_decomposition,
    tomography_operator,
)

__all__ = [
    "ConvolutionSpec",
    "convolution_decomposition",
    "convolution_operator",
    "RadonProblem",
    "RadonSpec",
    "radon_adjoint",
    "radon_forward",
    "radon_frame_system",
    "TomographySpec",
    "tomography_blocks",
    "tomography_decomposition",
    "tomography_operator",
]
