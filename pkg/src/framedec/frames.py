"""Frames over component spaces: analysis/synthesis, bounds, dual frames.

A frame is a family {e_k} (k = 1..K, K >= dim allowed) in a component
space with certified bounds 0 < B1 <= B2 such that

    B1 ||x||^2  <=  sum_k |<x, e_k>|^2  <=  B2 ||x||^2.

In finite dimensions the optimal bounds are the extreme eigenvalues of
the frame operator S = F*F, certified here through the singular values
of the weight-whitened analysis matrix.  Dual frames tilde-e_k = S^{-1}
e_k are obtained either by an SPD solve (exact) or by the truncated
Neumann series

    tilde-e_k^N = (2/(B1+B2)) e_k + R tilde-e_k^{N-1},
    R = I - (2/(B1+B2)) S,

whose reconstruction error is certified by ((B2-B1)/(B2+B1))^{N+1}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .spaces import ComponentSpace, DimensionMismatch

__all__ = [
    "NotAFrameError",
    "Frame",
    "DualFrame",
    "certify_bounds",
    "dual_exact",
    "dual_neumann",
]

TIGHT_REL_TOL = 1e-10
RANK_REL_TOL = 1e-12
ILL_CONDITIONED = 1e12


class NotAFrameError(ValueError):
    """The element family does not span the space (B1 = 0)."""


def _whitened_analysis(elements, space):
    # rows are conj(e_k) * sqrt(w); squared singular values are the
    # optimal frame bounds of the family in the weighted inner product
    return np.conj(elements) * np.sqrt(space.weights)[None, :]


def certify_bounds(elements, space: ComponentSpace):
    """Optimal frame bounds (B1, B2) of a finite element family.

    Raises NotAFrameError when the synthesis matrix is rank deficient,
    i.e. the family does not span the space.
    """
    elements = np.asarray(elements, dtype=complex)
    if elements.ndim != 2 or elements.shape[1] != space.dim:
        raise DimensionMismatch(0, space.dim, elements.shape)
    if elements.shape[0] < space.dim:
        raise NotAFrameError(
            f"not a frame over this space: {elements.shape[0]} elements "
            f"cannot span dimension {space.dim}"
        )
    s = scipy.linalg.svdvals(_whitened_analysis(elements, space))
    smax = s[0]
    smin = s[space.dim - 1]
    if smax == 0.0 or smin <= RANK_REL_TOL * smax:
        raise NotAFrameError(
            "not a frame over this space: rank-deficient synthesis matrix "
            f"(smallest singular value {smin:.3e})"
        )
    return float(smin**2), float(smax**2)


class Frame:
    """Certified frame over a component space.

    Elements are stored as the rows of a (K, dim) complex array.  The
    truncation index of a conceptually infinite family is simply K and is
    recorded by construction.
    """

    def __init__(self, space: ComponentSpace, elements):
        self.space = space
        self.elements = np.asarray(elements, dtype=complex)
        if self.elements.ndim != 2 or self.elements.shape[1] != space.dim:
            raise DimensionMismatch(0, space.dim, self.elements.shape)
        self.bounds = certify_bounds(self.elements, space)
        B1, B2 = self.bounds
        self.tight = (B2 - B1) / B2 <= TIGHT_REL_TOL
        self.exact = self.elements.shape[0] == space.dim
        # analysis matrix: (F x)_k = <x, e_k>
        self._analysis = np.conj(self.elements) * space.weights[None, :]

    @property
    def size(self):
        return self.elements.shape[0]

    def analyze(self, x):
        """Frame coefficients (<x, e_k>)_k."""
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.space.dim,):
            raise DimensionMismatch(0, self.space.dim, x.shape)
        return self._analysis @ x

    def synthesize(self, coeffs):
        """Adjoint of analysis: sum_k a_k e_k."""
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (self.size,):
            raise DimensionMismatch(0, self.size, coeffs.shape)
        return self.elements.T @ coeffs

    def frame_operator_apply(self, x):
        """S x = sum_k <x, e_k> e_k; self-adjoint with B1 I <= S <= B2 I."""
        return self.synthesize(self.analyze(x))

    def frame_operator_matrix(self):
        return self.elements.T @ self._analysis

    def __repr__(self):
        B1, B2 = self.bounds
        return (
            f"Frame(K={self.size}, dim={self.space.dim}, "
            f"B1={B1:.6g}, B2={B2:.6g}, tight={self.tight}, exact={self.exact})"
        )


@dataclass
class DualFrame:
    """Dual family paired with its base frame.

    ``method`` is "exact_solve" or ("neumann", N); ``certified_error`` is
    the guaranteed relative reconstruction error (0 for the exact solve,
    ((B2-B1)/(B2+B1))^{N+1} for the Neumann approximation).
    """

    base: Frame
    elements: np.ndarray
    method: object
    certified_error: float
    condition_warning: str = None

    def analyze(self, x):
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.base.space.dim,):
            raise DimensionMismatch(0, self.base.space.dim, x.shape)
        return (np.conj(self.elements) * self.base.space.weights[None, :]) @ x

    def synthesize(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.shape != (self.elements.shape[0],):
            raise DimensionMismatch(0, self.elements.shape[0], coeffs.shape)
        return self.elements.T @ coeffs


def _validate_reconstruction(frame, duals, bound, seed=71_117):
    # probe the identity x = sum <x, e_k> dual_k on a few random vectors
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(8):
        x = rng.standard_normal(frame.space.dim) + 1j * rng.standard_normal(
            frame.space.dim
        )
        rec = duals.T @ frame.analyze(x)
        worst = max(worst, frame.space.norm(x - rec) / frame.space.norm(x))
    if worst > bound:
        raise ArithmeticError(
            f"dual reconstruction error {worst:.3e} exceeds certified {bound:.3e}"
        )
    return worst


def dual_exact(frame: Frame) -> DualFrame:
    """Canonical dual frame via an SPD solve of S e~_k = e_k.

    Attaches a warning (does not fail) when the frame operator condition
    number B2/B1 exceeds 1e12.
    """
    B1, B2 = frame.bounds
    warning = None
    if B2 / B1 > ILL_CONDITIONED:
        warning = (
            f"ill-conditioned frame operator: condition number {B2 / B1:.3e}"
        )
    sqw = np.sqrt(frame.space.weights)
    phi = _whitened_analysis(frame.elements, frame.space)
    gram = phi.conj().T @ phi
    # S = W^{-1/2} G W^{1/2}; solve via the Hermitian PD factor G
    rhs = sqw[:, None] * frame.elements.T
    factor = scipy.linalg.cho_factor(gram)
    duals = (scipy.linalg.cho_solve(factor, rhs) / sqw[:, None]).T
    _validate_reconstruction(frame, duals, max(1e-10, 1e-15 * B2 / B1))
    return DualFrame(frame, duals, "exact_solve", 0.0, warning)


def dual_neumann(frame: Frame, target_eps: float) -> DualFrame:
    """Approximate duals by the truncated Neumann recursion.

    N is minimal with ((B2-B1)/(B2+B1))^{N+1} <= target_eps.
    """
    if target_eps <= 0:
        raise ValueError("target_eps must be positive")
    B1, B2 = frame.bounds
    rho = (B2 - B1) / (B2 + B1)
    if rho == 0.0:
        n_iter = 0
    else:
        n_iter = max(
            0, int(np.ceil(np.log(target_eps) / np.log(rho) - 1e-12)) - 1
        )
    certified = float(rho ** (n_iter + 1))
    c = 2.0 / (B1 + B2)
    s_mat = frame.frame_operator_matrix()
    duals = c * frame.elements
    for _ in range(n_iter):
        duals = c * frame.elements + duals - c * (duals @ s_mat.T)
    _validate_reconstruction(frame, duals, certified * (1 + 1e-8) + 1e-13)
    return DualFrame(frame, duals, ("neumann", n_iter), certified)
