"""Shared test utilities: synthetic decompositions with dense oracles."""

import numpy as np

from framedec import (
    ComponentSpace,
    Frame,
    FrameDecomposition,
    LambdaFamily,
    LinearOperatorHandle,
    ProductSpaceSpec,
    ProductVector,
    dual_exact,
    norm,
)


def random_pv(space, rng):
    return ProductVector(
        [
            rng.standard_normal(c.dim) + 1j * rng.standard_normal(c.dim)
            for c in space.components
        ]
    )


def rel_err(space, a, b):
    return norm(space, a - b) / max(norm(space, b), 1e-300)


def dense_operator(a_mat, x_space, y_space):
    """Operator handle for an explicit matrix, adjoint respecting weights."""
    wx = x_space.components[0].weights
    wy = y_space.components[0].weights

    def apply(pv):
        return ProductVector([a_mat @ pv.blocks[0]])

    def apply_adjoint(pv):
        return ProductVector([(a_mat.conj().T @ (wy * pv.blocks[0])) / wx])

    return LinearOperatorHandle(apply, apply_adjoint, x_space, y_space)


def synthetic_decomposition(x_elems, y_elems, lam, x_weights=None, y_weights=None):
    """Decomposition whose operator is defined BY the decomposition formula.

    The y elements must form a basis (exact frame) so its duals are
    biorthogonal and A z := sum_k lam_k <z, e_k> dual-f_k satisfies
    <A z, f_k> = lam_k <z, e_k> exactly.
    """
    x_elems = np.asarray(x_elems, dtype=complex)
    y_elems = np.asarray(y_elems, dtype=complex)
    lam = np.asarray(lam, dtype=complex)
    comp_x = ComponentSpace(x_elems.shape[1], x_weights)
    comp_y = ComponentSpace(y_elems.shape[1], y_weights)
    x_space = ProductSpaceSpec((comp_x,))
    y_space = ProductSpaceSpec((comp_y,))
    x_frame = Frame(comp_x, x_elems)
    y_frame = Frame(comp_y, y_elems)
    assert y_frame.exact, "synthetic route needs a basis on the data side"
    y_dual = dual_exact(y_frame)
    a_mat = y_dual.elements.T @ (lam[:, None] * x_frame._analysis)
    op = dense_operator(a_mat, x_space, y_space)
    family = LambdaFamily([np.array([[v]]) for v in lam])
    dec = FrameDecomposition(
        x_space,
        y_space,
        [x_frame],
        [y_frame],
        family,
        y_duals=[y_dual],
        operator=op,
    )
    dec.meta["matrix"] = a_mat
    return dec
