"""Assemble, verify, and solve with frame decompositions of an operator.

The core relation being represented, per frame index k (or per index
group in the block-partition form), is

    (<A_n x, f_k^n>)_n  =  Lambda_k (<x_m, e_k^m>)_m    for all x.

Verification measures the worst relative violation on random probes.
Reconstruction applies the per-index pseudo-inverse to the data-side
coefficients and synthesizes against the solution-side dual frames,
recording Picard partial sums and the residual bracket of the sandwich
inequality

    C1 ||Ax - y||^2  <=  sum_k ||Lambda_k c_k(x) - d_k(y)||^2
                     <=  C2 ||Ax - y||^2 .
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .frames import DualFrame, Frame, dual_exact
from .lambdas import BlockPartition, LambdaFamily
from .spaces import ProductSpaceSpec, ProductVector, norm

__all__ = [
    "LinearOperatorHandle",
    "VerificationReport",
    "ReconstructionResult",
    "FrameDecomposition",
    "verify_assumption",
    "apply_decomposed",
    "reconstruct",
    "picard_partial_sums",
    "picard_verdict",
    "picard_diagnostic",
    "residual_sandwich",
    "nullspace_membership",
]

PICARD_OVERFLOW_GUARD = 1e120


@dataclass
class LinearOperatorHandle:
    """Black-box bounded linear operator between product spaces."""

    apply: object
    apply_adjoint: object
    domain: ProductSpaceSpec
    codomain: ProductSpaceSpec

    def adjoint_residual(self, probes=10, seed=4242):
        """Worst relative violation of <Ax, y> = <x, A*y> on random pairs."""
        from .spaces import inner_product

        rng = np.random.default_rng(seed)
        worst = 0.0
        for _ in range(probes):
            x = _random_vector(self.domain, rng)
            y = _random_vector(self.codomain, rng)
            lhs = inner_product(self.codomain, self.apply(x), y)
            rhs = inner_product(self.domain, x, self.apply_adjoint(y))
            scale = max(abs(lhs), abs(rhs), 1e-300)
            worst = max(worst, abs(lhs - rhs) / scale)
        return worst


def _random_vector(space, rng):
    return ProductVector(
        [
            rng.standard_normal(c.dim) + 1j * rng.standard_normal(c.dim)
            for c in space.components
        ]
    )


@dataclass
class VerificationReport:
    max_relation_residual: float
    probes: int
    per_k_worst: np.ndarray = field(repr=False, default=None)


@dataclass
class ReconstructionResult:
    solution: ProductVector
    coeffs: np.ndarray
    picard_sum: float
    picard_diverged: bool
    residual_bounds: tuple
    truncation_K: int
    tail_magnitude: float
    notes: dict = field(default_factory=dict)


class FrameDecomposition:
    """Bundle of x/y frames, the matrix family, duals, and verification state.

    ``lambdas`` is a LambdaFamily (one matrix per shared frame index) or
    a BlockPartition (one matrix per disjoint index group).  ``truncation``
    caps the number of index groups entering every sum; it defaults to
    all of them and is recorded in every result.
    """

    def __init__(
        self,
        x_space,
        y_space,
        x_frames,
        y_frames,
        lambdas,
        x_duals=None,
        y_duals=None,
        operator=None,
        truncation=None,
    ):
        self.x_space = x_space
        self.y_space = y_space
        self.x_frames = list(x_frames)
        self.y_frames = list(y_frames)
        if len(self.x_frames) != x_space.n_components:
            raise ValueError("one x-frame per domain component required")
        if len(self.y_frames) != y_space.n_components:
            raise ValueError("one y-frame per codomain component required")
        kx = {f.size for f in self.x_frames}
        ky = {f.size for f in self.y_frames}
        if len(kx) != 1 or len(ky) != 1:
            raise ValueError("component frames must share one index set")
        self.kx = kx.pop()
        self.ky = ky.pop()
        self.lambdas = lambdas
        if isinstance(lambdas, BlockPartition):
            if lambdas.x_size != self.kx or lambdas.y_size != self.ky:
                raise ValueError("block partition does not cover the frame indices")
            if lambdas.m_components != len(self.x_frames) or (
                lambdas.n_components_y != len(self.y_frames)
            ):
                raise ValueError("block partition component counts mismatch")
        elif isinstance(lambdas, LambdaFamily):
            if len(lambdas) != self.kx or self.kx != self.ky:
                raise ValueError(
                    "scalar-form family needs one matrix per shared frame index"
                )
            if lambdas.n_cols != len(self.x_frames) or lambdas.n_rows != len(self.y_frames):
                raise ValueError("matrix shape must be (N components, M components)")
        else:
            raise TypeError("lambdas must be a LambdaFamily or BlockPartition")
        self.x_duals = list(x_duals) if x_duals is not None else [
            dual_exact(f) for f in self.x_frames
        ]
        self.y_duals = list(y_duals) if y_duals is not None else [
            dual_exact(f) for f in self.y_frames
        ]
        self.operator = operator
        self.n_blocks = len(lambdas)
        self.truncation = self.n_blocks if truncation is None else int(truncation)
        if not 1 <= self.truncation <= self.n_blocks:
            raise ValueError("truncation outside 1..number of index groups")
        self.verification = None
        self.meta = {}

    # -- index bookkeeping -------------------------------------------------

    def block_indices(self, k):
        """Solution-side and data-side frame indices of group k."""
        if isinstance(self.lambdas, BlockPartition):
            return self.lambdas.x_groups[k], self.lambdas.y_groups[k]
        return [k], [k]

    def x_coeff_matrix(self, x: ProductVector):
        """(K, M) matrix of <x_m, e_k^m>."""
        self.x_space.check(x)
        return np.stack(
            [f.analyze(b) for f, b in zip(self.x_frames, x.blocks)], axis=1
        )

    def y_coeff_matrix(self, y: ProductVector):
        """(K, N) matrix of <y_n, f_k^n>."""
        self.y_space.check(y)
        return np.stack(
            [f.analyze(b) for f, b in zip(self.y_frames, y.blocks)], axis=1
        )

    def gather(self, coeff_matrix, indices):
        return coeff_matrix[indices].reshape(-1)

    @property
    def y_frame_bounds(self):
        """(C1, C2): min lower / max upper bound over codomain components."""
        c1 = min(f.bounds[0] for f in self.y_frames)
        c2 = max(f.bounds[1] for f in self.y_frames)
        return c1, c2

    @property
    def x_frame_bounds(self):
        b1 = min(f.bounds[0] for f in self.x_frames)
        b2 = max(f.bounds[1] for f in self.x_frames)
        return b1, b2

    def tight_y(self):
        return all(f.tight for f in self.y_frames)


def verify_assumption(op, dec: FrameDecomposition, probes=20, seed=90_125):
    """Probe the coefficient relation on random vectors.

    The residual for one probe x and group k is
    ||Lambda_k c_k(x) - d_k(Ax)|| / (1 + ||x||); the report stores the
    worst value per group and overall.  A large residual is data, not an
    error.
    """
    if probes < 1:
        raise ValueError("probes must be >= 1")
    rng = np.random.default_rng(seed)
    per_k = np.zeros(dec.n_blocks)
    for _ in range(probes):
        x = _random_vector(dec.x_space, rng)
        y = op.apply(x)
        cmat = dec.x_coeff_matrix(x)
        dmat = dec.y_coeff_matrix(y)
        scale = 1.0 + norm(dec.x_space, x)
        for k in range(dec.truncation):
            xg, yg = dec.block_indices(k)
            res = dec.lambdas.apply(k, dec.gather(cmat, xg)) - dec.gather(dmat, yg)
            per_k[k] = max(per_k[k], np.linalg.norm(res) / scale)
    report = VerificationReport(float(per_k.max()), probes, per_k)
    dec.verification = report
    return report


def apply_decomposed(dec: FrameDecomposition, x: ProductVector) -> ProductVector:
    """Evaluate the operator through its decomposition (dual-frame synthesis)."""
    if dec.y_duals is None:
        raise ValueError("decomposition carries no y-duals")
    cmat = dec.x_coeff_matrix(x)
    dhat = np.zeros((dec.ky, len(dec.y_frames)), dtype=complex)
    for k in range(dec.truncation):
        xg, yg = dec.block_indices(k)
        d = dec.lambdas.apply(k, dec.gather(cmat, xg))
        dhat[yg] = d.reshape(len(yg), len(dec.y_frames))
    return ProductVector(
        [dual.synthesize(dhat[:, n]) for n, dual in enumerate(dec.y_duals)]
    )


def picard_partial_sums(lambdas, data_blocks):
    """Cumulative sums of mu^{-2} |u^H d|^2 over index groups.

    ``data_blocks`` is an iterable of data-side coefficient vectors, one
    per group, matching the row dimension of the group matrices.
    """
    partial = np.zeros(len(data_blocks))
    acc = 0.0
    for k, d in enumerate(data_blocks):
        mu, u, _ = lambdas.svd_k(k)
        if mu.size:
            proj = u.conj().T @ np.asarray(d, dtype=complex)
            acc += float(np.sum(np.abs(proj) ** 2 / mu**2))
        partial[k] = acc
    return partial


def picard_verdict(partial_sums, rel_slope_tol=0.1):
    """Heuristic growth-rate classification of Picard partial sums.

    Compares the mean increment over the last quartile, extrapolated over
    the whole index range, against a fraction of the final value.  The
    true condition is asymptotic and undecidable from finite data; the
    verdict is labeled accordingly by callers.
    """
    s = np.asarray(partial_sums, dtype=float)
    n = s.size
    if n == 0 or not np.all(np.isfinite(s)):
        return "diverging"
    total = s[-1]
    if total <= 0.0:
        return "converging"
    q = max(1, n // 4)
    mean_increment = (s[-1] - s[n - 1 - q]) / q if n > 1 else 0.0
    return "diverging" if mean_increment * n > rel_slope_tol * total else "converging"


def picard_diagnostic(dec: FrameDecomposition, y: ProductVector):
    """Partial Picard sums for given data plus the growth-rate verdict."""
    dmat = dec.y_coeff_matrix(y)
    blocks = []
    for k in range(dec.truncation):
        _, yg = dec.block_indices(k)
        blocks.append(dec.gather(dmat, yg))
    partial = picard_partial_sums(dec.lambdas, blocks)
    return partial, picard_verdict(partial)


def reconstruct(dec: FrameDecomposition, y: ProductVector) -> ReconstructionResult:
    """Apply the per-group pseudo-inverses and synthesize against the x-duals.

    The solution is the minimum-coefficient least-squares candidate; its
    residual is bracketed a posteriori through the sandwich inequality
    evaluated on the synthesized solution's own coefficients.
    """
    dmat = dec.y_coeff_matrix(y)
    m = len(dec.x_frames)
    hmat = np.zeros((dec.kx, m), dtype=complex)
    picard_total = 0.0
    for k in range(dec.truncation):
        xg, yg = dec.block_indices(k)
        d = dec.gather(dmat, yg)
        h = dec.lambdas.pinv_apply(k, d)
        hmat[xg] = h.reshape(len(xg), m)
        mu, u, _ = dec.lambdas.svd_k(k)
        if mu.size:
            proj = u.conj().T @ d
            picard_total += float(np.sum(np.abs(proj) ** 2 / mu**2))
    diverged = not np.isfinite(picard_total) or picard_total > PICARD_OVERFLOW_GUARD
    solution = ProductVector(
        [dual.synthesize(hmat[:, i]) for i, dual in enumerate(dec.x_duals)]
    )
    # sandwich bracket evaluated at the synthesized solution
    cmat = dec.x_coeff_matrix(solution)
    s_val = 0.0
    for k in range(dec.truncation):
        xg, yg = dec.block_indices(k)
        res = dec.lambdas.apply(k, dec.gather(cmat, xg)) - dec.gather(dmat, yg)
        s_val += float(np.sum(np.abs(res) ** 2))
    c1, c2 = dec.y_frame_bounds
    bounds = (float(np.sqrt(s_val / c2)), float(np.sqrt(s_val / c1)))
    tail_start = int(np.floor(0.9 * dec.truncation))
    tail_rows = []
    for k in range(tail_start, dec.truncation):
        xg, _ = dec.block_indices(k)
        tail_rows.extend(xg)
    tail = float(np.linalg.norm(hmat[tail_rows])) if tail_rows else 0.0
    return ReconstructionResult(
        solution=solution,
        coeffs=hmat,
        picard_sum=picard_total,
        picard_diverged=diverged,
        residual_bounds=bounds,
        truncation_K=dec.truncation,
        tail_magnitude=tail,
    )


def residual_sandwich(dec: FrameDecomposition, x: ProductVector, y: ProductVector):
    """Evaluate both sides of the sandwich inequality for given (x, y).

    Returns (S, lower_ok, upper_ok) where S is the summed squared
    coefficient residual and the flags check it against C1 and C2 times
    the true operator residual (requires the decomposition to carry its
    operator handle).
    """
    if dec.operator is None:
        raise ValueError("decomposition carries no operator handle")
    cmat = dec.x_coeff_matrix(x)
    dmat = dec.y_coeff_matrix(y)
    s_val = 0.0
    for k in range(dec.truncation):
        xg, yg = dec.block_indices(k)
        res = dec.lambdas.apply(k, dec.gather(cmat, xg)) - dec.gather(dmat, yg)
        s_val += float(np.sum(np.abs(res) ** 2))
    r2 = norm(dec.y_space, dec.operator.apply(x) - y) ** 2
    c1, c2 = dec.y_frame_bounds
    slack = 1e-10 * max(s_val, c2 * r2, 1e-300)
    lower_ok = c1 * r2 <= s_val + slack
    upper_ok = s_val <= c2 * r2 + slack
    return s_val, bool(lower_ok), bool(upper_ok)


def nullspace_membership(dec: FrameDecomposition, x: ProductVector, tol=1e-10):
    """True iff every group residual Lambda_k c_k(x) vanishes (x in N(A)).

    Cross-checked against ||Ax|| when the operator handle is present; a
    disagreement triggers a warning since the two characterizations are
    equivalent.
    """
    cmat = dec.x_coeff_matrix(x)
    worst = 0.0
    for k in range(dec.truncation):
        xg, _ = dec.block_indices(k)
        worst = max(worst, float(np.linalg.norm(dec.lambdas.apply(k, dec.gather(cmat, xg)))))
    scale = max(dec.lambdas.mu_max * float(np.linalg.norm(cmat)), 1e-300)
    verdict = worst <= tol * scale
    if dec.operator is not None:
        xnorm = norm(dec.x_space, x)
        opnorm = norm(dec.y_space, dec.operator.apply(x))
        op_verdict = opnorm <= np.sqrt(tol) * max(xnorm, 1e-300)
        if op_verdict != verdict:
            warnings.warn(
                "nullspace membership: frame-side and operator-side verdicts "
                f"disagree (coeff residual {worst:.3e}, ||Ax|| {opnorm:.3e})"
            )
    return verdict
