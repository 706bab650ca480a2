"""The per-index matrix family linking data-side to solution-side coefficients.

Each member is a complex N x M matrix acting on the stacked component
coefficients for one frame index k.  SVDs are cached at construction;
rank is determined relative to the largest singular value.  A block
partition generalizes the family to disjoint groups of frame indices
coupled by one larger matrix per group.
"""

from __future__ import annotations

import numpy as np

__all__ = ["LambdaFamily", "BlockPartition"]


class LambdaFamily:
    """Sequence of complex N x M matrices with cached singular systems."""

    def __init__(self, matrices, rank_tol=1e-12):
        mats = [np.atleast_2d(np.asarray(m, dtype=complex)) for m in matrices]
        if not mats:
            raise ValueError("empty matrix family")
        shape = mats[0].shape
        for i, m in enumerate(mats):
            if m.shape != shape:
                raise ValueError(
                    f"matrix {i} has shape {m.shape}, expected {shape}"
                )
        self.matrices = mats
        self.n_rows, self.n_cols = shape
        self.rank_tol = float(rank_tol)
        self._svds = [self._truncated_svd(m) for m in mats]

    def _truncated_svd(self, mat):
        u, s, vh = np.linalg.svd(mat, full_matrices=False)
        if s.size == 0 or s[0] == 0.0:
            r = 0
        else:
            r = int(np.count_nonzero(s > self.rank_tol * s[0]))
        return s[:r].copy(), u[:, :r].copy(), vh[:r].conj().T.copy()

    def __len__(self):
        return len(self.matrices)

    def svd_k(self, k):
        """Singular system (mu_j, u_j, v_j)_{j=1..r_k} of the k-th matrix."""
        return self._svds[k]

    def rank(self, k):
        return self._svds[k][0].size

    def pinv_apply(self, k, w):
        """Minimum-norm least-squares solution of Lambda_k h = w."""
        mu, u, v = self._svds[k]
        if mu.size == 0:
            return np.zeros(self.n_cols, dtype=complex)
        w = np.asarray(w, dtype=complex)
        return v @ ((u.conj().T @ w) / mu)

    def apply(self, k, h):
        return self.matrices[k] @ np.asarray(h, dtype=complex)

    def nullspace_projector(self, k):
        """Orthogonal projector onto N(Lambda_k): I - V V^H."""
        _, _, v = self._svds[k]
        return np.eye(self.n_cols, dtype=complex) - v @ v.conj().T

    def injectivity_check(self):
        """(True, None) iff every member has full column rank, else the first failing k."""
        for k in range(len(self.matrices)):
            if self.rank(k) < self.n_cols:
                return False, k
        return True, None

    @property
    def mu_max(self):
        vals = [s[0] for s, _, _ in self._svds if s.size]
        return max(vals) if vals else 0.0

    @property
    def mu_min(self):
        vals = [s[-1] for s, _, _ in self._svds if s.size]
        return min(vals) if vals else 0.0


class BlockPartition:
    """Disjoint groups of frame indices coupled by per-group matrices.

    ``x_groups[k]`` and ``y_groups[k]`` list the solution-side and
    data-side frame indices entering group k; the group matrix has shape
    (N * len(y_groups[k]), M * len(x_groups[k])) where M and N are the
    component counts.  Groups must partition their index sets.  All
    scalar-family machinery is reused by treating each group as a single
    generalized index.
    """

    def __init__(self, x_groups, y_groups, block_matrices, n_components=(1, 1), rank_tol=1e-12):
        if not (len(x_groups) == len(y_groups) == len(block_matrices)):
            raise ValueError("group lists and matrix list must have equal length")
        self.x_groups = [list(g) for g in x_groups]
        self.y_groups = [list(g) for g in y_groups]
        self.m_components, self.n_components_y = n_components
        self._check_partition(self.x_groups, "x")
        self._check_partition(self.y_groups, "y")
        mats = [np.atleast_2d(np.asarray(m, dtype=complex)) for m in block_matrices]
        for k, (m, xg, yg) in enumerate(zip(mats, self.x_groups, self.y_groups)):
            want = (self.n_components_y * len(yg), self.m_components * len(xg))
            if m.shape != want:
                raise ValueError(
                    f"block {k}: matrix shape {m.shape}, expected {want}"
                )
        # a family over group indices backs the per-block SVD machinery;
        # shapes may differ per block, so cache SVDs directly
        self.block_matrices = mats
        self.rank_tol = float(rank_tol)
        self._svds = []
        for m in mats:
            u, s, vh = np.linalg.svd(m, full_matrices=False)
            r = 0 if (s.size == 0 or s[0] == 0.0) else int(
                np.count_nonzero(s > self.rank_tol * s[0])
            )
            self._svds.append((s[:r].copy(), u[:, :r].copy(), vh[:r].conj().T.copy()))

    @staticmethod
    def _check_partition(groups, name):
        seen = set()
        for g in groups:
            for idx in g:
                if idx in seen:
                    raise ValueError(f"{name}-groups overlap at index {idx}")
                seen.add(idx)
        expected = set(range(len(seen)))
        if seen != expected:
            raise ValueError(f"{name}-groups do not cover 0..{len(seen) - 1}")

    def __len__(self):
        return len(self.block_matrices)

    @property
    def x_size(self):
        return sum(len(g) for g in self.x_groups)

    @property
    def y_size(self):
        return sum(len(g) for g in self.y_groups)

    def svd_k(self, k):
        return self._svds[k]

    def rank(self, k):
        return self._svds[k][0].size

    def pinv_apply(self, k, w):
        mu, u, v = self._svds[k]
        if mu.size == 0:
            return np.zeros(self.block_matrices[k].shape[1], dtype=complex)
        w = np.asarray(w, dtype=complex)
        return v @ ((u.conj().T @ w) / mu)

    def apply(self, k, h):
        return self.block_matrices[k] @ np.asarray(h, dtype=complex)

    def nullspace_projector(self, k):
        _, _, v = self._svds[k]
        n = self.block_matrices[k].shape[1]
        return np.eye(n, dtype=complex) - v @ v.conj().T

    def injectivity_check(self):
        for k, m in enumerate(self.block_matrices):
            if self.rank(k) < m.shape[1]:
                return False, k
        return True, None

    @property
    def mu_max(self):
        vals = [s[0] for s, _, _ in self._svds if s.size]
        return max(vals) if vals else 0.0

    @property
    def mu_min(self):
        vals = [s[-1] for s, _, _ in self._svds if s.size]
        return min(vals) if vals else 0.0
