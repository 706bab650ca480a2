"""Periodic atmospheric tomography operator with per-frequency blocks.

Layers live on an n x n grid over the torus [-T, T]^2; the forward map
sums periodically shifted layers per guide-star direction, realized by
exact Fourier phase shifts so the per-frequency coefficient relation

    <(A phi)_g, w_jk>  =  sum_l exp(i pi (j ax + k ay) h_l / T) <phi_l, w_jk>

holds to machine precision.  Each retained frequency pair (j, k) with
|j|, |k| <= J yields one G x L block with entries w_jk(a_g h_l) =
(1/(2T)) exp(...); the solution-side frame elements are scaled by 2T so
the block relation matches exactly.  The (0, 0) block has rank 1 for any
geometry: only the sum of the layer means is observable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..decomposition import FrameDecomposition, LinearOperatorHandle
from ..frames import Frame
from ..lambdas import BlockPartition
from ..spaces import ComponentSpace, ProductSpaceSpec, ProductVector

__all__ = [
    "TomographySpec",
    "tomography_operator",
    "tomography_blocks",
    "tomography_decomposition",
    "TomographyCoefficients",
]


@dataclass(frozen=True)
class TomographySpec:
    """Layer heights, guide-star directions, torus half-width, grid, cutoff."""

    heights: tuple
    directions: tuple
    torus_half_width: float
    grid: int
    cutoff: int

    def __post_init__(self):
        heights = tuple(float(h) for h in self.heights)
        directions = tuple((float(a), float(b)) for a, b in self.directions)
        object.__setattr__(self, "heights", heights)
        object.__setattr__(self, "directions", directions)
        if self.torus_half_width <= 0:
            raise ValueError("torus half-width must be positive")
        if self.cutoff < 0 or 2 * self.cutoff + 1 > self.grid:
            raise ValueError("frequency cutoff must satisfy 0 <= 2J+1 <= grid")
        # shifted aperture must stay within one period: components of
        # a_g h_l may reach the half-width (half-period shifts allowed)
        worst = max(
            max(abs(ax * h), abs(ay * h))
            for ax, ay in directions
            for h in heights
        )
        if worst > self.torus_half_width:
            raise ValueError(
                f"aperture escapes torus: shift {worst:g} > half-width "
                f"{self.torus_half_width:g}"
            )

    @classmethod
    def from_windshifts(cls, wind_vectors, lags, torus_half_width, grid, cutoff):
        """SCAO windshift alias: wind vectors play the role of directions,
        time lags the role of layer heights."""
        return cls(lags, wind_vectors, torus_half_width, grid, cutoff)

    @property
    def n_layers(self):
        return len(self.heights)

    @property
    def n_stars(self):
        return len(self.directions)

    def shifts(self):
        """(G, L, 2) shift vectors a_g h_l."""
        a = np.asarray(self.directions)
        h = np.asarray(self.heights)
        return a[:, None, :] * h[None, :, None]

    def frequencies(self):
        """Retained (j, k) pairs, |j|, |k| <= J, lexicographic order."""
        j = np.arange(-self.cutoff, self.cutoff + 1)
        jj, kk = np.meshgrid(j, j, indexing="ij")
        return np.stack([jj.reshape(-1), kk.reshape(-1)], axis=1)


def _grid_space(spec):
    n = spec.grid
    w = (2.0 * spec.torus_half_width / n) ** 2
    return ComponentSpace(n * n, np.full(n * n, w))


def _shift_phase(spec, shift):
    """FFT-domain phase factors of a periodic shift, per 2D frequency."""
    n = spec.grid
    t = spec.torus_half_width
    freq = np.fft.fftfreq(n, d=1.0 / n)
    px = np.exp(1j * np.pi * freq * shift[0] / t)
    py = np.exp(1j * np.pi * freq * shift[1] / t)
    return px[:, None] * py[None, :]


def tomography_operator(spec: TomographySpec) -> LinearOperatorHandle:
    """Grid-space operator: sum of periodically shifted layers per star."""
    n = spec.grid
    shifts = spec.shifts()
    phases = [
        [_shift_phase(spec, shifts[g, l]) for l in range(spec.n_layers)]
        for g in range(spec.n_stars)
    ]
    domain = ProductSpaceSpec(tuple(_grid_space(spec) for _ in range(spec.n_layers)))
    codomain = ProductSpaceSpec(tuple(_grid_space(spec) for _ in range(spec.n_stars)))

    def apply(pv):
        hats = [np.fft.fft2(b.reshape(n, n)) for b in pv.blocks]
        out = []
        for g in range(spec.n_stars):
            acc = np.zeros((n, n), dtype=complex)
            for l in range(spec.n_layers):
                acc += hats[l] * phases[g][l]
            out.append(np.fft.ifft2(acc).reshape(-1))
        return ProductVector(out)

    def apply_adjoint(pv):
        hats = [np.fft.fft2(b.reshape(n, n)) for b in pv.blocks]
        out = []
        for l in range(spec.n_layers):
            acc = np.zeros((n, n), dtype=complex)
            for g in range(spec.n_stars):
                acc += hats[g] * np.conj(phases[g][l])
            out.append(np.fft.ifft2(acc).reshape(-1))
        return ProductVector(out)

    return LinearOperatorHandle(apply, apply_adjoint, domain, codomain)


def block_matrix(spec: TomographySpec, j, k):
    """G x L block with entries w_jk(a_g^x h_l, a_g^y h_l)."""
    t = spec.torus_half_width
    shifts = spec.shifts()
    phase = np.exp(
        1j * np.pi * (j * shifts[:, :, 0] + k * shifts[:, :, 1]) / t
    )
    return phase / (2.0 * t)


def tomography_blocks(spec: TomographySpec) -> BlockPartition:
    """One singleton index group per retained frequency pair."""
    freqs = spec.frequencies()
    mats = [block_matrix(spec, j, k) for j, k in freqs]
    groups = [[i] for i in range(len(freqs))]
    return BlockPartition(
        groups,
        [list(g) for g in groups],
        mats,
        n_components=(spec.n_layers, spec.n_stars),
    )


class TomographyCoefficients:
    """Adapters between torus grids and retained Fourier coefficients."""

    def __init__(self, spec: TomographySpec):
        self.spec = spec
        self.freqs = spec.frequencies()
        n = spec.grid
        t = spec.torus_half_width
        # <phi, w_jk> from the FFT of grid samples: positions start at -T,
        # contributing the alternating sign below
        self._sign = (-1.0) ** (self.freqs[:, 0] + self.freqs[:, 1])
        self._coeff_factor = ((2.0 * t / n) ** 2 / (2.0 * t)) * self._sign

    def grid_to_coeffs(self, grid_values):
        n = self.spec.grid
        hat = np.fft.fft2(np.asarray(grid_values, dtype=complex).reshape(n, n))
        picked = hat[self.freqs[:, 0] % n, self.freqs[:, 1] % n]
        return picked * self._coeff_factor

    def coeffs_to_grid(self, coeffs):
        """Synthesize the retained band back onto the grid."""
        n = self.spec.grid
        t = self.spec.torus_half_width
        hat = np.zeros((n, n), dtype=complex)
        hat[self.freqs[:, 0] % n, self.freqs[:, 1] % n] = (
            np.asarray(coeffs, dtype=complex) * self._sign * (n * n) / (2.0 * t)
        )
        return np.fft.ifft2(hat).reshape(-1)

    def stack(self, product_vector_blocks):
        """(K_freq, components) coefficient matrix from grid blocks."""
        return np.stack(
            [self.grid_to_coeffs(b) for b in product_vector_blocks], axis=1
        )


def tomography_decomposition(spec: TomographySpec) -> FrameDecomposition:
    """Frame decomposition in retained-coefficient coordinates.

    Component spaces hold the coefficients <., w_jk> of each layer or
    wavefront; the y-frames are the canonical orthonormal bases (tight,
    bound 1) and the x-frame elements are scaled by 2T (tight, bound
    (2T)^2) so the spec block entries (1/(2T)) exp(...) connect them
    exactly.  The grid operator enters through TomographyCoefficients.
    """
    kf = len(spec.frequencies())
    t = spec.torus_half_width
    unit = ComponentSpace(kf, np.ones(kf))
    x_space = ProductSpaceSpec(tuple(unit for _ in range(spec.n_layers)))
    y_space = ProductSpaceSpec(tuple(unit for _ in range(spec.n_stars)))
    eye = np.eye(kf, dtype=complex)
    x_frames = [Frame(unit, 2.0 * t * eye) for _ in range(spec.n_layers)]
    y_frames = [Frame(unit, eye) for _ in range(spec.n_stars)]
    blocks = tomography_blocks(spec)
    mats = [2.0 * t * m for m in blocks.block_matrices]

    def apply(pv):
        c = np.stack(pv.blocks, axis=1)
        out = np.stack([mats[i] @ c[i] for i in range(kf)], axis=0)
        return ProductVector([out[:, g] for g in range(spec.n_stars)])

    def apply_adjoint(pv):
        d = np.stack(pv.blocks, axis=1)
        out = np.stack(
            [mats[i].conj().T @ d[i] for i in range(kf)], axis=0
        )
        return ProductVector([out[:, l] for l in range(spec.n_layers)])

    op = LinearOperatorHandle(apply, apply_adjoint, x_space, y_space)
    dec = FrameDecomposition(
        x_space,
        y_space,
        x_frames,
        y_frames,
        blocks,
        operator=op,
    )
    dec.meta["adapters"] = TomographyCoefficients(spec)
    dec.meta["spec"] = spec
    return dec
