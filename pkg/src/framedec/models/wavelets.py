"""Periodized orthonormal discrete wavelet basis.

The default filter is the standard orthogonal 4-tap pair with two
vanishing moments; taps are recorded in DEFAULT_TAPS and echoed into
experiment configs.  The analysis matrix built here is orthogonal on
Z_n (periodic boundary), so its rows form an orthonormal basis in the
Euclidean sense.  Rows are labeled by a dyadic scale index: scaling rows
carry index 0, detail rows carry -1 (coarsest) down to -levels (finest).
"""

import numpy as np

SQRT3 = np.sqrt(3.0)
DEFAULT_TAPS = np.array(
    [(1.0 + SQRT3), (3.0 + SQRT3), (3.0 - SQRT3), (1.0 - SQRT3)]
) / (4.0 * np.sqrt(2.0))


def _single_level_matrix(n, taps):
    """(n, n) orthogonal one-level periodic DWT: [lowpass; highpass] rows."""
    taps = np.asarray(taps, dtype=float)
    m = taps.size
    half = n // 2
    low = np.zeros((half, n))
    high = np.zeros((half, n))
    # quadrature mirror highpass: g_k = (-1)^k h_{m-1-k}
    g = ((-1.0) ** np.arange(m)) * taps[::-1]
    for r in range(half):
        for j in range(m):
            low[r, (2 * r + j) % n] += taps[j]
            high[r, (2 * r + j) % n] += g[j]
    return low, high


def dwt_matrix(n, levels, taps=None):
    """Orthogonal analysis matrix and per-row dyadic scale labels.

    Returns (w, scales): coefficients = w @ signal, signal = w.T @ coeffs.
    Row order is [scaling at coarsest level, details coarsest..finest].
    ``scales[i]`` is 0 for scaling rows and -ell for detail rows, where
    ell = 1 labels the coarsest detail band and ell = levels the finest.
    """
    if taps is None:
        taps = DEFAULT_TAPS
    if n % (2**levels) != 0:
        raise ValueError(f"signal length {n} not divisible by 2^{levels}")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    approx = np.eye(n)
    detail_blocks = []
    length = n
    for lev in range(1, levels + 1):
        low, high = _single_level_matrix(length, taps)
        detail_blocks.append((lev, high @ approx))
        approx = low @ approx
        length //= 2
    rows = [approx]
    scales = [np.zeros(approx.shape[0], dtype=int)]
    # detail_blocks holds finest first (lev=1); emit coarsest..finest
    for lev, block in reversed(detail_blocks):
        rows.append(block)
        scales.append(np.full(block.shape[0], -(levels - lev + 1), dtype=int))
    w = np.vstack(rows)
    return w, np.concatenate(scales)
