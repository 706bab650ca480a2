"""Numpy implementation of the line-integral weight assembly.

For every (angle, detector offset) pair the ray s*omega + t*omega_perp is
sampled at pixel-width steps over t in [-1, 1]; each sample deposits
bilinear interpolation weights (times the step length) onto its four
neighboring pixels.  Pixels outside the disk mask are skipped.  Triplets
are emitted in (angle, detector, step, corner) order so the compiled
kernel and this fallback produce identical output.
"""

import numpy as np


def line_integral_triplets(p, pixel_index, angles, offsets):
    """COO triplets (rows, cols, vals) of the discrete ray transform.

    Parameters
    ----------
    p : int
        pixels per side; the image grid covers [-1, 1]^2.
    pixel_index : int64 array of length p*p
        column index per pixel (C-order, row = y), -1 outside the mask.
    angles : float array (q,)
    offsets : float array (d,)
        detector-cell centers in [-1, 1].
    """
    pixel_index = np.ascontiguousarray(pixel_index, dtype=np.int64)
    angles = np.asarray(angles, dtype=float)
    offsets = np.asarray(offsets, dtype=float)
    q = angles.size
    d = offsets.size
    h = 2.0 / p
    t = -1.0 + (np.arange(p) + 0.5) * h

    rows_out = []
    cols_out = []
    vals_out = []
    for ia in range(q):
        cos_a = np.cos(angles[ia])
        sin_a = np.sin(angles[ia])
        # sample coordinates, shape (d, steps)
        x = offsets[:, None] * cos_a - t[None, :] * sin_a
        y = offsets[:, None] * sin_a + t[None, :] * cos_a
        gx = (x + 1.0) / h - 0.5
        gy = (y + 1.0) / h - 0.5
        ix0 = np.floor(gx).astype(np.int64)
        iy0 = np.floor(gy).astype(np.int64)
        fx = gx - ix0
        fy = gy - iy0
        # corner order: (0,0), (1,0), (0,1), (1,1) in (dx, dy)
        cx = np.stack([ix0, ix0 + 1, ix0, ix0 + 1], axis=-1)
        cy = np.stack([iy0, iy0, iy0 + 1, iy0 + 1], axis=-1)
        w = np.stack(
            [
                (1.0 - fx) * (1.0 - fy),
                fx * (1.0 - fy),
                (1.0 - fx) * fy,
                fx * fy,
            ],
            axis=-1,
        ) * h
        inside = (cx >= 0) & (cx < p) & (cy >= 0) & (cy < p)
        flat = np.where(inside, cy * p + cx, 0)
        col = np.where(inside, pixel_index[flat], -1)
        keep = (col >= 0) & (w > 0.0)
        row = np.broadcast_to(
            (np.arange(d) * q + ia)[:, None, None], keep.shape
        )
        rows_out.append(row[keep].astype(np.int64))
        cols_out.append(col[keep].astype(np.int64))
        vals_out.append(w[keep])
    return (
        np.concatenate(rows_out),
        np.concatenate(cols_out),
        np.concatenate(vals_out),
    )
