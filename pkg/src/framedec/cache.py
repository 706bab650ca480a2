"""Versioned binary cache of precomputed dual frames.

Dual elements are independent of the right-hand side and can be computed
in advance and reused across solves.  File layout (all little-endian):

    offset  size  field
    0       4     magic "FDEC"
    4       u32   format version (1)
    8       u32   space dimension
    12      u32   element count K
    16      u32   method (0 = exact_solve, 1 = neumann)
    20      i32   neumann iteration count N (-1 for exact)
    24      f64   base-frame bound B1
    32      f64   base-frame bound B2
    40      f64   certified reconstruction error
    48      u32   CRC32 of the payload
    52      u32   reserved (0)
    56      ...   payload: K * dim complex values, interleaved
                  little-endian float64 (re, im)

On load the checksum is verified and the stored bounds are compared with
a recomputation from the loaded elements (tolerance 1e-8).
"""

from __future__ import annotations

import struct
import zlib

import numpy as np

from .frames import DualFrame, Frame

__all__ = ["CacheError", "write_dual_cache", "read_dual_cache", "checksum_of"]

MAGIC = b"FDEC"
VERSION = 1
HEADER = struct.Struct("<4sIIIiidddII")


class CacheError(RuntimeError):
    pass


def _payload_bytes(elements):
    flat = np.ascontiguousarray(elements, dtype=complex).reshape(-1)
    inter = np.empty(2 * flat.size, dtype="<f8")
    inter[0::2] = flat.real
    inter[1::2] = flat.imag
    return inter.tobytes()


def write_dual_cache(path, dual: DualFrame):
    k, dim = dual.elements.shape
    if dual.method == "exact_solve":
        method, n_it = 0, -1
    else:
        method, n_it = 1, int(dual.method[1])
    payload = _payload_bytes(dual.elements)
    b1, b2 = dual.base.bounds
    header = HEADER.pack(
        MAGIC,
        VERSION,
        dim,
        k,
        method,
        n_it,
        b1,
        b2,
        float(dual.certified_error),
        zlib.crc32(payload) & 0xFFFFFFFF,
        0,
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload)


def checksum_of(path):
    with open(path, "rb") as fh:
        fh.seek(HEADER.size)
        return zlib.crc32(fh.read()) & 0xFFFFFFFF


def read_dual_cache(path, base: Frame) -> DualFrame:
    """Load duals for the given base frame, verifying checksum and bounds."""
    with open(path, "rb") as fh:
        raw = fh.read(HEADER.size)
        if len(raw) != HEADER.size:
            raise CacheError("truncated cache header")
        (magic, version, dim, k, method, n_it, b1, b2, cert, crc, _pad) = HEADER.unpack(raw)
        if magic != MAGIC:
            raise CacheError("bad magic; not a dual-frame cache")
        if version != VERSION:
            raise CacheError(f"unsupported cache version {version}")
        payload = fh.read()
    if zlib.crc32(payload) & 0xFFFFFFFF != crc:
        raise CacheError("payload checksum mismatch")
    if (dim, k) != (base.space.dim, base.size):
        raise CacheError(
            f"cache shape ({k}, {dim}) does not match frame ({base.size}, {base.space.dim})"
        )
    inter = np.frombuffer(payload, dtype="<f8")
    if inter.size != 2 * k * dim:
        raise CacheError("payload length mismatch")
    elements = (inter[0::2] + 1j * inter[1::2]).reshape(k, dim)
    bb1, bb2 = base.bounds
    if abs(bb1 - b1) > 1e-8 * max(1.0, abs(b1)) or abs(bb2 - b2) > 1e-8 * max(
        1.0, abs(b2)
    ):
        raise CacheError(
            f"stored bounds ({b1:.12g}, {b2:.12g}) disagree with recomputation "
            f"({bb1:.12g}, {bb2:.12g})"
        )
    method_obj = "exact_solve" if method == 0 else ("neumann", n_it)
    return DualFrame(base, elements, method_obj, cert)
