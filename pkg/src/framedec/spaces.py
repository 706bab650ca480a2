"""Finite-dimensional product Hilbert spaces with diagonal Gram weights.

A component space is C^dim equipped with the inner product
``<u, v> = sum_i w_i u_i conj(v_i)`` (linear in the first argument).
Product spaces are ordered tuples of component spaces; their inner
product is the sum of the component inner products.  Scalars are complex
throughout; real problems carry zero imaginary parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "DimensionMismatch",
    "ComponentSpace",
    "ProductSpaceSpec",
    "ProductVector",
    "inner_product",
    "norm",
]


class DimensionMismatch(ValueError):
    """A vector does not conform to a space; names the offending block."""

    def __init__(self, block, expected, got):
        self.block = block
        self.expected = expected
        self.got = got
        super().__init__(
            f"block {block}: expected length {expected}, got {got}"
        )


@dataclass(frozen=True)
class ComponentSpace:
    """One factor of a product space: dimension plus quadrature weights.

    Weights must be strictly positive; a function sampled at n uniform
    points on an interval of length ell carries weights ell/n so that the
    discrete inner product approximates the L2 integral.
    """

    dim: int
    weights: np.ndarray = None

    def __post_init__(self):
        if self.dim <= 0:
            raise ValueError("dim must be positive")
        w = self.weights
        if w is None:
            w = np.ones(self.dim)
        w = np.asarray(w, dtype=float)
        if w.shape != (self.dim,):
            raise ValueError(f"weights must have shape ({self.dim},)")
        if not np.all(w > 0):
            raise ValueError("all gram weights must be strictly positive")
        object.__setattr__(self, "weights", w)

    def inner(self, u, v):
        u = np.asarray(u)
        v = np.asarray(v)
        if u.shape != (self.dim,):
            raise DimensionMismatch(0, self.dim, u.shape)
        if v.shape != (self.dim,):
            raise DimensionMismatch(0, self.dim, v.shape)
        return complex(np.sum(self.weights * u * np.conj(v)))

    def norm(self, u):
        u = np.asarray(u)
        if u.shape != (self.dim,):
            raise DimensionMismatch(0, self.dim, u.shape)
        return float(np.sqrt(np.sum(self.weights * np.abs(u) ** 2)))


@dataclass(frozen=True)
class ProductSpaceSpec:
    """Ordered list of component spaces forming X = prod X_m."""

    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise ValueError("product space needs at least one component")
        object.__setattr__(self, "components", comps)

    @property
    def n_components(self):
        return len(self.components)

    @property
    def total_dim(self):
        return sum(c.dim for c in self.components)

    def check(self, u: "ProductVector"):
        if len(u.blocks) != len(self.components):
            raise DimensionMismatch(
                "count", len(self.components), len(u.blocks)
            )
        for m, (blk, comp) in enumerate(zip(u.blocks, self.components)):
            if blk.shape != (comp.dim,):
                raise DimensionMismatch(m, comp.dim, blk.shape[0] if blk.ndim == 1 else blk.shape)


class ProductVector:
    """Element of a product space: one complex coordinate block per component."""

    __slots__ = ("blocks",)

    def __init__(self, blocks):
        self.blocks = [np.asarray(b, dtype=complex).reshape(-1) for b in blocks]

    @classmethod
    def zeros(cls, space: ProductSpaceSpec):
        return cls([np.zeros(c.dim, dtype=complex) for c in space.components])

    @classmethod
    def single(cls, block):
        return cls([block])

    def copy(self):
        return ProductVector([b.copy() for b in self.blocks])

    def __add__(self, other):
        return ProductVector([a + b for a, b in zip(self.blocks, other.blocks)])

    def __sub__(self, other):
        return ProductVector([a - b for a, b in zip(self.blocks, other.blocks)])

    def __mul__(self, scalar):
        return ProductVector([scalar * b for b in self.blocks])

    __rmul__ = __mul__

    def __len__(self):
        return len(self.blocks)

    def concat(self):
        return np.concatenate(self.blocks)

    def __repr__(self):
        dims = [b.shape[0] for b in self.blocks]
        return f"ProductVector(blocks={dims})"


def inner_product(space: ProductSpaceSpec, u: ProductVector, v: ProductVector) -> complex:
    """Sum of weighted component inner products; linear in ``u``."""
    space.check(u)
    space.check(v)
    acc = 0.0 + 0.0j
    for comp, ub, vb in zip(space.components, u.blocks, v.blocks):
        acc += np.sum(comp.weights * ub * np.conj(vb))
    return complex(acc)


def norm(space: ProductSpaceSpec, u: ProductVector) -> float:
    """Induced norm sqrt(<u, u>); zero iff u is the zero vector."""
    space.check(u)
    acc = 0.0
    for comp, ub in zip(space.components, u.blocks):
        acc += float(np.sum(comp.weights * np.abs(ub) ** 2))
    return float(np.sqrt(acc))
