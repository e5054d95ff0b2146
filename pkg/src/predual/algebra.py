"""Finite-dimensional W*-algebras as direct sums of full matrix blocks.

A shape ``[n_1, ..., n_r]`` stands for M_{n_1} + ... + M_{n_r}.  The minimal
central projections are the block identities, so the central decomposition is
read straight off the block list.  A flagged *discretized diffuse model* is the
diagonal algebra with ``n`` atoms, used as the level-n stand-in for L_inf[0,1];
it is reported as one summand so that results on it are never mistaken for
statements about ``n`` unrelated one-dimensional factors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import InputError

TYPE_I_FINITE = "type-I-finite"
DISCRETIZED_DIFFUSE = "discretized-diffuse-model"


@dataclass(frozen=True)
class AlgebraShape:
    blocks: tuple[int, ...]
    diffuse_resolution: Optional[int] = None

    def __post_init__(self):
        blocks = tuple(int(b) for b in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise InputError("algebra shape needs at least one block")
        if any(b < 1 for b in blocks):
            raise InputError(f"block dimensions must be >= 1, got {list(blocks)}")
        if self.diffuse_resolution is not None:
            n = int(self.diffuse_resolution)
            if n < 1:
                raise InputError("diffuse_model resolution must be >= 1")
            if blocks != (1,) * n:
                raise InputError("a diffuse_model shape must consist of `resolution` blocks of dimension 1")

    @classmethod
    def diffuse(cls, resolution: int) -> "AlgebraShape":
        """Level-``resolution`` discretization of L_inf[0,1]."""
        return cls((1,) * int(resolution), diffuse_resolution=int(resolution))

    @property
    def is_diffuse_model(self) -> bool:
        return self.diffuse_resolution is not None

    @property
    def dimension(self) -> int:
        return sum(b * b for b in self.blocks)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def to_json(self) -> dict:
        doc = {"blocks": list(self.blocks)}
        if self.is_diffuse_model:
            doc["diffuse_model"] = {"resolution": self.diffuse_resolution}
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "AlgebraShape":
        try:
            blocks = doc["blocks"]
        except (KeyError, TypeError):
            raise InputError("algebra: missing field 'blocks'") from None
        diffuse = doc.get("diffuse_model")
        if diffuse is not None:
            return cls(tuple(blocks), diffuse_resolution=diffuse["resolution"])
        return cls(tuple(blocks))


@dataclass(frozen=True)
class Summand:
    index: int
    block_indices: tuple[int, ...]
    block_dim: int
    factor_type: str
    center_dim: int

    @property
    def is_factor(self) -> bool:
        return self.center_dim == 1


@dataclass(frozen=True)
class CentralDecomposition:
    summands: tuple[Summand, ...]
    n_blocks: int

    @property
    def center_dimension(self) -> int:
        return sum(s.center_dim for s in self.summands)

    def central_projection(self, i: int) -> tuple[int, ...]:
        """Indicator of summand ``i`` over blocks (1 on its blocks, 0 elsewhere)."""
        members = set(self.summands[i].block_indices)
        return tuple(int(b in members) for b in range(self.n_blocks))


def central_decomposition(shape: AlgebraShape) -> CentralDecomposition:
    if not isinstance(shape, AlgebraShape):
        raise InputError("central_decomposition expects an AlgebraShape")
    if shape.is_diffuse_model:
        n = shape.diffuse_resolution
        summand = Summand(0, tuple(range(n)), 1, DISCRETIZED_DIFFUSE, n)
        return CentralDecomposition((summand,), n)
    summands = tuple(Summand(i, (i,), b, TYPE_I_FINITE, 1) for i, b in enumerate(shape.blocks))
    return CentralDecomposition(summands, shape.n_blocks)


def decompose_functional(phi, shape: AlgebraShape) -> list:
    """Restrictions ``phi * z_i`` to the central summands, as functionals on ``shape``.

    Every part lives on the full algebra and vanishes off its summand, so the
    parts add back up to ``phi`` and their trace norms add up to that of ``phi``.
    """
    phi.check_shape(shape)
    decomposition = central_decomposition(shape)
    return [phi.restrict_to_blocks(s.block_indices) for s in decomposition.summands]
