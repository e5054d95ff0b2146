"""Seeded random instance generators.

Each generator takes one ``numpy.random.Generator`` built from the seed, so a
rerun with the same seed and parameters reproduces the document exactly.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .algebra import AlgebraShape
from .daugavet import discretize
from .errors import InputError
from .exact import ExactMatrix, parse_rational
from .functional import EXACT, FLOAT, Functional, SpectralBlock
from .serialization import SCHEMA_VERSION, InstanceDocument, fmt_number

KINDS = ("density", "spectral", "rank-one")


def haar_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density(blocks: Sequence[int], rng: np.random.Generator) -> Functional:
    """``a_i = u_i rho_i`` with ``sum tr(rho_i) = 1``; so ``||phi|| = 1``."""
    rhos = []
    for b in blocks:
        g = rng.standard_normal((b, b)) + 1j * rng.standard_normal((b, b))
        rhos.append(g @ g.conj().T)
    total = sum(np.trace(r).real for r in rhos)
    mats = [haar_unitary(b, rng) @ (r / total) for b, r in zip(blocks, rhos)]
    return Functional(mats, shape=AlgebraShape(tuple(blocks)))


def _signed_permutation(n: int, rng: np.random.Generator) -> ExactMatrix:
    perm = rng.permutation(n)
    phases = [(1, 0), (0, 1), (-1, 0), (0, -1)]
    rows = [[0] * n for _ in range(n)]
    for j, i in enumerate(perm):
        rows[int(i)][j] = list(phases[int(rng.integers(4))])
    return ExactMatrix.from_entries(rows)


def random_spectral(blocks: Sequence[int], grid: Fraction, rng: np.random.Generator) -> Functional:
    """Weights on the grid ``{grid, 2 grid, ..., 1}`` and ``v`` a phased permutation."""
    grid = parse_rational(grid)
    if grid <= 0 or grid > 1:
        raise InputError("grid must lie in (0, 1]")
    steps = int(1 / grid)
    spectral = []
    for b in blocks:
        units = rng.integers(1, steps + 1, size=b)
        v = _signed_permutation(b, rng)
        spectral.append(SpectralBlock(v, tuple(int(u) * grid for u in units), tuple(range(b))))
    return Functional.from_spectral(spectral, shape=AlgebraShape(tuple(blocks)))


def generate_density(dim: int = 4, blocks: Optional[Sequence[int]] = None, seed: int = 0) -> InstanceDocument:
    blocks = tuple(blocks) if blocks else (int(dim),)
    rng = np.random.default_rng(seed)
    return InstanceDocument(random_density(blocks, rng), FLOAT, seed=seed)


def generate_spectral(atoms: int = 4, grid="1/16", blocks: Optional[Sequence[int]] = None,
                      seed: int = 0) -> InstanceDocument:
    blocks = tuple(blocks) if blocks else (int(atoms),)
    rng = np.random.default_rng(seed)
    return InstanceDocument(random_spectral(blocks, grid, rng), EXACT, seed=seed, form="spectral")


def random_bounded(n: int, rng: np.random.Generator, bound: Fraction = Fraction(1),
                   grid: int = 64) -> list[Fraction]:
    """Dyadic rationals in ``[-bound, bound]``."""
    return [Fraction(int(k), grid) * bound for k in rng.integers(-grid, grid + 1, size=n)]


def generate_rank_one(n: int = 16, g=None, h=None, seed: int = 0) -> dict:
    """Samples of ``g`` and ``h`` at the ``n`` midpoints; random where not given."""
    n = int(n)
    if n < 1:
        raise InputError("rank-one: n must be >= 1")
    rng = np.random.default_rng(seed)
    gs = list(discretize(g, g, n)[1].g) if g is not None else random_bounded(n, rng)
    hs = list(discretize(h, h, n)[1].g) if h is not None else random_bounded(n, rng)
    return {"schema_version": SCHEMA_VERSION, "kind": "rank-one", "n": n, "seed": seed,
            "g": [fmt_number(x) for x in gs], "h": [fmt_number(x) for x in hs]}


def rank_one_samples(doc: dict) -> tuple[list, list]:
    try:
        if doc.get("kind") != "rank-one":
            raise InputError("field 'kind': expected 'rank-one'")
        g, h = doc["g"], doc["h"]
    except (AttributeError, KeyError) as exc:
        raise InputError(f"rank-one document: missing field {exc}") from None
    if len(g) != len(h) or not g:
        raise InputError("field 'g': g and h must be nonempty and of equal length")
    return [parse_rational(x) for x in g], [parse_rational(x) for x in h]

