"""Centralizer of ``|phi|`` on its support.

Inside a matrix block the centralizer of a positive functional with density
``h`` is the commutant of ``h`` in the support corner, i.e. one full matrix
algebra ``M_m`` per eigenvalue of multiplicity ``m``.  Across blocks the
centralizer is the direct sum of the per-block pieces.

For the splitter only the eigenvalues and their total multiplicities matter, so
:func:`spectral_clusters` merges equal eigenvalues across blocks into one
cluster; each member still remembers its block.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import InputError
from .exact import ExactMatrix
from .functional import EXACT, Functional, PolarForm, polar_decompose

TAU_CLUSTER = 1e-10
# merged eigenvalues further apart than this (relative) trigger a warning
_MERGE_NOISE = 64 * np.finfo(float).eps


class DegeneracyWarning(UserWarning):
    """Clustering at the float tolerance merged genuinely distinct eigenvalues."""


@dataclass(frozen=True)
class Member:
    block: int
    ref: object  # exact: diagonal position; float: unit eigenvector


@dataclass(frozen=True)
class Cluster:
    value: object
    members: tuple[Member, ...]

    @property
    def multiplicity(self) -> int:
        return len(self.members)


@dataclass(frozen=True)
class SpectralClusters:
    clusters: tuple[Cluster, ...]
    support_rank: int
    mode: str
    block_dims: tuple[int, ...]
    warnings: tuple[str, ...] = ()

    @property
    def values(self) -> list:
        return [c.value for c in self.clusters]

    @property
    def multiplicities(self) -> list[int]:
        return [c.multiplicity for c in self.clusters]

    @property
    def total(self):
        if self.mode == EXACT:
            return sum((c.value * c.multiplicity for c in self.clusters), Fraction(0))
        return float(sum(c.value * c.multiplicity for c in self.clusters))

    def pairs(self) -> list[tuple]:
        return [(c.value, c.multiplicity) for c in self.clusters]


def spectral_clusters(polar: PolarForm, tau_cluster: float = TAU_CLUSTER) -> SpectralClusters:
    """Group the eigenvalues of ``|phi|`` on its support into degeneracy clusters.

    Sorted eigenvalues are split wherever consecutive values differ by more
    than ``tau_cluster`` (which must be 0 in exact mode).  A float cluster's
    value is the mean of its members.
    """
    exact = polar.mode == EXACT
    if exact and tau_cluster != 0:
        raise InputError("tau_cluster must be 0 in exact mode")
    if tau_cluster < 0:
        raise InputError("tau_cluster must be nonnegative")
    items = []
    for b, eig in enumerate(polar.eigen):
        for j, lam in enumerate(eig.values):
            ref = eig.basis[j] if exact else eig.basis[:, j]
            items.append((lam, b, j, ref))
    items.sort(key=lambda t: (-t[0], t[1], t[2]))

    groups: list[list] = []
    for it in items:
        if groups and groups[-1][-1][0] - it[0] <= tau_cluster:
            groups[-1].append(it)
        else:
            groups.append([it])

    notes = []
    clusters = []
    for g in groups:
        members = tuple(Member(b, ref) for _, b, _, ref in g)
        if exact:
            value = g[0][0]
        else:
            vals = [t[0] for t in g]
            value = float(np.mean(vals))
            spread = max(vals) - min(vals)
            if spread > _MERGE_NOISE * max(vals):
                msg = (f"merged {len(vals)} eigenvalues spanning {spread:.3g} into one cluster "
                       f"at {value:.17g} (tau_cluster={tau_cluster:g})")
                notes.append(msg)
                warnings.warn(msg, DegeneracyWarning, stacklevel=2)
        clusters.append(Cluster(value, members))
    return SpectralClusters(tuple(clusters), len(items), polar.mode, polar.shape.blocks, tuple(notes))


def clusters_of(phi: Functional, tau_cluster: float | None = None,
                tau_rank: float | None = None) -> tuple[PolarForm, SpectralClusters]:
    """Polar form and clusters of ``phi`` with mode-appropriate defaults."""
    polar = polar_decompose(phi) if tau_rank is None else polar_decompose(phi, tau_rank)
    if tau_cluster is None:
        tau_cluster = 0 if phi.is_exact else TAU_CLUSTER
    return polar, spectral_clusters(polar, tau_cluster)


# -- masses and projections ---------------------------------------------------

def check_selection(clusters: SpectralClusters, k: Sequence[int]) -> tuple[int, ...]:
    k = tuple(int(x) for x in k)
    if len(k) != len(clusters.clusters):
        raise InputError(f"selection has {len(k)} entries for {len(clusters.clusters)} clusters")
    for ki, c in zip(k, clusters.clusters):
        if not 0 <= ki <= c.multiplicity:
            raise InputError(f"selection entry {ki} outside [0, {c.multiplicity}]")
    return k


def mass(clusters: SpectralClusters, k: Sequence[int]):
    """``|phi|(e)`` for a centralizer projection taking ``k_i`` dimensions of cluster ``i``."""
    k = check_selection(clusters, k)
    zero = Fraction(0) if clusters.mode == EXACT else 0.0
    return sum((c.value * ki for c, ki in zip(clusters.clusters, k)), zero)


def selection_projection(clusters: SpectralClusters, k: Sequence[int]) -> list:
    """Canonical projection for ``k``: the first ``k_i`` basis vectors of each cluster."""
    k = check_selection(clusters, k)
    chosen = [m for c, ki in zip(clusters.clusters, k) for m in c.members[:ki]]
    return members_projection(clusters, chosen)


def members_projection(clusters: SpectralClusters, members) -> list:
    dims = clusters.block_dims
    if clusters.mode == EXACT:
        diag = [[0] * n for n in dims]
        for m in members:
            diag[m.block][m.ref] = 1
        return [ExactMatrix.diag(d) for d in diag]
    out = [np.zeros((n, n), dtype=complex) for n in dims]
    for m in members:
        out[m.block] += np.outer(m.ref, m.ref.conj())
    return out


def support_projection(clusters: SpectralClusters) -> list:
    return members_projection(clusters, [m for c in clusters.clusters for m in c.members])


def centralizer_basis(clusters: SpectralClusters) -> list[list]:
    """Matrix units spanning the centralizer, one family per (cluster, block) piece."""
    dims = clusters.block_dims
    basis = []
    for c in clusters.clusters:
        by_block: dict[int, list] = {}
        for m in c.members:
            by_block.setdefault(m.block, []).append(m.ref)
        for b, refs in by_block.items():
            for ra in refs:
                for rb in refs:
                    elem = _zero_element(dims, clusters.mode)
                    if clusters.mode == EXACT:
                        rows = [[1 if (i == ra and j == rb) else 0 for j in range(dims[b])]
                                for i in range(dims[b])]
                        elem[b] = ExactMatrix.from_entries(rows)
                    else:
                        elem[b] = np.outer(ra, rb.conj())
                    basis.append(elem)
    return basis


def _zero_element(dims, mode):
    if mode == EXACT:
        return [ExactMatrix.zeros(n) for n in dims]
    return [np.zeros((n, n), dtype=complex) for n in dims]


# -- report -------------------------------------------------------------------

@dataclass
class CentralizerReport:
    pieces: list[tuple[int, object, int]]  # (block, eigenvalue, multiplicity)
    atoms: list[str]
    is_trivial: bool
    clusters: SpectralClusters
    warnings: list[str] = field(default_factory=list)

    @property
    def block_structure(self) -> list[int]:
        return [m for _, _, m in self.pieces]


def centralizer_structure(phi: Functional, tau_cluster: float | None = None) -> CentralizerReport:
    """Describe ``M_{|phi|}`` as a direct sum of full matrix algebras ``M_m``.

    The centralizer is trivial (scalars on the support) exactly when there is
    a single piece and it is one-dimensional.  Every piece ``M_m`` has the
    rank-one subprojections of its eigenspace as minimal projections, so a
    finite-dimensional centralizer is never diffuse.
    """
    if phi.is_zero():
        raise InputError("centralizer of zero undefined")
    _, clusters = clusters_of(phi, tau_cluster)
    if not clusters.clusters:
        raise InputError("centralizer of zero undefined")
    pieces, atoms = [], []
    for c in clusters.clusters:
        counts: dict[int, int] = {}
        for m in c.members:
            counts[m.block] = counts.get(m.block, 0) + 1
        for b in sorted(counts):
            pieces.append((b, c.value, counts[b]))
            atoms.append(f"block {b}: rank-one subprojections of the {counts[b]}-dimensional "
                         f"eigenspace for eigenvalue {c.value}")
    trivial = len(pieces) == 1 and pieces[0][2] == 1
    return CentralizerReport(pieces, atoms, trivial, clusters, list(clusters.warnings))
