"""Solving ``||phi + psi|| = ||phi - psi|| = ||phi|| = ||psi||``.

Solutions are exactly ``psi = phi e_+ - phi e_-`` for orthogonal projections
``e_+ + e_- = s(|phi|)`` in the centralizer of ``|phi|`` with
``|phi|(e_+) = |phi|(e_-) = ||phi|| / 2``.  In a block algebra a centralizer
projection is described, up to a unitary inside each eigenspace, by how many
dimensions ``k_i`` it takes from each eigenvalue cluster, and its mass is
``sum(lambda_i k_i)``.  Deciding solvability is therefore a bounded subset-sum
problem, and the best approximate split minimizes ``|2 mass(k) - ||phi|| |``.

For any selection the constructed ``psi`` has ``||psi|| = ||phi||``,
``||phi + psi|| = 2 mass(k)`` and ``||phi - psi|| = 2 (||phi|| - mass(k))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Optional, Sequence

import numpy as np

from . import subsetsum
from .centralizer import (SpectralClusters, check_selection, clusters_of, mass,
                          selection_projection, support_projection)
from .errors import InputError
from .exact import ExactMatrix
from .functional import (EXACT, FLOAT, TAU_EQUAL, Functional, SpectralBlock, act,
                         block_to_float, matrix_trace_norm, polar_decompose, trace_norm)

DELTA = TAU_EQUAL


@dataclass(frozen=True)
class SplitInstance:
    values: tuple
    mults: tuple[int, ...]
    mode: str = EXACT
    delta: float = DELTA

    def __post_init__(self):
        if not self.values:
            raise InputError("empty split instance")
        if len(self.values) != len(self.mults):
            raise InputError("values and multiplicities differ in length")
        if self.mode == EXACT:
            vals = tuple(Fraction(v) for v in self.values)
        else:
            vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "mults", tuple(int(m) for m in self.mults))
        if any(v <= 0 for v in vals):
            raise InputError("cluster values must be positive")
        if any(b >= a for a, b in zip(vals, vals[1:])):
            raise InputError("cluster values must be strictly decreasing")
        if any(m < 1 for m in self.mults):
            raise InputError("multiplicities must be >= 1")

    @classmethod
    def from_pairs(cls, pairs: Sequence[tuple], mode: str = EXACT, delta: float = DELTA) -> "SplitInstance":
        pairs = sorted(pairs, key=lambda p: -p[0])
        return cls(tuple(p[0] for p in pairs), tuple(p[1] for p in pairs), mode, delta)

    @classmethod
    def from_clusters(cls, clusters: SpectralClusters, delta: float = DELTA) -> "SplitInstance":
        return cls(tuple(clusters.values), tuple(clusters.multiplicities), clusters.mode, delta)

    @property
    def total(self):
        zero = Fraction(0) if self.mode == EXACT else 0.0
        return sum((v * m for v, m in zip(self.values, self.mults)), zero)

    @property
    def dims(self) -> int:
        return sum(self.mults)

    def mass(self, k: Sequence[int]):
        self.check(k)
        zero = Fraction(0) if self.mode == EXACT else 0.0
        return sum((v * ki for v, ki in zip(self.values, k)), zero)

    def defect(self, k: Sequence[int]):
        return abs(2 * self.mass(k) - self.total)

    def check(self, k: Sequence[int]) -> None:
        if len(k) != len(self.mults) or any(not 0 <= ki <= m for ki, m in zip(k, self.mults)):
            raise InputError(f"selection {list(k)} outside bounds {list(self.mults)}")

    def scaled(self) -> tuple[list[int], int, int]:
        """Integer weights over the common denominator, doubled target, denominator."""
        den = reduce(lambda a, b: a * b // math.gcd(a, b), (v.denominator for v in self.values), 1)
        w = [int(v * den) for v in self.values]
        return w, sum(wi * m for wi, m in zip(w, self.mults)), den


@dataclass(frozen=True)
class ApproxResult:
    selection: tuple[int, ...]
    mass: object
    defect: object


def best_split(inst: SplitInstance) -> ApproxResult:
    """Selection minimizing ``|2 mass(k) - S|``.

    Ties prefer ``mass(k) <= S/2`` and then the lexicographically smallest ``k``.
    """
    if inst.mode == EXACT:
        w, t2, den = inst.scaled()
        best = subsetsum.best_selection(w, inst.mults, t2, exact=True)
        return ApproxResult(best.k, Fraction(best.total, den), Fraction(abs(best.gap), den))
    total = inst.total
    best = subsetsum.best_selection(list(inst.values), inst.mults, total, exact=False,
                                    tie_tol=1e-12 * total)
    return ApproxResult(best.k, inst.mass(best.k), inst.defect(best.k))


@dataclass(frozen=True)
class Decision:
    solvable: bool
    witness: Optional[tuple[int, ...]]
    defect: object


def decide_exact(inst: SplitInstance) -> Decision:
    """Is there ``k`` with ``sum(lambda_i k_i) = S/2``?

    Float instances are decided as solvable when the best defect is at most
    ``inst.delta``.  The witness is the lexicographically smallest solution.
    """
    res = best_split(inst)
    ok = res.defect == 0 if inst.mode == EXACT else res.defect <= inst.delta
    return Decision(bool(ok), res.selection if ok else None, res.defect)


def enumerate_exact_solutions(inst: SplitInstance, cap: int = 1000) -> list[tuple[int, ...]]:
    """Every selection with mass exactly ``S/2``, lexicographically, at most ``cap``.

    Each selection stands for a whole family of solutions: any ``k_i``-dimensional
    subspace of the ``i``-th eigenspace gives one.
    """
    if cap < 1:
        raise InputError("cap must be >= 1")
    if inst.mode != EXACT:
        raise InputError("enumeration needs an exact instance")
    w, t2, _ = inst.scaled()
    if t2 % 2:
        return []
    return subsetsum.enumerate_exact(w, inst.mults, t2 // 2, cap)


# -- certificates -------------------------------------------------------------

@dataclass
class SplitCertificate:
    selection: tuple[int, ...]
    e_plus: list
    e_minus: list
    psi: Functional
    norm_phi: object
    norm_psi: object
    norm_plus: object
    norm_minus: object
    mass: object
    total: object
    defect: object
    mode: str
    clusters: Optional[SpectralClusters] = field(default=None, repr=False)

    @property
    def achieved_norms(self) -> tuple:
        return (self.norm_psi, self.norm_plus, self.norm_minus)

    @property
    def is_exact_solution(self) -> bool:
        return self.defect == 0

    def solves(self, delta: float = DELTA) -> bool:
        if self.mode == EXACT:
            return self.defect == 0
        return float(self.defect) <= delta


def construct_psi(phi: Functional, k: Sequence[int],
                  clusters: Optional[SpectralClusters] = None,
                  tau_cluster: Optional[float] = None) -> SplitCertificate:
    """Build ``psi = v (e_+ - e_-) |phi|`` for the canonical projections of ``k``."""
    if clusters is None:
        polar, clusters = clusters_of(phi, tau_cluster)
    else:
        polar = polar_decompose(phi)
    if not clusters.clusters:
        raise InputError("cannot split the zero functional")
    k = check_selection(clusters, k)
    e_plus = selection_projection(clusters, k)
    s = support_projection(clusters)
    e_minus = [si - ei for si, ei in zip(s, e_plus)]
    u = [ep - em for ep, em in zip(e_plus, e_minus)]

    if phi.is_exact:
        if phi.spectral is not None:
            spec = [SpectralBlock(sb.v @ ui, sb.weights, sb.positions)
                    for sb, ui in zip(phi.spectral, u)]
            psi = Functional.from_spectral(spec, shape=phi.shape)
        else:
            psi = Functional([v @ ui @ p for v, ui, p in zip(polar.v, u, polar.positive)],
                             shape=phi.shape)
    else:
        psi = Functional([v @ ui @ p for v, ui, p in zip(polar.v, u, polar.positive)],
                         shape=phi.shape)

    m = mass(clusters, k)
    total = clusters.total
    return SplitCertificate(
        selection=k, e_plus=e_plus, e_minus=e_minus, psi=psi,
        norm_phi=trace_norm(phi), norm_psi=trace_norm(psi),
        norm_plus=trace_norm(phi + psi), norm_minus=trace_norm(phi - psi),
        mass=m, total=total, defect=abs(2 * m - total),
        mode=phi.mode, clusters=clusters,
    )


def approx_split(phi: Functional, tau_cluster: Optional[float] = None) -> SplitCertificate:
    """Certificate for the selection with the smallest defect ``|2 mass(k) - ||phi|| |``.

    ``||psi|| = ||phi||`` holds exactly and both ``||phi +- psi||`` lie within
    the defect of ``||phi||``.  Only centralizer splits are searched.
    """
    if phi.is_zero():
        raise InputError("cannot split the zero functional")
    _, clusters = clusters_of(phi, tau_cluster)
    if not clusters.clusters:
        raise InputError("cannot split the zero functional")
    res = best_split(SplitInstance.from_clusters(clusters))
    return construct_psi(phi, res.selection, clusters=clusters)


def solve(phi: Functional, delta: float = DELTA,
          tau_cluster: Optional[float] = None) -> tuple[bool, SplitCertificate]:
    """Decide solvability and return the exact (or best approximate) certificate."""
    cert = approx_split(phi, tau_cluster)
    return cert.solves(delta), cert


# -- verification -------------------------------------------------------------

def _size(a) -> object:
    """Violation size of a matrix: exact max |entry| component, else trace norm."""
    if isinstance(a, ExactMatrix):
        vals = [abs(int(x)) for x in a.re.flat] + [abs(int(x)) for x in a.im.flat]
        return Fraction(max(vals, default=0), a.den)
    return matrix_trace_norm(a)


def _elementwise(xs, ys, op):
    out = []
    for x, y in zip(xs, ys):
        if isinstance(x, ExactMatrix) != isinstance(y, ExactMatrix):
            x, y = block_to_float(x), block_to_float(y)
        out.append(op(x, y))
    return out


@dataclass
class VerificationReport:
    violations: dict
    max_violation: object
    tol: float

    @property
    def ok(self) -> bool:
        return self.max_violation <= self.tol


def verify_certificate(phi: Functional, cert: SplitCertificate, tol: float = TAU_EQUAL,
                       tau_rank: float | None = None) -> VerificationReport:
    """Recheck a certificate from scratch and report the largest violation.

    Recomputed: projection identities of ``e_+-``, commutation with ``|phi|``,
    ``psi = phi e_+ - phi e_-``, the three trace norms against
    ``||phi||``, ``2|phi|(e_+)``, ``2|phi|(e_-)`` and, when the certificate
    claims a solution, the norm equation itself.
    """
    polar = polar_decompose(phi) if tau_rank is None else polar_decompose(phi, tau_rank)
    ep, em = cert.e_plus, cert.e_minus
    if cert.mode == FLOAT or not phi.is_exact:
        ep = [block_to_float(x) for x in ep]
        em = [block_to_float(x) for x in em]
    pos, sup = list(polar.positive), list(polar.support)
    if isinstance(ep[0], np.ndarray):
        pos = [block_to_float(x) for x in pos]
        sup = [block_to_float(x) for x in sup]

    def total(blocks):
        vals = [_size(b) for b in blocks]
        return sum(vals[1:], vals[0])

    def adj(x):
        return x.adjoint() if isinstance(x, ExactMatrix) else x.conj().T

    v = {}
    v["e_plus_idempotent"] = total([x @ x - x for x in ep])
    v["e_minus_idempotent"] = total([x @ x - x for x in em])
    v["e_plus_selfadjoint"] = total([adj(x) - x for x in ep])
    v["e_minus_selfadjoint"] = total([adj(x) - x for x in em])
    v["orthogonality"] = total([x @ y for x, y in zip(ep, em)])
    v["sum_is_support"] = total([x + y - s for x, y, s in zip(ep, em, sup)])
    v["commutes_plus"] = total([x @ p - p @ x for x, p in zip(ep, pos)])
    v["commutes_minus"] = total([x @ p - p @ x for x, p in zip(em, pos)])
    expected_psi = act(ep, phi, "right") - act(em, phi, "right")
    v["psi_reconstruction"] = total(_elementwise(cert.psi.blocks, expected_psi.blocks,
                                                 lambda a, b: a - b))

    def mass_of(e):
        acc = 0
        for x, p in zip(e, pos):
            t = (p @ x).trace() if isinstance(x, ExactMatrix) else complex(np.trace(p @ x))
            acc += t.re if isinstance(x, ExactMatrix) else t.real
        return acc

    n_phi = trace_norm(phi)
    n_psi = trace_norm(cert.psi)
    n_plus = trace_norm(phi + cert.psi)
    n_minus = trace_norm(phi - cert.psi)
    v["norm_psi"] = abs(n_psi - n_phi)
    v["norm_plus_vs_mass"] = abs(n_plus - 2 * mass_of(ep))
    v["norm_minus_vs_mass"] = abs(n_minus - 2 * mass_of(em))
    v["claimed_norms"] = max(abs(n_psi - cert.norm_psi), abs(n_plus - cert.norm_plus),
                             abs(n_minus - cert.norm_minus))
    if cert.solves():
        v["equation"] = max(abs(n_plus - n_phi), abs(n_minus - n_phi))
    worst = max(v.values())
    return VerificationReport(v, worst, tol)
