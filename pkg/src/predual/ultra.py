"""Finite-stage shadow of ultraproducts of preduals.

A sequence ``phi_i`` on growing algebras is split stage by stage with the best
centralizer split, giving ``psi_i`` with ``||psi_i|| = ||phi_i||`` and
``| ||phi_i +- psi_i|| - ||phi_i|| | = eps_i``.  If ``eps_i -> 0`` then the
class ``(psi_i)`` solves the norm equation for ``(phi_i)`` in every
ultraproduct, since a convergent sequence has the same limit along every free
ultrafilter.  When the defects do not settle, the report says so instead of
picking a limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator, Optional

import numpy as np

from .algebra import AlgebraShape
from .errors import InputError
from .functional import Functional
from .splitter import SplitInstance, approx_split, best_split

VANISHING = "vanishing"
STAGNATING = "stagnating"
UNDETERMINED = "no sequence limit - ultrafilter-dependent"


@dataclass
class Stage:
    index: int
    instance: SplitInstance
    dimension: int
    build: Callable[[], Functional] = field(repr=False)

    def functional(self) -> Functional:
        return self.build()


@dataclass
class FunctionalSequence:
    generator: str
    stages: int
    seed: int = 0

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise InputError(f"unknown generator {self.generator!r}; choose from {sorted(GENERATORS)}")
        if self.stages < 1:
            raise InputError("need at least one stage")

    def __iter__(self) -> Iterator[Stage]:
        make = GENERATORS[self.generator]
        for i in range(1, self.stages + 1):
            yield make(i, self.seed)


# -- generators ----------------------------------------------------------------

def _uniform_stage(i: int, n: int) -> Stage:
    inst = SplitInstance((Fraction(1, n),), (n,))
    return Stage(i, inst, n,
                 lambda: Functional.diagonal([Fraction(1, n)] * n, shape=AlgebraShape.diffuse(n)))


def gen_uniform(i: int, seed: int) -> Stage:
    """``i`` atoms of mass ``1/i`` on the level-``i`` diffuse model."""
    return _uniform_stage(i, i)


def gen_uniform_even(i: int, seed: int) -> Stage:
    return _uniform_stage(i, 2 * i)


def gen_constant_atomic(i: int, seed: int) -> Stage:
    """The same functional ``diag(7/10, 3/10)`` on ``M_2`` at every stage."""
    weights = [Fraction(7, 10), Fraction(3, 10)]
    inst = SplitInstance(tuple(weights), (1, 1))
    return Stage(i, inst, 2, lambda: Functional.diagonal(weights, shape=AlgebraShape((2,))))


RANDOM_MAX_UNITS = 4


def gen_random_diffuse(i: int, seed: int) -> Stage:
    """Random masses ``c_j / sum(c)`` with ``c_j in 1..4`` on ``2i`` atoms.

    Every atom has mass at most ``4 / (2i)``.
    """
    n = 2 * i
    rng = np.random.default_rng([seed, i])
    units = rng.integers(1, RANDOM_MAX_UNITS + 1, size=n)
    total = int(units.sum())
    counts = np.bincount(units, minlength=RANDOM_MAX_UNITS + 1)
    pairs = [(Fraction(c, total), int(counts[c])) for c in range(RANDOM_MAX_UNITS, 0, -1) if counts[c]]
    inst = SplitInstance.from_pairs(pairs)
    weights = [Fraction(int(c), total) for c in units]
    return Stage(i, inst, n, lambda: Functional.diagonal(weights, shape=AlgebraShape.diffuse(n)))


GENERATORS = {
    "uniform": gen_uniform,
    "uniform-even": gen_uniform_even,
    "constant-atomic": gen_constant_atomic,
    "random-diffuse": gen_random_diffuse,
}


# -- report ----------------------------------------------------------------------

@dataclass
class UltraReport:
    generator: str
    seed: int
    defects: list
    norms: list
    plus_norms: list
    minus_norms: list
    verdict: str
    decay_rate: Optional[float]
    fitted_constant: object
    cauchy_tol: float
    cauchy_index: Optional[int]
    verified_stages: list[int]

    @property
    def n_stages(self) -> int:
        return len(self.defects)

    def tail_max(self) -> object:
        if self.cauchy_index is None:
            return None
        return max(self.defects[self.cauchy_index - 1:])


def _cauchy_index(defects: list, tol: float) -> Optional[int]:
    """Smallest 1-based ``i0`` with ``max - min`` of ``defects[i0:]`` at most ``tol``."""
    hi = lo = None
    index = None
    for pos in range(len(defects) - 1, -1, -1):
        d = defects[pos]
        hi = d if hi is None else max(hi, d)
        lo = d if lo is None else min(lo, d)
        if hi - lo <= tol:
            index = pos + 1
        else:
            break
    return index


def _decay_rate(defects: list) -> Optional[float]:
    pts = [(math.log(i), math.log(float(d))) for i, d in enumerate(defects, start=1) if d > 0]
    if len(pts) < 2:
        return None
    x, y = np.array(pts).T
    if np.ptp(x) == 0:
        return None
    return float(np.polyfit(x, y, 1)[0])


def classify(defects: list, cauchy_tol: float) -> tuple[str, object]:
    """Verdict and fitted constant ``C`` (``eps_i <= C / i`` on the head)."""
    n = len(defects)
    head = max(1, n // 2)
    c_head = max(i * d for i, d in enumerate(defects[:head], start=1))
    tail = list(enumerate(defects[head:], start=head + 1))
    if all(d == 0 for _, d in tail):
        return VANISHING, c_head
    if c_head > 0 and all(i * d <= c_head for i, d in tail):
        return VANISHING, c_head
    tail_vals = [d for _, d in tail]
    if max(tail_vals) - min(tail_vals) <= cauchy_tol and min(tail_vals) > cauchy_tol:
        return STAGNATING, max(i * d for i, d in enumerate(defects, start=1))
    return UNDETERMINED, max(i * d for i, d in enumerate(defects, start=1))


def run_sequence(seq: FunctionalSequence, cauchy_tol: float = 1e-3,
                 materialize_limit: int = 32) -> UltraReport:
    """Best split at every stage and a convergence verdict for the defects.

    Stages up to ``materialize_limit`` dimensions are also built as functionals
    and split through :func:`approx_split`, cross-checking the norms that the
    spectral computation predicts.
    """
    defects, norms, plus, minus, verified = [], [], [], [], []
    for stage in seq:
        inst = stage.instance
        res = best_split(inst)
        total = inst.total
        if total == 0:
            raise InputError(f"stage {stage.index} has a zero functional")
        defects.append(res.defect)
        norms.append(total)
        plus.append(2 * res.mass)
        minus.append(2 * (total - res.mass))
        if stage.dimension <= materialize_limit:
            cert = approx_split(stage.functional())
            expected = (total, 2 * res.mass, 2 * (total - res.mass))
            if (cert.norm_phi, cert.norm_plus, cert.norm_minus) != expected or cert.norm_psi != total:
                raise AssertionError(f"stage {stage.index}: materialized split disagrees "
                                     f"({cert.achieved_norms} vs {expected})")
            verified.append(stage.index)
    verdict, c_fit = classify(defects, cauchy_tol)
    return UltraReport(seq.generator, seq.seed, defects, norms, plus, minus, verdict,
                       _decay_rate(defects), c_fit, cauchy_tol, _cauchy_index(defects, cauchy_tol),
                       verified)


def certify_limit(report: UltraReport, eps_target: float) -> bool:
    """True iff every defect from the Cauchy index on is at most ``eps_target``."""
    tail = report.tail_max()
    return tail is not None and tail <= eps_target
