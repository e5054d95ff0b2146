"""Daugavet defect of rank-one operators on weighted l1.

On ``l1(w)`` with norm ``||f|| = sum_j w_j |f_j|`` the unit ball is the
absolutely convex hull of ``e_j / w_j``, so an operator norm is the largest
image norm of those points.  For ``T f = (sum_j w_j g_j f_j) h`` this gives

    ||T||      = max_j |g_j| * sum_i w_i |h_i|
    ||Id + T|| = max_j |1 + w_j g_j h_j| + |g_j| (sum_i w_i |h_i| - w_j |h_j|)

and the defect ``1 + ||T|| - ||Id + T||`` is at most ``2 max_j w_j |g_j h_j|``.
Rational inputs give exact results when ``g`` and ``h`` are real.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .errors import InputError


@dataclass(frozen=True)
class WeightedL1:
    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        if not self.weights:
            raise InputError("weighted l1 space needs at least one atom")
        if any(w <= 0 for w in self.weights):
            raise InputError("atom weights must be positive")

    @classmethod
    def uniform(cls, n: int, exact: bool = True) -> "WeightedL1":
        w = Fraction(1, n) if exact else 1.0 / n
        return cls((w,) * n)

    @property
    def n(self) -> int:
        return len(self.weights)

    def norm(self, f: Sequence) -> object:
        return sum((w * abs(x) for w, x in zip(self.weights, f)), _zero(self.weights))


@dataclass(frozen=True)
class RankOneOp:
    g: tuple
    h: tuple

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(self.g))
        object.__setattr__(self, "h", tuple(self.h))
        if len(self.g) != len(self.h):
            raise InputError("g and h must have the same length")

    def apply(self, space: WeightedL1, f: Sequence) -> list:
        _check(space, self)
        c = sum(w * gj * fj for w, gj, fj in zip(space.weights, self.g, f))
        return [c * hi for hi in self.h]

    def scaled(self, c) -> "RankOneOp":
        return RankOneOp(tuple(c * x for x in self.g), self.h)


def _zero(values):
    return Fraction(0) if all(isinstance(v, (int, Fraction)) for v in values) else 0.0


def _check(space: WeightedL1, op: RankOneOp) -> None:
    if len(op.g) != space.n:
        raise InputError(f"operator has {len(op.g)} coefficients, space has {space.n} atoms")


def operator_norm(space: WeightedL1, op: RankOneOp):
    _check(space, op)
    hnorm = space.norm(op.h)
    return max(abs(g) for g in op.g) * hnorm


def id_plus_T_norm(space: WeightedL1, op: RankOneOp):
    _check(space, op)
    hnorm = space.norm(op.h)
    best = None
    for w, g, h in zip(space.weights, op.g, op.h):
        col = abs(1 + w * g * h) + abs(g) * (hnorm - w * abs(h))
        if best is None or col > best:
            best = col
    return best


def daugavet_defect(space: WeightedL1, op: RankOneOp):
    """``1 + ||T|| - ||Id + T||``; zero exactly when the Daugavet identity holds for ``T``."""
    return 1 + operator_norm(space, op) - id_plus_T_norm(space, op)


def defect_bound(space: WeightedL1, op: RankOneOp):
    """``2 max_j w_j |g_j h_j|``, an upper bound for the defect."""
    _check(space, op)
    return 2 * max(w * abs(g) * abs(h) for w, g, h in zip(space.weights, op.g, op.h))


# -- sampled functions ----------------------------------------------------------

def constant(value) -> Callable:
    value = Fraction(value) if isinstance(value, (int, Fraction, str)) else value

    def f(t):
        return value
    f.exact = isinstance(value, Fraction)
    f.sup = abs(value)
    return f


def sine(freq: int = 1) -> Callable:
    def f(t):
        return math.sin(2 * math.pi * freq * float(t))
    f.exact = False
    f.sup = 1.0
    return f


def sampled(values: Sequence) -> Callable:
    """Piecewise-constant function on [0,1) from equally spaced samples."""
    vals = list(values)
    if not vals:
        raise InputError("sampled function needs at least one value")
    n = len(vals)

    def f(t):
        return vals[min(int(t * n), n - 1)]
    f.exact = all(isinstance(v, (int, Fraction)) for v in vals)
    f.sup = max(abs(v) for v in vals)
    return f


def discretize(g: Callable, h: Callable, n: int) -> tuple[WeightedL1, RankOneOp]:
    """Midpoint sampling at ``n`` uniform atoms of [0, 1]."""
    exact = getattr(g, "exact", False) and getattr(h, "exact", False)
    space = WeightedL1.uniform(n, exact=exact)
    mids = [Fraction(2 * j + 1, 2 * n) for j in range(n)]
    if not exact:
        mids = [float(t) for t in mids]
    return space, RankOneOp(tuple(g(t) for t in mids), tuple(h(t) for t in mids))


@dataclass
class SweepRow:
    n: int
    norm_T: object
    norm_id_plus_T: object
    defect: object
    bound: object

    @property
    def within_bound(self) -> bool:
        return self.defect <= self.bound + (0 if isinstance(self.defect, Fraction) else 1e-12)


def defect_sweep(g: Callable, h: Callable, resolutions: Sequence[int]) -> list[SweepRow]:
    """Defect at each resolution, with the bound ``2 sup|g| sup|h| / n``."""
    resolutions = [int(n) for n in resolutions]
    if any(b <= a for a, b in zip(resolutions, resolutions[1:])):
        raise InputError("resolutions must be increasing")
    rows = []
    sup = getattr(g, "sup", None), getattr(h, "sup", None)
    for n in resolutions:
        space, op = discretize(g, h, n)
        gs = sup[0] if sup[0] is not None else max(abs(x) for x in op.g)
        hs = sup[1] if sup[1] is not None else max(abs(x) for x in op.h)
        bound = 2 * gs * hs / n if isinstance(gs * hs, Fraction) else 2 * float(gs * hs) / n
        rows.append(SweepRow(n, operator_norm(space, op), id_plus_T_norm(space, op),
                             daugavet_defect(space, op), bound))
    return rows


def sweep_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "norm_T", "norm_id_plus_T", "defect"])
    for r in rows:
        writer.writerow([r.n, _fmt(r.norm_T), _fmt(r.norm_id_plus_T), _fmt(r.defect)])
    return buf.getvalue()


def _fmt(x) -> str:
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return f"{float(x):.17g}"

