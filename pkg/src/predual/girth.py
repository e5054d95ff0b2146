"""Girth polylines: sampled isometric paths from ``phi`` to ``-phi``.

For a nested chain of centralizer projections ``e_0 <= e_1 <= ... <= e_N`` with
``|phi|(e_j) = ||phi|| * j / N`` the samples

    phi_j = v (s - 2 e_j) |phi|,    t_j = 2 j / N,

all have norm ``||phi||`` and satisfy ``||phi_j - phi_i|| = ||phi|| (t_j - t_i)``
exactly, because ``phi_j - phi_i = 2 v (e_j - e_i) |phi|``.  Whether such a
chain exists is a sequence of nested subset-sum problems on the eigenvalue
clusters of ``|phi|``.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .centralizer import SpectralClusters, clusters_of, selection_projection, support_projection
from .errors import ChainInfeasible, InputError, WorkCapExceeded
from .functional import EXACT, Functional, SpectralBlock, trace_norm

DEFAULT_CHAIN_CAP = 2_000_000


def chain_cap() -> int:
    return int(os.environ.get("PREDUAL_CHAIN_CAP", DEFAULT_CHAIN_CAP))


@dataclass
class GirthPolyline:
    times: list
    samples: list[Functional]
    base_norm: object
    selections: list[tuple[int, ...]]

    @property
    def n_segments(self) -> int:
        return len(self.samples) - 1


def _increment(values, room, need, exact, tol, budget):
    """Greedy-first depth-first search for ``d <= room`` with ``sum(values * d) == need``.

    Clusters are tried from the largest eigenvalue down and each takes as many
    dimensions as fit before backing off.
    """
    n = len(values)
    # capacity of clusters i.. for pruning
    cap_after = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        cap_after[i] = cap_after[i + 1] + values[i] * room[i]
    d = [0] * n

    def close(x):
        return x == 0 if exact else abs(x) <= tol

    def rec(i, rem):
        budget[0] -= 1
        if budget[0] < 0:
            raise WorkCapExceeded("girth chain search exceeded its work cap (raise PREDUAL_CHAIN_CAP)")
        if close(rem):
            yield list(d)
            return
        if i == n or rem > cap_after[i] + (0 if exact else tol):
            return
        top = min(room[i], int(rem // values[i]) + (0 if exact else 1))
        for x in range(top, -1, -1):
            r = rem - x * values[i]
            if not exact and r < -tol:
                continue
            if exact and r < 0:
                continue
            d[i] = x
            yield from rec(i + 1, r)
        d[i] = 0

    yield from rec(0, need)


def find_chain(clusters: SpectralClusters, n_steps: int, tol: float = 1e-9) -> list[tuple[int, ...]]:
    """Selections ``k^0 <= ... <= k^N`` with ``mass(k^j) = S j / N``.

    Raises :class:`ChainInfeasible` when no chain exists.
    """
    exact = clusters.mode == EXACT
    values = clusters.values
    mults = clusters.multiplicities
    step = clusters.total / n_steps
    if exact:
        step = Fraction(step)
    budget = [chain_cap()]
    failed: set = set()

    def rec(j, k):
        if j == n_steps:
            return [tuple(k)]
        key = tuple(k)
        if key in failed:
            return None
        room = [m - ki for m, ki in zip(mults, k)]
        if j == n_steps - 1:
            # the last step must take everything that is left
            left = sum(v * r for v, r in zip(values, room))
            ok = left == step if exact else abs(left - step) <= tol * n_steps
            return [tuple(k), tuple(mults)] if ok else None
        for d in _increment(values, room, step, exact, tol, budget):
            tail = rec(j + 1, [ki + di for ki, di in zip(k, d)])
            if tail is not None:
                return [tuple(k)] + tail
        failed.add(key)
        return None

    chain = rec(0, [0] * len(mults))
    if chain is None:
        raise ChainInfeasible("centralizer too atomic for requested sampling")
    return chain


def build_girth_polyline(phi: Functional, n_samples: int, tau_cluster: Optional[float] = None,
                         tol: float = 1e-9) -> GirthPolyline:
    """Sample ``phi_t = v (s - 2 e_t) |phi|`` at ``t_j = 2 j / N``, ``j = 0..N``."""
    n_samples = int(n_samples)
    if n_samples < 1:
        raise InputError("need at least one segment")
    if phi.is_zero():
        raise InputError("girth polyline of the zero functional is undefined")
    polar, clusters = clusters_of(phi, tau_cluster)
    chain = find_chain(clusters, n_samples, tol)
    s = support_projection(clusters)
    samples = []
    for k in chain:
        e = selection_projection(clusters, k)
        u = [si - 2 * ei for si, ei in zip(s, e)]
        if phi.is_exact and phi.spectral is not None:
            spec = [SpectralBlock(sb.v @ ui, sb.weights, sb.positions)
                    for sb, ui in zip(phi.spectral, u)]
            samples.append(Functional.from_spectral(spec, shape=phi.shape))
        else:
            samples.append(Functional([v @ ui @ p for v, ui, p in zip(polar.v, u, polar.positive)],
                                      shape=phi.shape))
    if phi.is_exact:
        times = [Fraction(2 * j, n_samples) for j in range(n_samples + 1)]
    else:
        times = [2.0 * j / n_samples for j in range(n_samples + 1)]
    return GirthPolyline(times, samples, trace_norm(phi), [tuple(k) for k in chain])


@dataclass
class PolylineReport:
    max_violation: object
    total_length: object
    norm_violation: object
    endpoint_violation: object
    pairs_checked: int


def verify_polyline(p: GirthPolyline, phi: Optional[Functional] = None) -> PolylineReport:
    """Recompute every pairwise distance against ``base_norm * |t_j - t_i|``."""
    n = len(p.samples)
    worst = 0
    pairs = 0
    for i in range(n):
        for j in range(i + 1, n):
            d = trace_norm(p.samples[j] - p.samples[i])
            worst = max(worst, abs(d - p.base_norm * (p.times[j] - p.times[i])))
            pairs += 1
    norms = max(abs(trace_norm(x) - p.base_norm) for x in p.samples)
    length = sum((trace_norm(p.samples[j + 1] - p.samples[j]) for j in range(n - 1)),
                 0 if not p.samples[0].is_exact else Fraction(0))
    start = p.samples[0] if phi is None else phi
    endpoint = trace_norm(p.samples[-1] + start)
    if phi is not None:
        endpoint = max(endpoint, trace_norm(p.samples[0] - phi))
    return PolylineReport(max(worst, norms, endpoint), length, norms, endpoint, pairs)


def polyline_csv(p: GirthPolyline, serialize) -> str:
    """CSV rows ``t, functional, ||phi_t - phi_0||``; ``serialize`` maps a functional to text."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "functional", "distance_from_start"])
    for t, x in zip(p.times, p.samples):
        writer.writerow([_num(t), serialize(x), _num(trace_norm(x - p.samples[0]))])
    return buf.getvalue()


def _num(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return f"{float(x):.17g}"
