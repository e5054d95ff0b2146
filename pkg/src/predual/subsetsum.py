"""Bounded subset-sum over eigenvalue clusters.

Given item weights ``w_i`` with multiplicities ``m_i`` and a doubled target
``T2`` (the total mass), find ``k`` with ``0 <= k_i <= m_i`` minimizing
``|2 * sum(w_i k_i) - T2|``.  Ties prefer ``sum <= T2/2`` and then the
lexicographically smallest ``k``.

Two engines share that contract: meet-in-the-middle over numpy arrays (exact
integer weights or floats) and a dynamic program over reachable integer sums
kept as Python-int bitsets.  Both raise :class:`WorkCapExceeded` instead of
running away.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import WorkCapExceeded

MITM_MAX_DIMS = 40
DEFAULT_MITM_CAP = 1 << 22  # enumerated combinations per half
DEFAULT_DP_CAP = 1 << 31  # bits of suffix reachability storage
_INT64_SAFE = 1 << 60


def mitm_cap() -> int:
    return int(os.environ.get("PREDUAL_MITM_CAP", DEFAULT_MITM_CAP))


def dp_cap() -> int:
    return int(os.environ.get("PREDUAL_DP_CAP", DEFAULT_DP_CAP))


@dataclass(frozen=True)
class Best:
    k: tuple[int, ...]
    total: object  # sum(w_i k_i), same scalar type as the weights
    gap: object  # 2 * total - T2 (signed)


def _half_sums(w, m, dtype) -> np.ndarray:
    sums = np.zeros(1, dtype=dtype)
    for wi, mi in zip(w, m):
        sums = (sums[:, None] + np.asarray(wi, dtype=dtype) * np.arange(mi + 1, dtype=dtype)).ravel()
    return sums


def _decode(index: int, m: Sequence[int]) -> list[int]:
    k = []
    for mi in reversed(m):
        index, r = divmod(int(index), mi + 1)
        k.append(r)
    return k[::-1]


def _split_point(m: Sequence[int]) -> int:
    sizes = np.cumprod([mi + 1 for mi in m], dtype=float)
    total = sizes[-1] if len(sizes) else 1.0
    best_h, best = 0, total
    for h in range(len(m) + 1):
        left = sizes[h - 1] if h else 1.0
        worst = max(left, total / left)
        if worst < best:
            best_h, best = h, worst
    return best_h


def mitm_best(w: Sequence, m: Sequence[int], T2, exact: bool, tie_tol: float = 0.0) -> Best:
    """Meet-in-the-middle search for the optimal selection."""
    dtype = np.int64 if exact else np.float64
    h = _split_point(m)
    cap = mitm_cap()
    nl = int(np.prod([mi + 1 for mi in m[:h]], dtype=float))
    nr = int(np.prod([mi + 1 for mi in m[h:]], dtype=float))
    if max(nl, nr) > cap:
        raise WorkCapExceeded(f"meet-in-the-middle needs {max(nl, nr)} combinations per half "
                              f"(cap {cap}; raise PREDUAL_MITM_CAP)")
    left = _half_sums(w[:h], m[:h], dtype)
    right = _half_sums(w[h:], m[h:], dtype)
    order = np.argsort(right, kind="stable")
    r2 = 2 * right[order]
    t = T2 - 2 * left  # want 2*R as close to t as possible

    # "below" means 2*R <= t + tie_tol, so float ties on either side count as below
    pos = np.searchsorted(r2, t + tie_tol, side="right")
    sentinel = np.inf if not exact else np.iinfo(np.int64).max // 4
    lo_idx = np.maximum(pos - 1, 0)
    hi_idx = np.minimum(pos, len(r2) - 1)
    below = np.where(pos > 0, np.abs(t - r2[lo_idx]), sentinel)
    above = np.where(pos < len(r2), r2[hi_idx] - t, sentinel)
    dmin = min(below.min(), above.min())

    if below.min() <= dmin + tie_tol:
        a = int(np.flatnonzero(below <= dmin + tie_tol)[0])
        lo_val, hi_val = t[a] - dmin - tie_tol, t[a] + tie_tol
        lo = int(np.searchsorted(r2, lo_val, side="left"))
        hi = int(np.searchsorted(r2, hi_val, side="right"))
    else:
        a = int(np.flatnonzero(above <= dmin + tie_tol)[0])
        lo = int(np.searchsorted(r2, t[a] + tie_tol, side="right"))
        hi = int(np.searchsorted(r2, t[a] + dmin + tie_tol, side="right"))
    # among near-optimal right sums take the lexicographically smallest selection
    j = lo + int(np.argmin(order[lo:hi]))
    b = int(order[j])
    k = tuple(_decode(a, m[:h]) + _decode(b, m[h:]))
    if exact:
        total = sum(int(wi) * ki for wi, ki in zip(w, k))
        return Best(k, total, 2 * total - int(T2))
    total = float(sum(float(wi) * ki for wi, ki in zip(w, k)))
    return Best(k, total, 2 * total - float(T2))


def _shift_or(reach: int, w: int, m: int, mask: int | None) -> int:
    """Reachable sums after adding ``0..m`` copies of ``w`` (binary splitting)."""
    out = reach
    chunk, left = 1, m
    while left > 0:
        c = min(chunk, left)
        out |= out << (c * w)
        if mask is not None:
            out &= mask
        left -= c
        chunk <<= 1
    return out


def _suffix_sets(w: Sequence[int], m: Sequence[int], limit: int | None = None) -> list[int]:
    """Bitsets of sums reachable from clusters ``i..`` (bit ``s`` set iff ``s`` is reachable)."""
    top = sum(wi * mi for wi, mi in zip(w, m)) if limit is None else limit
    cap = dp_cap()
    if (top + 1) * (len(w) + 1) > cap:
        raise WorkCapExceeded(f"subset-sum dynamic program needs {(top + 1) * (len(w) + 1)} bits "
                              f"(cap {cap}; raise PREDUAL_DP_CAP)")
    mask = None if limit is None else (1 << (limit + 1)) - 1
    suf = [0] * (len(w) + 1)
    suf[-1] = 1
    for i in range(len(w) - 1, -1, -1):
        suf[i] = _shift_or(suf[i + 1], w[i], m[i], mask)
    return suf


def _has(bits: int, s: int) -> bool:
    return s >= 0 and (bits >> s) & 1 == 1


def _lex_smallest(w, m, suf, target) -> tuple[int, ...]:
    k, rem = [], target
    for i in range(len(w)):
        # rem - kk*w[i] cannot exceed the largest sum reachable from the rest
        start = max(0, -(-(rem - (suf[i + 1].bit_length() - 1)) // w[i])) if w[i] else 0
        for kk in range(start, m[i] + 1):
            if _has(suf[i + 1], rem - kk * w[i]):
                k.append(kk)
                rem -= kk * w[i]
                break
        else:  # pragma: no cover - guarded by target membership
            raise AssertionError("target not reachable")
    return tuple(k)


def dp_best(w: Sequence[int], m: Sequence[int], T2: int) -> Best:
    """Exact integer dynamic program over reachable sums."""
    suf = _suffix_sets(w, m)
    reach = suf[0]
    half = T2 // 2
    below_bits = reach & ((1 << (half + 1)) - 1)
    below = below_bits.bit_length() - 1  # largest reachable sum <= T2/2
    above_bits = reach >> (half + 1)
    above = None
    if above_bits:
        above = half + 1 + ((above_bits & -above_bits).bit_length() - 1)
    gap = 2 * below - T2
    if above is not None and 2 * above - T2 < -gap:
        gap = 2 * above - T2
    target = (gap + T2) // 2
    return Best(_lex_smallest(w, m, suf, target), target, gap)


def best_selection(w: Sequence, m: Sequence[int], T2, exact: bool, tie_tol: float = 0.0) -> Best:
    """Dispatch to meet-in-the-middle (<= 40 dimensions) or the dynamic program."""
    m = [int(x) for x in m]
    if not w:
        return Best((), 0, -T2)
    if exact:
        w = [int(x) for x in w]
        T2 = int(T2)
        fits = 2 * sum(wi * mi for wi, mi in zip(w, m)) + abs(T2) < _INT64_SAFE
        if sum(m) <= MITM_MAX_DIMS and fits:
            return mitm_best(w, m, T2, exact=True)
        return dp_best(w, m, T2)
    w = [float(x) for x in w]
    try:
        return mitm_best(w, m, float(T2), exact=False, tie_tol=tie_tol)
    except WorkCapExceeded:
        paired = _paired_split(w, m, float(T2), tie_tol)
        if paired is None:
            raise
        return paired


def _paired_split(w, m, T2, tie_tol):
    """Half of every cluster plus a search over the odd leftovers.

    Only a zero-defect answer is returned, since that is optimal whatever the
    full search would have preferred.
    """
    odd = [i for i, mi in enumerate(m) if mi % 2]
    res = mitm_best([w[i] for i in odd], [1] * len(odd), sum(w[i] for i in odd),
                    exact=False, tie_tol=tie_tol) if odd else Best((), 0.0, 0.0)
    k = [mi // 2 for mi in m]
    for i, ki in zip(odd, res.k):
        k[i] += ki
    total = sum(wi * ki for wi, ki in zip(w, k))
    gap = 2 * total - T2
    return Best(tuple(k), total, gap) if abs(gap) <= tie_tol else None


def enumerate_exact(w: Sequence[int], m: Sequence[int], target: int, cap: int) -> list[tuple[int, ...]]:
    """All ``k`` with ``sum(w_i k_i) == target`` in lexicographic order, at most ``cap``."""
    w = [int(x) for x in w]
    m = [int(x) for x in m]
    suf = _suffix_sets(w, m, limit=target)
    out: list[tuple[int, ...]] = []
    if not _has(suf[0], target):
        return out
    n = len(w)
    prefix: list[int] = []

    def rec(i: int, rem: int) -> bool:
        if i == n:
            out.append(tuple(prefix))
            return len(out) >= cap
        for kk in range(m[i] + 1):
            r = rem - kk * w[i]
            if r < 0:
                break
            if _has(suf[i + 1], r):
                prefix.append(kk)
                done = rec(i + 1, r)
                prefix.pop()
                if done:
                    return True
        return False

    rec(0, target)
    return out
