import itertools
from fractions import Fraction

import numpy as np
import pytest


def brute_min_defect(values, mults):
    """Minimum |2 sum(lambda_i k_i) - S| over every selection, with all minimizers."""
    total = sum(v * m for v, m in zip(values, mults))
    best, argbest = None, []
    for k in itertools.product(*(range(m + 1) for m in mults)):
        d = abs(2 * sum(v * ki for v, ki in zip(values, k)) - total)
        if best is None or d < best:
            best, argbest = d, [k]
        elif d == best:
            argbest.append(k)
    return best, argbest


def random_rational_instance(rng, max_dims=18, max_clusters=6, den_choices=(2, 3, 4, 5, 6, 8, 10, 12)):
    """Distinct positive rationals with multiplicities summing to at most ``max_dims``."""
    r = int(rng.integers(1, max_clusters + 1))
    values = set()
    while len(values) < r:
        d = int(rng.choice(den_choices))
        values.add(Fraction(int(rng.integers(1, 3 * d)), d))
    values = sorted(values, reverse=True)
    mults = [1] * r
    budget = int(rng.integers(r, max_dims + 1)) - r
    for _ in range(budget):
        mults[int(rng.integers(r))] += 1
    return values, mults


def random_complex(rng, n, m=None):
    m = n if m is None else m
    return rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))


def haar(rng, n):
    q, r = np.linalg.qr(random_complex(rng, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
