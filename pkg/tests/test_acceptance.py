"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import itertools
import time
from fractions import Fraction
from math import comb, gcd

import numpy as np
import pytest

from predual.algebra import AlgebraShape
from predual.daugavet import constant, defect_sweep, sampled
from predual.exact import ExactMatrix
from predual.functional import (Functional, SpectralBlock, kusuda_check, polar_decompose,
                                trace_norm)
from predual.girth import build_girth_polyline, verify_polyline
from predual.splitter import SplitInstance, best_split, decide_exact, solve, verify_certificate
from predual.ultra import STAGNATING, VANISHING, FunctionalSequence, run_sequence

from conftest import haar, random_complex, random_rational_instance

F = Fraction


@pytest.fixture
def report(request):
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")

    def emit(number, ok, detail):
        line = f"[acceptance {number}] {'PASS' if ok else 'FAIL'}: {detail}"
        if reporter is not None:
            reporter.write_line(line)
        else:  # pragma: no cover
            print(line)
        return ok
    return emit


def lcm_all(xs):
    out = 1
    for x in xs:
        out = out * x // gcd(out, x)
    return out


def exhaustive_sums(values, mults):
    """All sums of sum(w_i k_i) over the common-denominator integers, via numpy broadcasting."""
    den = lcm_all(v.denominator for v in values)
    w = [int(v * den) for v in values]
    sums = np.zeros(1, dtype=np.int64)
    for wi, mi in zip(w, mults):
        sums = (sums[:, None] + wi * np.arange(mi + 1, dtype=np.int64)).ravel()
    return sums, sum(wi * mi for wi, mi in zip(w, mults)), den


def phased_permutation(rng, n):
    rows = [[0] * n for _ in range(n)]
    for j, i in enumerate(rng.permutation(n)):
        rows[int(i)][j] = [[1, 0], [0, 1], [-1, 0], [0, -1]][int(rng.integers(4))]
    return ExactMatrix.from_entries(rows)


def spectral_functional(rng, values, mults, n_blocks):
    """Rational functional with the given spectrum spread over ``n_blocks`` blocks."""
    weights = [v for v, m in zip(values, mults) for _ in range(m)]
    weights = [weights[i] for i in rng.permutation(len(weights))]
    cuts = sorted(rng.choice(np.arange(1, len(weights)), size=min(n_blocks, len(weights)) - 1,
                             replace=False)) if len(weights) > 1 else []
    chunks = [weights[a:b] for a, b in zip([0, *cuts], [*cuts, len(weights)])]
    spec = []
    for chunk in chunks:
        pad = int(rng.integers(0, 2))
        n = len(chunk) + pad
        positions = tuple(int(p) for p in rng.permutation(n)[:len(chunk)])
        v_full = phased_permutation(rng, n)
        support = ExactMatrix.diag([1 if p in positions else 0 for p in range(n)])
        spec.append(SpectralBlock(v_full @ support, tuple(chunk), positions))
    return Functional.from_spectral(spec)


def svd_norm(a):
    return np.linalg.svd(a, compute_uv=False).sum(axis=-1)


# -- 1 ------------------------------------------------------------------------------

def test_criterion_1_oracle_agreement(report):
    rng = np.random.default_rng(1)
    start = time.perf_counter()
    disagreements = 0
    for _ in range(1000):
        values, mults = random_rational_instance(rng, max_dims=18)
        sums, total2, den = exhaustive_sums(values, mults)
        oracle = bool(total2 % 2 == 0 and (sums == total2 // 2).any())
        d = decide_exact(SplitInstance(tuple(values), tuple(mults)))
        ok = d.solvable == oracle
        if d.solvable:
            ok &= 2 * sum(v * k for v, k in zip(values, d.witness)) == sum(
                v * m for v, m in zip(values, mults))
        disagreements += not ok
    elapsed = time.perf_counter() - start
    passed = disagreements == 0 and elapsed < 30
    report(1, passed, f"decide_exact vs exhaustive enumeration, 1000 instances, "
                      f"{disagreements} disagreements, {elapsed:.1f} s")
    assert disagreements == 0
    assert elapsed < 30


# -- 2 ------------------------------------------------------------------------------

def test_criterion_2_certificate_exactness(report):
    rng = np.random.default_rng(2)
    exact_worst, n_exact = F(0), 0
    while n_exact < 200:
        values, mults = random_rational_instance(rng, max_dims=10)
        if not decide_exact(SplitInstance(tuple(values), tuple(mults))).solvable:
            continue
        phi = spectral_functional(rng, values, mults, int(rng.integers(1, 4)))
        ok, cert = solve(phi)
        assert ok
        n = trace_norm(phi)
        viol = max(abs(trace_norm(cert.psi) - n), abs(trace_norm(phi + cert.psi) - n),
                   abs(trace_norm(phi - cert.psi) - n))
        viol = max(viol, verify_certificate(phi, cert).max_violation)
        exact_worst = max(exact_worst, viol)
        n_exact += 1

    float_worst = 0.0
    for trial in range(40):
        dim = int(rng.integers(2, 33)) * 2
        half = rng.uniform(0.05, 1.0, dim // 2)
        spectrum = np.concatenate([half, half])  # paired eigenvalues always split
        blocks = [dim] if trial % 2 else [dim // 2, dim // 2]
        mats, pos = [], 0
        for b in blocks:
            mats.append(haar(rng, b) @ np.diag(spectrum[pos:pos + b]) @ haar(rng, b))
            pos += b
        phi = Functional(mats)
        ok, cert = solve(phi)
        assert ok
        n = sum(svd_norm(a) for a in phi.blocks)
        psi = cert.psi.blocks
        viol = max(abs(sum(svd_norm(p) for p in psi) - n),
                   abs(sum(svd_norm(a + p) for a, p in zip(phi.blocks, psi)) - n),
                   abs(sum(svd_norm(a - p) for a, p in zip(phi.blocks, psi)) - n))
        float_worst = max(float_worst, viol, verify_certificate(phi, cert).max_violation)
    passed = exact_worst == 0 and float_worst <= 1e-9
    report(2, passed, f"{n_exact} rational certificates with max violation {exact_worst}; "
                      f"40 float certificates (dim <= 64) with max violation {float_worst:.2e}")
    assert exact_worst == 0
    assert float_worst <= 1e-9


# -- 3 ------------------------------------------------------------------------------

def test_criterion_3_completeness(report):
    rng = np.random.default_rng(3)
    instances, best_found = 0, np.inf
    while instances < 100:
        n = int(rng.integers(2, 5))
        spectrum = rng.uniform(0.05, 1.0, n)
        a = haar(rng, n) @ np.diag(spectrum) @ haar(rng, n)
        a /= svd_norm(a)
        phi = Functional([a])
        ok, cert = solve(phi)
        if ok:
            continue
        instances += 1
        cands = random_complex(rng, 10_000, n * n).reshape(-1, n, n)
        # a quarter of the candidates hug the best centralizer split
        cands[:2500] = cert.psi.blocks[0] + 1e-2 * cands[:2500] / np.sqrt(n)
        cands /= svd_norm(cands)[:, None, None]
        viol = np.maximum.reduce([np.abs(svd_norm(a + cands) - 1), np.abs(svd_norm(a - cands) - 1),
                                  np.abs(svd_norm(cands) - 1)])
        best_found = min(best_found, float(viol.min()))
    passed = best_found >= 1e-6
    report(3, passed, f"100 unsolvable instances x 10^4 unit-norm candidates; "
                      f"smallest violation found {best_found:.3e} (must stay >= 1e-6)")
    assert best_found >= 1e-6


# -- 4 ------------------------------------------------------------------------------

def test_criterion_4_approx_optimality(report):
    rng = np.random.default_rng(4)
    mismatches = 0
    for _ in range(300):
        values, mults = random_rational_instance(rng, max_dims=18)
        sums, total2, den = exhaustive_sums(values, mults)
        brute = F(int(np.abs(2 * sums - total2).min()), den)
        if best_split(SplitInstance(tuple(values), tuple(mults))).defect != brute:
            mismatches += 1
    uniform_bad = [n for n in range(1, 2 ** 10 + 1)
                   if best_split(SplitInstance((F(1, n),), (n,))).defect != (0 if n % 2 == 0 else F(1, n))]
    passed = mismatches == 0 and not uniform_bad
    report(4, passed, f"300 brute-force comparisons, {mismatches} mismatches; uniform n = 1..1024, "
                      f"{len(uniform_bad)} wrong defects")
    assert mismatches == 0
    assert not uniform_bad


# -- 5 ------------------------------------------------------------------------------

def test_criterion_5_girth_polyline(report):
    n = 64
    phi = Functional.diagonal([F(1, n)] * n, shape=AlgebraShape.diffuse(n))
    p = build_girth_polyline(phi, n)
    rep = verify_polyline(p, phi)
    endpoint_exact = p.samples[-1].equals(-phi)
    passed = (rep.pairs_checked == comb(65, 2) and rep.max_violation == 0
              and rep.total_length == 2 and endpoint_exact)
    report(5, passed, f"{rep.pairs_checked} pairs, max violation {rep.max_violation}, "
                      f"length {rep.total_length}, endpoint equals -phi: {endpoint_exact}")
    assert rep.pairs_checked == comb(65, 2)
    assert rep.max_violation == 0
    assert rep.total_length == 2
    assert endpoint_exact


# -- 6 ------------------------------------------------------------------------------

def test_criterion_6_daugavet_law(report):
    resolutions = [2 ** j for j in range(11)]
    rows = defect_sweep(constant(1), constant(-1), resolutions)
    law = all(r.defect == F(2, r.n) for r in rows)
    rng = np.random.default_rng(6)
    violations = 0
    for _ in range(50):
        pieces = int(rng.integers(1, 17))
        g = [F(int(k), 16) for k in rng.integers(-48, 49, size=pieces)]
        h = [F(int(k), 16) for k in rng.integers(-48, 49, size=pieces)]
        bound_c = 2 * max(abs(x) for x in g) * max(abs(x) for x in h)
        for r in defect_sweep(sampled(g), sampled(h), resolutions):
            if not 0 <= r.defect <= bound_c / r.n:
                violations += 1
    passed = law and violations == 0
    report(6, passed, f"g=1, h=-1 defect equals 2/n for n in 1..1024: {law}; "
                      f"50 random pairs x 11 resolutions, {violations} bound violations")
    assert law
    assert violations == 0


# -- 7 ------------------------------------------------------------------------------

def test_criterion_7_kusuda(report):
    rng = np.random.default_rng(7)
    worst_abs = worst_iso = 0.0
    additive_fail = 0
    for _ in range(500):
        blocks = [int(b) for b in rng.integers(1, 5, size=int(rng.integers(1, 3)))]
        b1, b2 = [], []
        for b in blocks:
            u = haar(rng, b)
            for out in (b1, b2):
                r = int(rng.integers(1, b + 1))
                g = random_complex(rng, b, r)
                out.append(u @ g @ g.conj().T)
        rep = kusuda_check(Functional(b1), Functional(b2))
        if not rep.norm_additive:
            additive_fail += 1
            continue
        worst_abs = max(worst_abs, rep.abs_additive_error)
        worst_iso = max(worst_iso, rep.shared_isometry_error)
    misflagged = 0
    for _ in range(500):
        blocks = [int(b) for b in rng.integers(2, 5, size=int(rng.integers(1, 3)))]
        f1 = Functional([random_complex(rng, b) for b in blocks])
        f2 = Functional([random_complex(rng, b) for b in blocks])
        misflagged += kusuda_check(f1, f2).norm_additive
    passed = additive_fail == 0 and worst_abs <= 1e-8 and worst_iso <= 1e-8 and misflagged == 0
    report(7, passed, f"500 shared-isometry pairs: {additive_fail} not additive, abs error "
                      f"{worst_abs:.2e}, isometry error {worst_iso:.2e}; 500 generic pairs, "
                      f"{misflagged} wrongly called additive")
    assert additive_fail == 0
    assert worst_abs <= 1e-8 and worst_iso <= 1e-8
    assert misflagged == 0


# -- 8 ------------------------------------------------------------------------------

def test_criterion_8_ultra(report):
    uni = run_sequence(FunctionalSequence("uniform", 10_000))
    within = all(d <= F(1, i) for i, d in enumerate(uni.defects, start=1))
    const = run_sequence(FunctionalSequence("constant-atomic", 10_000))
    constant_defect = set(const.defects) == {F(2, 5)}
    passed = within and uni.verdict == VANISHING and constant_defect and const.verdict == STAGNATING
    report(8, passed, f"uniform 10^4 stages: defects <= 1/i {within}, verdict {uni.verdict}; "
                      f"constant atomic: defect 2/5 throughout {constant_defect}, verdict {const.verdict}")
    assert within and uni.verdict == VANISHING
    assert constant_defect and const.verdict == STAGNATING


# -- 9 ------------------------------------------------------------------------------

def test_criterion_9_polar_substrate(report):
    rng = np.random.default_rng(9)
    worst = {"reconstruction": 0.0, "isometry": 0.0, "duality": 0.0}
    for trial in range(1000):
        total = int(rng.integers(1, 65))
        blocks, left = [], total
        while left:
            b = int(rng.integers(1, left + 1))
            blocks.append(b)
            left -= b
        mats = []
        for b in blocks:
            r = int(rng.integers(1, b + 1)) if trial % 3 == 0 else b
            mats.append(random_complex(rng, b, r) @ random_complex(rng, r, b) / b)
        phi = Functional(mats)
        polar = polar_decompose(phi)
        recon = sum(svd_norm(v @ p - a) for v, p, a in zip(polar.v, polar.positive, phi.blocks))
        iso = max(np.abs(v.conj().T @ v - s).max() for v, s in zip(polar.v, polar.support))
        dual = abs(trace_norm(phi) - phi([v.conj().T for v in polar.v]).real)
        worst["reconstruction"] = max(worst["reconstruction"], recon)
        worst["isometry"] = max(worst["isometry"], iso)
        worst["duality"] = max(worst["duality"], dual)
    passed = all(v <= 1e-10 for v in worst.values())
    report(9, passed, "1000 float functionals (dimension <= 64): "
                      + ", ".join(f"{k} {v:.2e}" for k, v in worst.items()))
    assert all(v <= 1e-10 for v in worst.values()), worst
