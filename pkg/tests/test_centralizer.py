import warnings
from fractions import Fraction

import numpy as np
import pytest

from predual.centralizer import (DegeneracyWarning, centralizer_basis, centralizer_structure,
                                 clusters_of, mass, selection_projection, spectral_clusters,
                                 support_projection)
from predual.errors import InputError
from predual.exact import ExactMatrix
from predual.functional import Functional, SpectralBlock, polar_decompose

from conftest import haar, random_complex


def pairs(phi, **kw):
    return clusters_of(phi, **kw)[1].pairs()


def test_cluster_examples():
    assert pairs(Functional.diagonal(["1/2", "1/2"])) == [(Fraction(1, 2), 2)]
    assert pairs(Functional.diagonal(["7/10", "3/10"])) == [(Fraction(7, 10), 1), (Fraction(3, 10), 1)]


def test_near_degenerate_merge_warns():
    phi = Functional.diagonal([0.5, 0.5 + 1e-13, 0.3], exact=False)
    with pytest.warns(DegeneracyWarning):
        _, cl = clusters_of(phi, tau_cluster=1e-10)
    (v1, m1), (v2, m2) = cl.pairs()
    assert m1 == 2 and m2 == 1
    assert v1 == pytest.approx(0.5, abs=1e-12) and v2 == pytest.approx(0.3)
    assert cl.warnings


def test_cluster_invariants(rng):
    for _ in range(20):
        a = random_complex(rng, 5)
        _, cl = clusters_of(Functional([a]))
        vals = cl.values
        assert all(x - y > 1e-10 for x, y in zip(vals, vals[1:]))
        assert sum(cl.multiplicities) == cl.support_rank == 5
        assert cl.total == pytest.approx(np.linalg.svd(a, compute_uv=False).sum())


def test_exact_requires_zero_tau():
    polar = polar_decompose(Functional.diagonal(["1", "1"]))
    with pytest.raises(InputError):
        spectral_clusters(polar, 1e-10)


def test_zero_functional_has_no_clusters():
    phi = Functional.diagonal(["0", "0"])
    assert clusters_of(phi)[1].clusters == ()
    with pytest.raises(InputError, match="centralizer of zero undefined"):
        centralizer_structure(phi)


def test_structure_examples():
    r = centralizer_structure(Functional.diagonal(["1/2", "1/2"]))
    assert r.block_structure == [2] and not r.is_trivial and len(r.atoms) == 1
    r = centralizer_structure(Functional.diagonal(["7/10", "3/10"]))
    assert r.block_structure == [1, 1] and not r.is_trivial
    nil = Functional.from_spectral([SpectralBlock(ExactMatrix.from_entries([[0, 1], [0, 0]]),
                                                  ("0", "1"), (0, 1))])
    r = centralizer_structure(nil)
    assert r.is_trivial and r.clusters.support_rank == 1


def test_mass_examples():
    _, cl = clusters_of(Functional.diagonal(["1/2", "1/2"]))
    assert mass(cl, (1,)) == Fraction(1, 2)
    _, cl = clusters_of(Functional.diagonal(["7/10", "3/10"]))
    assert mass(cl, (0, 1)) == Fraction(3, 10)
    _, cl = clusters_of(Functional.diagonal(["1/4"] * 4))
    assert mass(cl, (2,)) == Fraction(1, 2)
    with pytest.raises(InputError):
        mass(cl, (5,))
    with pytest.raises(InputError):
        mass(cl, (1, 1))


def test_projection_commutes_and_has_mass_exact():
    spec = [SpectralBlock(ExactMatrix.from_entries([[0, 1, 0], [1, 0, 0], [0, 0, [0, 1]]]),
                          ("1/4", "1/4", "1/8"), (0, 1, 2))]
    phi = Functional.from_spectral(spec)
    polar, cl = clusters_of(phi)
    for k in [(0, 0), (1, 0), (2, 1), (1, 1)]:
        e = selection_projection(cl, k)
        p = polar.positive[0]
        assert e[0] @ p == p @ e[0]
        assert (p @ e[0]).trace().re == mass(cl, k)


def test_projection_commutes_float(rng):
    u = haar(rng, 4)
    a = u @ np.diag([0.4, 0.4, 0.1, 0.1]) @ haar(rng, 4)
    polar, cl = clusters_of(Functional([a]))
    assert cl.multiplicities == [2, 2]
    e = selection_projection(cl, (1, 2))[0]
    p = polar.positive[0]
    assert np.abs(e @ p - p @ e).max() <= 1e-12
    assert np.trace(p @ e).real == pytest.approx(mass(cl, (1, 2)), abs=1e-12)
    s = support_projection(cl)[0]
    assert np.abs(s - polar.support[0]).max() <= 1e-10


def test_centralizer_membership(rng):
    u = haar(rng, 3)
    a = u @ np.diag([0.5, 0.5, 0.2]) @ haar(rng, 3)
    polar, cl = clusters_of(Functional([a]))
    p, s = polar.positive[0], polar.support[0]
    basis = centralizer_basis(cl)
    assert len(basis) == 4 + 1
    for x in basis:
        for _ in range(5):
            y = s @ random_complex(rng, 3) @ s
            lhs = np.trace(p @ x[0] @ y)
            rhs = np.trace(p @ y @ x[0])
            assert abs(lhs - rhs) <= 1e-12 * 10


def test_minimal_projections_are_atoms():
    # e M_{|phi|} e is scalar for a rank-one subprojection of an eigenspace
    phi = Functional.diagonal(["1/3", "1/3", "1/3"])
    _, cl = clusters_of(phi)
    e = selection_projection(cl, (1,))[0]
    for x in centralizer_basis(cl):
        c = e @ x[0] @ e
        assert c == e * c.entry(0, 0)
