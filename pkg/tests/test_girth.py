import itertools
from fractions import Fraction

import numpy as np
import pytest

from predual.algebra import AlgebraShape
from predual.errors import ChainInfeasible, InputError, WorkCapExceeded
from predual.exact import ExactMatrix
from predual.functional import Functional, SpectralBlock, trace_norm
from predual.girth import build_girth_polyline, find_chain, polyline_csv, verify_polyline
from predual.centralizer import clusters_of

from conftest import haar


def uniform(n):
    return Functional.diagonal([Fraction(1, n)] * n, shape=AlgebraShape.diffuse(n))


def test_four_atoms_flip_one_per_step():
    phi = uniform(4)
    p = build_girth_polyline(phi, 4)
    assert p.times == [0, Fraction(1, 2), 1, Fraction(3, 2), 2]
    for j, x in enumerate(p.samples):
        signs = [b.entry(0, 0).re * 4 for b in x.blocks]
        assert sorted(signs) == [-1] * j + [1] * (4 - j)
    for i, j in itertools.combinations(range(5), 2):
        assert trace_norm(p.samples[j] - p.samples[i]) == Fraction(j - i, 2)
    rep = verify_polyline(p, phi)
    assert rep.max_violation == 0 and rep.total_length == 2 and rep.pairs_checked == 10


def test_endpoints():
    phi = Functional.diagonal(["1/2", "1/4", "1/4"])
    p = build_girth_polyline(phi, 2)
    assert p.samples[0].equals(phi)
    assert p.samples[-1].equals(-phi)


def test_midpoint_solves_norm_equation():
    phi = Functional.diagonal(["1/3", "1/6", "1/6", "1/3"])
    p = build_girth_polyline(phi, 2)
    mid = p.samples[1]
    n = trace_norm(phi)
    assert trace_norm(mid) == trace_norm(phi + mid) == trace_norm(phi - mid) == n


def test_atomic_spectrum_has_no_chain():
    with pytest.raises(ChainInfeasible, match="centralizer too atomic"):
        build_girth_polyline(Functional.diagonal(["7/10", "3/10"]), 2)


def test_resolution_64_exact():
    phi = uniform(64)
    p = build_girth_polyline(phi, 64)
    rep = verify_polyline(p, phi)
    assert rep.pairs_checked == 65 * 64 // 2
    assert rep.max_violation == 0 and rep.total_length == 2
    assert p.samples[-1].equals(-phi)


def test_nonuniform_chain_with_backtracking():
    # greedy takes 3/8, skips the 1/4 that overshoots, then finishes with 1/8
    phi = Functional.diagonal(["3/8", "1/4", "1/8", "1/8", "1/8"])
    p = build_girth_polyline(phi, 2)
    assert p.selections[1] == (1, 0, 1)
    assert verify_polyline(p, phi).max_violation == 0
    # an atom heavier than one step can never be placed
    with pytest.raises(ChainInfeasible):
        build_girth_polyline(phi, 4)


def test_rotated_spectral_exact():
    v = ExactMatrix.from_entries([[0, [0, 1], 0], [1, 0, 0], [0, 0, -1]])
    phi = Functional.from_spectral([SpectralBlock(v, ("1/3", "1/3", "1/3"), (0, 1, 2))])
    p = build_girth_polyline(phi, 3)
    assert verify_polyline(p, phi).max_violation == 0


def test_float_polyline(rng):
    u, w = haar(rng, 6), haar(rng, 6)
    phi = Functional([u @ np.diag([0.25, 0.25, 0.125, 0.125, 0.125, 0.125]) @ w])
    p = build_girth_polyline(phi, 4)
    rep = verify_polyline(p, phi)
    assert rep.max_violation <= 1e-9
    assert rep.total_length == pytest.approx(2 * trace_norm(phi))


def test_scaled_sample_is_detected():
    phi = uniform(4)
    p = build_girth_polyline(phi, 4)
    p.samples[2] = p.samples[2].to_float() * 1.01
    p.samples = [x.to_float() for x in p.samples]
    p.base_norm = float(p.base_norm)
    p.times = [float(t) for t in p.times]
    assert verify_polyline(p).max_violation > 1e-3


def test_density_rounding_to_grid(rng):
    # float density on 1024 atoms; round its values to a grid of pitch 2^-10
    n, steps = 1024, 4
    pitch = Fraction(1, 1024)
    density = rng.dirichlet(np.ones(n)) * n
    units = np.round(density / float(pitch)).astype(int)
    units[int(np.argmax(units))] -= int(units.sum()) % steps
    shape = AlgebraShape.diffuse(n)
    phi = Functional.diagonal(density / n, shape=shape, exact=False)
    grid_phi = Functional.diagonal([int(u) * pitch / n for u in units], shape=shape)
    assert float(pitch) <= 1e-3
    assert trace_norm(phi - grid_phi.to_float()) <= float(pitch)
    p = build_girth_polyline(grid_phi, steps)
    rep = verify_polyline(p, grid_phi)
    assert rep.max_violation == 0
    assert rep.total_length == 2 * trace_norm(grid_phi)


def test_invalid_requests():
    with pytest.raises(InputError):
        build_girth_polyline(uniform(2), 0)
    with pytest.raises(InputError):
        build_girth_polyline(Functional.diagonal(["0", "0"]), 2)


def test_chain_cap(monkeypatch):
    monkeypatch.setenv("PREDUAL_CHAIN_CAP", "3")
    with pytest.raises(WorkCapExceeded):
        build_girth_polyline(uniform(16), 16)


def test_csv_rows():
    p = build_girth_polyline(uniform(4), 4)
    text = polyline_csv(p, lambda x: "f")
    rows = text.strip().split("\n")
    assert rows[0] == "t,functional,distance_from_start"
    assert rows[1:] == ["0,f,0", "1/2,f,1/2", "1,f,1", "3/2,f,3/2", "2,f,2"]
