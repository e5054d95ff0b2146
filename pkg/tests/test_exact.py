from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from predual.exact import (ExactMatrix, GaussianRational, format_rational, parse_rational,
                           rational_sqrt)

fractions = st.fractions(min_value=-5, max_value=5, max_denominator=12)
entries = st.tuples(fractions, fractions)


def square(n):
    return st.lists(st.lists(entries, min_size=n, max_size=n), min_size=n, max_size=n)


def as_complex(rows):
    return np.array([[complex(float(a), float(b)) for a, b in r] for r in rows])


@pytest.mark.parametrize("text,value", [("3/4", Fraction(3, 4)), ("-2", Fraction(-2)),
                                        ("0.125", Fraction(1, 8)), (" 5 / 10 ", Fraction(1, 2))])
def test_parse_rational(text, value):
    assert parse_rational(text.replace(" / ", "/")) == value


def test_parse_rejects_bool_and_junk():
    with pytest.raises(TypeError):
        parse_rational(True)
    with pytest.raises(ValueError):
        parse_rational("one half")


def test_format_round_trip():
    for q in [Fraction(0), Fraction(7, 3), Fraction(-1, 8), Fraction(5)]:
        assert parse_rational(format_rational(q)) == q
    assert format_rational(Fraction(4, 2)) == "2"


def test_rational_sqrt():
    assert rational_sqrt(Fraction(9, 16)) == Fraction(3, 4)
    assert rational_sqrt(Fraction(2)) is None
    with pytest.raises(ValueError):
        rational_sqrt(Fraction(-1))


def test_denominator_normalized():
    a = ExactMatrix.from_entries([["1/2", "1/2"], ["0", "1"]])
    b = ExactMatrix.from_entries([["2/4", "3/6"], ["0", "4/4"]])
    assert a == b and hash(a) == hash(b)
    assert a.den == 2


def test_gaussian_entries():
    a = ExactMatrix.from_entries([[["0", "1"]]])
    assert a.entry(0, 0) == GaussianRational(Fraction(0), Fraction(1))
    assert (a @ a).entry(0, 0) == GaussianRational(Fraction(-1), Fraction(0))
    assert a.adjoint().entry(0, 0).im == -1


@settings(max_examples=60, deadline=None)
@given(square(3), square(3))
def test_arithmetic_matches_complex(x, y):
    a, b = ExactMatrix.from_entries(x), ExactMatrix.from_entries(y)
    cx, cy = as_complex(x), as_complex(y)
    assert np.allclose((a @ b).to_complex(), cx @ cy)
    assert np.allclose((a + b).to_complex(), cx + cy)
    assert np.allclose((a - b).to_complex(), cx - cy)
    assert np.allclose(a.adjoint().to_complex(), cx.conj().T)
    assert np.isclose(complex(a.trace()), np.trace(cx))


@settings(max_examples=40, deadline=None)
@given(square(2), fractions)
def test_scalar_multiplication(x, c):
    a = ExactMatrix.from_entries(x)
    assert (a * c) == (c * a)
    assert np.allclose((a * c).to_complex(), float(c) * as_complex(x))
    assert (a * GaussianRational(Fraction(0), Fraction(1))).to_complex() == pytest.approx(
        1j * as_complex(x))


def test_diag_identity_zero():
    d = ExactMatrix.diag(["1/3", 0, ["0", "2"]])
    assert d.is_diagonal()
    assert d.diagonal()[2] == GaussianRational(Fraction(0), Fraction(2))
    assert ExactMatrix.identity(3) @ d == d
    assert (d - d).is_zero()
    assert ExactMatrix.zeros(2, 3).shape == (2, 3)


def test_shape_errors():
    with pytest.raises(ValueError):
        ExactMatrix.identity(2) @ ExactMatrix.identity(3)
    with pytest.raises(ValueError):
        ExactMatrix.identity(2) + ExactMatrix.identity(3)
    with pytest.raises(ValueError):
        ExactMatrix.from_entries([[1, 2], [3]])
