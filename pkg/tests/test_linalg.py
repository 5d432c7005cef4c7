from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from costab import linalg
from costab.field import QQ, Field, Fp
from costab.textio import ParseError, format_number, parse_number, parse_sections

small = st.integers(min_value=-4, max_value=4)
matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


@given(matrices)
@settings(max_examples=80, deadline=None)
def test_rank_matches_sympy(rows):
    m = QQ.matrix(rows)
    assert linalg.rank(m, QQ) == sympy.Matrix(rows).rank()


@given(matrices)
@settings(max_examples=60, deadline=None)
def test_nullspace_is_kernel_of_full_dimension(rows):
    m = QQ.matrix(rows)
    ns = linalg.nullspace(m, QQ)
    assert ns.shape[1] == len(rows[0]) - sympy.Matrix(rows).rank()
    if ns.shape[1]:
        assert linalg.is_zero(linalg.matmul(m, ns, QQ))
        assert linalg.rank(ns, QQ) == ns.shape[1]


@given(matrices)
@settings(max_examples=60, deadline=None)
def test_rref_matches_sympy(rows):
    r, piv = linalg.rref(QQ.matrix(rows), QQ)
    sr, spiv = sympy.Matrix(rows).rref()
    assert list(piv) == list(spiv)
    assert [[Fraction(int(x.p), int(x.q)) for x in sr.row(i)] for i in range(sr.rows)] == r.tolist()


def test_inverse_and_solve():
    m = QQ.matrix([[2, 1], [1, 1]])
    inv = linalg.inverse(m, QQ)
    assert inv.tolist() == [[1, -1], [-1, 2]]
    x = linalg.solve(m, QQ.vector([3, 2]), QQ)
    assert list(x) == [1, 1]
    assert linalg.solve(QQ.matrix([[1, 1], [1, 1]]), QQ.vector([1, 2]), QQ) is None


def test_prime_field_arithmetic():
    F = Field(7)
    a, b = F(3), F(5)
    assert a + b == F(1)
    assert a * b == F(1)
    assert (a / b) * b == a
    assert F(Fraction(1, 2)) * 2 == F(1)
    assert not F(7)
    assert isinstance(a, Fp)
    # over GF(2) a singular-over-QQ style check: [[1,1],[1,1]] has rank 1
    assert linalg.rank(Field(2).matrix([[1, 1], [1, 1]]), Field(2)) == 1
    assert linalg.rank(Field(2).matrix([[1, 1], [1, -1]]), Field(2)) == 1
    assert linalg.rank(QQ.matrix([[1, 1], [1, -1]]), QQ) == 2


@pytest.mark.parametrize("text,name", [("QQ", "QQ"), ("GF(5)", "GF(5)"), ("gf(32003)", "GF(32003)")])
def test_field_parse(text, name):
    assert Field.parse(text).name == name


def test_field_parse_rejects():
    with pytest.raises(ValueError):
        Field.parse("RR")
    with pytest.raises(ValueError):
        Field(1)


def test_numbers_round_trip():
    assert parse_number("3/4") == Fraction(3, 4)
    assert parse_number("-2") == Fraction(-2)
    assert parse_number("0.25") == 0.25
    for x in (Fraction(3, 4), Fraction(5), 0.1, 1e-12):
        assert parse_number(format_number(x)) == x
    with pytest.raises(ParseError):
        parse_number("1.5.2")
    with pytest.raises(ParseError):
        parse_number("1/0x")


def test_sections_errors():
    with pytest.raises(ParseError, match="before first section"):
        parse_sections("a = 1\n")
    with pytest.raises(ParseError, match="duplicate"):
        parse_sections("[a]\n[a]\n")
    s = parse_sections("# c\n[meta]\nschema = x  # trailing\n")
    assert s.keyvalues("meta")["schema"] == (3, "x")
    with pytest.raises(ParseError) as exc:
        parse_sections("[m]\nnovalue\n").keyvalues("m")
    assert exc.value.line == 2
