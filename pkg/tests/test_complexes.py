"""Path algebras and complexes of projectives: hand-computed Hom dimensions and decompositions."""

import pytest

from costab import complexes as cx
from costab.algebra import (AlgebraError, AlgebraPresentation, Arrow, QuiverAlgebra, load_algebra, preset,
                            save_algebra)
from costab.field import Field
from costab.textio import ParseError


@pytest.fixture(scope="module")
def A():
    return preset("kA2")


@pytest.fixture(scope="module")
def D():
    return preset("dual")


def test_preset_dimensions():
    assert preset("k").dim == 1
    assert preset("kA2").dim == 3
    assert preset("dual").dim == 2
    with pytest.raises(AlgebraError):
        preset("kA3")


def test_kA2_paths(A):
    assert [A.path_name(b) for b in A.paths_between(0, 1)] == ["a"]
    assert A.paths_between(1, 0) == []
    # P_v is spanned by the paths ending at v
    assert A.pdim(0) == 1 and A.pdim(1) == 2


def test_truncated_polynomial_ring():
    # k[X]/X^3 has basis 1, X, X^2
    p = AlgebraPresentation(("1",), (Arrow("X", "1", "1"),), (((1, ("X", "X", "X")),),))
    assert QuiverAlgebra(p).dim == 3


def test_presentation_rejects_bad_input():
    with pytest.raises(AlgebraError):
        AlgebraPresentation(("1", "1"))
    with pytest.raises(AlgebraError):
        AlgebraPresentation(("1",), (Arrow("a", "1", "2"),))
    with pytest.raises(AlgebraError, match="admissible"):
        AlgebraPresentation(("1",), (Arrow("X", "1", "1"),), (((1, ("X",)),),))


def test_algebra_file_round_trip(tmp_path, D):
    path = tmp_path / "dual.alg"
    save_algebra(D.presentation, path)
    B = load_algebra(path)
    assert B.dim == D.dim and B.presentation.relations == D.presentation.relations
    path.write_text("[vertices]\n1\n[arrows]\nX 1 1\n")
    with pytest.raises(ParseError):
        load_algebra(path)


def test_hom_between_stalks(A):
    P1, P2 = cx.stalk(A, "1"), cx.stalk(A, "2")
    assert cx.hom_dim(P1, P2) == 1
    assert cx.hom_dim(P2, P1) == 0
    assert cx.hom_dim(P1, P1) == 1
    assert cx.hom_dim(P1, P2.shift(1)) == 0


def test_cone_and_shift(A):
    f = cx.from_paths(A, {-1: ["1"], 0: ["2"]}, {-1: [[{"a": 1}]]})
    assert f.k0_class() == (-1, 1)
    P1 = cx.stalk(A, "1")
    # Hom(cone(P1 -> P2), Σ P1) is one dimensional
    assert cx.hom_dim(f, P1.shift(1)) == 1
    assert f.shift(1).shift(-1) == f
    assert cx.is_indecomposable(f)


def test_d_squared_must_vanish(D):
    with pytest.raises(cx.ComplexError):
        cx.from_paths(D, {0: ["1"], 1: ["1"], 2: ["1"]}, {0: [[{"e1": 1}]], 1: [[{"e1": 1}]]})


def test_cone_of_identity_is_contractible(D):
    X = cx.from_paths(D, {0: ["1"], 1: ["1"]}, {0: [[{"X": 1}]]})
    assert cx.is_contractible(cx.cone(X.identity()))
    assert not cx.is_contractible(X)


def test_decompose_direct_sum(A, D):
    x, y = cx.stalk(A, "1"), cx.stalk(A, "2")
    z = cx.from_paths(A, {-1: ["1"], 0: ["2"]}, {-1: [[{"a": 1}]]})
    parts = cx.decompose(cx.direct_sum(x, y, z))
    assert sorted(p.k0_class() for p in parts) == sorted([(1, 0), (0, 1), (-1, 1)])
    s2 = cx.from_paths(D, {0: ["1"], 1: ["1"]}, {0: [[{"X": 1}]]})
    assert len(cx.decompose(cx.direct_sum(s2, s2.shift(1), cx.stalk(D, "1")))) == 3


def test_minimalize_removes_contractible_summand(D):
    unit = cx.from_paths(D, {0: ["1"], 1: ["1"]}, {0: [[{"e1": 1}]]})
    c = cx.stalk(D, "1")
    assert cx.minimalize(cx.direct_sum(c, unit)) == cx.minimalize(c)


def test_prime_field_gives_same_dims():
    A = QuiverAlgebra(preset("kA2").presentation.with_field(Field(5)))
    z = cx.from_paths(A, {-1: ["1"], 0: ["2"]}, {-1: [[{"a": 1}]]})
    assert cx.hom_dim(z, cx.stalk(A, "1").shift(1)) == 1
