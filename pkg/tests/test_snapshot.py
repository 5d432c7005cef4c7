import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from costab import complexes as cx
from costab.snapshot import (FormalObject, IndecId, SnapshotError, build_snapshot, load_snapshot,
                             parse_snapshot, save_snapshot, snapshot_text, snapshots_equal)
from costab.textio import ParseError


def test_orbits_of_presets(kA2, dual, trivial_snap):
    assert kA2.orbits == ["x", "y", "z"]
    assert dual.orbits == ["c", "s2", "s3"]
    assert trivial_snap.orbits == ["P1"]
    for s in (kA2, dual, trivial_snap):
        assert s.enumeration_complete and s.catalog_closed


def test_kA2_hom_values(kA2):
    x, y, z = (IndecId(o, 0) for o in "xyz")
    assert kA2.hom(x, y) == 1 and kA2.hom(y, x) == 0
    assert kA2.hom(y, z) == 1 and kA2.hom(z, x.suspend(1)) == 1
    assert kA2.hom(x, z) == 0 and kA2.hom(z, y) == 0
    assert kA2.hom(FormalObject.parse("2*x@0 + y@0"), y) == 3


def test_dual_homs(dual):
    c, s2 = IndecId("c", 0), IndecId("s2", 0)
    assert dual.hom(c, c) == 2
    assert dual.hom(c, c.suspend(1)) == 0 and dual.hom(c, c.suspend(-1)) == 0
    assert dual.hom(s2, c) == 1


ids = st.builds(IndecId, st.sampled_from(["x", "y", "z"]), st.integers(-4, 4))


@given(ids, ids, st.integers(-3, 3))
@settings(max_examples=60, deadline=None)
def test_hom_is_suspension_invariant_and_matches_complexes(kA2, a, b, k):
    h = kA2.hom(a, b)
    assert kA2.hom(a.suspend(k), b.suspend(k)) == h
    assert cx.hom_dim(kA2.complex_of(a), kA2.complex_of(b)) == h


def test_k0_classes(kA2, dual):
    assert kA2.k0_basis == ["P1", "P2"]
    assert kA2.k0_class(IndecId("z", 0)) == (-1, 1)
    assert kA2.k0_class(IndecId("z", 1)) == (1, -1)
    assert kA2.k0_class(FormalObject.parse("x@0 + x@1")) == (0, 0)
    assert dual.k0_class(IndecId("s2", 0)) == (0,)
    assert dual.k0_class(IndecId("s3", 0)) == (1,)


def test_identify_cone(kA2):
    x, y = kA2.complex_of(IndecId("x", 0)), kA2.complex_of(IndecId("y", 0))
    f = cx.hom_space(x, y).basis[0]
    assert kA2.identify(cx.cone(f)) == FormalObject.parse("z@0")
    assert kA2.identify(cx.direct_sum(x, y.shift(2))) == FormalObject.parse("x@0 + y@2")


def test_catalog_triangles_are_additive(kA2):
    assert kA2.triangles
    assert all(kA2.check_triangle(t) for t in kA2.triangles)
    kA2.validate()


def test_ids_and_formal_objects():
    assert IndecId.parse("s2@-3") == IndecId("s2", -3)
    assert str(IndecId("x", 1).suspend(-2)) == "x@-1"
    assert IndecId.parse("x") == IndecId("x", 0)
    with pytest.raises(ValueError):
        IndecId.parse("x@1.5")
    obj = FormalObject.parse("2*x@0 + y@1")
    assert obj.size() == 3 and obj.suspend(1) == FormalObject.parse("2*x@1 + y@2")


def test_build_rejects_bad_window():
    with pytest.raises(ValueError):
        build_snapshot("kA2", 2, (2, -2))


def test_file_round_trip(tmp_path, kA2, dual):
    for s in (kA2, dual):
        p = tmp_path / "s.snapshot"
        save_snapshot(s, p)
        t = load_snapshot(p)
        assert snapshots_equal(s, t)
        assert t.hom_table() == s.hom_table()


def test_parse_errors(kA2):
    text = snapshot_text(kA2)
    with pytest.raises(ParseError):
        parse_snapshot(text.replace("costab-snapshot/1", "costab-snapshot/9"))
    with pytest.raises(ParseError):
        parse_snapshot("[meta]\nschema = costab-snapshot/1\n")


def test_validate_reports_non_additive_triangle(kA2):
    s = build_snapshot("kA2", 2, (-1, 1))
    t = s.triangles[0]
    s.triangles.append(type(t)(t.a, t.b, t.a, "broken"))
    with pytest.raises(SnapshotError, match="broken"):
        s.validate()


def test_enumeration_examples():
    assert build_snapshot("k", 1, (0, 0)).ids == [IndecId("P1", 0)]
    assert len(build_snapshot("kA2", 2, (-1, 1)).ids) == 9
    d = build_snapshot("dual", 3, (-1, 1))
    # string complexes R -> R -> ... -> R of lengths 1, 2, 3 with multiplication by X
    assert [d.reps[o].width for o in d.orbits] == [1, 2, 3]
    assert all(set(d.reps[o].terms.values()) == {(0,)} for o in d.orbits)
