import random

import pytest

from costab.cotstruct import (CoTStructure, check_cotstructure, cotstructure_text, enumerate_cohearts,
                              from_aisle, from_coheart, generates, heart_filtration, is_presilting,
                              member, parse_cotstructure, resolve_cotstructure, split_k0_class, trivial)
from costab.snapshot import FormalObject, IndecId
from costab.textio import ParseError
from costab.towers import UNKNOWN

X0, Y0, Z0 = (IndecId(o, 0) for o in "xyz")


def test_standard_structure(kA2):
    P = from_coheart(kA2, {X0, Y0})
    assert check_cotstructure(kA2, P).ok
    assert P.derived_coheart() == {X0, Y0}
    # z@0 is filtered by y@0 and x@1, so it lies in neither half
    assert Z0 not in P.A and Z0 not in P.B
    assert Z0.suspend(-1) in P.A and Z0.suspend(1) in P.B
    assert X0.suspend(1) in P.B


def test_broken_structure_reports_witness(kA2):
    P = from_coheart(kA2, {X0, Y0})
    bad = CoTStructure(P.A | {Y0.suspend(1)}, P.B)
    rep = check_cotstructure(kA2, bad)
    assert rep.status_of("ii") == "fail"
    assert "hom(" in rep.failed[0].detail


def test_aisle_not_closed(kA2):
    rep = check_cotstructure(kA2, CoTStructure(frozenset({X0}), frozenset()))
    assert rep.status_of("i") == "fail"


def test_trivial_structures_are_unbounded(kA2):
    for side in "AB":
        rep = check_cotstructure(kA2, trivial(kA2, side))
        assert rep.status_of("i") == "pass" and rep.status_of("ii") == "pass"
        assert rep.status_of("bounded") == "fail"


def test_membership_outside_window(kA2):
    P = from_coheart(kA2, {X0, Y0})
    far = IndecId("x", 7)
    assert member(kA2, P, far, "B") is True and member(kA2, P, far, "A") is False
    assert member(kA2, P, IndecId("z", -9), "A") is True
    assert member(kA2, CoTStructure(P.A, P.B), far, "A") is UNKNOWN


def test_silting_predicates(kA2):
    assert is_presilting(kA2, {X0, Y0})
    assert not is_presilting(kA2, {X0, Y0.suspend(-1)})
    assert generates(kA2, {X0, Y0})
    assert not generates(kA2, {X0})


def test_enumeration_kA2_small_window(kA2):
    from costab.snapshot import build_snapshot

    s = build_snapshot("kA2", 2, (-1, 1))
    en = enumerate_cohearts(s)
    assert en.complete
    found = [P.coheart for P in en.structures]
    assert {X0, Y0} in found and {Y0, Z0} in found and {Z0, X0.suspend(1)} in found
    for C in found:
        assert len(C) == 2 and is_presilting(s, C) and generates(s, C)


def test_enumeration_dual(dual_hearts):
    assert [sorted(P.coheart) for P in dual_hearts] == [[IndecId("c", k)] for k in range(-2, 3)]


def test_heart_filtration_and_split_class(kA2):
    P = from_coheart(kA2, {X0, Y0})
    T = heart_filtration(kA2, P, FormalObject([Z0]))
    assert T.tags == [0, 1]
    vec, image = split_k0_class(kA2, P, FormalObject([Z0, Z0.suspend(1)]), random.Random(3))
    assert vec == {(Y0, 0): 1, (X0, 1): 1, (Y0, 1): 1, (X0, 2): 1}
    assert image == (0, 0)


def test_file_round_trip(kA2):
    P = from_coheart(kA2, {X0, Y0})
    f = parse_cotstructure(cotstructure_text(P))
    Q, rep = resolve_cotstructure(kA2, f)
    assert rep.ok and Q.A == P.A and Q.B == P.B
    g = parse_cotstructure("[meta]\nschema = costab-cotstructure/1\n[structure]\n"
                           "A = x@0 y@0\ncoheart = x@0 y@0\n")
    _, rep = resolve_cotstructure(kA2, g)
    assert rep.status_of("A") == "fail"
    with pytest.raises(ParseError):
        parse_cotstructure("[meta]\nschema = other\n[structure]\nA = x@0\n")
    with pytest.raises(ParseError):
        parse_cotstructure("[meta]\nschema = costab-cotstructure/1\n[structure]\nA = x@\n")


def test_from_aisle_matches_coheart(kA2):
    P = from_coheart(kA2, {X0, Y0})
    assert from_aisle(kA2, P.A).B == P.B
