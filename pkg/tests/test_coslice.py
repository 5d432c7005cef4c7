import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from costab.conditions import random_condition, counterexample_data
from costab.coslice import (CoSlicing, Interval, base_phase, check_axioms, check_condition_S, coslicing_text,
                            epsilon0, induced_cotstructure, interval_membership, load_coslicing, metric,
                            orthogonality_identity, parse_coslicing, phase_eq, phase_lt, phase_tag,
                            save_coslicing)
from costab.cotstruct import from_coheart
from costab.snapshot import FormalObject, IndecId
from costab.textio import ParseError
from costab.towers import find_tower

X0, Y0, Z0 = (IndecId(o, 0) for o in "xyz")
GOOD = CoSlicing.from_slices({Fraction(1, 4): [Y0], Fraction(3, 4): [X0]})


@given(st.floats(-20, 20, allow_nan=False))
def test_base_phase(phi):
    p, k = base_phase(phi)
    assert phase_lt(0, p) and not phase_lt(1, p)
    assert phase_eq(p + k, phi)


@given(st.fractions(-5, 5, max_denominator=12))
def test_base_phase_exact(phi):
    p, k = base_phase(phi)
    assert p + k == phi and 0 < p <= 1


def test_interval_semantics():
    I = Interval.parse("(0,1/2]")
    assert str(I) == "(0,1/2]"
    assert I.contains(Fraction(1, 2)) and not I.contains(0)
    assert I.above(0.6) and I.below(0)
    assert Interval.parse("[-inf,1)").contains(-100)
    with pytest.raises(ParseError):
        Interval.parse("0,1")


def test_from_slices_normalizes():
    Q = CoSlicing.from_slices({1.25: ["x@0"], -0.5: [Y0]})
    assert Q.phase_of(X0) == pytest.approx(1.25)
    assert Q.phase_of(IndecId("x", 3)) == pytest.approx(4.25)
    assert Q.phase_of(Y0) == pytest.approx(-0.5)
    assert Q.phase_of(Z0) is None
    assert Q.slice_ids(0.25) == [IndecId("x", -1)]
    with pytest.raises(ValueError):
        CoSlicing.from_slices({0.5: [X0], 0.7: [IndecId("x", 1)]})
    # float phases within tolerance share a slice
    R = CoSlicing.from_slices([(0.5, [X0]), (0.5 + 1e-12, [Y0])])
    assert len(R.phases) == 1


@given(st.floats(-3, 3), st.floats(-3, 3), st.integers(-3, 3))
@settings(max_examples=50)
def test_translate_and_suspend(a, b, k):
    assert GOOD.translate(a).translate(b).same_as(GOOD.translate(a + b))
    T = GOOD.translate(a)
    assert phase_eq(T.phase_of(X0), GOOD.phase_of(X0) - a)
    S = GOOD.suspend(k)
    assert S.phase_of(X0.suspend(k)) == GOOD.phase_of(X0)


def test_axioms(kA2):
    assert check_axioms(kA2, GOOD).ok
    bad = CoSlicing.from_slices({0.5: [X0], 0.6: [Y0]})
    rep = check_axioms(kA2, bad)
    assert rep.status_of("ii") == "fail" and "hom(x@0,y@0)" in rep.failed[0].detail
    # with x alone, y@0 has no phase-ascending tower
    assert check_axioms(kA2, CoSlicing.from_slices({0.5: [X0]})).status_of("iii") == "fail"


def test_condition_S(kA2):
    _, C, _ = counterexample_data(0.1, kA2)
    S = check_condition_S(kA2, C.Q)
    assert not S and S.witness == (X0, Y0, 1)
    assert check_condition_S(kA2, GOOD)


def test_interval_membership(kA2):
    _, C, _ = counterexample_data(0.1, kA2)
    Q = C.Q
    assert interval_membership(kA2, Q, Z0, Interval(0.5, 1.5, True, True)).member
    assert not interval_membership(kA2, Q, Z0, Interval(0.5, 0.5, True, True)).member
    m = interval_membership(kA2, Q, FormalObject([X0, Y0]), Interval(0.25, 0.75))
    assert m.member and m.method == "hull"


def test_epsilon0():
    assert epsilon0(GOOD) == pytest.approx(0.25, abs=1e-6) and epsilon0(GOOD) < 0.25
    single = CoSlicing.from_slices({0.5: [X0, Y0]})
    assert epsilon0(single) == pytest.approx(0.5, abs=1e-6) and epsilon0(single) < 0.5
    with pytest.raises(ValueError):
        epsilon0(CoSlicing(()))


def _oracle_distance(snap, Q, R):
    """max over slice ids q of Q of the spread of R-phases in the R-tower of q, both ways."""
    out = 0.0
    for A, B in ((Q, R), (R, Q)):
        tag = phase_tag(B)
        for q in A.base_ids():
            T = find_tower(snap, FormalObject([q]), tag)
            phi = float(A.phase_of(q))
            out = max(out, max(abs(float(t) - phi) for t in T.tags))
    return out


def test_metric_matches_tower_oracle(kA2, dual, kA2_hearts, dual_hearts):
    for snap, hearts in ((kA2, kA2_hearts), (dual, dual_hearts)):
        rng = random.Random(21)
        for _ in range(25):
            Q = random_condition(snap, rng, hearts)[2].Q
            R = random_condition(snap, rng, hearts)[2].Q.translate(rng.uniform(-1, 1))
            assert float(metric(snap, Q, R)) == pytest.approx(_oracle_distance(snap, Q, R), abs=1e-12)


@given(st.floats(-2.5, 2.5))
@settings(max_examples=30, deadline=None)
def test_metric_of_translation(kA2, a):
    assert float(metric(kA2, GOOD, GOOD.translate(a))) == pytest.approx(abs(a), abs=1e-12)


def test_metric_of_suspension(kA2):
    D = metric(kA2, GOOD, GOOD.suspend(1))
    assert D.value == pytest.approx(1.0) and D.method == "perp"
    assert metric(kA2, GOOD, GOOD.translate(0.1)).method == "per-id"


def test_orthogonality(kA2):
    _, C, _ = counterexample_data(0.1, kA2)
    for a, b, closed in ((0, 1, False), (0.5, 1.5, True), (-0.25, 2, False), (0.5, 0.5, True)):
        rep = orthogonality_identity(kA2, C.Q, a, b, closed)
        assert rep.status_of("identity") == "pass", rep.render()


def test_induced_cotstructure(kA2):
    P = induced_cotstructure(kA2, GOOD)
    Q = from_coheart(kA2, {X0, Y0})
    assert (P.A, P.B, P.coheart) == (Q.A, Q.B, Q.coheart)


def test_file_round_trip(tmp_path):
    for Q in (GOOD, CoSlicing.from_slices({0.3: [X0], 1.7: [Y0]})):
        p = tmp_path / "q.coslicing"
        save_coslicing(Q, p)
        assert load_coslicing(p).same_as(Q)
    assert parse_coslicing(coslicing_text(GOOD)).entries == GOOD.entries


@pytest.mark.parametrize("text", [
    "[meta]\nschema = costab-coslicing/1\n[slices]\n1.5.2 = x@0\n",
    "[meta]\nschema = costab-coslicing/2\n[slices]\n1/2 = x@0\n",
    "[meta]\nschema = costab-coslicing/1\n[slices]\n1/2 = x@0\n3/4 = x@1\n",
    "[slices]\n1/2 = x@0\n",
])
def test_parse_errors(text):
    with pytest.raises((ParseError, ValueError)):
        parse_coslicing(text)


def test_phase_tolerance():
    assert phase_eq(0.5, 0.5 + 1e-10) and not phase_eq(0.5, 0.5 + 1e-6)
    assert phase_lt(0.5, 0.5 + 1e-6) and not phase_lt(0.5, 0.5 + 1e-10)
    assert math.isclose(float(GOOD.phase_of(Y0)), 0.25)
