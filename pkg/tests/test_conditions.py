import cmath
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from costab.conditions import (CentralCharge, CoStabilityCondition, CoStabilityFunction, DeformRefused,
                               GElement, PackRefused, PhaseUndefined, act, act_g, act_shift, chart_sample,
                               charge_text, check_condition, check_split_HN, condition_from_coheart,
                               condition_text, counterexample_scan, deform, dual_condition,
                               dual_coordinates, good_kA2_data, hn_decompose, inequality_witness,
                               is_semistable, load_condition, pack, parse_charge, parse_condition,
                               perturb, phase_and_mass, save_condition, counterexample_data, unpack)
from costab.coslice import CoSlicing, check_condition_S, epsilon0, metric
from costab.cotstruct import from_coheart
from costab.snapshot import FormalObject, IndecId
from costab.textio import ParseError

X0, Y0, Z0 = (IndecId(o, 0) for o in "xyz")


def e(phi):
    return cmath.exp(1j * math.pi * phi)


def test_phase_and_mass():
    assert phase_and_mass(1j) == (0.5, 1.0)
    assert phase_and_mass(-2) == (1.0, 2.0)
    for z in (0, 1, -1j, 1 - 1e-3j):
        with pytest.raises(PhaseUndefined):
            phase_and_mass(z)


def test_central_charge_is_additive(kA2):
    Z = CentralCharge.from_values(kA2, {X0: 1j, Y0: -1 + 1j})
    assert Z(kA2, Z0) == pytest.approx(-1)  # [z] = [y] - [x]
    assert Z(kA2, X0.suspend(1)) == pytest.approx(-1j)
    assert Z(kA2, FormalObject([X0, Y0])) == pytest.approx(Z(kA2, X0) + Z(kA2, Y0))
    with pytest.raises(ValueError):
        CentralCharge.from_values(kA2, {X0: 1j})
    with pytest.raises(ValueError):
        CentralCharge.from_values(kA2, {X0: 1j, X0.suspend(1): 1j})


def test_semistable_and_hn():
    Zc = CoStabilityFunction.of({X0: e(0.75), Y0: e(0.25)})
    assert is_semistable(Zc, FormalObject([X0, X0]))
    assert not is_semistable(Zc, FormalObject([X0, Y0]))
    parts = hn_decompose(Zc, FormalObject.parse("2*x@0 + y@0"))
    assert [(round(p, 6), str(o)) for p, o in parts] == [(0.25, "y@0"), (0.75, "2*x@0")]


def test_split_hn_and_pack(kA2):
    P = from_coheart(kA2, {X0, Y0})
    bad = CoStabilityFunction.of({X0: e(0.25), Y0: e(0.75)})
    assert check_split_HN(kA2, bad).status_of("i") == "fail"
    with pytest.raises(PackRefused) as exc:
        pack(kA2, P, bad)
    assert exc.value.witness == (X0, Y0, 1)
    with pytest.raises(PackRefused):
        pack(kA2, P, CoStabilityFunction.of({X0: 1j, Z0: 1j}))
    C = pack(kA2, P, CoStabilityFunction.of({X0: e(0.75), Y0: e(0.25)}))
    assert check_condition(kA2, C).ok
    assert C.Q.phase_of(X0) == pytest.approx(0.75)


def test_charge_mismatch_is_reported(kA2):
    _, C = good_kA2_data(kA2)
    wrong = CoStabilityCondition(C.Z * e(0.1), C.Q)
    rep = check_condition(kA2, wrong)
    assert rep.status_of("charge") == "fail"


def test_unpack_pack_counterexample(kA2):
    _, C, _ = counterexample_data(0.1, kA2)
    P, Zc = unpack(kA2, C)
    assert P.coheart == {X0, Y0}
    assert pack(kA2, P, Zc).Q.same_as(C.Q)


def test_deform_refusals(kA2):
    snap, C, W = counterexample_data(0.1, kA2)
    with pytest.raises(DeformRefused, match=r"\(S\)"):
        deform(snap, C, W, 0.1)
    _, G = good_kA2_data(kA2)
    with pytest.raises(DeformRefused, match="ε₀"):
        deform(kA2, G, G.Z, 0.3)
    with pytest.raises(DeformRefused, match=r"sin\(πε\)"):
        deform(kA2, G, G.Z * e(0.2), 0.1)


def test_boundary_case_is_not_strict(kA2):
    # the deformed charge sits exactly on |W - Z| = sin(πε)|Z|
    snap, C, W = counterexample_data(0.1, kA2)
    w = inequality_witness(snap, C, W, 0.1)
    assert w is not None and str(w[0]) == "y@0"
    assert w[1] == pytest.approx(w[2], rel=1e-12)


def test_deform_good(kA2):
    _, G = good_kA2_data(kA2)
    W = CentralCharge.from_values(kA2, {X0: e(0.75), Y0: e(0.35)})
    res = deform(kA2, G, W, 0.24)
    assert res.report.ok
    assert res.condition.Q.phase_of(Y0) == pytest.approx(0.35)
    assert res.distance == pytest.approx(0.1)


def test_deform_makes_legal_swaps(kA2):
    # x@0 and y@1 share a slice without Homs between them; deforming splits the slice
    C = condition_from_coheart(kA2, {X0: 1j, Y0.suspend(1): 1j})
    assert check_condition_S(kA2, C.Q)
    rng = random.Random(5)
    eps = epsilon0(C.Q) / 2
    swaps = 0
    for _ in range(10):
        res = deform(kA2, C, perturb(kA2, C, math.sin(math.pi * eps) * 0.9, rng), eps)
        swaps += res.swaps
        assert all(d == 0 for T in res.towers.values() for _, _, d in T.swaps)
    assert swaps > 0


g_elements = st.builds(GElement.from_polar, st.floats(0.2, 5), st.floats(-3, 3))


@given(g_elements, g_elements, st.integers(-3, 3))
@settings(max_examples=30, deadline=None)
def test_group_laws(g, h, k):
    _, C = good_kA2_data()
    assert act_g(act_g(C, g), h).same_as(act_g(C, g.compose(h)), 1e-9)
    assert act_g(act_g(C, g), g.inverse()).same_as(C, 1e-9)
    assert act_g(act_shift(k, C), g).same_as(act_shift(k, act_g(C, g)), 1e-9)
    assert act(k, act(-k, C)).same_as(C, 1e-9)


def test_actions_preserve_validity(kA2):
    _, C = good_kA2_data(kA2)
    for D in (act_shift(1, C), act_g(C, GElement.from_polar(2.0, 0.3)), act_g(C, GElement.from_polar(1, 1.0))):
        assert check_condition(kA2, D).ok


def test_g_element_consistency():
    with pytest.raises(ValueError):
        GElement(1j, 0.0)
    with pytest.raises(ValueError):
        GElement(0, 0.0)
    assert GElement(-1, 1.0) and GElement(-1, -1.0) and GElement(1, 2.0)


def test_shift_equals_translation_by_one(kA2):
    # Σ lowers every phase by one and negates Z
    _, C = good_kA2_data(kA2)
    assert act_shift(1, C).same_as(act_g(C, GElement(-1, 1.0)), 1e-9)
    assert not act_shift(1, C).same_as(act_g(C, GElement(-1, -1.0)), 1e-9)


def test_dual_coordinates(dual):
    C = dual_condition(dual, 2 * e(1.6), 1.6)
    z, p = dual_coordinates(dual, C)
    assert z == pytest.approx(2 * e(1.6)) and p == pytest.approx(1.6)
    assert check_condition(dual, C).ok
    with pytest.raises(ValueError):
        dual_condition(dual, 2 * e(0.6), 1.6)


def test_scan_trivial_deformation_exists(kA2):
    snap, C, _ = counterexample_data(0.1, kA2)
    sc = counterexample_scan(snap, C, C.Z)
    assert sc.exists is True and sc.found[0].Q.same_as(C.Q)


def test_scan_good_condition_agrees_with_deform(kA2):
    _, G = good_kA2_data(kA2)
    W = CentralCharge.from_values(kA2, {X0: e(0.85), Y0: e(0.25)})
    sc = counterexample_scan(kA2, G, W)
    res = deform(kA2, G, W, 0.2)
    assert sc.exists and any(c.Q.same_as(res.condition.Q) for c in sc.found)


def test_chart_sample(kA2):
    _, G = good_kA2_data(kA2)
    cs = chart_sample(kA2, G, 0.2, 5, seed=1)
    assert cs.report.ok and cs.dimension == 4
    assert cs.csv().count("\n") == 6
    with pytest.warns(UserWarning):
        chart_sample(kA2, G, 5.0, 1, seed=1)


def test_condition_files(tmp_path, kA2):
    _, G = good_kA2_data(kA2)
    p = tmp_path / "g.condition"
    save_condition(kA2, G, p)
    H = load_condition(kA2, p)
    assert H.same_as(G, 1e-12)
    assert parse_charge(kA2, charge_text(kA2, G.Z)).close_to(G.Z)
    assert parse_charge(kA2, condition_text(kA2, G)).close_to(G.Z)
    with pytest.raises(ParseError):
        parse_condition(kA2, condition_text(kA2, G).replace("P2 =", "P7 ="))


def test_trivial_algebra(trivial_snap):
    P1 = IndecId("P1", 0)
    C = condition_from_coheart(trivial_snap, {P1: e(0.4)})
    assert check_condition(trivial_snap, C).ok
    eps = epsilon0(C.Q) / 2
    res = deform(trivial_snap, C, C.Z * e(0.1), eps)
    assert res.condition.Q.phase_of(P1) == pytest.approx(0.5)
    # every condition on k is a G-translate of any other
    g = GElement(e(0.4) / e(1.3), 0.4 - 1.3)
    D = CoStabilityCondition(CentralCharge.from_values(trivial_snap, {P1: e(1.3)}),
                             CoSlicing.from_slices({1.3: [P1]}))
    assert act_g(C, g).same_as(D, 1e-9)


def test_rational_phase_snapping(kA2):
    from fractions import Fraction

    _, G = good_kA2_data(kA2)
    W = CentralCharge.from_values(kA2, {X0: e(0.75), Y0: e(0.35)})
    plain = deform(kA2, G, W, 0.24).condition.Q
    snapped = deform(kA2, G, W, 0.24, rational_denominator=20).condition.Q
    assert isinstance(snapped.phase_of(Y0), Fraction) and snapped.phase_of(Y0) == Fraction(7, 20)
    assert not isinstance(plain.phase_of(Y0), Fraction)
    assert snapped.same_as(plain)
