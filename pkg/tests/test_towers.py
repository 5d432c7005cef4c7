import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from costab.cotstruct import heart_tag
from costab.snapshot import FormalObject, IndecId
from costab.towers import (SwapRefused, coalesce, find_tower, refine, reorder, split_tower, swap_adjacent,
                           tower_lines, truncate)

X0, Y0, Z0 = (IndecId(o, 0) for o in "xyz")


def test_tower_of_cone(kA2):
    T = find_tower(kA2, FormalObject([Z0]), heart_tag({X0, Y0}))
    assert [str(f) for f, _ in T.factors()] == ["y@0", "x@1"]
    assert T.tags == [0, 1]
    assert T.validate()
    assert T.k0_sum() == kA2.k0_class(Z0)
    assert tower_lines(T)


def test_no_tower_without_enough_factors(kA2):
    # only shifts of x are allowed factors; z has a y component in K0
    assert find_tower(kA2, FormalObject([Z0]), heart_tag({X0})) is None


def test_swap_refused_when_gluing_is_essential(kA2):
    T = find_tower(kA2, FormalObject([Z0]), heart_tag({X0, Y0}))
    with pytest.raises(SwapRefused) as exc:
        swap_adjacent(T, 0)
    assert exc.value.dim == 1


def test_legal_swap_and_coalesce(kA2):
    T = split_tower(kA2, [(FormalObject([X0]), 0), (FormalObject([Y0]), 1)])
    S = swap_adjacent(T, 0)
    assert [str(f) for f, _ in S.factors()] == ["y@0", "x@0"]
    assert S.tags == [1, 0]
    assert S.swaps == [("x@0", "y@0", 0)]
    assert S.validate()
    C = coalesce(T, 0, tag=0)
    assert len(C) == 1 and C.sizes == [2] and C.validate()
    R = refine(C)
    assert R.sizes == [1, 1] and R.validate()


def test_reorder_by_key(kA2):
    T = split_tower(kA2, [(FormalObject([X0]), 2), (FormalObject([Y0]), 1), (FormalObject([Z0.suspend(3)]), 0)])
    R = reorder(T, lambda j, t: t.tags[j])
    assert R.tags == [0, 1, 2]
    assert R.validate()
    assert R.total_object() == T.total_object()


def test_truncate(kA2):
    T = find_tower(kA2, FormalObject([Z0]), heart_tag({X0, Y0}))
    cof = truncate(T, 1)
    assert kA2.identify(cof.sub) == FormalObject([Y0])
    assert kA2.identify(cof.quotient) == FormalObject([X0.suspend(1)])
    with pytest.raises(IndexError):
        truncate(T, 5)


objects = st.lists(st.builds(IndecId, st.sampled_from("xyz"), st.integers(-1, 2)), min_size=1, max_size=2)


@given(objects, st.sampled_from([(X0, Y0), (Y0, Z0), (Z0, X0.suspend(1)), (X0, Y0.suspend(1))]),
       st.integers(0, 3))
@settings(max_examples=40, deadline=None)
def test_towers_are_valid_and_additive(kA2, pieces, heart, seed):
    t = FormalObject(pieces)
    T = find_tower(kA2, t, heart_tag(set(heart)), rng=random.Random(seed))
    assert T is not None
    assert T.validate()
    assert all(a < b for a, b in zip(T.tags, T.tags[1:]))
    assert T.k0_sum() == kA2.k0_class(t)
