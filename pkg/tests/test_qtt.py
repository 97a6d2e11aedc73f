import random

import pytest

from twistcong.gl2 import CartanSpec, all_gl2_entries, cartan, cartan_normalizer, closure, preimage_lift
from twistcong.qtt import (
    EvenLevel,
    LevelTooSmall,
    NotAUnit,
    NotTraceZero,
    classify_order2_pgl,
    find_qtt_witnesses,
    normal_form,
    square_class,
)
from twistcong.zmod import Mat2

from oracles import qtt_brute, random_small_subgroups


def test_square_class_examples():
    assert square_class(4, 5) == 1
    assert square_class(3, 5) == 2
    assert square_class(19, 24) == 19
    assert square_class(-1, 5) == 1
    assert square_class(-1, 3) == 2
    with pytest.raises(NotAUnit):
        square_class(10, 5)


def test_witness_nonsplit_5():
    wits = find_qtt_witnesses(cartan_normalizer(CartanSpec(5, 1, "nonsplit")))
    assert len(wits) == 1
    w = wits[0]
    assert w.h == cartan(CartanSpec(5, 1, "nonsplit"))
    assert w.power == square_class(-2, 5) == 2  # power -xi, matching (5,2)
    assert w.holds_verbatim()


def test_witness_empty_for_scalars():
    assert find_qtt_witnesses(closure([-Mat2.identity(3)])) == []


def test_witness_full_gl2_mod4():
    full = closure([Mat2(4, 1, 1, 0, 1), Mat2(4, 0, 1, 1, 0), Mat2(4, 3, 0, 0, 1)])
    assert full.order == 96
    wits = find_qtt_witnesses(full)
    assert len(wits) == 1
    w = wits[0]
    assert w.h == preimage_lift(cartan(CartanSpec(2, 1, "nonsplit")), 4)
    assert w.g.det() == 3 and w.power == 3
    assert w.holds_verbatim()


def test_level_too_small():
    with pytest.raises(LevelTooSmall):
        find_qtt_witnesses(closure([Mat2(2, 0, 1, 1, 0)]))


def test_witnesses_match_brute_force_sample():
    rng = random.Random(20240)
    sample = random_small_subgroups(rng, 12)
    for hplus in sample:
        got = {(w.h.elements, w.power) for w in find_qtt_witnesses(hplus)}
        want = qtt_brute(hplus)
        assert got == want, hplus
        for w in find_qtt_witnesses(hplus):
            assert w.holds_verbatim()


def test_classify_order2_examples():
    g = Mat2(5, 1, 0, 0, -1)
    cls = classify_order2_pgl(g)
    assert cls.kind == "split"
    g2 = Mat2(5, 0, 2, 1, 0)
    cls2 = classify_order2_pgl(g2)
    assert cls2.kind == "nonsplit"
    g3 = Mat2(5, 2, 3, 1, 3)
    assert g3.trace() == 0 and g3.det() == 3
    cls3 = classify_order2_pgl(g3)
    assert cls3.kind == "nonsplit"
    gam = cls3.conjugator
    assert gam.inv() * g3 * gam == normal_form(cls3, 5)


def test_classify_order2_brute():
    for n in (3, 5, 9):
        for row in all_gl2_entries(n):
            g = Mat2(n, *map(int, row))
            if g.trace() != 0:
                continue
            cls = classify_order2_pgl(g)
            gam = cls.conjugator
            assert gam.is_invertible()
            assert gam.inv() * g * gam == normal_form(cls, n)
            p = 3 if n in (3, 9) else 5
            is_sq = pow((-g.det()) % n % p, (p - 1) // 2, p) == 1
            assert cls.kind == ("split" if is_sq else "nonsplit")


def test_classify_order2_errors():
    with pytest.raises(NotTraceZero):
        classify_order2_pgl(Mat2(5, 1, 0, 0, 1))
    with pytest.raises(EvenLevel):
        classify_order2_pgl(Mat2(4, 1, 0, 0, 3))
    with pytest.raises(EvenLevel):
        classify_order2_pgl(Mat2(15, 1, 0, 0, 14))
