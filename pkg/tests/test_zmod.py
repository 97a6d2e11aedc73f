import random

import pytest

from twistcong.zmod import (
    LevelMismatch,
    LinearSystem,
    Mat2,
    NotInvertible,
    crt_pair,
    kernel_of_linear_map,
    mat_det,
    mat_inv,
)


def test_det_examples():
    assert mat_det(Mat2(4, 1, 1, 0, 1)) == 1
    assert mat_det(Mat2(4, 3, 0, 2, 1)) == 3
    assert mat_det(Mat2(5, 0, 2, 1, 0)) == 3  # -2 mod 5


def test_inv_examples():
    i4 = Mat2.identity(4)
    assert mat_inv(i4) == i4
    s = Mat2(12, 0, 1, 1, 0)
    assert mat_inv(s) == s
    u = Mat2(4, 1, 1, 0, 1)
    assert mat_inv(u) == Mat2(4, 1, 3, 0, 1)
    assert u * mat_inv(u) == Mat2.identity(4)


def test_inv_not_invertible():
    with pytest.raises(NotInvertible):
        Mat2(4, 2, 0, 0, 1).inv()


def test_level_mismatch():
    with pytest.raises(LevelMismatch):
        Mat2(4, 1, 0, 0, 1) * Mat2(5, 1, 0, 0, 1)


def test_inv_involution_and_det_multiplicative():
    rng = random.Random(1)
    for _ in range(200):
        n = rng.randrange(2, 30)
        m = Mat2(n, *(rng.randrange(n) for _ in range(4)))
        m2 = Mat2(n, *(rng.randrange(n) for _ in range(4)))
        assert mat_det(m * m2) == (mat_det(m) * mat_det(m2)) % n
        if m.is_invertible():
            assert mat_inv(mat_inv(m)) == m


def test_kernel_empty_system():
    sols = kernel_of_linear_map(LinearSystem(3))
    assert len(sols) == 81


def test_kernel_commutant_diagonal_mod3():
    sys = LinearSystem(3)
    sys.constrain_commute(Mat2(3, 1, 0, 0, 2))
    sols = kernel_of_linear_map(sys)
    assert len(sols) == 9
    assert all(m.b == 0 and m.c == 0 for m in sols)


def test_kernel_commutant_nonsplit_mod5():
    sys = LinearSystem(5)
    sys.constrain_commute(Mat2(5, 0, 2, 1, 0))
    sols = kernel_of_linear_map(sys)
    assert len(sols) == 25
    assert all(m.a == m.d and m.b == (2 * m.c) % 5 for m in sols)


def test_kernel_agrees_with_brute_force():
    rng = random.Random(7)
    for n in range(2, 9):
        for _ in range(40):
            sys = LinearSystem(n)
            for _ in range(rng.randrange(4)):
                sys.add_row(*(rng.randrange(n) for _ in range(5)))
            got = kernel_of_linear_map(sys)
            want = kernel_of_linear_map(sys, brute=True)
            assert got == want, (n, sys.rows)


def test_kernel_inhomogeneous_and_anticommute():
    # g anticommuting with -I over an odd level forces 2g = 0, so g = 0.
    sys = LinearSystem(5)
    sys.constrain_commute(-Mat2.identity(5), sign=-1)
    assert kernel_of_linear_map(sys) == [Mat2(5, 0, 0, 0, 0)]
    # an inconsistent inhomogeneous system has no solutions
    sys = LinearSystem(4)
    sys.add_row(2, 0, 0, 0, 1)
    assert kernel_of_linear_map(sys) == []


def test_kernel_crt_soundness():
    rng = random.Random(11)
    for _ in range(30):
        n1, n2 = 4, 9
        rows = [tuple(rng.randrange(36) for _ in range(5)) for _ in range(rng.randrange(1, 4))]
        sys = LinearSystem(n1 * n2, rows)
        combined = {m.entries() for m in kernel_of_linear_map(sys)}
        s1 = kernel_of_linear_map(LinearSystem(n1, rows), brute=True)
        s2 = kernel_of_linear_map(LinearSystem(n2, rows), brute=True)
        recombined = {crt_pair(a, b).entries() for a in s1 for b in s2}
        assert combined == recombined


def test_pack_unpack_roundtrip():
    rng = random.Random(3)
    for _ in range(50):
        n = rng.randrange(2, 40)
        m = Mat2(n, *(rng.randrange(n) for _ in range(4)))
        assert Mat2.unpack(n, m.pack()) == m


def test_repr_serialization():
    assert repr(Mat2(4, 1, 1, 0, 1)) == "[[1,1],[0,1]] mod 4"
