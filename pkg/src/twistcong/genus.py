"""Genus and related invariants of the modular curve X(H).

Let S = <H, -I> intersect SL2(Z/NZ).  The curve is the quotient of the
upper half plane (plus cusps) by the preimage of S in SL2(Z), so its
invariants come from the right-coset action of SL2(Z/NZ) on S\\SL2(Z/NZ):
index = number of cosets, nu2/nu3 = cosets fixed by the standard elliptic
elements, cusps = orbits of the translation [[1,1],[0,1]], and

    genus = 1 + index/12 - nu2/4 - nu3/3 - cusps/2.

Everything is geometric (over the algebraic closure); the precondition
det(H) = (Z/NZ)^x keeps X(H) irreducible so the formula applies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .gl2 import Subgroup, sl2_order
from .zmod import Mat2


class DetNotSurjective(Exception):
    pass


@dataclass(frozen=True)
class CurveInvariants:
    psl2_index: int
    nu2: int
    nu3: int
    cusps: int
    genus: int


def _mul_entries(x, y, n):
    return ((x[0] * y[0] + x[1] * y[2]) % n, (x[0] * y[1] + x[1] * y[3]) % n,
            (x[2] * y[0] + x[3] * y[2]) % n, (x[2] * y[1] + x[3] * y[3]) % n)


def _pack4(e, n):
    return ((e[0] * n + e[1]) * n + e[2]) * n + e[3]


def curve_invariants(h: Subgroup) -> CurveInvariants:
    """Invariants of X(H) for H with surjective determinant.

    -I is adjoined silently (the curve does not see it).  Levels 1 and 2
    go through the same coset computation; they give genus 0.
    """
    n = h.level
    if n == 1:
        return CurveInvariants(1, 1, 1, 1, 0)
    units = {u for u in range(n) if gcd(u, n) == 1}
    if set(h.det_image()) != units:
        raise DetNotSurjective(f"det image {sorted(h.det_image())} != units mod {n}")

    s_keys = {k for k in h.elements if Mat2.unpack(n, k).det() == 1}
    minus_key = _pack4((n - 1, 0, 0, n - 1), n)
    if minus_key not in h.elements:
        s_keys |= {_mul_packed_key(minus_key, k, n) for k in s_keys}
    s_entries = [_unpack4(k, n) for k in s_keys]

    # BFS over right cosets of S in SL2(Z/NZ); T and the inversion generate
    gen_t = (1, 1, 0, 1)
    gen_s = (0, n - 1, 1, 0)
    gen_u = (0, n - 1, 1, n - 1)  # order 3 in PSL2
    ident = (1, 0, 0, 1)
    coset_of = {}
    reps = []

    def label(e):
        cid = len(reps)
        reps.append(e)
        for s in s_entries:
            coset_of[_pack4(_mul_entries(s, e, n), n)] = cid
        return cid

    label(ident)
    frontier = [ident]
    while frontier:
        new = []
        for e in frontier:
            for g in (gen_t, gen_s):
                y = _mul_entries(e, g, n)
                if _pack4(y, n) not in coset_of:
                    label(y)
                    new.append(y)
        frontier = new
    d = len(reps)
    assert d * len(s_entries) == sl2_order(n)

    def perm(g):
        return [coset_of[_pack4(_mul_entries(reps[i], g, n), n)] for i in range(d)]

    nu2 = sum(1 for i, j in enumerate(perm(gen_s)) if i == j)
    nu3 = sum(1 for i, j in enumerate(perm(gen_u)) if i == j)
    pt = perm(gen_t)
    seen = [False] * d
    cusps = 0
    for i in range(d):
        if not seen[i]:
            cusps += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = pt[j]
    genus = Fraction(1) + Fraction(d, 12) - Fraction(nu2, 4) - Fraction(nu3, 3) - Fraction(cusps, 2)
    assert genus.denominator == 1 and genus >= 0, (d, nu2, nu3, cusps)
    return CurveInvariants(d, nu2, nu3, cusps, int(genus))


def _unpack4(k, n):
    d = k % n
    k //= n
    c = k % n
    k //= n
    b = k % n
    return (k // n, b, c, d)


def _mul_packed_key(x, y, n):
    return _pack4(_mul_entries(_unpack4(x, n), _unpack4(y, n), n), n)
