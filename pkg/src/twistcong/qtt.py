"""Decide when a subgroup H+ of GL2(Z/NZ) gives a quadratic twist-type
N-congruence: find index-2 subgroups H and matrices g with

    g^-1 h g = h   (h in H)      g^-1 h g = -h   (h in H+ \\ H),

and classify the congruence power det(g) modulo unit squares.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from sympy import factorint

from .gl2 import Subgroup, index2_subgroups, least_nonresidue
from .zmod import LinearSystem, Mat2, kernel_of_linear_map


class LevelTooSmall(Exception):
    pass


class NotTraceZero(Exception):
    pass


class EvenLevel(Exception):
    pass


class NotAUnit(Exception):
    pass


def unit_squares(n: int) -> frozenset:
    return frozenset(u * u % n for u in range(1, n) if gcd(u, n) == 1)


def square_class(r: int, n: int) -> int:
    """Least positive unit in the coset r * (units)^2 of (Z/NZ)^x."""
    r %= n
    if gcd(r, n) != 1:
        raise NotAUnit(f"{r} is not a unit mod {n}")
    return min(r * s % n for s in unit_squares(n))


@dataclass(frozen=True)
class QttWitness:
    hplus: Subgroup
    h: Subgroup          # index 2 in hplus
    g: Mat2              # commutes with h, anticommutes with hplus \ h
    power: int           # square class of det(g)

    def holds_verbatim(self) -> bool:
        """Check the commutation/anticommutation condition over the full
        element sets (soundness check; quadratic in the group order)."""
        n = self.hplus.level
        gm = self.g
        gi = gm.inv()
        for k in self.hplus.elements:
            h = Mat2.unpack(n, k)
            want = h if k in self.h.elements else -h
            if gi * h * gm != want:
                return False
        return True


def find_qtt_witnesses(hplus: Subgroup) -> list[QttWitness]:
    """All quadratic twist-type congruence witnesses for H+.

    For each index-2 subgroup H whose character kills every element of
    trace t with 2t != 0 (taking traces in the defining condition forces
    2 Tr h = 0 off H, which prunes the subgroups to try), solve the linear
    commutation/anticommutation system for g and keep one invertible
    solution per power class.  Anticommutation with a single coset
    representative propagates to the whole coset.
    """
    n = hplus.level
    if n <= 2:
        raise LevelTooSmall("the criterion requires level N > 2")
    forced = {k for k in hplus.elements
              if (2 * Mat2.unpack(n, k).trace()) % n != 0}
    witnesses = []
    for h in index2_subgroups(hplus, containing=forced):
        rep = Mat2.unpack(n, min(hplus.elements - h.elements))
        sys = LinearSystem(n)
        for hg in h.generators:
            sys.constrain_commute(hg, sign=1)
        sys.constrain_commute(rep, sign=-1)
        by_class = {}
        for g in kernel_of_linear_map(sys):
            if not g.is_invertible():
                continue
            cls = square_class(g.det(), n)
            if cls not in by_class:
                by_class[cls] = g
        for cls in sorted(by_class):
            witnesses.append(QttWitness(hplus, h, by_class[cls], cls))
    return witnesses


def _sqrt_mod_prime_power(a, p, l):
    """A square root of a mod p^l for odd p (a must be a unit residue)."""
    a %= p ** l
    r = next(x for x in range(p) if x * x % p == a % p)
    mod = p
    while mod < p ** l:
        mod = min(mod * mod, p ** l)
        r = (r - (r * r - a) * pow(2 * r, -1, mod)) % mod
    return r % p ** l


@dataclass(frozen=True)
class Order2Class:
    kind: str            # "split" or "nonsplit"
    conjugator: Mat2     # gamma with gamma^-1 g gamma = beta * normal form
    beta: int
    xi: int              # nonresidue used by the nonsplit normal form


def classify_order2_pgl(g: Mat2) -> Order2Class:
    """Conjugacy class of an order-2 element of PGL2(Z/p^l Z), p odd.

    Trace-zero g is conjugate to beta*[[1,0],[0,-1]] when -det(g) is a
    square mod p and to beta*[[0,xi],[1,0]] otherwise.  The textbook
    conjugator needs the lower-left entry to be a unit, so degenerate
    cases are first moved by the swap matrix (c = 0, b unit) or by
    [[1,0],[1,1]] (b = c = 0 mod p).
    """
    n = g.n
    fac = factorint(n)
    if len(fac) != 1 or 2 in fac:
        raise EvenLevel(f"level {n} is not an odd prime power")
    (p, l), = fac.items()
    if g.trace() % n != 0:
        raise NotTraceZero(f"trace {g.trace()} != 0 mod {n}")
    if not g.is_invertible():
        raise NotAUnit(f"det {g.det()} not a unit mod {n}")
    xi = least_nonresidue(p)
    if g.c % p:
        sigma = Mat2.identity(n)
    elif g.b % p:
        sigma = Mat2(n, 0, 1, 1, 0)
    else:
        sigma = Mat2(n, 1, 0, 1, 1)
    gg = sigma.inv() * g * sigma
    a, c = gg.a, gg.c
    d = (-gg.det()) % n
    if pow(d % p, (p - 1) // 2, p) == 1:
        beta = _sqrt_mod_prime_power(d, p, l)
        gamma = Mat2(n, beta + a, -beta + a, c, c)
        kind = "split"
    else:
        beta = _sqrt_mod_prime_power(d * pow(xi, -1, n) % n, p, l)
        gamma = Mat2(n, a + beta, xi * beta + a, c, c)
        kind = "nonsplit"
    return Order2Class(kind, sigma * gamma, beta, xi)


def normal_form(cls: Order2Class, n: int) -> Mat2:
    """beta * g_s or beta * g_ns, the conjugation target of the class."""
    if cls.kind == "split":
        return Mat2(n, 1, 0, 0, -1).scale(cls.beta)
    return Mat2(n, 0, cls.xi, 1, 0).scale(cls.beta)
