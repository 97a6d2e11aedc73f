"""Exact elliptic curve arithmetic over Q and F_p: Weierstrass invariants,
quadratic twists, naive point counting and Frobenius traces, Kronecker
symbols, trace-based congruence verification, and CM lookup.

Trace checks are necessary conditions only: N-congruent curves have
congruent traces at good primes, so a clean run is consistency evidence,
never a proof.
"""

from __future__ import annotations

import csv
import importlib.resources
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd, isqrt

from sympy import factorint, isprime, primerange


class Singular(Exception):
    pass


class BadReduction(Exception):
    pass


class PrimeTooLarge(Exception):
    pass


class LevelTooSmall(Exception):
    pass


PRIME_BOUND_DEFAULT = 10 ** 4


@dataclass(frozen=True)
class EllipticCurveQ:
    """Long Weierstrass model y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6."""

    a1: int
    a2: int
    a3: int
    a4: int
    a6: int

    def __post_init__(self):
        if self.discriminant == 0:
            raise Singular(f"discriminant vanishes for {self.ainvs()}")

    def ainvs(self):
        return (self.a1, self.a2, self.a3, self.a4, self.a6)

    @property
    def b2(self):
        return self.a1 ** 2 + 4 * self.a2

    @property
    def b4(self):
        return 2 * self.a4 + self.a1 * self.a3

    @property
    def b6(self):
        return self.a3 ** 2 + 4 * self.a6

    @property
    def b8(self):
        return (self.a1 ** 2 * self.a6 + 4 * self.a2 * self.a6
                - self.a1 * self.a3 * self.a4 + self.a2 * self.a3 ** 2
                - self.a4 ** 2)

    @property
    def c4(self):
        return self.b2 ** 2 - 24 * self.b4

    @property
    def c6(self):
        return -self.b2 ** 3 + 36 * self.b2 * self.b4 - 216 * self.b6

    @property
    def discriminant(self):
        b2, b4, b6, b8 = self.b2, self.b4, self.b6, self.b8
        return -b2 * b2 * b8 - 8 * b4 ** 3 - 27 * b6 * b6 + 9 * b2 * b4 * b6

    @property
    def j(self) -> Fraction:
        return Fraction(self.c4 ** 3, self.discriminant)


def discriminant_and_j(e: EllipticCurveQ):
    d = e.discriminant
    assert 1728 * d == e.c4 ** 3 - e.c6 ** 2
    return d, e.j


def curve_from_j(j: Fraction) -> EllipticCurveQ:
    """Some curve over Q with the given j-invariant (j != 0, 1728)."""
    j = Fraction(j)
    if j == 0:
        return EllipticCurveQ(0, 0, 0, 0, 1)
    if j == 1728:
        return EllipticCurveQ(0, 0, 0, 1, 0)
    # y^2 = x^3 + 3j(1728-j) x + 2j(1728-j)^2, cleared to integer coefficients
    a = 3 * j * (1728 - j)
    b = 2 * j * (1728 - j) ** 2
    den = (a.denominator * b.denominator)
    a4 = int(a * den ** 4)
    a6 = int(b * den ** 6)
    return EllipticCurveQ(0, 0, 0, a4, a6)


def quadratic_twist(e: EllipticCurveQ, d: int) -> EllipticCurveQ:
    """The quadratic twist E^d as y^2 = x^3 - 27 c4 d^2 x - 54 c6 d^3."""
    if d == 0:
        raise ValueError("twist by 0")
    return EllipticCurveQ(0, 0, 0, -27 * e.c4 * d * d, -54 * e.c6 * d ** 3)


def trace_of_frobenius(e: EllipticCurveQ, p: int, bound: int = PRIME_BOUND_DEFAULT) -> int:
    """a_p = p + 1 - #E(F_p) by direct enumeration.

    For odd p the count uses the completed square (2y + a1 x + a3)^2 =
    4x^3 + b2 x^2 + 2b4 x + b6 and a table of squares; p = 2 and 3
    enumerate (x, y) on the long model.
    """
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    if p > bound:
        raise PrimeTooLarge(f"prime {p} above counting bound {bound}")
    if e.discriminant % p == 0:
        raise BadReduction(f"bad reduction at {p}")
    if p <= 3:
        a1, a2, a3, a4, a6 = (a % p for a in e.ainvs())
        count = 1
        for x in range(p):
            rhs = (x ** 3 + a2 * x * x + a4 * x + a6) % p
            for y in range(p):
                if (y * y + a1 * x * y + a3 * y) % p == rhs:
                    count += 1
        return p + 1 - count
    b2, b4, b6 = e.b2 % p, (2 * e.b4) % p, e.b6 % p
    chi = bytearray(p)
    for t in range((p + 1) // 2):
        chi[t * t % p] = 1
    total = 0
    for x in range(p):
        f = (4 * x ** 3 + b2 * x * x + b4 * x + b6) % p
        if f:
            total += 1 if chi[f] else -1
    return -total


def kronecker_symbol(d: int, n: int) -> int:
    """Kronecker symbol (d|n) with the standard 2-adic and sign conventions."""
    if n == 0:
        return 1 if d in (1, -1) else 0
    if d % 2 == 0 and n % 2 == 0:
        return 0
    k = 1
    if n < 0:
        n = -n
        if d < 0:
            k = -k
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    if v % 2:
        k *= 1 if d % 8 in (1, 7) else -1
    d %= n
    while d:
        while d % 2 == 0:
            d //= 2
            if n % 8 in (3, 5):
                k = -k
        d, n = n, d
        if d % 4 == 3 and n % 4 == 3:
            k = -k
        d %= n
    return k if n == 1 else 0


def squarefree_part(n: int, limit: int = 10 ** 6):
    """(d, fully_reduced): d = n modulo rational squares, by trial division
    up to `limit` plus perfect-square extraction of the cofactor."""
    if n == 0:
        raise ValueError("0 has no square class")
    sign = -1 if n < 0 else 1
    out = 1
    full = True
    for f, exp in factorint(abs(n), limit=limit).items():
        f = int(f)
        if exp % 2 == 0:
            continue
        r = isqrt(f)
        if r * r == f:
            continue
        out *= f
        if not isprime(f):
            full = False
    return sign * out, full


def squarefree_part_fraction(x: Fraction, limit: int = 10 ** 6):
    x = Fraction(x)
    return squarefree_part(x.numerator * x.denominator, limit=limit)


# The thirteen rational CM j-invariants (class number 1), keyed by j.
CM_J_INVARIANTS = {
    Fraction(0): -3,
    Fraction(1728): -4,                      # 2^6 3^3
    Fraction(-3375): -7,                     # -3^3 5^3
    Fraction(8000): -8,                      # 2^6 5^3
    Fraction(-32768): -11,                   # -2^15
    Fraction(54000): -12,                    # 2^4 3^3 5^3
    Fraction(287496): -16,                   # 2^3 3^3 11^3
    Fraction(-884736): -19,                  # -2^15 3^3
    Fraction(-12288000): -27,                # -2^15 3 5^3
    Fraction(16581375): -28,                 # 3^3 5^3 17^3
    Fraction(-884736000): -43,               # -2^18 3^3 5^3
    Fraction(-147197952000): -67,            # -2^15 3^3 5^3 11^3
    Fraction(-262537412640768000): -163,     # -2^18 3^3 5^3 23^3 29^3
}


def cm_lookup(j) -> int | None:
    """CM discriminant for a class-number-1 CM j-invariant, else None."""
    return CM_J_INVARIANTS.get(Fraction(j))


@dataclass
class CongruenceReport:
    modulus: int
    twist: int
    primes_checked: list[int] = field(default_factory=list)
    failures: dict[int, int] = field(default_factory=dict)  # prime -> residual
    non_congruence_witnesses: dict[int, int | None] = field(default_factory=dict)

    @property
    def consistent(self):
        return not self.failures

    @property
    def first_failing_prime(self):
        return min(self.failures) if self.failures else None


def default_extra_moduli(n: int):
    return sorted(m for m in (2 * n, 3 * n, 4 * n) if n < m <= 200)


def check_twist_congruence_traces(e: EllipticCurveQ, d: int, n: int,
                                  prime_bound: int,
                                  extra_moduli=None) -> CongruenceReport:
    """Necessary trace condition for an N-congruence E ~ E^d.

    Traces obey a_l(E^d) = (d|l) a_l(E), so the congruence forces
    a_l(E) (1 - (d|l)) = 0 mod N at every good prime l coprime to N*d.
    For each extra modulus M > N the report records the smallest prime
    witnessing that the congruence is *not* an M-congruence (None if no
    witness up to the bound).
    """
    if n <= 2:
        raise LevelTooSmall("trace checks need modulus N > 2")
    if extra_moduli is None:
        extra_moduli = default_extra_moduli(n)
    rep = CongruenceReport(modulus=n, twist=d)
    residuals = {}
    for ell in primerange(2, prime_bound + 1):
        if n % ell == 0 or d % ell == 0 or e.discriminant % ell == 0:
            continue
        r = trace_of_frobenius(e, ell, bound=prime_bound) * (1 - kronecker_symbol(d, ell))
        residuals[ell] = r
        rep.primes_checked.append(ell)
        if r % n:
            rep.failures[ell] = r % n
    for m in extra_moduli:
        if m <= n:
            continue
        witness = next((ell for ell in rep.primes_checked if residuals[ell] % m), None)
        rep.non_congruence_witnesses[m] = witness
    return rep


# ---------------------------------------------------------------------------
# Labeled curves shipped as data


@dataclass(frozen=True)
class CurveRecord:
    label: str
    curve: EllipticCurveQ
    twist: int               # resolved twist value ('disc' resolved to Delta)
    twist_spec: str          # 'disc' or the literal integer string
    modulus: int
    power: str
    fail_modulus: int | None
    fail_prime: int | None


def load_curves() -> dict[str, CurveRecord]:
    """Curve verification targets from data/curves.tsv, keyed by label."""
    out = {}
    path = importlib.resources.files("twistcong").joinpath("data/curves.tsv")
    with path.open() as fh:
        for row in csv.DictReader(fh, delimiter="\t"):
            if not row["label"] or row["label"].startswith("#"):
                continue
            e = EllipticCurveQ(*(int(row[k]) for k in ("a1", "a2", "a3", "a4", "a6")))
            spec = row["twist"]
            d = e.discriminant if spec == "disc" else int(spec)
            out[row["label"]] = CurveRecord(
                label=row["label"], curve=e, twist=d, twist_spec=spec,
                modulus=int(row["modulus"]), power=row["power"],
                fail_modulus=int(row["fail_modulus"]) if row["fail_modulus"] else None,
                fail_prime=int(row["fail_prime"]) if row["fail_prime"] else None,
            )
    return out
