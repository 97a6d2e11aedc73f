"""Mordell-Weil sieve for double covers w^2 = g(u, v) of rank-1 elliptic
curves, at desk scale.

Writing a candidate rational point's image as Q = a*P1 + t (P1 the shipped
Mordell-Weil generator, t torsion), each good prime p imposes: the fibre of
the cover above red_p(Q) must be nonempty, i.e. g(red_p(Q)) is zero or a
square mod p.  Admissible a mod (order of red_p(P1)) are intersected by CRT
across primes; survivors in a coefficient window [-B, B] are then compared
against the shipped known points.  Points reducing to the identity (and any
fibre where g cannot be evaluated) are admitted conservatively, so the
identity class a = 0 always survives; it is classified via the shipped
known list like any other class.

Generators and torsion are input data, validated on-curve at load time;
the shipped known points pin them further (each known (a, t) must
reproduce the recorded base point exactly).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from math import gcd, lcm

from sympy import primerange

from .ecq import BadReduction, EllipticCurveQ
from .rfunc import RationalFunctionQ, eval_terms


class DegenerateOrder(Exception):
    pass


CRT_MODULUS_CAP = 10 ** 12


# -- group law ---------------------------------------------------------------
# Points are None (identity) or (x, y); arithmetic works over Q (Fractions)
# or F_p (ints mod p) depending on `p`.


def _inv(x, p):
    if p is None:
        return 1 / x
    return pow(int(x) % p, -1, p)


def ec_neg(e: EllipticCurveQ, pt, p=None):
    if pt is None:
        return None
    x, y = pt
    r = -y - e.a1 * x - e.a3
    return (x, r % p) if p is not None else (x, r)


def ec_add_mod_p(e: EllipticCurveQ, pt1, pt2, p=None):
    """Chord-tangent sum on the long Weierstrass model; p None works over Q."""
    if p is not None and e.discriminant % p == 0:
        raise BadReduction(f"bad reduction at {p}")
    if pt1 is None:
        return pt2
    if pt2 is None:
        return pt1
    a1, a2, a3, a4, a6 = e.ainvs()
    x1, y1 = pt1
    x2, y2 = pt2
    if p is not None:
        x1, y1, x2, y2 = x1 % p, y1 % p, x2 % p, y2 % p
    if x1 == x2 and ((y1 + y2 + a1 * x2 + a3) % p == 0 if p is not None
                     else y1 + y2 + a1 * x2 + a3 == 0):
        return None
    if x1 == x2 and (y1 == y2 if p is None else (y1 - y2) % p == 0):
        num = 3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1
        den = 2 * y1 + a1 * x1 + a3
    else:
        num = y2 - y1
        den = x2 - x1
    lam = num * _inv(den, p)
    nu = y1 - lam * x1
    x3 = lam * lam + a1 * lam - a2 - x1 - x2
    y3 = -(lam + a1) * x3 - nu - a3
    if p is not None:
        return (x3 % p, y3 % p)
    return (x3, y3)


def ec_mul(e, k, pt, p=None):
    if k < 0:
        return ec_mul(e, -k, ec_neg(e, pt, p), p)
    out = None
    add = pt
    while k:
        if k & 1:
            out = ec_add_mod_p(e, out, add, p)
        add = ec_add_mod_p(e, add, add, p)
        k >>= 1
    return out


def point_on_curve(e: EllipticCurveQ, pt, p=None) -> bool:
    if pt is None:
        return True
    x, y = pt
    a1, a2, a3, a4, a6 = e.ainvs()
    lhs = y * y + a1 * x * y + a3 * y - x ** 3 - a2 * x * x - a4 * x - a6
    return lhs % p == 0 if p is not None else lhs == 0


# -- problems ----------------------------------------------------------------


@dataclass(frozen=True)
class SieveProblem:
    label: str
    curve: EllipticCurveQ
    generator: tuple
    torsion: tuple            # non-identity torsion points
    cover: RationalFunctionQ  # polynomial g(u, v); cover is w^2 = g
    known: tuple              # ((a, torsion index, base point or None), ...)
    primes: tuple
    bound: int

    def torsion_translates(self):
        return (None,) + self.torsion


@dataclass
class SieveResult:
    problem: SieveProblem
    prime_data: dict          # p -> (N_p, admissible count, total)
    skipped: list             # degenerate primes
    modulus: dict             # torsion index -> combined modulus
    survivors: dict           # torsion index -> sorted residues mod modulus
    known_in_range: list      # (a, t) survivors matching known points
    unknown_in_range: list    # (a, t) survivors without a known point

    @property
    def clean(self):
        return not self.unknown_in_range


def _problem_sources():
    root = os.environ.get("TWISTCONG_DATA")
    if root:
        d = os.path.join(root, "sieve")
        for name in sorted(os.listdir(d)):
            if name.endswith(".problem"):
                yield name[:-8], open(os.path.join(d, name)).read()
        return
    d = resources.files("twistcong").joinpath("data", "sieve")
    for entry in sorted(d.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".problem"):
            yield entry.name[:-8], entry.read_text()


def _parse_problem(label, text):
    curve = gen = None
    torsion = []
    cover = None
    known = []
    primes_below = 100
    bound = 10 ** 4
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        parts = rest.split()
        if key == "label":
            label = rest.strip()
        elif key == "curve":
            curve = EllipticCurveQ(*(int(v) for v in parts))
        elif key == "generator":
            gen = (Fraction(parts[0]), Fraction(parts[1]))
        elif key == "torsion":
            torsion.append((Fraction(parts[0]), Fraction(parts[1])))
        elif key == "cover":
            cover = rest.strip()
        elif key == "primes-below":
            primes_below = int(rest)
        elif key == "bound":
            bound = int(rest)
        elif key == "known":
            a, tidx = int(parts[0]), int(parts[1])
            base = None
            if len(parts) > 2 and parts[2] != "O":
                base = (Fraction(parts[2]), Fraction(parts[3]))
            known.append((a, tidx, base))
        else:
            raise ValueError(f"unknown problem line {raw!r}")
    cover_rf = RationalFunctionQ.parse(cover, ("u", "v"))
    if len(cover_rf.den) != 1 or cover_rf.den[0][0] != (0, 0):
        raise ValueError("cover must be polynomial in (u, v)")
    prob = SieveProblem(label, curve, gen, tuple(torsion), cover_rf,
                        tuple(known), _good_primes(curve, gen, primes_below),
                        bound)
    _validate_problem(prob)
    return prob


def _good_primes(curve, gen, below):
    out = []
    den = (gen[0].denominator * gen[1].denominator) if gen else 1
    for p in primerange(3, below):
        if curve.discriminant % p and den % p:
            out.append(p)
    return tuple(out)


def _validate_problem(prob):
    e = prob.curve
    assert point_on_curve(e, prob.generator), "generator not on curve"
    for t in prob.torsion:
        assert point_on_curve(e, t), "torsion point not on curve"
        assert ec_mul(e, 12, t) is None, "torsion point of unexpected order"
    translates = prob.torsion_translates()
    for a, tidx, base in prob.known:
        want = ec_add_mod_p(e, ec_mul(e, a, prob.generator), translates[tidx])
        assert want == base, (a, tidx, base, want)


_problems_cache = None


def problem_labels():
    global _problems_cache
    if _problems_cache is None:
        _problems_cache = {lab: _parse_problem(lab, text)
                           for lab, text in _problem_sources()}
    return sorted(_problems_cache)


def load_problem(label) -> SieveProblem:
    problem_labels()
    return _problems_cache[label]


# -- the sieve ---------------------------------------------------------------


def fiber_has_point_mod_p(cover: RationalFunctionQ, base, p: int) -> bool:
    """True iff g(base) is zero or a square mod p; the identity (base None)
    is admitted conservatively."""
    if base is None:
        return True
    val = int(eval_terms(cover.num, base)) % p
    if val == 0:
        return True
    return pow(val, (p - 1) // 2, p) == 1


def _admissible(prob, p):
    """(N_p, per-torsion boolean admissibility arrays indexed by a mod N_p)."""
    e = prob.curve
    gen = (int(prob.generator[0]) % p, int(prob.generator[1]) % p)
    if not point_on_curve(e, gen, p):
        raise BadReduction(f"generator does not reduce at {p}")
    mults = [None]
    q = gen
    while q is not None:
        mults.append(q)
        q = ec_add_mod_p(e, q, gen, p)
        if len(mults) > 4 * p + 8:
            raise RuntimeError("order computation runaway")
    npo = len(mults)  # order of red_p(P1); mults[a] = a*P1 for a in [0, npo)
    admissible = []
    for t in prob.torsion_translates():
        tred = None if t is None else (_red_frac(t[0], p), _red_frac(t[1], p))
        row = []
        for a in range(npo):
            base = ec_add_mod_p(e, mults[a], tred, p)
            row.append(fiber_has_point_mod_p(prob.cover, base, p))
        admissible.append(row)
    return npo, admissible


def _red_frac(x: Fraction, p):
    return int(x.numerator) * pow(int(x.denominator), -1, p) % p


SURVIVOR_SET_BUDGET = 2 * 10 ** 6


def run_sieve(problem: SieveProblem, primes=None, bound=None) -> SieveResult:
    """CRT-intersect the per-prime admissible coefficient classes and
    classify the surviving (a, torsion) pairs with |a| <= bound.

    Primes are applied in order of increasing generator order N_p; the
    combined modulus grows by CRT while it stays under the cap (and the
    survivor sets under a memory budget), after which further primes only
    prune within existing classes and within the coefficient window.
    """
    if primes is None:
        primes = problem.primes
    if bound is None:
        bound = problem.bound
    prime_data = {}
    skipped = []
    ntors = len(problem.torsion_translates())
    tables = []
    for p in primes:
        npo, adm = _admissible(problem, p)
        if npo == 1:
            skipped.append(p)
            continue
        prime_data[p] = (npo, sum(sum(row) for row in adm), npo * ntors)
        tables.append((npo, p, adm))
    tables.sort()
    modulus = 1
    survivors = {t: {0} for t in range(ntors)}
    window_only = []
    for npo, p, adm in tables:
        new_m = lcm(modulus, npo)
        growth = new_m // modulus
        size = max(len(s) for s in survivors.values())
        if new_m > CRT_MODULUS_CAP or size * growth > SURVIVOR_SET_BUDGET:
            # prune within existing classes, and fully inside the window later
            d = gcd(modulus, npo)
            for t in range(ntors):
                proj = {a % d for a in range(npo) if adm[t][a]}
                survivors[t] = {r for r in survivors[t] if r % d in proj}
            window_only.append((npo, adm))
            continue
        for t in range(ntors):
            ok = [adm[t][a] for a in range(npo)]
            merged = set()
            for r in survivors[t]:
                for k in range(growth):
                    cand = r + modulus * k
                    if ok[cand % npo]:
                        merged.add(cand)
            survivors[t] = merged
        modulus = new_m
    known_set = {(a, t) for a, t, _ in problem.known}
    known_in, unknown_in = [], []
    for t in range(ntors):
        for r in sorted(survivors[t]):
            a = r - modulus * ((r + bound) // modulus)
            while a <= bound:
                if -bound <= a and all(adm[t][a % npo] for npo, adm in window_only):
                    (known_in if (a, t) in known_set else unknown_in).append((a, t))
                a += modulus
    return SieveResult(problem, prime_data, skipped,
                       {t: modulus for t in range(ntors)},
                       {t: sorted(survivors[t]) for t in range(ntors)},
                       sorted(known_in), sorted(unknown_in))


def brute_force_window(problem: SieveProblem, primes=None, bound=None):
    """Directly test every |a| <= bound against every prime's fibre
    condition; the independent cross-check for run_sieve."""
    if primes is None:
        primes = problem.primes
    if bound is None:
        bound = problem.bound
    ntors = len(problem.torsion_translates())
    tables = []
    for p in primes:
        npo, adm = _admissible(problem, p)
        if npo > 1:
            tables.append((npo, adm))
    out = []
    for t in range(ntors):
        for a in range(-bound, bound + 1):
            if all(adm[t][a % npo] for npo, adm in tables):
                out.append((a, t))
    return sorted(out)
