"""Registry of explicit modular-curve models: defining polynomials, j-maps,
twist functions, cover maps.  Evaluation is exact; values at base points of
the map chain (including points at infinity) are resolved by Laurent
expansion along the curve branch.

Model data lives in data/models/*.model, one record per file, in a small
line grammar (see README): integer/rational coefficients, explicit `*`,
`^` powers.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import gcd, isqrt

import sympy

from .ecq import squarefree_part_fraction
from .rfunc import (LaurentSeries, PrecisionLoss, RationalFunctionQ,
                    eval_terms, newton_branch, parse_polynomial, poly_terms)


class UnknownModel(Exception):
    pass


class NotOnModel(Exception):
    pass


class IndeterminateMap(Exception):
    pass


class ZeroTwist(Exception):
    pass


class Infinity:
    """Marker for j = infinity (a cusp)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "infinity"


INFINITY = Infinity()


@dataclass(frozen=True)
class Point:
    """A point of a model: affine coordinates, a projective triple, or a
    tagged point at infinity ('+', '-' for the two hyperelliptic branches,
    'O' for the Weierstrass origin, 'inf' on P1)."""

    coords: tuple = ()
    at_infinity: str | None = None

    @classmethod
    def affine(cls, *coords):
        return cls(tuple(Fraction(c) for c in coords), None)

    @classmethod
    def projective(cls, *coords):
        return cls(tuple(Fraction(c) for c in coords), None)

    @classmethod
    def infinity(cls, tag="inf"):
        return cls((), tag)

    def height(self):
        return max((max(abs(c.numerator), c.denominator) for c in self.coords),
                   default=0)

    def __repr__(self):
        if self.at_infinity:
            return {"+": "+inf", "-": "-inf"}.get(self.at_infinity, self.at_infinity)
        return "(" + " : ".join(str(c) for c in self.coords) + ")"


@dataclass
class ModelRecord:
    id: str
    kind: str                      # p1 | weierstrass | hyperelliptic | space | quartic
    variables: tuple[str, ...]
    provenance: str
    defining: list                 # [(sympy expr, term list)]
    maps: list                     # [(name, RationalFunctionQ over ambient+earlier)]
    j_map: RationalFunctionQ | None
    twist_map: RationalFunctionQ | None
    covers: dict[str, tuple[str, ...]]
    identities: list[str]
    lmfdb: str | None = None
    _sym: dict = field(default_factory=dict, repr=False)

    def chain_names(self):
        return list(self.variables) + [name for name, _ in self.maps]


def _data_root():
    override = os.environ.get("TWISTCONG_DATA")
    if override:
        return override
    return None


def _read_data_text(relpath):
    root = _data_root()
    if root:
        with open(os.path.join(root, relpath)) as fh:
            return fh.read()
    return resources.files("twistcong").joinpath("data", relpath).read_text()


def _iter_model_sources():
    root = _data_root()
    if root:
        d = os.path.join(root, "models")
        for name in sorted(os.listdir(d)):
            if name.endswith(".model"):
                yield open(os.path.join(d, name)).read()
        return
    d = resources.files("twistcong").joinpath("data", "models")
    for entry in sorted(d.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".model"):
            yield entry.read_text()


def _parse_model(text: str) -> ModelRecord:
    fields = {"define": [], "map": [], "cover": {}, "identity": []}
    simple = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key in ("id", "kind", "provenance", "lmfdb", "jmap", "twist"):
            simple[key] = rest
        elif key == "vars":
            simple["vars"] = tuple(rest.split())
        elif key == "define":
            fields["define"].append(rest)
        elif key == "map":
            name, _, expr = rest.partition(" ")
            fields["map"].append((name, expr.strip()))
        elif key == "cover":
            parts = rest.split()
            fields["cover"][parts[0]] = tuple(parts[1:])
        elif key == "identity":
            fields["identity"].append(rest)
        else:
            raise ValueError(f"unknown model line {raw!r}")
    ambient = simple["vars"]
    syms = {v: sympy.Symbol(v) for v in ambient}
    ordered = [syms[v] for v in ambient]
    defining = []
    for d in fields["define"]:
        expr = parse_polynomial(d, syms)
        defining.append((expr, tuple(poly_terms(expr, ordered))))
    maps = []
    known = list(ambient)
    for name, expr in fields["map"]:
        rf = RationalFunctionQ.parse(expr, tuple(known))
        maps.append((name, rf))
        known.append(name)
        syms[name] = sympy.Symbol(name)
    j_map = RationalFunctionQ.parse(simple["jmap"], tuple(known)) if "jmap" in simple else None
    twist = RationalFunctionQ.parse(simple["twist"], tuple(known)) if "twist" in simple else None
    return ModelRecord(
        id=simple["id"], kind=simple["kind"], variables=ambient,
        provenance=simple.get("provenance", ""), defining=defining,
        maps=maps, j_map=j_map, twist_map=twist, covers=fields["cover"],
        identities=fields["identity"], lmfdb=simple.get("lmfdb"),
    )


@lru_cache(maxsize=1)
def _registry():
    out = {}
    for text in _iter_model_sources():
        rec = _parse_model(text)
        out[rec.id] = rec
    return out


def registry_ids():
    return sorted(_registry())


def registry_get(model_id: str) -> ModelRecord:
    try:
        return _registry()[model_id]
    except KeyError:
        raise UnknownModel(model_id) from None


# ---------------------------------------------------------------------------
# Point membership and evaluation


def on_model(rec: ModelRecord, pt: Point) -> bool:
    if pt.at_infinity is not None:
        if rec.kind == "p1":
            return pt.at_infinity == "inf"
        if rec.kind == "hyperelliptic":
            return pt.at_infinity in "+-"
        if rec.kind == "weierstrass":
            return pt.at_infinity == "O"
        return False
    if rec.kind == "quartic":
        if len(pt.coords) != 3 or all(c == 0 for c in pt.coords):
            return False
        return all(eval_terms(t, pt.coords) == 0 for _, t in rec.defining)
    if len(pt.coords) != len(rec.variables):
        return False
    if rec.kind == "p1":
        return True
    return all(eval_terms(t, pt.coords) == 0 for _, t in rec.defining)


def _require_on_model(rec, pt):
    if not on_model(rec, pt):
        raise NotOnModel(f"{pt!r} does not satisfy {rec.id}")


def _weierstrass_ainvs(rec):
    """(a1,...,a6) from a defining polynomial y^2+a1xy+a3y-x^3-a2x^2-a4x-a6."""
    x, y = sympy.symbols(" ".join(rec.variables))
    expr = rec.defining[0][0]
    p = sympy.Poly(expr, y)
    if p.degree() != 2:
        raise IndeterminateMap("not a Weierstrass model")
    c2, c1, c0 = (p.coeff_monomial(y ** k) for k in (2, 1, 0))
    sign = 1 if c2 == 1 else -1
    c1, c0 = sign * c1, sign * c0
    a1 = sympy.Poly(c1, x).coeff_monomial(x)
    a3 = sympy.Poly(c1, x).coeff_monomial(1)
    cub = sympy.Poly(-c0, x)
    a2, a4, a6 = (cub.coeff_monomial(x ** k) for k in (2, 1, 0))
    assert cub.coeff_monomial(x ** 3) == 1
    return tuple(Fraction(int(v)) for v in (a1, a2, a3, a4, a6))


def _series_env(rec: ModelRecord, pt: Point, prec: int):
    """Series values of the ambient variables along the branch through pt."""
    s = LaurentSeries.parameter(prec)
    if rec.kind == "p1":
        if pt.at_infinity:
            return [LaurentSeries(-1, [Fraction(1)], prec - 1)]
        return [LaurentSeries.constant(pt.coords[0], prec) + s]
    if rec.kind == "hyperelliptic" and pt.at_infinity in ("+", "-"):
        # y^2 + y = f(x), monic sextic: x = 1/s, y = eta/s^3 with
        # eta^2 + s^3 eta = s^6 f(1/s), eta(0) = +-1
        fx = _hyper_sextic(rec)
        F = [Fraction(0)] * 7
        for k, c in fx.items():
            F[6 - k] = c
        sign = 1 if pt.at_infinity == "+" else -1
        eta = LaurentSeries.constant(Fraction(sign), 1)
        cur = 1
        while cur < prec:
            cur = min(2 * cur, prec)
            eta = LaurentSeries(eta.val, eta.coeffs, cur)
            sc = LaurentSeries(1, [Fraction(1)], cur)
            fs = LaurentSeries(cur, [], cur)
            for k, c in enumerate(F):
                if c:
                    fs = fs + LaurentSeries(k, [c], cur)
            gval = eta * eta + sc ** 3 * eta - fs
            if gval.is_zero():
                continue
            eta = eta - gval / (2 * eta + sc ** 3)
        x = LaurentSeries(-1, [Fraction(1)], prec - 1)
        y = LaurentSeries(eta.val - 3, eta.coeffs, eta.prec - 3)
        return [x, y]
    if rec.kind == "weierstrass" and pt.at_infinity == "O":
        a1, a2, a3, a4, a6 = _weierstrass_ainvs(rec)
        z = LaurentSeries.parameter(prec)
        w = z ** 3
        for _ in range(prec + 2):
            w = (z ** 3 + a1 * z * w + a2 * z ** 2 * w + a3 * w * w
                 + a4 * z * w * w + a6 * w ** 3)
        return [z / w, LaurentSeries.constant(Fraction(-1), prec) / w]
    if pt.at_infinity is not None:
        raise IndeterminateMap(f"no branch expansion at {pt!r} on kind {rec.kind}")
    if rec.kind in ("weierstrass", "hyperelliptic"):
        expr, terms = rec.defining[0]
        xs, ys = (sympy.Symbol(v) for v in rec.variables)
        x0, y0 = pt.coords
        gx = poly_terms(sympy.diff(expr, xs), [xs, ys])
        gy = poly_terms(sympy.diff(expr, ys), [xs, ys])
        if eval_terms(gy, pt.coords) != 0:
            x = LaurentSeries.constant(x0, prec) + s
            y = newton_branch(terms, gy, x, y0, prec)
            return [x, y]
        if eval_terms(gx, pt.coords) != 0:
            y = LaurentSeries.constant(y0, prec) + s
            swapped = [((ey, ex), c) for (ex, ey), c in terms]
            swapped_gx = [((ey, ex), c) for (ex, ey), c in gx]
            x = newton_branch(swapped, swapped_gx, y, x0, prec)
            return [x, y]
        raise IndeterminateMap(f"singular point {pt!r} on {rec.id}")
    raise IndeterminateMap(f"no branch expansion on kind {rec.kind}")


def _hyper_sextic(rec):
    """Coefficients {deg: coeff} of f for a model y^2 + y - f(x)."""
    x, y = sympy.symbols(" ".join(rec.variables))
    f = -(rec.defining[0][0] - y ** 2 - y)
    p = sympy.Poly(f, x)
    assert p.degree() == 6 and p.LC() == 1
    return {int(k[0]): Fraction(int(c.p), int(c.q))
            for k, c in sympy.Poly(f, x, domain="QQ").terms()}


class _NeedSeries(Exception):
    pass


def _chain_env(rec, values):
    """Evaluate all maps given ambient values (Fractions or series)."""
    env = list(values)
    exact = all(isinstance(v, Fraction) for v in values)
    for name, rf in rec.maps:
        num = eval_terms(rf.num, env)
        den = eval_terms(rf.den, env)
        if exact:
            if den == 0:
                raise _NeedSeries(name)
            env.append(num / den)
        else:
            env.append(num / den)
    return env


def _eval_rf(rec, rf, pt, kind="value"):
    """Evaluate a chained rational function at a point.

    Returns a Fraction; INFINITY for a pole when kind == 'j'; for
    kind == 'class' returns the square class of the leading coefficient
    when the valuation is even.
    """
    _require_on_model(rec, pt)
    if pt.at_infinity is None:
        try:
            env = _chain_env(rec, list(pt.coords))
            num = eval_terms(rf.num, env)
            den = eval_terms(rf.den, env)
            if den != 0:
                return num / den
            if num != 0:
                if kind == "j":
                    return INFINITY
                raise IndeterminateMap("pole of the map")
        except (_NeedSeries, ZeroDivisionError):
            pass
    prec = 48
    while prec <= 768:
        try:
            vals = _series_env(rec, pt, prec)
            env = _chain_env(rec, vals)
            num = eval_terms(rf.num, env)
            den = eval_terms(rf.den, env)
            if isinstance(num, Fraction):
                num = LaurentSeries.constant(num, prec)
            if isinstance(den, Fraction):
                den = LaurentSeries.constant(den, prec)
            if kind == "class":
                if num.is_zero() or den.is_zero():
                    raise PrecisionLoss("leading coefficient unresolved")
                v = num.val - den.val
                if v % 2:
                    raise ZeroTwist(f"twist function has odd valuation {v} at {pt!r}")
                return num.coeffs[0] / den.coeffs[0]
            from .rfunc import series_ratio_value
            value = series_ratio_value(num, den)
            if value is None:
                if kind == "j":
                    return INFINITY
                raise IndeterminateMap("pole of the map")
            return value
        except PrecisionLoss:
            prec *= 2
    raise IndeterminateMap(f"series evaluation did not resolve at {pt!r}")


def evaluate_j(model_id: str, pt: Point):
    """Exact j-invariant below a point; INFINITY marks a cusp."""
    rec = registry_get(model_id) if isinstance(model_id, str) else model_id
    if rec.j_map is None:
        raise IndeterminateMap(f"{rec.id} ships no j-map")
    return _eval_rf(rec, rec.j_map, pt, kind="j")


def evaluate_twist_class(model_id: str, pt: Point) -> int:
    """Squarefree integer class of the model's twist function at a point."""
    rec = registry_get(model_id) if isinstance(model_id, str) else model_id
    if rec.twist_map is None:
        raise IndeterminateMap(f"{rec.id} ships no twist function")
    value = _eval_rf(rec, rec.twist_map, pt, kind="class")
    if value == 0:
        raise ZeroTwist(f"twist function vanishes at {pt!r}")
    d, full = squarefree_part_fraction(value)
    if not full:
        raise IndeterminateMap(f"could not reduce twist value {value} to squarefree form")
    return d


def _symbol_rf(rec, name):
    """The chain symbol `name` as a rational function of the chain prefix."""
    idx = rec.chain_names().index(name)
    return RationalFunctionQ(tuple(rec.chain_names()[:idx + 1]),
                             ((tuple([0] * idx + [1]), Fraction(1)),),
                             (((0,) * (idx + 1), Fraction(1)),))


def evaluate_cover(model_id: str, cover: str, pt: Point):
    """Values of a named cover map (a tuple of chain symbols) at a point."""
    rec = registry_get(model_id) if isinstance(model_id, str) else model_id
    names = rec.covers[cover]
    return tuple(_eval_rf(rec, _symbol_rf(rec, nm), pt, kind="value")
                 for nm in names)


# ---------------------------------------------------------------------------
# Rational point search


def _farey(bound):
    yield Fraction(0)
    for q in range(1, bound + 1):
        for p in range(1, bound + 1):
            if gcd(p, q) == 1:
                yield Fraction(p, q)
                yield Fraction(-p, q)


def _fraction_sqrt(x: Fraction):
    if x < 0:
        return None
    rn, rd = isqrt(x.numerator), isqrt(x.denominator)
    if rn * rn == x.numerator and rd * rd == x.denominator:
        return Fraction(rn, rd)
    return None


def search_rational_points(model_id: str, height_bound: int) -> list[Point]:
    """All points with coordinates of naive height <= bound, in a
    deterministic order; includes the points at infinity of hyperelliptic
    and Weierstrass models and the line at infinity of the plane quartic."""
    rec = registry_get(model_id) if isinstance(model_id, str) else model_id
    pts = []
    if rec.kind == "p1":
        pts.append(Point.infinity())
        pts.extend(Point.affine(t) for t in _farey(height_bound))
    elif rec.kind in ("weierstrass", "hyperelliptic"):
        if rec.kind == "weierstrass":
            pts.append(Point.infinity("O"))
        else:
            pts.append(Point.infinity("+"))
            pts.append(Point.infinity("-"))
        x, y = sympy.symbols(" ".join(rec.variables))
        poly = sympy.Poly(rec.defining[0][0], y)
        # coefficients of y^k as Fraction lists in x (highest degree first)
        coeff_lists = [[Fraction(int(c.p), int(c.q))
                        for c in sympy.Poly(cc, x, domain="QQ").all_coeffs()]
                       for cc in poly.all_coeffs()]

        def horner(cs, x0):
            v = Fraction(0)
            for c in cs:
                v = v * x0 + c
            return v

        if poly.degree() == 2:
            for x0 in _farey(height_bound):
                a, b, c = (horner(cs, x0) for cs in coeff_lists)
                disc = b * b - 4 * a * c
                r = _fraction_sqrt(disc)
                if r is None:
                    continue
                for sign in ((1,) if r == 0 else (1, -1)):
                    y0 = (-b + sign * r) / (2 * a)
                    pt = Point.affine(x0, y0)
                    if pt.height() <= height_bound:
                        pts.append(pt)
        else:
            for x0 in _farey(height_bound):
                uni = sympy.Poly(rec.defining[0][0].subs(
                    x, sympy.Rational(x0.numerator, x0.denominator)), y)
                for root in uni.ground_roots():
                    y0 = Fraction(int(root.p), int(root.q))
                    pt = Point.affine(x0, y0)
                    if pt.height() <= height_bound:
                        pts.append(pt)
    elif rec.kind == "quartic":
        b = height_bound
        for xx in range(0, b + 1):
            for yy in range(-b, b + 1):
                for zz in range(-b, b + 1):
                    if (xx, yy, zz) == (0, 0, 0):
                        continue
                    if xx == 0 and (yy < 0 or (yy == 0 and zz < 0)):
                        continue
                    if gcd(gcd(abs(xx), abs(yy)), abs(zz)) != 1:
                        continue
                    pt = Point.projective(xx, yy, zz)
                    if on_model(rec, pt):
                        pts.append(pt)
    else:
        raise IndeterminateMap(f"kind {rec.kind} is not searchable")
    pts.sort(key=lambda p: (p.at_infinity is None, str(p)))
    return pts


# ---------------------------------------------------------------------------
# Identity verification in the coordinate ring of the model
#
# Maps are composed as fractions of polynomials reduced modulo the defining
# relations.  Every shipped relation is quadratic and monic in one variable
# with lower-degree remainder, so reduction keeps that variable's degree
# below 2 and composed polynomials stay small; no symbolic gcd is needed
# because only a zero test is performed at the end.


def _terms_to_dict(terms):
    return {mono: c for mono, c in terms if c}


def _dict_add(a, b):
    out = dict(a)
    for k, c in b.items():
        c2 = out.get(k, Fraction(0)) + c
        if c2:
            out[k] = c2
        else:
            out.pop(k, None)
    return out


def _dict_mul(a, b):
    out = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = tuple(x + y for x, y in zip(ka, kb))
            c = out.get(k, Fraction(0)) + ca * cb
            if c:
                out[k] = c
            else:
                out.pop(k, None)
    return out


def _dict_scale(a, c):
    return {k: v * c for k, v in a.items()} if c else {}


def _reduction_rules(rec):
    """Rules var_index -> replacement dict for var^2, from the relations."""
    nvars = len(rec.variables)
    rules = {}
    for _expr, terms in rec.defining:
        td = _terms_to_dict(terms)
        for i in range(nvars - 1, -1, -1):
            key = tuple(2 if j == i else 0 for j in range(nvars))
            if key in td and all(k[i] < 2 or k == key for k in td):
                c = td[key]
                rest = {k: -v / c for k, v in td.items() if k != key}
                rules[i] = rest
                break
        else:
            return None  # not rule-shaped (the plane quartic)
    return rules


def _reduce_dict(d, rules):
    if not rules:
        return d
    changed = True
    while changed:
        changed = False
        for i, rest in rules.items():
            for k in list(d):
                if k[i] >= 2:
                    c = d.pop(k)
                    lower = tuple(e - 2 if j == i else e for j, e in enumerate(k))
                    add = _dict_mul({lower: c}, rest)
                    d = _dict_add(d, add)
                    changed = True
                    break
            if changed:
                break
    return d


class _QuotElem:
    """num/den with entries in the reduced coordinate ring."""

    __slots__ = ("num", "den", "rules")

    def __init__(self, num, den, rules):
        self.num, self.den, self.rules = num, den, rules

    @classmethod
    def const(cls, c, nvars, rules):
        one = {(0,) * nvars: Fraction(1)}
        return cls(_dict_scale(one, Fraction(c)), one, rules)

    def _wrap(self, other):
        if isinstance(other, _QuotElem):
            return other
        nvars = len(next(iter(self.den)))
        return _QuotElem.const(Fraction(other), nvars, self.rules)

    def __add__(self, other):
        o = self._wrap(other)
        num = _dict_add(_dict_mul(self.num, o.den), _dict_mul(o.num, self.den))
        return _QuotElem(_reduce_dict(num, self.rules),
                         _reduce_dict(_dict_mul(self.den, o.den), self.rules), self.rules)

    __radd__ = __add__

    def __neg__(self):
        return _QuotElem(_dict_scale(self.num, Fraction(-1)), self.den, self.rules)

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) + (-self)

    def __mul__(self, other):
        o = self._wrap(other)
        return _QuotElem(_reduce_dict(_dict_mul(self.num, o.num), self.rules),
                         _reduce_dict(_dict_mul(self.den, o.den), self.rules), self.rules)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._wrap(other)
        return _QuotElem(_reduce_dict(_dict_mul(self.num, o.den), self.rules),
                         _reduce_dict(_dict_mul(self.den, o.num), self.rules), self.rules)

    def __rtruediv__(self, other):
        return self._wrap(other) / self

    def __pow__(self, e):
        nvars = len(next(iter(self.den)))
        out = _QuotElem.const(1, nvars, self.rules)
        base = self
        if e < 0:
            base = _QuotElem(base.den, base.num, self.rules)
            e = -e
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out


def _eval_poly_quot(terms, env, rules, nvars):
    """A polynomial term list at _QuotElem values, assembled over the
    common denominator prod den_i^(max e_i) so that additions never
    multiply denominators."""
    one = {(0,) * nvars: Fraction(1)}
    if not terms:
        return _QuotElem({}, dict(one), rules)
    maxe = [0] * len(env)
    for mono, _ in terms:
        for i, e in enumerate(mono):
            if e > maxe[i]:
                maxe[i] = e
    numpow, denpow = [], []
    for v, m in zip(env, maxe):
        nrow, drow = [dict(one)], [dict(one)]
        for _ in range(m):
            nrow.append(_reduce_dict(_dict_mul(nrow[-1], v.num), rules))
            drow.append(_reduce_dict(_dict_mul(drow[-1], v.den), rules))
        numpow.append(nrow)
        denpow.append(drow)
    total = {}
    for mono, coeff in terms:
        prod = {(0,) * nvars: coeff}
        for i, e in enumerate(mono):
            if maxe[i] == 0:
                continue
            prod = _reduce_dict(_dict_mul(prod, numpow[i][e]), rules)
            if maxe[i] - e:
                prod = _reduce_dict(_dict_mul(prod, denpow[i][maxe[i] - e]), rules)
        total = _dict_add(total, prod)
    den = dict(one)
    for i, m in enumerate(maxe):
        if m:
            den = _reduce_dict(_dict_mul(den, denpow[i][m]), rules)
    return _QuotElem(_reduce_dict(total, rules), den, rules)


def verify_model_identities(model_id: str) -> dict[str, bool]:
    """Substitute the shipped maps into each identity and check that the
    numerator vanishes in the coordinate ring (and the denominator does
    not); reports per-identity pass/fail."""
    rec = registry_get(model_id) if isinstance(model_id, str) else model_id
    results = {}
    nvars = len(rec.variables)
    rules = _reduction_rules(rec) if rec.defining else {}
    if rules is not None:
        one = {(0,) * nvars: Fraction(1)}
        env = []
        for i in range(nvars):
            mono = tuple(1 if j == i else 0 for j in range(nvars))
            env.append(_QuotElem({mono: Fraction(1)}, dict(one), rules))
        for _name, rf in rec.maps:
            num = _eval_poly_quot(rf.num, env, rules, nvars)
            den = _eval_poly_quot(rf.den, env, rules, nvars)
            env.append(num / den)
        chain = tuple(rec.chain_names())
        for ident in rec.identities:
            rf = RationalFunctionQ.parse(ident, chain)
            num = _eval_poly_quot(rf.num, env, rules, nvars)
            den = _eval_poly_quot(rf.den, env, rules, nvars)
            val = num / den
            results[ident] = (not _reduce_dict(dict(val.num), rules)
                              and bool(_reduce_dict(dict(val.den), rules)))
        return results
    # plane quartic: maps are polynomial over Z^k, identities stay small;
    # divisibility by the irreducible quartic decides ideal membership
    gens = [sympy.Symbol(v) for v in rec.variables]
    quartic = sympy.Poly(rec.defining[0][0], *gens, domain="QQ")
    subs = {}
    for name, rf in rec.maps:
        subs[sympy.Symbol(name)] = sympy.cancel(rf.as_sympy().subs(subs))
    syms = {v: sympy.Symbol(v) for v in rec.chain_names()}
    for ident in rec.identities:
        expr = parse_polynomial(ident, syms).subs(subs)
        num, den = sympy.cancel(sympy.together(expr)).as_numer_denom()
        nrem = sympy.div(sympy.Poly(sympy.expand(num), *gens, domain="QQ"), quartic)[1]
        drem = sympy.div(sympy.Poly(sympy.expand(den), *gens, domain="QQ"), quartic)[1]
        results[ident] = nrem.is_zero and not drem.is_zero
    return results
