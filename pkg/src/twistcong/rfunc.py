"""Exact multivariate rational functions and Laurent series over Q.

Polynomials are parsed from a small text grammar (integer/rational
coefficients, explicit `*`, `^` or `**` powers) via sympy and compiled to
term lists [(exponent tuple, Fraction)], which evaluate over any
commutative ring: Fractions for point evaluation, LaurentSeries for
resolving values along a curve branch (points at infinity, base points of
the map chain).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import sympy
from sympy.parsing.sympy_parser import (convert_xor, parse_expr,
                                        standard_transformations)

_TRANSFORMS = standard_transformations + (convert_xor,)


class PrecisionLoss(Exception):
    """A series was indistinguishable from zero at the working precision."""


def parse_polynomial(text: str, symbols: dict[str, sympy.Symbol]) -> sympy.Expr:
    expr = parse_expr(text, local_dict=dict(symbols), transformations=_TRANSFORMS,
                      evaluate=True)
    extra = expr.free_symbols - set(symbols.values())
    if extra:
        raise ValueError(f"unknown symbols {extra} in {text!r}")
    return expr


def poly_terms(expr: sympy.Expr, symbols: list[sympy.Symbol]):
    """[(exponents, Fraction coefficient)] for a polynomial expression."""
    poly = sympy.Poly(sympy.expand(expr), *symbols, domain="QQ")
    return [(tuple(int(e) for e in mono), Fraction(int(c.p), int(c.q)))
            for mono, c in poly.terms()]


def eval_terms(terms, values):
    """Evaluate a term list at ring elements (Fractions, series, ...).

    Powers of each value are computed once and cached; term lists coming
    from big expanded polynomials reuse them heavily.
    """
    if not terms:
        return Fraction(0)
    maxe = [0] * len(values)
    for mono, _ in terms:
        for i, e in enumerate(mono):
            if e > maxe[i]:
                maxe[i] = e
    powers = []
    for v, m in zip(values, maxe):
        row = [None, v]
        for _ in range(2, m + 1):
            row.append(row[-1] * v)
        powers.append(row)
    total = None
    for mono, coeff in terms:
        term = coeff
        for i, e in enumerate(mono):
            if e:
                term = term * powers[i][e]
        total = term if total is None else total + term
    return total


@dataclass(frozen=True)
class RationalFunctionQ:
    """num/den as term lists over named variables."""

    variables: tuple[str, ...]
    num: tuple
    den: tuple

    @classmethod
    def parse(cls, text: str, variables):
        syms = {v: sympy.Symbol(v) for v in variables}
        expr = parse_polynomial(text, syms)
        num, den = sympy.together(expr).as_numer_denom()
        ordered = [syms[v] for v in variables]
        return cls(tuple(variables), tuple(poly_terms(num, ordered)),
                   tuple(poly_terms(den, ordered)))

    def __call__(self, *values):
        num = eval_terms(self.num, values)
        den = eval_terms(self.den, values)
        return num / den

    def num_den(self, *values):
        return eval_terms(self.num, values), eval_terms(self.den, values)

    def as_sympy(self):
        syms = [sympy.Symbol(v) for v in self.variables]
        def build(terms):
            return sympy.Add(*[sympy.Rational(c.numerator, c.denominator)
                               * sympy.Mul(*[s ** e for s, e in zip(syms, mono)])
                               for mono, c in terms])
        return build(self.num) / build(self.den)


class LaurentSeries:
    """Truncated Laurent series sum c_i s^(val+i) + O(s^prec), exact
    Fraction coefficients.  Leading coefficient is nonzero after
    normalisation; an all-zero series keeps val = prec and raises
    PrecisionLoss if its valuation is ever needed.
    """

    __slots__ = ("val", "coeffs", "prec")

    def __init__(self, val, coeffs, prec):
        coeffs = list(coeffs)
        while coeffs and coeffs[0] == 0:
            coeffs.pop(0)
            val += 1
        n = prec - val
        if n < 0:
            coeffs, val = [], prec
        else:
            coeffs = coeffs[:n]
        self.val = val if coeffs else prec
        self.coeffs = coeffs
        self.prec = prec

    @classmethod
    def constant(cls, c, prec):
        return cls(0, [Fraction(c)], prec)

    @classmethod
    def parameter(cls, prec):
        return cls(1, [Fraction(1)], prec)

    def is_zero(self):
        return not self.coeffs

    def __add__(self, other):
        other = _coerce(other, self.prec)
        prec = min(self.prec, other.prec)
        if self.is_zero():
            return LaurentSeries(other.val, other.coeffs, prec)
        if other.is_zero():
            return LaurentSeries(self.val, self.coeffs, prec)
        val = min(self.val, other.val)
        n = prec - val
        out = [Fraction(0)] * n
        for i, c in enumerate(self.coeffs):
            k = self.val + i - val
            if 0 <= k < n:
                out[k] += c
        for i, c in enumerate(other.coeffs):
            k = other.val + i - val
            if 0 <= k < n:
                out[k] += c
        return LaurentSeries(val, out, prec)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.val, [-c for c in self.coeffs], self.prec)

    def __sub__(self, other):
        return self + (-_coerce(other, self.prec))

    def __rsub__(self, other):
        return _coerce(other, self.prec) + (-self)

    def __mul__(self, other):
        other = _coerce(other, self.prec)
        if self.is_zero() or other.is_zero():
            prec = min(self.prec + other.val, other.prec + self.val)
            return LaurentSeries(prec, [], prec)
        val = self.val + other.val
        prec = min(self.prec + other.val, other.prec + self.val)
        n = prec - val
        out = [Fraction(0)] * n
        for i, a in enumerate(self.coeffs):
            if i >= n:
                break
            for j, b in enumerate(other.coeffs):
                if i + j >= n:
                    break
                out[i + j] += a * b
        return LaurentSeries(val, out, prec)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise PrecisionLoss("inverting a series that is 0 mod precision")
        n = self.prec - self.val
        a = self.coeffs
        inv = [Fraction(0)] * n
        inv[0] = 1 / a[0]
        for k in range(1, n):
            s = Fraction(0)
            for j in range(1, k + 1):
                if j < len(a):
                    s += a[j] * inv[k - j]
            inv[k] = -s / a[0]
        return LaurentSeries(-self.val, inv, -self.val + n)

    def __truediv__(self, other):
        return self * _coerce(other, self.prec).inverse()

    def __rtruediv__(self, other):
        return _coerce(other, self.prec) * self.inverse()

    def __pow__(self, e):
        if e < 0:
            return self.inverse() ** (-e)
        result = LaurentSeries.constant(1, self.prec + max(self.val, 0) * e)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def shift(self, k):
        return LaurentSeries(self.val + k, self.coeffs, self.prec + k)

    def coefficient(self, k):
        if k >= self.prec:
            raise PrecisionLoss(f"coefficient of s^{k} beyond precision")
        i = k - self.val
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __repr__(self):
        body = " + ".join(f"{c}*s^{self.val + i}" for i, c in enumerate(self.coeffs) if c)
        return f"({body or '0'} + O(s^{self.prec}))"


def _coerce(x, prec):
    if isinstance(x, LaurentSeries):
        return x
    return LaurentSeries.constant(Fraction(x), prec)


def series_ratio_value(num: LaurentSeries, den: LaurentSeries):
    """Value of num/den at the series parameter's origin.

    Returns a Fraction, or None for a pole.  Raises PrecisionLoss if either
    side is zero mod precision (caller should retry with more terms).
    """
    if num.is_zero() and den.is_zero():
        raise PrecisionLoss("0/0 at working precision")
    if den.is_zero():
        raise PrecisionLoss("denominator 0 at working precision")
    if num.is_zero():
        # numerator vanishes to higher order than the precision window;
        # with den known this is an honest zero as long as prec > den.val
        if num.prec > den.val:
            return Fraction(0)
        raise PrecisionLoss("numerator 0 at working precision")
    if num.val > den.val:
        return Fraction(0)
    if num.val < den.val:
        return None
    return num.coeffs[0] / den.coeffs[0]


def newton_branch(g_terms, gy_terms, x_series, y0, prec):
    """Solve G(x(s), y(s)) = 0 for y(s) with y(0) = y0, given dG/dy != 0.

    g_terms/gy_terms are term lists in the two variables (x, y); x_series
    is the expansion of the first variable.
    """
    y = LaurentSeries.constant(Fraction(y0), 1)
    cur = 1
    while cur < prec:
        cur = min(2 * cur, prec)
        xk = LaurentSeries(x_series.val, x_series.coeffs, cur)
        y = LaurentSeries(y.val, y.coeffs, cur)
        g = eval_terms(g_terms, (xk, y))
        gy = eval_terms(gy_terms, (xk, y))
        if isinstance(g, Fraction):
            g = LaurentSeries.constant(g, cur)
        if g.is_zero():
            continue
        y = y - g / gy
    return LaurentSeries(y.val, y.coeffs, prec)
