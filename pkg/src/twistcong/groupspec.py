"""Grammar for naming subgroups of GL2(Z/NZ) on the command line.

    spec  := atom | atom '+' | 'pre(' spec ',' int ')'
           | spec 'x' spec | 'delta(' spec ',' spec ')'
    atom  := ('ns'|'s') <prime power>          Cartan subgroup
           | 'g' <label> [':m1' | ':md']       catalog subgroup / partner
           | 'gens(' N ':' [[a,b],[c,d]], ... ')'   explicit generators

Whitespace-insensitive; 'x' is the coprime direct product; the '+' suffix
takes the Cartan subgroup to its normaliser (with the usual convention at
p = 2 split).  delta arguments must carry an implied index-2 pair: a plain
Cartan atom (Cartan inside its normaliser), a catalog partner g<N>:m1/:md
inside g<N>, or pre() of a plain Cartan atom.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from sympy import factorint

from . import catalog
from .gl2 import (CartanSpec, Subgroup, cartan, cartan_normalizer,
                  delta_cover_subgroup, direct_product, preimage_lift)
from .zmod import Mat2


class ParseError(Exception):
    def __init__(self, message, offset):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class SemanticError(Exception):
    pass


@dataclass(frozen=True)
class CartanAtom:
    kind: str       # "split" | "nonsplit"
    p: int
    l: int
    plus: bool

    def __str__(self):
        tag = "s" if self.kind == "split" else "ns"
        return f"{tag}{self.p ** self.l}{'+' if self.plus else ''}"


@dataclass(frozen=True)
class NamedAtom:
    label: str      # g1, g7, g9, ...
    tag: str | None  # None | "m1" | "md"

    def __str__(self):
        return self.label + (f":{self.tag}" if self.tag else "")


@dataclass(frozen=True)
class GensAtom:
    level: int
    entries: tuple  # tuples (a, b, c, d)

    def __str__(self):
        mats = ",".join(f"[[{a},{b}],[{c},{d}]]" for a, b, c, d in self.entries)
        return f"gens({self.level}:{mats})"


@dataclass(frozen=True)
class Pre:
    inner: object
    target: int

    def __str__(self):
        return f"pre({self.inner},{self.target})"


@dataclass(frozen=True)
class Product:
    left: object
    right: object

    def __str__(self):
        return f"{self.left} x {self.right}"


@dataclass(frozen=True)
class Delta:
    left: object
    right: object

    def __str__(self):
        return f"delta({self.left},{self.right})"


class _Cursor:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, k=1):
        self.skip_ws()
        return self.text[self.pos:self.pos + k]

    def startswith(self, word):
        self.skip_ws()
        return self.text.startswith(word, self.pos)

    def expect(self, word):
        if not self.startswith(word):
            raise ParseError(f"expected {word!r}", self.pos)
        self.pos += len(word)

    def integer(self, signed=False):
        self.skip_ws()
        start = self.pos
        if signed and self.pos < len(self.text) and self.text[self.pos] == "-":
            self.pos += 1
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start or self.text[start:self.pos] == "-":
            raise ParseError("expected an integer", start)
        return int(self.text[start:self.pos])

    def done(self):
        self.skip_ws()
        return self.pos >= len(self.text)


def parse_group_spec(text: str):
    cur = _Cursor(text)
    spec = _parse_product(cur)
    if not cur.done():
        raise ParseError("trailing input", cur.pos)
    return spec


def _parse_product(cur):
    left = _parse_atom(cur)
    while cur.peek() == "x":
        cur.expect("x")
        right = _parse_atom(cur)
        left = Product(left, right)
    return left


def _parse_atom(cur):
    cur.skip_ws()
    if cur.startswith("pre("):
        cur.expect("pre(")
        inner = _parse_product(cur)
        cur.expect(",")
        target = cur.integer()
        cur.expect(")")
        return Pre(inner, target)
    if cur.startswith("delta("):
        cur.expect("delta(")
        left = _parse_product(cur)
        cur.expect(",")
        right = _parse_product(cur)
        cur.expect(")")
        return Delta(left, right)
    if cur.startswith("gens("):
        cur.expect("gens(")
        level = cur.integer()
        cur.expect(":")
        entries = []
        while True:
            cur.expect("[[")
            a = cur.integer(signed=True)
            cur.expect(",")
            b = cur.integer(signed=True)
            cur.expect("],[")
            c = cur.integer(signed=True)
            cur.expect(",")
            d = cur.integer(signed=True)
            cur.expect("]]")
            entries.append((a % level, b % level, c % level, d % level))
            if cur.peek() == ",":
                cur.expect(",")
            else:
                break
        cur.expect(")")
        return GensAtom(level, tuple(entries))
    if cur.startswith("ns") and cur.peek(3)[2:3].isdigit():
        cur.expect("ns")
        return _finish_cartan(cur, "nonsplit")
    if cur.startswith("s") and cur.peek(2)[1:2].isdigit():
        cur.expect("s")
        return _finish_cartan(cur, "split")
    if cur.startswith("g") and cur.peek(2)[1:2].isdigit():
        start = cur.pos
        cur.expect("g")
        n = cur.integer()
        label = f"g{n}"
        if label not in catalog.labels():
            raise ParseError(f"unknown catalog label {label}", start)
        tag = None
        if cur.peek(3) in (":m1", ":md"):
            tag = cur.peek(3)[1:]
            cur.expect(":" + tag)
        return NamedAtom(label, tag)
    raise ParseError("expected an atom", cur.pos)


def _finish_cartan(cur, kind):
    start = cur.pos
    n = cur.integer()
    fac = factorint(n)
    if len(fac) != 1:
        raise SemanticError(f"Cartan level {n} is not a prime power")
    (p, l), = fac.items()
    plus = False
    if cur.peek() == "+":
        cur.expect("+")
        plus = True
    return CartanAtom(kind, p, l, plus)


# ---------------------------------------------------------------------------
# Resolution to subgroups


def resolve(spec) -> Subgroup:
    if isinstance(spec, CartanAtom):
        cs = CartanSpec(spec.p, spec.l, spec.kind)
        return cartan_normalizer(cs) if spec.plus else cartan(cs)
    if isinstance(spec, NamedAtom):
        if spec.tag is None:
            return catalog.group(spec.label)
        try:
            return catalog.partner(spec.label, spec.tag)
        except KeyError as exc:
            raise SemanticError(str(exc)) from None
    if isinstance(spec, GensAtom):
        return Subgroup(spec.level, [Mat2(spec.level, *e) for e in spec.entries])
    if isinstance(spec, Pre):
        return preimage_lift(resolve(spec.inner), spec.target)
    if isinstance(spec, Product):
        left, right = resolve(spec.left), resolve(spec.right)
        if gcd(left.level, right.level) != 1:
            raise SemanticError(
                f"product levels {left.level}, {right.level} are not coprime")
        return direct_product(left, right)
    if isinstance(spec, Delta):
        h1, h1p = resolve_pair(spec.left)
        h2, h2p = resolve_pair(spec.right)
        if gcd(h1.level, h2.level) != 1:
            raise SemanticError(
                f"delta levels {h1.level}, {h2.level} are not coprime")
        return delta_cover_subgroup(h1, h1p, h2, h2p)
    raise TypeError(spec)


def resolve_pair(spec):
    """The implied (H, H+) pair of a delta argument."""
    if isinstance(spec, CartanAtom) and not spec.plus:
        cs = CartanSpec(spec.p, spec.l, spec.kind)
        return cartan(cs), cartan_normalizer(cs)
    if isinstance(spec, NamedAtom) and spec.tag is not None:
        try:
            return catalog.partner(spec.label, spec.tag), catalog.group(spec.label)
        except KeyError as exc:
            raise SemanticError(str(exc)) from None
    if isinstance(spec, NamedAtom) and spec.label in ("g1", "g7", "g23", "g55", "g441"):
        return catalog.partner(spec.label, "disc"), catalog.group(spec.label)
    if isinstance(spec, Pre) and isinstance(spec.inner, CartanAtom) and not spec.inner.plus:
        h, hp = resolve_pair(spec.inner)
        return preimage_lift(h, spec.target), preimage_lift(hp, spec.target)
    raise SemanticError(f"{spec} does not carry an index-2 interpretation for delta")
