"""Subgroups of GL2(Z/NZ): closure, Cartan subgroups and their normalisers,
direct products, preimage lifts, delta-cover subgroups, index-2 subgroups.

Element sets are stored as frozensets of packed integers (see Mat2.pack);
all groups in scope are small enough to enumerate (a few thousand elements;
only ambient groups reach the hundreds of thousands and those are handled
with vectorised numpy enumeration, never BFS).
"""

from __future__ import annotations

import itertools
from math import gcd

import numpy as np
from sympy import factorint, isprime

from .zmod import LevelMismatch, Mat2, NotInvertible, crt_pair


class InvalidSpec(Exception):
    pass


class LevelsNotCoprime(Exception):
    pass


class BadTarget(Exception):
    pass


class NotIndexTwo(Exception):
    pass


def gl2_order(n: int) -> int:
    """|GL2(Z/NZ)| = N^4 prod_{p|N} (1-1/p)(1-1/p^2)."""
    order = 1
    for p, e in factorint(n).items():
        order *= p ** (4 * e - 3) * (p - 1) * (p * p - 1)
    return order


def sl2_order(n: int) -> int:
    """|SL2(Z/NZ)| = N^3 prod_{p|N} (1-1/p^2)."""
    order = n ** 3
    for p in factorint(n):
        order = order // (p * p) * (p * p - 1)
    return order


def _pack(n, a, b, c, d):
    return ((a * n + b) * n + c) * n + d


def _mul_packed(n, x, y):
    xd = x % n
    x //= n
    xc = x % n
    x //= n
    xb = x % n
    xa = x // n
    yd = y % n
    y //= n
    yc = y % n
    y //= n
    yb = y % n
    ya = y // n
    return _pack(n, (xa * ya + xb * yc) % n, (xa * yb + xb * yd) % n,
                 (xc * ya + xd * yc) % n, (xc * yb + xd * yd) % n)


class Subgroup:
    """A subgroup of GL2(Z/NZ) given by generators, with cached element set."""

    def __init__(self, level, generators, _elements=None):
        self.level = level
        gens = []
        for g in generators:
            if g.n != level:
                raise LevelMismatch(f"generator level {g.n} != {level}")
            if not g.is_invertible():
                raise NotInvertible(f"generator {g!r} not invertible")
            gens.append(g)
        self.generators = tuple(gens)
        self._elements = _elements
        self._det_image = None

    @property
    def elements(self) -> frozenset:
        if self._elements is None:
            self._elements = _closure_packed(
                self.level, [g.pack() for g in self.generators])
        return self._elements

    @property
    def order(self) -> int:
        return len(self.elements)

    def matrices(self):
        n = self.level
        return [Mat2.unpack(n, k) for k in sorted(self.elements)]

    def __contains__(self, m: Mat2):
        return m.n == self.level and m.pack() in self.elements

    def __eq__(self, other):
        return (isinstance(other, Subgroup) and self.level == other.level
                and self.elements == other.elements)

    def __hash__(self):
        return hash((self.level, self.elements))

    def __le__(self, other):
        return self.level == other.level and self.elements <= other.elements

    def contains_minus_identity(self):
        return _pack(self.level, self.level - 1, 0, 0, self.level - 1) in self.elements

    def det_image(self):
        if self._det_image is None:
            n = self.level
            self._det_image = frozenset(Mat2.unpack(n, k).det() for k in self.elements)
        return self._det_image

    def index_in_ambient(self):
        return gl2_order(self.level) // self.order

    def small_generators(self):
        """A short generating list found greedily over the element set."""
        n = self.level
        gens = []
        span = {_pack(n, 1, 0, 0, 1)}
        for k in sorted(self.elements):
            if k not in span:
                gens.append(k)
                span = _closure_packed(n, gens)
                if len(span) == self.order:
                    break
        return [Mat2.unpack(n, k) for k in gens]

    def conjugate(self, g: Mat2):
        """The subgroup g^-1 H g."""
        gi = g.inv()
        gik, gk = gi.pack(), g.pack()
        n = self.level
        return Subgroup(n, [gi * h * g for h in self.generators],
                        _elements=frozenset(
                            _mul_packed(n, _mul_packed(n, gik, k), gk)
                            for k in self.elements))

    def transpose(self):
        n = self.level
        return Subgroup(n, [g.transpose() for g in self.generators],
                        _elements=frozenset(Mat2.unpack(n, k).transpose().pack()
                                            for k in self.elements))

    def reduce_to(self, m: int):
        """Image subgroup under reduction to level m (m | level)."""
        n = self.level
        elems = frozenset(Mat2.unpack(n, k).reduce_to(m).pack() for k in self.elements)
        return Subgroup(m, [g.reduce_to(m) for g in self.generators], _elements=elems)

    def __repr__(self):
        return f"Subgroup(level={self.level}, order={self.order})"


def _closure_packed(n, gen_keys):
    """BFS closure of the generators (packed); includes the identity."""
    ident = _pack(n, 1, 0, 0, 1)
    known = {ident}
    known.update(gen_keys)
    frontier = list(known)
    gens = list(dict.fromkeys(gen_keys))
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = _mul_packed(n, x, g)
                if y not in known:
                    known.add(y)
                    new.append(y)
        frontier = new
    return frozenset(known)


def closure(generators) -> Subgroup:
    gens = list(generators)
    if not gens:
        raise InvalidSpec("need at least one generator")
    return Subgroup(gens[0].n, gens)


def span_packed(level, keys):
    """Closure of <keys>, finding a short generating subset greedily first."""
    ident = _pack(level, 1, 0, 0, 1)
    cur = frozenset({ident})
    gens = []
    for k in keys:
        if k not in cur:
            gens.append(k)
            cur = _closure_packed(level, gens)
    return cur


# ---------------------------------------------------------------------------
# Cartan subgroups


def least_nonresidue(p: int) -> int:
    """Least positive quadratic nonresidue modulo an odd prime p."""
    squares = {pow(x, 2, p) for x in range(1, p)}
    for xi in range(2, p):
        if xi % p not in squares:
            return xi
    raise InvalidSpec(f"no nonresidue mod {p}")


class CartanSpec:
    """Split or nonsplit Cartan data at level p^l."""

    def __init__(self, p, l, kind, xi=None):
        if not isprime(p):
            raise InvalidSpec(f"{p} is not prime")
        if l < 1:
            raise InvalidSpec("exponent must be >= 1")
        if kind not in ("split", "nonsplit"):
            raise InvalidSpec(f"unknown kind {kind!r}")
        self.p = p
        self.l = l
        self.kind = kind
        if p == 2:
            self.xi = None  # minimal polynomial x^2 + x + 1 instead
        else:
            self.xi = least_nonresidue(p) if xi is None else xi % p ** l
            if self.xi is not None and pow(self.xi, (p - 1) // 2, p) != p - 1:
                raise InvalidSpec(f"{self.xi} is a residue mod {p}")

    @property
    def level(self):
        return self.p ** self.l

    def __repr__(self):
        tag = "s" if self.kind == "split" else "ns"
        return f"CartanSpec({tag} {self.level})"


def cartan(spec: CartanSpec) -> Subgroup:
    """The explicit split/nonsplit Cartan subgroup at level p^l.

    Split: diagonal matrices.  Nonsplit, p odd: [[a, b*xi], [b, a]] from the
    algebra Z[x]/(x^2 - xi); p = 2: [[a, -b], [b, a-b]] from Z[x]/(x^2+x+1);
    in both cases (a, b) must not vanish mod p.
    """
    p, l, n = spec.p, spec.l, spec.level
    elems = set()
    if spec.kind == "split":
        units = [u for u in range(n) if u % p]
        for a in units:
            for d in units:
                elems.add(_pack(n, a, 0, 0, d))
        gens = [Mat2(n, u, 0, 0, 1) for u in _unit_generators(p, l)]
        gens += [Mat2(n, 1, 0, 0, u) for u in _unit_generators(p, l)]
    else:
        for a in range(n):
            for b in range(n):
                if a % p == 0 and b % p == 0:
                    continue
                if p == 2:
                    elems.add(_pack(n, a, (-b) % n, b, (a - b) % n))
                else:
                    elems.add(_pack(n, a, (b * spec.xi) % n, b, a))
        gens = None  # derived below from the element set
    H = Subgroup(n, gens or [Mat2.identity(n)], _elements=frozenset(elems))
    if gens is None:
        H = Subgroup(n, H.small_generators(), _elements=H.elements)
    return H


def cartan_normalizer(spec: CartanSpec) -> Subgroup:
    """Cartan subgroup extended by its order-2 normalising element.

    Split: adjoin [[0,1],[1,0]].  For p = 2 this is *not* the full
    normaliser of the split Cartan, by convention.  Nonsplit: adjoin
    [[1,u],[0,-1]] where x^2 - ux + v is the minimal polynomial in use
    (u = -1 for p = 2, u = 0 for odd p).
    """
    n = spec.level
    C = cartan(spec)
    if spec.kind == "split":
        w = Mat2(n, 0, 1, 1, 0)
    elif spec.p == 2:
        w = Mat2(n, 1, -1, 0, -1)
    else:
        w = Mat2(n, 1, 0, 0, -1)
    elems = set(C.elements)
    wk = w.pack()
    elems.update(_mul_packed(n, k, wk) for k in C.elements)
    return Subgroup(n, list(C.generators) + [w], _elements=frozenset(elems))


def _unit_generators(p, l):
    """Generators of (Z/p^l)^x."""
    n = p ** l
    if n <= 2:
        return [1]
    if p == 2:
        return [n - 1, 5] if l >= 3 else [n - 1]
    from sympy import primitive_root
    return [primitive_root(n)]


# ---------------------------------------------------------------------------
# Constructions


def direct_product(h1: Subgroup, h2: Subgroup) -> Subgroup:
    """CRT direct product at level n1*n2 (coprime levels)."""
    n1, n2 = h1.level, h2.level
    if gcd(n1, n2) != 1:
        raise LevelsNotCoprime(f"levels {n1}, {n2}")
    n = n1 * n2
    i1 = Mat2.identity(n1)
    i2 = Mat2.identity(n2)
    gens = [crt_pair(g, i2) for g in h1.generators]
    gens += [crt_pair(i1, g) for g in h2.generators]
    elems = _crt_pairs(n1, h1.elements, n2, h2.elements)
    return Subgroup(n, gens, _elements=elems)


def _crt_pairs(n1, keys1, n2, keys2, pairs=None):
    """Packed CRT combinations; pairs optionally restricts to given (k1, k2)."""
    n = n1 * n2
    inv = pow(n1, -1, n2)
    out = set()
    it = pairs if pairs is not None else itertools.product(keys1, keys2)
    for k1, k2 in it:
        m1 = Mat2.unpack(n1, k1)
        m2 = Mat2.unpack(n2, k2)
        ent = []
        for x, y in zip(m1.entries(), m2.entries()):
            ent.append((x + n1 * (((y - x) * inv) % n2)) % n)
        out.add(_pack(n, *ent))
    return frozenset(out)


def preimage_lift(h: Subgroup, target: int) -> Subgroup:
    """Full inverse image under GL2(Z/2^{k+1}) -> GL2(Z/2^k).

    The kernel is the 16 matrices I + 2^k M, so the order multiplies by 16.
    """
    n = h.level
    if n & (n - 1) or n < 2:
        raise BadTarget(f"level {n} is not a power of 2")
    if target != 2 * n:
        raise BadTarget(f"target {target} != 2*{n}")
    elems = set()
    for k in h.elements:
        m = Mat2.unpack(n, k)
        for da, db, dc, dd in itertools.product((0, n), repeat=4):
            elems.add(_pack(target, m.a + da, m.b + db, m.c + dc, m.d + dd))
    gens = [Mat2(target, g.a, g.b, g.c, g.d) for g in h.generators]
    gens += [Mat2(target, 1 + n, 0, 0, 1), Mat2(target, 1, n, 0, 1),
             Mat2(target, 1, 0, n, 1), Mat2(target, 1, 0, 0, 1 + n)]
    return Subgroup(target, gens, _elements=frozenset(elems))


def index2_subgroups(hplus: Subgroup, containing=frozenset()) -> list[Subgroup]:
    """All index-2 subgroups, as kernels of characters to {+-1}.

    The quotient by the subgroup generated by all squares is an elementary
    abelian 2-group (it absorbs commutators), so index-2 subgroups are the
    preimages of its hyperplanes.  `containing` (packed keys) restricts to
    subgroups containing those elements.
    """
    n = hplus.level
    elems = hplus.elements
    squares = {_mul_packed(n, k, k) for k in elems}
    K = span_packed(n, sorted(squares) + sorted(set(containing) - squares))
    if len(K) == len(elems):
        return []
    # label cosets of K, with the identity coset labeled 0
    coset_of = {}
    reps = []
    for k in [_pack(n, 1, 0, 0, 1)] + sorted(elems):
        if k in coset_of:
            continue
        cid = len(reps)
        reps.append(k)
        for kk in K:
            coset_of[_mul_packed(n, kk, k)] = cid
    q = len(reps)
    # coordinates of each coset in an F2 basis of the quotient
    basis = []
    coords = {0: 0}
    for cid in range(q):
        if cid not in coords:
            basis.append(cid)
            coords = _span_coords(n, reps, coset_of, basis)
    out = []
    for mask in range(1, 2 ** len(basis)):
        keep = {cid for cid, vec in coords.items()
                if bin(mask & vec).count("1") % 2 == 0}
        sub = frozenset(k for k, cid in coset_of.items() if cid in keep)
        s = Subgroup(n, [Mat2.identity(n)], _elements=sub)
        s.generators = tuple(s.small_generators())
        out.append(s)
    out.sort(key=lambda s: tuple(sorted(s.elements)))
    return out


def _span_coords(n, reps, coset_of, basis):
    """Coordinates (bitmask over basis) for every coset in the span."""
    coords = {0: 0}
    frontier = [0]
    while frontier:
        new = []
        for cid in frontier:
            for i, b in enumerate(basis):
                nxt = coset_of[_mul_packed(n, reps[cid], reps[b])]
                if nxt not in coords:
                    coords[nxt] = coords[cid] ^ (1 << i)
                    new.append(nxt)
        frontier = new
    return coords


def delta_cover_subgroup(h1: Subgroup, h1plus: Subgroup,
                         h2: Subgroup, h2plus: Subgroup,
                         coset_reps=None) -> Subgroup:
    """Subgroup of GL2(Z/N1N2): pairs (x, y) in H1+ x H2+ lying in H1 x H2
    or in its double coset twist (x outside H1 iff y outside H2).

    This is the group generated by H1 x H2 and any single pair (a1, a2)
    with ai in Hi+ \\ Hi; it has index 2 in H1+ x H2+ and does not depend
    on the chosen pair.
    """
    for h, hp in ((h1, h1plus), (h2, h2plus)):
        if not (h.level == hp.level and h.elements < hp.elements
                and 2 * h.order == hp.order):
            raise NotIndexTwo(f"{h!r} is not index 2 in {hp!r}")
    n1, n2 = h1.level, h2.level
    if gcd(n1, n2) != 1:
        raise LevelsNotCoprime(f"levels {n1}, {n2}")
    in1 = h1.elements
    in2 = h2.elements
    pairs = [(k1, k2) for k1 in h1plus.elements for k2 in h2plus.elements
             if (k1 in in1) == (k2 in in2)]
    elems = _crt_pairs(n1, None, n2, None, pairs=pairs)
    n = n1 * n2
    i1 = Mat2.identity(n1)
    i2 = Mat2.identity(n2)
    gens = [crt_pair(g, i2) for g in h1.generators]
    gens += [crt_pair(i1, g) for g in h2.generators]
    if coset_reps is None:
        a1 = Mat2.unpack(n1, min(h1plus.elements - in1))
        a2 = Mat2.unpack(n2, min(h2plus.elements - in2))
    else:
        a1, a2 = coset_reps
        if a1.pack() in in1 or a2.pack() in in2:
            raise NotIndexTwo("coset representatives lie inside H1 x H2")
    gens.append(crt_pair(a1, a2))
    return Subgroup(n, gens, _elements=elems)


# ---------------------------------------------------------------------------
# Ambient enumeration (numpy) and the conjugate-to-transpose search


def all_gl2_entries(n: int) -> np.ndarray:
    """(M, 4) int64 array of the entries of every element of GL2(Z/NZ)."""
    rng = np.arange(n, dtype=np.int64)
    a, b, c, d = np.meshgrid(rng, rng, rng, rng, indexing="ij")
    ent = np.stack([a.ravel(), b.ravel(), c.ravel(), d.ravel()], axis=1)
    det = (ent[:, 0] * ent[:, 3] - ent[:, 1] * ent[:, 2]) % n
    unit = np.zeros(n, dtype=bool)
    for u in range(n):
        unit[u] = gcd(u, n) == 1
    return ent[unit[det]]


def pack_entries(n: int, ent: np.ndarray) -> np.ndarray:
    return ((ent[:, 0] * n + ent[:, 1]) * n + ent[:, 2]) * n + ent[:, 3]


def is_conjugate_to_transpose(h: Subgroup):
    """Search GL2(Z/NZ) for g with g^-1 H g = H^T; returns (found, witness).

    Exhaustive with early exit over packed-order chunks, so the witness is
    the minimal one.  Generators conjugating into H^T suffice since the
    conjugate has the same order.
    """
    n = h.level
    gens = h.small_generators() if len(h.generators) > 6 else list(h.generators)
    if not gens:
        gens = [Mat2.identity(n)]
    target = np.array(sorted(k for k in h.transpose().elements), dtype=np.int64)
    ent = all_gl2_entries(n)
    order = np.argsort(pack_entries(n, ent), kind="stable")
    ent = ent[order]
    inv_table = np.array([pow(u, -1, n) if gcd(u, n) == 1 else 0 for u in range(n)],
                         dtype=np.int64)
    chunk = 1 << 16
    for lo in range(0, len(ent), chunk):
        g = ent[lo:lo + chunk]
        det = (g[:, 0] * g[:, 3] - g[:, 1] * g[:, 2]) % n
        di = inv_table[det]
        gi = np.stack([di * g[:, 3] % n, -di * g[:, 1] % n,
                       -di * g[:, 2] % n, di * g[:, 0] % n], axis=1)
        ok = np.ones(len(g), dtype=bool)
        for hm in gens:
            t = _batch_mul(_batch_mul(gi, np.array(hm.entries(), dtype=np.int64), n), g, n)
            keys = pack_entries(n, t)
            ok &= np.isin(keys, target)
            if not ok.any():
                break
        idx = np.flatnonzero(ok)
        if len(idx):
            e = g[idx[0]]
            return True, Mat2(n, int(e[0]), int(e[1]), int(e[2]), int(e[3]))
    return False, None


def _batch_mul(x, y, n):
    """Batched 2x2 product; either side may be a single matrix (shape (4,))."""
    if x.ndim == 1:
        x = x[None, :]
    if y.ndim == 1:
        y = y[None, :]
    return np.stack([
        (x[:, 0] * y[:, 0] + x[:, 1] * y[:, 2]) % n,
        (x[:, 0] * y[:, 1] + x[:, 1] * y[:, 3]) % n,
        (x[:, 2] * y[:, 0] + x[:, 3] * y[:, 2]) % n,
        (x[:, 2] * y[:, 1] + x[:, 3] * y[:, 3]) % n,
    ], axis=1)
