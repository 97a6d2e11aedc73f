"""Exact arithmetic for 2x2 matrices over Z/NZ and linear solving over Z/NZ.

Everything here is exact integer arithmetic; entries are kept reduced into
[0, N).  Linear systems in the four entries of an unknown matrix are solved
by CRT decomposition into prime powers and elimination with unit pivots
(a Howell-style reduced form); a brute-force solver is provided as an oracle
for small moduli.
"""

from __future__ import annotations

import itertools
from math import gcd

from sympy import factorint


class NotInvertible(Exception):
    """Matrix (or residue) has no inverse at this level."""


class LevelMismatch(Exception):
    """Matrices of different levels never combine arithmetically."""


class Mat2:
    """A 2x2 matrix over Z/NZ.  Immutable; entries reduced into [0, N)."""

    __slots__ = ("n", "a", "b", "c", "d")

    def __init__(self, n, a, b, c, d):
        if n < 1:
            raise ValueError("level must be >= 1")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "a", a % n)
        object.__setattr__(self, "b", b % n)
        object.__setattr__(self, "c", c % n)
        object.__setattr__(self, "d", d % n)

    def __setattr__(self, *args):
        raise AttributeError("Mat2 is immutable")

    @classmethod
    def identity(cls, n):
        return cls(n, 1, 0, 0, 1)

    @classmethod
    def from_rows(cls, n, rows):
        (a, b), (c, d) = rows
        return cls(n, a, b, c, d)

    def entries(self):
        return (self.a, self.b, self.c, self.d)

    def __eq__(self, other):
        return (isinstance(other, Mat2) and self.n == other.n
                and self.entries() == other.entries())

    def __hash__(self):
        return hash((self.n,) + self.entries())

    def _check_level(self, other):
        if self.n != other.n:
            raise LevelMismatch(f"levels {self.n} and {other.n}")

    def __mul__(self, other):
        self._check_level(other)
        n = self.n
        return Mat2(n,
                    self.a * other.a + self.b * other.c,
                    self.a * other.b + self.b * other.d,
                    self.c * other.a + self.d * other.c,
                    self.c * other.b + self.d * other.d)

    def __neg__(self):
        return Mat2(self.n, -self.a, -self.b, -self.c, -self.d)

    def det(self):
        return (self.a * self.d - self.b * self.c) % self.n

    def trace(self):
        return (self.a + self.d) % self.n

    def transpose(self):
        return Mat2(self.n, self.a, self.c, self.b, self.d)

    def is_invertible(self):
        return gcd(self.det(), self.n) == 1

    def inv(self):
        dt = self.det()
        if gcd(dt, self.n) != 1:
            raise NotInvertible(f"det {dt} not a unit mod {self.n}")
        di = pow(dt, -1, self.n)
        return Mat2(self.n, di * self.d, -di * self.b, -di * self.c, di * self.a)

    def __pow__(self, k):
        if k < 0:
            return self.inv() ** (-k)
        r = Mat2.identity(self.n)
        m = self
        while k:
            if k & 1:
                r = r * m
            m = m * m
            k >>= 1
        return r

    def scale(self, u):
        return Mat2(self.n, u * self.a, u * self.b, u * self.c, u * self.d)

    def reduce_to(self, m):
        """Image under the reduction map Z/NZ -> Z/mZ; m must divide N."""
        if self.n % m:
            raise ValueError(f"{m} does not divide level {self.n}")
        return Mat2(m, self.a, self.b, self.c, self.d)

    def pack(self):
        """Canonical integer key: entries in row-major base-N digits."""
        n = self.n
        return ((self.a * n + self.b) * n + self.c) * n + self.d

    @classmethod
    def unpack(cls, n, key):
        d = key % n
        key //= n
        c = key % n
        key //= n
        b = key % n
        return cls(n, key // n, b, c, d)

    def __repr__(self):
        return f"[[{self.a},{self.b}],[{self.c},{self.d}]] mod {self.n}"


def mat_det(m: Mat2) -> int:
    return m.det()


def mat_inv(m: Mat2) -> Mat2:
    return m.inv()


class LinearSystem:
    """Linear equations over Z/NZ in the four entries of an unknown matrix.

    Each row is (c_a, c_b, c_c, c_d, rhs) meaning
    c_a*a + c_b*b + c_c*c + c_d*d = rhs (mod N).
    """

    def __init__(self, n, rows=()):
        self.n = n
        self.rows = [tuple(x % n for x in row) for row in rows]

    def add_row(self, ca, cb, cc, cd, rhs=0):
        n = self.n
        self.rows.append((ca % n, cb % n, cc % n, cd % n, rhs % n))

    def constrain_commute(self, h: Mat2, sign=1):
        """Rows for g*h = sign * h*g, linear in the entries of g."""
        if h.n != self.n:
            raise LevelMismatch(f"levels {h.n} and {self.n}")
        a, b, c, d = h.a, h.b, h.c, h.d
        s = sign
        # entry (1,1): a*ga + c*gb - s*(a*ga + b*gc)
        self.add_row(a - s * a, c, -s * b, 0)
        # entry (1,2): b*ga + d*gb - s*(a*gb + b*gd)
        self.add_row(b, d - s * a, 0, -s * b)
        # entry (2,1): a*gc + c*gd - s*(c*ga + d*gc)
        self.add_row(-s * c, 0, a - s * d, c)
        # entry (2,2): b*gc + d*gd - s*(c*gb + d*gd)
        self.add_row(0, -s * c, b, d - s * d)


def _valuation(a, p, cap):
    v = 0
    while v < cap and a % p == 0:
        a //= p
        v += 1
    return v


def _solve_prime_power(rows, p, e):
    """All solution 4-tuples of the system modulo p^e.

    Elimination with unit pivots after factoring out the pivot's p-power;
    solutions are enumerated from the reduced form (pivot equations
    p^v * x = c branch into p^v lifts; free columns range over Z/p^e).
    """
    m = p ** e
    work = [[x % m for x in r] for r in rows]
    work = [r for r in work if any(r)]
    perm = list(range(4))
    pivots = []  # (row index, column, valuation)
    r0 = 0
    for col in range(4):
        best = None
        for i in range(r0, len(work)):
            for j in range(col, 4):
                a = work[i][j]
                if a == 0:
                    continue
                v = _valuation(a, p, e)
                if best is None or v < best[0]:
                    best = (v, i, j)
                if v == 0:
                    break
            if best and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        work[r0], work[i] = work[i], work[r0]
        if j != col:
            for r in work:
                r[col], r[j] = r[j], r[col]
            perm[col], perm[j] = perm[j], perm[col]
        unit = work[r0][col] // p ** v
        ui = pow(unit, -1, m)
        work[r0] = [(x * ui) % m for x in work[r0]]
        piv = p ** v
        for i in range(len(work)):
            if i == r0:
                continue
            a = work[i][col]
            if a and _valuation(a, p, e) >= v:
                f = a // piv
                work[i] = [(x - f * y) % m for x, y in zip(work[i], work[r0])]
        pivots.append((r0, col, v))
        r0 += 1
    for i in range(r0, len(work)):
        if not any(work[i][:4]) and work[i][4]:
            return []
    pivot_cols = {col for _, col, _ in pivots}
    free_cols = [c for c in range(4) if c not in pivot_cols]

    # A pivot row may still involve pivot columns processed later (a unit
    # entry cannot be cleared by a p-power pivot), so back-substitute in
    # reverse pivot order, branching over the p^v lifts at each pivot.
    sols = []

    def descend(k, assign):
        if k < 0:
            x = [0, 0, 0, 0]
            for col in range(4):
                x[perm[col]] = assign[col]
            if all((r[0] * x[0] + r[1] * x[1] + r[2] * x[2] + r[3] * x[3] - r[4]) % m == 0
                   for r in rows):
                sols.append(tuple(x))
            return
        ri, col, v = pivots[k]
        row = work[ri]
        c = row[4] - sum(row[j] * assign[j] for j in range(4) if j != col and j in assign)
        c %= m
        piv = p ** v
        if c % piv:
            return
        base = (c // piv) % (m // piv) if v < e else 0
        step = m // piv
        for t in range(piv):
            assign[col] = (base + t * step) % m
            descend(k - 1, assign)
        del assign[col]

    for free_vals in itertools.product(range(m), repeat=len(free_cols)):
        descend(len(pivots) - 1, dict(zip(free_cols, free_vals)))
    sols.sort()
    return sols


def _solve_brute(rows, m):
    """Exhaustive solver mod m; the oracle for small moduli."""
    sols = []
    for x in itertools.product(range(m), repeat=4):
        if all((r[0] * x[0] + r[1] * x[1] + r[2] * x[2] + r[3] * x[3] - r[4]) % m == 0
               for r in rows):
            sols.append(x)
    return sols


def kernel_of_linear_map(sys: LinearSystem, brute=False) -> list[Mat2]:
    """Every matrix over Z/NZ (invertible or not) satisfying all equations.

    Decomposes N into prime powers, solves each factor, and recombines by
    CRT.  Set brute=True to force exhaustive enumeration (test oracle).
    """
    n = sys.n
    if n == 1:
        return [Mat2(1, 0, 0, 0, 0)]
    if brute:
        return [Mat2(n, *x) for x in sorted(_solve_brute(sys.rows, n))]
    parts = []
    moduli = []
    for p, e in sorted(factorint(n).items()):
        sols = _solve_prime_power(sys.rows, p, e)
        if not sols:
            return []
        parts.append(sols)
        moduli.append(p ** e)
    out = []
    for combo in itertools.product(*parts):
        x = []
        for k in range(4):
            r, mm = combo[0][k], moduli[0]
            for sol, m2 in zip(combo[1:], moduli[1:]):
                # CRT: r mod mm, sol[k] mod m2
                t = ((sol[k] - r) * pow(mm, -1, m2)) % m2
                r = r + mm * t
                mm *= m2
            x.append(r % n)
        out.append(Mat2(n, *x))
    out.sort(key=Mat2.pack)
    return out


def crt_pair(m1: Mat2, m2: Mat2) -> Mat2:
    """Combine matrices at coprime levels into one at level n1*n2."""
    n1, n2 = m1.n, m2.n
    if gcd(n1, n2) != 1:
        raise LevelMismatch(f"levels {n1}, {n2} not coprime")
    n = n1 * n2
    inv = pow(n1, -1, n2)
    ent = []
    for x, y in zip(m1.entries(), m2.entries()):
        t = ((y - x) * inv) % n2
        ent.append((x + n1 * t) % n)
    return Mat2(n, *ent)
