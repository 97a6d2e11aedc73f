"""Independent brute-force oracles shared by the unit and acceptance tests.

These deliberately avoid the production shortcuts: no trace pruning, no
linear solving; candidate g ranges over all of GL2(Z/NZ) and the defining
condition is checked against full element sets.
"""

import numpy as np

from twistcong.gl2 import all_gl2_entries, index2_subgroups, pack_entries
from twistcong.qtt import square_class
from twistcong.zmod import Mat2


def _commute_mask(ent, h, n, sign):
    a, b, c, d = (int(x) for x in h)
    ga, gb, gc, gd = ent[:, 0], ent[:, 1], ent[:, 2], ent[:, 3]
    # g*h - sign*h*g == 0, entrywise
    m = ((ga * a + gb * c - sign * (a * ga + b * gc)) % n == 0)
    m &= ((ga * b + gb * d - sign * (a * gb + b * gd)) % n == 0)
    m &= ((gc * a + gd * c - sign * (c * ga + d * gc)) % n == 0)
    m &= ((gc * b + gd * d - sign * (c * gb + d * gd)) % n == 0)
    return m


def qtt_brute(hplus):
    """All (H elements, power class) pairs by exhaustive search."""
    n = hplus.level
    ent = all_gl2_entries(n)
    found = set()
    for h in index2_subgroups(hplus):
        mask = np.ones(len(ent), dtype=bool)
        for k in sorted(h.elements):
            mask &= _commute_mask(ent, Mat2.unpack(n, k).entries(), n, 1)
            if not mask.any():
                break
        if mask.any():
            for k in sorted(hplus.elements - h.elements):
                mask &= _commute_mask(ent, Mat2.unpack(n, k).entries(), n, -1)
                if not mask.any():
                    break
        for row in ent[mask]:
            det = int(row[0] * row[3] - row[1] * row[2]) % n
            found.add((h.elements, square_class(det, n)))
    return found


def random_small_subgroups(rng, count, max_order=200, levels=range(3, 17)):
    """Sample subgroups H+ of order <= max_order at the given levels."""
    from twistcong.gl2 import Subgroup

    out = []
    seen = set()
    levels = list(levels)
    while len(out) < count:
        n = rng.choice(levels)
        gens = []
        for _ in range(rng.randrange(1, 4)):
            while True:
                m = Mat2(n, *(rng.randrange(n) for _ in range(4)))
                if m.is_invertible():
                    gens.append(m)
                    break
        g = Subgroup(n, gens)
        if g.order > max_order:
            continue
        key = (n, g.elements)
        if key in seen:
            continue
        seen.add(key)
        out.append(g)
    return out
