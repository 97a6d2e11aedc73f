"""Catalog of the named 2-adic subgroups giving quadratic twist-type
congruences over Q, with their index-2 partners and congruence powers.

Labels g1, g7, g9, g11, g23, g55, g63, g90, g91, g97, g441 follow the
Rouse--Zureick-Brown numbering of 2-adic Galois images.  Each H+ comes with
one or two index-2 subgroups H: 'm1' cuts out Q(sqrt(-1)), 'md' cuts out
Q(sqrt(-Delta)), and the Cartan-preimage rows cut out Q(sqrt(Delta)).
"""

from __future__ import annotations

from fractions import Fraction

from .gl2 import CartanSpec, Subgroup, cartan, cartan_normalizer, preimage_lift
from .zmod import Mat2


def _gens(level, *rows):
    return [Mat2(level, *r) for r in rows]


# label -> (level, generators of H+); explicit generator matrices
_EXPLICIT = {
    "g9": (4, [(1, 1, 0, 1), (3, 0, 2, 1)]),
    "g11": (4, [(1, 0, 2, 3), (1, 2, 0, 1), (3, 1, 2, 1)]),
    "g97": (8, [(1, 3, 0, 7), (1, 3, 2, 7), (1, 1, 6, 3)]),
    "g90": (8, [(1, 3, 6, 7), (1, 1, 4, 3), (1, 2, 0, 5)]),
    "g63": (8, [(1, 2, 2, 7), (1, 3, 2, 7), (1, 1, 6, 3)]),
    "g91": (8, [(1, 3, 0, 7), (1, 1, 2, 7), (1, 2, 0, 5)]),
}

# label -> {partner tag -> generators of the index-2 subgroup H}
_PARTNERS = {
    "g9": {"m1": [(3, 0, 0, 3), (1, 1, 0, 1)],
           "md": [(1, 2, 0, 1), (1, 1, 2, 1)]},
    "g11": {"m1": [(1, 2, 0, 1), (1, 3, 2, 3)],
            "md": [(1, 2, 0, 1), (3, 1, 0, 1), (3, 0, 0, 3)]},
    "g97": {"m1": [(3, 4, 0, 3), (5, 6, 4, 1), (5, 1, 6, 7)]},
    "g90": {"md": [(3, 4, 0, 3), (3, 3, 4, 1), (5, 6, 0, 1)]},
    "g63": {"m1": [(3, 4, 0, 3), (5, 6, 4, 1), (5, 1, 6, 7)]},
    "g91": {"md": [(3, 4, 0, 3), (1, 7, 0, 7), (7, 1, 0, 1), (5, 6, 0, 1)]},
}

# Cartan-preimage labels: (level, cartan kind, cartan level)
_PREIMAGE = {
    "g1": (4, "nonsplit", 2),
    "g7": (8, "nonsplit", 4),
    "g23": (8, "split", 4),
    "g55": (16, "nonsplit", 8),
    "g441": (32, "nonsplit", 16),
}

# The 13 quadratic twist-type rows: (modulus 2^k, power r, H+ label,
# partner tag, ambient index of H+, twist description)
TWO_ADIC_ROWS = [
    (4, 1, "g9", "m1", 6, "-1"),
    (4, 1, "g11", "m1", 6, "-1"),
    (4, 3, "g1", "disc", 1, "disc"),
    (4, 3, "g9", "md", 6, "-disc"),
    (4, 3, "g11", "md", 6, "-disc"),
    (8, 1, "g97", "m1", 24, "-1"),
    (8, 3, "g7", "disc", 4, "disc"),
    (8, 3, "g90", "md", 24, "-disc"),
    (8, 5, "g63", "m1", 24, "-1"),
    (8, 7, "g23", "disc", 12, "disc"),
    (8, 7, "g91", "md", 24, "-disc"),
    (16, 3, "g55", "disc", 16, "disc"),
    (32, 3, "g441", "disc", 64, "disc"),
]

# The exactly two exceptional (non-CM) j-invariants below rational points
# of X(ns16+); their minimal twists are the two curves admitting a
# (32,3)-congruence with their discriminant twist.
NS16_EXCEPTIONAL_J = (
    Fraction(-(2 ** 18) * 3 * 5 ** 3 * 13 ** 3 * 41 ** 3 * 107 ** 3, 17 ** 16),
    Fraction(-(2 ** 21) * 3 ** 3 * 5 ** 3 * 7 * 13 ** 3 * 23 ** 3 * 41 ** 3
             * 179 ** 3 * 409 ** 3, 79 ** 16),
)

_cache: dict[str, Subgroup] = {}


def group(label: str) -> Subgroup:
    """The named subgroup H+ (labels g1...g441)."""
    if label in _cache:
        return _cache[label]
    if label in _EXPLICIT:
        level, rows = _EXPLICIT[label]
        g = Subgroup(level, _gens(level, *rows))
    elif label in _PREIMAGE:
        level, kind, clevel = _PREIMAGE[label]
        spec = CartanSpec(2, clevel.bit_length() - 1, kind)
        g = preimage_lift(cartan_normalizer(spec), level)
    else:
        raise KeyError(f"unknown subgroup label {label!r}")
    _cache[label] = g
    return g


def partner(label: str, tag: str) -> Subgroup:
    """The index-2 subgroup H below H+ = group(label).

    tag 'm1' / 'md' selects the explicit sqrt(-1) / sqrt(-Delta) subgroup;
    for Cartan-preimage labels tag 'disc' gives the lifted Cartan itself.
    """
    key = f"{label}:{tag}"
    if key in _cache:
        return _cache[key]
    if label in _PREIMAGE and tag == "disc":
        level, kind, clevel = _PREIMAGE[label]
        spec = CartanSpec(2, clevel.bit_length() - 1, kind)
        g = preimage_lift(cartan(spec), level)
    elif label in _PARTNERS and tag in _PARTNERS[label]:
        level = _EXPLICIT[label][0]
        g = Subgroup(level, _gens(level, *_PARTNERS[label][tag]))
    else:
        raise KeyError(f"no partner {tag!r} for {label!r}")
    _cache[key] = g
    return g


def labels():
    return sorted(set(_EXPLICIT) | set(_PREIMAGE))
