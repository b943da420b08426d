"""Index-slot permutations of S_n.

A permutation is a tuple ``p`` of length ``n`` over ``0..n-1`` (0-based
one-line notation): ``p[i]`` is the slot of the base multi-index that feeds
position ``i`` of the rearranged one.  JSON serialization is 1-based.

Conventions, normative for the whole package:

* ``compose(p, q)(i) == p(q(i))``
* ``apply_to_index(p, x)[i] == x[p[i]]``

so that ``apply_to_index(compose(p, q), x) == apply_to_index(q,
apply_to_index(p, x))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations as _all_perms

Perm = tuple[int, ...]

# Rank-3 enumeration: identity, the two 3-cycles, then the three
# transpositions.  With base letters (x1, x2, x3) the images spell the
# rearrangements (x1x2x3), (x3x1x2), (x2x3x1), (x1x3x2), (x3x2x1), (x2x1x3);
# coefficient vectors, matrix rows/columns and serialized output all use this
# ordering at rank 3.
_CANONICAL3: tuple[Perm, ...] = (
    (0, 1, 2),
    (2, 0, 1),
    (1, 2, 0),
    (0, 2, 1),
    (2, 1, 0),
    (1, 0, 2),
)


def identity(n: int) -> Perm:
    return tuple(range(n))


def is_perm(p) -> bool:
    return sorted(p) == list(range(len(p)))


def compose(p: Perm, q: Perm) -> Perm:
    """Composition (p.q)(i) = p(q(i))."""
    if len(p) != len(q):
        raise ValueError(f"cannot compose permutations of sizes {len(p)} and {len(q)}")
    return tuple(p[q[i]] for i in range(len(p)))


def invert(p: Perm) -> Perm:
    """Inverse permutation: compose(p, invert(p)) == identity."""
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def apply_to_index(p: Perm, x) -> tuple:
    """Rearrange a multi-index: result[i] = x[p[i]]."""
    if len(x) != len(p):
        raise ValueError(f"multi-index of length {len(x)} does not match size-{len(p)} permutation")
    return tuple(x[p[i]] for i in range(len(p)))


def parity(p: Perm) -> int:
    """+1 for even permutations, -1 for odd ones."""
    seen = [False] * len(p)
    sign = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        j = i
        length = 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def canonical_order(n: int) -> tuple[Perm, ...]:
    """All n! permutations in the package's canonical enumeration.

    Rank 3 uses the fixed order documented at :data:`_CANONICAL3`; every other
    rank is identity-first lexicographic on the image tuples.
    """
    if n < 1:
        raise ValueError(f"rank must be >= 1, got {n}")
    if n == 3:
        return _CANONICAL3
    return tuple(_all_perms(range(n)))


def perm_to_1based(p: Perm) -> list[int]:
    return [v + 1 for v in p]


def perm_from_1based(seq) -> Perm:
    p = tuple(v - 1 for v in seq)
    if not is_perm(p):
        raise ValueError(f"{list(seq)} is not a 1-based permutation")
    return p


@dataclass(frozen=True)
class PermTable:
    """Precomputed group data for S_n over the canonical enumeration.

    ``compose_index[i][j]`` is the canonical index of ``order[i] . order[j]``;
    ``inverse_index[i]`` of ``order[i]`` inverted.
    """

    n: int
    order: tuple[Perm, ...]
    index: dict[Perm, int]
    compose_index: tuple[tuple[int, ...], ...]
    inverse_index: tuple[int, ...]
    parities: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.order)


@lru_cache(maxsize=None)
def perm_table(n: int) -> PermTable:
    order = canonical_order(n)
    index = {p: i for i, p in enumerate(order)}
    compose_index = tuple(
        tuple(index[compose(p, q)] for q in order) for p in order
    )
    inverse_index = tuple(index[invert(p)] for p in order)
    parities = tuple(parity(p) for p in order)
    assert len(order) == math.factorial(n) and order[0] == identity(n)
    return PermTable(n, order, index, compose_index, inverse_index, parities)
