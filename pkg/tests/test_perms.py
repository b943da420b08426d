import itertools

import pytest

from tensolve.perms import (
    apply_to_index,
    canonical_order,
    compose,
    identity,
    invert,
    parity,
    perm_from_1based,
    perm_table,
    perm_to_1based,
)

# 1-based images of the fixed rank-3 enumeration
CANON3_1BASED = [(1, 2, 3), (3, 1, 2), (2, 3, 1), (1, 3, 2), (3, 2, 1), (2, 1, 3)]


def test_canonical_order_rank3_is_the_fixed_enumeration():
    got = [perm_to_1based(p) for p in canonical_order(3)]
    assert got == [list(p) for p in CANON3_1BASED]


def test_canonical_order_small_ranks():
    assert canonical_order(1) == ((0,),)
    assert canonical_order(2) == ((0, 1), (1, 0))


def test_canonical_order_rejects_rank_zero():
    with pytest.raises(ValueError):
        canonical_order(0)


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_canonical_order_distinct_identity_first(n):
    order = canonical_order(n)
    assert len(set(order)) == len(order)
    assert order[0] == identity(n)


def test_compose_examples():
    c = perm_from_1based([3, 1, 2])
    assert compose(c, c) == perm_from_1based([2, 3, 1])  # 3-cycle squared
    assert compose(c, identity(3)) == c
    t = perm_from_1based([1, 3, 2])
    assert compose(t, t) == identity(3)  # transposition is an involution


def test_compose_size_mismatch():
    with pytest.raises(ValueError):
        compose((0, 1), (0, 1, 2))


def test_invert_examples():
    assert invert(perm_from_1based([3, 1, 2])) == perm_from_1based([2, 3, 1])
    assert invert(identity(4)) == identity(4)
    rev = perm_from_1based([3, 2, 1])
    assert invert(rev) == rev


def test_apply_to_index_examples():
    x = ("al", "mu", "nu")
    assert apply_to_index(perm_from_1based([3, 1, 2]), x) == ("nu", "al", "mu")
    assert apply_to_index(identity(3), x) == x
    assert apply_to_index(perm_from_1based([1, 3, 2]), (0, 1, 2)) == (0, 2, 1)


def test_apply_to_index_length_mismatch():
    with pytest.raises(ValueError):
        apply_to_index((0, 1, 2), (5, 6))


def test_parity_examples():
    assert parity(identity(3)) == 1
    assert parity(perm_from_1based([1, 3, 2])) == -1
    assert parity(perm_from_1based([3, 1, 2])) == 1


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_group_laws_exhaustive(n):
    table = perm_table(n)
    m = len(table)
    e = table.index[identity(n)]
    assert e == 0
    for i in range(m):
        assert table.compose_index[i][0] == i
        assert table.compose_index[0][i] == i
        assert table.compose_index[i][table.inverse_index[i]] == 0
        assert table.compose_index[table.inverse_index[i]][i] == 0
    for i, j, k in itertools.product(range(m), repeat=3):
        left = table.compose_index[table.compose_index[i][j]][k]
        right = table.compose_index[i][table.compose_index[j][k]]
        assert left == right


@pytest.mark.parametrize("n", [2, 3, 4])
def test_parity_multiplicative(n):
    table = perm_table(n)
    for i in range(len(table)):
        for j in range(len(table)):
            assert (
                table.parities[table.compose_index[i][j]]
                == table.parities[i] * table.parities[j]
            )


def test_action_convention_exhaustive_rank3_dim2():
    order = canonical_order(3)
    for p in order:
        for q in order:
            pq = compose(p, q)
            for x in itertools.product(range(2), repeat=3):
                assert apply_to_index(pq, x) == apply_to_index(q, apply_to_index(p, x))


def test_table_matches_direct_composition():
    table = perm_table(3)
    for i, p in enumerate(table.order):
        assert invert(p) == table.order[table.inverse_index[i]]
        for j, q in enumerate(table.order):
            assert compose(p, q) == table.order[table.compose_index[i][j]]


def test_one_based_round_trip():
    for p in canonical_order(4):
        assert perm_from_1based(perm_to_1based(p)) == p
    with pytest.raises(ValueError):
        perm_from_1based([1, 1, 2])
