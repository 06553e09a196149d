"""Group arithmetic and ball enumeration."""

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from prodset_lab.errors import BallCapError, GroupMismatchError
from prodset_lab.groups import (
    Ball,
    CyclicProduct,
    FreeGroup,
    IntegerLattice,
    format_group,
    parse_group,
    reduce_word,
)

F2 = FreeGroup(2)
F3 = FreeGroup(3)
Z = IntegerLattice(1)
Z4 = CyclicProduct((4,))


def naive_reduce(letters):
    """Oracle: scan repeatedly for adjacent cancelling pairs."""
    word = list(letters)
    changed = True
    while changed:
        changed = False
        for i in range(len(word) - 1):
            if word[i] == -word[i + 1]:
                del word[i : i + 2]
                changed = True
                break
    return tuple(word)


def random_element(group, rng):
    if isinstance(group, IntegerLattice):
        return tuple(int(v) for v in rng.integers(-20, 21, size=group.dimension))
    if isinstance(group, CyclicProduct):
        return tuple(int(rng.integers(0, m)) for m in group.moduli)
    length = int(rng.integers(0, 9))
    letters = []
    for _ in range(length):
        s = int(rng.integers(1, group.rank + 1))
        if rng.integers(0, 2):
            s = -s
        letters.append(s)
    return reduce_word(letters)


def test_mul_examples():
    assert Z.mul((3,), (5,)) == (8,)
    assert F2.mul((1,), (-1,)) == ()
    # (ab) * (b^-1 a) -> aa, checked against the scan-reducer oracle
    expected = naive_reduce((1, 2, -2, 1))
    assert expected == (1, 1)
    assert F2.mul((1, 2), (-2, 1)) == expected


def test_inv_examples():
    assert Z.inv((7,)) == (-7,)
    assert F2.inv((1, 2)) == (-2, -1)
    assert Z4.inv((3,)) == (1,)


def test_mul_mismatch_raises():
    with pytest.raises(GroupMismatchError):
        IntegerLattice(2).mul((1, 2), (1,))
    with pytest.raises(GroupMismatchError):
        F2.mul((1,), (0,))
    with pytest.raises(GroupMismatchError):
        F2.mul((1, -1), (1,))  # unreduced payload
    with pytest.raises(GroupMismatchError):
        Z4.mul((4,), (0,))


@pytest.mark.parametrize("group", [Z, IntegerLattice(2), Z4, CyclicProduct((2, 3)), F2, F3])
def test_group_axioms_seeded(group):
    rng = np.random.default_rng(20240 + hash(repr(group)) % 1000)
    e = group.identity
    for _ in range(1000):
        g = random_element(group, rng)
        h = random_element(group, rng)
        k = random_element(group, rng)
        assert group.mul(group.mul(g, h), k) == group.mul(g, group.mul(h, k))
        assert group.mul(g, e) == g
        assert group.mul(e, g) == g
        assert group.mul(g, group.inv(g)) == e
        assert group.mul(group.inv(g), g) == e


@given(st.lists(st.sampled_from([1, -1, 2, -2]), max_size=30))
def test_free_reduction_idempotent_and_matches_oracle(letters):
    once = reduce_word(letters)
    assert reduce_word(once) == once
    assert once == naive_reduce(letters)
    assert F2.contains(once)


def test_ball_f2_radius1():
    ball = F2.ball(1)
    assert ball.elements == ((), (1,), (-1,), (2,), (-2,))
    assert len(ball) == 5


def test_ball_f2_radius2_matches_brute_enumeration():
    # Oracle: reduce every raw string of length <= 2 over the 4 letters.
    raw = set()
    letters = [1, -1, 2, -2]
    for n in range(3):
        for combo in itertools.product(letters, repeat=n):
            raw.add(naive_reduce(combo))
    ball = F2.ball(2)
    assert set(ball.elements) == raw
    assert len(ball) == 17 == 2 * 3**2 - 1


def test_ball_lattice():
    ball = Z.ball(2)
    assert ball.elements == ((-2,), (-1,), (0,), (1,), (2,))
    b2 = IntegerLattice(2).ball(1)
    assert len(b2) == 9


def test_ball_cyclic():
    assert CyclicProduct((4,)).ball(1).elements == ((0,), (1,), (3,))
    assert set(CyclicProduct((4,)).ball(2).elements) == {(0,), (1,), (2,), (3,)}
    assert len(CyclicProduct((2, 3)).ball(5)) == 6


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_ball_size_formula(rank):
    group = FreeGroup(rank)
    for r in range(7 if rank < 3 else 5):
        assert group.ball_size(r) == len(group.ball(r))
    if rank >= 2:
        k = rank
        for r in range(1, 5):
            assert group.ball_size(r) == 1 + 2 * k * ((2 * k - 1) ** r - 1) // (2 * k - 2)


def test_ball_nesting_and_identity():
    prev = set()
    for r in range(4):
        cur = set(F2.ball(r).elements)
        assert prev <= cur
        prev = cur
    assert F2.ball(0).elements == ((),)


def test_ball_deterministic():
    a = F2.ball(4).elements
    b = F2.ball(4).elements
    assert a == b
    assert Z4.ball(1).elements == Z4.ball(1).elements


def test_ball_cap():
    with pytest.raises(BallCapError):
        F2.ball(10, cap=1000)


def test_power():
    assert Z.power((3,), 4) == (12,)
    assert F2.power((1, 2), -1) == (-2, -1)
    assert Z4.power((3,), 3) == (1,)


def test_word_string_round_trip():
    w = F2.word_from_str("abA")
    assert w == (1, 2, -1)
    assert F2.word_to_str(w) == "abA"
    assert F2.word_from_str("aA") == ()
    with pytest.raises(GroupMismatchError):
        F2.word_from_str("c")


@pytest.mark.parametrize(
    "text,expected",
    [
        ("kind=free,rank=2", F2),
        ("kind=lattice,dim=1", Z),
        ("kind=cyclic,moduli=4x3", CyclicProduct((4, 3))),
    ],
)
def test_parse_format_group(text, expected):
    group = parse_group(text)
    assert group == expected
    assert parse_group(format_group(group)) == group


def test_ball_membership():
    ball = F2.ball(2)
    assert isinstance(ball, Ball)
    assert (1, 2) in ball
    assert (1, 2, 1) not in ball
