import pytest

from neretin.perm import Permutation, PermGroup, ValidationError
from neretin.tree import (
    BallSpec,
    SiblingViolation,
    address_index,
    ball_aut_generators,
    descendants,
    format_address,
    index_address,
    parent,
    parent_projection,
    parse_address,
    sphere_addresses,
    sphere_and_ball_counts,
)


def test_counts_examples():
    assert sphere_and_ball_counts(BallSpec(2, 3))[0] == 16
    assert sphere_and_ball_counts(BallSpec(2, 0)) == (2, 2)
    assert BallSpec(2, 2).a == 128
    assert BallSpec(3, 1).a == 72


@pytest.mark.parametrize("d,n", [(1, 0), (2, -1)])
def test_bad_ball_spec(d, n):
    with pytest.raises(ValidationError):
        BallSpec(d, n)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_sphere_recursion(d):
    for n in range(1, 5):
        assert BallSpec(d, n).k == d * BallSpec(d, n - 1).k


@pytest.mark.parametrize("d,n", [(d, n) for d in (2, 3, 4) for n in range(4)] + [(2, 4)])
def test_ball_group_order_matches_closed_form(d, n):
    spec = BallSpec(d, n)
    G = PermGroup(ball_aut_generators(spec), spec.k)
    assert G.order == spec.a


def test_n0_has_only_the_flip():
    (flip,) = ball_aut_generators(BallSpec(3, 0))
    assert flip == Permutation([1, 0])


def test_address_text_round_trip():
    for d in (2, 3):
        for n in range(4):
            for addr in sphere_addresses(d, n):
                assert parse_address(format_address(addr), d) == addr
    assert format_address((0, 0, 1)) == "L01" and format_address((1,)) == "R"
    with pytest.raises(ValidationError):
        parse_address("L2", 2)
    with pytest.raises(ValidationError):
        parse_address("X0", 2)


def test_lexicographic_indexing_and_parents():
    for d in (2, 3):
        for n in range(1, 4):
            leaves = sphere_addresses(d, n)
            assert leaves == sorted(leaves)
            for i, addr in enumerate(leaves):
                assert address_index(addr, d) == i
                assert index_address(i, d, n) == addr
                assert address_index(parent(addr), d) == i // d


def test_descendants_are_contiguous():
    d, n = 3, 3
    for v in sphere_addresses(d, 1):
        idx = [address_index(a, d) for a in descendants(v, d, n - 1)]
        assert idx == list(range(idx[0], idx[0] + d ** (n - 1)))


def test_parent_projection_examples():
    assert parent_projection(Permutation.identity(8), 2, 2) == Permutation.identity(4)
    assert parent_projection(Permutation.parse("(0 1)", 8), 2, 2) == Permutation.identity(4)
    bad = parent_projection(Permutation.parse("(1 2)", 8), 2, 2)
    assert isinstance(bad, SiblingViolation) and bad.sibling_class == (0, 1)
    with pytest.raises(ValidationError):
        parent_projection(Permutation.identity(6), 2, 2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_parent_projection_is_onto_the_smaller_ball(n):
    d = 2
    gens = ball_aut_generators(BallSpec(d, n))
    images = [parent_projection(g, d, n) for g in gens]
    assert all(isinstance(p, Permutation) for p in images)
    assert PermGroup(images, BallSpec(d, n - 1).k).order == BallSpec(d, n - 1).a
    # homomorphism on products of generators
    for g in gens:
        for h in gens:
            assert parent_projection(g * h, d, n) == \
                parent_projection(g, d, n) * parent_projection(h, d, n)
