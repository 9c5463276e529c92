import random

import pytest

from conftest import random_O_element, random_perm, random_tree_pair
from neretin.almost import (
    AlmostAutomorphism as A,
    NotInLevel,
    canonicalize,
    cayley_ball,
    compose,
    evaluate_word,
    in_U_level,
    inverse,
    min_O_level,
    project_level,
)
from neretin.perm import Permutation, PermGroup, ValidationError
from neretin.tree import BallSpec, address_index, ball_aut_generators, sphere_size

L, R = 0, 1


def swap_below_L0():
    return A.sibling_swap(2, (L, 0))


# -- canonical forms -----------------------------------------------------------


def test_identity_collapses_to_the_edge():
    mp = {(s, a, b): (s, a, b) for s in (0, 1) for a in (0, 1) for b in (0, 1)}
    c = canonicalize(A(2, mp))
    assert c.mapping == {(L,): (L,), (R,): (R,)}
    assert c.is_identity()


def test_swap_presented_deep_collapses_to_depth_two():
    g = swap_below_L0()
    deep = A(2, {u: v for u, v in g.expand_to_depth(3).items()})
    c = canonicalize(deep)
    assert c.mapping == {(L, 0, 0): (L, 0, 1), (L, 0, 1): (L, 0, 0), (L, 1): (L, 1), (R,): (R,)}
    assert c.max_depth() == 2


def test_canonicalize_is_idempotent(rng):
    for _ in range(300):
        g = random_tree_pair(rng, rng.choice([2, 3]), rng.randint(1, 5))
        c = canonicalize(g)
        assert canonicalize(c).mapping == c.mapping
        assert c.is_canonical()


def test_canonical_form_survives_expansion(rng):
    for _ in range(300):
        g = random_tree_pair(rng, 2, rng.randint(1, 5))
        h = g
        for _ in range(rng.randint(1, 4)):
            h = h.expand(rng.choice(h.domain))
        assert h == g and hash(h) == hash(g)
        assert canonicalize(h).to_json() == canonicalize(g).to_json()


@pytest.mark.parametrize("mp", [
    {(L,): (L,)},                                          # incomplete
    {(L,): (L,), (L, 0): (R,)},                            # not an antichain
    {(L,): (L,), (R,): (L,)},                              # not injective
    {(L,): (L, 0), (R,): (R,)},                            # range incomplete
])
def test_invalid_tree_pairs(mp):
    with pytest.raises(ValidationError):
        A(2, mp)


def test_json_round_trip_and_validation(rng):
    for _ in range(50):
        g = random_tree_pair(rng, 3, 3)
        assert A.from_json(g.to_json()) == g
    example = {"d": 2, "domain": ["L0", "L1", "R"], "range": ["L", "R0", "R1"],
               "map": [[0, 2], [1, 0], [2, 1]]}
    g = A.from_json(example)
    assert not min_O_level(g).in_O
    unsorted = dict(example, domain=["L1", "L0", "R"])
    with pytest.raises(ValidationError):
        A.from_json(unsorted)
    with pytest.raises(ValidationError):
        A.from_json(dict(example, map=[[0, 2], [1, 2], [2, 1]]))


# -- group law -----------------------------------------------------------------


def test_group_laws(rng):
    for _ in range(300):
        d = rng.choice([2, 3])
        f, g, h = (random_tree_pair(rng, d, rng.randint(1, 4)) for _ in range(3))
        assert compose(compose(f, g), h) == compose(f, compose(g, h))
        assert compose(g, inverse(g)).is_identity()
        assert compose(inverse(g), g).is_identity()
        assert compose(g, A.identity(d)) == g == compose(A.identity(d), g)


def test_composition_applies_the_right_factor_first(rng):
    for _ in range(100):
        g, h = random_tree_pair(rng), random_tree_pair(rng)
        gh = compose(g, h)
        for addr in gh.domain:
            deep = addr + (0, 1, 1, 0)
            assert gh(deep) == g(h(deep))


def test_disjoint_swaps_commute():
    a, b = A.sibling_swap(2, (L, 0)), A.sibling_swap(2, (R, 1))
    assert compose(a, b) == compose(b, a)
    assert compose(a, b) != a


def test_flip_is_an_involution():
    f = A.edge_flip(3)
    assert compose(f, f).is_identity()


def test_branching_mismatch():
    with pytest.raises(ValidationError):
        compose(A.identity(2), A.identity(3))


# -- levels --------------------------------------------------------------------


def test_min_level_examples():
    assert min_O_level(A.identity(2)).min_level == 0
    thompson = A(2, {(L,): (L, 0), (R, 0): (L, 1), (R, 1): (R,)})
    assert min_O_level(thompson).min_level is None
    across = A.from_sphere_permutation(2, 1, Permutation.parse("(0 2)", 4))
    assert min_O_level(across).min_level == 1
    within = A.from_sphere_permutation(2, 1, Permutation.parse("(0 1)", 4))
    assert min_O_level(within).min_level == 0


def _blocks_respected(g, m):
    """Independent check that g maps every level-m vertex's subtree onto one."""
    depth = max(m, g.max_depth())
    w = g.d ** (depth - m)
    image_of = {}
    for u, v in g.canonical().expand_to_depth(depth).items():
        if len(u) != len(v):
            return False
        i, j = address_index(u, g.d), address_index(v, g.d)
        if image_of.setdefault(i // w, j // w) != j // w:
            return False
    return True


def test_min_level_matches_independent_block_check(rng):
    for _ in range(300):
        g = random_O_element(rng, 2, rng.randint(0, 2))
        n = min_O_level(g).min_level
        for m in range(n, n + 3):
            assert _blocks_respected(g, m)
            project_level(g, m)
        if n > 0:
            assert not _blocks_respected(g, n - 1)
            with pytest.raises(NotInLevel):
                project_level(g, n - 1)


def test_projection_examples():
    for n in range(4):
        assert project_level(A.identity(2), n) == Permutation.identity(sphere_size(2, n))
    assert project_level(swap_below_L0(), 2) == Permutation.parse("(0 1)", 8)
    assert project_level(A.edge_flip(2), 1) == Permutation.parse("(0 2)(1 3)", 4)
    with pytest.raises(NotInLevel):
        project_level(A(2, {(L,): (L, 0), (R, 0): (L, 1), (R, 1): (R,)}), 3)


def test_projection_is_a_homomorphism(rng):
    for _ in range(200):
        n = rng.randint(1, 3)
        g, h = random_O_element(rng, 2, n), random_O_element(rng, 2, n)
        assert project_level(compose(g, h), n) == project_level(g, n) * project_level(h, n)


def test_lift_projects_back(rng):
    for d, n in ((2, 3), (3, 2)):
        for _ in range(30):
            s = random_perm(rng, sphere_size(d, n))
            assert project_level(A.from_sphere_permutation(d, n, s), n) == s


def test_U_level_examples():
    g = swap_below_L0()
    assert in_U_level(g, 1) and not in_U_level(g, 2)
    for n in range(1, 5):
        assert in_U_level(A.identity(2), n)
        assert not in_U_level(A.edge_flip(2), n)


def test_kernel_consistency(rng):
    for _ in range(200):
        n = rng.randint(1, 2)
        g = random_O_element(rng, 2, n)
        top = A.from_sphere_permutation(2, n, project_level(g, n))
        u = compose(g, inverse(top))
        assert project_level(u, n).is_identity()
        assert in_U_level(u, n) and in_U_level(u, n - 1)
        assert in_U_level(g, n) == project_level(g, n).is_identity()


def test_ball_lifts_surject_onto_the_ball_group():
    for n in (1, 2, 3):
        spec = BallSpec(2, n)
        lifts = [A.from_sphere_permutation(2, n, s) for s in ball_aut_generators(spec)]
        assert all(min_O_level(g).min_level == 0 for g in lifts)
        images = [project_level(g, n) for g in lifts]
        assert PermGroup(images, spec.k).order == spec.a


# -- Cayley balls ----------------------------------------------------------------


def test_cayley_ball_examples():
    assert len(cayley_ball([A.edge_flip(2)], 5)) == 2
    ball = cayley_ball([A.sibling_swap(2, (L, 0)), A.sibling_swap(2, (R, 1))], 2)
    assert len(ball) == 4 and ball.saturated is False
    assert len(cayley_ball([], 3)) == 1
    with pytest.raises(ValidationError):
        cayley_ball([], -1)


def test_cayley_ball_words_are_shortest_and_correct(rng):
    gens = [random_tree_pair(rng, 2, 2) for _ in range(2)]
    ball = cayley_ball(gens, 3)
    for g, word in ball.elements.items():
        assert evaluate_word(gens, word, 2) == g
        assert len(word) <= 3
    prev = cayley_ball(gens, 2)
    for g in prev:
        assert len(ball.word(g)) == len(prev.word(g))


def test_cayley_ball_cap_flags_truncation():
    gens = [A(2, {(L,): (L, 0), (R, 0): (L, 1), (R, 1): (R,)}), A.edge_flip(2)]
    ball = cayley_ball(gens, 8, cap=20)
    assert ball.truncated and len(ball) == 20
