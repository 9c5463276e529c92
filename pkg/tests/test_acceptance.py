"""Acceptance criteria 1-11, one test each.

Each test records a one-line measurement; the terminal summary prints a
PASS/FAIL line per criterion after the run.
"""

import itertools
import json
import math
import random
import time
from fractions import Fraction

from conftest import random_O_element, random_perm, random_tree_pair, single_field_mutations
from families import NON_GIANTS, brute_force_max_blocks, is_block_system, wreath
from neretin import bounds
from neretin.almost import (
    AlmostAutomorphism as A,
    NotInLevel,
    canonicalize,
    compose,
    in_U_level,
    inverse,
    min_O_level,
    project_level,
)
from neretin.cli import builtin_candidate
from neretin.perm import (
    GiantClass,
    Permutation,
    PermGroup,
    brute_force_elements,
    chained_two_transitivity,
    finest_block_system,
    jordan_classify,
    overlap_condition,
)
from neretin.selftest import run_selftest
from neretin.small_index import classify_alternative
from neretin.tree import BallSpec, ball_aut_generators
from neretin.verifier import (
    CandidateSubgroup,
    ThresholdNotMet,
    alt2_obstruction,
    cocompact_obstruction,
    level_covolume,
    verify_certificate,
)


def trial_division_prime(n):
    if n < 2:
        return False
    i = 2
    while i * i <= n:
        if n % i == 0:
            return False
        i += 1
    return True


def pair_orbit_two_transitive(gens, support):
    """Independent 2-transitivity test: one orbit on ordered pairs of the support."""
    pts = sorted(support)
    start = (pts[0], pts[1])
    seen, stack = {start}, [start]
    while stack:
        x, y = stack.pop()
        for g in gens:
            img = (g(x), g(y))
            if img not in seen:
                seen.add(img)
                stack.append(img)
    return len(seen) == len(pts) * (len(pts) - 1)


# -- 1 ---------------------------------------------------------------------------


def test_criterion_01_ball_group_orders(note):
    t0 = time.perf_counter()
    cases = [(d, n) for d in (2, 3) for n in range(4)] + [(2, 4)]
    bad = []
    for d, n in cases:
        spec = BallSpec(d, n)
        closed = 2 * math.factorial(d) ** (2 * (d ** n - 1) // (d - 1))
        order = PermGroup(ball_aut_generators(spec), spec.k).order
        if not (spec.k == 2 * d ** n and spec.a == closed == order):
            bad.append((d, n))
    assert BallSpec(2, 1).a == 8 and BallSpec(2, 2).a == 128 and BallSpec(3, 1).a == 72
    elapsed = time.perf_counter() - t0
    note(1, f"{len(cases)} (d, n) cases, mismatches {bad}, {elapsed:.2f}s (limit 10s)")
    assert not bad and elapsed < 10


# -- 2 ---------------------------------------------------------------------------


def test_criterion_02_covolume_identity(note):
    rng = random.Random(2)
    cands = {name: builtin_candidate(name, 2, 4) for name in ("trivial", "flip", "swap", "ball")}
    cands["flip+swap"] = CandidateSubgroup(2, [A.edge_flip(2), A.sibling_swap(2, (1, 1))], 4)
    for i in range(3):
        s = random_perm(rng, 8)
        cands[f"random{i}"] = CandidateSubgroup(2, [A.from_sphere_permutation(2, 2, s)], 4)
    checked = 0
    for cand in cands.values():
        for n in (1, 2, 3):
            data = level_covolume(cand, n)
            direct = Fraction(math.factorial(data.k), BallSpec(2, n).a * data.gamma_order)
            assert data.c_n == data.c_n_check == direct
            checked += 1
    assert level_covolume(cands["trivial"], 1).c_n == 3
    assert level_covolume(cands["swap"], 2).c_n == Fraction(315, 2)
    assert level_covolume(cands["flip"], 1).c_n == Fraction(3, 2)
    note(2, f"{len(cands)} candidates x 3 levels = {checked} exact agreements; "
            f"c1=3, c2=315/2, c1=3/2")


# -- 3 ---------------------------------------------------------------------------


def test_criterion_03_algebraic_laws(note):
    rng = random.Random(3)
    trials = 1000
    fails = {"projection": 0, "group_laws": 0, "canonical": 0, "min_level": 0}
    for _ in range(trials):
        n = rng.randint(1, 3)
        g, h = random_O_element(rng, 2, n, 1), random_O_element(rng, 2, n, 1)
        if project_level(compose(g, h), n) != project_level(g, n) * project_level(h, n):
            fails["projection"] += 1
    for _ in range(trials):
        d = rng.choice([2, 3])
        f, g, h = (random_tree_pair(rng, d, rng.randint(1, 4)) for _ in range(3))
        ok = (compose(compose(f, g), h) == compose(f, compose(g, h))
              and compose(g, inverse(g)).is_identity()
              and compose(inverse(g), g).is_identity())
        fails["group_laws"] += not ok
    for _ in range(trials):
        g = random_tree_pair(rng, rng.choice([2, 3]), rng.randint(1, 5))
        c = canonicalize(g)
        deep = g.expand(rng.choice(g.domain))
        ok = canonicalize(c).mapping == c.mapping and canonicalize(deep).mapping == c.mapping
        fails["canonical"] += not ok
    for _ in range(trials):
        n = rng.randint(0, 2)
        g, h = random_O_element(rng, 2, n, 1), random_O_element(rng, 2, n, 1)
        lg, lh = min_O_level(g).min_level, min_O_level(h).min_level
        ok = min_O_level(compose(g, h)).min_level <= max(lg, lh)
        for m in range(lg, lg + 3):
            try:
                project_level(g, m)
            except NotInLevel:
                ok = False
        fails["min_level"] += not ok
    note(3, f"{trials} trials per law, failures {fails}")
    assert not any(fails.values())


# -- 4 ---------------------------------------------------------------------------


def _random_subgroups(rng, count):
    """Random small groups: free draws at degree <= 8 and subgroups of wreath products."""
    parents = [wreath(3, 3), wreath(4, 2), wreath(2, 5), wreath(3, 4)]
    out = []
    while len(out) < count:
        if len(out) % 2:
            k = rng.randint(3, 8)
            gens = [random_perm(rng, k) for _ in range(rng.randint(1, 3))]
        else:
            P = rng.choice(parents)
            k = P.degree
            gens = [P.random_element(rng) for _ in range(rng.randint(1, 2))]
        out.append(PermGroup(gens, k))
    return out


def test_criterion_04_oracle_equivalence(note):
    rng = random.Random(4)
    orders = 0
    for G in _random_subgroups(rng, 100):
        elems = brute_force_elements(G.generators, G.degree, limit=100_000)
        assert len(elems) <= 100_000
        assert G.order == len(elems)
        orders += 1
    blocks = imprimitive = 0
    while blocks < 150:
        if blocks % 3 == 0:
            P = rng.choice([wreath(2, 4), wreath(4, 2), wreath(2, 3), wreath(3, 2)])
            k, gens = P.degree, [P.random_element(rng) for _ in range(rng.randint(1, 3))]
        else:
            k = rng.randint(3, 8)
            gens = [random_perm(rng, k) for _ in range(rng.randint(1, 3))]
        G = PermGroup(gens, k)
        if not G.is_transitive():
            continue
        orbit = tuple(range(k))
        system, expect = finest_block_system(G, orbit), brute_force_max_blocks(G, orbit)
        if expect is None:
            assert system is None
        else:
            imprimitive += 1
            assert system.block_count == expect and is_block_system(G, system.blocks)
        blocks += 1
    note(4, f"{orders} orders equal to exhaustive closure; {blocks} transitive groups "
            f"({imprimitive} imprimitive) match brute-force blocks")


# -- 5 ---------------------------------------------------------------------------


def test_criterion_05_two_cycle_lemma_and_chains(note):
    t0 = time.perf_counter()
    N, primes = 9, [2, 3, 5, 7]
    pairs = failures = 0
    sample = random.Random(5)
    oracle_checked = 0
    for p in primes:
        a = Permutation.from_cycles([tuple(range(p))], N)
        for q in primes:
            for pts in itertools.combinations(range(N), q):
                if not 0 < len(set(pts) & set(range(p))) < min(p, q):
                    continue
                for rest in itertools.permutations(pts[1:]):
                    b = Permutation.from_cycles([(pts[0],) + rest], N)
                    if not overlap_condition(a, b):
                        continue
                    r = chained_two_transitivity([a, b])
                    pairs += 1
                    failures += not r.two_transitive
                    if sample.random() < 0.02:
                        oracle_checked += 1
                        assert pair_orbit_two_transitive([a, b], r.support) == r.two_transitive
    rng = random.Random(55)
    chains = 0
    while chains < 150:
        k = rng.randint(6, 14)
        chain = [Permutation.from_cycles([tuple(rng.sample(range(k), rng.choice([2, 3, 5])))], k)]
        for _ in range(rng.randint(1, 4)):
            for _ in range(100):
                q = rng.choice([c for c in (2, 3, 5, 7, 11, 13) if c <= k])
                c = Permutation.from_cycles([tuple(rng.sample(range(k), q))], k)
                if any(overlap_condition(c, old) for old in chain):
                    chain.append(c)
                    break
        if len(chain) < 2:
            continue
        r = chained_two_transitivity(chain)
        failures += not r.two_transitive
        assert pair_orbit_two_transitive(chain, r.support)
        chains += 1
    elapsed = time.perf_counter() - t0
    note(5, f"{pairs} overlapping prime-cycle pairs in Sym(9) (first cycle standard), "
            f"{chains} random chains, {failures} failures, {elapsed:.1f}s (limit 60s)")
    assert failures == 0 and elapsed < 60


# -- 6 ---------------------------------------------------------------------------


def _jordan_groups(rng):
    groups = [factory() for factory, _ in NON_GIANTS.values()]
    for k in range(5, 13):
        groups += [PermGroup.alternating(range(k), k), PermGroup.symmetric(range(k), k)]
    parents = [factory() for factory, _ in NON_GIANTS.values()]
    while len(groups) < 200:
        if rng.random() < 0.5:
            P = rng.choice(parents)
            G = PermGroup([P.random_element(rng) for _ in range(2)], P.degree)
        else:
            k = rng.randint(5, 12)
            G = PermGroup([random_perm(rng, k) for _ in range(2)], k)
        if G.is_transitive():
            groups.append(G)
    return groups


def test_criterion_06_jordan_against_exact_order(note):
    rng = random.Random(6)
    groups = _jordan_groups(rng)
    giants = {GiantClass.ALTERNATING, GiantClass.FULL_SYMMETRIC}
    false_giants = disagreements = inconclusive = n_giant = 0
    for G in groups:
        fact = math.factorial(G.degree)
        truly = G.order in (fact, fact // 2)
        n_giant += truly
        fast = jordan_classify(G, budget=3000, seed=rng.randrange(2 ** 31), exact=False).tag
        if fast is GiantClass.INCONCLUSIVE:
            inconclusive += 1
        elif (fast in giants) != truly:
            disagreements += 1
        false_giants += fast in giants and not truly
        full = jordan_classify(G, budget=3000).tag
        disagreements += (full in giants) != truly
    note(6, f"{len(groups)} groups of degree 5-12 ({n_giant} giants): "
            f"{disagreements} disagreements, {false_giants} false giants, "
            f"{inconclusive} inconclusive without the order fallback")
    assert len(groups) == 200 and disagreements == 0 and false_giants == 0


# -- 7 ---------------------------------------------------------------------------


def test_criterion_07_cocompact_certificate(note):
    t0 = time.perf_counter()
    G = PermGroup.alternating(range(12), 16)
    cert = cocompact_obstruction(G, range(12), 3, 2)
    assert verify_certificate(cert, G).passed
    rng = random.Random(7)
    drawn = set()
    for _ in range(20):
        c = cocompact_obstruction(G, range(12), 3, 2, rng=rng)
        drawn.add(str(c.witness_perms[0]))
        assert verify_certificate(c, G).passed
    mutants = single_field_mutations(cert)
    survived = [f for f, m in mutants if verify_certificate(m, G).passed]
    elapsed = time.perf_counter() - t0
    note(7, f"lexicographic + 20 random ({len(drawn)} distinct) certificates verify; "
            f"{len(mutants)} single-field mutations, {len(survived)} accepted; "
            f"{elapsed:.2f}s (limit 5s)")
    assert not survived and elapsed < 5


# -- 8 ---------------------------------------------------------------------------


def test_criterion_08_alt2_certificate(note):
    t0 = time.perf_counter()
    Z1, Z2 = list(range(0, 32, 2)), list(range(1, 32, 2))
    G = PermGroup(PermGroup.alternating(Z1, 32).generators
                  + PermGroup.alternating(Z2, 32).generators, 32)
    cert = alt2_obstruction(G, [Z1, Z2], 4, 2, 1 / 16)
    assert cert.kind == "Alt2Case" and cert.m == 2
    assert in_U_level(cert.lift, 2) and not cert.lift.is_identity()
    proj = project_level(cert.lift, 4)
    per_part = [sorted(len(c) for c in proj.cycles() if c[0] % 2 == i) for i in (0, 1)]
    assert per_part == [[2, 2], [2, 2]]
    restricted = [Permutation([proj(x) if x % 2 == i else x for x in range(32)]) for i in (0, 1)]
    assert all(r.parity == 0 for r in restricted)
    assert G.contains(proj) and all(r in G for r in restricted)
    assert verify_certificate(cert, G).passed
    Y1, Y2 = list(range(0, 16, 2)), list(range(1, 16, 2))
    G3 = PermGroup(PermGroup.alternating(Y1, 16).generators
                   + PermGroup.alternating(Y2, 16).generators, 16)
    low = alt2_obstruction(G3, [Y1, Y2], 3, 2, 1 / 16)
    assert isinstance(low, ThresholdNotMet) and "threshold not met" in low.reason
    elapsed = time.perf_counter() - t0
    note(8, f"lift in U_2, two transpositions per part, BSGS membership; n=3: "
            f"'{low.reason}'; {elapsed:.2f}s (limit 30s)")
    assert elapsed < 30


# -- 9 ---------------------------------------------------------------------------


def test_criterion_09_classification_families(note):
    sym = PermGroup.symmetric
    C = bounds.choose_constants(100, 2, 0.2)
    fams = {
        "point stabilizer": (sym(range(11), 12), "Alt1"),
        "Sym(6)^2": (PermGroup(sym(range(6), 12).generators + sym(range(6, 12), 12).generators,
                               12), "Alt2"),
        "Sym(4)^3": (PermGroup([g for b in (range(4), range(4, 8), range(8, 12))
                                for g in sym(b, 12).generators], 12), "Unclassified"),
    }
    got = {}
    for name, (G, expect) in fams.items():
        v = classify_alternative(G, C)
        got[name] = v.tag
        assert v.tag == expect
        for pts, ws in zip(v.sets, v.witnesses):
            assert all(w in G for w in ws)
            assert PermGroup(ws, 12).order == math.factorial(len(pts)) // 2
        if expect == "Unclassified":
            mt = v.diagnostics["mass_transfer"]
            assert mt["monotone"] and mt["reduced_parts"] == [6, 4, 2]
            got[name] += f" (mass-transfer log2 bound {mt['log2_lower_bound']:.2f})"
    note(9, "; ".join(f"{k} -> {v}" for k, v in got.items()))


# -- 10 --------------------------------------------------------------------------


def test_criterion_10_analytic_suite(note):
    t0 = time.perf_counter()
    assert bounds.entropy([0.5, 0.5]) == 1
    n = 10_000
    dev = abs(bounds.log2_multinomial([n // 2, n // 2]) / n - 1)
    assert dev <= 0.01
    merges = 0
    for total in range(2, 31):
        for parts in _partitions(total):
            for i, j in itertools.permutations(range(len(parts)), 2):
                if parts[i] >= parts[j] > 0:
                    moved = list(parts)
                    moved[i] += 1
                    moved[j] -= 1
                    assert bounds.multinomial(moved) <= bounds.multinomial(parts)
                    merges += 1
    y = 10_000
    rep = bounds.block_bound_and_unimodularity(y, y // 2, 2, 0.1)
    steps = [bounds.ln_g(y, x + 1) - bounds.ln_g(y, x) for x in range(1, y // 2)]
    assert rep.h_prime_decreasing and all(a > b for a, b in zip(steps, steps[1:]))
    bad = []
    for k in range(60, 5001):
        pr = bounds.prime_pair(k)
        ok = (pr is not None and trial_division_prime(pr.p) and trial_division_prime(pr.q)
              and 10 * pr.p >= 3 * k and pr.q <= k and pr.q >= pr.p + 3 and 2 * pr.q != k + 2)
        if not ok:
            bad.append(k)
    elapsed = time.perf_counter() - t0
    note(10, f"H=1 exact; binomial deviation {dev:.4f}; {merges} merge moves; h' decreasing; "
             f"prime pairs 60..5000 failures {len(bad)}; {elapsed:.1f}s (limit 60s)")
    assert not bad and elapsed < 60


def _partitions(total, largest=None):
    """Integer partitions of ``total`` in non-increasing order."""
    largest = total if largest is None else largest
    if total == 0:
        yield []
        return
    for first in range(min(total, largest), 0, -1):
        for rest in _partitions(total - first, first):
            yield [first] + rest


# -- 11 --------------------------------------------------------------------------


def test_criterion_11_selftest_determinism(note):
    first = json.dumps(run_selftest(seed=11), sort_keys=True).encode()
    second = json.dumps(run_selftest(seed=11), sort_keys=True).encode()
    assert json.loads(first)["passed"]
    note(11, f"two seeded self-test reports, {len(first)} bytes each, identical={first == second}")
    assert first == second
