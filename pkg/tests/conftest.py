"""Shared builders for random permutations, groups and tree-pair elements."""

import random

import pytest

from neretin.almost import AlmostAutomorphism, compose
from neretin.perm import Permutation, PermGroup
from neretin.tree import BallSpec, ball_aut_generators, sphere_addresses


def random_perm(rng: random.Random, k: int) -> Permutation:
    img = list(range(k))
    rng.shuffle(img)
    return Permutation(img)


def random_antichain(rng: random.Random, d: int, size: int) -> list[tuple]:
    """Complete antichain with ``size`` leaves grown by random caret splits."""
    leaves = [(0,), (1,)]
    while len(leaves) + d - 1 <= size:
        leaf = leaves.pop(rng.randrange(len(leaves)))
        leaves.extend(leaf + (c,) for c in range(d))
    return sorted(leaves)


def random_tree_pair(rng: random.Random, d: int = 2, carets: int = 3) -> AlmostAutomorphism:
    """A random finitary element, usually outside O."""
    size = 2 + carets * (d - 1)
    dom = random_antichain(rng, d, size)
    rng_leaves = random_antichain(rng, d, size)
    rng.shuffle(rng_leaves)
    return AlmostAutomorphism(d, dict(zip(dom, rng_leaves)))


_BALL_GROUPS: dict = {}


def _ball_group(d: int, m: int) -> PermGroup:
    if (d, m) not in _BALL_GROUPS:
        spec = BallSpec(d, m)
        _BALL_GROUPS[d, m] = PermGroup(ball_aut_generators(spec), spec.k)
    return _BALL_GROUPS[d, m]


def random_O_element(rng: random.Random, d: int, n: int, extra: int = 2) -> AlmostAutomorphism:
    """A random element of O_n: a lifted permutation of K_n times deeper ball automorphisms."""
    g = AlmostAutomorphism.from_sphere_permutation(d, n, random_perm(rng, 2 * d ** n))
    for m in range(n + 1, n + 1 + extra):
        if rng.random() < 0.7:
            s = _ball_group(d, m).random_element(rng)
            g = compose(g, AlmostAutomorphism.from_sphere_permutation(d, m, s))
    return g


def leaf_count(d: int, n: int) -> int:
    return len(sphere_addresses(d, n))


@pytest.fixture
def rng():
    return random.Random(20240611)


# -- certificate mutations ---------------------------------------------------


def single_field_mutations(cert):
    """Every certificate with exactly one field altered, labelled by field.

    ``truncation_L`` is provenance only and is not mutated.
    """
    from neretin.verifier import KINDS, ObstructionCertificate

    base = cert.to_json()

    def variant(**changes):
        return ObstructionCertificate.from_json({**base, **changes})

    out = []
    for kind in KINDS:
        if kind != cert.kind:
            out.append(("kind", variant(kind=kind)))
    out.append(("kind", variant(kind="Unknown")))
    for dn in (-1, 1):
        out.append(("n", variant(n=cert.n + dn)))
        out.append(("m", variant(m=cert.m + dn)))
    k = cert.witness_perms[0].degree
    extra = Permutation.from_cycles([(k - 2, k - 1)], k)
    for i, w in enumerate(cert.witness_perms):
        ws = list(base["witness_perms"])
        ws[i] = (w * extra).to_json()
        out.append(("witness_perms", variant(witness_perms=ws)))
    out.append(("witness_perms", variant(witness_perms=base["witness_perms"][:-1] or [])))
    tampered = AlmostAutomorphism.from_sphere_permutation(cert.lift.d, cert.n, extra)
    out.append(("lift", variant(lift=compose(cert.lift, tampered).to_json())))
    out.append(("lift", variant(lift=AlmostAutomorphism.identity(cert.lift.d).to_json())))
    for key in base["checks"]:
        out.append(("checks", variant(checks={**base["checks"], key: not base["checks"][key]})))
    out.append(("checks", variant(checks={})))
    return out


# -- acceptance summary ------------------------------------------------------

ACCEPTANCE_NOTES: dict[int, str] = {}


@pytest.fixture
def note():
    """Record a one-line measurement for an acceptance criterion."""
    def record(number: int, text: str) -> None:
        ACCEPTANCE_NOTES[number] = text
    return record


def pytest_terminal_summary(terminalreporter):
    outcomes = {}
    for status in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(status, []):
            nodeid = getattr(rep, "nodeid", "")
            if "test_acceptance.py::test_criterion_" not in nodeid or rep.when not in ("call", "setup"):
                continue
            name = nodeid.split("::")[-1]
            number = int(name.split("_")[2])
            if outcomes.get(number, ("passed",))[0] == "passed":
                outcomes[number] = (status, name)
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(outcomes):
        status, name = outcomes[number]
        mark = "PASS" if status == "passed" else "FAIL"
        detail = ACCEPTANCE_NOTES.get(number, "")
        terminalreporter.write_line(f"criterion {number:2d} {mark}  {name}  {detail}".rstrip())
