"""A compact oracle suite: every check compares two independent computations.

The report is a plain dict with no timings, so equal seeds give equal
reports.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import bounds
from .almost import AlmostAutomorphism, compose, project_level
from .perm import (
    GiantClass,
    Permutation,
    PermGroup,
    brute_force_elements,
    is_prime,
    jordan_classify,
)
from .small_index import classify_alternative
from .tree import BallSpec, ball_aut_generators
from .verifier import (
    CandidateSubgroup,
    ObstructionCertificate,
    alt2_obstruction,
    cocompact_obstruction,
    level_covolume,
    verify_certificate,
)


def _random_perm(rng: random.Random, k: int) -> Permutation:
    img = list(range(k))
    rng.shuffle(img)
    return Permutation(img)


def _check_ball_orders() -> dict:
    rows = []
    for d, n in ((2, 1), (2, 2), (2, 3), (3, 1)):
        spec = BallSpec(d, n)
        order = PermGroup(ball_aut_generators(spec), spec.k).order
        rows.append({"d": d, "n": n, "order": order, "a_n": spec.a, "ok": order == spec.a})
    return {"passed": all(r["ok"] for r in rows), "cases": rows}


def _check_bsgs(rng: random.Random, trials: int = 12) -> dict:
    bad = []
    done = 0
    while done < trials:
        k = rng.randint(3, 7)
        gens = [_random_perm(rng, k) for _ in range(rng.randint(1, 2))]
        G = PermGroup(gens, k)
        elems = brute_force_elements(gens, k)
        done += 1
        if G.order != len(elems):
            bad.append([str(g) for g in gens])
    return {"passed": not bad, "trials": trials, "mismatches": bad}


def _check_covolumes() -> dict:
    A = AlmostAutomorphism
    cases = [("trivial", [], 1, Fraction(3)), ("flip", [A.edge_flip(2)], 1, Fraction(3, 2)),
             ("swap", [A.sibling_swap(2, (0, 0))], 2, Fraction(315, 2))]
    rows = []
    for name, gens, n, expect in cases:
        data = level_covolume(CandidateSubgroup(2, gens, 4), n)
        rows.append({"candidate": name, "n": n, "c_n": f"{data.c_n}",
                     "routes_agree": data.routes_agree, "ok": data.c_n == expect})
    return {"passed": all(r["ok"] and r["routes_agree"] for r in rows), "cases": rows}


def _check_homomorphism(rng: random.Random, trials: int = 40) -> dict:
    spec = BallSpec(2, 2)
    gens = ball_aut_generators(spec)
    fails = 0
    for _ in range(trials):
        s = rng.choice(gens) * rng.choice(gens) * rng.choice(gens)
        t = rng.choice(gens) * rng.choice(gens)
        g = AlmostAutomorphism.from_sphere_permutation(2, 2, s)
        h = AlmostAutomorphism.from_sphere_permutation(2, 2, t)
        if project_level(compose(g, h), 2) != s * t:
            fails += 1
    return {"passed": fails == 0, "trials": trials, "failures": fails}


def _mutations(cert: ObstructionCertificate) -> list[tuple[str, ObstructionCertificate]]:
    j = cert.to_json()
    out = []
    for field, value in (("kind", "Alt1Case" if cert.kind != "Alt1Case" else "Cocompact3"),
                         ("n", cert.n + 1), ("m", cert.m - 1)):
        obj = dict(j)
        obj[field] = value
        out.append((field, obj))
    w = dict(j)
    first = cert.witness_perms[0]
    w["witness_perms"] = [(first * Permutation.from_cycles([(0, 1)], first.degree)).to_json()] \
        + j["witness_perms"][1:]
    out.append(("witness_perms", w))
    lift = cert.lift.expand_to_depth(cert.n)
    keys = sorted(lift)
    lift[keys[-1]], lift[keys[-2]] = lift[keys[-2]], lift[keys[-1]]
    obj = dict(j)
    obj["lift"] = AlmostAutomorphism(cert.lift.d, lift).to_json()
    out.append(("lift", obj))
    obj = dict(j)
    obj["checks"] = {**j["checks"], "nontrivial": False}
    out.append(("checks", obj))
    return [(f, ObstructionCertificate.from_json(o)) for f, o in out]


def _check_certificates(rng: random.Random) -> dict:
    rows = []
    G3 = PermGroup.alternating(range(12), 16)
    certs = [("Cocompact3", cocompact_obstruction(G3, range(12), 3, 2, rng=rng), G3)]
    Z1, Z2 = list(range(0, 32, 2)), list(range(1, 32, 2))
    G4 = PermGroup(PermGroup.alternating(Z1, 32).generators
                   + PermGroup.alternating(Z2, 32).generators, 32)
    certs.append(("Alt2Case", alt2_obstruction(G4, [Z1, Z2], 4, 2, 1 / 16), G4))
    for name, cert, G in certs:
        passed = verify_certificate(cert, G).passed
        caught = {f: not verify_certificate(m, G).passed for f, m in _mutations(cert)}
        rows.append({"kind": name, "verifies": passed, "mutations_rejected": caught})
    ok = all(r["verifies"] and all(r["mutations_rejected"].values()) for r in rows)
    return {"passed": ok, "cases": rows}


def _check_prime_pairs(lo: int = 60, hi: int = 400) -> dict:
    bad = []
    for k in range(lo, hi + 1):
        pr = bounds.prime_pair(k)
        ok = (pr is not None and is_prime(pr.p) and is_prime(pr.q)
              and 10 * pr.p >= 3 * k and pr.q <= k and pr.q >= pr.p + 3 and 2 * pr.q != k + 2)
        if not ok:
            bad.append(k)
    return {"passed": not bad, "range": [lo, hi], "failures": bad}


def _check_jordan(rng: random.Random, trials: int = 20) -> dict:
    bad = []
    for _ in range(trials):
        k = rng.randint(5, 9)
        G = PermGroup([_random_perm(rng, k) for _ in range(2)], k)
        if not G.is_transitive():
            continue
        tag = jordan_classify(G, seed=rng.randrange(2 ** 31)).tag
        fact = 1
        for i in range(2, k + 1):
            fact *= i
        giant = G.order in (fact, fact // 2)
        claims = tag in (GiantClass.ALTERNATING, GiantClass.FULL_SYMMETRIC)
        if claims != giant:
            bad.append({"k": k, "gens": [str(g) for g in G.generators], "tag": tag.value})
    return {"passed": not bad, "trials": trials, "disagreements": bad}


def _check_classification() -> dict:
    sym = PermGroup.symmetric
    C = bounds.choose_constants(100, 2, 0.2)
    fams = {
        "point_stabilizer": (sym(range(1, 12), 12), "Alt1"),
        "sym6_x_sym6": (PermGroup(sym(range(6), 12).generators
                                  + sym(range(6, 12), 12).generators, 12), "Alt2"),
        "sym4_cubed": (PermGroup(sym(range(4), 12).generators + sym(range(4, 8), 12).generators
                                 + sym(range(8, 12), 12).generators, 12), "Unclassified"),
    }
    rows = []
    for name, (G, expect) in fams.items():
        tag = classify_alternative(G, C).tag
        rows.append({"family": name, "verdict": tag, "ok": tag == expect})
    return {"passed": all(r["ok"] for r in rows), "cases": rows}


def run_selftest(seed: int = 0) -> dict:
    rng = random.Random(seed)
    checks = {
        "ball_orders": _check_ball_orders(),
        "bsgs_vs_closure": _check_bsgs(rng),
        "covolume_routes": _check_covolumes(),
        "projection_homomorphism": _check_homomorphism(rng),
        "certificates": _check_certificates(rng),
        "prime_pairs": _check_prime_pairs(),
        "jordan": _check_jordan(rng),
        "classification": _check_classification(),
    }
    return {"seed": seed, "passed": all(c["passed"] for c in checks.values()),
            "checks": checks}
