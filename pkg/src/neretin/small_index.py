"""Subgroups of Sym(K) of index at most c * d^|K|.

Given such a group the routines here look for alternating groups sitting
inside it on large point sets, and report which of two outcomes holds:

* ``Alt1``: one set Z with |Z| > |K|/d + 2 and Alt(Z) inside the group;
* ``Alt2``: d disjoint sets covering more than (1 - alpha)|K| whose
  alternating groups all lie inside the group.

Every returned witness is checked by exact membership.  At desk scale the
asymptotic thresholds of the underlying argument are not reached, so when
neither outcome can be exhibited the verdict is ``Unclassified`` together
with the diagnostics that would have forced a verdict for large |K|.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import bounds
from .bounds import BoundConstants, prime_pair
from .perm import (
    GiantClass,
    Permutation,
    PermGroup,
    ValidationError,
    chained_two_transitivity,
    contains_alt_on,
    find_prime_cycles,
    finest_block_system,
    is_prime,
    jordan_classify,
)

log = logging.getLogger(__name__)

# Orbits and blocks smaller than this carry a trivial alternating group.
MIN_SET = 3


class HypothesisViolation(ValueError):
    """The index bound [Sym(K):L] <= c d^|K| fails."""


def index_bound_holds(G: PermGroup, c: float, d: int) -> bool:
    """Exact check of ``[Sym(K):G] <= c d^k`` (c may be fractional)."""
    idx = G.index_in_sym
    frac = Fraction(c).limit_denominator(10 ** 12) if not isinstance(c, int) else c
    return idx <= frac * d ** G.degree


def _require_index(G: PermGroup, c: float, d: int) -> None:
    if not index_bound_holds(G, c, d):
        raise HypothesisViolation(
            f"index {G.index_in_sym} exceeds c*d^k = {c}*{d}^{G.degree}")


# ---------------------------------------------------------------------------


@dataclass
class OrbitAnalysis:
    eps: float
    delta: float
    large_orbits: list[tuple[int, ...]]
    small_orbits: list[tuple[int, ...]]
    coverage: float
    covered: bool                       # coverage >= 1 - delta
    log2_index_lower: float | None      # multinomial over the small orbits
    log2_chain_bound: float | None      # delta k log2(10 (d+1)^(1/delta))
    chain_applicable: bool              # every small orbit has size < eps k
    log2_hypothesis: float | None       # log2(c d^k) when c is known


def large_orbit_analysis(G: PermGroup, d: int, delta: float,
                         c: float | None = None) -> OrbitAnalysis:
    """Orbits of size at least eps|K| (eps = f1(d, delta)) and their coverage.

    Orbits with fewer than three points are never counted as large.
    """
    if not 0 < delta <= 1:
        raise ValidationError("delta must lie in (0, 1]")
    k = G.degree
    eps = bounds.f1(d, delta)
    large, small = [], []
    for o in G.orbits():
        (large if len(o) >= max(eps * k, MIN_SET) else small).append(o)
    cov = sum(map(len, large)) / k
    covered = cov >= 1 - delta - bounds.SLACK
    lower = chain = None
    applicable = False
    if not covered:
        lower = bounds.log2_multinomial([len(o) for o in small])
        chain = delta * k * (math.log2(10) + math.log2(d + 1) / delta)
        applicable = all(len(o) < eps * k for o in small)
    hyp = math.log2(c) + k * math.log2(d) if c is not None else None
    return OrbitAnalysis(eps, delta, large, small, cov, covered, lower, chain,
                         applicable, hyp)


# ---------------------------------------------------------------------------


@dataclass
class LSet:
    points: tuple[int, ...]
    orbit: tuple[int, ...]
    block_index: int
    witnesses: list[Permutation]


@dataclass
class LCollection:
    degree: int
    sets: list[LSet]
    ignored: list[tuple[int, ...]]      # orbits or blocks too small to matter
    coverage: float
    properties: dict[str, bool]
    failure: str | None = None          # first failing property, if any
    missing_alt: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def point_sets(self) -> list[tuple[int, ...]]:
        return [s.points for s in self.sets]


def extract_L(G: PermGroup, constants: BoundConstants) -> LCollection:
    """Blocks of the finest block systems of the large orbits, Alt-witnessed.

    Sets without their alternating group inside ``G`` are left out of the
    collection and listed in ``missing_alt``.
    """
    d, c = constants.d, constants.c
    _require_index(G, c, d)
    k = G.degree
    eps = constants.eps
    sets: list[LSet] = []
    ignored: list[tuple[int, ...]] = []
    missing: list[tuple[int, ...]] = []
    for orbit in G.orbits():
        if len(orbit) < max(eps * k, MIN_SET):
            ignored.append(orbit)
            continue
        system = finest_block_system(G, orbit)
        blocks = system.blocks if system is not None else (orbit,)
        for i, block in enumerate(blocks):
            if len(block) < MIN_SET:
                ignored.append(block)
                continue
            wit = contains_alt_on(G, block)
            if wit.holds:
                sets.append(LSet(block, orbit, i, wit.witnesses))
            else:
                missing.append(block)
    union = sum(len(s.points) for s in sets)
    coverage = union / k
    props = {
        "coverage": coverage >= 1 - constants.delta - bounds.SLACK,
        "index": _prop_index(sets, constants),
        "alt_contained": not missing,
        "count": math.log(max(len(sets), 1)) <= constants.ln_V0 + bounds.SLACK,
        "set_size": all(math.log(len(s.points) / k) >= constants.ln_eps0 - bounds.SLACK
                        for s in sets),
    }
    failure = next((name for name, ok in props.items() if not ok), None)
    return LCollection(k, sets, ignored, coverage, props, failure, missing)


def _prop_index(sets: list[LSet], constants: BoundConstants) -> bool:
    """ln [Sym(union) : prod Alt(Z)] <= ln C + k ln d."""
    if not sets:
        return True
    sizes = [len(s.points) for s in sets]
    ln_idx = bounds.log2_multinomial(sizes) * bounds.LN2 + len(sizes) * bounds.LN2
    k = sum(sizes)
    return ln_idx <= constants.ln_C + k * math.log(constants.d) + bounds.SLACK


# ---------------------------------------------------------------------------


@dataclass
class AlternativeVerdict:
    tag: str                                  # "Alt1", "Alt2" or "Unclassified"
    sets: list[tuple[int, ...]]
    witnesses: list[list[Permutation]]
    reason: str = ""
    diagnostics: dict = field(default_factory=dict)

    @property
    def classified(self) -> bool:
        return self.tag in ("Alt1", "Alt2")

    def to_json(self) -> dict:
        return {
            "verdict": self.tag,
            "sets": [list(s) for s in self.sets],
            "witnesses": [[str(p) for p in ws] for ws in self.witnesses],
            "reason": self.reason,
            "diagnostics": self.diagnostics,
        }


def _verdict_from_sets(k: int, d: int, alpha: float,
                       sets: list[tuple[tuple[int, ...], list[Permutation]]]) -> AlternativeVerdict | None:
    sets = sorted(sets, key=lambda s: (-len(s[0]), s[0]))
    for pts, wit in sets:
        if len(pts) > k / d + 2:
            return AlternativeVerdict("Alt1", [pts], [wit])
    top = sets[:d]
    union = sum(len(p) for p, _ in top)
    if top and union > (1 - alpha) * k:
        return AlternativeVerdict("Alt2", [p for p, _ in top], [w for _, w in top],
                                  diagnostics={"union": union, "threshold": (1 - alpha) * k})
    return None


def classify_alternative(G: PermGroup, constants: BoundConstants) -> AlternativeVerdict:
    """Alt1 / Alt2 / Unclassified from the collection produced by :func:`extract_L`."""
    L = extract_L(G, constants)
    k, d, alpha = G.degree, constants.d, constants.alpha
    found = _verdict_from_sets(k, d, alpha, [(s.points, s.witnesses) for s in L.sets])
    props = dict(L.properties)
    if found is not None:
        found.diagnostics["properties"] = props
        return found
    sizes = sorted((len(p) for p in L.point_sets), reverse=True)
    diag: dict = {"sizes": sizes, "properties": props,
                  "union_top_d": sum(sizes[:d]), "threshold": (1 - alpha) * k}
    reason = "no set exceeds k/d+2 and the d largest sets do not cover (1-alpha)k"
    if sizes:
        mt = bounds.mass_transfer_bound(sizes, k, d, alpha)
        diag["mass_transfer"] = {
            "reduced_parts": list(mt.reduced),
            "tail_condition": mt.tail_condition,
            "log2_multinomial": mt.log2_original,
            "log2_lower_bound": mt.log2_reduced,
            "monotone": mt.monotone,
            "log2_index_allowance": math.log2(constants.c) + k * math.log2(d),
        }
    if L.failure:
        reason += f"; collection property '{L.failure}' fails at this size"
    return AlternativeVerdict("Unclassified", [], [], reason, diag)


# ---------------------------------------------------------------------------
# The d = 2 route


def _overlap_components(cycles: list[Permutation]) -> list[list[Permutation]]:
    """Connected components of the proper-overlap graph, each in a valid chain order."""
    n = len(cycles)
    supports = [frozenset(c.support()) for c in cycles]
    used = [False] * n
    comps = []
    for s in range(n):
        if used[s]:
            continue
        used[s] = True
        order = [s]
        head = 0
        while head < len(order):
            sa = supports[order[head]]
            head += 1
            for b in range(n):
                if used[b]:
                    continue
                sb = supports[b]
                if sa & sb and not sa <= sb and not sb <= sa:
                    used[b] = True
                    order.append(b)
        comps.append([cycles[i] for i in order])
    return comps


def _disjoint(cycles: list[Permutation]) -> list[Permutation]:
    taken: set = set()
    out = []
    for c in cycles:
        if not taken & set(c.support()):
            out.append(c)
            taken |= set(c.support())
    return out


def _conjugates_by_powers(cp: Permutation, cq: Permutation) -> list[Permutation]:
    out = []
    x = cp
    for _ in range(cq.order()):
        out.append(x)
        x = x.conjugate(cq)
    return out


@dataclass
class Component:
    support: tuple[int, ...]
    cycles: list[Permutation]
    giant: GiantClass
    alt_witness: list[Permutation]


def _giant_components(G: PermGroup, pool: list[Permutation], seed: int,
                      budget: int) -> list[Component]:
    pool = list(dict.fromkeys(pool))
    comps = _overlap_components(pool)
    # components whose supports meet are merged; their union is still 2-transitive
    merged: list[tuple[set, list[Permutation]]] = []
    for comp in comps:
        supp = set().union(*(c.support() for c in comp))
        hits = [m for m in merged if m[0] & supp]
        for m in hits:
            merged.remove(m)
            supp |= m[0]
            comp = comp + m[1]
        merged.append((supp, comp))
    out = []
    for supp, comp in merged:
        if len(comp) < 2:
            continue
        parts = _overlap_components(comp)
        if len(parts) == 1 and not chained_two_transitivity(parts[0]).two_transitive:
            continue
        pts = tuple(sorted(supp))
        H = PermGroup(comp, G.degree).restrict(pts)
        if not H.is_transitive():
            continue
        jr = jordan_classify(H, budget=budget, seed=seed)
        if jr.tag not in (GiantClass.ALTERNATING, GiantClass.FULL_SYMMETRIC):
            continue
        wit = contains_alt_on(G, pts)
        if wit.holds:
            out.append(Component(pts, comp, jr.tag, wit.witnesses))
    return out


def d2_classify(G: PermGroup, c: float = 100, *, alpha: float = 0.24,
                budget: int = 10_000, seed: int = 0, fallback: bool = True) -> AlternativeVerdict:
    """The d = 2 route: prime cycles, chained 2-transitive supports, Jordan.

    The primary search uses the prime pair (p, q): p-cycles found in ``G``
    are conjugated by powers of q-cycles and chained.  When that yields no
    verdict and ``fallback`` is set, cycles of every prime length found in
    ``G`` are pooled instead; small |K| routinely needs this.
    """
    _require_index(G, c, 2)
    k = G.degree
    diag: dict = {}
    pair = prime_pair(k)
    diag["prime_pair"] = [pair.p, pair.q] if pair else None
    routes = []
    if pair is not None:
        routes.append(("prime_pair", [pair.p, pair.q]))
    if fallback:
        routes.append(("all_primes", [p for p in range(k, 2, -1) if is_prime(p)]))
    for name, primes in routes:
        found = find_prime_cycles(G, primes, budget=budget, seed=seed, want=k)
        pool: list[Permutation] = []
        if name == "prime_pair":
            pcs, qcs = found.get(pair.p, []), found.get(pair.q, [])
            pool.extend(pcs)
            for cq in _disjoint(qcs):
                sq = set(cq.support())
                cp = next((x for x in pcs if set(x.support()) & sq), None)
                if cp is not None:
                    pool.extend(_conjugates_by_powers(cp, cq))
        else:
            for q in primes:
                pool.extend(found.get(q, []))
        diag[f"{name}_cycles"] = {str(q): len(v) for q, v in found.items()}
        comps = _giant_components(G, pool, seed, budget)
        verdict = _d2_verdict(k, comps, alpha)
        if verdict is not None:
            verdict.diagnostics.update(diag)
            verdict.diagnostics["route"] = name
            return verdict
    return AlternativeVerdict("Unclassified", [], [],
                              "cycle search found no giant component large enough",
                              diag)


def _d2_verdict(k: int, comps: list[Component], alpha: float) -> AlternativeVerdict | None:
    comps = sorted(comps, key=lambda c: (-len(c.support), c.support))
    for comp in comps:
        if len(comp.support) >= k / 2 + 2:
            return AlternativeVerdict("Alt1", [comp.support], [comp.alt_witness])
    disjoint = []
    for comp in comps:
        if all(not set(comp.support) & set(o.support) for o in disjoint):
            disjoint.append(comp)
        if len(disjoint) == 2:
            break
    if len(disjoint) < 2:
        return None
    a, b = (len(x.support) for x in disjoint)
    r = k - a - b
    union = a + b
    if union <= (1 - alpha) * k:
        return None
    ln_lhs = math.log(6) + sum(bounds.ln_factorial(x) for x in (a, b, r))
    ln_rhs = k * math.log(0.49) + bounds.ln_factorial(k)
    return AlternativeVerdict(
        "Alt2", [x.support for x in disjoint], [x.alt_witness for x in disjoint],
        diagnostics={"union": union, "threshold": (1 - alpha) * k, "residue": r,
                     "residue_bound": {"ln_6_a_b_r": ln_lhs, "ln_049k_kfact": ln_rhs,
                                       "holds": ln_lhs <= ln_rhs + bounds.SLACK}})
