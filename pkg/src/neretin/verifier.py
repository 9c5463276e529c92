"""Level covolumes of candidate subgroups and obstruction certificates.

A candidate is a finite set of almost automorphisms.  Its intersection with
O_n is approximated by the elements of the Cayley ball of radius L that lie
in O_n; everything reported here is relative to that word length.

The obstruction constructors return an :class:`ObstructionCertificate`: a
nontrivial element lying in U_m whose projection to Sym(K_n) lies in the
level group Gamma_n.  :func:`verify_certificate` re-checks every claim from
the stored data alone.
"""

from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .almost import (
    AlmostAutomorphism,
    CayleyBall,
    NotInLevel,
    cayley_ball,
    format_word,
    in_U_level,
    min_O_level,
    project_level,
)
from .perm import Permutation, PermGroup, ValidationError, contains_alt_on
from .small_index import AlternativeVerdict
from .tree import (
    BallSpec,
    ball_aut_generators,
    children_in,
    parent_projection,
    sphere_size,
)

log = logging.getLogger(__name__)

# BSGS computations on K_n are refused beyond this many points.
MAX_DEGREE = 64

KINDS = ("Cocompact3", "Alt1Case", "Alt2Case")


class PreconditionError(ValidationError):
    """Inputs do not meet the hypotheses of a construction."""


class CapExceeded(ValidationError):
    """A level whose sphere is too large for exact group computations."""


# ---------------------------------------------------------------------------
# Candidates


@dataclass
class CandidateSubgroup:
    d: int
    generators: list[AlmostAutomorphism]
    L: int = 6

    def __post_init__(self):
        if self.L < 0:
            raise ValidationError("word length must be non-negative")
        for g in self.generators:
            if g.d != self.d:
                raise ValidationError("generator branching differs from candidate d")

    @property
    def outside_O(self) -> list[int]:
        """Indices of generators that are not in O."""
        return [i for i, g in enumerate(self.generators) if not min_O_level(g).in_O]

    def ball(self, cap: int = 50_000) -> CayleyBall:
        return cayley_ball(self.generators, self.L, d=self.d, cap=cap)

    def to_json(self) -> dict:
        return {"d": self.d, "word_length": self.L,
                "generators": [g.to_json() for g in self.generators]}

    @classmethod
    def from_json(cls, obj: dict) -> "CandidateSubgroup":
        try:
            d = int(obj["d"])
            gens = [AlmostAutomorphism.from_json(g) for g in obj.get("generators", [])]
            L = int(obj.get("word_length", 6))
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed candidate: {exc}") from None
        return cls(d, gens, L)


# ---------------------------------------------------------------------------
# Discreteness


@dataclass
class LevelFlag:
    n: int
    discrete: bool
    witness: AlmostAutomorphism | None = None
    word: str | None = None


@dataclass
class DiscretenessReport:
    levels: list[LevelFlag]
    n0: int | None
    word_length: int
    ball_size: int
    truncated: bool

    def to_json(self) -> dict:
        return {
            "word_length": self.word_length,
            "ball_size": self.ball_size,
            "truncated": self.truncated,
            "n0": self.n0,
            "levels": [{"n": f.n, "discrete": f.discrete, "witness_word": f.word,
                        "witness": f.witness.to_json() if f.witness else None}
                       for f in self.levels],
        }


def discreteness_scan(cand: CandidateSubgroup, n_max: int,
                      ball: CayleyBall | None = None) -> DiscretenessReport:
    """For n = 1..n_max, look for a nontrivial ball element inside U_n."""
    if cand.L < 1:
        raise ValidationError("discreteness scan needs word length >= 1")
    if ball is None:
        ball = cand.ball()
    nontrivial = [g for g in ball if not g.is_identity()]
    levels = []
    for n in range(1, n_max + 1):
        hit = next((g for g in nontrivial if in_U_level(g, n)), None)
        if hit is None:
            levels.append(LevelFlag(n, True))
        else:
            levels.append(LevelFlag(n, False, hit, format_word(ball.word(hit))))
    n0 = next((f.n for f in levels if f.discrete), None)
    return DiscretenessReport(levels, n0, cand.L, len(ball), ball.truncated)


# ---------------------------------------------------------------------------
# Covolumes


@dataclass
class LevelData:
    n: int
    d: int
    k: int
    a: int
    gamma_order: int
    Gamma_n: PermGroup
    c_n: Fraction
    c_n_check: Fraction        # the same number from factorials and |A_n| by BSGS
    discrete_at: bool
    eq2: bool | None           # [Sym(k_n):Gamma_n] <= c a_n, when c was supplied
    c: float | None
    word_length: int
    truncated: bool

    @property
    def routes_agree(self) -> bool:
        return self.c_n == self.c_n_check

    @property
    def index(self) -> int:
        return self.Gamma_n.index_in_sym

    def row(self) -> dict:
        return {
            "n": self.n, "k_n": self.k, "a_n": self.a, "gamma_order": self.gamma_order,
            "c_n": self.c_n, "routes_agree": self.routes_agree,
            "discrete": self.discrete_at, "eq2": self.eq2,
        }


def level_group(cand: CandidateSubgroup, n: int, ball: CayleyBall | None = None) -> PermGroup:
    """Closure of pi_n of the ball elements lying in O_n."""
    k = sphere_size(cand.d, n)
    if k > MAX_DEGREE:
        raise CapExceeded(f"k_{n} = {k} exceeds {MAX_DEGREE}; choose a smaller level")
    if ball is None:
        ball = cand.ball()
    images = set()
    for g in ball:
        mem = min_O_level(g)
        if mem.in_O and mem.min_level <= n:
            p = project_level(mem.element, n)
            if not p.is_identity():
                images.add(p)
    return PermGroup(sorted(images, key=lambda p: p.images), k)


_BALL_ORDER_CACHE: dict[tuple[int, int], int] = {}


def ball_group_order(d: int, n: int) -> int:
    """|A_n| computed by Schreier-Sims (not from the closed form)."""
    key = (d, n)
    if key not in _BALL_ORDER_CACHE:
        spec = BallSpec(d, n)
        _BALL_ORDER_CACHE[key] = PermGroup(ball_aut_generators(spec), spec.k).order
    return _BALL_ORDER_CACHE[key]


def level_covolume(cand: CandidateSubgroup, n: int, *, c: float | None = None,
                   ball: CayleyBall | None = None,
                   discrete: bool | None = None) -> LevelData:
    """c_n = [Sym(k_n):Gamma_n] / a_n as an exact rational.

    Truncating the Cayley ball can only shrink Gamma_n, so a truncated run
    over-reports c_n.
    """
    if n < 0:
        raise ValidationError("level must be non-negative")
    spec = BallSpec(cand.d, n)
    if ball is None:
        ball = cand.ball()
    G = level_group(cand, n, ball)
    k, a = spec.k, spec.a
    c_n = Fraction(G.index_in_sym, a)
    c_check = Fraction(math.factorial(k), ball_group_order(cand.d, n) * G.order)
    if discrete is None:
        discrete = not any(not g.is_identity() and in_U_level(g, n) for g in ball)
    eq2 = None
    if c is not None:
        eq2 = G.index_in_sym <= Fraction(c).limit_denominator(10 ** 12) * a
    return LevelData(n, cand.d, k, a, G.order, G, c_n, c_check, discrete, eq2, c,
                     cand.L, ball.truncated)


def covolume_profile(cand: CandidateSubgroup, n_max: int, *, c: float | None = None,
                     n_min: int = 1) -> tuple[list[LevelData], DiscretenessReport]:
    ball = cand.ball()
    scan = discreteness_scan(cand, n_max, ball)
    flags = {f.n: f.discrete for f in scan.levels}
    rows = [level_covolume(cand, n, c=c, ball=ball, discrete=flags.get(n))
            for n in range(n_min, n_max + 1)]
    return rows, scan


# ---------------------------------------------------------------------------
# Certificates


@dataclass
class ObstructionCertificate:
    kind: str
    n: int
    m: int
    witness_perms: list[Permutation]
    lift: AlmostAutomorphism
    truncation_L: int | None = None
    checks: dict[str, bool] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "m": self.m,
            "witness_perms": [p.to_json() for p in self.witness_perms],
            "lift": self.lift.to_json(),
            "truncation_L": self.truncation_L,
            "checks": dict(self.checks),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ObstructionCertificate":
        try:
            return cls(
                kind=str(obj["kind"]),
                n=int(obj["n"]),
                m=int(obj["m"]),
                witness_perms=[Permutation.from_json(p) for p in obj["witness_perms"]],
                lift=AlmostAutomorphism.from_json(obj["lift"]),
                truncation_L=obj.get("truncation_L"),
                checks={str(k): bool(v) for k, v in obj.get("checks", {}).items()},
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed certificate: {exc}") from None


@dataclass
class ThresholdNotMet:
    """The Alt2 construction cannot run at this level."""
    reason: str
    counts: dict

    def to_json(self) -> dict:
        return {"result": "ThresholdNotMet", "reason": self.reason, "counts": self.counts}


def _shape_key(kind: str) -> str:
    return {"Cocompact3": "sibling_double_transposition",
            "Alt1Case": "sibling_alt_witness",
            "Alt2Case": "two_subtree_swaps_even"}[kind]


def _expected_m(kind: str, n: int) -> int:
    return n - 2 if kind == "Alt2Case" else n - 1


def _is_sibling_double_transposition(p: Permutation, d: int) -> bool:
    cyc = p.cycles()
    return (len(cyc) == 2 and all(len(c) == 2 for c in cyc)
            and all(c[0] // d == c[1] // d for c in cyc))


def _is_sibling_three_cycle(p: Permutation, d: int) -> bool:
    cyc = p.cycles()
    return len(cyc) == 1 and len(cyc[0]) == 3 and len({x // d for x in cyc[0]}) == 1


def _is_subtree_swap(p: Permutation, d: int, n: int) -> bool:
    """p exchanges the children of two siblings in K_{n-1} and fixes the rest."""
    if n < 2:
        return False
    up = parent_projection(p, d, n)
    if not isinstance(up, Permutation):
        return False
    cyc = up.cycles()
    return (len(cyc) == 1 and len(cyc[0]) == 2 and cyc[0][0] // d == cyc[0][1] // d
            and len(p.support()) == 2 * d)


def _shape_check(kind: str, witnesses: Sequence[Permutation], d: int, n: int) -> bool:
    if kind == "Cocompact3":
        return len(witnesses) == 1 and _is_sibling_double_transposition(witnesses[0], d)
    if kind == "Alt1Case":
        return len(witnesses) == 1 and (_is_sibling_three_cycle(witnesses[0], d)
                                        or _is_sibling_double_transposition(witnesses[0], d))
    if kind == "Alt2Case":
        if len(witnesses) != 2 or not all(_is_subtree_swap(w, d, n) for w in witnesses):
            return False
        prod = witnesses[0] * witnesses[1]
        return prod.parity == 0 and not prod.is_identity()
    return False


def _recompute_checks(cert: ObstructionCertificate, G: PermGroup) -> dict[str, bool]:
    lift, n, m, kind = cert.lift, cert.n, cert.m, cert.kind
    d = lift.d
    k = sphere_size(d, n) if n >= 0 else 0
    checks = {
        "known_kind": kind in KINDS,
        "level_consistent": kind in KINDS and n >= 2 and m == _expected_m(kind, n),
        "nontrivial": not lift.is_identity(),
        "in_U_m": m >= 0 and in_U_level(lift, m),
    }
    try:
        proj = project_level(lift, n) if n >= 0 else None
    except NotInLevel:
        proj = None
    degrees_ok = (proj is not None and proj.degree == G.degree == k
                  and all(w.degree == k for w in cert.witness_perms))
    checks["projects_into_Gamma_n"] = degrees_ok and G.contains(proj)
    prod = None
    if degrees_ok and cert.witness_perms:
        prod = cert.witness_perms[0]
        for w in cert.witness_perms[1:]:
            prod = prod * w
    checks["witness_product"] = prod is not None and prod == proj
    if kind in KINDS:
        checks[_shape_key(kind)] = degrees_ok and _shape_check(kind, cert.witness_perms, d, n)
    return checks


@dataclass
class VerificationReport:
    checks: dict[str, bool]
    recorded_match: bool

    @property
    def passed(self) -> bool:
        return self.recorded_match and all(self.checks.values())

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": self.checks,
                "recorded_checks_match": self.recorded_match}


def verify_certificate(cert: ObstructionCertificate, Gamma_n: PermGroup) -> VerificationReport:
    """Re-check every claim of ``cert``; failures are reported, never raised."""
    try:
        checks = _recompute_checks(cert, Gamma_n)
    except (ValidationError, ValueError, IndexError) as exc:
        log.info("certificate check raised: %s", exc)
        return VerificationReport({"well_formed": False}, False)
    return VerificationReport(checks, checks == cert.checks)


def _seal(kind: str, n: int, d: int, witnesses: list[Permutation], G: PermGroup,
          L: int | None) -> ObstructionCertificate:
    prod = witnesses[0]
    for w in witnesses[1:]:
        prod = prod * w
    lift = AlmostAutomorphism.from_sphere_permutation(d, n, prod)
    cert = ObstructionCertificate(kind, n, _expected_m(kind, n), witnesses, lift, L)
    cert.checks = _recompute_checks(cert, G)
    if not all(cert.checks.values()):
        raise AssertionError(f"constructed certificate fails its own checks: {cert.checks}")
    return cert


# ---------------------------------------------------------------------------
# Constructions


def sibling_pairs(Z: Sequence[int], d: int) -> list[tuple[int, int]]:
    """All pairs of siblings inside Z, in lexicographic order."""
    out = []
    for kids in children_in(Z, d).values():
        for i, x in enumerate(kids):
            for y in kids[i + 1:]:
                out.append((x, y))
    return out


def _two_disjoint_pairs(pairs: list[tuple[int, int]],
                        rng: random.Random | None) -> tuple[tuple[int, int], tuple[int, int]] | None:
    if rng is not None:
        pairs = pairs[:]
        rng.shuffle(pairs)
    for i, p in enumerate(pairs):
        for q in pairs[i + 1:]:
            if not set(p) & set(q):
                return p, q
    return None


def cocompact_obstruction(Gamma_n: PermGroup, Z: Sequence[int], n: int, d: int, *,
                          rng: random.Random | None = None,
                          truncation_L: int | None = None) -> ObstructionCertificate:
    """Double transposition of two sibling pairs in Z, lifted into U_{n-1}.

    With ``rng`` the two pairs are drawn at random instead of taking the
    lexicographically least ones.
    """
    k = sphere_size(d, n)
    Z = tuple(sorted(set(Z)))
    if n < 2:
        raise PreconditionError("the construction needs n >= 2")
    if Gamma_n.degree != k:
        raise PreconditionError(f"Gamma_n has degree {Gamma_n.degree}, expected k_n = {k}")
    if not 2 * len(Z) > k + 4:
        raise PreconditionError(f"|Z| = {len(Z)} is not greater than k_n/2 + 2 = {k / 2 + 2}")
    if not contains_alt_on(Gamma_n, Z).holds:
        raise PreconditionError("Alt(Z) is not contained in Gamma_n")
    chosen = _two_disjoint_pairs(sibling_pairs(Z, d), rng)
    if chosen is None:
        raise AssertionError("pigeonhole failed to produce two sibling pairs")
    gbar = Permutation.from_cycles(list(chosen), k)
    return _seal("Cocompact3", n, d, [gbar], Gamma_n, truncation_L)


def _alt1_witness(Z: Sequence[int], d: int, k: int) -> Permutation | None:
    by_parent = children_in(Z, d)
    for kids in by_parent.values():
        if len(kids) >= 3:
            return Permutation.from_cycles([tuple(kids[:3])], k)
    pairs = [tuple(kids[:2]) for kids in by_parent.values() if len(kids) >= 2]
    if len(pairs) >= 2:
        return Permutation.from_cycles(pairs[:2], k)
    return None


def alt1_obstruction(Gamma_n: PermGroup, Z: Sequence[int], n: int, d: int, *,
                     truncation_L: int | None = None) -> ObstructionCertificate:
    """A sibling 3-cycle, or two sibling transpositions, inside Alt(Z)."""
    k = sphere_size(d, n)
    Z = tuple(sorted(set(Z)))
    if n < 2:
        raise PreconditionError("the construction needs n >= 2")
    if Gamma_n.degree != k:
        raise PreconditionError(f"Gamma_n has degree {Gamma_n.degree}, expected k_n = {k}")
    if len(Z) < 3 or not contains_alt_on(Gamma_n, Z).holds:
        raise PreconditionError("Alt(Z) is not contained in Gamma_n")
    w = _alt1_witness(Z, d, k)
    if w is None:
        raise PreconditionError("Z has neither three siblings nor two sibling pairs")
    return _seal("Alt1Case", n, d, [w], Gamma_n, truncation_L)


@dataclass
class Alt2Layout:
    flexible_n1: list[int]         # K_{n-1} vertices with two children in one part
    flexible_n2: list[int]         # K_{n-2} vertices with a flexible child
    fully_covered: list[int]       # K_{n-2} vertices whose K_n descendants lie in the union
    usable: list[int]              # fully covered and not flexible
    union: int

    def counts(self) -> dict:
        return {"flexible_level_n-1": len(self.flexible_n1),
                "flexible_level_n-2": len(self.flexible_n2),
                "fully_covered": len(self.fully_covered),
                "usable": len(self.usable), "union": self.union}


def alt2_layout(parts: Sequence[Sequence[int]], n: int, d: int) -> Alt2Layout:
    where = {}
    for i, Zi in enumerate(parts):
        for x in Zi:
            if x in where:
                raise PreconditionError("the parts are not disjoint")
            where[x] = i
    k = sphere_size(d, n)
    flex1 = []
    for u in range(k // d):
        seen = [where.get(x) for x in range(u * d, u * d + d)]
        tags = [t for t in seen if t is not None]
        if len(tags) != len(set(tags)):
            flex1.append(u)
    flex2 = sorted({u // d for u in flex1})
    covered = [v for v in range(k // d ** 2)
               if all(x in where for x in range(v * d * d, (v + 1) * d * d))]
    flex2_set = set(flex2)
    usable = [v for v in covered if v not in flex2_set]
    return Alt2Layout(flex1, flex2, covered, usable, len(where))


def alt2_obstruction(Gamma_n: PermGroup, parts: Sequence[Sequence[int]], n: int, d: int,
                     alpha: float, *, truncation_L: int | None = None
                     ) -> ObstructionCertificate | ThresholdNotMet:
    """Compose two fully covered subtree swaps into an element of U_{n-2}."""
    k = sphere_size(d, n)
    parts = [tuple(sorted(set(p))) for p in parts]
    if n < 2:
        raise PreconditionError("the construction needs n >= 2")
    if Gamma_n.degree != k:
        raise PreconditionError(f"Gamma_n has degree {Gamma_n.degree}, expected k_n = {k}")
    if len(parts) != d:
        raise PreconditionError(f"expected {d} parts, got {len(parts)}")
    if alpha >= 1 / d ** 2:
        return ThresholdNotMet(
            f"alpha = {alpha} is not below 1/d^2 = {1 / d ** 2}; the count "
            f"(1/d^2 - alpha) k_n >= d + 2 cannot hold",
            {"alpha": alpha, "k_n": k, "required": d + 2})
    slack = (1 / d ** 2 - alpha) * k
    if slack < d + 2 - 1e-9:
        return ThresholdNotMet(
            f"threshold not met: (1/{d * d} - alpha) k_{n} = {slack:g} < {d + 2}",
            {"alpha": alpha, "k_n": k, "value": slack, "required": d + 2})
    for Zi in parts:
        if len(Zi) < 3 or not contains_alt_on(Gamma_n, Zi).holds:
            raise PreconditionError(f"Alt(Z) is not contained in Gamma_n for Z = {list(Zi)}")
    layout = alt2_layout(parts, n, d)
    # two flexible vertices in one part already give a contradiction inside Alt(Z_i)
    for Zi in parts:
        w = _alt1_witness(Zi, d, k)
        if w is not None:
            log.info("short-circuit: part %s has its own sibling witness", Zi[:4])
            return _seal("Alt1Case", n, d, [w], Gamma_n, truncation_L)
    if len(layout.usable) < 2:
        counts = layout.counts()
        counts.update({"alpha": alpha, "k_n": k})
        return ThresholdNotMet("fewer than two fully covered non-flexible vertices", counts)
    where = {x: i for i, Zi in enumerate(parts) for x in Zi}
    swaps = [_subtree_swap(v, where, d, k) for v in layout.usable[:2]]
    return _seal("Alt2Case", n, d, swaps, Gamma_n, truncation_L)


def _subtree_swap(v: int, where: dict[int, int], d: int, k: int) -> Permutation:
    """Swap the first two children of v in K_{n-1}, matching grandchildren by part."""
    u1, u2 = v * d, v * d + 1
    by_part = {where[y]: y for y in range(u2 * d, u2 * d + d)}
    cycles = []
    for x in range(u1 * d, u1 * d + d):
        cycles.append((x, by_part[where[x]]))
    return Permutation.from_cycles(cycles, k)


def alternative_obstruction(Gamma_n: PermGroup, verdict: AlternativeVerdict, n: int, d: int,
                            alpha: float, *, truncation_L: int | None = None
                            ) -> ObstructionCertificate | ThresholdNotMet:
    """Dispatch on an Alt1 / Alt2 verdict."""
    if verdict.tag == "Alt1":
        return alt1_obstruction(Gamma_n, verdict.sets[0], n, d, truncation_L=truncation_L)
    if verdict.tag == "Alt2":
        return alt2_obstruction(Gamma_n, verdict.sets, n, d, alpha, truncation_L=truncation_L)
    raise PreconditionError(f"verdict {verdict.tag} carries no construction")
