"""Exact permutations and permutation groups.

Points are dense 0-based integers.  A permutation is stored as its image
table, and products follow function composition: ``(p * q)(x) == p(q(x))``.

Groups are handled through a base and strong generating set built by the
deterministic Schreier-Sims algorithm, which gives exact orders (Python
integers, so ``k!`` is never truncated) and a membership test.
"""

from __future__ import annotations

import math
import random
import re
from collections import deque
from enum import Enum
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence


class ValidationError(ValueError):
    """Raised for malformed permutations, groups or point sets."""


def _check_images(images: Sequence[int]) -> None:
    n = len(images)
    if n == 0:
        raise ValidationError("a permutation needs a positive degree")
    seen = [False] * n
    for x in images:
        if not isinstance(x, int) or isinstance(x, bool) or not 0 <= x < n:
            raise ValidationError(f"image {x!r} out of range for degree {n}")
        if seen[x]:
            raise ValidationError(f"image {x} repeated; not a bijection")
        seen[x] = True


# Raw tuple helpers.  The group machinery works on tuples directly because
# wrapping every intermediate product in a Permutation costs too much.

def _mul(p: tuple, q: tuple) -> tuple:
    return tuple([p[j] for j in q])


def _inv(p: tuple) -> tuple:
    out = [0] * len(p)
    for i, j in enumerate(p):
        out[j] = i
    return tuple(out)


def _is_id(p: tuple) -> bool:
    return all(i == j for i, j in enumerate(p))


def _cycles_of(p: tuple) -> list[tuple[int, ...]]:
    seen = [False] * len(p)
    out = []
    for i in range(len(p)):
        if seen[i] or p[i] == i:
            continue
        cyc = [i]
        seen[i] = True
        j = p[i]
        while j != i:
            seen[j] = True
            cyc.append(j)
            j = p[j]
        out.append(tuple(cyc))
    return out


def _power(p: tuple, e: int) -> tuple:
    n = len(p)
    out = list(range(n))
    for cyc in _cycles_of(p):
        m = len(cyc)
        s = e % m
        for idx, x in enumerate(cyc):
            out[x] = cyc[(idx + s) % m]
    return tuple(out)


def _order(p: tuple) -> int:
    return math.lcm(*(len(c) for c in _cycles_of(p))) if not _is_id(p) else 1


class Permutation:
    """A bijection of ``{0, ..., degree-1}`` given by its image table."""

    __slots__ = ("images",)

    def __init__(self, images: Iterable[int], *, check: bool = True):
        images = tuple(images)
        if check:
            _check_images(images)
        object.__setattr__(self, "images", images)

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    @classmethod
    def identity(cls, degree: int) -> "Permutation":
        return cls(range(degree), check=False)

    @classmethod
    def from_cycles(cls, cycles: Iterable[Sequence[int]], degree: int) -> "Permutation":
        img = list(range(degree))
        seen = set()
        for cyc in cycles:
            cyc = list(cyc)
            for x in cyc:
                if not 0 <= x < degree:
                    raise ValidationError(f"point {x} outside degree {degree}")
                if x in seen:
                    raise ValidationError(f"point {x} appears in two cycles")
                seen.add(x)
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                img[a] = b
        return cls(img, check=False)

    @classmethod
    def parse(cls, text: str, degree: int | None = None) -> "Permutation":
        """Parse cycle notation such as ``"(0 1 2)(3 4)"`` or ``"()"``."""
        return parse_cycles(text, degree)

    @property
    def degree(self) -> int:
        return len(self.images)

    def __call__(self, x: int) -> int:
        return self.images[x]

    def __mul__(self, other: "Permutation") -> "Permutation":
        if other.degree != self.degree:
            raise ValidationError("degree mismatch in product")
        return Permutation(_mul(self.images, other.images), check=False)

    def __pow__(self, e: int) -> "Permutation":
        return Permutation(_power(self.images, e), check=False)

    def inverse(self) -> "Permutation":
        return Permutation(_inv(self.images), check=False)

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __lt__(self, other):
        return self.images < other.images

    def is_identity(self) -> bool:
        return _is_id(self.images)

    def cycles(self) -> list[tuple[int, ...]]:
        """Non-trivial cycles, each starting at its least point."""
        return _cycles_of(self.images)

    def support(self) -> tuple[int, ...]:
        return tuple(i for i, j in enumerate(self.images) if i != j)

    @property
    def parity(self) -> int:
        """0 for even, 1 for odd."""
        return sum(len(c) - 1 for c in self.cycles()) % 2

    @property
    def sign(self) -> int:
        return -1 if self.parity else 1

    def order(self) -> int:
        return _order(self.images)

    def cycle_type(self) -> tuple[int, ...]:
        return tuple(sorted((len(c) for c in self.cycles()), reverse=True))

    def conjugate(self, by: "Permutation") -> "Permutation":
        """``by * self * by**-1``; relabels the cycles of self through ``by``."""
        return by * self * by.inverse()

    def __str__(self):
        cyc = self.cycles()
        if not cyc:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc)

    def __repr__(self):
        return f"Permutation({str(self)!r}, degree={self.degree})"

    def to_json(self) -> dict:
        return {"degree": self.degree, "images": list(self.images)}

    @classmethod
    def from_json(cls, obj, degree: int | None = None) -> "Permutation":
        if isinstance(obj, str):
            return parse_cycles(obj, degree)
        if isinstance(obj, list):
            return cls(obj)
        if not isinstance(obj, dict) or "images" not in obj:
            raise ValidationError(f"cannot read a permutation from {obj!r}")
        p = cls(obj["images"])
        if "degree" in obj and obj["degree"] != p.degree:
            raise ValidationError("declared degree does not match image table")
        return p


class CycleDecomposition(NamedTuple):
    cycles: list[tuple[int, ...]]
    support: tuple[int, ...]
    parity: int


def cycle_decomposition(p: Permutation) -> CycleDecomposition:
    return CycleDecomposition(p.cycles(), p.support(), p.parity)


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, degree: int | None = None) -> Permutation:
    text = text.strip()
    rest = _CYCLE_RE.sub("", text).strip()
    if rest:
        raise ValidationError(f"could not parse cycle notation {text!r}")
    cycles = []
    for body in _CYCLE_RE.findall(text):
        pts = [int(t) for t in re.split(r"[\s,]+", body.strip()) if t]
        if pts:
            cycles.append(pts)
    top = max((max(c) for c in cycles), default=-1) + 1
    if degree is None:
        degree = max(top, 1)
    elif top > degree:
        raise ValidationError(f"point {top - 1} outside degree {degree}")
    return Permutation.from_cycles(cycles, degree)


# ---------------------------------------------------------------------------
# Schreier-Sims


class _Chain:
    """Base, per-level strong generators and transversals.

    ``trans[i][x]`` maps ``base[i]`` to ``x`` and fixes ``base[:i]``.
    Transversals are only ever extended, never rewritten, so a Schreier
    generator that has been sifted once never needs to be sifted again.
    """

    def __init__(self, degree: int, gens: list[tuple]):
        self.degree = degree
        self.base: list[int] = []
        self.gens: list[list[tuple]] = []
        self.trans: list[dict[int, tuple]] = []
        self.tinv: list[dict[int, tuple]] = []
        self.ident = tuple(range(degree))
        gens = [g for g in dict.fromkeys(gens) if not _is_id(g)]
        for g in gens:
            if all(g[b] == b for b in self.base):
                self.base.append(next(i for i in range(degree) if g[i] != i))
        for i in range(len(self.base)):
            level = [g for g in gens if all(g[b] == b for b in self.base[:i])]
            self.gens.append(level)
            self.trans.append({self.base[i]: self.ident})
            self.tinv.append({self.base[i]: self.ident})
            self._extend(i)
        self._build()

    def _extend(self, i: int) -> None:
        tr = self.trans[i]
        ti = self.tinv[i]
        gens = self.gens[i]
        queue = deque(tr)
        while queue:
            x = queue.popleft()
            ux = tr[x]
            for g in gens:
                y = g[x]
                if y not in tr:
                    u = tr[y] = _mul(g, ux)
                    ti[y] = _inv(u)
                    queue.append(y)

    def sift(self, g: tuple, start: int = 0) -> tuple[tuple, int]:
        for i in range(start, len(self.base)):
            u = self.tinv[i].get(g[self.base[i]])
            if u is None:
                return g, i
            g = _mul(u, g)
        return g, len(self.base)

    def _add(self, h: tuple, lo: int, hi: int) -> None:
        if hi == len(self.base):
            pt = next(x for x in range(self.degree) if h[x] != x)
            self.base.append(pt)
            self.gens.append([])
            self.trans.append({pt: self.ident})
            self.tinv.append({pt: self.ident})
        for lvl in range(lo, hi + 1):
            self.gens[lvl].append(h)
            self._extend(lvl)

    def _build(self) -> None:
        tested: list[set] = [set() for _ in self.base]
        i = len(self.base) - 1
        while i >= 0:
            jumped = False
            tr = self.trans[i]
            ti = self.tinv[i]
            for beta in list(tr):
                ub = tr[beta]
                for idx, s in enumerate(self.gens[i]):
                    key = (beta, idx)
                    if key in tested[i]:
                        continue
                    tested[i].add(key)
                    h = _mul(ti[s[beta]], _mul(s, ub))
                    if _is_id(h):
                        continue
                    res, j = self.sift(h, i + 1)
                    if _is_id(res):
                        continue
                    if j == len(self.base):
                        tested.append(set())
                    self._add(res, i + 1, j)
                    i = j
                    jumped = True
                    break
                if jumped:
                    break
            if not jumped:
                i -= 1

    def order(self) -> int:
        return math.prod(len(t) for t in self.trans)


class PermGroup:
    """A finitely generated permutation group with lazily built BSGS."""

    def __init__(self, generators: Iterable[Permutation], degree: int | None = None):
        gens = list(generators)
        if degree is None:
            if not gens:
                raise ValidationError("degree required for an empty generator set")
            degree = gens[0].degree
        if degree < 1:
            raise ValidationError("degree must be positive")
        for g in gens:
            if g.degree != degree:
                raise ValidationError(
                    f"generator of degree {g.degree} in a group of degree {degree}")
        self.degree = degree
        self.generators: tuple[Permutation, ...] = tuple(gens)

    @classmethod
    def symmetric(cls, points: Sequence[int], degree: int) -> "PermGroup":
        pts = sorted(points)
        if len(pts) < 2:
            return cls([], degree)
        gens = [Permutation.from_cycles([pts[:2]], degree),
                Permutation.from_cycles([pts], degree)]
        return cls(gens, degree)

    @classmethod
    def alternating(cls, points: Sequence[int], degree: int) -> "PermGroup":
        pts = sorted(points)
        if len(pts) < 3:
            return cls([], degree)
        a, b = pts[:2]
        gens = [Permutation.from_cycles([(a, b, z)], degree) for z in pts[2:]]
        return cls(gens, degree)

    @classmethod
    def from_json(cls, obj: dict) -> "PermGroup":
        if not isinstance(obj, dict) or "degree" not in obj:
            raise ValidationError("group JSON needs 'degree' and 'generators'")
        degree = obj["degree"]
        if not isinstance(degree, int) or degree < 1:
            raise ValidationError(f"bad degree {degree!r}")
        gens = [Permutation.from_json(g, degree) for g in obj.get("generators", [])]
        return cls(gens, degree)

    def to_json(self) -> dict:
        return {"degree": self.degree,
                "generators": [g.to_json() for g in self.generators]}

    @cached_property
    def _chain(self) -> _Chain:
        return _Chain(self.degree, [g.images for g in self.generators])

    @property
    def base(self) -> tuple[int, ...]:
        return tuple(self._chain.base)

    @property
    def strong_generators(self) -> list[Permutation]:
        seen = dict.fromkeys(g for lvl in self._chain.gens for g in lvl)
        return [Permutation(g, check=False) for g in seen]

    @cached_property
    def order(self) -> int:
        return self._chain.order()

    @property
    def index_in_sym(self) -> int:
        return math.factorial(self.degree) // self.order

    def __contains__(self, p: Permutation) -> bool:
        return self.contains(p)

    def contains(self, p: Permutation) -> bool:
        if p.degree != self.degree:
            return False
        res, _ = self._chain.sift(p.images)
        return _is_id(res)

    def random_element(self, rng: random.Random) -> Permutation:
        """Uniformly random element (product of random coset representatives)."""
        g = self._chain.ident
        for tr in self._chain.trans:
            g = _mul(g, tr[rng.choice(list(tr))])
        return Permutation(g, check=False)

    def orbits(self) -> list[tuple[int, ...]]:
        return _orbits([g.images for g in self.generators], self.degree)

    def orbit(self, x: int) -> tuple[int, ...]:
        return next(o for o in self.orbits() if x in o)

    def is_transitive(self) -> bool:
        return len(self.orbits()) == 1

    def restrict(self, points: Sequence[int]) -> "PermGroup":
        """Action on an invariant subset, relabelled to ``0..len-1`` in sorted order."""
        pts = sorted(points)
        _require_invariant(self, pts)
        pos = {x: i for i, x in enumerate(pts)}
        gens = [Permutation([pos[g(x)] for x in pts], check=False)
                for g in self.generators]
        return PermGroup(gens, len(pts))

    def __repr__(self):
        return f"PermGroup(degree={self.degree}, ngens={len(self.generators)})"


def group_closure(generators: Iterable[Permutation], degree: int | None = None) -> PermGroup:
    """Group generated by ``generators``; order and membership come from its BSGS."""
    return PermGroup(generators, degree)


def brute_force_elements(generators: Sequence[Permutation], degree: int,
                         limit: int = 200_000) -> set[tuple]:
    """All elements by breadth-first closure; independent of Schreier-Sims."""
    ident = tuple(range(degree))
    gens = [g.images for g in generators]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = _mul(g, x)
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
                    if len(seen) > limit:
                        raise OverflowError(f"closure exceeds {limit} elements")
        frontier = nxt
    return seen


def _orbits(gens: list[tuple], degree: int) -> list[tuple[int, ...]]:
    parent = list(range(degree))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in gens:
        for x in range(degree):
            a, b = find(x), find(g[x])
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for x in range(degree):
        groups.setdefault(find(x), []).append(x)
    return sorted(tuple(v) for v in groups.values())


def _require_invariant(G: PermGroup, pts: Sequence[int]) -> None:
    s = set(pts)
    for x in s:
        if not 0 <= x < G.degree:
            raise ValidationError(f"point {x} outside degree {G.degree}")
    for g in G.generators:
        if any(g(x) not in s for x in s):
            raise ValidationError("point set is not invariant under the group")


# ---------------------------------------------------------------------------
# Blocks


class BlockSystem(NamedTuple):
    orbit: tuple[int, ...]
    blocks: tuple[tuple[int, ...], ...]

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    @property
    def block_size(self) -> int:
        return len(self.blocks[0])


def minimal_block_partition(gens: Sequence[Permutation], degree: int,
                            a: int, b: int) -> list[tuple[int, ...]]:
    """Finest partition invariant under ``gens`` in which ``a`` and ``b`` share a class."""
    imgs = [g.images for g in gens]
    parent = list(range(degree))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    queue = deque()

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx == ry:
            return
        if ry < rx:
            rx, ry = ry, rx
        parent[ry] = rx
        queue.append((ry, rx))

    union(a, b)
    while queue:
        x, y = queue.popleft()
        for g in imgs:
            union(g[x], g[y])
    classes: dict[int, list[int]] = {}
    for x in range(degree):
        classes.setdefault(find(x), []).append(x)
    return sorted(tuple(c) for c in classes.values())


def finest_block_system(G: PermGroup, orbit: Sequence[int]) -> BlockSystem | None:
    """Non-trivial block system on ``orbit`` with the most blocks, or None if primitive.

    Among the minimal blocks through the least orbit point, the smallest wins;
    ties go to the lexicographically least block.
    """
    orbit = tuple(sorted(orbit))
    if len(orbit) < 3:
        return None
    o0 = orbit[0]
    oset = set(orbit)
    best = None
    for x in orbit[1:]:
        parts = minimal_block_partition(G.generators, G.degree, o0, x)
        block = next(p for p in parts if o0 in p)
        if len(block) == len(orbit):
            continue
        key = (len(block), block)
        if best is None or key < best[0]:
            best = (key, [p for p in parts if p[0] in oset])
    if best is None:
        return None
    return BlockSystem(orbit, tuple(best[1]))


class OrbitBlocks(NamedTuple):
    orbit: tuple[int, ...]
    system: BlockSystem | None  # None means primitive on the orbit

    @property
    def primitive(self) -> bool:
        return self.system is None


def orbits_and_blocks(G: PermGroup) -> list[OrbitBlocks]:
    return [OrbitBlocks(o, finest_block_system(G, o)) for o in G.orbits()]


def is_primitive(G: PermGroup) -> bool:
    return G.is_transitive() and finest_block_system(G, range(G.degree)) is None


# ---------------------------------------------------------------------------
# Transitivity and Alt containment


class Transitivity(Enum):
    INTRANSITIVE = 0
    TRANSITIVE = 1
    TWO_TRANSITIVE = 2


def transitivity_degree(G: PermGroup, points: Sequence[int] | None = None) -> Transitivity:
    pts = sorted(range(G.degree) if points is None else points)
    _require_invariant(G, pts)
    if not pts:
        raise ValidationError("empty point set")
    if len(pts) == 1:
        return Transitivity.TRANSITIVE
    if len(G.orbit(pts[0])) != len(pts):
        return Transitivity.INTRANSITIVE
    start = (pts[0], pts[1])
    seen = {start}
    stack = [start]
    imgs = [g.images for g in G.generators]
    while stack:
        x, y = stack.pop()
        for g in imgs:
            q = (g[x], g[y])
            if q not in seen:
                seen.add(q)
                stack.append(q)
    s = len(pts)
    return Transitivity.TWO_TRANSITIVE if len(seen) == s * (s - 1) else Transitivity.TRANSITIVE


class AltWitness(NamedTuple):
    holds: bool
    witnesses: list[Permutation]      # three-cycles confirmed as members
    failed: Permutation | None        # first three-cycle that is not a member


def contains_alt_on(G: PermGroup, Z: Sequence[int]) -> AltWitness:
    """Decide ``Alt(Z) <= G`` through the 3-cycles ``(z0 z1 z)`` generating Alt(Z)."""
    pts = sorted(set(Z))
    if len(pts) < 3:
        raise ValidationError("Alt containment needs |Z| >= 3")
    if pts[0] < 0 or pts[-1] >= G.degree:
        raise ValidationError("point set outside the group's degree")
    z0, z1 = pts[:2]
    found = []
    for z in pts[2:]:
        c = Permutation.from_cycles([(z0, z1, z)], G.degree)
        if not G.contains(c):
            return AltWitness(False, found, c)
        found.append(c)
    return AltWitness(True, found, None)


# ---------------------------------------------------------------------------
# Giant recognition


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


class GiantClass(str, Enum):
    FULL_SYMMETRIC = "FullSymmetric"
    ALTERNATING = "Alternating"
    NOT_GIANT = "NotGiant"
    INCONCLUSIVE = "Inconclusive"


class JordanResult(NamedTuple):
    tag: GiantClass
    cycle: Permutation | None   # the prime cycle used, when the Jordan route decided
    via: str                    # "jordan", "imprimitive", "order" or "budget"


def prime_cycles_in(p: tuple, primes: Iterable[int]) -> dict[int, tuple]:
    """Single prime cycles obtainable as powers of ``p``, keyed by prime."""
    lens = [len(c) for c in _cycles_of(p)]
    if not lens:
        return {}
    m = math.lcm(*lens)
    out = {}
    for q in primes:
        if m % q:
            continue
        h = _power(p, m // q)
        if sum(1 for x, y in enumerate(h) if x != y) == q:
            out[q] = h
    return out


def find_prime_cycles(G: PermGroup, primes: Iterable[int], *, budget: int = 10_000,
                      seed: int = 0, want: int | None = None,
                      first_only: bool = False) -> dict[int, list[Permutation]]:
    """Search ``G`` for single prime cycles of the requested lengths.

    Generators and their powers are scanned first, then seeded uniform random
    elements.  ``want`` caps how many distinct cycles are kept per prime.
    """
    primes = sorted({q for q in primes if is_prime(q) and q <= G.degree})
    found: dict[int, dict[tuple, None]] = {q: {} for q in primes}
    if not primes:
        return {}

    def take(elem: tuple) -> bool:
        for q, h in prime_cycles_in(elem, primes).items():
            if want is None or len(found[q]) < want:
                found[q][h] = None
        if first_only:
            return any(found.values())
        return want is not None and all(len(v) >= want for v in found.values())

    done = False
    for g in G.generators:
        if take(g.images):
            done = True
            break
    if not done and G.order > 1:
        rng = random.Random(seed)
        for _ in range(budget):
            if take(G.random_element(rng).images):
                break
    return {q: [Permutation(h, check=False) for h in v] for q, v in found.items()}


def jordan_classify(G: PermGroup, *, budget: int = 10_000, seed: int = 0,
                    exact: bool = True) -> JordanResult:
    """Recognise Alt(k) / Sym(k) via a prime cycle of length ``p <= k - 3``.

    With ``exact`` the exact order settles whatever the cycle search cannot;
    otherwise an exhausted search reports Inconclusive.
    """
    k = G.degree
    if not G.is_transitive():
        raise ValidationError("jordan_classify needs a transitive group")
    fact = math.factorial(k)
    odd = any(g.parity for g in G.generators)
    giant = GiantClass.FULL_SYMMETRIC if odd else GiantClass.ALTERNATING
    if k >= 3 and not is_primitive(G):
        return JordanResult(GiantClass.NOT_GIANT, None, "imprimitive")
    primes = [p for p in range(2, k - 2) if is_prime(p)]
    if primes:
        hit = find_prime_cycles(G, primes, budget=budget, seed=seed, first_only=True)
        cyc = next((c[0] for c in hit.values() if c), None)
        if cyc is not None:
            expected = fact if odd else fact // 2
            if G.order != expected:
                raise AssertionError("Jordan conclusion contradicts the exact order")
            return JordanResult(giant, cyc, "jordan")
    if not exact:
        return JordanResult(GiantClass.INCONCLUSIVE, None, "budget")
    if G.order == fact:
        return JordanResult(GiantClass.FULL_SYMMETRIC, None, "order")
    if G.order * 2 == fact:
        return JordanResult(GiantClass.ALTERNATING, None, "order")
    return JordanResult(GiantClass.NOT_GIANT, None, "order")


# ---------------------------------------------------------------------------
# Chained prime cycles


class ChainingError(ValidationError):
    def __init__(self, index: int, reason: str):
        super().__init__(f"cycle {index}: {reason}")
        self.index = index


def overlap_condition(a: Permutation, b: Permutation) -> bool:
    """Supports meet but neither contains the other."""
    sa, sb = set(a.support()), set(b.support())
    return bool(sa & sb) and not sa <= sb and not sb <= sa


class ChainResult(NamedTuple):
    group: PermGroup
    support: tuple[int, ...]
    two_transitive: bool


def chained_two_transitivity(cycles: Sequence[Permutation]) -> ChainResult:
    """Check the chaining hypothesis and 2-transitivity of the generated group."""
    if not cycles:
        raise ValidationError("need at least one cycle")
    degree = cycles[0].degree
    for i, c in enumerate(cycles):
        if c.degree != degree:
            raise ChainingError(i, "degree mismatch")
        if len(c.cycles()) != 1 or not is_prime(len(c.support())):
            raise ChainingError(i, "not a single cycle of prime length")
        if i and not any(overlap_condition(c, cycles[j]) for j in range(i)):
            raise ChainingError(i, "no earlier cycle with properly overlapping support")
    G = PermGroup(cycles, degree)
    supp = tuple(sorted(set().union(*(c.support() for c in cycles))))
    verdict = transitivity_degree(G, supp) is Transitivity.TWO_TRANSITIVE
    return ChainResult(G, supp, verdict)
