"""Finitary almost automorphisms of the (d+1)-regular tree.

An element is a tree pair: a complete antichain of domain addresses, one of
range addresses, and a bijection between them.  Below each matched pair the
identification is rigid, so ``u + s`` goes to ``phi(u) + s`` for every
suffix ``s``.  Elements compare equal exactly when their reduced (canonical)
tree pairs agree.

Products compose as maps: ``compose(g, h)`` applies ``h`` first.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple, Sequence

from .perm import Permutation, ValidationError
from .tree import (
    Address,
    address_index,
    check_address,
    format_address,
    index_address,
    parse_address,
    sphere_addresses,
    sphere_size,
)


class NotInLevel(ValueError):
    """The element does not lie in the requested O_n."""


def _check_antichain(addrs: Sequence[Address], d: int, what: str) -> None:
    """Complete antichain: prefix-free and saturating on both sides."""
    ordered = sorted(addrs)
    if len(set(ordered)) != len(ordered):
        raise ValidationError(f"{what} leaves repeated")
    for a, b in zip(ordered, ordered[1:]):
        if b[:len(a)] == a:
            raise ValidationError(
                f"{what} leaf {format_address(a)} is a prefix of {format_address(b)}")
    depth = max(len(a) for a in ordered) - 1
    mass = [0, 0]
    for a in ordered:
        check_address(a, d)
        mass[a[0]] += d ** (depth - (len(a) - 1))
    if mass != [d ** depth, d ** depth]:
        raise ValidationError(f"{what} leaves do not cover the tree")


def _prefix_in(addr: Address, table: Mapping) -> Address | None:
    for ln in range(1, len(addr) + 1):
        if addr[:ln] in table:
            return addr[:ln]
    return None


def _reduce(mapping: dict[Address, Address], d: int) -> dict[Address, Address]:
    """Collapse carets until none is left."""
    mp = dict(mapping)
    pending = deque(sorted({a[:-1] for a in mp if len(a) > 1}))
    queued = set(pending)
    while pending:
        u = pending.popleft()
        queued.discard(u)
        first = mp.get(u + (0,))
        if first is None or len(first) < 2:
            continue
        v = first[:-1]
        if all(mp.get(u + (i,)) == v + (i,) for i in range(d)):
            for i in range(d):
                del mp[u + (i,)]
            mp[u] = v
            if len(u) > 1 and u[:-1] not in queued:
                pending.append(u[:-1])
                queued.add(u[:-1])
    return mp


class AlmostAutomorphism:
    """A tree pair ``(domain, range, leaf bijection)``; immutable."""

    __slots__ = ("d", "_map", "_canon", "_hash")

    def __init__(self, d: int, mapping: Mapping[Address, Address] | Iterable[tuple],
                 *, check: bool = True):
        if d < 2:
            raise ValidationError("branching d must be at least 2")
        mp = dict(mapping.items() if isinstance(mapping, Mapping) else mapping)
        if check:
            if not mp:
                raise ValidationError("empty tree pair")
            _check_antichain(list(mp), d, "domain")
            _check_antichain(list(mp.values()), d, "range")
            if len(set(mp.values())) != len(mp):
                raise ValidationError("leaf map is not injective")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "_map", mp)
        object.__setattr__(self, "_canon", None)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("AlmostAutomorphism is immutable")

    # -- constructors -----------------------------------------------------

    @classmethod
    def identity(cls, d: int) -> "AlmostAutomorphism":
        return cls(d, {(0,): (0,), (1,): (1,)}, check=False)

    @classmethod
    def edge_flip(cls, d: int) -> "AlmostAutomorphism":
        return cls(d, {(0,): (1,), (1,): (0,)}, check=False)

    @classmethod
    def from_sphere_permutation(cls, d: int, n: int, sigma: Permutation) -> "AlmostAutomorphism":
        """Rigid lift of a permutation of K_n: vertex ``i`` carries its subtree to ``sigma(i)``."""
        if sigma.degree != sphere_size(d, n):
            raise ValidationError("permutation degree does not match K_n")
        leaves = sphere_addresses(d, n)
        return cls(d, {leaves[i]: leaves[sigma(i)] for i in range(len(leaves))},
                   check=False).canonical()

    @classmethod
    def sibling_swap(cls, d: int, vertex: Address, i: int = 0, j: int = 1) -> "AlmostAutomorphism":
        """Exchange the subtrees hanging from children ``i`` and ``j`` of ``vertex``."""
        check_address(vertex, d)
        n = len(vertex)  # level of the children
        a = address_index(vertex + (i,), d)
        b = address_index(vertex + (j,), d)
        sigma = Permutation.from_cycles([(a, b)], sphere_size(d, n))
        return cls.from_sphere_permutation(d, n, sigma)

    # -- basic accessors --------------------------------------------------

    @property
    def mapping(self) -> dict[Address, Address]:
        return dict(self._map)

    @property
    def domain(self) -> list[Address]:
        return sorted(self._map)

    @property
    def range(self) -> list[Address]:
        return sorted(self._map.values())

    def __len__(self):
        return len(self._map)

    def __call__(self, addr: Address) -> Address:
        """Image of a vertex lying at or below the domain antichain."""
        u = _prefix_in(addr, self._map)
        if u is None:
            raise ValidationError(f"{format_address(addr)} lies above the domain antichain")
        return self._map[u] + addr[len(u):]

    # -- canonical form and equality -------------------------------------

    def canonical(self) -> "AlmostAutomorphism":
        c = self._canon
        if c is None:
            red = _reduce(self._map, self.d)
            c = self if len(red) == len(self._map) else AlmostAutomorphism(self.d, red, check=False)
            object.__setattr__(c, "_canon", c)
            object.__setattr__(self, "_canon", c)
        return c

    @property
    def key(self) -> tuple:
        """Canonical encoding used for equality and hashing."""
        return (self.d, tuple(sorted(self.canonical()._map.items())))

    def __eq__(self, other):
        return isinstance(other, AlmostAutomorphism) and self.key == other.key

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash(self.key)
            object.__setattr__(self, "_hash", h)
        return h

    def is_identity(self) -> bool:
        c = self.canonical()._map
        return c == {(0,): (0,), (1,): (1,)}

    def is_canonical(self) -> bool:
        return len(_reduce(self._map, self.d)) == len(self._map)

    # -- refinement -------------------------------------------------------

    def expand(self, addr: Address) -> "AlmostAutomorphism":
        """Same element, with domain leaf ``addr`` replaced by its children."""
        if addr not in self._map:
            raise ValidationError(f"{format_address(addr)} is not a domain leaf")
        mp = dict(self._map)
        v = mp.pop(addr)
        for i in range(self.d):
            mp[addr + (i,)] = v + (i,)
        return AlmostAutomorphism(self.d, mp, check=False)

    def expand_to_depth(self, depth: int) -> dict[Address, Address]:
        """Leaf map refined so every domain leaf sits at level >= ``depth``."""
        out = {}
        for u, v in self._map.items():
            extra = depth - (len(u) - 1)
            if extra <= 0:
                out[u] = v
                continue
            for tail in itertools.product(range(self.d), repeat=extra):
                out[u + tail] = v + tail
        return out

    # -- group law --------------------------------------------------------

    def inverse(self) -> "AlmostAutomorphism":
        return AlmostAutomorphism(self.d, {v: u for u, v in self._map.items()},
                                  check=False).canonical()

    def __mul__(self, other: "AlmostAutomorphism") -> "AlmostAutomorphism":
        return compose(self, other)

    def max_depth(self) -> int:
        c = self.canonical()._map
        return max(max(len(u), len(v)) for u, v in c.items()) - 1

    # -- serialisation ----------------------------------------------------

    def to_json(self) -> dict:
        dom = self.domain
        rng = self.range
        ridx = {a: i for i, a in enumerate(rng)}
        return {
            "d": self.d,
            "domain": [format_address(a) for a in dom],
            "range": [format_address(a) for a in rng],
            "map": [[i, ridx[self._map[a]]] for i, a in enumerate(dom)],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "AlmostAutomorphism":
        try:
            d = obj["d"]
            dom = [parse_address(s, d) for s in obj["domain"]]
            rng = [parse_address(s, d) for s in obj["range"]]
            pairs = obj["map"]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed element JSON: {exc}") from None
        if dom != sorted(dom) or rng != sorted(rng):
            raise ValidationError("domain and range arrays must be lexicographically sorted")
        if len(dom) != len(rng):
            raise ValidationError("domain and range sizes differ")
        if sorted(i for i, _ in pairs) != list(range(len(dom))) or \
                sorted(j for _, j in pairs) != list(range(len(rng))):
            raise ValidationError("map is not a bijection between the leaf arrays")
        return cls(d, {dom[i]: rng[j] for i, j in pairs})

    def __repr__(self):
        c = self.canonical()
        body = ", ".join(f"{format_address(u)}->{format_address(v)}"
                         for u, v in sorted(c._map.items()))
        return f"AlmostAutomorphism(d={self.d}: {body})"


def canonicalize(g: AlmostAutomorphism) -> AlmostAutomorphism:
    return g.canonical()


def compose(g: AlmostAutomorphism, h: AlmostAutomorphism) -> AlmostAutomorphism:
    """The element ``g o h`` (``h`` first), reduced.

    Both pairs are refined only down to the coarsest antichain common to the
    range of ``h`` and the domain of ``g``.
    """
    if g.d != h.d:
        raise ValidationError(f"branching mismatch: {g.d} vs {h.d}")
    gm, hm = g._map, h._map
    hinv = {v: u for u, v in hm.items()}
    middle = [x for x in hinv if _prefix_in(x, gm) is not None]
    middle += [y for y in gm if y not in hinv and _prefix_in(y, hinv) is not None]
    out = {}
    for c in middle:
        x = _prefix_in(c, hinv)
        y = _prefix_in(c, gm)
        out[hinv[x] + c[len(x):]] = gm[y] + c[len(y):]
    return AlmostAutomorphism(g.d, out, check=False).canonical()


def inverse(g: AlmostAutomorphism) -> AlmostAutomorphism:
    return g.inverse()


# ---------------------------------------------------------------------------
# The filtration O_n and the projections pi_n


class LevelMembership(NamedTuple):
    element: AlmostAutomorphism
    min_level: int | None   # None: not in O
    max_depth: int

    @property
    def in_O(self) -> bool:
        return self.min_level is not None


def _sphere_map(g: AlmostAutomorphism, depth: int) -> list[int]:
    """Leaf bijection at ``depth`` as a list of sphere indices (g must preserve depth)."""
    d = g.d
    out = [0] * sphere_size(d, depth)
    for u, v in g.expand_to_depth(depth).items():
        out[address_index(u, d)] = address_index(v, d)
    return out


def min_O_level(g: AlmostAutomorphism) -> LevelMembership:
    """Least n with ``g`` in O_n = Aut(T minus the open ball of radius n).

    An element lies in O exactly when every reduced leaf pair has equal depth;
    it then lies in O_n when, from level n down to its depth, it carries the
    descendants of each vertex onto the descendants of a vertex.
    """
    c = g.canonical()
    if any(len(u) != len(v) for u, v in c._map.items()):
        return LevelMembership(c, None, c.max_depth())
    depth = c.max_depth()
    sigma = _sphere_map(c, depth)
    d = c.d
    level = 0
    for m in range(depth - 1, -1, -1):
        w = d ** (depth - m)
        induced = {}
        ok = True
        for i, j in enumerate(sigma):
            b, bj = i // w, j // w
            if induced.setdefault(b, bj) != bj:
                ok = False
                break
        if not ok:
            level = m + 1
            break
    return LevelMembership(c, level, depth)


def project_level(g: AlmostAutomorphism, n: int) -> Permutation:
    """pi_n(g) as a permutation of K_n (lexicographic indexing)."""
    mem = min_O_level(g)
    if mem.min_level is None or mem.min_level > n:
        lvl = "not in O" if mem.min_level is None else f"min level {mem.min_level}"
        raise NotInLevel(f"element is not in O_{n} ({lvl})")
    depth = max(n, mem.max_depth)
    sigma = _sphere_map(mem.element, depth)
    w = g.d ** (depth - n)
    return Permutation([sigma[i * w] // w for i in range(sphere_size(g.d, n))], check=False)


def in_U_level(g: AlmostAutomorphism, n: int) -> bool:
    """Membership in U_n, the kernel of pi_n."""
    mem = min_O_level(g)
    if mem.min_level is None or mem.min_level > n:
        return False
    return project_level(mem.element, n).is_identity()


# ---------------------------------------------------------------------------
# Cayley balls

Word = tuple  # of signed generator numbers: +(i+1) for g_i, -(i+1) for its inverse


def format_word(word: Word) -> str:
    if not word:
        return "e"
    return " ".join(f"g{abs(w) - 1}" + ("^-1" if w < 0 else "") for w in word)


@dataclass
class CayleyBall:
    radius: int
    elements: dict[AlmostAutomorphism, Word] = field(default_factory=dict)
    truncated: bool = False   # resource cap hit; some words of length <= radius skipped
    saturated: bool = False   # a layer added nothing new, so the ball is the whole group

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def word(self, g: AlmostAutomorphism) -> Word:
        return self.elements[g]


def cayley_ball(generators: Sequence[AlmostAutomorphism], radius: int, *,
                d: int | None = None, cap: int = 50_000) -> CayleyBall:
    """All products of at most ``radius`` generators and inverses, with shortest words."""
    if radius < 0:
        raise ValidationError("word length must be non-negative")
    if d is None:
        d = generators[0].d if generators else 2
    if any(g.d != d for g in generators):
        raise ValidationError("generators with different branching")
    letters = []
    for i, g in enumerate(generators):
        letters.append((i + 1, g.canonical()))
        letters.append((-(i + 1), g.inverse()))
    ident = AlmostAutomorphism.identity(d)
    ball = CayleyBall(radius, {ident: ()})
    frontier = [ident]
    for _ in range(radius):
        nxt = []
        for x in frontier:
            wx = ball.elements[x]
            for sym, s in letters:
                y = compose(x, s)
                if y in ball.elements:
                    continue
                if len(ball.elements) >= cap:
                    ball.truncated = True
                    return ball
                ball.elements[y] = wx + (sym,)
                nxt.append(y)
        if not nxt:
            ball.saturated = True
            break
        frontier = nxt
    return ball


def evaluate_word(generators: Sequence[AlmostAutomorphism], word: Word, d: int) -> AlmostAutomorphism:
    g = AlmostAutomorphism.identity(d)
    for sym in word:
        s = generators[abs(sym) - 1]
        g = compose(g, s if sym > 0 else s.inverse())
    return g
