"""The (d+1)-regular tree seen from a fixed edge e0.

A vertex address is a tuple ``(side, c1, c2, ..., cm)``: ``side`` is 0 for
the endpoint L of e0 and 1 for R, and the digits ``ci`` in ``0..d-1`` name
children walking away from e0.  The level of an address is its number of
digits, so level-0 addresses are the two endpoints of e0.

The sphere K_n is the set of level-n addresses.  It is indexed
lexicographically, which puts the ``d`` children of the vertex with index
``j`` at indices ``d*j .. d*j + d - 1`` one level down.

Convention: U_n is the kernel of the projection onto Sym(K_n), i.e. the
pointwise stabiliser of the closed ball of radius n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product
from typing import NamedTuple, Sequence

from .perm import Permutation, ValidationError

Address = tuple  # (side, digit, digit, ...)

SIDES = "LR"


def sphere_size(d: int, n: int) -> int:
    return 2 * d ** n


def ball_aut_order(d: int, n: int) -> int:
    internal = 2 * (d ** n - 1) // (d - 1)
    return 2 * math.factorial(d) ** internal


@dataclass(frozen=True)
class BallSpec:
    d: int
    n: int

    def __post_init__(self):
        if self.d < 2:
            raise ValidationError("branching d must be at least 2")
        if self.n < 0:
            raise ValidationError("level n must be non-negative")

    @property
    def k(self) -> int:
        return sphere_size(self.d, self.n)

    @property
    def a(self) -> int:
        return ball_aut_order(self.d, self.n)


def sphere_and_ball_counts(spec: BallSpec) -> tuple[int, int]:
    return spec.k, spec.a


def level(addr: Address) -> int:
    return len(addr) - 1


def parent(addr: Address) -> Address:
    if len(addr) < 2:
        raise ValidationError("level-0 addresses have no parent")
    return addr[:-1]


def format_address(addr: Address) -> str:
    return SIDES[addr[0]] + "".join(str(c) for c in addr[1:])


def parse_address(text: str, d: int) -> Address:
    if d > 10:
        raise ValidationError("text addresses support d <= 10 only")
    if not text or text[0] not in SIDES:
        raise ValidationError(f"bad address {text!r}")
    digits = []
    for ch in text[1:]:
        if not ch.isdigit() or int(ch) >= d:
            raise ValidationError(f"bad digit {ch!r} in address {text!r} (d={d})")
        digits.append(int(ch))
    return (SIDES.index(text[0]), *digits)


def check_address(addr: Address, d: int) -> None:
    if not addr or addr[0] not in (0, 1):
        raise ValidationError(f"bad side in address {addr!r}")
    if any(not 0 <= c < d for c in addr[1:]):
        raise ValidationError(f"bad digit in address {addr!r} for d={d}")


def address_index(addr: Address, d: int) -> int:
    """Position of ``addr`` in the lexicographic order of its sphere."""
    i = addr[0]
    for c in addr[1:]:
        i = i * d + c
    return i


def index_address(i: int, d: int, n: int) -> Address:
    digits = []
    for _ in range(n):
        i, c = divmod(i, d)
        digits.append(c)
    return (i, *reversed(digits))


def sphere_addresses(d: int, n: int) -> list[Address]:
    return [(s, *path) for s in (0, 1) for path in product(range(d), repeat=n)]


def descendants(addr: Address, d: int, depth: int) -> list[Address]:
    """All addresses ``depth`` levels below ``addr``, in lexicographic order."""
    return [addr + tail for tail in product(range(d), repeat=depth)]


def ball_aut_generators(spec: BallSpec) -> list[Permutation]:
    """Generators of Aut(B_n(e0)) acting on K_n.

    The edge flip, plus for every vertex below level n the adjacent
    transpositions of its child subtrees.
    """
    d, n = spec.d, spec.n
    k = spec.k
    half = k // 2
    flip = Permutation([(i + half) % k for i in range(k)], check=False)
    gens = [flip]
    for m in range(n):
        width = d ** (n - m - 1)  # K_n leaves below one level-(m+1) vertex
        for j in range(sphere_size(d, m)):
            for t in range(d - 1):
                img = list(range(k))
                c0 = (j * d + t) * width
                c1 = c0 + width
                for r in range(width):
                    img[c0 + r], img[c1 + r] = c1 + r, c0 + r
                gens.append(Permutation(img, check=False))
    return gens


class SiblingViolation(NamedTuple):
    sibling_class: tuple[int, ...]
    image: tuple[int, ...]


def parent_projection(sigma: Permutation, d: int, n: int) -> Permutation | SiblingViolation:
    """Induced permutation of K_{n-1}, or the first sibling class that is split."""
    if n < 1:
        raise ValidationError("parent projection needs n >= 1")
    k = sphere_size(d, n)
    if sigma.degree != k:
        raise ValidationError(f"expected degree {k}, got {sigma.degree}")
    out = []
    for j in range(k // d):
        cls = tuple(range(j * d, j * d + d))
        img = tuple(sigma(x) for x in cls)
        parents = {y // d for y in img}
        if len(parents) != 1:
            return SiblingViolation(cls, img)
        out.append(parents.pop())
    return Permutation(out, check=False)


def sibling_classes(d: int, n: int) -> list[tuple[int, ...]]:
    return [tuple(range(j * d, j * d + d)) for j in range(sphere_size(d, n) // d)]


def children_in(points: Sequence[int], d: int) -> dict[int, list[int]]:
    """Group sphere indices by parent index (one level up)."""
    out: dict[int, list[int]] = {}
    for x in sorted(points):
        out.setdefault(x // d, []).append(x)
    return out
