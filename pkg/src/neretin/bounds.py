"""Arithmetic side of the small-index analysis.

Entropy and multinomial estimates, the prime sieve and prime-pair rule,
Babai/Maroti size predicates, the block-count bound with its unimodality
witness, the constant selection for the general-d argument, and the
mass-transfer reduction of a multinomial coefficient.

Everything here is arithmetic: no group is ever built.  Large quantities
are carried as natural logarithms; a value that overflows a float is
reported as ``math.inf`` rather than silently wrapped.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .perm import ValidationError

# m! <= STIRLING_C * sqrt(2 pi m) (m/e)^m for all m >= 1
STIRLING_C = math.exp(1 / 12)

SLACK = 1e-9
LN2 = math.log(2)


def entropy(probs: Sequence[float]) -> float:
    """Shannon entropy in bits."""
    if any(p < 0 for p in probs):
        raise ValidationError("probabilities must be non-negative")
    if abs(sum(probs) - 1) > 1e-9:
        raise ValidationError(f"probabilities sum to {sum(probs)}, not 1")
    return -sum(p * math.log2(p) for p in probs if p > 0)


def multinomial(parts: Sequence[int]) -> int:
    """Exact multinomial coefficient ``(sum parts)! / prod(part!)``."""
    if any(p < 0 for p in parts):
        raise ValidationError("parts must be non-negative")
    out, run = 1, 0
    for p in parts:
        run += p
        out *= math.comb(run, p)
    return out


def log2_multinomial(parts: Sequence[int]) -> float:
    if any(p < 0 for p in parts):
        raise ValidationError("parts must be non-negative")
    n = sum(parts)
    val = (math.lgamma(n + 1) - sum(math.lgamma(p + 1) for p in parts)) / LN2
    if n <= 40:
        exact = math.log2(multinomial(parts))
        if abs(val - exact) > 1e-9 * max(1.0, exact):
            raise AssertionError(f"log-gamma drift on {parts}: {val} vs {exact}")
        return exact
    return val


def ln_factorial(m: float) -> float:
    return math.lgamma(m + 1)


# ---------------------------------------------------------------------------
# Primes


def prime_sieve(hi: int) -> list[bool]:
    """Eratosthenes sieve: ``table[i]`` is True iff ``i`` is prime, ``0 <= i <= hi``."""
    table = [True] * (hi + 1)
    table[:2] = [False] * min(2, hi + 1)
    for i in range(2, math.isqrt(hi) + 1):
        if table[i]:
            table[i * i::i] = [False] * len(range(i * i, hi + 1, i))
    return table


def primes_between(lo: int, hi: int) -> list[int]:
    if hi < 2:
        return []
    table = prime_sieve(hi)
    return [p for p in range(max(lo, 2), hi + 1) if table[p]]


class PrimePair(NamedTuple):
    k: int
    p: int
    q: int
    interval: tuple[int, int]
    certificate: tuple[int, ...]   # every prime in the interval, from the sieve


def prime_pair(k: int) -> PrimePair | None:
    """Primes ``p <= q - 3`` in ``[0.3k, k]`` with ``q != k/2 + 1``, or None.

    ``q`` is the largest admissible prime that has a partner and ``p`` the
    largest prime not exceeding ``q - 3`` inside the interval.
    """
    if k < 1:
        raise ValidationError("k must be positive")
    lo = -(-3 * k // 10)  # ceil(0.3 k)
    primes = primes_between(lo, k)
    for q in reversed(primes):
        if 2 * q == k + 2:
            continue
        partners = [p for p in primes if p <= q - 3]
        if partners:
            return PrimePair(k, partners[-1], q, (lo, k), tuple(primes))
    return None


# ---------------------------------------------------------------------------
# Babai-type predicates


@dataclass(frozen=True)
class BabaiReport:
    n: int
    ln_order: float
    two_transitive: bool
    ln_bound_not_2t: float        # 4 sqrt(n) ln^2 n
    ln_bound_2t: float | None     # e^(c sqrt(ln n)); None without c_param
    ln_bound_maroti: float        # ln 50 + sqrt(n) ln n
    must_be_giant: bool           # from the bound that applies to this group
    maroti_must_be_giant: bool

    @property
    def consistent_with_not_giant(self) -> bool:
        return not self.must_be_giant


def babai_predicates(n: int, order: int, two_transitive: bool,
                     c_param: float | None = None) -> BabaiReport:
    """Compare an exact group order with primitive-group size bounds (natural logs).

    ``must_be_giant`` is True when the order meets or exceeds the bound for a
    primitive non-giant of the given transitivity.  The 2-transitive bound
    needs ``c_param``; without it that case never forces a verdict.
    """
    if n < 5:
        raise ValidationError("bounds are stated for n >= 5")
    if order < 1:
        raise ValidationError("order must be positive")
    ln_order = math.log(order)
    ln_n = math.log(n)
    not_2t = 4 * math.sqrt(n) * ln_n ** 2
    two_t = math.exp(c_param * math.sqrt(ln_n)) if c_param is not None else None
    maroti = math.log(50) + math.sqrt(n) * ln_n
    if two_transitive:
        forced = two_t is not None and ln_order >= two_t - SLACK
    else:
        forced = ln_order >= not_2t - SLACK
    return BabaiReport(n, ln_order, two_transitive, not_2t, two_t, maroti,
                       forced, ln_order >= maroti - SLACK)


# ---------------------------------------------------------------------------
# Orbit and block bounds


def f1(d: int, delta: float) -> float:
    """Orbit-size threshold: delta / (100 (d+1)^(1/delta))."""
    return math.exp(ln_f1(d, delta))


def ln_f1(d: int, delta: float) -> float:
    return math.log(delta) - math.log(100) - math.log(d + 1) / delta


def ln_f2(d: int, eps: float, c_st: float = STIRLING_C) -> float:
    """log of the block-count bound 300 c (d+1)^(1/eps)."""
    return math.log(300 * c_st) + math.log(d + 1) / eps


def f2(d: int, eps: float, c_st: float = STIRLING_C) -> float:
    try:
        return math.exp(ln_f2(d, eps, c_st))
    except OverflowError:
        return math.inf


def ln_g(y: float, b: float, c_st: float = STIRLING_C) -> float:
    """log g(b) = -y ln(100c) + y ln b - (b/2) ln(y b)."""
    return -y * math.log(100 * c_st) + y * math.log(b) - (b / 2) * math.log(y * b)


def h_prime(x: float, y: float) -> float:
    return y / x - 0.5 - 0.5 * math.log(x) - 0.5 * math.log(y)


@dataclass(frozen=True)
class BlockBoundReport:
    y: int
    b: float
    ln_g_b: float
    ln_index_lower: float      # ln of y!/(b!((y/b)!)^b) when b divides y, else nan
    f2: float
    ln_f2: float
    h_prime_decreasing: bool   # sampled on x = 1, 2, ..., y/2
    ln_g_half: float
    ln_g_half_floor: float     # y ln(sqrt(y) / (400 c))
    g_half_ok: bool


def block_bound_and_unimodularity(y: int, b: float, d: int, eps: float,
                                  c_st: float = STIRLING_C) -> BlockBoundReport:
    if not 1 <= b <= y / 2:
        raise ValidationError(f"b={b} outside [1, y/2] for y={y}")
    grid = [h_prime(x, y) for x in range(1, y // 2 + 1)]
    decreasing = all(a > b2 for a, b2 in zip(grid, grid[1:]))
    if float(b).is_integer() and y % int(b) == 0:
        bi = int(b)
        ln_idx = ln_factorial(y) - ln_factorial(bi) - bi * ln_factorial(y // bi)
    else:
        ln_idx = math.nan
    half = ln_g(y, y / 2, c_st)
    floor = y * (0.5 * math.log(y) - math.log(400 * c_st))
    return BlockBoundReport(y, b, ln_g(y, b, c_st), ln_idx, f2(d, eps, c_st),
                            ln_f2(d, eps, c_st), decreasing, half, floor,
                            half >= floor - SLACK)


# ---------------------------------------------------------------------------
# Constant selection


def entropy_profile(d: int, alpha: float) -> list[float]:
    """``(1/d, ..., 1/d, 1/d - alpha/2, alpha/2)`` with d-1 leading copies."""
    return [1 / d] * (d - 1) + [1 / d - alpha / 2, alpha / 2]


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


@dataclass(frozen=True)
class BoundConstants:
    c: float
    d: int
    alpha: float
    delta: float
    beta: float
    d_tilde: float
    entropy_bits: float
    eps: float
    ln_eps: float
    ln_V: float
    ln_V0: float
    ln_eps0: float
    ln_C: float
    margin: float   # ln of the left side over ln d_tilde, minus one

    PROVENANCE = {
        "d_tilde": "midpoint of (d, 2^H) with H the entropy of (1/d,...,1/d,1/d-alpha/2,alpha/2)",
        "delta": "largest alpha/2^j (j>=2) admitting some beta with "
                 "(1/d-alpha)^delta (2^H)^(1-beta) > d_tilde",
        "beta": "largest 2^-j satisfying the same inequality at the chosen delta",
        "eps": "delta / (100 (d+1)^(1/delta))",
        "V": "300 c_st (d+1)^(1/eps), c_st = e^(1/12)",
        "V0": "V / eps",
        "eps0": "eps / V",
        "C": "c (V! 2^V)^(1/eps)",
    }

    @property
    def V(self) -> float:
        return _safe_exp(self.ln_V)

    def to_json(self) -> dict:
        out = asdict(self)
        out["provenance"] = dict(self.PROVENANCE)
        return {k: (repr(v) if isinstance(v, float) and not math.isfinite(v) else v)
                for k, v in out.items()}


def choose_constants(c: float, d: int, alpha: float, max_halvings: int = 60) -> BoundConstants:
    if d < 2:
        raise ValidationError("d must be at least 2")
    if not 0 < alpha < 1 / d:
        raise ValidationError(f"alpha must lie in (0, 1/d); got {alpha}")
    if c <= 0:
        raise ValidationError("c must be positive")
    H = entropy(entropy_profile(d, alpha))
    top = 2 ** H
    d_tilde = (d + top) / 2
    target = math.log(d_tilde)
    for jd in range(2, max_halvings + 2):
        delta = alpha / 2 ** jd
        for jb in range(1, max_halvings + 1):
            beta = 2.0 ** -jb
            lhs = delta * math.log(1 / d - alpha) + (1 - beta) * H * LN2
            if lhs > target:
                break
        else:
            continue
        break
    else:
        raise ValidationError("no feasible (delta, beta) within the halving budget")
    ln_eps = ln_f1(d, delta)
    eps = math.exp(ln_eps)
    inv_eps = _safe_exp(-ln_eps)
    ln_V = math.log(300 * STIRLING_C) + math.log(d + 1) * inv_eps
    V = _safe_exp(ln_V)
    ln_V0 = ln_V - ln_eps
    ln_eps0 = ln_eps - ln_V
    if math.isfinite(V):
        ln_C = math.log(c) + inv_eps * (ln_factorial(V) + V * LN2)
    else:
        ln_C = math.inf
    return BoundConstants(c, d, alpha, delta, beta, d_tilde, H, eps, ln_eps,
                          ln_V, ln_V0, ln_eps0, ln_C, lhs / target - 1)


# ---------------------------------------------------------------------------
# Mass transfer


@dataclass(frozen=True)
class MassTransfer:
    original: tuple[int, ...]
    reduced: tuple[int, ...]       # (a_1, ..., a_{d-1}, b, tail)
    tail_target: int
    tail_condition: bool           # original tail beyond the d largest >= alpha k / 2
    log2_original: float
    log2_reduced: float
    log2_polynomial_bound: float   # reduced bound divided by (k/d + 2)^(d-1)
    monotone: bool                 # every move checked not to increase the coefficient


def mass_transfer_bound(parts: Sequence[int], k: int, d: int, alpha: float) -> MassTransfer:
    """Reduce a multinomial by moving mass towards larger parts.

    Each unit move takes one from a part and gives it to a part at least as
    large, which never increases the coefficient; the final merge of the
    tail into one part cannot increase it either.  Both facts are checked
    with exact integers along the way.
    """
    parts = sorted((p for p in parts if p > 0), reverse=True)
    if not parts:
        raise ValidationError("no parts")
    z = sum(parts)
    cap = -(-k // d)  # ceil(k/d)
    head = parts[:d] + [0] * max(0, d - len(parts))
    tail = parts[d:]
    want = math.ceil(alpha * k / 2 - 1e-12)
    tail_ok = sum(tail) >= want
    want = min(want, sum(tail))
    monotone = True

    def coeff():
        return multinomial(head + tail)

    prev = coeff()

    def move(src_list, si, dst_idx):
        nonlocal prev, monotone
        src_list[si] -= 1
        head[dst_idx] += 1
        cur = coeff()
        if cur > prev:
            monotone = False
        prev = cur

    def pop_tail():
        while tail and tail[-1] == 0:
            tail.pop()

    for i in range(d - 1):
        while head[i] < cap and sum(tail) > want:
            pop_tail()
            move(tail, len(tail) - 1, i)
        pop_tail()
    if all(head[i] >= cap for i in range(d - 1)):
        while sum(tail) > want:
            pop_tail()
            move(tail, len(tail) - 1, d - 1)
        pop_tail()
    else:
        for i in range(d - 1):
            while head[i] < cap and head[d - 1] > 0:
                head[d - 1] -= 1
                head[i] += 1
                cur = coeff()
                if cur > prev:
                    monotone = False
                prev = cur
    merged = head + [sum(tail)]
    if multinomial(merged) > prev:
        monotone = False
    log2_red = log2_multinomial(merged)
    poly = (d - 1) * math.log2(k / d + 2)
    return MassTransfer(tuple(parts), tuple(merged), want, tail_ok,
                        log2_multinomial(parts), log2_red, log2_red - poly, monotone)


def log_space_le(ln_a: float, ln_b: float) -> bool:
    return ln_a <= ln_b + SLACK


def as_fraction_json(x: Fraction) -> dict:
    return {"num": str(x.numerator), "den": str(x.denominator)}
