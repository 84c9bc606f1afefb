"""Primes, batch-arrival statistics, the regularized incomplete beta
function, and distinct-subset-sum integer sets.

Two set constructions are provided. The greedy smallest-lexicographic
search guarantees that *all* subset sums up to size K are pairwise
distinct, but its elements outgrow [1, M**K) beyond small parameters.
The algebraic construction over GF(M**K) always stays inside [1, M**K)
and guarantees distinct sums for equal-size subsets, which is exactly
what a multiplicity-aware decoder needs; sums of different-size subsets
may collide (they demonstrably do), so full verification is left to
``verify_sidon``. ``build_sidon_set`` picks the strongest construction
that fits the parameters.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

from scipy.stats import binom as _binom
from scipy.special import betainc as _betainc

from . import _gf
from .errors import ArgumentError, CapabilityError, IntegrityError

is_prime = _gf.is_prime

_PRIME_INPUT_LIMIT = 1 << 63
_GREEDY_GATE = 1 << 18  # build_sidon_set attempts the greedy search below this M**K
_GREEDY_LIMIT = 1 << 22
_VERIFY_GUARD = 10_000_000


def smallest_prime_greater(n: int) -> int:
    """Smallest prime q > n; always q < 2n for n >= 1."""
    if n < 1:
        raise ArgumentError("n must be >= 1")
    if n >= _PRIME_INPUT_LIMIT:
        raise CapabilityError(f"n exceeds the supported range (< 2**63): {n}")
    q = n + 1
    while not is_prime(q):
        q += 1
    return q


def prime_lift(M: int) -> int:
    """M itself when prime, else the next prime above it."""
    if M < 2:
        raise ArgumentError("population must be >= 2")
    return M if is_prime(M) else smallest_prime_greater(M)


@dataclass(frozen=True)
class ArrivalModel:
    """Batch arrivals: each of M users is independently active with probability p."""

    M: int
    p: float

    def __post_init__(self):
        if self.M < 1:
            raise ArgumentError("M must be >= 1")
        if not 0.0 <= self.p <= 1.0:
            raise ArgumentError("p must lie in [0, 1]")

    def pmf(self, L: int) -> float:
        """Probability that exactly L users are active."""
        if not 0 <= L <= self.M:
            raise ArgumentError(f"L must lie in [0, {self.M}]")
        return float(_binom.pmf(L, self.M, self.p))

    @property
    def idle_prob(self) -> float:
        """Probability of an empty batch."""
        return (1.0 - self.p) ** self.M

    def conditional_pmf(self, L: int) -> float:
        """Batch-size pmf conditioned on at least one active user."""
        if self.p == 0.0:
            raise ArgumentError("conditional pmf undefined for p = 0")
        if not 1 <= L <= self.M:
            raise ArgumentError(f"L must lie in [1, {self.M}]")
        return self.pmf(L) / (1.0 - self.idle_prob)


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b), with the boundary convention I_x(a, 0) = 0 for x < 1."""
    if not 0.0 <= x <= 1.0:
        raise ArgumentError("x must lie in [0, 1]")
    if a <= 0:
        raise ArgumentError("a must be positive")
    if b < 0:
        raise ArgumentError("b must be nonnegative")
    if b == 0:
        return 1.0 if x == 1.0 else 0.0
    return float(_betainc(a, b, x))


@dataclass(frozen=True)
class SidonSet:
    """M distinct positive integers whose subset sums identify subsets.

    ``method`` records the construction: "sequential" (K = 1), "greedy"
    (all subset sums of size <= K distinct) or "bose_chowla" (distinct
    sums guaranteed for equal-size subsets; elements in [1, M**K)).
    elements[i] belongs to user i + 1.
    """

    M: int
    K: int
    elements: tuple[int, ...]
    method: str

    def __post_init__(self):
        if len(self.elements) != self.M or len(set(self.elements)) != self.M:
            raise IntegrityError("set must hold M distinct elements")
        if any(e < 1 for e in self.elements):
            raise IntegrityError("elements must be positive")


def _check_params(M: int, K: int) -> None:
    if M < 2:
        raise ArgumentError("M must be >= 2")
    if K < 1:
        raise ArgumentError("K must be >= 1")
    if M**K >= 1 << 127:
        raise CapabilityError(f"M**K = {M}**{K} exceeds the 2**127 size guard")


def _greedy_elements(M: int, K: int, limit: int) -> tuple[int, ...] | None:
    # masks[s] holds a bit at every size-s subset sum; a candidate x is
    # admissible iff no sum of a size-<K subset shifted by x collides with
    # any existing nonempty subset sum (new-new collisions are impossible
    # because the size-<K sums are already distinct).
    masks = [1] + [0] * K
    small, full = 1, 0
    els: list[int] = []
    x = 0
    while len(els) < M:
        x += 1
        if x >= limit:
            return None
        if (small << x) & full:
            continue
        for s in range(K - 1, -1, -1):
            masks[s + 1] |= masks[s] << x
        small = 0
        for s in range(K):
            small |= masks[s]
        full = 0
        for s in range(1, K + 1):
            full |= masks[s]
        els.append(x)
    return tuple(els)


def greedy_sidon_set(M: int, K: int) -> SidonSet:
    """Smallest-lexicographic set with every subset sum of size <= K distinct.

    Raises CapabilityError when no such greedy set fits inside [1, M**K)
    or when M**K is too large for the bitmask search.
    """
    _check_params(M, K)
    if K == 1:
        return SidonSet(M, 1, tuple(range(1, M + 1)), "sequential")
    if M**K > _GREEDY_LIMIT:
        raise CapabilityError(
            f"greedy search over [1, {M}**{K}) exceeds the {_GREEDY_LIMIT} range guard"
        )
    els = _greedy_elements(M, K, M**K)
    if els is None:
        raise CapabilityError(
            f"greedy search found no {M}-element set of order {K} inside [1, {M}**{K})"
        )
    return SidonSet(M, K, els, "greedy")


def bose_chowla_set(M: int, K: int) -> SidonSet:
    """Algebraic construction over GF(M**K); M must be prime, K >= 2.

    Element i is the discrete log, base a fixed generator x of the
    multiplicative group, of x + (i - 1). Equal-size subsets always have
    distinct sums; all elements lie in [1, M**K).
    """
    _check_params(M, K)
    if K < 2:
        raise ArgumentError("algebraic construction needs K >= 2; use K = 1 sequential sets")
    if not is_prime(M):
        raise ArgumentError(f"M must be prime (got {M}); see prime_lift")
    field = _gf.extension_field(M, K)
    els = _gf.linear_shift_dlogs(field, M)
    if len(set(els)) != M or min(els) < 1 or max(els) >= M**K:
        raise IntegrityError("discrete-log construction produced an invalid set")
    return SidonSet(M, K, tuple(els), "bose_chowla")


@lru_cache(maxsize=64)
def build_sidon_set(M: int, K: int) -> SidonSet:
    """Deterministic set for (M, K): sequential for K = 1, the greedy
    search when it fits (small M**K), else the algebraic construction."""
    _check_params(M, K)
    if not is_prime(M):
        raise ArgumentError(f"M must be prime (got {M}); see prime_lift")
    if K == 1:
        return SidonSet(M, 1, tuple(range(1, M + 1)), "sequential")
    if M**K <= _GREEDY_GATE:
        try:
            return greedy_sidon_set(M, K)
        except CapabilityError:
            pass
    return bose_chowla_set(M, K)


def verify_sidon(s: SidonSet, *, sizewise: bool = False, guard: int = _VERIFY_GUARD) -> bool:
    """Exhaustively check distinctness of subset sums up to size K.

    Full mode compares sums across all distinct subsets of size <= K;
    ``sizewise`` restricts the comparison to equal-size subsets (the
    property a multiplicity-aware decoder relies on).
    """
    total = sum(comb(s.M, i) for i in range(s.K + 1))
    if total > guard:
        raise CapabilityError(f"{total} subsets exceed the enumeration guard ({guard})")
    if len(set(s.elements)) != s.M:
        return False
    seen: dict[int, int] = {}
    for size in range(1, s.K + 1):
        for sub in combinations(s.elements, size):
            t = sum(sub)
            if t in seen and (not sizewise or seen[t] == size):
                return False
            seen.setdefault(t, size)
    return True
