"""K-out-of-M signature codebooks over F_q and sum decoding.

A signature is one counter symbol fixed to 1 followed by the fixed-width
little-endian base-r digits of the user's integer from a distinct-subset-sum
set. Summing up to K signatures in F_q never wraps a digit position
(K*(r-1) < q), so the receiver recovers the exact integer sum of the
transmitted users' set elements and inverts it: through a precomputed table
when the subset space is small enough, or algebraically in GF(M^K) for the
discrete-log construction. The leading counter reveals the multiplicity, so
inversion only ever compares equal-size subsets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from itertools import combinations

import numpy as np

from . import _gf
from .errors import ArgumentError, CapabilityError, IntegrityError
from .numtheory import SidonSet, build_sidon_set, prime_lift, smallest_prime_greater

DEFAULT_SUM_TABLE_LIMIT = 10_000_000


class SymbolWord:
    """Fixed-length vector of residues mod q with componentwise arithmetic."""

    __slots__ = ("q", "symbols")

    def __init__(self, symbols, q: int):
        self.q = q
        self.symbols = tuple(int(s) % q for s in symbols)

    @classmethod
    def zero(cls, length: int, q: int) -> "SymbolWord":
        return cls((0,) * length, q)

    def zero_like(self) -> "SymbolWord":
        return SymbolWord.zero(len(self.symbols), self.q)

    def __add__(self, other: "SymbolWord") -> "SymbolWord":
        if self.q != other.q or len(self.symbols) != len(other.symbols):
            raise ArgumentError("word shape mismatch")
        q = self.q
        return SymbolWord(
            tuple((a + b) % q for a, b in zip(self.symbols, other.symbols)), q
        )

    def __sub__(self, other: "SymbolWord") -> "SymbolWord":
        if self.q != other.q or len(self.symbols) != len(other.symbols):
            raise ArgumentError("word shape mismatch")
        q = self.q
        return SymbolWord(
            tuple((a - b) % q for a, b in zip(self.symbols, other.symbols)), q
        )

    def concat(self, other: "SymbolWord") -> "SymbolWord":
        if self.q != other.q:
            raise ArgumentError("modulus mismatch")
        return SymbolWord(self.symbols + other.symbols, self.q)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SymbolWord)
            and self.q == other.q
            and self.symbols == other.symbols
        )

    def __hash__(self):
        return hash((self.q, self.symbols))

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, idx):
        return self.symbols[idx]

    def __repr__(self):
        return f"SymbolWord({list(self.symbols)}, q={self.q})"


def sum_words(words, *, like: SymbolWord | None = None) -> SymbolWord:
    """Componentwise F_q sum; an empty input needs a template for its shape."""
    words = list(words)
    if not words:
        if like is None:
            raise ArgumentError("empty sum needs a template word")
        return like.zero_like()
    acc = words[0]
    for w in words[1:]:
        acc = acc + w
    return acc


class OutcomeKind(Enum):
    EMPTY = "empty"
    RESOLVED = "resolved"
    COLLISION = "collision"


@dataclass(frozen=True)
class DecodeOutcome:
    """Multiplicity plus, when at most K users were present, their identities."""

    multiplicity: int
    kind: OutcomeKind
    active: frozenset[int] | None = None

    def __post_init__(self):
        if self.kind is OutcomeKind.RESOLVED and (
            self.active is None or len(self.active) != self.multiplicity
        ):
            raise IntegrityError("resolved outcome must carry its active set")


@dataclass(frozen=True)
class FieldParams:
    """Symbol modulus and digit radix for a population of M users.

    ``prime_M`` is the design population: M itself when prime, otherwise the
    next prime (only the first M signatures are handed out).
    """

    M: int
    K: int
    q: int
    r: int
    prime_M: int

    def __post_init__(self):
        if self.q != smallest_prime_greater(self.prime_M):
            raise IntegrityError("q must be the smallest prime above the design population")
        if self.r != self.prime_M // self.K:
            raise IntegrityError("radix must be floor(prime_M / K)")
        if self.r < 2:
            raise IntegrityError("radix must be >= 2")
        if self.r * (self.K - 1) >= self.q or self.K * (self.r - 1) >= self.q:
            raise IntegrityError("digit sums must not wrap modulo q")


class SignatureCodebook:
    """Per-user signature words plus the machinery to invert their F_q sums.

    Construction is lazy: layout (q, r, digit count) is fixed eagerly, while
    the integer set, signatures and inversion table materialize on first use.
    """

    def __init__(self, params: FieldParams, digit_count: int, sum_table_limit: int):
        self.params = params
        self.digit_count = digit_count
        self.sum_table_limit = sum_table_limit
        self._r_powers = tuple(params.r**j for j in range(digit_count))

    @property
    def signature_length(self) -> int:
        return 1 + self.digit_count

    def zero_word(self) -> SymbolWord:
        return SymbolWord.zero(self.signature_length, self.params.q)

    @cached_property
    def sidon(self) -> SidonSet:
        return build_sidon_set(self.params.prime_M, self.params.K)

    @cached_property
    def _user_by_element(self) -> dict[int, int]:
        return {s: i + 1 for i, s in enumerate(self.sidon.elements[: self.params.M])}

    @cached_property
    def sum_table(self) -> dict[tuple[int, int], frozenset[int]] | None:
        """(multiplicity, integer sum) -> active set, over the served users.

        Skipped (None) when the subset count exceeds ``sum_table_limit``;
        decoding then requires the algebraic construction.
        """
        M, K = self.params.M, self.params.K
        total = sum(math.comb(M, i) for i in range(1, K + 1))
        if total > self.sum_table_limit:
            if self.sidon.method != "bose_chowla":
                raise CapabilityError(
                    f"{total} subset sums exceed the table guard ({self.sum_table_limit}) "
                    "and no algebraic decoder exists for this construction; "
                    "use smaller (M, K)"
                )
            return None
        els = self.sidon.elements
        table: dict[tuple[int, int], frozenset[int]] = {}
        for size in range(1, K + 1):
            for sub in combinations(range(1, M + 1), size):
                key = (size, sum(els[u - 1] for u in sub))
                if key in table:
                    raise IntegrityError("equal-size subset sums collide; invalid set")
                table[key] = frozenset(sub)
        return table

    @cached_property
    def _signatures(self) -> tuple[SymbolWord, ...]:
        return tuple(self._encode(u) for u in range(1, self.params.M + 1))

    def _encode(self, user: int) -> SymbolWord:
        s = self.sidon.elements[user - 1]
        if self.params.K == 1:
            # single body symbol carries the element directly (no sums to wrap)
            return SymbolWord((1, s), self.params.q)
        digits = []
        for _ in range(self.digit_count):
            digits.append(s % self.params.r)
            s //= self.params.r
        if s:
            raise IntegrityError("element does not fit the digit layout")
        return SymbolWord((1, *digits), self.params.q)

    def signature(self, user: int) -> SymbolWord:
        if not 1 <= user <= self.params.M:
            raise ArgumentError(f"user must lie in [1, {self.params.M}]")
        return self._signatures[user - 1]

    # -- decoding ----------------------------------------------------------

    def decode(self, word: SymbolWord) -> DecodeOutcome:
        """Invert an F_q sum of distinct user signatures."""
        if len(word) != self.signature_length or word.q != self.params.q:
            raise ArgumentError("word does not match the codebook layout")
        L = word[0]
        if L > self.params.M:
            raise IntegrityError("multiplicity exceeds the population")
        if L == 0:
            if any(word.symbols):
                raise IntegrityError("nonzero body in an idle slot")
            return DecodeOutcome(0, OutcomeKind.EMPTY)
        if L > self.params.K:
            return DecodeOutcome(L, OutcomeKind.COLLISION)
        K, r = self.params.K, self.params.r
        cap = K * (r - 1) if K >= 2 else self.params.q - 1
        total = 0
        for digit, weight in zip(word.symbols[1:], self._r_powers):
            if digit > cap:
                raise IntegrityError("digit sum outside the no-wrap range")
            total += digit * weight
        active = self._invert(L, total)
        return DecodeOutcome(L, OutcomeKind.RESOLVED, active)

    def _invert(self, size: int, total: int) -> frozenset[int]:
        if self.params.K == 1:
            user = self._user_by_element.get(total)
            if user is None:
                raise IntegrityError(f"integer sum {total} is not a served element")
            return frozenset((user,))
        table = self.sum_table
        if table is not None:
            active = table.get((size, total))
            if active is None:
                raise IntegrityError(f"integer sum {total} not invertible at size {size}")
            return active
        return self._invert_algebraic(size, total)

    def _invert_algebraic(self, size: int, total: int) -> frozenset[int]:
        # The sum of discrete logs maps to a product of linear factors:
        # x^total = prod (x + c_i). Read the monic degree-`size` polynomial
        # off the coefficient vector and collect its roots -c_i over GF(p).
        p, K = self.params.prime_M, self.params.K
        field = _gf.extension_field(p, K)
        E = field.pow(field.gen, total)
        if size < K:
            if E[size] != 1 or any(E[j] for j in range(size + 1, K)):
                raise IntegrityError(f"sum {total} is not a size-{size} product")
            coeffs = list(E[:size]) + [1]
        else:
            coeffs = [(f + e) % p for f, e in zip(field.modulus_tail, E)] + [1]
        xs = np.arange(p, dtype=np.int64)
        acc = np.full(p, coeffs[-1], dtype=np.int64)
        for c in reversed(coeffs[:-1]):
            acc = (acc * xs + c) % p
        roots = np.nonzero(acc == 0)[0]
        if len(roots) != size:
            raise IntegrityError(f"sum {total} has {len(roots)} roots, expected {size}")
        users = frozenset(int((-root) % p) + 1 for root in roots)
        if len(users) != size or max(users) > self.params.M:
            raise IntegrityError("decoded users outside the served population")
        els = self.sidon.elements
        if sum(els[u - 1] for u in users) != total:
            raise IntegrityError("decoded set does not reproduce the integer sum")
        return users


def build_codebook(
    M: int, K: int, *, sum_table_limit: int = DEFAULT_SUM_TABLE_LIMIT
) -> SignatureCodebook:
    """Codebook for M users resolving up to K simultaneous transmissions.

    Requires K <= floor(M/2) so the digit radix stays >= 2. Composite M is
    lifted to the next prime for the construction; only the first M
    signatures are used.
    """
    if M < 2:
        raise ArgumentError("M must be >= 2")
    if K < 1:
        raise ArgumentError("K must be >= 1")
    if K > M // 2:
        raise CapabilityError(f"K exceeds floor(M/2) = {M // 2}; radix would drop below 2")
    pm = prime_lift(M)
    if pm**K >= 1 << 127:
        raise CapabilityError(f"M**K exceeds the 2**127 size guard")
    q = smallest_prime_greater(pm)
    r = pm // K
    params = FieldParams(M=M, K=K, q=q, r=r, prime_M=pm)
    target = pm**K
    digit_count, span = 1, r
    while span < target:
        digit_count += 1
        span *= r
    return SignatureCodebook(params, digit_count, sum_table_limit)


def encode_signature(codebook: SignatureCodebook, user: int) -> SymbolWord:
    return codebook.signature(user)


def decode_sum(codebook: SignatureCodebook, word: SymbolWord) -> DecodeOutcome:
    return codebook.decode(word)


def signature_bits(codebook: SignatureCodebook) -> float:
    """Signature length in bits under the codebook's layout."""
    return codebook.signature_length * math.log2(codebook.params.q)


def signature_bits_bound(M: int, K: int) -> float:
    """Closed-form upper bound on achievable signature length in bits."""
    if M < 2 or K < 1:
        raise ArgumentError("need M >= 2 and K >= 1")
    if K >= M:
        return math.inf
    denom = 1.0 - math.log2(K) / math.log2(M)
    return (K / denom + 1.0) * (math.log2(M) + 1.0)


def dump_codebook(codebook: SignatureCodebook) -> str:
    """Deterministic text dump: header `M K q r digit_count`, then one line
    per user: `id element digits...`."""
    p = codebook.params
    lines = []
    if p.prime_M != p.M:
        lines.append(f"# prime lift: M={p.M} -> {p.prime_M}")
    lines.append(f"{p.M} {p.K} {p.q} {p.r} {codebook.digit_count}")
    for user in range(1, p.M + 1):
        word = codebook.signature(user)
        digits = " ".join(str(d) for d in word.symbols[1:])
        lines.append(f"{user} {codebook.sidon.elements[user - 1]} {digits}")
    return "\n".join(lines) + "\n"
