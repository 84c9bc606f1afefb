"""Contention resolution by generalized tree splitting over the adder channel.

Every group transmission is one slot. A decoded multiplicity L <= K
resolves the group: the receiver polls L-1 of the identified users in
dedicated slots and recovers the last word by subtraction. A multiplicity
above K is a collision: the group splits uniformly at random and the two
halves resolve depth-first (first half before second).

With interference cancellation enabled, collision sums are kept: once the
first half has transmitted, the second half's opening equation is derived
by word subtraction at zero slot cost. A derived empty group closes for
free, a derived resolvable group only pays its polling slots, and a derived
collision splits again without transmitting. Without cancellation every
group pays for its opening transmission, including empty ones.

Receiver-side logic sees only channel output words; ground-truth group
membership appears in transcripts purely as an audit field and can be
withheld (``audit=False``) without changing any decision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .channel import Message, adder_channel
from .errors import ArgumentError, IntegrityError
from .sigcode import DecodeOutcome, OutcomeKind, SignatureCodebook, SymbolWord


class SlotKind(Enum):
    TRANSMISSION = "transmission"
    POLL = "poll"
    SIC_DERIVED = "sic_derived"
    SKIPPED_SPLIT = "skipped_split"


class FeedbackKind(Enum):
    IDLE = "idle"
    RESOLVED_ACK = "resolved_ack"
    SPLIT = "split"


@dataclass(frozen=True)
class Feedback:
    kind: FeedbackKind
    polled: int | None = None


@dataclass(frozen=True)
class SlotRecord:
    index: int
    kind: SlotKind
    group: frozenset[int] | None  # audit only; receiver logic never reads it
    observed: SymbolWord
    outcome: DecodeOutcome
    feedback: Feedback
    counted: bool


@dataclass(frozen=True)
class ProtocolConfig:
    codebook: SignatureCodebook
    sic: bool
    payload_len: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.payload_len < 0:
            raise ArgumentError("payload_len must be >= 0")


@dataclass
class ContentionTranscript:
    slots: list[SlotRecord]
    resolved: dict[int, SymbolWord]
    slots_used: int
    sic_derivations: int
    initial_L: int


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Deterministic per-trial stream: PCG64 seeded from (seed, trial)."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(trial,)))


def split_group(group, rng) -> tuple[set[int], set[int]]:
    """Uniform independent binary split; one draw per member, ascending id."""
    g1: set[int] = set()
    g2: set[int] = set()
    for u in sorted(group):
        if rng.integers(1, 3) == 1:
            g1.add(u)
        else:
            g2.add(u)
    return g1, g2


def poll_resolution(
    codebook: SignatureCodebook,
    group_sum: SymbolWord,
    active,
    transmit,
    *,
    start_index: int = 0,
    audit: bool = True,
) -> tuple[list[SlotRecord], dict[int, SymbolWord]]:
    """Recover all words of an identified group of L users.

    The L-1 lowest ids transmit alone (one slot each, fetched through
    ``transmit``); the highest id's word is the group sum minus the polled
    words. Each recovered word's signature prefix is checked against the
    codebook before the payload suffix is accepted.
    """
    ids = sorted(active)
    if not 1 <= len(ids) <= codebook.params.K:
        raise ArgumentError("polling needs a resolvable group (1 <= L <= K)")
    sig_len = codebook.signature_length
    q = codebook.params.q

    def accept(user: int, word: SymbolWord) -> SymbolWord:
        prefix = SymbolWord(word.symbols[:sig_len], q)
        if prefix != codebook.signature(user):
            raise IntegrityError(f"recovered word does not carry user {user}'s signature")
        return SymbolWord(word.symbols[sig_len:], q)

    records: list[SlotRecord] = []
    recovered: dict[int, SymbolWord] = {}
    remainder = group_sum
    for i, user in enumerate(ids[:-1]):
        word = transmit(user)
        outcome = codebook.decode(SymbolWord(word.symbols[:sig_len], q))
        if outcome.kind is not OutcomeKind.RESOLVED or outcome.active != {user}:
            raise IntegrityError(f"poll slot for user {user} decoded to {outcome}")
        nxt = ids[i + 1] if i + 1 < len(ids) - 1 else None
        records.append(
            SlotRecord(
                index=start_index + i,
                kind=SlotKind.POLL,
                group=frozenset((user,)) if audit else None,
                observed=word,
                outcome=outcome,
                feedback=Feedback(FeedbackKind.RESOLVED_ACK, nxt),
                counted=True,
            )
        )
        recovered[user] = accept(user, word)
        remainder = remainder - word
    recovered[ids[-1]] = accept(ids[-1], remainder)
    return records, recovered


class _Engine:
    def __init__(self, config: ProtocolConfig, active, rng, audit: bool):
        cb = config.codebook
        M = cb.params.M
        users = sorted(active)
        if users and not (1 <= users[0] and users[-1] <= M):
            raise ArgumentError(f"active users must lie in [1, {M}]")
        self.cb = cb
        self.q = cb.params.q
        self.sic = config.sic
        self.audit = audit
        self.rng = rng
        self.sig_len = cb.signature_length
        self.payload_len = config.payload_len
        self.word_len = self.sig_len + config.payload_len
        self.words: dict[int, SymbolWord] = {}
        for u in users:
            word = cb.signature(u)
            if config.payload_len:
                payload = rng.integers(0, self.q, size=config.payload_len)
                word = word.concat(SymbolWord(payload.tolist(), self.q))
            self.words[u] = word
        self.records: list[SlotRecord] = []
        self.resolved: dict[int, SymbolWord] = {}
        self.sic_derivations = 0

    def _zero(self) -> SymbolWord:
        return SymbolWord.zero(self.word_len, self.q)

    def _transmit(self, users) -> SymbolWord:
        msgs = [Message(u, self.words[u], self.payload_len) for u in sorted(users)]
        return adder_channel(msgs, like=self._zero())

    def _record(self, kind, group, observed, outcome, feedback, counted):
        self.records.append(
            SlotRecord(
                index=len(self.records),
                kind=kind,
                group=frozenset(group) if self.audit else None,
                observed=observed,
                outcome=outcome,
                feedback=feedback,
                counted=counted,
            )
        )

    def run(self, active) -> ContentionTranscript:
        self._resolve(set(active), None)
        return ContentionTranscript(
            slots=self.records,
            resolved=self.resolved,
            slots_used=sum(1 for r in self.records if r.counted),
            sic_derivations=self.sic_derivations,
            initial_L=len(set(active)),
        )

    def _resolve(self, group: set[int], derived: SymbolWord | None) -> SymbolWord:
        """Resolve one group; returns the group's sum word (observed or derived)."""
        fresh = derived is None
        observed = self._transmit(group) if fresh else derived
        outcome = self.cb.decode(SymbolWord(observed.symbols[: self.sig_len], self.q))
        if not fresh:
            self.sic_derivations += 1
        if outcome.kind is OutcomeKind.EMPTY:
            kind = SlotKind.TRANSMISSION if fresh else SlotKind.SIC_DERIVED
            self._record(kind, group, observed, outcome, Feedback(FeedbackKind.IDLE), fresh)
            return observed
        if outcome.kind is OutcomeKind.RESOLVED:
            ids = sorted(outcome.active)
            first = ids[0] if len(ids) > 1 else None
            kind = SlotKind.TRANSMISSION if fresh else SlotKind.SIC_DERIVED
            self._record(
                kind, group, observed, outcome,
                Feedback(FeedbackKind.RESOLVED_ACK, first), fresh,
            )
            records, recovered = poll_resolution(
                self.cb,
                observed,
                outcome.active,
                lambda u: self._transmit((u,)),
                start_index=len(self.records),
                audit=self.audit,
            )
            self.records.extend(records)
            self.resolved.update(recovered)
            return observed
        kind = SlotKind.TRANSMISSION if fresh else SlotKind.SKIPPED_SPLIT
        self._record(kind, group, observed, outcome, Feedback(FeedbackKind.SPLIT), fresh)
        g1, g2 = split_group(group, self.rng)
        first_sum = self._resolve(g1, None)
        if self.sic:
            self._resolve(g2, observed - first_sum)
        else:
            self._resolve(g2, None)
        return observed


def _run(config: ProtocolConfig, active, rng, audit: bool) -> ContentionTranscript:
    if rng is None:
        rng = np.random.default_rng(config.seed)
    engine = _Engine(config, active, rng, audit)
    return engine.run(active)


def run_contention(config: ProtocolConfig, active, rng=None, *, audit: bool = True):
    """Resolve a batch under the basic scheme (collision sums discarded)."""
    if config.sic:
        raise ArgumentError("config.sic must be False for the basic scheme")
    return _run(config, active, rng, audit)


def run_contention_sic(config: ProtocolConfig, active, rng=None, *, audit: bool = True):
    """Resolve a batch with successive interference cancellation."""
    if not config.sic:
        raise ArgumentError("config.sic must be True for the cancellation scheme")
    return _run(config, active, rng, audit)


def export_transcript(transcript: ContentionTranscript) -> str:
    """Line-oriented dump: `index kind L outcome [ids...]` per record."""
    lines = []
    for rec in transcript.slots:
        parts = [
            str(rec.index),
            rec.kind.value,
            str(rec.outcome.multiplicity),
            rec.outcome.kind.value,
        ]
        if rec.outcome.active:
            parts.append(",".join(str(u) for u in sorted(rec.outcome.active)))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"
