"""Slot-level channel abstraction: messages, the noiseless F_q adder, and
the rate accounting that converts payload bits into channel uses per slot."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ArgumentError, CapabilityError
from .sigcode import SymbolWord


@dataclass(frozen=True)
class Message:
    """A user's slot transmission: signature followed by payload symbols."""

    user: int
    word: SymbolWord
    payload_len: int


def adder_channel(messages, *, like: SymbolWord | None = None) -> SymbolWord:
    """Exact componentwise F_q sum of simultaneously transmitted words.

    An empty input is an idle slot and yields the zero word (a template
    supplies its shape).
    """
    messages = list(messages)
    seen = set()
    for m in messages:
        if m.user in seen:
            raise ArgumentError(f"duplicate transmitter {m.user}")
        seen.add(m.user)
    if not messages:
        if like is None:
            raise ArgumentError("idle slot needs a template word")
        return like.zero_like()
    acc = messages[0].word
    for m in messages[1:]:
        acc = acc + m.word
    return acc


def plnc_rate(P: float) -> float:
    """Achievable computation rate in bits per channel use at power P."""
    if P <= 0:
        raise ArgumentError("power must be positive")
    return 0.5 * math.log2(P) if P >= 1.0 else 0.0


@dataclass(frozen=True)
class RateModel:
    """Bit accounting for one slot: payload size D, signature overhead bits,
    and the computation rate achievable at power P."""

    P: float
    D: float
    signature_bits: float

    def __post_init__(self):
        if self.P <= 0:
            raise ArgumentError("power must be positive")
        if self.D < 0 or self.signature_bits < 0:
            raise ArgumentError("bit counts must be nonnegative")

    @property
    def rate(self) -> float:
        return plnc_rate(self.P)


def slot_channel_uses(model: RateModel) -> int:
    """Channel uses per slot: ceil((signature bits + payload bits) / rate)."""
    r = model.rate
    if r <= 0:
        raise CapabilityError("power too low for a positive computation rate")
    return math.ceil((model.signature_bits + model.D) / r)
