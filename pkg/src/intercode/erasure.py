"""Fixed-order coding schemes for erasure channels.

Each message carries one information bit and the sender's transcript length
mod 3. A receiver accepts a message only when it arrives intact and its parity
is one ahead of its own, which keeps the two transcripts within one bit of
each other. The two binary variants send each message as a block codeword.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Any, Hashable

from .channel import ERASED, ERASURE
from .codes import FOUR_ARY_BOOK, Codebook, six_of_ten_book
from .engine import Party, Scheme, SimulationResult, ceil_div
from .protocol import ALICE, BOB, NoiselessProtocol, owner, pad_parity_slots, strip_parity_slots

ParityMessage = tuple[int, int]


class ErasureParty(Party):
    def __init__(self, role, inp, instance):
        super().__init__(role, inp, instance)
        self.scheme = instance.scheme
        self.T: list[int] = []
        self.m: ParityMessage = self.scheme.initial_message
        self.round = 0
        self.erased = False

    @property
    def p(self) -> int:
        return len(self.T) % 3

    def transcript(self) -> list[int]:
        return self.T

    def speaker(self) -> str:
        return ALICE if self.round % 2 == 0 else BOB

    def send(self) -> Any:
        if owner(len(self.T)) == self.role:
            bit = self.proto.bit(self.inp, self.T)
            self.m = (bit, (self.p + 1) % 3)
            self.T.append(bit)
            self.event = "send"
        else:
            self.event = "resend"
        return self.scheme.encode(self.m)

    def observe(self, sender: str, delivered: Any) -> None:
        self.round += 1
        if sender == self.role:
            return
        msg = self.scheme.decode(delivered)
        self.erased = msg is ERASED
        if self.erased:
            self.event = "erased"
        elif msg[1] == (self.p + 1) % 3:
            self.T.append(msg[0])
            self.event = "accept"
        else:
            self.event = "ignore"


class SixAryErasureScheme(Scheme):
    name = "erasure-6ary"
    channel = ERASURE
    alphabet = ()
    threshold = Fraction(1, 2)
    party_class = ErasureParty
    initial_message: ParityMessage = (0, 0)
    #: inner margin as a multiple of the outer one
    inner_factor = Fraction(1)
    book: Codebook | None = None

    @property
    def block_length(self) -> int:
        return 1 if self.book is None else self.book.length

    def encode(self, msg: ParityMessage) -> Any:
        return msg if self.book is None else self.book.encode(msg)

    def decode(self, delivered: Any) -> Hashable:
        if self.book is None:
            return delivered
        return self.book.decode(delivered)

    def params(self, inner, eps):
        return {"inner_epsilon": self.inner_factor * eps, "block_length": self.block_length}

    def rounds(self, inner, eps, params):
        return ceil_div(inner.length, params["inner_epsilon"])


class SixOfTenErasureScheme(SixAryErasureScheme):
    name = "erasure-binary-6of10"
    threshold = Fraction(3, 10)
    inner_factor = Fraction(5, 3)

    @property
    def book(self) -> Codebook:
        return six_of_ten_book()

    def params(self, inner, eps):
        return {**super().params(inner, eps), "codewords": self.book.as_strings()}


class ThirdErasureScheme(SixAryErasureScheme):
    name = "erasure-binary-third"
    threshold = Fraction(1, 3)
    inner_factor = Fraction(3, 2)
    book = FOUR_ARY_BOOK
    # (0, 0) is outside the 4-message space; any stored message works since a
    # party's initial message is never accepted
    initial_message = (1, 0)

    def inner_protocol(self, proto):
        return pad_parity_slots(proto)

    def unpad(self, transcript):
        return strip_parity_slots(transcript)

    def params(self, inner, eps):
        return {**super().params(inner, eps), "codewords": self.book.as_strings()}


ERASURE_6ARY = SixAryErasureScheme()
ERASURE_6OF10 = SixOfTenErasureScheme()
ERASURE_THIRD = ThirdErasureScheme()


def simulate_erasure_6ary(proto: NoiselessProtocol, x, y, eps, adversary=None, budget=None) -> SimulationResult:
    return ERASURE_6ARY.instance(proto, eps).run(x, y, adversary, budget)


def simulate_binary_erasure_6of10(proto: NoiselessProtocol, x, y, eps, adversary=None, budget=None) -> SimulationResult:
    return ERASURE_6OF10.instance(proto, eps).run(x, y, adversary, budget)


def simulate_binary_erasure_third(proto: NoiselessProtocol, x, y, eps, adversary=None, budget=None) -> SimulationResult:
    return ERASURE_THIRD.instance(proto, eps).run(x, y, adversary, budget)
