"""Noiseless alternating binary protocols and the padding transforms used by the coding schemes.

Positions in a transcript are 0-indexed here; position ``k`` is round ``k + 1``.
Alice owns even positions (odd rounds), Bob owns odd positions.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import ConfigurationError

ALICE = "A"
BOB = "B"

Bits = tuple[int, ...]
NextBit = Callable[[Bits, Sequence[int]], int]


def owner(position: int) -> str:
    """Party that speaks at a 0-indexed transcript position."""
    return ALICE if position % 2 == 0 else BOB


def other(role: str) -> str:
    return BOB if role == ALICE else ALICE


def bits(value: str | Sequence[int] | None) -> Bits:
    """Coerce ``"0110"`` or an iterable of 0/1 into a tuple of ints."""
    if value is None:
        return ()
    if isinstance(value, str):
        if any(c not in "01" for c in value):
            raise ConfigurationError(f"not a bit string: {value!r}")
        return tuple(int(c) for c in value)
    out = tuple(int(b) for b in value)
    if any(b not in (0, 1) for b in out):
        raise ConfigurationError(f"not a bit sequence: {value!r}")
    return out


def bitstring(seq: Sequence[int]) -> str:
    return "".join(str(b) for b in seq)


@dataclass(frozen=True)
class NoiselessProtocol:
    """An alternating binary protocol of fixed length.

    ``next_bit(own_input, transcript)`` gives the bit the owner of position
    ``len(transcript)`` sends. Past ``length`` the protocol is extended with
    void ``1`` rounds so schemes can keep a fixed round count.
    """

    length: int
    next_bit: NextBit = field(repr=False, compare=False)
    name: str = "custom"
    input_lengths: tuple[int | None, int | None] = (None, None)

    def __post_init__(self) -> None:
        if self.length < 1:
            raise ConfigurationError("protocol length must be positive")

    def bit(self, own_input: Bits, transcript: Sequence[int]) -> int:
        if len(transcript) >= self.length:
            return 1
        return self.next_bit(own_input, transcript)

    def check_inputs(self, x: Bits, y: Bits) -> None:
        for role, value, want in ((ALICE, x, self.input_lengths[0]), (BOB, y, self.input_lengths[1])):
            if want is not None and len(value) != want:
                raise ConfigurationError(
                    f"{self.name}: input of party {role} has length {len(value)}, expected {want}"
                )


@dataclass(frozen=True)
class ProtocolFamily:
    kind: str
    n: int
    seed: int = 0

    def build(self) -> NoiselessProtocol:
        if self.kind == "identity":
            return identity_exchange(self.n)
        if self.kind in ("random", "seeded-random"):
            return seeded_random(self.n, self.seed)
        raise ConfigurationError(f"unknown protocol family {self.kind!r}")

    def input_length(self) -> int:
        return self.n // 2


def identity_exchange(n: int) -> NoiselessProtocol:
    """Both parties reveal their inputs bit by bit: transcript is x0 y0 x1 y1 ..."""
    if n < 2 or n % 2:
        raise ConfigurationError("identity exchange needs an even length >= 2")

    def next_bit(own_input: Bits, transcript: Sequence[int]) -> int:
        return own_input[len(transcript) // 2]

    return NoiselessProtocol(n, next_bit, name="identity", input_lengths=(n // 2, n // 2))


def seeded_random(n: int, seed: int) -> NoiselessProtocol:
    """Each bit is one bit of SHA-256 over (seed, speaker's input, transcript so far)."""
    prefix = f"{seed}|".encode()

    def next_bit(own_input: Bits, transcript: Sequence[int]) -> int:
        h = hashlib.sha256(prefix + bytes(own_input) + b"|" + bytes(transcript))
        return h.digest()[0] & 1

    return NoiselessProtocol(n, next_bit, name=f"seeded-random:{seed}")


def run_noiseless(proto: NoiselessProtocol, x: Bits, y: Bits, length: int | None = None) -> Bits:
    """Transcript of ``proto`` on ``(x, y)`` over a perfect channel.

    ``length`` may exceed ``proto.length``; the tail is the void extension.
    """
    x, y = bits(x), bits(y)
    proto.check_inputs(x, y)
    total = proto.length if length is None else length
    transcript: list[int] = []
    for k in range(total):
        transcript.append(proto.bit(x if owner(k) == ALICE else y, transcript))
    return tuple(transcript)


def pad_no_double_zero(proto: NoiselessProtocol) -> NoiselessProtocol:
    """Insert a void (Alice 1, Bob 1) pair after every (Alice, Bob) pair.

    The result is twice as long and neither party ever sends two zeros in a row.
    """
    if proto.length % 2:
        raise ConfigurationError("pad_no_double_zero needs an even-length protocol")

    def next_bit(own_input: Bits, transcript: Sequence[int]) -> int:
        k = len(transcript)
        if k % 4 >= 2:
            return 1
        return proto.bit(own_input, strip_no_double_zero(transcript))

    return NoiselessProtocol(
        2 * proto.length, next_bit, name=f"{proto.name}+nodoublezero", input_lengths=proto.input_lengths
    )


def strip_no_double_zero(transcript: Sequence[int]) -> list[int]:
    return [b for k, b in enumerate(transcript) if k % 4 < 2]


def pad_parity_slots(proto: NoiselessProtocol) -> NoiselessProtocol:
    """Follow every bit of ``proto`` with two void ``1`` transmissions (a1,1,1,b1,1,1,...)."""

    def next_bit(own_input: Bits, transcript: Sequence[int]) -> int:
        k = len(transcript)
        if k % 3:
            return 1
        return proto.bit(own_input, strip_parity_slots(transcript))

    return NoiselessProtocol(
        3 * proto.length, next_bit, name=f"{proto.name}+parityslots", input_lengths=proto.input_lengths
    )


def strip_parity_slots(transcript: Sequence[int]) -> list[int]:
    return [b for k, b in enumerate(transcript) if k % 3 == 0]
