"""Small binary block codes with erasure decoding."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Hashable, Sequence

from .channel import ERASED
from .errors import ConfigurationError, ProtocolViolation

#: returned by :func:`find_code` when exhaustive search rules a code out
NOT_FOUND = None

MAX_SEARCH_LENGTH = 16


def hamming(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(u != v for u, v in zip(a, b))


def _word(value: int, length: int) -> tuple[int, ...]:
    return tuple((value >> (length - 1 - i)) & 1 for i in range(length))


@dataclass(frozen=True)
class Codebook:
    words: tuple[tuple[int, ...], ...]
    messages: tuple[Hashable, ...] = ()
    min_distance: int = 0

    def __post_init__(self) -> None:
        if not self.words:
            raise ConfigurationError("empty codebook")
        if len({len(w) for w in self.words}) != 1:
            raise ConfigurationError("codewords differ in length")
        if self.messages and len(self.messages) > len(self.words):
            raise ConfigurationError("more messages than codewords")
        if len(self.words) > 1 and self.distance() < self.min_distance:
            raise ConfigurationError(f"codebook distance {self.distance()} < declared {self.min_distance}")

    @property
    def length(self) -> int:
        return len(self.words[0])

    def distance(self) -> int:
        """Minimum pairwise Hamming distance (length + 1 for a one-word book)."""
        ws = self.words
        return min((hamming(ws[i], ws[j]) for i in range(len(ws)) for j in range(i)), default=self.length + 1)

    def with_messages(self, messages: Sequence[Hashable]) -> "Codebook":
        return Codebook(self.words, tuple(messages), self.min_distance)

    def encode(self, msg: Hashable) -> tuple[int, ...]:
        try:
            return self.words[self.messages.index(msg)]
        except ValueError:
            raise ConfigurationError(f"message {msg!r} outside the codebook's message space") from None

    def decode(self, word: Sequence[Any]) -> Any:
        if len(word) != self.length:
            raise ConfigurationError(f"word of length {len(word)}, expected {self.length}")
        matches = [
            i for i, w in enumerate(self.words[: len(self.messages)])
            if all(s is ERASED or s == b for s, b in zip(word, w))
        ]
        if not matches:
            raise ProtocolViolation(f"no codeword agrees with {word!r}; the channel is not an erasure channel")
        if len(matches) > 1:
            return ERASED
        return self.messages[matches[0]]

    def as_strings(self) -> list[str]:
        return ["".join(map(str, w)) for w in self.words]

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "min_distance": self.distance(),
            "codewords": self.as_strings(),
            "messages": [list(m) if isinstance(m, tuple) else m for m in self.messages],
        }


def encode_block(msg: Hashable, book: Codebook) -> tuple[int, ...]:
    return book.encode(msg)


def decode_block(word: Sequence[Any], book: Codebook) -> Any:
    """Unique codeword consistent with the unerased positions, or ``ERASED`` if ambiguous."""
    return book.decode(word)


def find_code(num_words: int, length: int, min_dist: int) -> Codebook | None:
    """Lexicographically first ``num_words``-word code of the given length and distance.

    Codewords are compared as integers, so the search tries each candidate list
    in lexicographic order. Translating a code by one of its words preserves
    distances, so some optimum contains the all-zero word, and that word is fixed
    first.
    """
    if length < 1 or length > MAX_SEARCH_LENGTH:
        raise ConfigurationError(f"code length must lie in [1, {MAX_SEARCH_LENGTH}]")
    if num_words < 1:
        raise ConfigurationError("need at least one codeword")
    found = _search(num_words, length, min_dist)
    if found is None:
        return NOT_FOUND
    return Codebook(tuple(_word(v, length) for v in found), min_distance=min_dist)


@lru_cache(maxsize=None)
def _search(num_words: int, length: int, min_dist: int) -> tuple[int, ...] | None:
    chosen = [0]

    def extend(candidates: list[int]) -> bool:
        need = num_words - len(chosen)
        if need == 0:
            return True
        for i, v in enumerate(candidates):
            if len(candidates) - i < need:
                return False
            # words still compatible with everything chosen so far, v included
            rest = [u for u in candidates[i + 1 :] if bin(u ^ v).count("1") >= min_dist]
            if len(rest) < need - 1:
                continue
            chosen.append(v)
            if extend(rest):
                return True
            chosen.pop()
        return False

    first = [v for v in range(1, 1 << length) if bin(v).count("1") >= min_dist]
    return tuple(chosen) if extend(first) else None


#: messages of the 4-symbol space (info bit, parity), information carried on parity 1
FOUR_ARY_MESSAGES = ((0, 1), (1, 1), (1, 0), (1, 2))
FOUR_ARY_BOOK = Codebook(((0, 0, 0), (0, 1, 1), (1, 1, 0), (1, 0, 1)), FOUR_ARY_MESSAGES, min_distance=2)

SIX_ARY_MESSAGES = ((0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (1, 2))


@lru_cache(maxsize=None)
def six_of_ten_book() -> Codebook:
    book = find_code(6, 10, 6)
    if book is None:
        raise ConfigurationError("no (6, 10, 6) code exists")
    return book.with_messages(SIX_ARY_MESSAGES)
