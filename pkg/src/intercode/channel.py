"""Adversarial feedback and erasure channels with a hard corruption budget.

A channel instantiation is a *slot*. The adversary is consulted once per slot
and may return any delivered symbol; the channel enforces the channel model
(erasure channels only ever deliver the sent symbol or ``ERASED``) and the
budget (attempts past the budget are delivered faithfully and flagged).
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from .errors import ConfigurationError, ProtocolViolation, SimulationError
from .protocol import ALICE, BOB


class _Symbol:
    __slots__ = ("label",)

    def __init__(self, label: str) -> None:
        self.label = label

    def __repr__(self) -> str:
        return self.label

    def __reduce__(self):
        return (_named_symbol, (self.label,))


def _named_symbol(label: str) -> "_Symbol":
    return {"ERASED": ERASED, "REWIND": REWIND}[label]


#: delivered in place of a symbol removed by an erasure channel
ERASED = _Symbol("ERASED")
#: the third symbol of the ternary feedback alphabet
REWIND = _Symbol("REWIND")

BINARY = (0, 1)
TERNARY = (0, 1, REWIND)

FEEDBACK = "feedback"
ERASURE = "erasure"


def symbol_to_json(sym: Any) -> Any:
    if sym is ERASED:
        return "_"
    if sym is REWIND:
        return "<"
    if isinstance(sym, tuple):
        return [symbol_to_json(s) for s in sym]
    return sym


def parse_rate(value: str | Fraction | int) -> Fraction:
    """Exact rational from ``"p/q"`` (floats are rejected on purpose)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ConfigurationError("rates must be exact rationals, not floats")
    try:
        text = str(value).strip()
        if "." in text or "e" in text.lower():
            raise ValueError
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ConfigurationError(f"not an exact rational: {value!r}") from None


def budget_for(rate: Fraction | str, total_slots: int) -> int:
    """Largest corruption count allowed at ``rate`` over ``total_slots`` instantiations."""
    rate = parse_rate(rate)
    if rate < 0 or rate >= 1:
        raise ConfigurationError(f"noise rate must lie in [0, 1), got {rate}")
    return math.floor(rate * total_slots)


@dataclass
class Transmission:
    slot: int
    sender: str
    sent: Any
    delivered: Any
    coerced: bool = False

    @property
    def corrupted(self) -> bool:
        return self.delivered != self.sent

    def to_json(self) -> dict:
        return {
            "slot": self.slot,
            "sender": self.sender,
            "sent": symbol_to_json(self.sent),
            "delivered": symbol_to_json(self.delivered),
            "coerced": self.coerced,
        }


@dataclass
class NoiseLedger:
    total_slots: int
    budget: int
    used: int = 0
    log: list[Transmission] = field(default_factory=list)

    @property
    def remaining(self) -> int:
        return self.budget - self.used

    @property
    def slot(self) -> int:
        return len(self.log)

    @property
    def coercions(self) -> int:
        return sum(t.coerced for t in self.log)


class Channel:
    """One direction-agnostic channel shared by both parties of a simulation."""

    def __init__(self, kind: str, alphabet: Sequence[Any], adversary: "Adversary | None", ledger: NoiseLedger):
        if kind not in (FEEDBACK, ERASURE):
            raise ConfigurationError(f"unknown channel kind {kind!r}")
        self.kind = kind
        self.alphabet = tuple(alphabet)
        self.adversary = adversary
        self.ledger = ledger

    def alternatives(self, sent: Any) -> tuple:
        """Symbols the adversary may substitute for ``sent``, in alphabet order."""
        if self.kind == ERASURE:
            return (ERASED,)
        return tuple(s for s in self.alphabet if s != sent)

    def transmit(self, sender: str, sent: Any) -> Any:
        ledger = self.ledger
        if ledger.slot >= ledger.total_slots:
            raise SimulationError(f"slot overflow: more than {ledger.total_slots} transmissions")
        delivered = sent if self.adversary is None else self.adversary(self, sender, sent)
        coerced = False
        if delivered != sent:
            if self.kind == ERASURE and delivered is not ERASED:
                raise ProtocolViolation("erasure channel may only deliver the sent symbol or ERASED")
            if self.kind == FEEDBACK and delivered not in self.alphabet:
                raise ProtocolViolation(f"symbol {delivered!r} outside the channel alphabet")
            if ledger.used >= ledger.budget:
                delivered, coerced = sent, True
            else:
                ledger.used += 1
        ledger.log.append(Transmission(ledger.slot, sender, sent, delivered, coerced))
        return delivered


def transmit_feedback(sym: Any, adv: "Adversary | None", ledger: NoiseLedger, sender: str = ALICE,
                      alphabet: Sequence[Any] = TERNARY) -> Any:
    """Single feedback-channel use; the return value is seen by both receiver and sender."""
    return Channel(FEEDBACK, alphabet, adv, ledger).transmit(sender, sym)


def transmit_erasure(sym: Any, adv: "Adversary | None", ledger: NoiseLedger, sender: str = ALICE) -> Any:
    """Single erasure-channel use; the sender learns nothing about the outcome."""
    return Channel(ERASURE, (), adv, ledger).transmit(sender, sym)


# --------------------------------------------------------------------------- adversaries

Adversary = Callable[[Channel, str, Any], Any]


class NullAdversary:
    name = "none"

    def __call__(self, channel: Channel, sender: str, sent: Any) -> Any:
        return sent


class ReplayAdversary:
    """Exact corruption schedule keyed by slot.

    Each action is ``"flip"`` / ``"erase"`` (first alternative symbol), an int
    ``k`` (the k-th alternative in alphabet order) or ``("set", symbol)``.
    """

    name = "replay"

    def __init__(self, pattern: Iterable[tuple[int, Any]] | dict[int, Any]):
        self.pattern = dict(pattern)

    def __call__(self, channel: Channel, sender: str, sent: Any) -> Any:
        action = self.pattern.get(channel.ledger.slot)
        if action is None:
            return sent
        if isinstance(action, tuple) and action and action[0] == "set":
            return action[1]
        alts = channel.alternatives(sent)
        if action in ("flip", "erase"):
            return alts[0]
        return alts[int(action)]


class RandomAdversary:
    """Corrupts each slot with probability budget/total_slots until the budget is spent."""

    name = "random"

    def __init__(self, seed: int = 0, rate: Fraction | None = None):
        self.rng = random.Random(seed)
        self.rate = rate

    def __call__(self, channel: Channel, sender: str, sent: Any) -> Any:
        ledger = channel.ledger
        if ledger.remaining <= 0:
            return sent
        p = self.rate if self.rate is not None else Fraction(ledger.budget, ledger.total_slots)
        if self.rng.random() >= float(p):
            return sent
        return self.rng.choice(channel.alternatives(sent))


class GreedyFrontAdversary:
    """Spends the whole budget on the earliest slots."""

    name = "greedy-front"

    def __call__(self, channel: Channel, sender: str, sent: Any) -> Any:
        return channel.alternatives(sent)[0] if channel.ledger.remaining > 0 else sent


class GreedyBackAdversary:
    """Spends the whole budget on the last slots of the run."""

    name = "greedy-back"

    def __call__(self, channel: Channel, sender: str, sent: Any) -> Any:
        ledger = channel.ledger
        if ledger.total_slots - ledger.slot <= ledger.budget:
            return channel.alternatives(sent)[0]
        return sent


class GreedyTargetAdversary:
    """Corrupts the first slots belonging to one party."""

    def __init__(self, target: str = BOB):
        if target not in (ALICE, BOB):
            raise ConfigurationError(f"target must be {ALICE!r} or {BOB!r}")
        self.target = target
        self.name = f"greedy-target-{'alice' if target == ALICE else 'bob'}"

    def __call__(self, channel: Channel, sender: str, sent: Any) -> Any:
        if sender == self.target and channel.ledger.remaining > 0:
            return channel.alternatives(sent)[0]
        return sent


class BlockKillAdversary:
    """Destroys whole codewords while the remaining budget can pay for one.

    Without a codebook it erases the first ``kill`` slots of each ``block``-slot
    codeword. With one it learns each codeword as its block starts (a worst-case
    adversary may know the inputs) and erases exactly the positions where it
    differs from its nearest other codeword.
    """

    def __init__(self, block: int, kill: int, codebook: Any = None):
        if not 0 < kill <= block:
            raise ConfigurationError("need 0 < kill <= block")
        self.block, self.kill, self.codebook = block, kill, codebook
        self.name = f"block-kill-{kill}of{block}" if codebook is None else f"block-kill-nearest-{block}"
        self.kills = 0
        self._plan: frozenset[int] = frozenset()

    def begin_block(self, channel: Channel, sender: str, word: Sequence[Any]) -> None:
        remaining = channel.ledger.remaining
        if self.codebook is None:
            plan = frozenset(range(self.kill))
        else:
            word = tuple(word)
            nearest = min((w for w in self.codebook.words if w != word),
                          key=lambda w: sum(a != b for a, b in zip(w, word)))
            plan = frozenset(i for i, (a, b) in enumerate(zip(nearest, word)) if a != b)
        self._plan = plan if len(plan) <= remaining else frozenset()
        self.kills += bool(self._plan)

    def __call__(self, channel: Channel, sender: str, sent: Any) -> Any:
        offset = channel.ledger.slot % self.block
        if offset in self._plan:
            return channel.alternatives(sent)[0]
        return sent


GREEDY_NAMES = ("greedy-front", "greedy-back", "greedy-target-alice", "greedy-target-bob")


def builtin_adversaries(name: str, params: dict | None = None, seed: int = 0) -> Adversary:
    """Fresh adversary instance by name; adversaries may be stateful, so build one per run."""
    params = dict(params or {})
    if name == "none":
        return NullAdversary()
    if name in ("random", "uniform-random"):
        rate = params.get("rate")
        return RandomAdversary(seed, None if rate is None else parse_rate(rate))
    if name == "greedy-front":
        return GreedyFrontAdversary()
    if name == "greedy-back":
        return GreedyBackAdversary()
    if name in ("greedy-target", "greedy-target-alice", "greedy-target-bob"):
        target = params.get("target", ALICE if name.endswith("alice") else BOB)
        return GreedyTargetAdversary(target)
    if name == "block-kill":
        return BlockKillAdversary(int(params.get("block", 3)), int(params.get("kill", 2)))
    if name == "replay":
        return ReplayAdversary([(int(s), a) for s, a in params.get("pattern", [])])
    raise ConfigurationError(f"unknown adversary {name!r}")
