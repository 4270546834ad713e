"""Coding schemes for channels with noiseless feedback.

Four schemes share one idea: the sender sees what the receiver got, so both
parties hold the same joint view, and a corruption is undone by an explicit
rewind request.

* ``fixed-ternary``    alternating order, alphabet {0, 1, REWIND}, REWIND drops 4 entries
* ``adaptive-ternary`` speaker = owner of the next transcript position, REWIND drops 3
* ``fixed-binary``     alternating order, binary; a party's ``0, 0`` drops 6 entries
* ``adaptive-binary``  variable-length messages with confirmation bits
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .channel import BINARY, REWIND, TERNARY
from .engine import Party, Scheme, SchemeInstance, SimulationResult, SimulationTrace, Violation, ceil_div
from .errors import ConfigurationError, UsageError
from .protocol import (
    ALICE,
    BOB,
    Bits,
    NoiselessProtocol,
    owner,
    pad_no_double_zero,
    strip_no_double_zero,
)


class _RewindParty(Party):
    """Shared state of the three symbol-level rewind schemes.

    ``T`` holds delivered symbols, so it is identical at both parties; ``mine``
    remembers what this party meant to send for its own entries.
    """

    drop = 4

    def __init__(self, role, inp, instance):
        super().__init__(role, inp, instance)
        self.T: list[Any] = []
        self.mine: list[Any] = []
        self.mismatches = 0
        self.round = 0
        self._sent: Any = None

    def transcript(self) -> list[Any]:
        return self.T

    def _append(self, sender: str, delivered: Any) -> None:
        mine = self._sent if sender == self.role else None
        self.T.append(delivered)
        self.mine.append(mine)
        if mine is not None and mine != delivered:
            self.mismatches += 1

    def _truncate(self, count: int) -> None:
        for _ in range(min(count, len(self.T))):
            delivered = self.T.pop()
            mine = self.mine.pop()
            if mine is not None and mine != delivered:
                self.mismatches -= 1


class FixedTernaryParty(_RewindParty):
    def speaker(self) -> str:
        return ALICE if self.round % 2 == 0 else BOB

    def send(self) -> Any:
        if owner(len(self.T)) != self.role:
            # after a clamped rewind the next position belongs to the other party
            self._sent = 1
        elif self.mismatches:
            self._sent = REWIND
        else:
            self._sent = self.proto.bit(self.inp, self.T)
        return self._sent

    def observe(self, sender: str, delivered: Any) -> None:
        self.round += 1
        if owner(len(self.T)) != sender:
            self.event = "skip"
            return
        self._append(sender, delivered)
        if delivered is REWIND:
            self._truncate(self.drop)
            self.event = "rewind"
        else:
            self.event = "extend"


class AdaptiveTernaryParty(_RewindParty):
    drop = 3

    def speaker(self) -> str:
        return owner(len(self.T))

    def send(self) -> Any:
        self._sent = REWIND if self.mismatches else self.proto.bit(self.inp, self.T)
        return self._sent

    def observe(self, sender: str, delivered: Any) -> None:
        self._append(sender, delivered)
        if delivered is REWIND:
            self._truncate(self.drop)
            self.event = "rewind"
        else:
            self.event = "extend"


class FixedBinaryParty(FixedTernaryParty):
    drop = 6

    def send(self) -> int:
        if owner(len(self.T)) != self.role:
            self._sent = 1
        elif self.mismatches:
            self._sent = 0
        else:
            self._sent = self.proto.bit(self.inp, self.T)
        return self._sent

    def observe(self, sender: str, delivered: int) -> None:
        self.round += 1
        T = self.T
        if owner(len(T)) != sender:
            self.event = "skip"
            return
        self._append(sender, delivered)
        # T alternates owners, so T[-3] is the sender's previous entry
        if delivered == 0 and len(T) >= 3 and T[-3] == 0:
            self._truncate(self.drop)
            self.event = "rewind"
        else:
            self.event = "extend"


def interleave(a_stream: Sequence[int], b_stream: Sequence[int]) -> list[int]:
    out: list[int] = []
    for i, a in enumerate(a_stream):
        out.append(a)
        if i < len(b_stream):
            out.append(b_stream[i])
    return out


class AdaptiveBinaryParty(Party):
    """Variable-length messages: info bit, rewind bit, then confirmation bits.

    Message boundaries depend only on delivered bits, so both parties close
    every message at the same slot.
    """

    def __init__(self, role, inp, instance):
        super().__init__(role, inp, instance)
        self.K = instance.params["inverse_epsilon"]
        self.ts: list[int] = []
        self.tr: list[int] = []
        self.tf: list[int] = []
        self.slot = 0
        self.boundaries: list[int] = []
        self._msg_speaker: str | None = None
        self._msg: tuple[int, int] | None = None
        self._got: list[int] = []
        self._conf = [0, 0]

    def _streams(self, own: Sequence[int]) -> tuple[Sequence[int], Sequence[int]]:
        return (own, self.tr) if self.role == ALICE else (self.tr, own)

    def joint(self) -> list[int]:
        return interleave(*self._streams(self.tf))

    def transcript(self) -> list[int]:
        return self.joint()

    def output(self) -> Bits:
        return tuple(interleave(*self._streams(self.ts))[: self.instance.n])

    def speaker(self) -> str:
        if self._msg_speaker is not None:
            return self._msg_speaker
        # Alice speaks when both halves of the joint view have equal length
        return ALICE if len(self.tf) == len(self.tr) else BOB

    def send(self) -> int:
        pos = len(self._got)
        if pos == 0:
            info = self.proto.bit(self.inp, self.joint())
            rewind = 0 if self.ts == self.tf else 1
            self._msg = (info, rewind)
        if pos < 2:
            return self._msg[pos]
        return 1 if tuple(self._got[:2]) == self._msg else 0

    def observe(self, sender: str, delivered: int) -> None:
        self.slot += 1
        if self._msg_speaker is None:
            self._msg_speaker = sender
        got = self._got
        got.append(delivered)
        self.event = "message"
        if len(got) < 3:
            return
        self._conf[delivered] += 1
        conf0, conf1 = self._conf
        length = len(got)
        if 3 * conf0 >= length:
            self.event = "unconfirmed"
        elif conf1 - conf0 >= self.K:
            self.event = "confirmed"
            self._apply(sender == self.role, got[0], got[1])
        else:
            return
        self.boundaries.append(self.slot)
        self._msg_speaker, self._msg, self._got, self._conf = None, None, [], [0, 0]

    def _apply(self, speaking: bool, info: int, rewind: int) -> None:
        if rewind == 0:
            if speaking:
                self.ts.append(self.proto.bit(self.inp, interleave(*self._streams(self.ts))))
                self.tf.append(info)
            else:
                self.tr.append(info)
        elif self.tf and self.tr:
            self.ts.pop()
            self.tf.pop()
            self.tr.pop()
            self.event = "confirmed-rewind"


# --------------------------------------------------------------------------- schemes


class FixedTernaryScheme(Scheme):
    name = "fixed-ternary"
    alphabet = TERNARY
    threshold = Fraction(1, 4)
    party_class = FixedTernaryParty

    def rounds(self, inner, eps, params):
        return ceil_div(inner.length, 4 * eps)


class AdaptiveTernaryScheme(Scheme):
    name = "adaptive-ternary"
    alphabet = TERNARY
    fixed_order = False
    threshold = Fraction(1, 3)
    party_class = AdaptiveTernaryParty

    def rounds(self, inner, eps, params):
        return ceil_div(inner.length, 3 * eps)


class FixedBinaryScheme(Scheme):
    name = "fixed-binary"
    alphabet = BINARY
    threshold = Fraction(1, 6)
    party_class = FixedBinaryParty

    def inner_protocol(self, proto):
        return pad_no_double_zero(proto)

    def unpad(self, transcript):
        return strip_no_double_zero(transcript)

    def rounds(self, inner, eps, params):
        return ceil_div(inner.length, 6 * eps)


class AdaptiveBinaryScheme(Scheme):
    name = "adaptive-binary"
    alphabet = BINARY
    fixed_order = False
    threshold = Fraction(1, 3)
    party_class = AdaptiveBinaryParty

    def check_epsilon(self, eps):
        super().check_epsilon(eps)
        if eps.numerator != 1:
            raise ConfigurationError(f"{self.name}: 1/epsilon must be an integer, got {eps}")

    def params(self, inner, eps):
        return {"inverse_epsilon": eps.denominator}

    def rounds(self, inner, eps, params):
        # one "round" per bit; the run stops after n / eps^2 bits
        return inner.length * params["inverse_epsilon"] ** 2


FIXED_TERNARY = FixedTernaryScheme()
ADAPTIVE_TERNARY = AdaptiveTernaryScheme()
FIXED_BINARY = FixedBinaryScheme()
ADAPTIVE_BINARY = AdaptiveBinaryScheme()


def simulate_fixed_ternary(proto: NoiselessProtocol, x, y, eps, adversary=None, budget=None) -> SimulationResult:
    return FIXED_TERNARY.instance(proto, eps).run(x, y, adversary, budget)


def simulate_adaptive_ternary(proto: NoiselessProtocol, x, y, eps, adversary=None, budget=None) -> SimulationResult:
    return ADAPTIVE_TERNARY.instance(proto, eps).run(x, y, adversary, budget)


def simulate_fixed_binary(proto: NoiselessProtocol, x, y, eps, adversary=None, budget=None) -> SimulationResult:
    return FIXED_BINARY.instance(proto, eps).run(x, y, adversary, budget)


def simulate_adaptive_binary(proto: NoiselessProtocol, x, y, eps, adversary=None, budget=None) -> SimulationResult:
    return ADAPTIVE_BINARY.instance(proto, eps).run(x, y, adversary, budget)


# --------------------------------------------------------------------------- message accounting

UNCONFIRMED, CORRECT, WRONG = "U", "C", "W"


@dataclass
class MessageRecord:
    index: int
    speaker: str
    start: int
    end: int
    sent: tuple[int, int]
    delivered: tuple[int, int]
    conf0: int
    conf1: int
    corruptions: int
    label: str

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass
class MessageClasses:
    messages: list[MessageRecord]
    inverse_epsilon: int
    n: int
    violations: list[Violation] = field(default_factory=list)

    def of(self, label: str) -> list[MessageRecord]:
        return [m for m in self.messages if m.label == label]

    @property
    def U(self) -> list[MessageRecord]:
        return self.of(UNCONFIRMED)

    @property
    def C(self) -> list[MessageRecord]:
        return self.of(CORRECT)

    @property
    def W(self) -> list[MessageRecord]:
        return self.of(WRONG)

    @property
    def progress_bound(self) -> int:
        return len(self.C) - 2 * len(self.W)


def classify_messages(trace: SimulationTrace) -> MessageClasses:
    """Split a run of the adaptive binary scheme into unconfirmed / confirmed-correct /
    confirmed-wrong messages and check the per-class corruption bounds.

    Message boundaries are re-derived from the raw transmission log, independently
    of the parties' own bookkeeping.
    """
    if trace.scheme != ADAPTIVE_BINARY.name:
        raise UsageError(f"classify_messages needs an {ADAPTIVE_BINARY.name} trace, got {trace.scheme}")
    K = int(trace.params["inverse_epsilon"])
    log = trace.transmissions
    messages: list[MessageRecord] = []
    start = 0
    conf = [0, 0]
    for i, t in enumerate(log):
        length = i - start + 1
        if length < 3:
            continue
        conf[t.delivered] += 1
        unconfirmed = 3 * conf[0] >= length
        if not unconfirmed and conf[1] - conf[0] < K:
            continue
        span = log[start : i + 1]
        sent = (span[0].sent, span[1].sent)
        got = (span[0].delivered, span[1].delivered)
        label = UNCONFIRMED if unconfirmed else (CORRECT if sent == got else WRONG)
        messages.append(MessageRecord(
            len(messages), span[0].sender, start, i + 1, sent, got, conf[0], conf[1],
            sum(s.delivered != s.sent for s in span), label,
        ))
        start, conf = i + 1, [0, 0]

    classes = MessageClasses(messages, K, trace.n)
    bad = classes.violations
    for m in messages:
        if m.length > 2 + 3 * K:
            bad.append(Violation("message-length", m.start, f"message {m.index} has {m.length} bits > {2 + 3 * K}"))
        if m.label == CORRECT:
            if 2 * m.conf0 != m.length - 2 - K or m.corruptions != m.conf0:
                bad.append(Violation("confirmed-correct-noise", m.start,
                                     f"message {m.index}: conf0={m.conf0} corruptions={m.corruptions} len={m.length}"))
        elif m.label == UNCONFIRMED:
            if 3 * m.corruptions < m.length:
                bad.append(Violation("unconfirmed-noise", m.start,
                                     f"message {m.index}: corruptions={m.corruptions} len={m.length}"))
        elif 2 * m.corruptions < m.length + K:
            bad.append(Violation("confirmed-wrong-noise", m.start,
                                 f"message {m.index}: corruptions={m.corruptions} len={m.length}"))
    confirmed = len(classes.C) + len(classes.W)
    if confirmed >= trace.n * K:
        bad.append(Violation("confirmed-count", None, f"|C|+|W|={confirmed} >= n/eps={trace.n * K}"))
    if classes.progress_bound >= trace.n and not trace.success:
        bad.append(Violation("progress-implies-success", None,
                             f"|C|-2|W|={classes.progress_bound} >= n={trace.n} but the run failed"))
    return classes
