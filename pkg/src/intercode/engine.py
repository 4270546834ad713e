"""Generic two-party simulation loop shared by every coding scheme.

A scheme contributes a :class:`Party` state machine. The engine asks both
parties who speaks next (they must agree), lets the speaker emit a symbol or a
codeword, pushes it through the adversarial channel slot by slot, and hands the
delivered value to both parties. On a feedback channel the sender uses it as
feedback; on an erasure channel the sender ignores it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .channel import ERASURE, Adversary, Channel, NoiseLedger, Transmission, parse_rate, symbol_to_json
from .errors import ConfigurationError
from .protocol import ALICE, BOB, Bits, NoiselessProtocol, bits, run_noiseless


@dataclass
class RoundRecord:
    index: int
    sender: str
    sent: Any
    delivered: Any
    len_a: int
    len_b: int
    event: str
    t_a: tuple = ()
    t_b: tuple = ()
    erased: bool = False
    corrupted: bool = False

    def to_json(self) -> dict:
        return {
            "round": self.index,
            "sender": self.sender,
            "sent": symbol_to_json(self.sent),
            "delivered": symbol_to_json(self.delivered),
            "accepted_lengths": [self.len_a, self.len_b],
            "event": self.event,
        }


@dataclass
class Violation:
    invariant: str
    round: int | None
    detail: str

    def to_json(self) -> dict:
        return {"invariant": self.invariant, "round": self.round, "detail": self.detail}


@dataclass
class SimulationTrace:
    scheme: str
    n: int
    epsilon: Fraction
    rounds: int
    total_slots: int
    budget: int
    reference: Bits
    records: list[RoundRecord] = field(default_factory=list)
    transmissions: list[Transmission] = field(default_factory=list)
    violations: list[Violation] = field(default_factory=list)
    boundaries: dict[str, list[int]] = field(default_factory=dict)
    params: dict[str, Any] = field(default_factory=dict)
    channel: str = "feedback"
    fixed_order: bool = True
    success: bool = False
    corruptions_used: int = 0

    def to_json(self) -> dict:
        return {
            "scheme": self.scheme,
            "n": self.n,
            "epsilon": str(self.epsilon),
            "rounds": self.rounds,
            "total_slots": self.total_slots,
            "budget": self.budget,
            "corruptions_used": self.corruptions_used,
            "success": self.success,
            "params": {k: str(v) if isinstance(v, Fraction) else v for k, v in self.params.items()},
            "trace": [r.to_json() for r in self.records],
            "transmissions": [t.to_json() for t in self.transmissions],
            "violations": [v.to_json() for v in self.violations],
        }


@dataclass
class SimulationResult:
    output_a: Bits
    output_b: Bits
    expected: Bits
    trace: SimulationTrace

    @property
    def success(self) -> bool:
        return self.trace.success

    def __iter__(self):
        # lets callers unpack (output_a, output_b, trace)
        return iter((self.output_a, self.output_b, self.trace))


class Party:
    """One side of a coding scheme. Subclasses implement the scheme's rules."""

    def __init__(self, role: str, inp: Bits, instance: "SchemeInstance"):
        self.role = role
        self.inp = inp
        self.instance = instance
        self.proto = instance.inner
        self.event = ""

    def speaker(self) -> str:
        raise NotImplementedError

    def send(self) -> Any:
        raise NotImplementedError

    def observe(self, sender: str, delivered: Any) -> None:
        raise NotImplementedError

    def transcript(self) -> Sequence[int]:
        """The simulated transcript this party currently accepts."""
        raise NotImplementedError

    def output(self) -> Bits:
        inst = self.instance
        return tuple(inst.scheme.unpad(list(self.transcript())[: inst.inner.length]))[: inst.n]


class Scheme:
    """Static description of a coding scheme; see :class:`SchemeInstance` for a configured one."""

    name = "abstract"
    channel = "feedback"
    alphabet: tuple = (0, 1)
    fixed_order = True
    threshold = Fraction(0)
    block_length = 1
    party_class: type[Party] = Party

    def check_epsilon(self, eps: Fraction) -> None:
        if not 0 < eps < self.threshold:
            raise ConfigurationError(f"{self.name}: epsilon must lie in (0, {self.threshold}), got {eps}")

    def inner_protocol(self, proto: NoiselessProtocol) -> NoiselessProtocol:
        return proto

    def unpad(self, transcript: list[int]) -> list[int]:
        return transcript

    def params(self, inner: NoiselessProtocol, eps: Fraction) -> dict[str, Any]:
        return {}

    def rounds(self, inner: NoiselessProtocol, eps: Fraction, params: dict[str, Any]) -> int:
        raise NotImplementedError

    def speaker_of_round(self, index: int) -> str | None:
        """Fixed-order schedule (``None`` for noise-dependent order)."""
        if not self.fixed_order:
            return None
        return ALICE if index % 2 == 0 else BOB

    def instance(self, proto: NoiselessProtocol, epsilon: Fraction | str) -> "SchemeInstance":
        return SchemeInstance(self, proto, parse_rate(epsilon))

    def __repr__(self) -> str:
        return f"<scheme {self.name}>"


def ceil_div(num: int | Fraction, den: Fraction) -> int:
    return math.ceil(Fraction(num) / den)


class SchemeInstance:
    """A scheme bound to a protocol and a noise margin, with every derived quantity fixed."""

    def __init__(self, scheme: Scheme, protocol: NoiselessProtocol, epsilon: Fraction):
        scheme.check_epsilon(epsilon)
        self.scheme = scheme
        self.protocol = protocol
        self.epsilon = epsilon
        self.n = protocol.length
        self.inner = scheme.inner_protocol(protocol)
        self.params = scheme.params(self.inner, epsilon)
        self.rounds = scheme.rounds(self.inner, epsilon, self.params)
        self.total_slots = self.rounds * scheme.block_length
        self.guaranteed_rate = scheme.threshold - epsilon
        self.budget = math.floor(self.guaranteed_rate * self.total_slots)

    @property
    def name(self) -> str:
        return self.scheme.name

    def party(self, role: str, inp: Bits) -> Party:
        return self.scheme.party_class(role, inp, self)

    def slot_owner(self, slot: int) -> str | None:
        return self.scheme.speaker_of_round(slot // self.scheme.block_length)

    def reference(self, x: Bits, y: Bits) -> Bits:
        return run_noiseless(self.inner, x, y, max(self.inner.length, self.rounds))

    def describe(self) -> dict[str, Any]:
        return {
            "scheme": self.name,
            "protocol": self.protocol.name,
            "n": self.n,
            "epsilon": str(self.epsilon),
            "rounds": self.rounds,
            "total_slots": self.total_slots,
            "budget": self.budget,
            **{k: str(v) if isinstance(v, Fraction) else v for k, v in self.params.items()},
        }

    def run(self, x: Bits | str, y: Bits | str, adversary: Adversary | None = None,
            budget: int | None = None, record: bool = True) -> SimulationResult:
        return execute(self, bits(x), bits(y), adversary, self.budget if budget is None else budget, record)


def execute(inst: SchemeInstance, x: Bits, y: Bits, adversary: Adversary | None, budget: int,
            record: bool = True) -> SimulationResult:
    inst.protocol.check_inputs(x, y)
    scheme = inst.scheme
    ledger = NoiseLedger(inst.total_slots, budget)
    channel = Channel(scheme.channel, scheme.alphabet, adversary, ledger)
    alice, bob = inst.party(ALICE, x), inst.party(BOB, y)
    reference = inst.reference(x, y)
    trace = SimulationTrace(
        scheme=scheme.name, n=inst.n, epsilon=inst.epsilon, rounds=inst.rounds,
        total_slots=inst.total_slots, budget=budget, reference=reference,
        params=dict(inst.params), channel=scheme.channel, fixed_order=scheme.fixed_order,
    )
    block = scheme.block_length
    erasure = scheme.channel == ERASURE
    for index in range(inst.rounds):
        who = alice.speaker()
        if bob.speaker() != who:
            trace.violations.append(Violation("speaker-consensus", index, f"alice={who} bob={bob.speaker()}"))
            break
        sender = alice if who == ALICE else bob
        sent = sender.send()
        used_before = ledger.used
        if block == 1:
            delivered = channel.transmit(who, sent)
        else:
            hook = getattr(adversary, "begin_block", None)
            if hook is not None:
                hook(channel, who, sent)
            delivered = tuple(channel.transmit(who, b) for b in sent)
        alice.observe(who, delivered)
        bob.observe(who, delivered)
        if record:
            ta, tb = tuple(alice.transcript()), tuple(bob.transcript())
            event = alice.event if alice.event == bob.event else f"{alice.event}|{bob.event}"
            trace.records.append(RoundRecord(
                index, who, sent, delivered, len(ta), len(tb), event, ta, tb,
                erased=erasure and getattr(alice if who == BOB else bob, "erased", False),
                corrupted=ledger.used > used_before,
            ))
    trace.transmissions = ledger.log
    trace.corruptions_used = ledger.used
    for role, party in ((ALICE, alice), (BOB, bob)):
        marks = getattr(party, "boundaries", None)
        if marks is not None:
            trace.boundaries[role] = list(marks)
    out_a, out_b = alice.output(), bob.output()
    expected = reference[: inst.inner.length]
    expected = tuple(scheme.unpad(list(expected)))[: inst.n]
    trace.success = out_a == expected and out_b == expected and not trace.violations
    return SimulationResult(out_a, out_b, expected, trace)
