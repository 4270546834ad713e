"""Executable impossibility adversaries.

Each attack runs two experiments that differ only in one party's input and
corrupts that party's transmissions so the other party sees exactly the same
thing in both. Identical views mean the fooled party's output cannot be right
in both experiments.

Counterfactual behaviour ("what would Alice send on input x1 after this
history?") is computed by shadow parties: extra copies of the corrupted
party's state machine that are fed the real delivered history.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

from .channel import ERASED, ERASURE, Channel, ReplayAdversary, symbol_to_json
from .engine import SchemeInstance, SimulationResult
from .errors import SimulationError, UsageError
from .protocol import ALICE, BOB, Bits, other


class Shadow:
    """A party on an alternate input that follows the delivered history of a real run."""

    def __init__(self, inst: SchemeInstance, role: str, inp: Bits):
        self.party = inst.party(role, tuple(inp))
        self.role = role
        self.synced = 0
        self._pending: Any = None
        self._has_pending = False

    def _step(self, sender: str, delivered: Any) -> None:
        if self.party.speaker() != sender:
            raise SimulationError(f"shadow of {self.role} lost speaker consensus at slot {self.synced}")
        if sender == self.role and not self._has_pending:
            self.party.send()
        self.party.observe(sender, delivered)
        self._has_pending = False
        self.synced += 1

    def sync(self, log: Sequence[Any]) -> None:
        for t in log[self.synced:]:
            self._step(t.sender, t.delivered)

    def would_send(self, log: Sequence[Any]) -> Any:
        self.sync(log)
        if not self._has_pending:
            self._pending = self.party.send()
            self._has_pending = True
        return self._pending


class ForcingAdversary:
    """Delivers ``choose(channel, sender, sent)`` when it returns something, else the sent symbol."""

    def __init__(self, choose: Callable[[Channel, str, Any], Any]):
        self.choose = choose

    def __call__(self, channel: Channel, sender: str, sent: Any) -> Any:
        want = self.choose(channel, sender, sent)
        return sent if want is None else want


@dataclass
class AttackReport:
    attack: str
    scheme: str
    victim: str
    corrupted_party: str
    inputs: dict[str, list[str]]
    views: list[list[Any]]
    corruptions: list[int]
    ceiling: int
    confusable: bool
    replay_consistent: bool = True
    outputs: list[str] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)
    labels: tuple[str, str] = ("EXP0", "EXP1")

    @property
    def within_ceiling(self) -> bool:
        return all(c <= self.ceiling for c in self.corruptions)

    @property
    def ok(self) -> bool:
        return self.confusable and self.within_ceiling and self.replay_consistent

    def to_json(self) -> dict:
        return {
            "attack": self.attack,
            "scheme": self.scheme,
            "experiments": list(self.labels),
            "victim": self.victim,
            "corrupted_party": self.corrupted_party,
            "inputs": self.inputs,
            "victim_views": self.views,
            "victim_outputs": self.outputs,
            "corruptions_used": self.corruptions,
            "ceiling": self.ceiling,
            "confusable": self.confusable,
            "within_ceiling": self.within_ceiling,
            "replay_consistent": self.replay_consistent,
            "details": self.details,
        }


def view_of(result: SimulationResult, role: str) -> list[Any]:
    """Everything ``role`` observes: every delivery on a feedback channel, only the
    other party's deliveries on an erasure channel."""
    erasure = result.trace.channel == ERASURE
    view = []
    for t in result.trace.transmissions:
        if erasure and t.sender == role:
            view.append([t.sender, None])
        else:
            view.append([t.sender, symbol_to_json(t.delivered)])
    return view


def replay_of(result: SimulationResult) -> ReplayAdversary:
    return ReplayAdversary({t.slot: ("set", t.delivered) for t in result.trace.transmissions if t.corrupted})


def default_inputs(inst: SchemeInstance, role: str, count: int) -> list[Bits]:
    """``count`` distinct inputs: 0...0, 10...0, 010...0 for the given party."""
    length = inst.protocol.input_lengths[0 if role == ALICE else 1]
    if length is None:
        length = max(1, count - 1)
    if count > 1 + length:
        raise UsageError(f"party {role} has too few input bits for {count} distinct inputs")
    out = [tuple([0] * length)]
    for i in range(count - 1):
        out.append(tuple(1 if j == i else 0 for j in range(length)))
    return out


def _zero_input(inst: SchemeInstance, role: str) -> Bits:
    return default_inputs(inst, role, 1)[0]


def _pair(role: str, mine: Bits, theirs: Bits) -> tuple[Bits, Bits]:
    return (mine, theirs) if role == ALICE else (theirs, mine)


def _finish(attack: str, inst: SchemeInstance, victim: str, corrupted: str, runs: list[SimulationResult],
            ceiling: int, details: dict[str, Any], labels=("EXP0", "EXP1")) -> AttackReport:
    views = [view_of(r, victim) for r in runs]
    replayed = [inst.run(*r.inputs, replay_of(r), budget=ceiling) for r in runs]
    consistent = all(view_of(a, victim) == view_of(b, victim) for a, b in zip(runs, replayed))
    return AttackReport(
        attack=attack, scheme=inst.name, victim=victim, corrupted_party=corrupted,
        inputs={lab: ["".join(map(str, v)) for v in r.inputs] for lab, r in zip(labels, runs)},
        views=views, corruptions=[r.trace.corruptions_used for r in runs], ceiling=ceiling,
        confusable=views[0] == views[1], replay_consistent=consistent,
        outputs=["".join(map(str, r.output_a if victim == ALICE else r.output_b)) for r in runs],
        details=details, labels=labels,
    )


def _run(inst: SchemeInstance, x: Bits, y: Bits, adversary, budget: int) -> SimulationResult:
    result = inst.run(x, y, adversary, budget=budget)
    result.inputs = (tuple(x), tuple(y))
    return result


def _slot_counts(inst: SchemeInstance) -> dict[str, int]:
    counts = {ALICE: 0, BOB: 0}
    for s in range(inst.total_slots):
        counts[inst.slot_owner(s)] += 1
    return counts


def _own_slot_index(log: Sequence[Any], role: str) -> int:
    return sum(t.sender == role for t in log)


# --------------------------------------------------------------------------- attacks


def attack_fixed_quarter(inst: SchemeInstance, inputs: Sequence[Bits] | None = None,
                         other_input: Bits | None = None) -> AttackReport:
    """Corrupt the first half of the lesser speaker's slots to its other-input behaviour
    in EXP0, and the second half to EXP0's deliveries in EXP1."""
    if not inst.scheme.fixed_order or inst.scheme.channel == ERASURE:
        raise UsageError(f"{inst.name} is not a fixed-order feedback scheme")
    counts = _slot_counts(inst)
    corrupted = ALICE if counts[ALICE] <= counts[BOB] else BOB
    victim = other(corrupted)
    R = counts[corrupted]
    half = math.ceil(R / 2)
    ceiling = math.ceil(inst.total_slots / 4)
    v0, v1 = inputs if inputs is not None else default_inputs(inst, corrupted, 2)
    w = other_input if other_input is not None else _zero_input(inst, victim)

    shadow = Shadow(inst, corrupted, v1)

    def first_half(channel, sender, sent):
        log = channel.ledger.log
        if sender == corrupted and _own_slot_index(log, corrupted) < half:
            return shadow.would_send(log)
        return None

    exp0 = _run(inst, *_pair(corrupted, v0, w), ForcingAdversary(first_half), ceiling)
    target = [t.delivered for t in exp0.trace.transmissions]

    def second_half(channel, sender, sent):
        log = channel.ledger.log
        if sender == corrupted and _own_slot_index(log, corrupted) >= half:
            return target[len(log)]
        return None

    exp1 = _run(inst, *_pair(corrupted, v1, w), ForcingAdversary(second_half), ceiling)
    return _finish("fixed-quarter", inst, victim, corrupted, [exp0, exp1], ceiling,
                   {"R": R, "corrupted_slots_per_experiment": half})


def attack_adaptive_third(inst: SchemeInstance, inputs: Sequence[Bits] | None = None,
                          other_input: Bits | None = None) -> AttackReport:
    """Hide the lesser early speaker's input during the first 2N/3 slots (EXP1), then
    make the true-input run match it during the last N/3 slots (EXP0)."""
    if inst.scheme.channel == ERASURE:
        raise UsageError(f"{inst.name} is not a feedback scheme")
    S = inst.total_slots
    early = (2 * S) // 3
    ceiling = math.ceil(Fraction(S, 3))
    # probe the noiseless schedule at all-zero inputs; the victim's inputs depend on its outcome
    zero_a, zero_b = _zero_input(inst, ALICE), _zero_input(inst, BOB)
    probe = _run(inst, zero_a, zero_b, None, 0)
    spoke = {ALICE: 0, BOB: 0}
    for t in probe.trace.transmissions[:early]:
        spoke[t.sender] += 1
    corrupted = BOB if spoke[BOB] <= spoke[ALICE] else ALICE
    victim = other(corrupted)
    v0, v1 = inputs if inputs is not None else default_inputs(inst, corrupted, 2)
    w = other_input if other_input is not None else _zero_input(inst, victim)

    shadow = Shadow(inst, corrupted, v0)

    def early_phase(channel, sender, sent):
        log = channel.ledger.log
        if sender == corrupted and len(log) < early:
            return shadow.would_send(log)
        return None

    exp1 = _run(inst, *_pair(corrupted, v1, w), ForcingAdversary(early_phase), ceiling)
    target = [t.delivered for t in exp1.trace.transmissions]

    def late_phase(channel, sender, sent):
        log = channel.ledger.log
        if sender == corrupted and len(log) >= early:
            return target[len(log)]
        return None

    exp0 = _run(inst, *_pair(corrupted, v0, w), ForcingAdversary(late_phase), ceiling)
    return _finish("adaptive-third", inst, victim, corrupted, [exp0, exp1], ceiling, {
        "probe_speaks": spoke, "early_slots": early, "late_slots": S - early,
    })


def attack_binary_sixth(inst: SchemeInstance, inputs: Sequence[Bits] | None = None,
                        other_input: Bits | None = None) -> AttackReport:
    """Three-input majority attack on fixed-order binary schemes.

    Phase one forces each of the lesser speaker's bits to the majority of its
    three counterfactual bits. The pivot R is the first own slot where some
    input's disagreement count d_j(R) reaches R - 2T/3. Phase two forces the
    behaviour of the second-closest input.
    """
    scheme = inst.scheme
    if not scheme.fixed_order or scheme.channel == ERASURE or tuple(scheme.alphabet) != (0, 1):
        raise UsageError(f"{inst.name} is not a fixed-order binary feedback scheme")
    counts = _slot_counts(inst)
    corrupted = ALICE if counts[ALICE] <= counts[BOB] else BOB
    victim = other(corrupted)
    T = counts[corrupted]
    ceiling = T // 3
    xs = list(inputs) if inputs is not None else default_inputs(inst, corrupted, 3)
    if len(xs) != 3 or len(set(map(tuple, xs))) != 3:
        raise UsageError("the attack needs three distinct inputs")
    w = other_input if other_input is not None else _zero_input(inst, victim)
    threshold = Fraction(2 * T, 3)

    def make_adversary(plan: dict[str, Any]):
        shadows = [Shadow(inst, corrupted, x) for x in xs]
        dist = [0, 0, 0]

        def choose(channel, sender, sent):
            if sender != corrupted:
                return None
            log = channel.ledger.log
            i = _own_slot_index(log, corrupted) + 1  # 1-based own slot number
            sends = [s.would_send(log) for s in shadows]
            if "R" in plan and i > plan["R"]:
                return sends[plan["order"][1]]
            maj = 1 if sum(sends) >= 2 else 0
            for j in range(3):
                dist[j] += sends[j] != maj
            if "R" not in plan:
                hits = [j for j in range(3) if dist[j] <= i - threshold]
                if hits:
                    order = sorted(range(3), key=lambda j: (dist[j], j))
                    first = min(hits, key=lambda j: (dist[j], j))
                    order.remove(first)
                    plan.update(R=i, order=[first] + order, distances=list(dist))
            return maj

        return ForcingAdversary(choose)

    plan: dict[str, Any] = {}
    _run(inst, *_pair(corrupted, xs[0], w), make_adversary(plan), inst.total_slots)
    if "R" not in plan:
        raise SimulationError("no pivot round found; the majority phase is inconsistent")
    order = plan["order"]
    runs = []
    for j in order[:2]:
        # replan each experiment with the pivot fixed in advance
        runs.append(_run(inst, *_pair(corrupted, xs[j], w), make_adversary(dict(plan)), ceiling))
    return _finish("binary-sixth", inst, victim, corrupted, runs, ceiling, {
        "T": T, "R": plan["R"], "order": order,
        "phase1_distances": plan["distances"],
        "inputs_by_label": ["".join(map(str, xs[j])) for j in order],
    })


def attack_erasure_half(inst: SchemeInstance, inputs: Sequence[Bits] | None = None,
                        other_input: Bits | None = None) -> AttackReport:
    """Erase every transmission of the party that speaks less."""
    if not inst.scheme.fixed_order or inst.scheme.channel != ERASURE:
        raise UsageError(f"{inst.name} is not a fixed-order erasure scheme")
    counts = _slot_counts(inst)
    corrupted = ALICE if counts[ALICE] <= counts[BOB] else BOB
    victim = other(corrupted)
    ceiling = math.ceil(inst.total_slots / 2)
    v0, v1 = inputs if inputs is not None else default_inputs(inst, corrupted, 2)
    w = other_input if other_input is not None else _zero_input(inst, victim)

    def erase_all(channel, sender, sent):
        return ERASED if sender == corrupted else None

    runs = [_run(inst, *_pair(corrupted, v, w), ForcingAdversary(erase_all), ceiling) for v in (v0, v1)]
    return _finish("erasure-half", inst, victim, corrupted, runs, ceiling, {"erased_slots": counts[corrupted]})


ATTACKS = {
    "fixed-quarter": attack_fixed_quarter,
    "adaptive-third": attack_adaptive_third,
    "binary-sixth": attack_binary_sixth,
    "erasure-half": attack_erasure_half,
}
