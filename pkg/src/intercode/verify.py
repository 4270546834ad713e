"""Verification oracle: invariant monitors plus exhaustive and sampled adversary search.

The oracle is scheme-agnostic. It drives runs only through replay or built-in
adversaries and reads results only through :class:`SimulationTrace`.
"""
from __future__ import annotations

import itertools
import math
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterator

from .channel import ERASED, ERASURE, GREEDY_NAMES, BlockKillAdversary, RandomAdversary, ReplayAdversary, builtin_adversaries
from .engine import Scheme, SchemeInstance, SimulationTrace, Violation
from .errors import ConfigurationError
from .feedback import ADAPTIVE_BINARY, classify_messages
from .protocol import NoiselessProtocol
from .schemes import get_scheme

DEFAULT_PATTERN_CAP = 10**7


def pattern_cap() -> int:
    raw = os.environ.get("LAB_PATTERN_CAP")
    if raw is None:
        return DEFAULT_PATTERN_CAP
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"LAB_PATTERN_CAP must be an integer, got {raw!r}") from None


# --------------------------------------------------------------------------- monitors


def monitor(trace: SimulationTrace) -> list[Violation]:
    """Every invariant violated by ``trace``; an empty list for a conforming run."""
    out = list(trace.violations)
    out += _budget_checks(trace)
    if trace.channel == ERASURE:
        out += _erasure_checks(trace)
    else:
        out += _consensus_checks(trace)
    if trace.scheme == ADAPTIVE_BINARY.name:
        a, b = trace.boundaries.get("A"), trace.boundaries.get("B")
        if a != b:
            out.append(Violation("message-boundary-consensus", None, f"alice={a} bob={b}"))
        if trace.transmissions:
            out += classify_messages(trace).violations
    return out


def _budget_checks(trace: SimulationTrace) -> list[Violation]:
    out = []
    corrupted = sum(t.corrupted for t in trace.transmissions)
    if corrupted > trace.budget or trace.corruptions_used > trace.budget:
        out.append(Violation("budget-soundness", None, f"{corrupted} corruptions > budget {trace.budget}"))
    if trace.transmissions and corrupted != trace.corruptions_used:
        out.append(Violation("budget-soundness", None,
                             f"ledger counts {trace.corruptions_used}, log shows {corrupted}"))
    if trace.transmissions and len(trace.transmissions) != trace.total_slots:
        out.append(Violation("slot-count", None,
                             f"{len(trace.transmissions)} transmissions, planned {trace.total_slots}"))
    return out


def _consensus_checks(trace: SimulationTrace) -> list[Violation]:
    for r in trace.records:
        if r.t_a != r.t_b:
            return [Violation("transcript-consensus", r.index, f"alice={r.t_a} bob={r.t_b}")]
    return []


def _erasure_checks(trace: SimulationTrace) -> list[Violation]:
    out = []
    for t in trace.transmissions:
        if t.delivered != t.sent and t.delivered is not ERASED:
            out.append(Violation("erasure-soundness", t.slot, f"sent {t.sent!r}, delivered {t.delivered!r}"))
    ref = trace.reference
    prev_a = prev_b = 0
    stalls = erasures = 0
    for r in trace.records:
        la, lb = r.len_a, r.len_b
        if abs(la - lb) > 1:
            out.append(Violation("discrepancy-bound", r.index, f"|T_A|={la} |T_B|={lb}"))
        for who, t in (("A", r.t_a), ("B", r.t_b)):
            if tuple(t) != tuple(ref[: len(t)]):
                out.append(Violation("correct-prefix", r.index, f"T_{who}={t} is not a prefix of {ref}"))
        sender_grew, receiver_grew = (la - prev_a, lb - prev_b) if r.sender == "A" else (lb - prev_b, la - prev_a)
        if prev_a == prev_b:
            if not r.erased and (la, lb) != (prev_a + 1, prev_b + 1):
                out.append(Violation("progress", r.index,
                                     f"equal state {prev_a}, intact delivery, lengths now {la},{lb}"))
            if r.erased and (sender_grew, receiver_grew) != (1, 0):
                out.append(Violation("erasure-step", r.index,
                                     f"equal state {prev_a}, erased delivery, lengths now {la},{lb}"))
        elif r.erased and (la, lb) != (prev_a, prev_b):
            out.append(Violation("erasure-step", r.index,
                                 f"unequal state {prev_a},{prev_b}, erased delivery, lengths now {la},{lb}"))
        if r.erased:
            erasures += 1
        if la == prev_a and lb == prev_b:
            stalls += 1
        if stalls > 2 * erasures:
            out.append(Violation("stall-bound", r.index, f"{stalls} stalled rounds after {erasures} erasures"))
            stalls = 2 * erasures  # report each excess stall once
        prev_a, prev_b = la, lb
    return out


# --------------------------------------------------------------------------- search


@dataclass
class SearchOutcome:
    mode: str
    scheme: str
    budget: int
    patterns_tested: int = 0
    failures: int = 0
    first_failure: Any = None
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.failures == 0 and not self.violations

    def to_json(self) -> dict:
        ff = self.first_failure
        if isinstance(ff, (list, tuple)):
            ff = [list(p) for p in ff]
        return {
            "mode": self.mode,
            "scheme": self.scheme,
            "budget": self.budget,
            "patterns_tested": self.patterns_tested,
            "failures": self.failures,
            "first_failure": ff,
            "violations": [v.to_json() for v in self.violations[:20]],
            "violation_count": len(self.violations),
        }


def _instance(scheme: Scheme | SchemeInstance | str, proto: NoiselessProtocol | None,
              epsilon: Fraction | str | None) -> SchemeInstance:
    if isinstance(scheme, SchemeInstance):
        return scheme
    if proto is None or epsilon is None:
        raise ConfigurationError("need a protocol and epsilon to build the scheme instance")
    return get_scheme(scheme).instance(proto, epsilon)


def substitutes(inst: SchemeInstance) -> int:
    """Substitute values per corrupted slot: one for erasures, |alphabet| - 1 for substitutions."""
    return 1 if inst.scheme.channel == ERASURE else len(inst.scheme.alphabet) - 1


def pattern_count(slots: int, budget: int, per_slot: int, min_size: int = 0) -> int:
    return sum(math.comb(slots, k) * per_slot**k for k in range(min_size, min(budget, slots) + 1))


def enumerate_patterns(slots: int, budget: int, per_slot: int,
                       min_size: int = 0) -> Iterator[tuple[tuple[int, int], ...]]:
    """Patterns by size, positions lexicographic, substitute indices in alphabet order."""
    for k in range(min_size, min(budget, slots) + 1):
        for where in itertools.combinations(range(slots), k):
            for subs in itertools.product(range(per_slot), repeat=k):
                yield tuple(zip(where, subs))


def exhaustive_adversary_search(scheme: Scheme | SchemeInstance | str, proto: NoiselessProtocol | None,
                                x, y, budget: int | None = None, *, epsilon: Fraction | str | None = None,
                                cap: int | None = None, stop_at_first: bool = False,
                                min_size: int = 0) -> SearchOutcome:
    """Every corruption pattern of ``min_size`` to ``budget`` transmissions, replayed with
    monitors armed.

    Positions are global transmission ordinals, so adaptive schemes are covered too.
    """
    inst = _instance(scheme, proto, epsilon)
    budget = inst.budget if budget is None else budget
    per_slot = substitutes(inst)
    total = pattern_count(inst.total_slots, budget, per_slot, min_size)
    cap = pattern_cap() if cap is None else cap
    if total > cap:
        raise ConfigurationError(f"{total} patterns exceed the cap of {cap}; use sampled search")
    outcome = SearchOutcome("exhaustive", inst.name, budget)
    for pattern in enumerate_patterns(inst.total_slots, budget, per_slot, min_size):
        result = inst.run(x, y, ReplayAdversary(pattern), budget=budget)
        outcome.patterns_tested += 1
        if _record(outcome, result, pattern) and stop_at_first:
            break
    return outcome


def _record(outcome: SearchOutcome, result, label: Any) -> bool:
    violations = monitor(result.trace)
    # a failed run under the guarantee is itself reported; monitors add detail
    failed = not (result.output_a == result.expected and result.output_b == result.expected)
    if violations:
        outcome.violations.extend(violations)
    if failed or violations:
        outcome.failures += 1
        if outcome.first_failure is None:
            outcome.first_failure = label
        return True
    return False


def sampled_adversaries(inst: SchemeInstance, trials: int, seed: int) -> Iterator[tuple[str, Any]]:
    for name in GREEDY_NAMES:
        yield name, builtin_adversaries(name)
    block = inst.scheme.block_length
    if block > 1:
        yield f"block-kill-nearest-{block}", BlockKillAdversary(block, block, inst.scheme.book)
    for i in range(trials):
        yield f"random:{seed}:{i}", RandomAdversary(random.Random(f"{seed}:{i}").getrandbits(64))


def sampled_adversary_search(scheme: Scheme | SchemeInstance | str, proto: NoiselessProtocol | None,
                             x, y, budget: int | None = None, trials: int = 0, seed: int = 0, *,
                             epsilon: Fraction | str | None = None) -> SearchOutcome:
    """All greedy adversaries followed by ``trials`` seeded random ones."""
    inst = _instance(scheme, proto, epsilon)
    budget = inst.budget if budget is None else budget
    outcome = SearchOutcome("sampled", inst.name, budget)
    for label, adversary in sampled_adversaries(inst, trials, seed):
        result = inst.run(x, y, adversary, budget=budget)
        outcome.patterns_tested += 1
        _record(outcome, result, label)
    return outcome
