"""Acceptance criteria, one test each, with runtime limits enforced.

Every test reports a single PASS/FAIL line through the ``acceptance_line``
fixture; the lines are collected at the end of the pytest run.
"""
import itertools
import random
import time
from fractions import Fraction

import oracles
from intercode import ProtocolFamily, identity_exchange, run_noiseless
from intercode.attacks import attack_adaptive_third, attack_binary_sixth, attack_erasure_half, attack_fixed_quarter
from intercode.channel import BlockKillAdversary, RandomAdversary
from intercode.cli import ExperimentConfig, cmd_sweep, rate_grid, sweep_rows
from intercode.codes import FOUR_ARY_BOOK, find_code
from intercode.erasure import ERASURE_6ARY, ERASURE_THIRD
from intercode.feedback import ADAPTIVE_BINARY, ADAPTIVE_TERNARY, FIXED_BINARY, FIXED_TERNARY, classify_messages
from intercode.verify import exhaustive_adversary_search, monitor, sampled_adversaries


def all_inputs(half: int):
    return list(itertools.product((0, 1), repeat=half))


def random_inputs(length: int, rng: random.Random):
    return tuple(rng.randrange(2) for _ in range(length))


def test_zero_noise_exactness(acceptance_line):
    start = time.perf_counter()
    schemes = [
        (FIXED_TERNARY, "1/8", lambda n: oracles.rounds_fixed_ternary(n, 1, 8)),
        (ADAPTIVE_TERNARY, "1/6", lambda n: oracles.rounds_adaptive_ternary(n, 1, 6)),
        (FIXED_BINARY, "1/24", lambda n: oracles.rounds_fixed_binary(n, 1, 24)),
        (ADAPTIVE_BINARY, "1/4", lambda n: oracles.bits_adaptive_binary(n, 4)),
        (ERASURE_6ARY, "1/4", lambda n: oracles.rounds_erasure(n, 1, 4)),
    ]
    rng = random.Random(1)
    bad, runs = [], 0
    for scheme, eps, expected in schemes:
        for kind in ("identity", "seeded-random"):
            for n in (4, 8, 16):
                for i in range(50):
                    proto = ProtocolFamily(kind, n, seed=i).build()
                    inst = scheme.instance(proto, eps)
                    if inst.total_slots != expected(n):
                        bad.append((scheme.name, n, "slots", inst.total_slots))
                    x, y = random_inputs(n // 2, rng), random_inputs(n // 2, rng)
                    out_a, out_b, _ = inst.run(x, y)
                    want = run_noiseless(proto, x, y)
                    runs += 1
                    if not (tuple(out_a) == tuple(out_b) == tuple(want)):
                        bad.append((scheme.name, kind, n, x, y))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 5
    acceptance_line("criterion 1", ok, f"{runs} zero-noise runs, {len(bad)} mismatches, {elapsed:.2f}s (limit 5s)")
    assert ok, bad[:5]


def test_fixed_ternary_exhaustive(acceptance_line):
    start = time.perf_counter()
    inst = FIXED_TERNARY.instance(identity_exchange(8), "1/8")
    assert (inst.total_slots, inst.budget) == (16, 2)
    # all 256 pairs take about 13s on one core; a seeded sample of 32 plus the extremes
    space = list(itertools.product(all_inputs(4), all_inputs(4)))
    pairs = [space[0], space[-1]] + random.Random(2).sample(space[1:-1], 30)
    tested = failures = 0
    for x, y in pairs:
        out = exhaustive_adversary_search(inst, None, x, y)
        tested += out.patterns_tested
        failures += out.failures
    elapsed = time.perf_counter() - start
    ok = failures == 0 and tested == len(pairs) * oracles.patterns_up_to(16, 2, 2) and elapsed < 5
    acceptance_line("criterion 2", ok,
                    f"{tested} patterns over {len(pairs)} input pairs, {failures} failures, {elapsed:.2f}s (limit 5s)")
    assert ok


def test_adaptive_ternary_exhaustive(acceptance_line):
    start = time.perf_counter()
    inst = ADAPTIVE_TERNARY.instance(identity_exchange(6), "1/6")
    assert (inst.total_slots, inst.budget) == (12, 2)
    pairs = list(itertools.product(all_inputs(3), all_inputs(3)))
    tested = failures = 0
    for x, y in pairs:
        out = exhaustive_adversary_search(inst, None, x, y)
        tested += out.patterns_tested
        failures += out.failures
    elapsed = time.perf_counter() - start
    ok = failures == 0 and tested == len(pairs) * oracles.patterns_up_to(12, 2, 2) and elapsed < 5
    acceptance_line("criterion 3", ok,
                    f"{tested} patterns over {len(pairs)} input pairs, {failures} failures, {elapsed:.2f}s (limit 5s)")
    assert ok


def test_fixed_binary_exhaustive(acceptance_line):
    start = time.perf_counter()
    inst = FIXED_BINARY.instance(identity_exchange(4), "1/24")
    assert (inst.total_slots, inst.budget) == (32, 4)
    out = exhaustive_adversary_search(inst, None, (1, 0), (0, 1))
    elapsed = time.perf_counter() - start
    ok = out.ok and out.patterns_tested == oracles.patterns_up_to(32, 4, 1) and elapsed < 60
    acceptance_line("criterion 4", ok,
                    f"{out.patterns_tested} flip patterns, {out.failures} failures, {elapsed:.2f}s (limit 60s)")
    assert ok


def test_adaptive_binary_sampled(acceptance_line):
    start = time.perf_counter()
    inst = ADAPTIVE_BINARY.instance(identity_exchange(4), "1/4")
    assert (inst.total_slots, inst.budget) == (64, 5)
    k = 4
    pairs = all_inputs(2)
    per_pair = 10_000 // (len(pairs) * len(pairs))
    runs = failures = 0
    problems = []
    for i, (x, y) in enumerate(itertools.product(pairs, pairs)):
        for label, adversary in sampled_adversaries(inst, per_pair, seed=i):
            result = inst.run(x, y, adversary)
            runs += 1
            classes = classify_messages(result.trace)
            issues = monitor(result.trace)
            if not result.success:
                failures += 1
            if result.success and classes.progress_bound < inst.n:
                issues.append(f"progress {classes.progress_bound} < {inst.n}")
            if any(m.length > 2 + 3 * k for m in classes.messages):
                issues.append("message too long")
            if len(classes.C) + len(classes.W) >= inst.n * k:
                issues.append("too many confirmed messages")
            if issues:
                problems.append((x, y, label, issues[:2]))
    random_runs = runs - 4 * len(pairs) ** 2
    elapsed = time.perf_counter() - start
    ok = failures == 0 and not problems and random_runs >= 10_000 - 16 and elapsed < 60
    acceptance_line("criterion 5", ok,
                    f"{runs} runs ({random_runs} random) over 16 input pairs, {failures} failures, "
                    f"{len(problems)} message-accounting violations, {elapsed:.2f}s (limit 60s)")
    assert ok, problems[:3]


def test_erasure_6ary_exhaustive(acceptance_line):
    start = time.perf_counter()
    inst = ERASURE_6ARY.instance(identity_exchange(4), "1/4")
    assert (inst.total_slots, inst.budget) == (16, 4)
    out = exhaustive_adversary_search(inst, None, (1, 1), (0, 1), min_size=4)
    elapsed = time.perf_counter() - start
    ok = out.ok and out.patterns_tested == 1820 and not out.violations and elapsed < 5
    acceptance_line("criterion 6", ok,
                    f"{out.patterns_tested} erasure patterns, {out.failures} failures, "
                    f"{len(out.violations)} monitor violations, {elapsed:.2f}s (limit 5s)")
    assert ok


def test_binary_erasure_third(acceptance_line):
    start = time.perf_counter()
    inst = ERASURE_THIRD.instance(identity_exchange(4), "1/6")
    rng = random.Random(7)
    runs = failures = 0
    kills = []
    for x, y in itertools.product(all_inputs(2), all_inputs(2)):
        # two erasures per codeword, positional and nearest-neighbour
        for adversary in (BlockKillAdversary(3, 2), BlockKillAdversary(3, 3, FOUR_ARY_BOOK)):
            result = inst.run(x, y, adversary)
            kills.append(adversary.kills)
            runs += 1
            failures += not result.success or bool(monitor(result.trace))
    for i in range(10_000):
        x, y = random_inputs(2, rng), random_inputs(2, rng)
        result = inst.run(x, y, RandomAdversary(rng.getrandbits(64)))
        runs += 1
        failures += not result.success or bool(monitor(result.trace))
    elapsed = time.perf_counter() - start
    ok = failures == 0 and min(kills) > 0 and elapsed < 60
    acceptance_line("criterion 7", ok,
                    f"{runs} runs (bit budget {inst.budget} of {inst.total_slots}), block killers erased "
                    f"{min(kills)}-{max(kills)} blocks, {failures} failures, {elapsed:.2f}s (limit 60s)")
    assert ok


def test_attacks_show_tightness(acceptance_line):
    start = time.perf_counter()
    ft = FIXED_TERNARY.instance(identity_exchange(8), "1/8")
    at = ADAPTIVE_TERNARY.instance(identity_exchange(6), "1/6")
    fb = FIXED_BINARY.instance(identity_exchange(4), "1/24")
    er = ERASURE_6ARY.instance(identity_exchange(4), "1/4")
    reports = [
        (attack_fixed_quarter(ft), oracles.ceil_frac(ft.total_slots, 4)),
        (attack_adaptive_third(at), oracles.ceil_frac(at.total_slots, 3)),
        (attack_binary_sixth(fb, inputs=[(0, 0), (0, 1), (1, 0)]), fb.total_slots // 6),
        (attack_erasure_half(er), oracles.ceil_frac(er.total_slots, 2)),
    ]
    elapsed = time.perf_counter() - start
    parts, ok = [], elapsed < 10
    for report, limit in reports:
        good = report.confusable and report.replay_consistent and max(report.corruptions) <= limit
        ok &= good
        parts.append(f"{report.attack} {report.corruptions}<={limit}{'' if good else ' FAILED'}")
    acceptance_line("criterion 8", ok, f"{'; '.join(parts)}; {elapsed:.2f}s (limit 10s)")
    assert ok


def test_code_search(acceptance_line):
    start = time.perf_counter()
    big = find_code(6, 10, 6)
    small = find_code(4, 3, 2)
    elapsed = time.perf_counter() - start
    big_ok = big is not None and len(big.words) == 6 and oracles.hamming_min(big.words) >= 6
    small_ok = small is not None and sorted(small.words) == sorted(FOUR_ARY_BOOK.words)
    ok = big_ok and small_ok and elapsed < 60
    acceptance_line("criterion 9", ok,
                    f"(6,10,6) found with distance {oracles.hamming_min(big.words) if big else None}; "
                    f"(4,3,2) equals the 4-ary code: {small_ok}; {elapsed:.2f}s (limit 60s)")
    assert ok


def test_sweep_cliffs(acceptance_line, capsys):
    start = time.perf_counter()
    configs = [
        ExperimentConfig(scheme="fixed-ternary", n=8, epsilon="1/8", adversary="random", trials=200),
        ExperimentConfig(scheme="erasure-6ary", n=4, epsilon="1/4", adversary="greedy-target", trials=200),
    ]
    parts, ok = [], True
    for cfg in configs:
        code = cmd_sweep(cfg, "1/16")
        capsys.readouterr()
        rows = sweep_rows(cfg, rate_grid(Fraction(1, 16)))
        guaranteed = [r for r in rows if r["guaranteed"]]
        good = code == 0 and guaranteed and all(r["success_fraction"] == 1.0 for r in guaranteed)
        ok &= bool(good)
        above = [r for r in rows if not r["guaranteed"]]
        low = min((r["success_fraction"] for r in above), default=None)
        parts.append(f"{cfg.scheme}: 1.0 at all {len(guaranteed)} guaranteed rates"
                     f"{'' if good else ' FAILED'}, min above = {low}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 300
    acceptance_line("criterion 10", ok, f"{'; '.join(parts)}; {elapsed:.2f}s (limit 300s)")
    assert ok
