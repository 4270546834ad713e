"""Command-line front end.

    intercode run      --scheme fixed-ternary --n 8 --epsilon 1/8 --adversary greedy-front
    intercode sweep    --scheme erasure-6ary --n 4 --epsilon 1/4 --trials 200
    intercode attack   --scheme fixed-binary --n 4 --epsilon 1/24 --attack binary-sixth
    intercode verify   --scheme adaptive-ternary --n 6 --epsilon 1/6
    intercode find-code --words 6 --length 10 --distance 6

Exit status: 0 when every run succeeded with no invariant violations, 1 when a
guarantee or invariant failed, 2 on configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from typing import Any, Sequence

from .attacks import ATTACKS
from .channel import budget_for, builtin_adversaries, parse_rate
from .codes import find_code
from .engine import SchemeInstance
from .errors import ConfigurationError, UsageError
from .protocol import ALICE, BOB, Bits, ProtocolFamily, bits
from .schemes import SCHEMES, get_scheme
from .verify import exhaustive_adversary_search, monitor, pattern_count, pattern_cap, sampled_adversary_search, substitutes

EXIT_OK, EXIT_FAILED, EXIT_CONFIG = 0, 1, 2

DEFAULT_ATTACK = {
    "fixed-ternary": "fixed-quarter",
    "fixed-binary": "binary-sixth",
    "adaptive-ternary": "adaptive-third",
    "adaptive-binary": "adaptive-third",
    "erasure-6ary": "erasure-half",
    "erasure-binary-6of10": "erasure-half",
    "erasure-binary-third": "erasure-half",
}


@dataclass
class ExperimentConfig:
    scheme: str = "fixed-ternary"
    protocol: str = "identity"
    protocol_seed: int = 0
    n: int = 8
    epsilon: str = "1/8"
    adversary: str = "none"
    adversary_params: dict[str, Any] = field(default_factory=dict)
    budget_rate: str | None = None
    seed: int = 0
    trials: int = 1
    out: str | None = None
    format: str = "csv"
    x: str | None = None
    y: str | None = None

    def instance(self) -> SchemeInstance:
        proto = ProtocolFamily(self.protocol, self.n, self.protocol_seed).build()
        return get_scheme(self.scheme).instance(proto, parse_rate(self.epsilon))

    def budget(self, inst: SchemeInstance, rate: Fraction | str | None = None) -> int:
        rate = self.budget_rate if rate is None else rate
        return inst.budget if rate is None else budget_for(rate, inst.total_slots)


@dataclass
class ResultRow:
    scheme: str
    n: int
    epsilon: str
    rounds: int
    total_transmissions: int
    budget: int
    adversary: str
    seed: int
    success: bool
    corruptions_used: int
    invariant_violations: int


def inputs_for(inst: SchemeInstance, seed: int, cfg: ExperimentConfig | None = None) -> tuple[Bits, Bits]:
    """Inputs drawn from ``seed`` unless fixed in the config."""
    rng = random.Random(f"inputs:{seed}")
    out = []
    for idx, role in enumerate((ALICE, BOB)):
        fixed = None if cfg is None else (cfg.x, cfg.y)[idx]
        if fixed is not None:
            out.append(bits(fixed))
            continue
        length = inst.protocol.input_lengths[idx]
        length = inst.n // 2 if length is None else length
        out.append(tuple(rng.randrange(2) for _ in range(length)))
    return out[0], out[1]


def run_rows(cfg: ExperimentConfig, inst: SchemeInstance, budget: int, seeds: Sequence[int],
             keep_traces: bool = False) -> tuple[list[ResultRow], list[dict]]:
    rows, traces = [], []
    for seed in seeds:
        x, y = inputs_for(inst, seed, cfg)
        adversary = builtin_adversaries(cfg.adversary, cfg.adversary_params, seed)
        result = inst.run(x, y, adversary, budget=budget)
        violations = monitor(result.trace)
        rows.append(ResultRow(
            inst.name, inst.n, str(inst.epsilon), inst.rounds, inst.total_slots, budget,
            cfg.adversary, seed, result.success and not violations,
            result.trace.corruptions_used, len(violations),
        ))
        if keep_traces:
            traces.append(result.trace.to_json())
    return rows, traces


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv(rows: Sequence[Any], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        values = asdict(row) if hasattr(row, "__dataclass_fields__") else row
        writer.writerow([str(values[c]).lower() if isinstance(values[c], bool) else values[c] for c in columns])
    return buf.getvalue()


def _json(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


# --------------------------------------------------------------------------- commands


def cmd_run(cfg: ExperimentConfig, keep_traces: bool = False) -> int:
    inst = cfg.instance()
    budget = cfg.budget(inst)
    seeds = range(cfg.seed, cfg.seed + max(cfg.trials, 1))
    rows, traces = run_rows(cfg, inst, budget, seeds, keep_traces)
    if cfg.format == "json":
        payload: dict[str, Any] = {"config": inst.describe(), "rows": [asdict(r) for r in rows]}
        if keep_traces:
            payload["traces"] = traces
        _emit(_json(payload), cfg.out)
    else:
        _emit(_csv(rows, [f.name for f in fields(ResultRow)]), cfg.out)
    return EXIT_OK if all(r.success for r in rows) else EXIT_FAILED


SWEEP_COLUMNS = ["scheme", "n", "epsilon", "adversary", "rate", "budget", "guaranteed", "trials", "successes",
                 "success_fraction"]


def rate_grid(step: Fraction, upper: Fraction = Fraction(1)) -> list[Fraction]:
    grid, rate = [], Fraction(0)
    while rate < upper:
        grid.append(rate)
        rate += step
    return grid


def sweep_rows(cfg: ExperimentConfig, rates: Sequence[Fraction]) -> list[dict[str, Any]]:
    inst = cfg.instance()
    guaranteed = inst.guaranteed_rate
    out = []
    for rate in rates:
        budget = budget_for(rate, inst.total_slots)
        rows, _ = run_rows(cfg, inst, budget, range(cfg.seed, cfg.seed + cfg.trials))
        wins = sum(r.success for r in rows)
        out.append({
            "scheme": inst.name, "n": inst.n, "epsilon": str(inst.epsilon), "adversary": cfg.adversary,
            "rate": str(rate), "budget": budget, "guaranteed": rate <= guaranteed, "trials": cfg.trials,
            "successes": wins, "success_fraction": wins / cfg.trials,
        })
    return out


def cmd_sweep(cfg: ExperimentConfig, step: str = "1/16", rates: Sequence[str] | None = None) -> int:
    grid = [parse_rate(r) for r in rates] if rates else rate_grid(parse_rate(step))
    if cfg.trials < 1:
        raise ConfigurationError("a sweep needs at least one trial per rate")
    rows = sweep_rows(cfg, grid)
    if cfg.format == "json":
        _emit(_json(rows), cfg.out)
    else:
        _emit(_csv(rows, SWEEP_COLUMNS), cfg.out)
    cliff_ok = all(r["successes"] == r["trials"] for r in rows if r["guaranteed"])
    return EXIT_OK if cliff_ok else EXIT_FAILED


def cmd_attack(cfg: ExperimentConfig, attack: str | None = None) -> int:
    inst = cfg.instance()
    name = attack or DEFAULT_ATTACK[inst.name]
    if name not in ATTACKS:
        raise ConfigurationError(f"unknown attack {name!r}; choose from {', '.join(ATTACKS)}")
    report = ATTACKS[name](inst)
    _emit(_json(report.to_json()), cfg.out)
    return EXIT_OK if report.ok else EXIT_FAILED


def cmd_verify(cfg: ExperimentConfig, mode: str = "auto", budget: int | None = None) -> int:
    inst = cfg.instance()
    budget = cfg.budget(inst) if budget is None else budget
    x, y = inputs_for(inst, cfg.seed, cfg)
    count = pattern_count(inst.total_slots, budget, substitutes(inst))
    if mode == "auto":
        mode = "exhaustive" if count <= pattern_cap() else "sampled"
    if mode == "exhaustive":
        outcome = exhaustive_adversary_search(inst, None, x, y, budget)
    else:
        outcome = sampled_adversary_search(inst, None, x, y, budget, cfg.trials, cfg.seed)
    payload = {**outcome.to_json(), "pattern_space": count, "config": inst.describe()}
    _emit(_json(payload), cfg.out)
    return EXIT_OK if outcome.ok else EXIT_FAILED


def cmd_find_code(words: int, length: int, distance: int, out: str | None = None) -> int:
    book = find_code(words, length, distance)
    payload = {"num_words": words, "length": length, "min_dist": distance, "found": book is not None}
    if book is not None:
        payload.update(codewords=book.as_strings(), verified_distance=book.distance())
    _emit(_json(payload), out)
    return EXIT_OK


# --------------------------------------------------------------------------- argument parsing

CONFIG_KEYS = {f.name for f in fields(ExperimentConfig)}


def load_config(path: str | None) -> dict[str, Any]:
    if not path:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigurationError("config file must hold a JSON object")
    data = dict(raw)
    # nested forms: {"protocol": {"kind": ..., "seed": ...}}, {"adversary": {"name": ..., "params": ...}}
    if isinstance(data.get("protocol"), dict):
        proto = data.pop("protocol")
        data["protocol"] = proto.get("kind", "identity")
        data["protocol_seed"] = proto.get("seed", 0)
    if isinstance(data.get("adversary"), dict):
        adv = data.pop("adversary")
        data["adversary"] = adv.get("name", "none")
        data["adversary_params"] = adv.get("params", {})
    unknown = set(data) - CONFIG_KEYS
    if unknown:
        raise ConfigurationError(f"unknown config keys: {', '.join(sorted(unknown))}")
    return data


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file mirroring the experiment flags")
    p.add_argument("--scheme", choices=sorted(SCHEMES))
    p.add_argument("--protocol", choices=["identity", "seeded-random"])
    p.add_argument("--protocol-seed", type=int, dest="protocol_seed")
    p.add_argument("--n", type=int)
    p.add_argument("--epsilon", help="exact rational such as 1/8")
    p.add_argument("--adversary")
    p.add_argument("--budget-rate", dest="budget_rate", help="noise rate p/q; defaults to the guaranteed rate")
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--x", help="Alice's input bits (default: drawn from the seed)")
    p.add_argument("--y", help="Bob's input bits (default: drawn from the seed)")
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="intercode", description="Interactive coding simulation lab")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("run", help="simulate one configuration")
    _common(p)
    p.add_argument("--trace", action="store_true", help="include round-by-round traces (JSON only)")
    p = sub.add_parser("sweep", help="success fraction against noise rate")
    _common(p)
    p.add_argument("--step", default="1/16")
    p.add_argument("--rates", nargs="+", help="explicit rate grid instead of --step")
    p = sub.add_parser("attack", help="run an impossibility attack")
    _common(p)
    p.add_argument("--attack", choices=sorted(ATTACKS))
    p = sub.add_parser("verify", help="exhaustive or sampled adversary search")
    _common(p)
    p.add_argument("--mode", choices=["auto", "exhaustive", "sampled"], default="auto")
    p.add_argument("--budget", type=int, help="corruption count (default: the scheme's budget)")
    p = sub.add_parser("find-code", help="search for a binary code")
    p.add_argument("--words", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--distance", type=int, required=True)
    p.add_argument("--out")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    data = load_config(getattr(args, "config", None))
    for key in CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if args.command in ("attack", "verify"):
        data.setdefault("format", "json")
    cfg = ExperimentConfig(**data)
    parse_rate(cfg.epsilon)
    if cfg.budget_rate is not None:
        parse_rate(cfg.budget_rate)
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "find-code":
            return cmd_find_code(args.words, args.length, args.distance, args.out)
        cfg = config_from_args(args)
        if args.command == "run":
            return cmd_run(cfg, args.trace)
        if args.command == "sweep":
            return cmd_sweep(cfg, args.step, args.rates)
        if args.command == "attack":
            return cmd_attack(cfg, args.attack)
        return cmd_verify(cfg, args.mode, args.budget)
    except (ConfigurationError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
