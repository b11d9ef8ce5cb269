"""Command-line interface: ``commitsched <subcommand> ...``.

Exit codes: 0 ok, 1 check violation, 2 malformed input, 3 config error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .adversary import AdversaryError, AdversaryParams, gen_instance
from .analysis import MalformedTrace, check_trace
from .baselines import POLICY_NAMES, UnknownPolicy, make_policy
from .dsc import DEFAULT_BETA_STR, DscConfig
from .engine import run_simulation
from .formats import JsonlSink, MalformedInput, dumps_instance, read_instance, read_trace, write_text_atomic
from .generate import ConfigError, RandomGenConfig, generate_random, realized_load
from .oracle import InstanceTooLarge, offline_optimal
from .runner import competitive_report

EXIT_OK, EXIT_VIOLATION, EXIT_MALFORMED, EXIT_CONFIG = 0, 1, 2, 3
SEED_ENV = "COMMITSCHED_SEED"


class CliConfigError(Exception):
    pass


def _emit(text: str, output: str | None) -> None:
    if output:
        write_text_atomic(output, text)
    else:
        sys.stdout.write(text)


def _beta(text: str) -> float:
    try:
        return DscConfig(float(text)).beta
    except ValueError as exc:
        raise CliConfigError(f"bad --beta {text!r}: {exc}") from exc


def cmd_gen_random(args) -> int:
    seed = int(os.environ.get(SEED_ENV, args.seed))
    config = RandomGenConfig(
        seed=seed, n=args.n, arrival=args.arrival,
        proc=(args.proc_min, args.proc_max),
        laxity=(args.laxity_min, args.laxity_max),
        load_factor=args.load_factor,
    )
    instance = generate_random(config)
    _emit(dumps_instance(instance), args.output)
    print(json.dumps({"jobs": len(instance), "realizedLoad": realized_load(instance, config)}), file=sys.stderr)
    return EXIT_OK


def cmd_gen_adversary(args) -> int:
    params = AdversaryParams(args.c, scale=args.scale, epsilon_ticks=args.epsilon)
    _emit(dumps_instance(gen_instance(params)), args.output)
    return EXIT_OK


def cmd_run(args) -> int:
    instance = read_instance(args.instance)
    policy = make_policy(args.policy, _beta(args.beta))
    if args.trace:
        trace_path = Path(args.trace)
        tmp = trace_path.with_name(f".{trace_path.name}.part")
        with open(tmp, "w") as fh:
            ledger, _ = run_simulation(instance, policy, sink=JsonlSink(fh))
        os.replace(tmp, trace_path)
    else:
        ledger, _ = run_simulation(instance, policy)
    summary = json.dumps(ledger.summary()) + "\n"
    if args.summary:
        write_text_atomic(args.summary, summary)
    sys.stdout.write(summary)
    return EXIT_OK


def cmd_oracle(args) -> int:
    result = offline_optimal(read_instance(args.instance), limit=args.limit)
    sys.stdout.write(json.dumps(result.to_dict()) + "\n")
    return EXIT_OK


def cmd_check(args) -> int:
    instance = read_instance(args.instance)
    trace = read_trace(args.trace)
    analysis = check_trace(trace, instance, _beta(args.beta))
    sys.stdout.write(json.dumps(analysis.to_dict()) + "\n")
    return EXIT_OK if analysis.passed else EXIT_VIOLATION


def cmd_report(args) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        raise MalformedInput(f"{directory} is not a directory")
    policies = [p.strip() for p in args.policies.split(",") if p.strip()]
    for p in policies:
        if p not in POLICY_NAMES:
            raise UnknownPolicy(p)
    named = [(path.stem, read_instance(path)) for path in sorted(directory.glob("*.json"))]
    report = competitive_report(named, policies, _beta(args.beta), workers=args.workers,
                                oracle_limit=args.limit)
    _emit(report.to_csv(), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="commitsched", description="Simulate, generate and check online scheduling with commitment.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-random", help="generate a seeded random instance")
    p.add_argument("--seed", type=int, default=0, help=f"RNG seed (overridden by ${SEED_ENV})")
    p.add_argument("--n", type=int, default=10, help="number of jobs")
    p.add_argument("--arrival", type=float, default=10.0, help="mean inter-arrival gap in ticks")
    p.add_argument("--proc-min", type=int, default=1)
    p.add_argument("--proc-max", type=int, default=50)
    p.add_argument("--laxity-min", type=float, default=1.0)
    p.add_argument("--laxity-max", type=float, default=3.0)
    p.add_argument("--load-factor", type=float, default=None,
                   help="target mean work per mean gap; overrides --arrival")
    p.add_argument("-o", "--output", help="instance file (default stdout)")
    p.set_defaults(func=cmd_gen_random)

    p = sub.add_parser("gen-adversary", help="generate the tight-job chain for ratio 1/c")
    p.add_argument("--c", required=True, help="decimal in (1, 3+2*sqrt(2)); parsed exactly")
    p.add_argument("--scale", type=int, default=10**6, help="ticks per unit length")
    p.add_argument("--epsilon", type=int, default=1, help="release spacing in ticks")
    p.add_argument("-o", "--output", help="instance file (default stdout)")
    p.set_defaults(func=cmd_gen_adversary)

    p = sub.add_parser("run", help="simulate a policy; print the summary as JSON")
    p.add_argument("instance")
    p.add_argument("--policy", default="dsc", help=f"one of {', '.join(POLICY_NAMES)}")
    p.add_argument("--beta", default=DEFAULT_BETA_STR, help="DSC threshold parameter")
    p.add_argument("--trace", help="write the JSON-lines trace here")
    p.add_argument("--summary", help="also write the summary JSON here")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("oracle", help="exact offline optimum as JSON")
    p.add_argument("instance")
    p.add_argument("--limit", type=int, default=20, help="maximum number of jobs")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("check", help="verify the structural bounds on a DSC trace")
    p.add_argument("instance")
    p.add_argument("trace")
    p.add_argument("--beta", default=DEFAULT_BETA_STR)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("report", help="CSV of profit/oracle ratios for every instance file in a directory")
    p.add_argument("directory")
    p.add_argument("--policies", default=",".join(POLICY_NAMES))
    p.add_argument("--beta", default=DEFAULT_BETA_STR)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--limit", type=int, default=20, help="oracle job limit")
    p.add_argument("-o", "--output", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (MalformedInput, MalformedTrace, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (CliConfigError, ConfigError, AdversaryError, UnknownPolicy, InstanceTooLarge, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
