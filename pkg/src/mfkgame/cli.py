"""Command line: ``gen``, ``run`` and ``sweep``.

Exit codes: 0 success, 2 invalid arguments, 3 unparsable instance file,
4 at least one trial broke the game protocol.
"""

from __future__ import annotations

import argparse
import sys

from . import harness
from .mfk import HardInstanceSpec, InstanceFormatError, gen_hard, gen_random, load, offline_optimum, serialize
from .qsim import BackendConfig

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_PROTOCOL = 4


class UsageError(Exception):
    pass


def _backend(args) -> BackendConfig:
    try:
        return BackendConfig(kind=args.backend, error=args.error)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _write_file(path, text: str) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)


def cmd_gen(args) -> int:
    try:
        if args.kind == "hard":
            if args.d not in (None, 2):
                raise UsageError("hard instances have d = 2")
            spec = HardInstanceSpec(m=args.m, k=args.k, case=args.case, z=args.z, u=args.u)
            inst = gen_hard(spec)
        else:
            d = 2 if args.d is None else args.d
            inst = gen_random(d, args.m, args.k, args.seed, skew=args.skew, favor=args.favor, noise=args.noise)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = serialize(inst)
    if args.out:
        _write_file(args.out, text)
    print(f"d={inst.d} m={inst.m} k={inst.k} optimum={offline_optimum(inst)}")
    return EXIT_OK


def cmd_run(args) -> int:
    try:
        inst = load(args.instance)
    except (InstanceFormatError, UnicodeDecodeError) as exc:
        print(f"error: cannot parse {args.instance}: {exc}", file=sys.stderr)
        return EXIT_PARSE
    K = inst.k if args.K is None else args.K
    R = K if args.R is None else args.R
    if K < 1 or R < 1 or args.trials < 1:
        raise UsageError("K, R and trials must be positive")
    backend = _backend(args)
    specs = [
        harness.TrialSpec(
            instance=inst, player=args.player, backend=backend, buffer_size=K, answer_period=R,
            trial=t, trial_seed=args.seed + t, generator="file", instance_seed=-1,
            tracker_mode=args.tracker, constant_answer=args.answer,
        )
        for t in range(args.trials)
    ]
    rows = harness.run_trials(specs, jobs=args.jobs)
    if args.out:
        _write_file(args.out, harness.rows_to_csv(rows))
    else:
        sys.stdout.write(harness.rows_to_csv(rows))
    if args.json:
        _write_file(args.json, harness.to_json(rows) + "\n")
    return EXIT_PROTOCOL if any(not r.ok for r in rows) else EXIT_OK


def cmd_sweep(args) -> int:
    values = [int(v) for v in args.values.split(",") if v.strip()]
    try:
        results = harness.sweep(
            axis=args.axis, values=values, d=args.d, m=args.m, k=args.k, trials=args.trials,
            seed=args.seed, backend=_backend(args), family=args.family,
            players=args.players.split(","), jobs=args.jobs,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = harness.sweep_to_csv(results)
    if args.out:
        _write_file(args.out, text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mfkgame", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance file")
    gen.add_argument("kind", choices=["random", "hard"])
    gen.add_argument("--d", type=int, default=None)
    gen.add_argument("--m", type=int, required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--case", type=int, default=2)
    gen.add_argument("--z", type=int)
    gen.add_argument("--u", type=int)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--skew", type=float, default=1.0)
    gen.add_argument("--favor", type=int)
    gen.add_argument("--noise", type=float, default=0.0)
    gen.add_argument("--out", help="instance file to write")
    gen.set_defaults(func=cmd_gen)

    def backend_flags(p):
        p.add_argument("--backend", choices=["modeled", "exact"], default="modeled")
        p.add_argument("--error", type=float, default=0.5, help="modeled first-one-search miss probability")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--trials", type=int, default=1)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--out", help="CSV output (default: stdout)")

    run = sub.add_parser("run", help="play games on an instance file")
    run.add_argument("instance")
    run.add_argument("--player", choices=harness.PLAYERS, default="quantum")
    run.add_argument("--K", type=int, help="buffer size (default k)")
    run.add_argument("--R", type=int, help="answer period (default K)")
    run.add_argument("--tracker", choices=["faithful", "strict"], default="faithful")
    run.add_argument("--answer", type=int, default=1, help="index answered by the constant player")
    run.add_argument("--json", help="also write a JSON mirror here")
    backend_flags(run)
    run.set_defaults(func=cmd_run)

    sw = sub.add_parser("sweep", help="mean cost per axis value for both players")
    sw.add_argument("--axis", choices=["k", "m"], required=True)
    sw.add_argument("--values", required=True, help="comma-separated axis values")
    sw.add_argument("--d", type=int, default=2)
    sw.add_argument("--m", type=int, default=64)
    sw.add_argument("--k", type=int, default=4096)
    sw.add_argument("--family", choices=["hard", "random"], default="hard")
    sw.add_argument("--players", default="quantum,classical")
    backend_flags(sw)
    sw.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
