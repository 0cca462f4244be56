"""Command-line front end.

Exit status: 0 when every embedded check passes, 1 when a check fails, 2 for
usage or configuration errors.  Stdout is a human log; files under ``--out``
are the machine interface.
"""

from __future__ import annotations

import argparse
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import dj, gates, prep, recipes
from .pulses import apply_sequence
from .softpulse import soften
from .spectrum import export, read_spectrum
from .system import ConfigError, load_molecule

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _common(p: argparse.ArgumentParser, read_default_help: str = "recipe default") -> None:
    p.add_argument("--molecule", help="molecule name from the library or path to a JSON file")
    p.add_argument("--out", type=Path, default=Path("spinsel-out"), help="output directory")
    p.add_argument("--read-angle", type=float, dest="read_angle",
                   help=f"detection pulse flip angle in degrees ({read_default_help})")
    p.add_argument("--cycle", action=argparse.BooleanOptionalAction, default=True,
                   help="phase-cycle transition-selective pulses (x,-x,y,-y)")
    p.add_argument("--realization", choices=("ideal", "soft"), default="ideal")
    p.add_argument("--b1", type=float, help="soft-pulse rf amplitude in Hz")
    p.add_argument("--dt", type=float, help="soft-pulse integration step in s")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")


def _options(args) -> recipes.Options:
    return recipes.Options(args.molecule, args.out, args.read_angle, args.cycle, args.realization,
                           args.b1, args.dt, args.seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spinsel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one or more experiment recipes")
    p.add_argument("recipes", nargs="+", metavar="RECIPE")
    p.add_argument("--jobs", type=int, default=1)
    _common(p)

    p = sub.add_parser("verify-all", help="run every recipe and summarize")
    p.add_argument("--jobs", type=int, default=1)
    _common(p)

    sub.add_parser("list", help="list recipe names")

    p = sub.add_parser("ppure", help="prepare a pseudo-pure state and read it out")
    p.add_argument("--method", choices=prep.METHODS, default="sq")
    p.add_argument("--label", default="A", help="label spin")
    p.add_argument("--channel", help="observed channel (default: every spin)")
    _common(p, "10")

    p = sub.add_parser("gate", help="run a compiled two-qubit gate")
    p.add_argument("--name", help="gate name, e.g. XOR+SWAP+NOT")
    p.add_argument("--input", default="thermal",
                   help="thermal, ppure or a basis index for a pseudo-pure input")
    p.add_argument("--verify-all", action="store_true", dest="verify_gates",
                   help="check phase equivalence of every named gate")
    _common(p, "10")

    p = sub.add_parser("dj", help="run a Deutsch-Jozsa oracle")
    p.add_argument("--function", required=True, help="f1..f4 (two spins) or f1..f8 (three spins)")
    _common(p, "0: direct acquisition")
    return parser


def _run_one(name_and_opts):
    name, opts = name_and_opts
    return recipes.run_recipe(name, opts)


def _run_recipes(names, opts, jobs) -> int:
    for name in names:
        if name not in recipes.RECIPES:
            raise KeyError(f"unknown recipe {name!r}; choose from {', '.join(recipes.RECIPES)}")
    work = [(n, opts) for n in names]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_one, work))
    else:
        results = [_run_one(w) for w in work]
    failed = []
    for res in results:
        for line in res.log:
            print(f"  {res.name}: {line}")
        for c in res.checks:
            print(c.line(res.name))
        if not res.passed:
            failed.append(res.name)
    print(f"{len(results) - len(failed)}/{len(results)} recipes passed"
          + (f"; failed: {', '.join(failed)}" if failed else ""))
    return EXIT_FAIL if failed else EXIT_OK


def _cmd_ppure(args) -> int:
    system = load_molecule(args.molecule or "dibromopropionic")
    soft = None if args.realization == "ideal" else 1 / (2 * (args.b1 or recipes.DEFAULT_B1))
    rho = prep.prepare(system, args.method, args.label, soft_duration=soft)
    pops = prep.populations(rho)
    print("populations " + " ".join(f"{p:+.6g}" for p in pops))
    alpha = math.radians(10 if args.read_angle is None else args.read_angle)
    sp = read_spectrum(system, rho, alpha, channel=args.channel)
    args.out.mkdir(parents=True, exist_ok=True)
    path = export(sp, "svg", args.out / f"ppure_{args.method}.svg")
    print(f"wrote {path} and {path.with_suffix('.csv')}")
    return EXIT_OK


def _cmd_gate(args) -> int:
    system = load_molecule(args.molecule or "coumarin")
    if args.verify_gates:
        bad = 0
        for name, outcome in gates.verify_all(system).items():
            if isinstance(outcome, gates.PhaseMismatch):
                bad += 1
                print(f"FAIL {name}: {outcome}")
            else:
                print(f"PASS {name}: phases " + " ".join(recipes._phase_str(p) for p in outcome.phases))
        return EXIT_FAIL if bad else EXIT_OK
    if not args.name:
        raise ConfigError("gate needs --name or --verify-all")
    initial = int(args.input) if args.input.isdigit() else args.input
    seq = gates.compile_gate(system, args.name)
    if args.realization == "soft":
        seq = soften(system, seq, args.b1 or recipes.DEFAULT_B1, args.dt)
    rho = apply_sequence(system, gates.initial_state(system, initial), seq)
    alpha = math.radians(10 if args.read_angle is None else args.read_angle)
    sp = read_spectrum(system, rho, alpha)
    print(f"{gates.normalize_name(args.name)}: {seq.describe()}")
    print("populations " + " ".join(f"{p:+.6g}" for p in prep.populations(rho)))
    args.out.mkdir(parents=True, exist_ok=True)
    stem = gates.normalize_name(args.name).replace("+", "_")
    path = export(sp, "svg", args.out / f"gate_{stem}.svg")
    print(f"wrote {path} and {path.with_suffix('.csv')}")
    return EXIT_OK


def _cmd_dj(args) -> int:
    system = load_molecule(args.molecule or "nitrofuraldehyde")
    n_inputs = system.n - 1
    if n_inputs not in (1, 2):
        raise ConfigError(f"DJ needs two or three spins, molecule has {system.n}")
    try:
        f = dj.function(n_inputs, args.function)
    except KeyError as exc:
        raise ConfigError(str(exc.args[0])) from None
    realize = None
    if args.realization == "soft":
        def realize(seq):
            return soften(system, seq, args.b1 or recipes.DEFAULT_B1, args.dt)
    alpha = math.radians(args.read_angle or 0.0)
    r = dj.run_dj(system, f, alpha, args.cycle, realize=realize)
    print(f"{f.name} {f.table}: classified {r.kind} (margin {r.classification.margin:.3g}); "
          f"expected {f.kind}")
    out = args.out
    if out.suffix == ".json":
        out.parent.mkdir(parents=True, exist_ok=True)
        path = out
    else:
        out.mkdir(parents=True, exist_ok=True)
        path = out / f"dj_{f.name}.json"
    recipes._write_json(path, recipes.dj_record(r, system))
    print(f"wrote {path}")
    return EXIT_OK if r.kind == f.kind else EXIT_FAIL


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            print("\n".join(recipes.RECIPES))
            return EXIT_OK
        if args.command == "run":
            return _run_recipes(args.recipes, _options(args), args.jobs)
        if args.command == "verify-all":
            return _run_recipes(list(recipes.RECIPES), _options(args), args.jobs)
        if args.command == "ppure":
            return _cmd_ppure(args)
        if args.command == "gate":
            return _cmd_gate(args)
        if args.command == "dj":
            return _cmd_dj(args)
    except (ConfigError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    parser.error(f"unknown command {args.command}")
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
