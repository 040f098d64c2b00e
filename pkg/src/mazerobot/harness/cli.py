"""``mazerobot`` command line.

Every subcommand prints a report (JSON by default) to stdout or ``--out``.
Failures print a JSON error object and exit nonzero:
2 for usage and input errors, 3 for resource caps, 1 otherwise.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .. import walks
from ..automaton import (AutomatonError, AutomatonParseError, RationalAutomaton, compile_rational,
                         dumps, read, verify_compilation)
from ..programs import PROGRAMS, get_program
from ..walks import GridTooLarge, WalkSpec
from .config import (DEFAULT_BUDGET, DEFAULT_RADIUS, DEFAULT_TRIALS, ConfigError, ExperimentConfig,
                     ResourceError)
from .experiments import (coverage_experiment, distribution_experiment, flag_choice_experiment,
                          increment_experiment, resolve_target, return_experiment, simulate)
from .report import ExperimentReport

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RESOURCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("common options")
    g.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                   help="master seed (default: $MAZEROBOT_SEED or the built-in seed)")
    g.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    g.add_argument("--budget", type=int, default=None, help="step budget")
    g.add_argument("--radius", type=int, default=DEFAULT_RADIUS, help="L1 ball radius")
    g.add_argument("--mode", choices=("rational", "float"), default=None)
    g.add_argument("--out", default=None, help="write the report here instead of stdout")
    g.add_argument("--format", choices=("json", "csv"), default="json")
    g.add_argument("--timing", action="store_true", help="include wall-clock seconds in the report")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = _Parser(prog="mazerobot", description="Maze-robot automata and lattice walk experiments.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("simulate", parents=[common], help="run one program")
    s.add_argument("program", choices=sorted(PROGRAMS))

    s = sub.add_parser("coverage", parents=[common], help="L1-ball coverage per budget checkpoint")
    s.add_argument("program", choices=sorted(PROGRAMS))
    s.add_argument("--oracle-factor", type=int, default=0,
                   help="also run this many times more trials on disjoint seeds and compare")

    s = sub.add_parser("returns", parents=[common], help="first-return experiment")
    s.add_argument("target", help="program (z2, z4, z6, z8) or walk:z<k> / walk:lazy<k>")

    s = sub.add_parser("compare", parents=[common], help="program statistics against exact laws")
    s.add_argument("program", choices=sorted(PROGRAMS))
    s.add_argument("--what", choices=("position", "increments", "flag-choice"), default="position")
    s.add_argument("--checkpoint", type=int, default=8,
                   help="walk moves (z2) or pebble moves (z4) before comparing positions")

    s = sub.add_parser("analyze", parents=[common], help="exact walk computations")
    s.add_argument("quantity", choices=("z3-return", "z3-bound", "max-multinomial", "stirling",
                                        "shifted-bound", "classify", "distribution", "return-series",
                                        "first-return", "mixture"))
    s.add_argument("--n", type=int, default=None)
    s.add_argument("--x", default=None, help="point as comma-separated integers")
    s.add_argument("--walk", default="walk:z3", help="walk:z<k> or walk:lazy<k>")
    s.add_argument("--other", default=None, help="second mixture component (default: stay put)")
    s.add_argument("--p", default="1/2", help="mixture probability of --walk")
    s.add_argument("--horizon", type=int, default=200)

    s = sub.add_parser("compile", parents=[common], help="compile a rational automaton file")
    s.add_argument("--in", dest="infile", required=True)
    s.add_argument("--verify", action="store_true", help="check exact absorption probabilities")
    s.add_argument("--axis", type=int, default=1, help="cancel-pair axis of the coin-flip trees")

    s = sub.add_parser("export", parents=[common], help="write a program as an automaton file")
    s.add_argument("program", choices=sorted(PROGRAMS))
    return ap


# -- command handlers ------------------------------------------------------------------

def _cfg(args, target: str, budget: int, mode: str = "float", **extra) -> ExperimentConfig:
    return ExperimentConfig(target, budget=budget, trials=args.trials, radius=args.radius,
                            seed=args.seed, mode=args.mode or mode, out=args.out, extra=extra)


def _budget(args, default: int = DEFAULT_BUDGET) -> int:
    return default if args.budget is None else args.budget


def _cmd_simulate(args):
    return simulate(_cfg(args, args.program, _budget(args)))


def _cmd_coverage(args):
    extra = {"oracle_factor": args.oracle_factor} if args.oracle_factor else {}
    return coverage_experiment(_cfg(args, args.program, _budget(args), **extra))


def _cmd_returns(args):
    resolve_target(args.target)
    return return_experiment(_cfg(args, args.target, _budget(args, 10**4)))


def _cmd_compare(args):
    if args.what == "position":
        return distribution_experiment(_cfg(args, args.program, _budget(args, 10**6),
                                            checkpoint=args.checkpoint))
    if args.what == "increments":
        return increment_experiment(_cfg(args, args.program, _budget(args, 3000)))
    return flag_choice_experiment(_cfg(args, args.program, _budget(args, 0)))


def _walk(name: str) -> WalkSpec:
    t = resolve_target(name)
    if not isinstance(t, WalkSpec):
        raise ConfigError(f"{name!r} is not a walk")
    return t


def _need(value, flag: str):
    if value is None:
        raise UsageError(f"{flag} is required for this quantity")
    return value


def _point(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(c) for c in text.split(","))
    except ValueError:
        raise UsageError(f"--x expects comma-separated integers, got {text!r}") from None


def _cmd_analyze(args):
    q = args.quantity
    mode = args.mode or "rational"
    res: dict = {"quantity": q}
    rows: list = []
    if q == "z3-return":
        n = _need(args.n, "--n")
        v = walks.z3_origin_return_exact(n)
        res.update(n=n, value=v, float=float(v))
    elif q == "z3-bound":
        n = _need(args.n, "--n")
        exact, bound = walks.z3_origin_return_exact(2 * n), walks.z3_upper_bound(n)
        res.update(n=n, return_probability=exact, upper_bound=bound, holds=exact <= bound,
                   equality=exact == bound, ratio_to_stirling=float(bound) / walks.stirling_asymptotic(n))
    elif q == "max-multinomial":
        n = _need(args.n, "--n")
        res.update(n=n, value=walks.max_multinomial(n), parts=walks.max_multinomial_parts(n))
    elif q == "stirling":
        n = _need(args.n, "--n")
        res.update(n=n, value=walks.stirling_asymptotic(n))
    elif q == "shifted-bound":
        n = _need(args.n, "--n")
        x = _point(_need(args.x, "--x"))
        lhs, rhs = walks.shifted_bound_terms(n, x)
        res.update(n=n, x=x, probability=lhs, bound=rhs, holds=lhs <= rhs)
    elif q == "classify":
        rep = walks.classify_recurrence(_walk(args.walk), args.horizon, args.mode or "float")
        res.update(walk=args.walk, **rep.to_dict())
    elif q == "distribution":
        n = _need(args.n, "--n")
        g = walks.dp_step_distribution(_walk(args.walk), n, args.radius, mode)
        rows = [{"point": list(x), "mass": m} for x, m in g.items()]
        res.update(walk=args.walk, n=n, radius=args.radius, mode=mode, mass=rows,
                   truncation_mass=g.truncation_mass)
    elif q in ("return-series", "first-return"):
        w = _walk(args.walk)
        fn = walks.origin_return_series if q == "return-series" else walks.first_return_cdf
        vals = fn(w, args.horizon, mode)
        rows = [{"n": i, "value": v} for i, v in enumerate(vals)]
        res.update(walk=args.walk, horizon=args.horizon, mode=mode, values=vals)
    elif q == "mixture":
        n = _need(args.n, "--n")
        a = _walk(args.walk)
        b = _walk(args.other) if args.other else WalkSpec.stay(a.dimension)
        m = walks.MixtureSpec(a, b, Fraction(args.p))
        g = walks.mixture_distribution(m, n, args.radius, mode)
        direct = walks.dp_step_distribution(walks.mixed_walk(m), n, args.radius, mode)
        rows = [{"point": list(x), "mass": v} for x, v in g.items()]
        res.update(walk=args.walk, other=args.other or "stay", p=m.prob_a, n=n, mode=mode,
                   mass=rows, matches_one_step_mixture=g == direct)
    cfg = {"quantity": q, "mode": mode}
    return ExperimentReport("analyze", cfg, res, rows or [{k: v for k, v in res.items()
                                                          if not isinstance(v, (list, dict))}])


def _cmd_compile(args):
    src = read(args.infile)
    if not isinstance(src, RationalAutomaton):
        raise ConfigError(f"{args.infile} already holds a coin-flip automaton (no choice lists)")
    robot = compile_rational(src, axis=args.axis)
    res = {
        "input": Path(args.infile).name,
        "states": {"rational": len(src.states), "compiled": robot.size},
        "gadgets": {robot.names[g.root]: {"depth": g.depth, "leaves": g.leaves,
                                          "restart_leaves": g.restart_leaves}
                    for g in robot.gadgets},
    }
    if args.verify:
        ver = verify_compilation(src, robot)
        res["verification"] = ver
        res["exact_match"] = all(v["match"] and v["zero_displacement"] for v in ver.values())
    text = dumps(robot)
    if args.out:
        Path(args.out).write_text(text)
        res["automaton_file"] = args.out
        args.out = None  # the file holds the automaton; the report goes to stdout
    rows = [{"state": s, **{k: json.dumps(v) for k, v in d.items()}}
            for s, d in res.get("verification", {}).items()]
    return ExperimentReport("compile", {"axis": args.axis}, res, rows)


def _cmd_export(args):
    text = dumps(get_program(args.program).automaton)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return None


HANDLERS = {
    "simulate": _cmd_simulate, "coverage": _cmd_coverage, "returns": _cmd_returns,
    "compare": _cmd_compare, "analyze": _cmd_analyze, "compile": _cmd_compile,
    "export": _cmd_export,
}


def _error(kind: str, message: str, code: int, **extra) -> int:
    obj = {"error": {"type": kind, "message": message, **extra}, "exit_code": code}
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        return _error("usage", str(e), EXIT_USAGE)
    t0 = time.perf_counter()
    try:
        report = HANDLERS[args.command](args)
    except AutomatonParseError as e:
        return _error("parse", e.message, EXIT_USAGE, line=e.line, column=e.column)
    except (UsageError, ConfigError, AutomatonError, FileNotFoundError) as e:
        return _error(type(e).__name__, str(e), EXIT_USAGE)
    except (ResourceError, GridTooLarge, MemoryError) as e:
        return _error("resource", str(e), EXIT_RESOURCE)
    except ValueError as e:
        return _error("value", str(e), EXIT_USAGE)
    if report is None:
        return EXIT_OK
    if args.timing:
        report.wall_clock = round(time.perf_counter() - t0, 6)
    text = report.render(args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
