"""Command-line front end.

Subcommands: `check` (dispatch a formula to an engine and report the
verdict), `oracle` (check with the enumerating reference engine),
`reduce` (translate between the variable and regex-atom surface
logics), `classify` (per-variable labelling shapes), `stats` (sizes,
fragments and interval-type bounds), `export-dot` (transition graph,
labelling automata, modal context trees).

Exit statuses: 0 the formula holds conclusively, 1 it fails
conclusively, 2 usage or parse errors, 3 bounded or infeasible results
(a BoundedAt verdict is reported but not trusted as final).
"""

from __future__ import annotations

import argparse
import json
import os
import sys as _sys
import time
from typing import List, Optional, Sequence, Tuple

from .abln import (
    LITERAL_BOUND,
    TIGHT_BOUND,
    BoundInfeasibleError,
    Verdict,
    check_abln,
    compute_mct,
    mct_to_dot,
    user_bound,
)
from .bde import check_bde
from .formulas import (
    Box,
    Formula,
    FormulaSyntaxError,
    Fragment,
    FragmentError,
    fis_bound_saturating,
    format_formula,
    fragment_of,
    parse_plus,
    parse_re,
    tight_bound_saturating,
    variables_of,
)
from .oracle import minimal_anchor, oracle_check
from .reductions import to_point_based, to_regular_labelling
from .regexes import (
    RegexSyntaxError,
    UnknownSymbolError,
    dfa_to_dot,
    language_shape,
)
from .systems import (
    Interval,
    Relation,
    SystemParseError,
    format_system,
    load_system,
    parse_system,
    tg_to_dot,
    validate_interval,
)

EXIT_HOLDS = 0
EXIT_FAILS = 1
EXIT_USAGE = 2
EXIT_BOUNDED = 3

_DISPLAY_CAP = 10**300


class _UsageError(Exception):
    pass


def _load(path: str):
    try:
        return load_system(path)
    except FileNotFoundError:
        raise _UsageError(f"no such file: {path}")
    except SystemParseError as e:
        raise _UsageError(f"{path}: {e}")


def _formula(arg: str, logic: str) -> Formula:
    text = arg
    if os.path.exists(arg) and not arg.lstrip().startswith(("<", "[", "!", "{", "(")):
        with open(arg) as fh:
            text = fh.read().strip()
    parse = parse_re if logic == "re" else parse_plus
    try:
        return parse(text)
    except (FormulaSyntaxError, RegexSyntaxError, UnknownSymbolError) as e:
        raise _UsageError(f"formula: {e}")


def _interval(system, text: Optional[str]) -> Interval:
    if text is None:
        return Interval((system.initial,))
    names = [n for chunk in text.split(",") for n in chunk.split() if n]
    if not names:
        raise _UsageError("--interval needs at least one configuration")
    configs = []
    for name in names:
        try:
            configs.append(system.config_by_name(name))
        except KeyError:
            raise _UsageError(f"unknown configuration {name!r}")
    interval = Interval(tuple(configs))
    try:
        validate_interval(system, interval)
    except ValueError as e:
        raise _UsageError(str(e))
    return interval


def _bound_display(n: int) -> str:
    if n >= _DISPLAY_CAP:
        return f">= 1e300"
    if n < 10**6:
        return str(n)
    return f"{float(n):.6e}"


def _emit(args, payload: dict, text_lines: List[str]) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


# ---------------------------------------------------------------------------
# check / oracle

def _pick_engine(f: Formula, engine: str, logic: str) -> str:
    if engine != "auto":
        return engine
    fragment = fragment_of(f)
    if fragment == Fragment.BDE:
        return "bde"
    if fragment == Fragment.ABLN:
        return "abln"
    raise _UsageError(
        "formula is outside both decidable fragments; use --engine oracle"
    )


def _abln_mode(args):
    if args.bound is not None and args.mode is not None:
        raise _UsageError("--bound and --mode are mutually exclusive")
    if args.bound is not None:
        if args.bound < 1:
            raise _UsageError("--bound must be a positive integer")
        return user_bound(args.bound), f"user {args.bound}"
    if args.mode == "tight":
        return TIGHT_BOUND, "tight"
    return LITERAL_BOUND, "literal"


def cmd_check(args) -> int:
    system = _load(args.system)
    f = _formula(args.formula, args.logic)
    interval = _interval(system, args.interval)
    if args.all_initial:
        interval = Interval((system.initial,))
        f = Box(Relation.A, f)

    engine = args.engine
    if engine != "oracle" and args.logic == "re":
        try:
            system, f = to_regular_labelling(system, f)
        except ValueError as e:
            raise _UsageError(
                f"{e}; regex atoms over a general labelling need --engine oracle"
            )
    engine = _pick_engine(f, engine, args.logic)

    started = time.perf_counter()
    bound_text = "exact"
    try:
        if engine == "bde":
            holds = check_bde(system, interval, f)
            verdict = Verdict(holds)
        elif engine == "abln":
            mode, bound_text = _abln_mode(args)
            verdict = check_abln(
                system, interval, f, mode, frontier_ceiling=args.frontier_ceiling
            )
        else:
            aI = minimal_anchor(system, interval)
            slack = args.bound if args.bound is not None else 6
            total = aI.total_length + slack
            holds = oracle_check(system, aI, f, total)
            bound_text = f"anchored enumeration to {total}"
            if fragment_of(f) == Fragment.BDE:
                verdict = Verdict(holds)
            else:
                verdict = Verdict(holds, bounded_at=total)
    except FragmentError as e:
        raise _UsageError(str(e))
    except BoundInfeasibleError as e:
        _emit(
            args,
            {"error": "bound-infeasible", "estimate_over": e.ceiling},
            [f"bound infeasible: {e}"],
        )
        return EXIT_BOUNDED
    elapsed = time.perf_counter() - started

    status = EXIT_HOLDS if verdict.holds else EXIT_FAILS
    if not verdict.conclusive:
        status = EXIT_BOUNDED
    payload = {
        "holds": verdict.holds,
        "regime": verdict.regime,
        "engine": engine,
        "bound": bound_text,
        "formula": format_formula(f),
    }
    lines = [
        f"verdict: {'holds' if verdict.holds else 'fails'}",
        f"regime: {verdict.regime}",
        f"engine: {engine}",
        f"bound: {bound_text}",
        f"elapsed: {elapsed:.3f}s",
    ]
    _emit(args, payload, lines)
    return status


# ---------------------------------------------------------------------------
# reduce

def cmd_reduce(args) -> int:
    system = _load(args.system)
    if args.direction == "to-re":
        f = _formula(args.formula, "plus")
        new_sys, new_f = to_point_based(system, f)
    else:
        f = _formula(args.formula, "re")
        try:
            new_sys, new_f = to_regular_labelling(system, f)
        except ValueError as e:
            raise _UsageError(str(e))

    sys_text = format_system(new_sys)
    f_text = format_formula(new_f)
    assert format_system(parse_system(sys_text)) == sys_text
    reparse = parse_re if args.direction == "to-re" else parse_plus
    assert format_formula(reparse(f_text)) == f_text

    if args.out:
        with open(args.out + ".isrl", "w") as fh:
            fh.write(sys_text)
        with open(args.out + ".formula", "w") as fh:
            fh.write(f_text + "\n")
        print(f"wrote {args.out}.isrl and {args.out}.formula")
    else:
        print(sys_text, end="" if sys_text.endswith("\n") else "\n")
        print(f"formula: {f_text}")
    return EXIT_HOLDS


# ---------------------------------------------------------------------------
# classify / stats

def cmd_classify(args) -> int:
    system = _load(args.system)
    shapes = {
        var: language_shape(system.dfa_for(var)) for var in sorted(system.variables)
    }
    _emit(args, shapes, [f"{var}: {shape}" for var, shape in sorted(shapes.items())])
    return EXIT_HOLDS


def cmd_stats(args) -> int:
    system = _load(args.system)
    f = _formula(args.formula, args.logic)
    if args.logic == "re":
        used = sorted(variables_of(f))
    else:
        missing = sorted(variables_of(f) - set(system.variables))
        if missing:
            raise _UsageError(f"unknown variable {missing[0]!r}")
    try:
        fragment = fragment_of(f)
    except FragmentError:
        fragment = Fragment.FULL
    dfa_sizes = {
        var: len(system.dfa_for(var).states) for var in sorted(system.variables)
    }
    shapes = {
        var: language_shape(system.dfa_for(var)) for var in sorted(system.variables)
    }
    try:
        literal = fis_bound_saturating(system, f, _DISPLAY_CAP)
        tight = tight_bound_saturating(system, f, _DISPLAY_CAP)
        literal_text, tight_text = _bound_display(literal), _bound_display(tight)
    except FragmentError as e:
        literal_text = tight_text = f"undefined ({e})"

    payload = {
        "configurations": len(system.all_configs),
        "reachable": len(system.reachable),
        "dfa_states": dfa_sizes,
        "shapes": shapes,
        "fragment": fragment.value,
        "interval_type_bound": literal_text,
        "interval_type_bound_tight": tight_text,
    }
    lines = [
        f"configurations: {len(system.all_configs)}",
        f"reachable: {len(system.reachable)}",
    ]
    for var in sorted(system.variables):
        lines.append(f"variable {var}: {dfa_sizes[var]} dfa states, {shapes[var]}")
    lines += [
        f"fragment: {fragment.value}",
        f"interval-type bound: {literal_text}",
        f"interval-type bound (tight): {tight_text}",
    ]
    _emit(args, payload, lines)
    return EXIT_HOLDS


# ---------------------------------------------------------------------------
# export-dot

def cmd_export_dot(args) -> int:
    system = _load(args.system)
    what = args.what
    if what == "tg":
        print(tg_to_dot(system))
        return EXIT_HOLDS
    if what.startswith("automaton:"):
        var = what.split(":", 1)[1]
        if var not in system.variables:
            raise _UsageError(f"unknown variable {var!r}")
        print(dfa_to_dot(system.dfa_for(var)))
        return EXIT_HOLDS
    if what.startswith("mct:"):
        rest = what.split(":", 1)[1]
        formula_text, sep, horizon_text = rest.rpartition(":")
        if not sep:
            raise _UsageError("mct target needs mct:FORMULA:HORIZON")
        try:
            horizon = int(horizon_text)
        except ValueError:
            raise _UsageError(f"bad horizon {horizon_text!r}")
        f = _formula(formula_text, args.logic)
        interval = _interval(system, args.interval)
        try:
            print(mct_to_dot(compute_mct(system, interval, f, horizon)))
        except (FragmentError, ValueError) as e:
            raise _UsageError(str(e))
        return EXIT_HOLDS
    raise _UsageError(f"unknown export target {what!r}")


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="ehsmc",
        description="Model checker for epistemic interval temporal logic "
        "over interpreted systems with regular labellings.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, formula=True):
        p.add_argument("system", help="system description file")
        if formula:
            p.add_argument("formula", help="formula text or file")
        p.add_argument(
            "--logic", choices=["plus", "re"], default="plus",
            help="formula syntax: plain variables or regex atoms",
        )
        p.add_argument("--json", action="store_true", help="machine-readable output")

    check = sub.add_parser("check", help="evaluate a formula on an interval")
    common(check)
    check.add_argument(
        "--interval", help="configuration aliases, e.g. 'g1,g2,g3' (default: "
        "the initial point interval)",
    )
    check.add_argument(
        "--engine", choices=["auto", "bde", "abln", "oracle"], default="auto",
    )
    check.add_argument(
        "--mode", choices=["literal", "tight"],
        help="bound mode for the bounded engine (default literal)",
    )
    check.add_argument(
        "--bound", type=int,
        help="fixed search cap (bounded engine) or extra growth beyond the "
        "minimal anchoring (oracle engine, default 6)",
    )
    check.add_argument(
        "--all-initial", action="store_true",
        help="check [A] FORMULA at the initial point interval",
    )
    check.add_argument(
        "--frontier-ceiling", type=int, default=10**7,
        help="feasibility guard ceiling for computed bound modes",
    )
    check.set_defaults(fn=cmd_check)

    oracle = sub.add_parser("oracle", help="check with the enumerating oracle")
    common(oracle)
    oracle.add_argument("--interval")
    oracle.add_argument("--bound", type=int)
    oracle.add_argument("--all-initial", action="store_true")
    oracle.set_defaults(
        fn=cmd_check, engine="oracle", mode=None, frontier_ceiling=10**7
    )

    reduce_p = sub.add_parser("reduce", help="translate between surface logics")
    reduce_p.add_argument("system")
    reduce_p.add_argument("formula")
    reduce_p.add_argument(
        "--direction", choices=["to-re", "to-plus"], required=True,
        help="to-re: move labelling regexes into atoms; to-plus: fold atoms "
        "into fresh labelled variables",
    )
    reduce_p.add_argument("--out", help="output path prefix")
    reduce_p.set_defaults(fn=cmd_reduce)

    classify = sub.add_parser("classify", help="labelling shapes per variable")
    classify.add_argument("system")
    classify.add_argument("--json", action="store_true")
    classify.set_defaults(fn=cmd_classify)

    stats = sub.add_parser("stats", help="system and formula statistics")
    common(stats)
    stats.set_defaults(fn=cmd_stats)

    export = sub.add_parser("export-dot", help="DOT renderings")
    common(export, formula=False)
    export.add_argument(
        "what", help="tg | automaton:VAR | mct:FORMULA:HORIZON",
    )
    export.add_argument("--interval")
    export.set_defaults(fn=cmd_export_dot)

    return top


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _UsageError as e:
        print(f"error: {e}", file=_sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
