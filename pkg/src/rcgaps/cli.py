"""Command-line entry point.

Every subcommand builds a :class:`CommandResult`; ``--json`` prints it as
sorted-key JSON (no timing, so reruns are byte-identical), otherwise an
aligned table.  Exit codes: 0 PASS/DATA, 1 FAIL, 2 usage or domain error,
3 INCONCLUSIVE (including a hit search or enumeration cap).

``RCGAPS_OUTPUT=json`` makes JSON the default.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import dataclass
from typing import Any, List, Optional, Sequence, Tuple

from . import constset, gapscan, machinesim, starfns, targetset
from .errors import (BitCapError, CeilingError, DomainError, EnumerationCapError, SpecError,
                     TableRangeError)

ENV_OUTPUT = "RCGAPS_OUTPUT"
EXIT = {"PASS": 0, "DATA": 0, "FAIL": 1, "INCONCLUSIVE": 3}
EXIT_USAGE = 2


@dataclass
class CommandResult:
    command: str
    status: str  # PASS | FAIL | INCONCLUSIVE | DATA
    payload: Any
    elapsed_ms: int = 0

    def to_json(self) -> str:
        doc = {"command": self.command, "status": self.status, "payload": _jsonable(self.payload)}
        return json.dumps(doc, sort_keys=True, indent=2)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog.partition(' ')[2] or 'usage'}: {message}")


def _jsonable(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if isinstance(v, int):
        return v if abs(v) < 2**53 else str(v)
    if isinstance(v, float):
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf" if v < 0 else "nan")
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, range)):
        return [_jsonable(x) for x in v]
    if isinstance(v, starfns.Tower):
        return {"tower_height": v.height, "top": v.top}
    return str(v)


def parse_number(text: str):
    """'65536', '2.5', '2^64', '10^6', '1e6' or 'tower:6' (2↑↑6, log-domain)."""
    t = text.strip().lower()
    try:
        if t.startswith("tower:"):
            return starfns.tower(int(t[6:]))
        if "^" in t:
            base, _, exp = t.partition("^")
            return int(base) ** int(exp)
        try:
            return int(t)
        except ValueError:
            v = float(t)
            return int(v) if v.is_integer() and "e" in t and abs(v) < 2**53 else v
    except ValueError:
        raise UsageError(f"not a number: {text!r}") from None


def _int_arg(text: str) -> int:
    v = parse_number(text)
    if not isinstance(v, int):
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    return v


# -- subcommands ----------------------------------------------------------------

def cmd_print(a) -> CommandResult:
    s = targetset.from_name(a.set)
    members = s.elements_up_to_length(a.length)
    return CommandResult("print", "DATA", {
        "set": s.name, "max_length": a.length, "count": len(members),
        "members": [str(v) for v in members]})


def cmd_gaps(a) -> CommandResult:
    s = targetset.from_name(a.set)
    f = gapscan.parse_gap(a.gap)
    if a.profile:
        rows = gapscan.successor_length_profile(s, a.max_length)
        return CommandResult("gaps", "DATA", {
            "set": s.name, "max_length": a.max_length,
            "profile": [{"m": str(m), "next": str(n), "len": lm, "next_len": ln}
                        for m, n, lm, ln in rows]})
    report = gapscan.verify_nongappy(s, f, a.max_length, a.ceiling)
    payload = report.to_dict()
    if a.plot:
        from .plotting import plot_successor_lengths
        payload["figure"] = plot_successor_lengths(report, f, a.plot)
    return CommandResult("gaps", "PASS" if report.passed else "FAIL", payload)


def cmd_mersenne(a) -> CommandResult:
    report = gapscan.mersenne_density_report(a.count, a.exponent_ceiling)
    payload = report.to_dict()
    payload["mu_at_exponents"] = [{"i": i, "exponent": p, "mu": report.mu_at(p)}
                                  for i, p in enumerate(report.exponents, 1)]
    if a.plot:
        from .plotting import plot_mersenne_density
        payload["figure"] = plot_mersenne_density(report, a.plot)
    return CommandResult("mersenne-density", "DATA", payload)


def cmd_constants(a) -> CommandResult:
    s = targetset.from_name(a.set)
    table = constset.build_constant_table(s, a.m, a.n0, a.ceiling)
    payload = table.to_dict()
    problems = constset.check_table_invariants(table, s)
    payload["invariant_problems"] = problems
    payload["acceptance_values"] = [str(constset.acceptance_value(table, k))
                                    for k in range(0, table.m + 1)]
    status = "DATA" if not problems else "FAIL"
    if a.gap or a.budget:
        if not (a.gap and a.budget and a.n is not None):
            raise UsageError("length-bound check needs --gap, --budget and --n together")
        res = constset.verify_length_bounds(table, gapscan.parse_gap(a.gap),
                                            starfns.parse_budget(a.budget), a.n)
        payload["length_bounds"] = res
        status = "PASS" if res["pass"] and not problems else "FAIL"
    if a.plot:
        from .plotting import plot_constant_lengths
        payload["figure"] = plot_constant_lengths(table, a.plot)
    return CommandResult("constants", status, payload)


def _machine_from_args(a, budget) -> Tuple[machinesim.ChoiceMachine, List[str]]:
    if a.divisors:
        return machinesim.divisor_machine(a.guess_length, budget), []
    if not a.spec:
        raise UsageError("need --spec FILE or --divisors")
    spec = machinesim.load_planted_spec(a.spec)
    gl = machinesim.infer_guess_length(spec, a.guess_length)
    return machinesim.make_planted_machine(spec, gl, budget, f"planted:{a.spec}"), sorted(spec)


def _table_for(a, s, budget, inputs) -> constset.ConstantTable:
    need = max([starfns.budget_eval(budget, len(x)) for x in inputs] or [1])
    return constset.build_constant_table(s, a.m or need, a.n0, a.ceiling)


def cmd_simulate(a) -> CommandResult:
    budget = starfns.parse_budget(a.budget)
    declared = starfns.parse_budget(a.declared_budget) if a.declared_budget else budget
    machine, keys = _machine_from_args(a, declared)
    inputs = a.input or keys
    if not inputs:
        raise UsageError("no inputs: pass --input")
    rows = []
    tm = None
    if a.set:
        s = targetset.from_name(a.set)
        tm = machinesim.rc_transform(machine, _table_for(a, s, budget, inputs), budget)
    mode = machinesim.Mode(a.mode)
    for x in inputs:
        row = {"input": x, "k": machinesim.count_accepting(machine, x, a.cap)}
        if tm is not None:
            row["j"] = tm.j(x)
            row["count"] = str(machinesim.count_transformed(tm, x, mode, a.cap))
        rows.append(row)
    payload = {"machine": machine.description, "mode": mode.value if tm else None, "rows": rows}
    if tm is not None:
        payload["table"] = tm.table.to_dict()
    return CommandResult("simulate", "DATA", payload)


def cmd_verify_rc(a) -> CommandResult:
    budget = starfns.parse_budget(a.budget)
    declared = starfns.parse_budget(a.declared_budget) if a.declared_budget else budget
    machine, keys = _machine_from_args(a, declared)
    inputs = a.input or keys
    if not inputs:
        raise UsageError("no inputs: pass --input")
    s = targetset.from_name(a.set)
    tm = machinesim.rc_transform(machine, _table_for(a, s, budget, inputs), budget)
    report = machinesim.verify_rc_membership(tm, s, inputs, machinesim.Mode(a.mode), a.cap)
    payload = report.to_dict()
    payload["counts"] = [str(c) for c in payload["counts"]]
    payload["budget"] = budget.to_dict()
    payload["table"] = tm.table.to_dict()
    return CommandResult("verify rc", report.verdict, payload)


_STAR = {
    "logstar": lambda x: starfns.log_star(x),
    "logcstar": lambda x: starfns.log_circled_star(x),
    "tet": lambda x: starfns.tetration2(x),
    "slog": lambda x: starfns.slog2(x),
    "sfrak": lambda x: starfns.s_frak(x),
}


def cmd_star(a) -> CommandResult:
    x = parse_number(a.x)
    if isinstance(x, starfns.Tower) and a.fn in ("tet", "sfrak"):
        raise UsageError(f"--fn {a.fn} needs a plain number")
    v = _STAR[a.fn](x)
    return CommandResult("star", "DATA", {"fn": a.fn, "x": a.x,
                                          "value": str(v) if isinstance(v, int) else v})


def cmd_check(a) -> CommandResult:
    what = a.what
    if what == "meta":
        f = gapscan.parse_gap(a.gap)
        spec = starfns.TheoremCheckSpec(
            f, starfns.AmbiguityBudget.constant(1), 6, f.variant,
            c_range=range(1, a.c_max + 1), t_range=starfns.default_t_range(f.n0, a.t_max))
        res = starfns.check_meta_conditions(f, spec)
    elif what == "growth":
        f = gapscan.parse_gap(a.gap)
        budget = starfns.parse_budget(a.budget)
        if a.beta is None or a.alpha is None:
            beta, alpha = starfns.closed_form_beta_alpha(f, budget, a.lam)
            beta = a.beta if a.beta is not None else beta
            alpha = a.alpha if a.alpha is not None else alpha
        else:
            beta, alpha = a.beta, a.alpha
        spec = starfns.TheoremCheckSpec(f, budget, a.lam, f.variant, beta, alpha,
                                        n_range=starfns.default_n_range(a.n_min, a.n_max))
        res = starfns.check_growth_bound(spec)
        if res["inconclusive"] and not res["violations"]:
            return CommandResult("check growth", "INCONCLUSIVE", res)
    elif what == "ilog":
        hi, pts = a.max, a.points
        grid = sorted({round(i * hi / (pts - 1)) for i in range(pts)})
        towers = [starfns.tetration2(n) for n in range(a.towers)] + [starfns.tower(a.towers)]
        res = starfns.check_ilog_bounds(grid + towers)
        res["grid"] = {"points": len(grid), "max": str(hi), "towers": f"2↑↑0..2↑↑{a.towers}"}
    else:
        rows = [starfns.check_separation(n) for n in (a.n or range(2, 7))]
        res = {"rows": rows, "pass": all(r["pass"] for r in rows)}
    return CommandResult(f"check {what}", "PASS" if res["pass"] else "FAIL", res)


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rcgaps", description="Constant-setting and nongappiness checks.")
    p.add_argument("--json", action="store_true", help="emit JSON instead of a table")
    p.add_argument("--table", action="store_true", help="force table output")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, json_flag=True):
        if json_flag:
            sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        return sp

    sp = common(sub.add_parser("print", help="list members up to a bit length"))
    sp.add_argument("--set", required=True)
    sp.add_argument("--length", type=_int_arg, required=True)
    sp.set_defaults(func=cmd_print)

    sp = common(sub.add_parser("gaps", help="F-nongappy scan or successor profile"))
    sp.add_argument("--set", required=True)
    sp.add_argument("--gap", default="add:c=1")
    sp.add_argument("--max-length", type=_int_arg, required=True)
    sp.add_argument("--ceiling", type=_int_arg)
    sp.add_argument("--profile", action="store_true")
    sp.add_argument("--plot", metavar="PATH")
    sp.set_defaults(func=cmd_gaps)

    sp = common(sub.add_parser("mersenne-density", help="Mersenne exponents and mu(L)"))
    sp.add_argument("--count", type=_int_arg, default=12)
    sp.add_argument("--exponent-ceiling", type=_int_arg,
                    default=targetset.DEFAULT_EXPONENT_CEILING)
    sp.add_argument("--plot", metavar="PATH")
    sp.set_defaults(func=cmd_mersenne)

    sp = common(sub.add_parser("constants", help="build a constant table"))
    sp.add_argument("--set", required=True)
    sp.add_argument("--m", type=_int_arg, required=True)
    sp.add_argument("--n0", type=_int_arg, default=1)
    sp.add_argument("--ceiling", type=_int_arg)
    sp.add_argument("--gap")
    sp.add_argument("--budget")
    sp.add_argument("--n", type=_int_arg)
    sp.add_argument("--plot", metavar="PATH")
    sp.set_defaults(func=cmd_constants)

    def machine_args(sp):
        sp.add_argument("--spec", help="planted spec JSON file")
        sp.add_argument("--divisors", action="store_true",
                        help="accept guesses that divide the input, both read in binary")
        sp.add_argument("--guess-length", type=_int_arg, default=1)
        sp.add_argument("--budget", default="const:3")
        sp.add_argument("--declared-budget")
        sp.add_argument("--input", action="append")
        sp.add_argument("--m", type=_int_arg)
        sp.add_argument("--n0", type=_int_arg, default=1)
        sp.add_argument("--ceiling", type=_int_arg)
        sp.add_argument("--mode", choices=[m.value for m in machinesim.Mode], default="analytic")
        sp.add_argument("--cap", type=_int_arg, default=machinesim.DEFAULT_ENUM_CAP)

    sp = common(sub.add_parser("simulate", help="count accepting paths"))
    machine_args(sp)
    sp.add_argument("--set", help="also count the transformed machine over this set")
    sp.set_defaults(func=cmd_simulate)

    vp = sub.add_parser("verify", help="verification commands")
    vsub = vp.add_subparsers(dest="target", required=True, parser_class=_Parser)
    sp = common(vsub.add_parser("rc", help="restricted-counting membership"))
    machine_args(sp)
    sp.add_argument("--set", required=True)
    sp.set_defaults(func=cmd_verify_rc)

    sp = common(sub.add_parser("star", help="log*, log-circled-star, tet, slog, s_frak"))
    sp.add_argument("--fn", choices=sorted(_STAR), required=True)
    sp.add_argument("--x", required=True)
    sp.set_defaults(func=cmd_star)

    cp = sub.add_parser("check", help="theorem checkers")
    csub = cp.add_subparsers(dest="what", required=True, parser_class=_Parser)
    sp = common(csub.add_parser("meta", help="gap-function conditions"))
    sp.add_argument("--gap", required=True)
    sp.add_argument("--t-max", type=float, default=1e6)
    sp.add_argument("--c-max", type=_int_arg, default=64)
    sp = common(csub.add_parser("growth", help="iterated gap vs alpha*n^beta"))
    sp.add_argument("--gap", required=True)
    sp.add_argument("--budget", required=True)
    sp.add_argument("--lambda", dest="lam", type=_int_arg, default=6)
    sp.add_argument("--beta", type=float)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--n-min", type=_int_arg, default=2)
    sp.add_argument("--n-max", type=_int_arg, default=10**6)
    sp = common(csub.add_parser("ilog", help="log-circled-star sandwich"))
    sp.add_argument("--points", type=_int_arg, default=10**4)
    sp.add_argument("--max", type=_int_arg, default=10**6)
    sp.add_argument("--towers", type=_int_arg, default=6)
    sp = common(csub.add_parser("separation", help="log* minus log-circled-star on towers"))
    sp.add_argument("--n", type=_int_arg, action="append")
    for name in ("meta", "growth", "ilog", "separation"):
        csub.choices[name].set_defaults(func=cmd_check)
    return p


# -- rendering ------------------------------------------------------------------

def _flatten(d, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        else:
            yield key, v


def _cell(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return "" if v is None else str(v)


def render_table(result: CommandResult) -> str:
    payload = _jsonable(result.payload)
    lines = [f"{result.command}: {result.status}"]
    scalars, tables = [], []
    for key, v in _flatten(payload):
        if isinstance(v, list) and v and all(isinstance(r, dict) for r in v):
            tables.append((key, v))
        elif isinstance(v, list) and len(v) > 16:
            scalars.append((key, _cell(v[:16])[:-1] + f", ... {len(v) - 16} more]"))
        else:
            scalars.append((key, _cell(v)))
    w = max((len(k) for k, _ in scalars), default=0)
    lines += [f"  {k.ljust(w)}  {v}" for k, v in scalars]
    for key, rows in tables:
        cols = list(dict.fromkeys(c for r in rows for c in r))
        cells = [[_cell(r.get(c)) for c in cols] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        lines.append(f"\n{key}:")
        lines.append("  " + "  ".join(c.ljust(widths[i]) for i, c in enumerate(cols)))
        lines += ["  " + "  ".join(x.rjust(widths[i]) for i, x in enumerate(row)) for row in cells]
    return "\n".join(lines)


# -- entry ----------------------------------------------------------------------

def run(argv: Sequence[str]) -> Tuple[Optional[CommandResult], int, Optional[str]]:
    """Returns (result, exit code, error message for the diagnostic stream)."""
    t0 = time.perf_counter()
    try:
        args = build_parser().parse_args(list(argv))
        result = args.func(args)
    except (UsageError, DomainError, SpecError, TableRangeError, OSError, ValueError) as exc:
        return None, EXIT_USAGE, str(exc)
    except (CeilingError, EnumerationCapError, BitCapError, OverflowError) as exc:
        cmd = " ".join(filter(None, (args.command, getattr(args, "target", None),
                                     getattr(args, "what", None))))
        result = CommandResult(cmd, "INCONCLUSIVE", {"error": type(exc).__name__,
                                                      "message": str(exc)})
    result.elapsed_ms = int((time.perf_counter() - t0) * 1000)
    return result, EXIT[result.status], None


def _want_json(argv: Sequence[str]) -> bool:
    if "--json" in argv:
        return True
    if "--table" in argv:
        return False
    return os.environ.get(ENV_OUTPUT, "").lower() == "json"


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    result, code, err = run(argv)
    if err is not None:
        print(f"rcgaps: error: {err}", file=sys.stderr)
        return code
    if _want_json(argv):
        print(result.to_json())
    else:
        print(render_table(result))
        print(f"({result.elapsed_ms} ms)", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
