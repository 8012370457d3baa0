"""Bounded-ambiguity acceptors and the restricted-counting transform.

A :class:`ChoiceMachine` is a polynomial guess length plus a decidable
predicate on (input, guess); its accepting paths are the guesses it accepts.
The transform guesses i in 1..j(|x|) and a set of i distinct base paths,
and contributes c_i accepting paths when all of them accept.  Cloned paths
are counted, never materialized.

Three counting routes must agree:

* ANALYTIC: ``sum_{l <= min(k, j)} c_l * C(k, l)`` from k = #acc(x);
* ENUM_ACCEPTING_SUBSETS: walk subsets of accepting guesses only;
* ENUM_ALL_SUBSETS: walk subsets of *all* guesses, checking each.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from math import comb
from pathlib import Path
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional

from .constset import ConstantTable, binomial_sum
from .errors import EnumerationCapError, SpecError, TableRangeError
from .starfns import AmbiguityBudget, budget_eval
from .targetset import TargetSet

DEFAULT_ENUM_CAP = 1 << 24
ACCEPTING_SUBSET_LIMIT = 30
ALL_SUBSET_LIMIT = 20

GuessLength = Callable[[int], int]


class Mode(enum.Enum):
    ANALYTIC = "analytic"
    ENUM_ACCEPTING_SUBSETS = "accepting"
    ENUM_ALL_SUBSETS = "all"


@dataclass(frozen=True)
class ChoiceMachine:
    guess_length: GuessLength
    accept: Callable[[str, str], bool]
    declared_budget: AmbiguityBudget
    description: str = ""

    def guesses(self, x: str, cap: int = DEFAULT_ENUM_CAP) -> Iterable[str]:
        g = self.guess_length(len(x))
        if (1 << g) > cap:
            raise EnumerationCapError(f"{1 << g} guesses on input of length {len(x)} exceed cap {cap}")
        return ("".join(bits) for bits in itertools.product("01", repeat=g))

    def accepting(self, x: str, cap: int = DEFAULT_ENUM_CAP) -> List[str]:
        return [g for g in self.guesses(x, cap) if self.accept(x, g)]


PlantedSpec = Mapping[str, FrozenSet[str]]


def make_planted_machine(spec: Mapping[str, Iterable[str]], guess_length: GuessLength,
                         budget: AmbiguityBudget, description: str = "planted") -> ChoiceMachine:
    """A machine that accepts (x, g) exactly when g is a planted witness for x."""
    table: Dict[str, FrozenSet[str]] = {}
    for x, ws in spec.items():
        ws = list(ws)
        if len(set(ws)) != len(ws):
            raise SpecError(f"duplicate witnesses for input {x!r}")
        g = guess_length(len(x))
        for w in ws:
            if len(w) != g or set(w) - {"0", "1"}:
                raise SpecError(f"witness {w!r} for input {x!r} is not a {g}-bit string")
        bound = budget_eval(budget, len(x))
        if len(ws) > bound:
            raise SpecError(f"input {x!r} has {len(ws)} witnesses, budget allows {bound}")
        table[x] = frozenset(ws)
    return ChoiceMachine(guess_length, lambda x, g: g in table.get(x, ()), budget, description)


def load_planted_spec(path) -> Dict[str, List[str]]:
    """JSON object mapping input strings to lists of guess bit-strings."""
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise OSError(f"cannot read planted spec {str(path)!r}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise SpecError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(data, dict) or not all(
            isinstance(v, list) and all(isinstance(w, str) for w in v) for v in data.values()):
        raise SpecError(f"{path}: expected an object of input -> list of bit-strings")
    return data


def infer_guess_length(spec: Mapping[str, Iterable[str]], default: int) -> GuessLength:
    """Guess length per input length, read off the planted witnesses."""
    by_len: Dict[int, int] = {}
    for x, ws in spec.items():
        for w in ws:
            if by_len.setdefault(len(x), len(w)) != len(w):
                raise SpecError(f"inputs of length {len(x)} have witnesses of differing lengths")
    return lambda n: by_len.get(n, default)


def divisor_machine(guess_length: int, budget: AmbiguityBudget) -> ChoiceMachine:
    """Accepts guess g iff int(g, 2) is a nonzero divisor of int(x, 2)."""
    def accept(x: str, g: str) -> bool:
        d = int(g, 2)
        return d != 0 and int(x or "0", 2) % d == 0
    return ChoiceMachine(lambda n: guess_length, accept, budget, "divisors")


def count_accepting(machine: ChoiceMachine, x: str, cap: int = DEFAULT_ENUM_CAP) -> int:
    return sum(1 for g in machine.guesses(x, cap) if machine.accept(x, g))


@dataclass(frozen=True)
class TransformedMachine:
    base: ChoiceMachine
    table: ConstantTable
    budget: AmbiguityBudget

    def j(self, x: str) -> int:
        jn = budget_eval(self.budget, len(x))
        if jn > self.table.m:
            raise TableRangeError(f"j({len(x)}) = {jn} exceeds table length {self.table.m}")
        return jn


def rc_transform(base: ChoiceMachine, table: ConstantTable, j: AmbiguityBudget) -> TransformedMachine:
    return TransformedMachine(base, table, j)


def count_transformed(tm: TransformedMachine, x: str, mode: Mode = Mode.ANALYTIC,
                      cap: int = DEFAULT_ENUM_CAP) -> int:
    jn = tm.j(x)
    c = tm.table.c
    if mode is Mode.ANALYTIC:
        k = count_accepting(tm.base, x, cap)
        return binomial_sum(list(c), k, jn)
    if mode is Mode.ENUM_ACCEPTING_SUBSETS:
        acc = tm.base.accepting(x, cap)
        if len(acc) > ACCEPTING_SUBSET_LIMIT:
            raise EnumerationCapError(
                f"{mode.name}: {len(acc)} accepting paths exceed {ACCEPTING_SUBSET_LIMIT}")
        _check_subset_cap(len(acc), jn, cap, mode)
        total = 0
        for i in range(1, jn + 1):
            for _ in itertools.combinations(acc, i):
                total += c[i - 1]
        return total
    paths = list(tm.base.guesses(x, cap))
    if len(paths) > ALL_SUBSET_LIMIT:
        raise EnumerationCapError(f"{mode.name}: {len(paths)} guesses exceed {ALL_SUBSET_LIMIT}")
    _check_subset_cap(len(paths), jn, cap, mode)
    verdict = {g: tm.base.accept(x, g) for g in paths}
    total = 0
    for i in range(1, jn + 1):
        for subset in itertools.combinations(paths, i):
            if all(verdict[g] for g in subset):
                total += c[i - 1]
    return total


def _check_subset_cap(n: int, jn: int, cap: int, mode: Mode) -> None:
    work = sum(comb(n, i) for i in range(1, min(n, jn) + 1))
    if work > cap:
        raise EnumerationCapError(f"{mode.name}: {work} subsets exceed cap {cap}")


@dataclass
class MembershipRow:
    x: str
    k: Optional[int]
    count: Optional[int]
    member: Optional[bool]
    status: str  # pass | fail | budget_violation | inconclusive
    note: str = ""

    def to_dict(self) -> dict:
        return {"input": self.x, "k": self.k,
                "count": None if self.count is None else str(self.count),
                "member": self.member, "status": self.status, "note": self.note}


@dataclass
class MembershipReport:
    set_name: str
    rows: List[MembershipRow] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        statuses = {r.status for r in self.rows}
        if "fail" in statuses:
            return "FAIL"
        if statuses & {"inconclusive", "budget_violation"}:
            return "INCONCLUSIVE"
        return "PASS"

    def to_dict(self) -> dict:
        return {"set": self.set_name, "verdict": self.verdict,
                "counts": sorted({r.count for r in self.rows if r.count is not None}),
                "rows": [r.to_dict() for r in self.rows]}


def verify_rc_membership(tm: TransformedMachine, s: TargetSet, inputs: Iterable[str],
                         mode: Mode = Mode.ANALYTIC, cap: int = DEFAULT_ENUM_CAP) -> MembershipReport:
    """Rejected inputs must give count 0; accepted inputs a member of ``s``.

    An input whose base ambiguity exceeds j(|x|) or the machine's declared
    budget is flagged ``budget_violation`` rather than failed.
    """
    report = MembershipReport(s.name)
    for x in inputs:
        try:
            k = count_accepting(tm.base, x, cap)
            count = count_transformed(tm, x, mode, cap)
            jn = tm.j(x)
        except (EnumerationCapError, TableRangeError) as exc:
            report.rows.append(MembershipRow(x, None, None, None, "inconclusive", str(exc)))
            continue
        if k == 0:
            ok = count == 0
            report.rows.append(MembershipRow(x, k, count, None, "pass" if ok else "fail",
                                             "" if ok else "rejected input has accepting paths"))
            continue
        member = count > 0 and s.is_member(count)
        declared = budget_eval(tm.base.declared_budget, len(x))
        if k > jn or k > declared:
            report.rows.append(MembershipRow(x, k, count, member, "budget_violation",
                                             f"k={k} exceeds j={jn} or declared budget {declared}"))
            continue
        report.rows.append(MembershipRow(x, k, count, member, "pass" if member else "fail"))
    return report
