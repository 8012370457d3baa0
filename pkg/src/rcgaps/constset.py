"""Iterative constant-setting over a target set.

Given c_1, the least member of S of bit length >= n0, each later constant is
chosen so that the running binomial sum lands in S::

    b_i = sum_{l < i} c_l * C(i, l)
    a_i = least member of S with a_i >= b_i
    c_i = a_i - b_i

so that ``sum_{l <= k} c_l * C(k, l) == a_k`` for every 2 <= k <= m.
All arithmetic is exact integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import List, Optional, Tuple

from .errors import CeilingError, TableRangeError
from .gapscan import GapFunction, Variant
from .starfns import AmbiguityBudget, budget_eval, iterate_gap_log2
from .targetset import TargetSet


@dataclass(frozen=True)
class ConstantTable:
    set_name: str
    n0: int
    lam: int
    a: Tuple[int, ...]  # a[0] is a_1 == c_1
    b: Tuple[int, ...]  # b[0] is b_2
    c: Tuple[int, ...]

    @property
    def m(self) -> int:
        return len(self.c)

    def b_at(self, i: int) -> int:
        """b_i for 2 <= i <= m."""
        if not 2 <= i <= self.m:
            raise TableRangeError(f"b_{i} is outside 2..{self.m}")
        return self.b[i - 2]

    def to_dict(self) -> dict:
        return {"set": self.set_name, "n0": self.n0, "lambda": self.lam, "m": self.m,
                "a": [str(v) for v in self.a], "b": [str(v) for v in self.b],
                "c": [str(v) for v in self.c]}

    @classmethod
    def from_dict(cls, d: dict) -> "ConstantTable":
        return cls(d.get("set", "?"), int(d["n0"]), int(d["lambda"]),
                   tuple(int(v) for v in d["a"]), tuple(int(v) for v in d["b"]),
                   tuple(int(v) for v in d["c"]))


def binomial_sum(c: List[int], k: int, upto: Optional[int] = None) -> int:
    """sum_{1 <= l <= min(k, upto)} c_l * C(k, l), with c[0] holding c_1."""
    top = k if upto is None else min(k, upto)
    return sum(c[l - 1] * comb(k, l) for l in range(1, top + 1))


def build_constant_table(s: TargetSet, m: int, n0: int = 1,
                         ceiling: Optional[int] = None) -> ConstantTable:
    if m < 1:
        raise ValueError(f"table length must be >= 1, got {m}")
    try:
        c1 = s.smallest_element_with_min_length(n0, ceiling)
    except CeilingError as exc:
        raise CeilingError(exc.bound, exc.ceiling, index=1) from None
    a, b, c = [c1], [], [c1]
    for i in range(2, m + 1):
        bi = binomial_sum(c, i, i - 1)
        try:
            ai = s.least_element_geq(bi, ceiling)
        except CeilingError as exc:
            raise CeilingError(exc.bound, exc.ceiling, index=i) from None
        a.append(ai)
        b.append(bi)
        c.append(ai - bi)
    return ConstantTable(s.name, n0, 4 + c1.bit_length(), tuple(a), tuple(b), tuple(c))


def acceptance_value(table: ConstantTable, k: int) -> int:
    """sum_{1 <= l <= k} c_l * C(k, l): 0 at k=0, c_1 at k=1, a_k for 2 <= k <= m."""
    if k < 0:
        raise ValueError(f"k must be >= 0, got {k}")
    if k > table.m:
        raise TableRangeError(f"k={k} exceeds table length {table.m}")
    return binomial_sum(list(table.c), k)


def check_table_invariants(table: ConstantTable, s: TargetSet) -> List[str]:
    """Recompute every b_i from the stored c-prefix and check the a/c relations."""
    problems = []
    c = list(table.c)
    if table.a[0] != c[0]:
        problems.append("a_1 != c_1")
    if table.lam != 4 + c[0].bit_length():
        problems.append("lambda != 4 + |c_1|")
    for i in range(2, table.m + 1):
        bi = binomial_sum(c, i, i - 1)
        if bi != table.b_at(i):
            problems.append(f"b_{i} does not match the recomputed sum")
        ai = table.a[i - 1]
        if table.c[i - 1] != ai - bi or table.c[i - 1] < 0:
            problems.append(f"c_{i} != a_{i} - b_{i}")
        if not s.is_member(ai):
            problems.append(f"a_{i} is not a member")
        prev = s.greatest_element_leq(ai - 1) if ai > 1 else None
        if prev is not None and prev >= bi:
            problems.append(f"member {prev} lies in [b_{i}, a_{i})")
    return problems


def verify_length_bounds(table: ConstantTable, f: GapFunction, j: AmbiguityBudget,
                         n: int) -> dict:
    """Compare max |c_l| for l <= j(n) with the metatheorem bound, and each
    |c_i| with F(|b_i|)."""
    jn = budget_eval(j, n)
    if table.m < jn:
        raise TableRangeError(f"table has {table.m} entries but j({n}) = {jn}")
    c1_len = table.c[0].bit_length()
    max_len = max(v.bit_length() for v in table.c[:jn])
    if f.variant is Variant.META1:
        factor, seed = jn, table.lam
        form = "j(n) * F^[j(n)](lambda) + |c_1|"
    else:
        factor, seed = 1, jn * table.lam
        form = "F^[j(n)](j(n) * lambda) + |c_1|"
    # inf once the iterate leaves float range; |c_l| is tiny next to it then
    bound = factor * iterate_gap_log2(f, jn, seed).value + c1_len
    steps = []
    for i in range(2, jn + 1):
        bi_len = table.b_at(i).bit_length()
        ci_len = table.c[i - 1].bit_length()
        fb = f(bi_len)
        steps.append({"i": i, "c_len": ci_len, "b_len": bi_len, "F_b_len": fb,
                      "pass": ci_len <= fb + 1e-9})
    return {
        "n": str(n), "j": jn, "variant": f.variant.name, "form": form,
        "gap": f.to_dict(), "budget": j.to_dict(), "lambda": table.lam,
        "max_c_len": max_len, "bound": bound,
        "bound_pass": max_len <= bound,
        "per_step": steps,
        "pass": max_len <= bound and all(s["pass"] for s in steps),
    }
