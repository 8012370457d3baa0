"""Iterated logarithms, tetration, superlogarithm, and the theorem checkers.

All logs are base 2 and clamped: ``log(x)`` means ``log2(max(1, x))``.

Real heights use the linear extension of tetration, ``tet(h) = h + 1`` on
(-1, 0] and ``tet(h) = 2**tet(h - 1)`` above.  The superlogarithm is its exact
inverse, so ``slog(y) = h + (y' - 1)`` where ``y'`` in (0, 1] is what remains
after peeling ``h`` logs off ``y``.  Fractional values of ``slog`` (and of
``s_frak``) depend on this choice; integer parts on towers do not.

Quantities too large for a Python int (``2↑↑6`` and beyond) are carried as
:class:`Tower` values.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Union

from .errors import BitCapError, DomainError, SpecError
from .gapscan import Family, GapFunction, Variant, _parse_params, lg

DEFAULT_BIT_CAP = 1 << 20
DEFAULT_MAGNITUDE_CAP_LOG2 = float(1 << 20)
TOL = 1e-9


@dataclass(frozen=True)
class Tower:
    """The value 2^2^...^top with ``height`` exponentiations applied to ``top``."""

    height: int
    top: float = 1.0

    def __post_init__(self):
        if self.height < 0:
            raise DomainError("tower height must be >= 0")


Number = Union[int, float, Tower]


def tower(n: int) -> Tower:
    """2↑↑n in log-domain form."""
    return Tower(n, 1.0)


def _as_float(v: Number) -> float:
    """Float value, or inf when it does not fit."""
    if isinstance(v, Tower):
        x = float(v.top)
        for _ in range(v.height):
            if x > 1100:
                return math.inf
            x = 2.0 ** x
        return x
    try:
        return float(v)
    except OverflowError:
        return math.inf


def _log2(v: Number) -> Number:
    if isinstance(v, Tower):
        if v.height == 0:
            return lg(v.top)
        if v.height == 1:
            return float(v.top)
        return Tower(v.height - 1, v.top)
    if isinstance(v, int):
        return math.log2(v) if v > 1 else 0.0
    return lg(v)


def _check_nonneg(alpha: Number) -> None:
    if isinstance(alpha, Tower):
        if alpha.top < 0 and alpha.height == 0:
            raise DomainError(f"negative input {alpha}")
    elif alpha < 0:
        raise DomainError(f"negative input {alpha}")


def iterated_log(alpha: Number, k: int) -> Number:
    v = alpha
    for _ in range(k):
        v = _log2(v)
    return v


def log_star(alpha: Number) -> int:
    """Least k with log^[k](alpha) <= 1; log_star(0) == 0."""
    _check_nonneg(alpha)
    k, v = 0, alpha
    while _as_float(v) > 1:
        v = _log2(v)
        k += 1
    return k


def log_circled_star(alpha: Number) -> int:
    """Largest k with log^[k](alpha) >= k; 0 for alpha <= 1."""
    _check_nonneg(alpha)
    if _as_float(alpha) <= 1:
        return 0
    # {k : log^[k] >= k} is an initial segment of N
    k, v = 0, alpha
    while True:
        v = _log2(v)
        if _as_float(v) < k + 1:
            return k
        k += 1


def tetration2(h, bit_cap: int = DEFAULT_BIT_CAP):
    """2↑↑h.  Exact int for an int h >= 0, float for real h >= -1."""
    if h < -1:
        raise DomainError(f"tetration height must be >= -1, got {h}")
    if isinstance(h, int):
        if h == -1:
            return 0
        v = 1
        for _ in range(h):
            if v + 1 > bit_cap:
                raise BitCapError(f"2↑↑{h} has more than {bit_cap} bits")
            v = 1 << v
        return v
    h = float(h)
    if h <= 0:
        return h + 1
    return 2.0 ** tetration2(h - 1)


def slog2(y: Number) -> float:
    """Inverse of the linearly extended tetration, on y >= 1."""
    if _as_float(y) < 1:
        raise DomainError(f"slog2 is defined for y >= 1, got {y}")
    h, v = 0, y
    while _as_float(v) > 1:
        v = _log2(v)
        h += 1
    return h + (_as_float(v) - 1) if h else 0.0


def s_frak(n: float, tol: float = 1e-12) -> float:
    """The t >= 1 with t + slog2(t) == n, by bisection."""
    if n < 1:
        raise DomainError(f"s_frak is defined for n >= 1, got {n}")
    lo, hi = 1.0, float(n)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if mid + slog2(mid) < n:
            lo = mid
        else:
            hi = mid
    t = (lo + hi) / 2
    r = round(t)
    # snap to an integer root, which slog2 evaluates exactly on towers
    if abs(t - r) <= 1e-9 and r >= 1 and r + slog2(r) == n:
        return float(r)
    return t


# -- ambiguity budgets ----------------------------------------------------------

class BudgetFamily(enum.Enum):
    CONSTANT = "const"
    LOG = "log"
    SQRT_LOG = "sqrtlog"
    LOGLOG_OVER = "loglog"
    HALF_LOG3 = "log3"
    THIRD_LOG4 = "log4"
    LOG_CIRCLED_STAR = "lcstar"


@dataclass(frozen=True)
class AmbiguityBudget:
    """A j: N -> N+ ambiguity bound.  Values are clamped to at least 1.

    CONSTANT(k), LOG(d) = floor(d log(n+2)), SQRT_LOG(d) = floor(d(sqrt(log n)+1)),
    LOGLOG_OVER(d, k) = floor(d + loglog n / (2 log k)),
    HALF_LOG3(d) = floor(d + logloglog n / 2),
    THIRD_LOG4(d) = floor(d + log^[4] n / 3),
    LOG_CIRCLED_STAR(lam) = max(1, floor(log⊛(n) / lam)).
    """

    family: BudgetFamily
    d: int = 1
    k: float = 2
    lam: int = 6

    def __post_init__(self):
        if self.family is BudgetFamily.LOGLOG_OVER and not self.k > 1:
            raise DomainError(f"loglog budget needs k > 1, got {self.k}")
        if self.family is BudgetFamily.LOG and self.d < 1:
            raise DomainError("log budget needs d >= 1")
        if self.family is BudgetFamily.CONSTANT and self.d < 1:
            raise DomainError("constant budget needs k >= 1")
        if self.family is BudgetFamily.LOG_CIRCLED_STAR and self.lam < 1:
            raise DomainError("lcstar budget needs lambda >= 1")

    @classmethod
    def constant(cls, k: int) -> "AmbiguityBudget":
        return cls(BudgetFamily.CONSTANT, d=k)

    def __call__(self, n: int) -> int:
        return budget_eval(self, n)

    @property
    def spec(self) -> str:
        fam = self.family
        if fam is BudgetFamily.CONSTANT:
            return f"const:{self.d}"
        if fam is BudgetFamily.LOG_CIRCLED_STAR:
            return f"lcstar:lambda={self.lam}"
        if fam is BudgetFamily.LOGLOG_OVER:
            k = int(self.k) if float(self.k).is_integer() else self.k
            return f"loglog:d={self.d},k={k}"
        return f"{fam.value}:d={self.d}"

    def to_dict(self) -> dict:
        return {"family": self.family.name, "spec": self.spec}


def budget_eval(j: AmbiguityBudget, n: int) -> int:
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    fam, d = j.family, j.d
    if fam is BudgetFamily.CONSTANT:
        v = d
    elif fam is BudgetFamily.LOG:
        # floor(d*log2(n+2)) == max{e : 2^e <= (n+2)^d}, exactly
        v = ((n + 2) ** d).bit_length() - 1
    elif fam is BudgetFamily.SQRT_LOG:
        v = math.floor(d * (math.sqrt(lg(n)) + 1))
    elif fam is BudgetFamily.LOGLOG_OVER:
        v = math.floor(d + lg(lg(n)) / (2 * math.log2(j.k)))
    elif fam is BudgetFamily.HALF_LOG3:
        v = math.floor(d + lg(lg(lg(n))) / 2)
    elif fam is BudgetFamily.THIRD_LOG4:
        v = math.floor(d + lg(lg(lg(lg(n)))) / 3)
    else:
        v = log_circled_star(n) // j.lam
    return max(1, v)


def parse_budget(text: str) -> AmbiguityBudget:
    """'const:3', 'log:d=1', 'sqrtlog:d=2', 'loglog:d=1,k=2', 'log3:d=1',
    'log4:d=1', 'lcstar:lambda=6'."""
    name, _, rest = text.partition(":")
    try:
        fam = BudgetFamily(name.strip().lower())
    except ValueError:
        raise SpecError(f"unknown budget family {name!r}") from None
    if fam is BudgetFamily.CONSTANT:
        rest = rest.strip()
        if rest.startswith("k="):
            rest = rest[2:]
        try:
            return AmbiguityBudget.constant(int(rest))
        except ValueError:
            raise SpecError(f"constant budget needs an integer, got {text!r}") from None
    kw = _parse_params(rest, text)
    try:
        b = AmbiguityBudget(fam, d=int(kw.pop("d", 1)), k=kw.pop("k", 2),
                            lam=int(kw.pop("lambda", kw.pop("lam", 6))))
    except DomainError as exc:
        raise SpecError(str(exc)) from None
    if kw:
        raise SpecError(f"unexpected parameters {sorted(kw)} in {text!r}")
    return b


# -- iteration ------------------------------------------------------------------

@dataclass(frozen=True)
class Iterate:
    """F^[j](seed), held raw while it fits in a float and as log2 after."""

    log2: float
    value: float

    @property
    def raw(self) -> bool:
        return math.isfinite(self.value)


def iterate_gap_log2(f: GapFunction, j: int, seed: float,
                     cap_log2: float = DEFAULT_MAGNITUDE_CAP_LOG2) -> Iterate:
    if j < 0:
        raise DomainError(f"iteration count must be >= 0, got {j}")
    if not seed > 0:
        raise DomainError(f"seed must be > 0, got {seed}")
    x: Optional[float] = float(seed)
    y = math.log2(x)
    for _ in range(j):
        if x is not None:
            fx = f(x)
            if math.isfinite(fx) and fx < 2.0 ** 1000:
                x = fx
                y = math.log2(x) if x > 0 else -math.inf
                continue
            y = f.log2(x)
            x = None
        else:
            y = f.log2_from_log2(y)
        if y > cap_log2:
            raise OverflowError(f"iterate exceeds the magnitude cap 2^{cap_log2:g}")
    return Iterate(y, x if x is not None else math.inf)


def iterate_gap(f: GapFunction, j: int, seed: float,
                cap_log2: float = DEFAULT_MAGNITUDE_CAP_LOG2) -> float:
    """F^[j](seed).  Returns inf for values past float range but under the cap."""
    return iterate_gap_log2(f, j, seed, cap_log2).value


# -- checkers -------------------------------------------------------------------

def default_t_range(n0: int, upper: float = 1e6) -> List[float]:
    out, i = [], 0
    while True:
        t = n0 * 2 ** (i / 4)
        if t > upper:
            return out
        out.append(t)
        i += 1


def default_n_range(lo: int = 2, hi: int = 10**6) -> List[int]:
    """All n up to 4096, then a geometric grid, plus 2^e - 2, 2^e - 1, 2^e."""
    pts = set(range(lo, min(hi, 4096) + 1))
    i = 0
    while True:
        n = int(4096 * 2 ** (i / 16))
        if n > hi:
            break
        pts.add(n)
        i += 1
    e = 1
    while (1 << e) - 2 <= hi:
        pts.update(v for v in ((1 << e) - 2, (1 << e) - 1, 1 << e) if lo <= v <= hi)
        e += 1
    pts.add(hi)
    return sorted(p for p in pts if lo <= p <= hi)


def log_grid(lo_exp: int, hi_exp: int, per_octave: int = 4) -> List[int]:
    """Integers near 2^(e/per_octave) for e in [lo_exp*per_octave, hi_exp*per_octave]."""
    pts = {(1 << (e // per_octave)) * round(2 ** ((e % per_octave) / per_octave) * 1024) // 1024
           for e in range(lo_exp * per_octave, hi_exp * per_octave + 1)}
    return sorted(pts)


@dataclass
class TheoremCheckSpec:
    gap: GapFunction
    budget: AmbiguityBudget
    lam: int
    variant: Variant = Variant.META1
    beta: float = 1
    alpha: float = 1
    n_range: Sequence[int] = field(default_factory=lambda: default_n_range())
    c_range: Sequence[int] = field(default_factory=lambda: range(1, 65))
    t_range: Optional[Sequence[float]] = None

    def __post_init__(self):
        if self.beta < 1 or self.alpha < 1:
            raise DomainError("alpha and beta must be >= 1")
        if self.t_range is None:
            self.t_range = default_t_range(self.gap.n0)
        if not self.n_range or not self.c_range or not self.t_range:
            raise DomainError("sample ranges must be nonempty")

    def to_dict(self) -> dict:
        return {"gap": self.gap.to_dict(), "budget": self.budget.to_dict(),
                "lambda": self.lam, "variant": self.variant.name,
                "beta": _num(self.beta), "alpha": _num(self.alpha),
                "n_samples": len(self.n_range), "n_min": str(min(self.n_range)),
                "n_max": str(max(self.n_range)), "c_range": [min(self.c_range), max(self.c_range)],
                "t_samples": len(self.t_range)}


def _num(x):
    if isinstance(x, float) and x.is_integer() and abs(x) < 2**63:
        return int(x)
    return x


def closed_form_beta_alpha(gap: GapFunction, budget: AmbiguityBudget, lam: int):
    """(beta, alpha) from the containment proofs for the standard pairings."""
    fam, bf, d = gap.family, budget.family, budget.d
    if fam is Family.LINEAR and bf is BudgetFamily.LOG:
        # least integer greater than 2d log k + log lambda
        return math.floor(2 * d * math.log2(gap.k) + math.log2(lam)) + 1, 1
    if fam is Family.POWER and bf is BudgetFamily.LOGLOG_OVER:
        b = 2 ** (2 * d * math.log2(gap.k))
        return math.ceil(b - 1e-12), math.ceil(b - 1e-12)
    if fam is Family.N_LOG_N and bf is BudgetFamily.SQRT_LOG:
        k = gap.k
        b = d + d * math.log2(k) + d * lam + 3 * d * d * k * lam
        return math.ceil(b), math.ceil(b)
    if fam is Family.N_POW_LOG_N and bf is BudgetFamily.HALF_LOG3:
        return 2 ** 2 ** (2 * d), 1
    if fam is Family.EXP2 and bf is BudgetFamily.LOG_CIRCLED_STAR:
        # j(n) stays 1 until log⊛ n >= 2*lambda, so F^[j](j*lambda) = 2^lambda there
        return 1, 2 ** lam
    raise DomainError(f"no closed-form beta for {fam.name} with {bf.name}; pass beta explicitly")


def check_meta_conditions(f: GapFunction, spec: TheoremCheckSpec) -> dict:
    """Sample F's monotonicity, F(t) >= t + 2, and the variant's scaling law.

    Comparisons run on log2 values with absolute tolerance 1e-9.
    """
    ts = sorted(spec.t_range)
    if ts[0] < f.n0:
        raise DomainError(f"t samples must be >= n0 = {f.n0}")
    counter = {"monotone": [], "plus_two": [], "scaling": []}
    equal = 0
    prev = None
    for t in ts:
        ft = f.log2(t)
        if prev is not None and ft < prev[1] - TOL:
            counter["monotone"].append({"t": prev[0], "t_next": t})
        prev = (t, ft)
        if ft < math.log2(t + 2) - TOL:
            counter["plus_two"].append({"t": t, "log2_F": ft, "log2_t_plus_2": math.log2(t + 2)})
        for c in spec.c_range:
            lhs = math.log2(c) + ft  # log2(c * F(t))
            rhs = f.log2(c * t)      # log2(F(c * t))
            if abs(lhs - rhs) <= TOL:
                equal += 1
                continue
            bad = lhs < rhs if spec.variant is Variant.META1 else lhs > rhs
            if bad:
                counter["scaling"].append({"t": t, "c": c, "log2_cF_t": lhs, "log2_F_ct": rhs})
    samples = len(ts) * len(spec.c_range)
    cond = {name: {"pass": not rows, "counterexamples": len(rows), "first": rows[:5]}
            for name, rows in counter.items()}
    return {
        "gap": f.to_dict(),
        "variant": spec.variant.name,
        "scaling_law": "c*F(t) >= F(c*t)" if spec.variant is Variant.META1 else "c*F(t) <= F(c*t)",
        "t_range": [ts[0], ts[-1]], "t_samples": len(ts),
        "c_range": [min(spec.c_range), max(spec.c_range)],
        "conditions": cond,
        "scaling_equalities": equal,
        "scaling_all_equal": equal == samples,
        "pass": all(c["pass"] for c in cond.values()),
    }


def check_growth_bound(spec: TheoremCheckSpec) -> dict:
    """Check F^[j(n)](lambda) (META1) or F^[j(n)](j(n)*lambda) (META2) <= alpha*n^beta."""
    f, rows, worst = spec.gap, [], None
    inconclusive = []
    for n in spec.n_range:
        jn = budget_eval(spec.budget, n)
        seed = spec.lam if spec.variant is Variant.META1 else jn * spec.lam
        try:
            it = iterate_gap_log2(f, jn, seed)
        except OverflowError as exc:
            inconclusive.append({"n": str(n), "reason": str(exc)})
            continue
        rhs_log2 = math.log2(spec.alpha) + spec.beta * math.log2(n)
        if it.raw and isinstance(spec.beta, int) and spec.beta * n.bit_length() < 4096:
            ok = Fraction(it.value) <= Fraction(spec.alpha) * n ** spec.beta
        else:
            ok = it.log2 <= rhs_log2 + TOL
        ratio_log2 = it.log2 - rhs_log2
        if worst is None or ratio_log2 > worst[0]:
            worst = (ratio_log2, n, jn)
        if not ok:
            rows.append({"n": str(n), "j": jn, "log2_iterate": it.log2, "log2_bound": rhs_log2})
    return {
        "spec": spec.to_dict(),
        "samples": len(spec.n_range),
        "violations": len(rows),
        "first_violations": rows[:10],
        "inconclusive": inconclusive,
        "max_log2_ratio": worst[0] if worst else None,
        "max_ratio": 2.0 ** worst[0] if worst and worst[0] < 1000 else None,
        "max_ratio_at": {"n": str(worst[1]), "j": worst[2]} if worst else None,
        "pass": not rows and not inconclusive,
    }


def check_ilog_bounds(alphas: Iterable[Number]) -> dict:
    """log*(a) - log*(log*(a) + 1) - 1 <= log⊛(a) <= log*(a), as integers."""
    bad, count = [], 0
    for a in alphas:
        count += 1
        ls = log_star(a)
        lc = log_circled_star(a)
        lower = ls - log_star(ls + 1) - 1
        if not lower <= lc <= ls:
            bad.append({"alpha": _describe(a), "log_star": ls, "log_circled_star": lc, "lower": lower})
    return {"samples": count, "violations": bad, "pass": not bad}


def _describe(a: Number):
    if isinstance(a, Tower):
        return f"tower(height={a.height}, top={a.top})"
    return str(a) if isinstance(a, int) else a


def check_separation(n: int) -> dict:
    """log*(2↑↑n) - log⊛(2↑↑n) against the s_frak identity and slog(2n/3)."""
    if n < 2:
        raise DomainError(f"separation check needs n >= 2, got {n}")
    t = tower(n)
    ls, lc = log_star(t), log_circled_star(t)
    lhs = ls - lc
    s = s_frak(n)
    lemma_rhs = (s - math.floor(s)) + slog2(s)
    bound = slog2(2 * n / 3)
    consistent = abs(lhs - lemma_rhs) <= 1e-6 and lc == math.floor(s)
    return {
        "n": n, "log_star": ls, "log_circled_star": lc, "lhs": lhs,
        "s_frak": s, "floor_s_frak": math.floor(s), "lemma_rhs": lemma_rhs,
        "bound": bound, "lemma_consistent": consistent,
        "pass": consistent and lhs >= bound - TOL,
    }
