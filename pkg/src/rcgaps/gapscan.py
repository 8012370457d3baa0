"""Gap functions, nongappiness scans, and Mersenne density data.

A set S is F-nongappy when every member m has a larger member m' with
``bitlength(m') <= F(bitlength(m))``.  Scans here are finite: they cover an
explicit window of bit lengths and say so in their reports.

Every ``log`` inside a gap function is base 2 and clamped, ``log(max(1, t))``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import sympy

from .errors import CeilingError, DomainError, SpecError
from .targetset import (DEFAULT_EXPONENT_CEILING, DETERMINISTIC_PRIMALITY_LIMIT, Kind,
                        TargetSet, lucas_lehmer)

EULER_GAMMA = float(sympy.EulerGamma)
_FLOAT_LOG2_MAX = 1023.0
_TOL = 1e-9


def lg(t: float) -> float:
    """Base-2 log with the clamp log(max(1, t))."""
    return math.log2(t) if t > 1 else 0.0


class Family(enum.Enum):
    ADD_CONST = "add"
    LINEAR = "linear"
    N_LOG_N = "nlogn"
    POWER = "power"
    N_POW_LOG_N = "npowlogn"
    N_POW_LOG_POW_K = "npowlogk"
    EXP2 = "exp2"


class Variant(enum.Enum):
    META1 = "meta1"  # c*F(t) >= F(c*t)
    META2 = "meta2"  # c*F(t) <= F(c*t)


_META1_FAMILIES = {Family.ADD_CONST, Family.LINEAR}


def _default_n0(family: Family, k: float) -> int:
    if family is Family.ADD_CONST:
        return 1
    if family in (Family.LINEAR, Family.EXP2):
        return 2
    if family is Family.POWER:
        return max(2, math.ceil(2 ** (1 / (k - 1))))
    return 4


@dataclass(frozen=True)
class GapFunction:
    """One member of a parameterized gap-function family.

    ``k`` is the family parameter: the additive constant for ADD_CONST, the
    multiplier for LINEAR and N_LOG_N, the exponent for POWER and
    N_POW_LOG_POW_K.  It is ignored by N_POW_LOG_N and EXP2.  POWER
    accepts a real exponent; it is evaluated in float64.
    """

    family: Family
    k: float = 0
    n0: Optional[int] = None
    variant: Optional[Variant] = None

    def __post_init__(self):
        fam, k = self.family, self.k
        if fam is Family.ADD_CONST and (k < 0 or k != int(k)):
            raise DomainError(f"ADD_CONST needs a natural constant, got {k}")
        if fam is Family.LINEAR and (k < 2 or k != int(k)):
            raise DomainError(f"LINEAR needs a natural k >= 2, got {k}")
        if fam in (Family.N_LOG_N, Family.N_POW_LOG_POW_K) and (k < 1 or k != int(k)):
            raise DomainError(f"{fam.name} needs a natural k >= 1, got {k}")
        if fam is Family.POWER and not k > 1:
            raise DomainError(f"POWER needs a real k > 1, got {k}")
        if self.n0 is None:
            object.__setattr__(self, "n0", _default_n0(fam, k))
        if self.variant is None:
            object.__setattr__(self, "variant",
                               Variant.META1 if fam in _META1_FAMILIES else Variant.META2)
        if self.n0 < 1:
            raise DomainError(f"n0 must be >= 1, got {self.n0}")

    def __call__(self, t: float) -> float:
        fam, k = self.family, self.k
        try:
            if fam is Family.ADD_CONST:
                return t + k
            if fam is Family.LINEAR:
                return k * t
            if fam is Family.N_LOG_N:
                return k * t * lg(t)
            if fam is Family.POWER:
                return float(t) ** k
            if fam is Family.N_POW_LOG_N:
                return float(t) ** lg(t)
            if fam is Family.N_POW_LOG_POW_K:
                return float(t) ** (lg(t) ** k)
            return 2.0 ** t
        except OverflowError:
            return math.inf

    def log2(self, t: float) -> float:
        """log2(F(t)) without forming F(t); -inf when F(t) == 0."""
        fam, k = self.family, self.k
        if fam is Family.EXP2:
            return float(t)
        if fam is Family.ADD_CONST:
            return math.log2(t + k) if t + k > 0 else -math.inf
        if t <= 0:
            return -math.inf
        lt = math.log2(t)
        if fam is Family.LINEAR:
            return math.log2(k) + lt
        if fam is Family.N_LOG_N:
            return math.log2(k) + lt + math.log2(lg(t)) if t > 1 else -math.inf
        if fam is Family.POWER:
            return k * lt
        if fam is Family.N_POW_LOG_N:
            return lg(t) * lt
        return lg(t) ** k * lt

    def log2_from_log2(self, y: float) -> float:
        """log2(F(t)) given y = log2(t), for t >= 2."""
        fam, k = self.family, self.k
        if fam is Family.ADD_CONST:
            return y if y > _FLOAT_LOG2_MAX else math.log2(2.0 ** y + k)
        if fam is Family.LINEAR:
            return math.log2(k) + y
        if fam is Family.N_LOG_N:
            return math.log2(k) + y + math.log2(y)
        if fam is Family.POWER:
            return k * y
        if fam is Family.N_POW_LOG_N:
            return y * y
        if fam is Family.N_POW_LOG_POW_K:
            return y ** (k + 1)
        try:
            return 2.0 ** y
        except OverflowError:
            return math.inf

    @property
    def spec(self) -> str:
        """Round-trippable text form, e.g. 'power:k=1.5,n0=2,variant=meta2'."""
        parts = []
        if self.family is Family.ADD_CONST:
            parts.append(f"c={_fmt_num(self.k)}")
        elif self.family not in (Family.N_POW_LOG_N, Family.EXP2):
            parts.append(f"k={_fmt_num(self.k)}")
        parts.append(f"n0={self.n0}")
        parts.append(f"variant={self.variant.value}")
        return f"{self.family.value}:" + ",".join(parts)

    def to_dict(self) -> dict:
        d = {"family": self.family.name, "k": _fmt_num(self.k), "n0": self.n0,
             "variant": self.variant.name, "spec": self.spec}
        if self.family is Family.POWER and self.k != int(self.k):
            d["evaluation"] = "float64; relative error about 1e-15 per application"
        return d


def _fmt_num(x):
    return int(x) if float(x).is_integer() else float(x)


def parse_gap(text: str) -> GapFunction:
    """Parse 'linear:k=2', 'power:k=1.5', 'add:c=1,n0=2', 'exp2', ..."""
    name, _, rest = text.partition(":")
    try:
        family = Family(name.strip().lower())
    except ValueError:
        raise SpecError(f"unknown gap family {name!r}") from None
    kw = _parse_params(rest, text)
    k = kw.pop("c", kw.pop("k", 0))
    n0 = kw.pop("n0", None)
    variant = kw.pop("variant", None)
    if kw:
        raise SpecError(f"unexpected parameters {sorted(kw)} in {text!r}")
    if family in (Family.LINEAR,) and k == 0:
        k = 2
    if family in (Family.N_LOG_N, Family.N_POW_LOG_POW_K) and k == 0:
        k = 1
    if family is Family.POWER and k == 0:
        raise SpecError("power needs k, e.g. 'power:k=2'")
    try:
        return GapFunction(family, float(k) if family is Family.POWER else int(float(k)),
                           None if n0 is None else int(n0),
                           None if variant is None else Variant(str(variant).lower()))
    except ValueError as exc:
        raise SpecError(str(exc)) from None


def _parse_params(rest: str, text: str) -> dict:
    kw = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise SpecError(f"expected key=value in {text!r}, got {item!r}")
        key = key.strip().lower()
        val = val.strip()
        if key == "variant":
            kw[key] = val
            continue
        try:
            kw[key] = int(val)
        except ValueError:
            try:
                kw[key] = float(val)
            except ValueError:
                raise SpecError(f"bad number {val!r} in {text!r}") from None
    return kw


# -- nongappiness ---------------------------------------------------------------

Pair = Tuple[int, int, int, int]


def successor_length_profile(s: TargetSet, max_length: int) -> List[Pair]:
    """(m, next member, |m|, |next|) for every member with |m| <= max_length."""
    if max_length < 1:
        raise DomainError(f"max_length must be >= 1, got {max_length}")
    members = s.elements_up_to_length(max_length)
    out = []
    for i, m in enumerate(members):
        nxt = members[i + 1] if i + 1 < len(members) else s.successor(m)
        out.append((m, nxt, m.bit_length(), nxt.bit_length()))
    return out


@dataclass
class NongappyReport:
    set_name: str
    gap: GapFunction
    length_range: Tuple[int, int]
    passed: bool
    witness_pairs: List[Pair] = field(default_factory=list)
    first_violation: Optional[dict] = None
    violations: int = 0
    below_threshold: List[Pair] = field(default_factory=list)
    empty_lengths: List[int] = field(default_factory=list)
    primality: Optional[str] = None

    def to_dict(self) -> dict:
        def pair(p):
            return {"m": str(p[0]), "next": str(p[1]), "len": p[2], "next_len": p[3]}
        return {
            "set": self.set_name,
            "gap": self.gap.to_dict(),
            "length_range": list(self.length_range),
            "pass": self.passed,
            "violations": self.violations,
            "first_violation": self.first_violation,
            "witness_pairs": [pair(p) for p in self.witness_pairs],
            "below_threshold": [pair(p) for p in self.below_threshold],
            "empty_lengths": self.empty_lengths,
            "primality": self.primality,
            "method": "largest member of each occupied length checked against its "
                      "successor; other members have a same-length successor",
        }


def verify_nongappy(s: TargetSet, f: GapFunction, max_length: int,
                    ceiling: Optional[int] = None) -> NongappyReport:
    """Check the F-nongappy condition for every member of length n0..max_length.

    Members shorter than ``f.n0`` are listed in ``below_threshold`` and never
    count as violations.
    """
    if max_length < f.n0:
        raise DomainError(f"max_length {max_length} is below the gap function's n0 {f.n0}")
    report = NongappyReport(s.name, f, (f.n0, max_length), True)
    if s.kind is Kind.PRIMES:
        report.primality = ("deterministic" if max_length < 64
                            else "deterministic below 2^64, BPSW probable-prime above")

    def fail(m, bound, actual, reason):
        report.violations += 1
        if report.first_violation is None:
            report.first_violation = {"m": str(m), "len": m.bit_length(),
                                      "required_max_len": _fmt_num(bound),
                                      "next_len": actual, "reason": reason}
        report.passed = False

    for length in range(1, max_length + 1):
        hi = s.greatest_element_leq((1 << length) - 1)
        if hi is None or hi.bit_length() < length:
            if length >= f.n0:
                report.empty_lengths.append(length)
            continue
        bound = f(length)
        try:
            nxt = s.successor(hi, ceiling)
        except CeilingError as exc:
            if length >= f.n0:
                fail(hi, bound, None, str(exc))
            continue
        pair = (hi, nxt, length, nxt.bit_length())
        if length < f.n0:
            report.below_threshold.append(pair)
            continue
        report.witness_pairs.append(pair)
        lo = s.least_element_geq(1 << (length - 1))
        if lo < hi and length > bound + _TOL:
            fail(lo, bound, length, "same-length successor exceeds F(|m|)")
        if nxt.bit_length() > bound + _TOL:
            fail(hi, bound, nxt.bit_length(), "successor too long")
    return report


# -- Mersenne prime density -----------------------------------------------------

@dataclass
class MersenneDensityReport:
    exponents: List[int]
    mu: List[Tuple[int, int]]
    reference_curve: List[Tuple[int, float]]
    successor_ratios: List[Tuple[int, int, float]]
    truncated: bool
    exponent_ceiling: int

    def mu_at(self, length: int) -> int:
        return sum(1 for p in self.exponents if p <= length)

    def to_dict(self) -> dict:
        return {
            "exponents": self.exponents,
            "count": len(self.exponents),
            "truncated": self.truncated,
            "exponent_ceiling": self.exponent_ceiling,
            "euler_gamma": EULER_GAMMA,
            "mu": [{"length": L, "mu": m} for L, m in self.mu],
            "reference_curve": [{"length": L, "e_gamma_log": v} for L, v in self.reference_curve],
            "successor_ratios": [{"len": a, "next_len": b, "log_ratio": r}
                                 for a, b, r in self.successor_ratios],
        }


def mersenne_density_report(count: int,
                            exponent_ceiling: int = DEFAULT_EXPONENT_CEILING) -> MersenneDensityReport:
    """First ``count`` Mersenne exponents found by Lucas-Lehmer, with the
    counting function mu(L), the e^gamma*log2(L) curve, and the ratios
    log|M_{i+1}| / log|M_i|.  No verdict: the density claim is conjectural.
    """
    if count < 2:
        raise DomainError(f"count must be >= 2, got {count}")
    exps: List[int] = []
    p = 2
    while len(exps) < count and p <= exponent_ceiling:
        if lucas_lehmer(p):
            exps.append(p)
        p += 1
    top = exps[-1] if exps else 1
    mu, running, it = [], 0, iter(exps)
    nxt = next(it, None)
    for L in range(1, top + 1):
        while nxt is not None and nxt <= L:
            running += 1
            nxt = next(it, None)
        mu.append((L, running))
    ref = [(L, math.exp(EULER_GAMMA) * lg(L)) for L in range(1, top + 1)]
    ratios = [(a, b, math.log(b) / math.log(a)) for a, b in zip(exps, exps[1:])]
    return MersenneDensityReport(exps, mu, ref, ratios, len(exps) < count, exponent_ceiling)


def describe_primality(values) -> str:
    big = any(v >= DETERMINISTIC_PRIMALITY_LIMIT for v in values)
    return "bpsw-probable above 2^64" if big else "deterministic"
