"""Enumerable target sets of positive integers.

Every builtin kind gives the access pattern that P-printability promises:
all members up to a bit length, and the least member at or above a bound.
Enumerated prefixes are cached per set behind a lock, so a single set
object can be shared between threads.
"""

from __future__ import annotations

import bisect
import enum
import threading
from pathlib import Path
from typing import Iterable, Iterator, List, Optional, Sequence

from sympy import isprime, nextprime, prevprime

from .errors import CeilingError, DomainError, SpecError

DETERMINISTIC_PRIMALITY_LIMIT = 1 << 64
DEFAULT_EXPONENT_CEILING = 10000
DEFAULT_CEILING_SLACK = 64
_SIEVE_LIMIT_BITS = 26


class Kind(enum.Enum):
    PRIMES = "primes"
    MERSENNE_PRIMES = "mersenne"
    COMPOSITES = "composites"
    POWERS_OF_TWO = "pow2"
    ODD_NUMBERS = "odd"
    FILE_BACKED = "file"


def lucas_lehmer(p: int) -> bool:
    """Return True iff 2**p - 1 is prime."""
    if p < 2:
        raise DomainError(f"Lucas-Lehmer needs p >= 2, got {p}")
    if p == 2:
        return True
    if not isprime(p):
        return False
    m = (1 << p) - 1
    s = 4
    for _ in range(p - 2):
        s = s * s - 2
        if s < 0:
            s += m
        # reduce mod 2^p - 1 without division
        while s > m:
            s = (s & m) + (s >> p)
        if s == m:
            s = 0
    return s == 0


def mersenne_exponents(ceiling: int = DEFAULT_EXPONENT_CEILING, start: int = 2) -> Iterator[int]:
    """Yield exponents p in [start, ceiling] with 2**p - 1 prime."""
    p = max(2, start)
    while p <= ceiling:
        if lucas_lehmer(p):
            yield p
        p += 1


def is_prime(v: int) -> bool:
    return bool(isprime(v))


def primality_certainty(v: int) -> str:
    """'deterministic' below 2**64, 'bpsw-probable' at or above it."""
    return "deterministic" if v < DETERMINISTIC_PRIMALITY_LIMIT else "bpsw-probable"


def _sieve(limit: int) -> List[int]:
    """Primes strictly below limit."""
    if limit < 3:
        return []
    bs = bytearray(b"\x01") * limit
    bs[0:2] = b"\x00\x00"
    for p in range(2, int(limit**0.5) + 1):
        if bs[p]:
            bs[p * p :: p] = bytes(len(range(p * p, limit, p)))
    return [i for i, flag in enumerate(bs) if flag]


class TargetSet:
    """A subset of the positive integers with ordered access.

    Use the module-level constructors (``TargetSet(Kind.PRIMES)``,
    :func:`load_target_set`, :func:`from_name`) rather than building
    FILE_BACKED sets by hand.
    """

    def __init__(self, kind: Kind, *, path: Optional[str] = None,
                 elements: Optional[Sequence[int]] = None):
        if (kind is Kind.FILE_BACKED) != (elements is not None):
            raise ValueError("elements are required exactly for FILE_BACKED sets")
        self.kind = kind
        self.path = path
        self._elements = tuple(elements) if elements is not None else None
        self._lock = threading.Lock()
        self._cache: List[int] = []
        self._frontier = 1  # every member below this is in _cache

    def __repr__(self):
        if self.kind is Kind.FILE_BACKED:
            return f"TargetSet(FILE_BACKED, path={self.path!r}, size={len(self._elements)})"
        return f"TargetSet({self.kind.name})"

    @property
    def name(self) -> str:
        if self.kind is Kind.FILE_BACKED:
            return f"file:{self.path}"
        return self.kind.value

    def default_ceiling(self, bound: int) -> int:
        if self.kind is Kind.MERSENNE_PRIMES:
            return DEFAULT_EXPONENT_CEILING
        return max(bound, 1).bit_length() + DEFAULT_CEILING_SLACK

    # -- membership ---------------------------------------------------------

    def __contains__(self, v: int) -> bool:
        return self.is_member(v)

    def is_member(self, v: int) -> bool:
        if v == 0:
            raise DomainError("0 is not a positive integer (S is a subset of N+)")
        if v < 0:
            raise DomainError(f"negative value {v}")
        k = self.kind
        if k is Kind.PRIMES:
            return is_prime(v)
        if k is Kind.COMPOSITES:
            return v >= 4 and not is_prime(v)
        if k is Kind.MERSENNE_PRIMES:
            if v & (v + 1):
                return False
            p = v.bit_length()
            return p >= 2 and lucas_lehmer(p)
        if k is Kind.POWERS_OF_TWO:
            return v & (v - 1) == 0
        if k is Kind.ODD_NUMBERS:
            return v & 1 == 1
        i = bisect.bisect_left(self._elements, v)
        return i < len(self._elements) and self._elements[i] == v

    # -- ordered access -----------------------------------------------------

    def least_element_geq(self, bound: int, ceiling: Optional[int] = None) -> int:
        """Least member >= bound.

        ``ceiling`` is the largest bit length the answer may have; for
        MERSENNE_PRIMES it is the exponent ceiling.
        """
        if bound < 0:
            raise DomainError(f"bound must be >= 0, got {bound}")
        if ceiling is None:
            ceiling = self.default_ceiling(bound)
        bound = max(bound, 1)
        k = self.kind
        if k is Kind.PRIMES:
            result = 2 if bound <= 2 else int(nextprime(bound - 1))
        elif k is Kind.COMPOSITES:
            result = max(bound, 4)
            while is_prime(result):
                result += 1
        elif k is Kind.MERSENNE_PRIMES:
            # 2^p - 1 >= bound  iff  p >= bound.bit_length()
            for p in mersenne_exponents(ceiling, start=bound.bit_length()):
                return (1 << p) - 1
            raise CeilingError(bound, ceiling)
        elif k is Kind.POWERS_OF_TWO:
            result = 1 << (bound - 1).bit_length()
        elif k is Kind.ODD_NUMBERS:
            result = bound | 1
        else:
            i = bisect.bisect_left(self._elements, bound)
            if i == len(self._elements):
                raise CeilingError(bound, self._elements[-1].bit_length() if self._elements else 0)
            result = self._elements[i]
        if result.bit_length() > ceiling:
            raise CeilingError(bound, ceiling)
        return result

    def greatest_element_leq(self, bound: int) -> Optional[int]:
        """Greatest member <= bound, or None when there is none."""
        if bound < 1:
            return None
        k = self.kind
        if k is Kind.PRIMES:
            if bound < 2:
                return None
            return bound if is_prime(bound) else int(prevprime(bound))
        if k is Kind.COMPOSITES:
            v = bound
            while v >= 4 and is_prime(v):
                v -= 1
            return v if v >= 4 else None
        if k is Kind.MERSENNE_PRIMES:
            p = (bound + 1).bit_length() - 1
            while p >= 2:
                if lucas_lehmer(p):
                    return (1 << p) - 1
                p -= 1
            return None
        if k is Kind.POWERS_OF_TWO:
            return 1 << (bound.bit_length() - 1)
        if k is Kind.ODD_NUMBERS:
            return bound if bound & 1 else bound - 1
        i = bisect.bisect_right(self._elements, bound)
        return self._elements[i - 1] if i else None

    def smallest_element_with_min_length(self, n0: int, ceiling: Optional[int] = None) -> int:
        """Least member whose binary length is at least n0."""
        if n0 < 1:
            raise DomainError(f"n0 must be >= 1, got {n0}")
        return self.least_element_geq(1 << (n0 - 1), ceiling)

    def elements_up_to_length(self, n: int) -> List[int]:
        """All members of bit length <= n, increasing."""
        if n < 0:
            raise DomainError(f"length must be >= 0, got {n}")
        limit = 1 << n
        with self._lock:
            if self._frontier < limit:
                self._extend(limit)
            return self._cache[: bisect.bisect_left(self._cache, limit)]

    def _extend(self, limit: int) -> None:
        if self.kind is Kind.PRIMES and limit <= 1 << _SIEVE_LIMIT_BITS:
            self._cache = _sieve(limit)
            self._frontier = limit
            return
        if self.kind is Kind.FILE_BACKED:
            self._cache = list(self._elements)
            self._frontier = limit
            return
        v = self._frontier
        while True:
            try:
                nxt = self.least_element_geq(v)
            except CeilingError:
                break
            if nxt >= limit:
                break
            self._cache.append(nxt)
            v = nxt + 1
        self._frontier = limit

    def successor(self, m: int, ceiling: Optional[int] = None) -> int:
        """Least member strictly greater than m."""
        return self.least_element_geq(m + 1, ceiling)

    def iter_from(self, bound: int) -> Iterator[int]:
        v = bound
        while True:
            v = self.least_element_geq(v)
            yield v
            v += 1


def parse_target_lines(lines: Iterable[str], source: str = "<input>") -> List[int]:
    values = set()
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            v = int(line, 10)
        except ValueError:
            raise SpecError(f"{source}:{lineno}: not a decimal integer: {line!r}") from None
        if v < 0:
            raise SpecError(f"{source}:{lineno}: negative value {v}")
        if v == 0:
            raise DomainError(f"{source}:{lineno}: 0 is not allowed (S is a subset of N+)")
        values.add(v)
    return sorted(values)


def load_target_set(path) -> TargetSet:
    """Read a FILE_BACKED set: one decimal integer per line, '#' comments."""
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise OSError(f"cannot read target set file {str(p)!r}: {exc.strerror}") from exc
    return TargetSet(Kind.FILE_BACKED, path=str(p),
                     elements=parse_target_lines(text.splitlines(), str(p)))


_ALIASES = {
    "primes": Kind.PRIMES,
    "mersenne": Kind.MERSENNE_PRIMES,
    "mersenne_primes": Kind.MERSENNE_PRIMES,
    "composites": Kind.COMPOSITES,
    "pow2": Kind.POWERS_OF_TWO,
    "powers_of_two": Kind.POWERS_OF_TWO,
    "odd": Kind.ODD_NUMBERS,
    "odd_numbers": Kind.ODD_NUMBERS,
}


def from_name(name: str) -> TargetSet:
    """'primes', 'mersenne', 'composites', 'pow2', 'odd' or 'file:PATH'."""
    if name.startswith("file:"):
        return load_target_set(name[5:])
    try:
        return TargetSet(_ALIASES[name.lower()])
    except KeyError:
        raise SpecError(f"unknown target set {name!r}") from None
