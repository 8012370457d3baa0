import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import FIXTURES
from oracles import subset_count
from rcgaps.constset import build_constant_table
from rcgaps.errors import EnumerationCapError, SpecError, TableRangeError
from rcgaps.machinesim import (Mode, count_accepting, count_transformed, divisor_machine,
                               infer_guess_length, load_planted_spec, make_planted_machine,
                               rc_transform, verify_rc_membership)
from rcgaps.starfns import AmbiguityBudget, parse_budget
from rcgaps.targetset import Kind, TargetSet

PRIMES = TargetSet(Kind.PRIMES)
MERSENNE = TargetSet(Kind.MERSENNE_PRIMES)
P_TABLE = build_constant_table(PRIMES, 6, n0=2)
M_TABLE = build_constant_table(MERSENNE, 5, n0=2)
CONST = AmbiguityBudget.constant


def _bits(g):
    return ["".join(b) for b in itertools.product("01", repeat=g)]


def test_planted_machine_examples():
    m = make_planted_machine({"01": ["101"]}, lambda n: 3, CONST(1))
    assert count_accepting(m, "01") == 1
    m = make_planted_machine({"0": [], "1": ["0", "1"]}, lambda n: 1, CONST(2))
    assert count_accepting(m, "0") == 0 and count_accepting(m, "1") == 2


def test_planted_machine_errors():
    with pytest.raises(SpecError, match="budget allows 2"):
        make_planted_machine({"111": ["00", "01", "10"]}, lambda n: 2, parse_budget("log:d=1"))
    with pytest.raises(SpecError, match="2-bit string"):
        make_planted_machine({"1": ["000"]}, lambda n: 2, CONST(3))
    with pytest.raises(SpecError, match="duplicate"):
        make_planted_machine({"1": ["00", "00"]}, lambda n: 2, CONST(3))


def test_divisor_machine_counts_divisors_of_twelve():
    assert count_accepting(divisor_machine(4, CONST(16)), "1100") == 6


def test_enumeration_cap():
    m = divisor_machine(30, CONST(1))
    with pytest.raises(EnumerationCapError):
        count_accepting(m, "1")


@pytest.mark.parametrize("k,expected", [(0, 0), (1, 2), (2, 5), (3, 11)])
def test_transform_counts_primes(k, expected):
    base = make_planted_machine({"x": _bits(2)[:k]}, lambda n: 2, CONST(3))
    tm = rc_transform(base, P_TABLE, CONST(3))
    for mode in Mode:
        assert count_transformed(tm, "x", mode) == expected


def test_transform_table_too_short():
    base = make_planted_machine({"x": ["0"]}, lambda n: 1, CONST(1))
    with pytest.raises(TableRangeError):
        count_transformed(rc_transform(base, P_TABLE, CONST(7)), "x")


def test_mode_caps_name_the_mode():
    base = divisor_machine(5, CONST(32))
    tm = rc_transform(base, P_TABLE, CONST(3))
    with pytest.raises(EnumerationCapError, match="ENUM_ALL_SUBSETS"):
        count_transformed(tm, "1", Mode.ENUM_ALL_SUBSETS)


@st.composite
def planted(draw):
    g = draw(st.integers(min_value=1, max_value=4))
    guesses = _bits(g)
    inputs = draw(st.lists(st.text("01", min_size=1, max_size=3), min_size=1, max_size=4,
                           unique=True))
    spec = {x: draw(st.lists(st.sampled_from(guesses), max_size=min(6, len(guesses)),
                             unique=True)) for x in inputs}
    return g, spec


@settings(max_examples=150, deadline=None)
@given(planted(), st.integers(min_value=1, max_value=6))
def test_three_routes_and_oracle_agree(gs, j):
    g, spec = gs
    base = make_planted_machine(spec, lambda n: g, CONST(6))
    tm = rc_transform(base, P_TABLE, CONST(j))
    c = list(P_TABLE.c)
    for x, ws in spec.items():
        counts = {mode: count_transformed(tm, x, mode) for mode in Mode}
        assert len(set(counts.values())) == 1
        assert counts[Mode.ANALYTIC] == subset_count(c, set(ws), _bits(g), j)


@settings(max_examples=60, deadline=None)
@given(planted())
def test_extra_rejecting_guesses_change_nothing(gs):
    g, spec = gs
    small = rc_transform(make_planted_machine(spec, lambda n: g, CONST(6)), P_TABLE, CONST(6))
    # one more guess bit: every old witness gets a 0 appended, the 1-suffixed half rejects
    wide_spec = {x: [w + "0" for w in ws] for x, ws in spec.items()}
    wide = rc_transform(make_planted_machine(wide_spec, lambda n: g + 1, CONST(6)),
                        P_TABLE, CONST(6))
    for x in spec:
        for mode in (Mode.ANALYTIC, Mode.ENUM_ACCEPTING_SUBSETS):
            assert count_transformed(small, x, mode) == count_transformed(wide, x, mode)


def test_verify_membership_primes_and_mersenne():
    spec = load_planted_spec(FIXTURES / "planted.json")
    base = make_planted_machine(spec, infer_guess_length(spec, 2), CONST(3))
    r = verify_rc_membership(rc_transform(base, P_TABLE, CONST(3)), PRIMES, sorted(spec))
    assert r.verdict == "PASS" and set(r.to_dict()["counts"]) == {0, 2, 5, 11}
    r = verify_rc_membership(rc_transform(base, M_TABLE, CONST(3)), MERSENNE, sorted(spec))
    assert r.verdict == "PASS" and set(r.to_dict()["counts"]) == {0, 3, 7, 31}


def test_budget_violation_is_flagged_not_fatal():
    base = make_planted_machine({"1": _bits(2)}, lambda n: 2, CONST(4))
    tm = rc_transform(base, P_TABLE, CONST(2))
    r = verify_rc_membership(tm, PRIMES, ["1"])
    row = r.rows[0]
    assert row.status == "budget_violation" and r.verdict == "INCONCLUSIVE"
    assert row.count == 2 * 4 + 1 * 6  # sum stops at j = 2


def test_cap_errors_are_inconclusive_rows():
    tm = rc_transform(divisor_machine(25, CONST(1)), P_TABLE, CONST(1))
    r = verify_rc_membership(tm, PRIMES, ["1"], cap=1 << 10)
    assert r.rows[0].status == "inconclusive" and r.verdict == "INCONCLUSIVE"


def test_composite_target_fails_membership():
    # the primes table lands on 5 at k=2, which is not composite
    base = make_planted_machine({"1": ["00", "01"]}, lambda n: 2, CONST(3))
    r = verify_rc_membership(rc_transform(base, P_TABLE, CONST(3)), TargetSet(Kind.COMPOSITES),
                             ["1"])
    assert r.verdict == "FAIL"


def test_planted_spec_loader_errors(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("[1, 2]")
    with pytest.raises(SpecError):
        load_planted_spec(p)
    p.write_text("{not json")
    with pytest.raises(SpecError):
        load_planted_spec(p)
