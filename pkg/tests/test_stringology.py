import pytest
from hypothesis import given
from hypothesis import strategies as st

from streamdict.stringology import (
    build_ladder,
    failure_function,
    is_period,
    is_suffix,
    period_of,
    periodic_prefix_length,
    periodicity_check,
    prefix_periods,
    rounded_log2,
)


def brute_period(x: bytes) -> int:
    return next(p for p in range(1, len(x) + 1) if all(x[i] == x[i + p] for i in range(len(x) - p)))


def test_period_examples():
    assert period_of(b"aaaa").period == 1
    assert period_of(b"abaab").period == 3
    assert period_of(b"abc") == (3, False)
    assert period_of(b"abab").is_properly_periodic
    with pytest.raises(ValueError):
        period_of(b"")


@given(st.binary(min_size=1, max_size=40).map(lambda b: bytes(97 + c % 2 for c in b)))
def test_period_matches_brute_force(x):
    assert period_of(x).period == brute_period(x)
    assert prefix_periods(x) == [brute_period(x[: i + 1]) for i in range(len(x))]


def test_failure_function():
    assert failure_function(b"abab") == [0, 0, 1, 2]
    assert failure_function(b"") == []


def test_is_suffix_examples():
    assert is_suffix(b"ab", b"cab")
    assert is_suffix(b"ab", b"ab")
    assert not is_suffix(b"ba", b"cab")
    assert not is_suffix(b"cab", b"ab")


def test_rounded_log2():
    assert rounded_log2(64) == 6
    assert rounded_log2(1) == 1
    assert rounded_log2(200) == 8
    assert rounded_log2(3) == 2


def test_ladder_examples():
    assert build_ladder(b"x" * 100, 1, 10).lengths == [1, 2, 4, 8, 16, 32, 64]
    assert build_ladder(b"abcdefg", 1, 3).lengths == [1]
    ladder = build_ladder(b"ab" * 50, 1, 10)
    assert {r.length: r.period for r in ladder.rungs}[16] == 2
    with pytest.raises(ValueError):
        build_ladder(b"abc", 1, 2)


def test_periodicity_check_examples():
    assert periodicity_check(b"aaaa", 1, 2)
    assert periodicity_check(b"ababab", 2, 4)
    with pytest.raises(ValueError):
        periodicity_check(b"abaab", 3, 5)


@given(st.binary(min_size=2, max_size=30).map(lambda b: bytes(97 + c % 2 for c in b)))
def test_periodicity_lemma(x):
    periods = [p for p in range(1, len(x) + 1) if is_period(x, p)]
    for p1 in periods:
        for p2 in periods:
            if p1 + p2 <= len(x):
                assert periodicity_check(x, p1, p2)


def test_periodic_prefix_length():
    assert periodic_prefix_length(b"abababba", 2) == 6
    assert periodic_prefix_length(b"aaa", 1) == 3
    assert periodic_prefix_length(b"ab", 5) == 2
