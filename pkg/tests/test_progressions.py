import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from streamdict.krhash import PrefixFpBuffer, fp_of_string
from streamdict.progressions import MatchProgression, PeriodString, ProgressionStore, lemma4_candidate


def test_lemma4_examples():
    pr = MatchProgression(10, 16, 0, 1, 1)
    assert pr.positions(2) == [10, 12, 14, 16]
    assert lemma4_candidate(pr, 2, 2) == 14
    assert lemma4_candidate(pr, 2, 4) == 10
    assert lemma4_candidate(pr, 2, 5) is None
    assert lemma4_candidate(MatchProgression(7, 7, 0, 1, 1), 3, 3) is None


def test_period_string_shift(params):
    text = b"xy" + b"abc" * 20
    buf = PrefixFpBuffer(len(text) + 1, params)
    for c in text:
        buf.push(c)
    ps = PeriodString(fp_of_string(b"abc", params).value, 3, params)
    base = buf.prefix_state(2)
    for q in range(0, 15):
        assert ps.shift(base, q) == buf.prefix_state(2 + 3 * q)
        assert ps.power(q) == fp_of_string(b"abc" * q, params).value
    top = buf.prefix_state(2 + 3 * 14)
    for q in range(0, 15):
        assert ps.shift(top, -q) == buf.prefix_state(2 + 3 * (14 - q))


def store(params, rho=2):
    return ProgressionStore(PeriodString(0, rho, params))


def test_store_merges_runs(params):
    s = store(params)
    for x in (3, 5, 7, 11, 13):
        s.add(x, (0, 1, 1))
    assert [(p.fp, p.lp) for p in s.progs] == [(3, 7), (11, 13)]
    assert not s.add(5, (0, 1, 1))
    s.add(9, (0, 1, 1))  # out of order: joins the first run
    assert [(p.fp, p.lp) for p in s.progs][0] == (3, 9)
    s.add(1, (0, 1, 1))  # prepends
    assert s.progs[0].fp == 1
    s.add(20, (0, 1, 1), expire_before=10)
    assert [(p.fp, p.lp) for p in s.progs] == [(11, 13), (20, 20)]
    assert s.contains(13) and not s.contains(12)


def test_store_tags(params):
    s = store(params, 3)
    s.add(10, (0, 1, 1), tag=4)
    s.add(13, (0, 1, 1), tag=4)
    s.add(16, (0, 1, 1), tag=8)
    pr = s.progs[0]
    assert pr.first_tagged(4) == 10 and pr.first_tagged(5) == 16 and pr.first_tagged(9) is None
    with pytest.raises(ValueError):
        s.add(16, (0, 1, 1), tag=8)


@given(st.lists(st.integers(1, 80), max_size=40), st.integers(1, 5))
def test_store_represents_the_set(starts, rho):
    from streamdict.krhash import FpParams

    s = ProgressionStore(PeriodString(0, rho, FpParams.create(seed=1, table_size=16)))
    for x in starts:
        s.add(x, (0, 1, 1))
    covered = sorted(x for pr in s.progs for x in pr.positions(rho))
    assert set(covered) == set(starts)
    # every stored element is an added one and nothing is stored twice
    assert len(covered) == len(set(covered))
    assert all(pr.fp <= pr.lp for pr in s.progs)
    assert [pr.fp for pr in s.progs] == sorted(pr.fp for pr in s.progs)
