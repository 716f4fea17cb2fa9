import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from gen import a2b_instance, criterion1_trial, periodic, rand_bytes
from streamdict import (
    ConfigError,
    DictionaryPlan,
    EngineConfig,
    StreamOverflowError,
    engine_arrive,
    engine_build,
    engine_stats,
)
from streamdict.ac import ac_offline_match
from streamdict.engine import classify, heavy_op_ceiling, remove_suffix_patterns


def ends(pats, text):
    return sorted({e for e, _ in ac_offline_match(pats, text)})


def longest_witness(pats, text):
    best = {}
    for e, i in ac_offline_match(pats, text):
        cur = best.get(e)
        if cur is None or len(pats[i]) > len(pats[cur]):
            best[e] = i
    return best


def test_dedup_and_suffix_removal():
    assert DictionaryPlan([b"ab", b"ab"]).k == 1
    assert remove_suffix_patterns([b"cab", b"ab"]) == [1]
    assert remove_suffix_patterns([b"ab", b"ab", b"b", b"xa"]) == [2, 3]
    rng = random.Random(0)
    for _ in range(20):
        text = rand_bytes(rng, 200, b"abc")
        assert ends([b"cab", b"ab"], text) == ends([b"ab"], text)
        got = [ev.end for ev in engine_build([b"cab", b"ab"]).feed(text)]
        assert got == ends([b"ab"], text)


def test_threshold_example():
    rng = random.Random(1)
    long_ = rand_bytes(rng, 64, b"xyz")
    p30 = rand_bytes(rng, 30, b"xyz")
    p60 = b"ab" * 21 + rand_bytes(rng, 18, b"cd")
    plan = DictionaryPlan([long_, p30, p60])
    assert (plan.k, plan.L, plan.kL) == (3, 6, 18)
    assert classify(p30, 18) == "a1"
    assert classify(p60, 18) == "a2a"
    assert plan.groups["a2a"] == [2]


def test_config_errors():
    with pytest.raises(ConfigError):
        DictionaryPlan([])
    with pytest.raises(ConfigError):
        DictionaryPlan([b"a", b""])
    with pytest.raises(ConfigError):
        DictionaryPlan([b"abc"], EngineConfig(max_stream_len=2))
    with pytest.raises(ConfigError):
        DictionaryPlan([b"abc"], EngineConfig(mode="nope"))
    with pytest.raises(ConfigError):
        DictionaryPlan([b"abc"], EngineConfig(prime=101))
    with pytest.raises(ConfigError):
        DictionaryPlan([b"abcdefgh" * 4], EngineConfig(mode="a2a", override_L=1, override_kL=2))


def test_overflow():
    eng = engine_build([b"a"], EngineConfig(max_stream_len=3))
    for c in b"aaa":
        engine_arrive(eng, c)
    with pytest.raises(StreamOverflowError):
        engine_arrive(eng, 97)


def test_stats():
    eng = engine_build([b"ab", b"b"])
    st = engine_stats(eng)
    assert (st.arrivals, st.events, st.max_heavy_ops) == (0, 0, 0)
    words = st.words
    eng.feed(b"abab")
    st = engine_stats(eng)
    assert st.arrivals == 4 and st.events == 2 and st.words == words
    assert sum(st.heavy_ops_hist.values()) == 4


def test_same_end_gives_one_event():
    # both end at 5; "zzabc" has "abc" as a suffix, so the longest
    # pattern still available after deduplication is "abc"
    pats = [b"abc", b"xbc", b"zzabc"]
    eng = engine_build(pats)
    evs = eng.feed(b"zzabc")
    assert [(e.end, e.witness) for e in evs] == [(5, 0)]
    assert eng.plan.kept == [0, 1]


def test_mixed_classes_composite_stream():
    kL_probe = None
    for t in range(400):
        pats, text = criterion1_trial(t, n=3000)
        plan = DictionaryPlan(pats, EngineConfig(seed=1))
        if all(plan.class_counts[c] for c in ("a1", "a2a", "a2b")):
            kL_probe = plan.kL
            break
    assert kL_probe is not None
    eng = engine_build(pats, EngineConfig(seed=1))
    evs = eng.feed(text)
    want = longest_witness(pats, text)
    assert [e.end for e in evs] == sorted(want)
    for e in evs:
        w = pats[e.witness]
        assert e.witness in eng.plan.kept and text[e.end - len(w) : e.end] == w


@pytest.mark.parametrize("mode", ["auto", "a1", "levels", "oracle"])
def test_modes_agree_with_oracle(mode):
    for t in range(8):
        pats, text = criterion1_trial(t + 50, n=1500)
        pats = pats[:4]
        try:
            eng = engine_build(pats, EngineConfig(mode=mode, seed=t))
        except ConfigError:
            continue
        assert [e.end for e in eng.feed(text)] == ends(pats, text)


def test_a2a_and_a2b_modes():
    pats = [b"ab" * 10 + b"xyz"]
    eng = engine_build(pats, EngineConfig(mode="a2a", override_L=1, override_kL=3))
    text = b"q" + pats[0] + b"ab" * 11 + b"xyz"
    assert [e.end for e in eng.feed(text)] == ends(pats, text)
    rng = random.Random(4)
    kL, L, apats, atext = a2b_instance(rng, 800)
    eng = engine_build(apats, EngineConfig(mode="a2b", override_L=L, override_kL=kL))
    assert [e.end for e in eng.feed(atext)] == ends(apats, atext)


def test_heavy_op_ceiling_grows_slowly():
    assert heavy_op_ceiling(1, 1, 10) == pytest.approx(20.0)
    assert heavy_op_ceiling(32, 200, 10) < 4 * heavy_op_ceiling(1, 1, 10)


def test_plan_is_shared_between_sessions():
    plan = DictionaryPlan([b"abc", b"bcd"])
    from streamdict import StreamMatcher

    a, b = StreamMatcher(plan), StreamMatcher(plan)
    assert [e.end for e in a.feed(b"abcd")] == [3, 4]
    assert [e.end for e in b.feed(b"xbcd")] == [4]


@given(
    st.lists(st.binary(min_size=1, max_size=40).map(lambda b: bytes(97 + c % 2 for c in b)), min_size=1, max_size=6),
    st.binary(max_size=200).map(lambda b: bytes(97 + c % 2 for c in b)),
    st.integers(0, 2**32),
)
def test_property_engine_matches_oracle(pats, text, seed):
    eng = engine_build(pats, EngineConfig(seed=seed))
    assert [e.end for e in eng.feed(text)] == ends(pats, text)


@given(st.integers(0, 10**6))
def test_property_periodic_dictionaries(seed):
    rng = random.Random(seed)
    u = rand_bytes(rng, rng.randint(1, 3), b"ab")
    pats = [periodic(rng, u, rng.randint(20, 90), rng.randint(1, 30), b"ab") for _ in range(rng.randint(1, 3))]
    text = bytearray()
    while len(text) < 400:
        text += rng.choice(pats) if rng.random() < 0.3 else u * rng.randint(1, 20) + rand_bytes(rng, 2, b"ab")
    eng = engine_build(pats, EngineConfig(seed=seed, override_L=2))
    assert [e.end for e in eng.feed(bytes(text))] == ends(pats, bytes(text))
