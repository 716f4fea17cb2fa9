import random

import pytest

from gen import periodic, rand_bytes, same_tail_pair, same_tail_text
from streamdict.a2a import A2aMatcher, A2aPlan, ClassError, ModeError, a2a_arrive, a2a_longest_match_at, a2a_preprocess, required_count
from streamdict.ac import ac_offline_match


def events(plan, text):
    mt = A2aMatcher(plan)
    out = []
    for c in text:
        out.extend(a2a_arrive(mt, c))
    return mt, out


def longest_ends(pats, text):
    best = {}
    for e, i in ac_offline_match(pats, text):
        best[e] = max(best.get(e, 0), len(pats[i]))
    return best


def test_preprocess_example(params):
    p = b"ab" * 6
    plan = a2a_preprocess([p], params, 4)
    info = plan.info[0]
    assert (info.q_len, info.rho, info.count) == (8, 2, 3)
    assert plan.k_strings[info.k_id] == b"abab"
    assert required_count(4, 4, 2) == 1


def test_suffix_patterns_removed(params):
    short, longer = b"ab" * 6, b"z" + b"ab" * 6
    plan = A2aPlan([short, longer], params, 4)
    assert plan.patterns == [short]


def test_class_errors(params):
    with pytest.raises(ClassError):
        A2aPlan([b"ab" * 4], params, 4)  # not longer than 2kL
    with pytest.raises(ClassError):
        A2aPlan([b"abcdefghijkl"], params, 4)  # Q is aperiodic
    with pytest.raises(ClassError):
        A2aPlan([b"ab" * 6], params, 2, appendix=True)  # 12 is not a power of two


def test_arrive_examples(params):
    plan = A2aPlan([b"ab" * 6], params, 4)
    mt, ev = events(plan, b"xabababababab")
    assert ev == [13]
    assert list(mt.runs[0][-1]) == [2, 10, 5]
    assert events(plan, b"xababababzabab")[1] == []
    assert events(plan, b"")[1] == []


def test_standard_mode_rejects_longest_query(params):
    mt = A2aMatcher(A2aPlan([b"ab" * 6], params, 4))
    with pytest.raises(ModeError):
        a2a_longest_match_at(mt)


def test_one_k_two_periods(params):
    # "aabaa" has periods 3 and 4: one K string, two K groups
    pats = [b"aab" * 4 + b"xyzwv", b"aaba" * 3 + b"aabaa" + b"qrstu"]
    pats = [p for p in pats]
    plan = A2aPlan(pats, params, 5)
    assert len(plan.k_rho) == 2 and len(plan.k_table) == 1
    text = b"zz" + pats[0] + b"q" + pats[1] + b"aab" * 9
    _, ev = events(plan, text)
    assert ev == sorted(longest_ends(pats, text))


def test_random_standard(params):
    rng = random.Random(21)
    for _ in range(150):
        kL = rng.randint(2, 8)
        al = rng.choice([b"ab", b"abc"])
        us = [rand_bytes(rng, rng.randint(1, kL - 1), al) for _ in range(2)]
        pats = []
        for _ in range(rng.randint(1, 5)):
            u = rng.choice(us)
            n = rng.randint(2 * kL + 1, 10 * kL)
            pats.append(periodic(rng, u, n, rng.randint(1, kL), al))
        pats = [p for p in dict.fromkeys(pats) if len(p) > 2 * kL]
        try:
            plan = A2aPlan(pats, params, kL)
        except ClassError:
            continue
        text = bytearray()
        while len(text) < 400:
            r = rng.random()
            text += rng.choice(pats) if r < 0.3 else rng.choice(us) * rng.randint(1, 20) if r < 0.6 else rand_bytes(rng, 3, al)
        mt, ev = events(plan, bytes(text))
        assert ev == sorted(longest_ends(plan.patterns, bytes(text)))
        assert mt.max_probes <= 4


def test_appendix_longest(params):
    rng = random.Random(8)
    checked = 0
    for _ in range(100):
        kL, u, p_i, p_j = same_tail_pair(rng)
        pats = [p_i, p_j]
        plan = A2aPlan(pats, params, kL, appendix=True)
        assert [len(g) for gs in plan.tail_table.values() for g in gs] == [2]
        text = same_tail_text(rng, u, pats, 600)
        mt = A2aMatcher(plan)
        want = longest_ends(pats, text)
        for pos, c in enumerate(text, 1):
            mt.arrive(c)
            got = mt.longest_match_at()
            assert (len(pats[got]) if got is not None else None) == want.get(pos)
            checked += got is not None
    assert checked > 0


def test_appendix_only_shorter_present(params):
    u = b"abb"
    v = b"babaa"
    s = u * 30
    short = s[len(s) - 11 :] + v
    longer = s[len(s) - 27 :] + v
    plan = A2aPlan([short, longer], params, 5, appendix=True)
    mt = A2aMatcher(plan)
    for c in b"bb" + short:
        mt.arrive(c)
    assert plan.patterns[mt.longest_match_at()] == short
