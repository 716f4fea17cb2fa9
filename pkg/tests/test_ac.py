from hypothesis import given
from hypothesis import strategies as st

from streamdict.ac import AcAutomaton, ac_offline_match, ac_step, naive_match

binary_text = st.binary(max_size=60).map(lambda b: bytes(97 + c % 3 for c in b))
patterns = st.lists(st.binary(min_size=1, max_size=6).map(lambda b: bytes(97 + c % 3 for c in b)), min_size=1, max_size=6)


def test_state_counts():
    assert AcAutomaton([b"a"]).num_states == 2
    assert AcAutomaton([b"he", b"she", b"his", b"hers"]).num_states == 10


def test_ushers():
    pats = [b"he", b"she", b"his", b"hers"]
    got = ac_offline_match(pats, b"ushers")
    assert got == [(4, 0), (4, 1), (6, 3)]


def test_offline_examples():
    assert ac_offline_match([b"ab"], b"abab") == [(2, 0), (4, 0)]
    assert ac_offline_match([b"x"], b"") == []
    assert ac_offline_match([b"ab", b"b"], b"ab") == [(2, 0), (2, 1)]
    assert ac_offline_match([b"aa"], b"aaa") == [(2, 0), (3, 0)]
    assert ac_offline_match([], b"abc") == []


def test_step_from_root_on_foreign_character():
    auto = AcAutomaton([b"ab"])
    assert ac_step(auto, 0, ord("z")) == (0, set())


def test_longest_output():
    auto = AcAutomaton([b"bc", b"abc"])
    s = 0
    for c in b"abc":
        s, _ = auto.step(s, c)
    assert auto.longest_output(s) == 1


@given(patterns, binary_text)
def test_matches_naive(pats, text):
    assert ac_offline_match(pats, text) == naive_match(pats, text)
