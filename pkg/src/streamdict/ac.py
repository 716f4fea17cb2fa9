"""Aho-Corasick automaton.

Used on the hot path for very short patterns and, offline, as the
ground-truth oracle every streaming algorithm is checked against.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence


class AcAutomaton:
    """Goto trie with failure links and failure-closed output sets.

    Transitions are kept in one dict per state. Goto misses are resolved
    by walking failure links (no materialized DFA), so the automaton stays
    at one entry per trie edge.
    """

    def __init__(self, patterns: Sequence[bytes]):
        self.patterns = list(patterns)
        self.goto: list[dict[int, int]] = [{}]
        self.fail: list[int] = [0]
        self.depth: list[int] = [0]
        self.out: list[tuple[int, ...]] = [()]
        own: list[list[int]] = [[]]
        for pid, pat in enumerate(self.patterns):
            if not pat:
                raise ValueError("patterns must be non-empty")
            s = 0
            for c in pat:
                nxt = self.goto[s].get(c)
                if nxt is None:
                    nxt = len(self.goto)
                    self.goto[s][c] = nxt
                    self.goto.append({})
                    self.fail.append(0)
                    self.depth.append(self.depth[s] + 1)
                    self.out.append(())
                    own.append([])
                s = nxt
            own[s].append(pid)

        order = deque()
        for s in self.goto[0].values():
            order.append(s)
        self.out[0] = tuple(own[0])
        while order:
            s = order.popleft()
            self.out[s] = tuple(own[s]) + self.out[self.fail[s]]
            for c, t in self.goto[s].items():
                f = self.fail[s]
                while f and c not in self.goto[f]:
                    f = self.fail[f]
                self.fail[t] = self.goto[f][c] if c in self.goto[f] and self.goto[f][c] != t else 0
                order.append(t)
        # longest output per state, ties to the smaller id
        self.longest: list[int | None] = [
            max(o, key=lambda i: (len(self.patterns[i]), -i)) if o else None for o in self.out
        ]
        self.hops = 0

    @property
    def num_states(self) -> int:
        return len(self.goto)

    def step(self, state: int, c: int) -> tuple[int, tuple[int, ...]]:
        goto, fail = self.goto, self.fail
        while True:
            t = goto[state].get(c)
            if t is not None:
                return t, self.out[t]
            if state == 0:
                return 0, ()
            state = fail[state]
            self.hops += 1

    def longest_output(self, state: int) -> int | None:
        return self.longest[state]


def ac_build(patterns: Iterable[bytes]) -> AcAutomaton:
    return AcAutomaton(list(patterns))


def ac_step(auto: AcAutomaton, state: int, c: int) -> tuple[int, set[int]]:
    state, outs = auto.step(state, c)
    return state, set(outs)


def ac_offline_match(patterns: Sequence[bytes], text: bytes) -> list[tuple[int, int]]:
    """All (end position, pattern id) occurrences, 1-based ends, sorted."""
    if not patterns:
        return []
    auto = AcAutomaton(patterns)
    found = []
    s = 0
    for pos, c in enumerate(text, 1):
        s, outs = auto.step(s, c)
        for pid in outs:
            found.append((pos, pid))
    found.sort()
    return found


def naive_match(patterns: Sequence[bytes], text: bytes) -> list[tuple[int, int]]:
    """Quadratic reference scan, independent of the automaton."""
    found = []
    for pid, pat in enumerate(patterns):
        m = len(pat)
        for end in range(m, len(text) + 1):
            if text[end - m : end] == pat:
                found.append((end, pid))
    found.sort()
    return found
