"""Short patterns: Aho-Corasick for the very short ones, head/tail splitting for the rest.

A pattern longer than 2L is split once for every tail length l with
L < l <= 2L. Reversed heads go into a z-fast trie and every head node is
coloured with (l, phi(tail)). Every L arrivals an exit-node query is
opened on the reversed text ending at the anchor i; its cost is spread
over the next L arrivals. For an arrival ell with ell - i in (L, 2L] the
lowest ancestor of the exit node coloured (ell - i, phi(t_{i+1}..t_ell))
is the longest head that completes a pattern ending at ell.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from .ac import AcAutomaton
from .krhash import FpParams, PrefixFpBuffer, fp_of_string
from .tries import ROOT, ColourOverlay, ExitSearch, ZFastTrie


@dataclass(frozen=True)
class HeadTail:
    head: bytes
    tail_len: int
    colour: tuple[int, int]
    pattern: int


@dataclass
class A1Counters:
    colour_queries: int = 0
    session_steps: int = 0
    late_sessions: int = 0
    late_steps: int = 0
    trie_events: int = 0
    ac_events: int = 0


class A1Plan:
    """Preprocessed structures shared by every A1 stream session.

    ``ids`` maps local pattern indices to the caller's ids (defaults to
    0..k-1). ``cap`` is the longest pattern length accepted.
    """

    def __init__(
        self,
        patterns: Sequence[bytes],
        params: FpParams,
        L: int,
        cap: int | None = None,
        ids: Sequence[int] | None = None,
        keep_strings: bool = True,
    ):
        self.params = params
        self.L = L
        self.patterns = list(patterns)
        self.ids = list(ids) if ids is not None else list(range(len(self.patterns)))
        if cap is not None and any(len(p) > cap for p in self.patterns):
            raise ValueError(f"pattern longer than the A1 cap {cap}")
        short = [i for i, p in enumerate(self.patterns) if len(p) <= 2 * L]
        self.short_local = short
        self.ac = AcAutomaton([self.patterns[i] for i in short])
        self.pairs: list[HeadTail] = []
        seen: set[tuple[bytes, tuple[int, int]]] = set()
        for i, pat in enumerate(self.patterns):
            if len(pat) <= 2 * L:
                continue
            for tl in range(L + 1, 2 * L + 1):
                head = pat[:-tl]
                colour = (tl, fp_of_string(pat[-tl:], params).value)
                if (head, colour) in seen:
                    continue
                seen.add((head, colour))
                self.pairs.append(HeadTail(head, tl, colour, i))
        self.trie = ZFastTrie([ht.head[::-1] for ht in self.pairs], params, keep_strings)
        self.overlay = ColourOverlay(self.trie.parent)
        self.witness: dict[tuple[int, tuple[int, int]], int] = {}
        for ht in self.pairs:
            node = self.trie.node_of[ht.head[::-1]]
            self.overlay.mark(node, ht.colour)
            self.witness[(node, ht.colour)] = ht.pattern
        self.overlay.freeze()
        self.colours = frozenset(ht.colour for ht in self.pairs)
        # colour fingerprints grouped by tail length, for a cheap pre-check
        self.colour_fps: list[frozenset[int]] = [frozenset()] * (2 * L + 1)
        for tl in range(L + 1, 2 * L + 1):
            self.colour_fps[tl] = frozenset(fp for t, fp in self.colours if t == tl)
        self.query_len = max((len(ht.head) for ht in self.pairs), default=0)
        self.max_steps = self.trie.comparison_bound(self.query_len) + 1
        self.budget = max(1, math.ceil(self.max_steps / L))
        self.trie_path = bool(self.pairs)

    @property
    def has_trie_path(self) -> bool:
        return self.trie_path

    @property
    def buffer_capacity(self) -> int:
        return self.query_len + 2 * self.L + 2

    @property
    def words(self) -> int:
        ac_words = 3 * self.ac.num_states + sum(len(g) for g in self.ac.goto)
        trie_words = 3 * self.trie.num_nodes + 2 * len(self.trie.handles)
        return ac_words + trie_words + 3 * self.overlay.total_marks


def a1_preprocess(
    patterns: Sequence[bytes],
    params: FpParams,
    L: int,
    kL: int,
    mode: str = "standard",
    keep_strings: bool = True,
) -> A1Plan:
    caps = {"standard": 2 * kL, "extended": 4 * kL}
    if mode not in caps:
        raise ValueError(f"unknown A1 mode {mode!r}")
    return A1Plan(patterns, params, L, caps[mode], keep_strings=keep_strings)


class A1Matcher:
    """Per-stream state of A1.

    Stand-alone use: ``arrive(c)``. When several matchers share one
    buffer the owner pushes the character and calls ``process(c)``.
    """

    def __init__(self, plan: A1Plan, buffer: PrefixFpBuffer | None = None):
        self.plan = plan
        self.own_buffer = buffer is None
        if buffer is None:
            buffer = PrefixFpBuffer(plan.buffer_capacity, plan.params)
        elif buffer.capacity < plan.buffer_capacity:
            raise ValueError("shared buffer too small for A1")
        self.buffer = buffer
        self.ac_state = 0
        self.session: ExitSearch | None = None
        self.session_anchor = -1
        self.exits: dict[int, int] = {0: ROOT}
        self.counters = A1Counters()
        self.last_longest: int | None = None
        self.ops = 0

    def arrive(self, c: int) -> list[int]:
        self.buffer.push(c)
        w = self.process(c)
        return [self.buffer.position] if w is not None else []

    def _open(self, i: int) -> None:
        buf = self.buffer
        length = min(self.plan.query_len, i)
        # signature of the reversed text ending at i, cut to h: phi(t_{i-h+1..i}).
        # The slots read stay in the buffer for the L arrivals a session lasts.
        val, ipw, size, p = buf._val, buf._ipow, buf._size, buf._p
        end_val = val[i % size]

        def sig(h: int) -> int:
            a = (i - h) % size
            return (end_val - val[a]) * ipw[a] % p

        self.session = self.plan.trie.open_session(sig, length)
        self.session_anchor = i

    def process(self, c: int) -> int | None:
        """Advance by one arrival; returns the local id of the longest match ending here."""
        plan = self.plan
        ac = plan.ac
        goto = ac.goto
        state = self.ac_state
        t = goto[state].get(c)
        while t is None:
            if state == 0:
                t = 0
                break
            state = ac.fail[state]
            ac.hops += 1
            t = goto[state].get(c)
        self.ac_state = t
        best = None
        longest = ac.longest[t]
        if longest is not None:
            best = plan.short_local[longest]
            self.counters.ac_events += 1
        if not plan.trie_path:
            self.ops = 1
            self.last_longest = best
            return best

        ops = 1
        L = plan.L
        buf = self.buffer
        ell = buf.position
        if ell % L == 0:
            if self.session is not None:
                self.counters.late_sessions += 1
            self._open(ell)
        session = self.session
        if session is not None:
            before = session.comparisons
            node = session.step(plan.budget)
            spent = session.comparisons - before
            self.counters.session_steps += spent
            ops += spent
            if spent and ell - self.session_anchor >= L:
                self.counters.late_steps += spent
            if node is not None:
                self.exits[self.session_anchor] = node
                self.exits.pop(self.session_anchor - 3 * L, None)
                self.session = None
        anchor = ((ell - L - 1) // L) * L
        if anchor >= 0:
            node = self.exits.get(anchor)
            if node is None:
                if ell > 2 * L:
                    self.counters.late_sessions += 1
            else:
                size = buf._size
                a = anchor % size
                tl = ell - anchor
                v = (buf._val[ell % size] - buf._val[a]) * buf._ipow[a] % buf._p
                ops += 1
                self.counters.colour_queries += 1
                # most windows carry no colour at all; skip the tree walk then
                if v in plan.colour_fps[tl]:
                    colour = (tl, v)
                    hit = plan.overlay.find(node, colour)
                    if hit is not None:
                        best = plan.witness[(hit, colour)]
                        self.counters.trie_events += 1
        self.ops = ops
        self.last_longest = best
        return best

    def longest_match_at(self) -> int | None:
        """Caller id of the longest pattern matched by the last arrival."""
        if self.last_longest is None:
            return None
        return self.plan.ids[self.last_longest]


def a1_arrive(state: A1Matcher, c: int) -> list[int]:
    return state.arrive(c)


def a1_longest_match_at(state: A1Matcher) -> int | None:
    return state.longest_match_at()
