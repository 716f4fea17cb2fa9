"""Dictionary preprocessing and the streaming front end.

Patterns are deduplicated, patterns having another pattern as a proper
suffix are dropped (they end exactly where that suffix ends), and the
rest are split into classes with L = round(log2 m) and kL = k * L:

* |P| <= 2kL: A1 (which itself sends |P| <= 2L to Aho-Corasick);
* otherwise, Q = P minus its last kL characters with period < kL: A2a;
* otherwise A2b, unless the pattern has neither a D1 nor a D2 rung, in
  which case it is shorter than 6kL and goes to A1.

All sub-engines read one shared prefix-fingerprint buffer. Each arrival
yields at most one event: the position and the longest pattern (by the
caller's numbering) that ends there.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

from .a1 import A1Matcher, A1Plan
from .a2a import A2aMatcher, A2aPlan, ClassError
from .a2b import A2bMatcher, A2bPlan, a2b_layout
from .ac import AcAutomaton
from .krhash import DEFAULT_MAX_STREAM_LEN, MERSENNE61, FpParams, PrefixFpBuffer
from .stringology import is_suffix, period_of, rounded_log2

MODES = ("auto", "a1", "a2a", "a2b", "levels", "oracle")


class ConfigError(ValueError):
    pass


class StreamOverflowError(RuntimeError):
    """The stream grew past the configured maximum length N."""


@dataclass(frozen=True)
class EngineConfig:
    seed: int = 0
    prime: int = MERSENNE61
    max_stream_len: int = DEFAULT_MAX_STREAM_LEN
    mode: str = "auto"
    override_L: int | None = None
    override_kL: int | None = None
    keep_strings: bool = False
    check_prime_bound: bool = True


class MatchEvent(NamedTuple):
    end: int
    witness: int


@dataclass
class PatternPlan:
    id: int
    pattern: bytes
    cls: str
    q_len: int = 0
    q_period: int = 0


def remove_suffix_patterns(patterns: Sequence[bytes]) -> list[int]:
    """Indices of the distinct patterns that have no other pattern as a proper suffix.

    For duplicates the first index is kept.
    """
    first: dict[bytes, int] = {}
    for i, p in enumerate(patterns):
        first.setdefault(p, i)
    # a proper suffix of p is in the set iff some reversed pattern is a
    # proper prefix of reversed p; sorting reversed strings puts prefixes first
    rev = sorted((p[::-1], i) for p, i in first.items())
    keep = []
    stack: list[bytes] = []
    for r, i in rev:
        while stack and not r.startswith(stack[-1]):
            stack.pop()
        if not stack:
            keep.append(i)
        stack.append(r)
    return sorted(keep)


def classify(pattern: bytes, kL: int) -> str:
    if len(pattern) <= 2 * kL:
        return "a1"
    q = pattern[: len(pattern) - kL]
    if period_of(q).period < kL:
        return "a2a"
    if a2b_layout(pattern, kL) is None:
        return "a1"
    return "a2b"


@dataclass
class EngineStats:
    arrivals: int = 0
    events: int = 0
    max_heavy_ops: int = 0
    heavy_ops_hist: Counter = field(default_factory=Counter)
    words: int = 0
    buffer_capacity: int = 0
    buffer_occupancy: int = 0
    a2a_max_probes: int = 0
    max_progressions: int = 0
    max_level_progressions: int = 0
    collisions: int = 0
    classes: dict = field(default_factory=dict)


class DictionaryPlan:
    """Immutable preprocessing; any number of ``StreamMatcher`` sessions may share it."""

    def __init__(self, patterns: Sequence[bytes], config: EngineConfig | None = None):
        config = config or EngineConfig()
        if config.mode not in MODES:
            raise ConfigError(f"unknown mode {config.mode!r}")
        patterns = [bytes(p) for p in patterns]
        if not patterns:
            raise ConfigError("empty dictionary")
        if any(not p for p in patterns):
            raise ConfigError("empty pattern")
        if any(len(p) > config.max_stream_len for p in patterns):
            raise ConfigError("pattern longer than the maximum stream length")
        self.config = config
        self.patterns = patterns
        self.kept = remove_suffix_patterns(patterns)
        self.k = len(self.kept)
        self.m = max(len(patterns[i]) for i in self.kept)
        self.L = config.override_L if config.override_L is not None else rounded_log2(self.m)
        self.kL = config.override_kL if config.override_kL is not None else self.k * self.L
        if self.L < 1 or self.kL < 1:
            raise ConfigError("L and kL must be positive")
        m_all = max(len(p) for p in patterns)
        table = max(4096, 2 * m_all + 8 * self.kL)
        try:
            self.params = FpParams.create(
                seed=config.seed,
                p=config.prime,
                max_stream_len=config.max_stream_len,
                table_size=table,
                check_bound=config.check_prime_bound,
            )
        except ValueError as e:
            raise ConfigError(str(e)) from e

        self.pattern_plans: list[PatternPlan] = []
        groups: dict[str, list[int]] = {"a1": [], "a2a": [], "a2b": []}
        mode = config.mode
        for i in self.kept:
            p = patterns[i]
            if mode == "auto":
                cls = classify(p, self.kL)
            elif mode == "a1" or mode == "oracle":
                cls = "a1"
            else:
                cls = "a2a" if mode == "a2a" else "a2b"
            pp = PatternPlan(i, p, cls)
            if len(p) > self.kL:
                pp.q_len = len(p) - self.kL
                pp.q_period = period_of(p[: pp.q_len]).period
            self.pattern_plans.append(pp)
            groups[cls].append(i)
        self.groups = groups

        self.a1_plan = self.a2a_plan = self.a2b_plan = None
        self.oracle: AcAutomaton | None = None
        try:
            if mode == "oracle":
                self.oracle = AcAutomaton([patterns[i] for i in self.kept])
            else:
                if groups["a1"]:
                    self.a1_plan = A1Plan(
                        [patterns[i] for i in groups["a1"]],
                        self.params,
                        self.L,
                        ids=groups["a1"],
                        keep_strings=config.keep_strings,
                    )
                if groups["a2a"]:
                    self.a2a_plan = A2aPlan([patterns[i] for i in groups["a2a"]], self.params, self.kL)
                if groups["a2b"]:
                    self.a2b_plan = A2bPlan(
                        [patterns[i] for i in groups["a2b"]],
                        self.params,
                        self.L,
                        self.kL,
                        mode="reference" if mode == "levels" else "fast",
                        ids=groups["a2b"],
                        keep_strings=config.keep_strings,
                    )
        except ClassError as e:
            raise ConfigError(f"mode {mode!r} does not fit this dictionary: {e}") from e

        caps = [2]
        if self.a1_plan is not None:
            caps.append(self.a1_plan.buffer_capacity)
        if self.a2a_plan is not None:
            caps.append(2 * self.kL + 1)
        if self.a2b_plan is not None:
            caps.append(self.a2b_plan.buffer_capacity)
        self.buffer_capacity = max(caps)

    @property
    def class_counts(self) -> dict[str, int]:
        return {c: len(v) for c, v in self.groups.items()}

    @property
    def words(self) -> int:
        """Accounted storage in machine words: tables, tries, buffers, per-stream slots."""
        w = 3 * (self.buffer_capacity + 1) + 8
        if self.oracle is not None:
            w += 3 * self.oracle.num_states + sum(len(g) for g in self.oracle.goto)
        for plan in (self.a1_plan, self.a2a_plan, self.a2b_plan):
            if plan is not None:
                w += plan.words
        if self.a2a_plan is not None:
            w += 3 * 4 * len(self.a2a_plan.k_rho)
        return w


class StreamMatcher:
    """One stream session: ``push`` one character at a time, ``finish`` for the stats."""

    def __init__(self, plan: DictionaryPlan):
        self.plan = plan
        self.buffer = PrefixFpBuffer(plan.buffer_capacity, plan.params)
        self.a1 = A1Matcher(plan.a1_plan, self.buffer) if plan.a1_plan is not None else None
        self.a2a = A2aMatcher(plan.a2a_plan, self.buffer) if plan.a2a_plan is not None else None
        self.a2b = A2bMatcher(plan.a2b_plan, self.buffer) if plan.a2b_plan is not None else None
        self.oracle_state = 0
        self._stats = EngineStats(words=plan.words, buffer_capacity=plan.buffer_capacity, classes=plan.class_counts)
        self._hist = [0] * 64
        self._events = 0
        self._lengths = [len(p) for p in plan.patterns]
        self._limit = plan.config.max_stream_len
        # (matcher, local id -> caller id) in the order results are merged;
        # later sub-engines win only with a strictly longer pattern
        self._subs = []
        if self.a1 is not None:
            self._subs.append((self.a1, plan.a1_plan.ids))
        if self.a2a is not None:
            self._subs.append((self.a2a, plan.groups["a2a"]))
        if self.a2b is not None:
            self._subs.append((self.a2b, plan.a2b_plan.ids))

    @property
    def position(self) -> int:
        return self.buffer.position

    @property
    def stats(self) -> EngineStats:
        return self.finish()

    def push(self, c: int) -> list[MatchEvent]:
        buf = self.buffer
        if buf.position >= self._limit:
            raise StreamOverflowError(f"stream longer than max_stream_len={self._limit}")
        # PrefixFpBuffer.push, inlined: this is the per-character hot path
        p = buf._p
        size = buf._size
        prev = buf.position % size
        ell = buf.position = buf.position + 1
        cur = ell % size
        pw = buf._pow[prev] * buf._r % p
        buf._pow[cur] = pw
        buf._ipow[cur] = buf._ipow[prev] * buf._rinv % p
        buf._val[cur] = (buf._val[prev] + c * pw) % p

        best = None
        ops = 0
        if self.plan.oracle is not None:
            auto = self.plan.oracle
            self.oracle_state, outs = auto.step(self.oracle_state, c)
            ops = 1
            if outs:
                best = self.plan.kept[auto.longest_output(self.oracle_state)]
        lengths = self._lengths
        for sub, ids in self._subs:
            w = sub.process(c)
            ops += sub.ops
            if w is not None:
                i = ids[w]
                if best is None or lengths[i] > lengths[best]:
                    best = i
        hist = self._hist
        if ops >= len(hist):
            hist.extend([0] * (ops + 1 - len(hist)))
        hist[ops] += 1
        if best is None:
            return []
        self._events += 1
        return [MatchEvent(ell, best)]

    def feed(self, text: bytes) -> list[MatchEvent]:
        out = []
        push = self.push
        for c in text:
            ev = push(c)
            if ev:
                out.extend(ev)
        return out

    def finish(self) -> EngineStats:
        st = self._stats
        st.arrivals = self.buffer.position
        st.events = self._events
        st.heavy_ops_hist = Counter({i: n for i, n in enumerate(self._hist) if n})
        st.max_heavy_ops = max(st.heavy_ops_hist, default=0)
        st.buffer_occupancy = min(self.buffer.position, self.buffer.capacity)
        if self.a2a is not None:
            st.a2a_max_probes = self.a2a.max_probes
        if self.a2b is not None:
            st.max_progressions = self.a2b.max_store_progressions
            st.max_level_progressions = self.a2b.counters.max_level_progs
        coll = 0
        if self.plan.a1_plan is not None:
            coll += self.plan.a1_plan.trie.collisions
        if self.plan.a2b_plan is not None and self.plan.a2b_plan.d2_plan is not None:
            coll += self.plan.a2b_plan.d2_plan.trie.collisions
        st.collisions = coll
        return st


def engine_build(patterns: Sequence[bytes], config: EngineConfig | None = None) -> StreamMatcher:
    return StreamMatcher(DictionaryPlan(patterns, config))


def engine_arrive(state: StreamMatcher, c: int) -> list[MatchEvent]:
    return state.push(c)


def engine_stats(state: StreamMatcher) -> EngineStats:
    return state.finish()


def heavy_op_ceiling(k: int, m: int, c_prime: float) -> float:
    """C' * (1 + log log (k + m)), the per-arrival work bound."""
    return c_prime * (1 + math.log2(max(2.0, math.log2(k + m + 2))))
