"""Long patterns whose Q prefix has a long period.

Matches of the power-of-two prefixes ("rungs") of every pattern are kept
as arithmetic progressions. A match of the largest rung is extended into
a match of Q_i (P_i minus its last kL characters) by one fingerprint
comparison, at most kL arrivals late. Whole patterns are reported on time
by remembering the longest Q ending kL positions back and asking the
coloured trie of reversed Q strings whether the last kL characters
complete some pattern.

Two ways of finding rung matches:

* ``reference``: progressions over log m levels. A level-j match that is
  2**(j+1) characters old is tested against the table of rung
  fingerprints and, if it extends, inserted one level up.
* ``fast``: rungs with a short period are found by the longest-match A2a
  variant (D1), the smallest long-period rung of patterns without a D1
  member by A1 (D2), and every rung above those (S) by two round-robin
  processes that extend the predecessor's matches.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Sequence

from .a1 import A1Matcher, A1Plan
from .a2a import A2aMatcher, A2aPlan, ClassError
from .krhash import FpParams, PrefixFpBuffer, fp_of_string
from .progressions import MatchProgression, PeriodString, PrefixState, ProgressionStore, lemma4_candidate
from .stringology import build_ladder, is_suffix, period_of, periodic_prefix_length
from .tries import CompactQTrie, qtrie_build

__all__ = [
    "A2bLayout",
    "A2bPlan",
    "A2bMatcher",
    "LevelTable",
    "RoundRobin",
    "a2b_layout",
    "a2b_schedule_tick",
    "a2b_reference_arrive",
    "a2b_fast_arrive",
    "lemma4_candidate",
    "fact1_positions",
]


@dataclass(frozen=True)
class A2bLayout:
    """Which rungs of one pattern are tracked and how."""

    lengths: tuple[int, ...]
    periods: tuple[int, ...]
    d1: int | None
    d2: int | None

    @property
    def first_tracked(self) -> int:
        return self.d1 if self.d1 is not None else self.d2

    @property
    def anchor(self) -> int:
        return len(self.lengths) - 1


def a2b_layout(pattern: bytes, kL: int) -> A2bLayout | None:
    """Rung layout for the fast variant, or None if the pattern has neither a D1 nor a D2 member."""
    if len(pattern) - 2 * kL < 1:
        return None
    ladder = build_ladder(pattern, 1, kL, kL)
    lengths = tuple(r.length for r in ladder.rungs)
    periods = tuple(r.period for r in ladder.rungs)
    d1 = None
    for j, (n, rho) in enumerate(zip(lengths, periods)):
        if n >= 2 * kL and rho < kL:
            d1 = j
    if d1 is not None:
        return A2bLayout(lengths, periods, d1, None)
    jstar = next((j for j, n in enumerate(lengths) if n >= 2 * kL), None)
    if jstar is None or periods[jstar] < kL:
        return None
    return A2bLayout(lengths, periods, None, jstar)


def fact1_positions(u: bytes, v: bytes) -> list[int]:
    """1-based start positions of u in v (brute force); used to check Fact 1."""
    return [i + 1 for i in range(len(v) - len(u) + 1) if v[i : i + len(u)] == u]


@dataclass
class RungInfo:
    id: int
    string: bytes
    length: int
    period: int
    fp: int
    pred: int | None = None
    d1: bool = False
    d2: bool = False
    s: bool = False
    extendable: bool = False


@dataclass
class CheckItem:
    """Extend matches of a rung Y into matches of a target Z that starts with Y.

    ``target`` is a rung id, or -1 - i for Q_i. With ``by_end`` the
    matches of Y are read from the end-position store of Y's D1 chain,
    otherwise from Y's own start-position store.
    """

    target: int
    z_len: int
    z_fp: int
    store: int
    by_end: bool
    y_len: int
    y_fp: int
    periodic: bool
    run_shift: int
    full_run: bool


class LevelTable:
    """The table of rung fingerprints, keyed by (length, fingerprint)."""

    def __init__(self) -> None:
        self.table: dict[tuple[int, int], int] = {}

    def add(self, length: int, fp: int, rung: int) -> None:
        self.table[(length, fp)] = rung

    def get(self, length: int, fp: int) -> int | None:
        return self.table.get((length, fp))

    def __len__(self) -> int:
        return len(self.table)


class RoundRobin:
    """Visits ``ceil(n / period)`` items per arrival, cycling, so each item is seen every <= period arrivals."""

    def __init__(self, n: int, period: int):
        self.n = n
        self.per_tick = math.ceil(n / period) if n else 0
        self.ptr = 0
        self.last_visit = [0] * n

    def tick(self) -> list[int]:
        out = []
        for _ in range(self.per_tick):
            out.append(self.ptr)
            self.ptr += 1
            if self.ptr == self.n:
                self.ptr = 0
        return out


def a2b_schedule_tick(rr: RoundRobin) -> list[int]:
    return rr.tick()


class A2bPlan:
    """Preprocessing shared by both variants.

    ``mode`` is "fast" or "reference". The reference variant accepts any
    pattern longer than 2kL; the fast one needs a D1 or D2 member.
    """

    def __init__(
        self,
        patterns: Sequence[bytes],
        params: FpParams,
        L: int,
        kL: int,
        mode: str = "fast",
        ids: Sequence[int] | None = None,
        keep_strings: bool = True,
    ):
        if mode not in ("fast", "reference"):
            raise ValueError(f"unknown A2b mode {mode!r}")
        self.params = params
        self.L, self.kL, self.mode = L, kL, mode
        self.patterns = list(patterns)
        self.ids = list(ids) if ids is not None else list(range(len(self.patterns)))
        self.max_len = max((len(p) for p in self.patterns), default=0)
        self.rungs: list[RungInfo] = []
        self._by_string: dict[bytes, int] = {}
        self.layouts: list[A2bLayout | None] = []
        self.pattern_rungs: list[list[int]] = []
        self.anchors: list[int] = []
        tracked: set[int] = set()
        for pat in self.patterns:
            if len(pat) <= 2 * kL:
                raise ClassError(f"pattern of length {len(pat)} too short for A2b (kL={kL})")
            layout = a2b_layout(pat, kL)
            if mode == "fast" and layout is None:
                raise ClassError("pattern has neither a D1 nor a D2 rung")
            ladder = build_ladder(pat, 1, kL, kL)
            ids_here = []
            prev = None
            for r in ladder.rungs:
                rid = self._rung(pat[: r.length], r.period)
                self.rungs[rid].pred = prev
                if prev is not None:
                    self.rungs[prev].extendable = True
                ids_here.append(rid)
                prev = rid
            self.layouts.append(layout)
            self.pattern_rungs.append(ids_here)
            self.anchors.append(ids_here[-1])
            if mode == "fast":
                for j in range(layout.first_tracked, len(ids_here)):
                    rid = ids_here[j]
                    tracked.add(rid)
                    if j == layout.d1:
                        self.rungs[rid].d1 = True
                    elif j == layout.d2:
                        self.rungs[rid].d2 = True
                    else:
                        self.rungs[rid].s = True

        self.level_table = LevelTable()
        for r in self.rungs:
            self.level_table.add(r.length, r.fp, r.id)
        self.num_levels = max((r.length for r in self.rungs), default=1).bit_length()

        self.qs = [p[: len(p) - kL] for p in self.patterns]
        tail_colours = [fp_of_string(p[len(p) - kL :], params).value for p in self.patterns]
        self.qtrie: CompactQTrie = qtrie_build(self.qs, tail_colours)
        self.q_witness: dict[tuple[int, int], int] = {}
        for i, colour in enumerate(tail_colours):
            self.q_witness.setdefault((self.qtrie.node_for[i], colour), i)
        self.q_fp = [fp_of_string(q, params).value for q in self.qs]

        if mode == "fast":
            self.stored = sorted(r for r in tracked if not self.rungs[r].d1)
        else:
            self.stored = sorted(set(self.anchors))
        self.period_strings = {rid: self._period_string(self.rungs[rid].string, False) for rid in self.stored}
        if mode == "reference":
            for r in self.rungs:
                if r.extendable:
                    self.period_strings[r.id] = self._period_string(r.string, False)

        self.d1_ids = [r.id for r in self.rungs if r.d1]
        self.d2_ids = [r.id for r in self.rungs if r.d2]
        # sup[Y]: D1 members having Y as a suffix. These are totally ordered
        # by the suffix relation, so D1 splits into disjoint chains; a chain
        # is named by its longest member.
        self.sup: dict[int, list[int]] = {}
        self.chain_of: dict[int, int] = {}
        for y in self.d1_ids:
            ys = self.rungs[y].string
            sup = sorted((x for x in self.d1_ids if is_suffix(ys, self.rungs[x].string)), key=lambda x: self.rungs[x].length)
            for a, b in zip(sup, sup[1:]):
                if not is_suffix(self.rungs[a].string, self.rungs[b].string):
                    raise ClassError("D1 rungs extending a common suffix are not suffix-ordered")
            for x in sup:
                if self.rungs[x].period != self.rungs[y].period:
                    raise ClassError("suffix-related D1 rungs with different periods")
            self.sup[y] = sup
            self.chain_of[y] = sup[-1]
        self.chains = sorted(set(self.chain_of.values()))
        self.chain_periods = {c: self._period_string(self.rungs[c].string, True) for c in self.chains}
        # Every D2 member has length 2**j* for the same j*, so no D2 member
        # is a proper suffix of another and a D2 match never implies a
        # match of a different D2 rung.
        self.process1: list[CheckItem] = []
        self.process2: list[CheckItem] = []
        if mode == "fast":
            for z in sorted(tracked):
                rz = self.rungs[z]
                if rz.d1 or rz.d2:
                    continue
                y = rz.pred
                if self.rungs[y].d1:
                    self.process2.append(self._item(z, rz.fp, rz.string, y, True))
                else:
                    self.process1.append(self._item(z, rz.fp, rz.string, y, False))
        self.q_items: list[CheckItem] = []
        for i, a in enumerate(self.anchors):
            self.q_items.append(self._item(-1 - i, self.q_fp[i], self.qs[i], a, mode == "fast" and self.rungs[a].d1))

        self.d1_plan = A2aPlan([self.rungs[x].string for x in self.d1_ids], params, kL, appendix=True) if self.d1_ids else None
        self.d2_plan = (
            A1Plan([self.rungs[x].string for x in self.d2_ids], params, L, cap=4 * kL, keep_strings=keep_strings)
            if self.d2_ids
            else None
        )

    def _rung(self, s: bytes, period: int) -> int:
        rid = self._by_string.get(s)
        if rid is None:
            rid = len(self.rungs)
            self._by_string[s] = rid
            self.rungs.append(RungInfo(rid, s, len(s), period, fp_of_string(s, self.params).value))
        return rid

    def _period_string(self, s: bytes, at_end: bool) -> PeriodString:
        rho = period_of(s).period
        u = s[len(s) - rho :] if at_end else s[:rho]
        return PeriodString(fp_of_string(u, self.params).value, rho, self.params)

    def _item(self, target: int, z_fp: int, z: bytes, y: int, by_end: bool) -> CheckItem:
        ry = self.rungs[y]
        rho = ry.period
        periodic = rho < self.kL
        lam = periodic_prefix_length(z, rho)
        return CheckItem(
            target=target,
            z_len=len(z),
            z_fp=z_fp,
            store=self.chain_of[y] if by_end else y,
            by_end=by_end,
            y_len=ry.length,
            y_fp=ry.fp,
            periodic=periodic,
            run_shift=(lam - ry.length) // rho if periodic else 0,
            full_run=periodic and lam == len(z),
        )

    @property
    def buffer_capacity(self) -> int:
        need = 2 * self.kL + 2
        if self.d1_plan is not None:
            need = max(need, 2 * self.kL + 1)
        if self.d2_plan is not None:
            need = max(need, self.d2_plan.buffer_capacity)
        return need

    @property
    def words(self) -> int:
        w = 3 * len(self.rungs) + 2 * len(self.level_table)
        w += 2 * self.qtrie.num_nodes + 3 * self.qtrie.overlay.total_marks
        w += 8 * (len(self.process1) + len(self.process2) + len(self.q_items)) + 3 * len(self.chains)
        if self.d1_plan is not None:
            w += self.d1_plan.words
        if self.d2_plan is not None:
            w += self.d2_plan.words
        return w


@dataclass
class A2bCounters:
    process_steps: int = 0
    fp_checks: int = 0
    colour_queries: int = 0
    q_matches: int = 0
    max_level_progs: int = 0
    s_adds: dict = field(default_factory=dict)


class _LevelProg:
    __slots__ = ("fp", "lp", "val", "pw", "ipw", "rung", "alive")

    def __init__(self, fp, lp, val, pw, ipw, rung):
        self.fp, self.lp, self.val, self.pw, self.ipw, self.rung = fp, lp, val, pw, ipw, rung
        self.alive = True


class A2bMatcher:
    def __init__(self, plan: A2bPlan, buffer: PrefixFpBuffer | None = None):
        self.plan = plan
        if buffer is None:
            buffer = PrefixFpBuffer(plan.buffer_capacity, plan.params)
        elif buffer.capacity < plan.buffer_capacity:
            raise ValueError("shared buffer too small for A2b")
        self.buffer = buffer
        self.reference = plan.mode == "reference"
        self.stores = {rid: ProgressionStore(plan.period_strings[rid]) for rid in plan.stored}
        self.horizon = plan.max_len + 2 * plan.kL
        self.pending: dict[int, tuple[int, int]] = {}
        self.counters = A2bCounters()
        self.q_rr = RoundRobin(len(plan.q_items), plan.kL)
        self.p1_rr = RoundRobin(len(plan.process1), plan.kL)
        self.p2_rr = RoundRobin(len(plan.process2), plan.kL)
        self.chain_stores = {c: ProgressionStore(plan.chain_periods[c]) for c in plan.chains}
        self.q_bound = self._bind(plan.q_items)
        self.p1_bound = self._bind(plan.process1)
        self.p2_bound = self._bind(plan.process2)
        self.ops = 0
        self.last_longest: int | None = None
        if self.reference:
            self.levels: list[list] = [[] for _ in range(plan.num_levels)]
            self.level_last: dict[int, _LevelProg] = {}
            self.level_live: dict[int, int] = {}
            self._seq = 0
        else:
            self.d1 = A2aMatcher(plan.d1_plan, buffer) if plan.d1_plan is not None else None
            self.d2 = A1Matcher(plan.d2_plan, buffer) if plan.d2_plan is not None else None

    # shared helpers

    def _record(self, rid: int, start: int, state: PrefixState) -> None:
        store = self.stores.get(rid)
        if store is not None:
            if store.add(start, state, self.buffer.position - self.horizon) and self.plan.rungs[rid].s:
                self.counters.s_adds[rid] = self.counters.s_adds.get(rid, 0) + 1
        if self.reference and self.plan.rungs[rid].extendable:
            self._level_insert(rid, start, state)

    def _state_at_end(self, length: int, fp: int) -> PrefixState:
        """Prefix state in front of a string of the given length and fingerprint ending now."""
        params = self.plan.params
        p = params.p
        val, pw, ipw = self.buffer.prefix_state(self.buffer.position)
        pw_s = pw * params.rinvpow(length) % p
        return (val - pw_s * fp) % p, pw_s, ipw * params.rpow(length) % p

    def _check(self, item: CheckItem, store: ProgressionStore, lo: int, hi: int) -> list[tuple[int, PrefixState]]:
        """Starts of target matches ending in (lo, hi], with the prefix state in front of each.

        A candidate must be a recorded match of Y: the prefix state in
        front of it is rebuilt forward from the first element of its
        progression, which is only sound inside the progression.
        """
        params = self.plan.params
        p = params.p
        buf = self.buffer
        z, y = item.z_len, item.y_len
        smin, smax = max(1, lo - z + 2), hi - z + 1
        if smax < smin:
            return []
        period = store.period
        rho = period.rho
        shift = item.run_shift * rho
        r_y, rinv_y = params.rpow(y), params.rinvpow(y)
        found = []
        # progressions of one string never interleave, so lp grows with fp
        for pr in reversed(store.progs):
            # recorded starts of Y in this progression: first, first + rho, ..., last
            if item.by_end:
                last = pr.lp - y + 1
                if last < smin:
                    break
                f_end = pr.first_tagged(y)
                if f_end is None:
                    continue
                first = f_end - y + 1
            else:
                first, last = pr.fp, pr.lp
                if last < smin:
                    break
            if item.periodic and not item.full_run:
                c = last - shift
                if not (c >= first and smin <= c <= smax):
                    continue
                cands = (c,)
            else:
                top = min(smax, last - shift)
                bottom = max(smin, first)
                if bottom > top:
                    continue
                bottom += (first - bottom) % rho
                cands = range(bottom, top + 1, rho)
            for c in cands:
                self.counters.fp_checks += 1
                self.ops += 1
                if item.by_end:
                    ve, pwe, ipwe = period.shift((pr.val, pr.pw, pr.ipw), (c + y - 1 - pr.fp) // rho)
                    pw = pwe * rinv_y % p
                    val, ipw = (ve - pw * item.y_fp) % p, ipwe * r_y % p
                else:
                    val, pw, ipw = period.shift((pr.val, pr.pw, pr.ipw), (c - pr.fp) // rho)
                if (buf.prefix(c + z - 1).value - val) * ipw % p == item.z_fp:
                    found.append((c, (val, pw, ipw)))
        return found

    def _bind(self, items: list[CheckItem]) -> list[tuple[CheckItem, ProgressionStore]]:
        return [(it, self.chain_stores[it.store] if it.by_end else self.stores[it.store]) for it in items]

    def _run_items(self, items: list[tuple[CheckItem, ProgressionStore]], rr: RoundRobin) -> None:
        n = rr.n
        if not n:
            return
        ell = self.buffer.position
        for _ in range(rr.per_tick):
            idx = rr.ptr
            rr.ptr = idx + 1 if idx + 1 < n else 0
            item, store = items[idx]
            lo = rr.last_visit[idx]
            rr.last_visit[idx] = ell
            self.counters.process_steps += 1
            self.ops += 1
            if not store.progs:
                continue
            for start, state in self._check(item, store, lo, ell):
                if item.target >= 0:
                    self._record(item.target, start, state)
                else:
                    i = -1 - item.target
                    self.counters.q_matches += 1
                    due = start + item.z_len - 1 + self.plan.kL
                    cur = self.pending.get(due)
                    if cur is None or cur[0] < item.z_len:
                        self.pending[due] = (item.z_len, self.plan.qtrie.node_for[i])

    def _report(self) -> int | None:
        ell = self.buffer.position
        entry = self.pending.pop(ell, None)
        if entry is None:
            return None
        kL = self.plan.kL
        colour = self.buffer.window_value(ell - kL + 1, ell)
        self.counters.colour_queries += 1
        self.ops += 1
        hit = self.plan.qtrie.overlay.find(entry[1], colour)
        if hit is None:
            return None
        return self.plan.q_witness.get((hit, colour))

    # reference variant

    def _level_insert(self, rid: int, start: int, state: PrefixState) -> None:
        last = self.level_last.get(rid)
        rho = self.plan.rungs[rid].period
        if last is not None and last.alive and start - last.lp == rho:
            last.lp = start
            return
        if last is not None and last.alive and start <= last.lp:
            return
        prog = _LevelProg(start, start, *state, rid)
        self.level_last[rid] = prog
        live = self.level_live.get(rid, 0) + 1
        self.level_live[rid] = live
        self.counters.max_level_progs = max(self.counters.max_level_progs, live)
        self._seq += 1
        heapq.heappush(self.levels[self.plan.rungs[rid].length.bit_length() - 1], (start, self._seq, prog))

    def _levels_step(self) -> None:
        plan = self.plan
        buf = self.buffer
        ell = buf.position
        p = plan.params.p
        table = plan.level_table
        if ell >= 2:
            prev = buf.prefix_state(ell - 1)
        else:
            prev = (0, 1, 1)
        rid = table.get(1, buf.window_value(ell, ell))
        self.ops += 1
        if rid is not None:
            self._record(rid, ell, prev)
        cur = buf.prefix(ell).value
        for j, heap in enumerate(self.levels):
            span = 2 << j
            while heap and heap[0][0] + span - 1 <= ell:
                _, _, prog = heap[0]
                self.ops += 1
                if prog.fp + span - 1 == ell:
                    v = (cur - prog.val) * prog.ipw % p
                    z = table.get(span, v)
                    if z is not None and plan.rungs[z].pred == prog.rung:
                        self._record(z, prog.fp, (prog.val, prog.pw, prog.ipw))
                if prog.fp >= prog.lp:
                    heapq.heappop(heap)
                    prog.alive = False
                    self.level_live[prog.rung] -= 1
                else:
                    ps = plan.period_strings[prog.rung]
                    prog.val, prog.pw, prog.ipw = ps.shift((prog.val, prog.pw, prog.ipw), 1)
                    prog.fp += ps.rho
                    self._seq += 1
                    heapq.heapreplace(heap, (prog.fp, self._seq, prog))

    # fast variant

    def _fast_step(self, c: int) -> None:
        plan = self.plan
        ell = self.buffer.position
        if self.d1 is not None:
            self.ops += 1
            w = self.d1.process()
            if w is not None:
                # stored by end position in the chain, tagged with the length
                rid = plan.d1_ids[w]
                self.chain_stores[plan.chain_of[rid]].add(
                    ell, self.buffer.prefix_state(ell), ell - self.horizon, tag=plan.rungs[rid].length
                )
        if self.d2 is not None:
            w = self.d2.process(c)
            self.ops += self.d2.ops
            if w is not None:
                r = plan.rungs[plan.d2_ids[w]]
                self._record(r.id, ell - r.length + 1, self._state_at_end(r.length, r.fp))
        self._run_items(self.p1_bound, self.p1_rr)
        self._run_items(self.p2_bound, self.p2_rr)

    # public

    def process(self, c: int) -> int | None:
        """Advance by one arrival (character already pushed); local id of the longest match ending here."""
        self.ops = 0
        if self.reference:
            self._levels_step()
        else:
            self._fast_step(c)
        self._run_items(self.q_bound, self.q_rr)
        best = self._report()
        self.last_longest = best
        return best

    def arrive(self, c: int) -> list[int]:
        self.buffer.push(c)
        w = self.process(c)
        return [self.buffer.position] if w is not None else []

    def longest_match_at(self) -> int | None:
        if self.last_longest is None:
            return None
        return self.plan.ids[self.last_longest]

    @property
    def max_store_progressions(self) -> int:
        return max((s.max_progs for s in self.stores.values()), default=0)


def a2b_reference_arrive(state: A2bMatcher, c: int) -> list[int]:
    if not state.reference:
        raise ValueError("matcher was built for the fast variant")
    return state.arrive(c)


def a2b_fast_arrive(state: A2bMatcher, c: int) -> list[int]:
    if state.reference:
        raise ValueError("matcher was built for the reference variant")
    return state.arrive(c)
