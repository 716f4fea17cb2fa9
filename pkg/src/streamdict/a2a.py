"""Long patterns whose Q prefix has a short period.

Q_i = P_i minus its last kL characters, K_i = Q_i[:kL], tail = last 2kL
characters. P_i ends at ell iff the tail matches at ell and K_i occurred
c_i = (|Q_i| - kL) // rho + 1 times, rho apart, starting where P_i starts.

Runs of K occurrences are kept as (start, last, count) triples. A K hit
that is not exactly rho after the previous one opens a new run; the few
most recent runs are retained, because a K occurrence inside the final kL
characters of a pattern can open a new run before the tail is seen.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Sequence

from .krhash import FpParams, PrefixFpBuffer, fp_of_string
from .stringology import is_suffix, period_of

RUNS_KEPT = 4


class ClassError(ValueError):
    """A pattern does not meet the preconditions of the algorithm it was given to."""


class ModeError(RuntimeError):
    pass


@dataclass(frozen=True)
class A2aPattern:
    pattern: bytes
    q_len: int
    rho: int
    k_id: int
    count: int
    tail_fp: int


def required_count(q_len: int, k_len: int, rho: int) -> int:
    return (q_len - k_len) // rho + 1


class A2aPlan:
    """Static tables for A2a.

    Standard mode removes patterns that have another pattern as a suffix
    and maps every tail to one pattern. Appendix mode (power-of-two
    lengths, suffixes allowed) maps a tail to every pattern sharing it,
    sorted by length, and answers with the longest verified one.
    """

    def __init__(
        self,
        patterns: Sequence[bytes],
        params: FpParams,
        kL: int,
        appendix: bool = False,
        min_len: int | None = None,
    ):
        self.params = params
        self.kL = kL
        self.appendix = appendix
        pats = list(dict.fromkeys(patterns))
        if not appendix:
            pats = [p for p in pats if not any(q != p and is_suffix(q, p) for q in pats)]
        if min_len is None:
            min_len = 2 * kL if appendix else 2 * kL + 1
        self.patterns = pats
        # K strings are keyed together with the period of Q: one K can
        # carry two different short periods (e.g. "aabaa" has 3 and 4).
        self.k_table: dict[int, tuple[int, ...]] = {}
        k_ids: dict[tuple[int, int], int] = {}
        self.k_rho: list[int] = []
        self.k_strings: list[bytes] = []
        self.info: list[A2aPattern] = []
        tails: dict[int, list[int]] = {}
        for i, p in enumerate(pats):
            if len(p) < min_len:
                raise ClassError(f"pattern of length {len(p)} too short for A2a (kL={kL})")
            if appendix and len(p) & (len(p) - 1):
                raise ClassError("appendix mode needs power-of-two lengths")
            q = p[: len(p) - kL]
            rho = period_of(q).period
            if rho >= kL:
                raise ClassError(f"period {rho} of Q is not below kL={kL}")
            k = q[:kL]
            kfp = fp_of_string(k, params).value
            kid = k_ids.get((kfp, rho))
            if kid is None:
                kid = len(self.k_rho)
                k_ids[(kfp, rho)] = kid
                self.k_table[kfp] = self.k_table.get(kfp, ()) + (kid,)
                self.k_rho.append(rho)
                self.k_strings.append(k)
            tfp = fp_of_string(p[-2 * kL :], params).value
            self.info.append(A2aPattern(p, len(q), rho, kid, required_count(len(q), kL, rho), tfp))
            tails.setdefault(tfp, []).append(i)
        # tail -> groups of equal Q period, each sorted by length. Patterns
        # sharing a tail and a period are suffixes of one another, so in
        # standard mode every group is a singleton.
        self.tail_table: dict[int, tuple[tuple[int, ...], ...]] = {}
        for t, v in tails.items():
            by_rho: dict[int, list[int]] = {}
            for i in v:
                by_rho.setdefault(self.info[i].rho, []).append(i)
            self.tail_table[t] = tuple(tuple(sorted(g, key=lambda i: len(pats[i]))) for g in by_rho.values())
        self.preselected = {t: self.info[g[0][0]].k_id for t, g in self.tail_table.items()}
        self.max_group = max((len(g) for g in self.tail_table.values()), default=0)

    @property
    def words(self) -> int:
        return 2 * len(self.k_rho) + 2 * len(self.tail_table) + 4 * len(self.info)


def a2a_preprocess(patterns: Sequence[bytes], params: FpParams, kL: int) -> A2aPlan:
    return A2aPlan(patterns, params, kL)


class A2aMatcher:
    def __init__(self, plan: A2aPlan, buffer: PrefixFpBuffer | None = None):
        self.plan = plan
        if buffer is None:
            buffer = PrefixFpBuffer(2 * plan.kL + 1, plan.params)
        elif buffer.capacity < 2 * plan.kL + 1:
            raise ValueError("shared buffer too small for A2a")
        self.buffer = buffer
        self.runs: list[deque] = [deque(maxlen=RUNS_KEPT) for _ in plan.k_rho]
        # window fingerprints plus table lookups in the last arrival
        self.probes = 0
        self.max_probes = 0
        self.run_checks = 0
        self.last_longest: int | None = None
        self.ops = 0

    def arrive(self, c: int) -> list[int]:
        self.buffer.push(c)
        w = self.process()
        return [self.buffer.position] if w is not None else []

    def run_length(self, kid: int) -> int:
        """Count of the most recent run of K occurrences."""
        runs = self.runs[kid]
        return runs[-1][2] if runs else 0

    def _covered(self, i: int, end: int) -> bool:
        """Do the K occurrences required by pattern i, ending at ``end``, all exist?"""
        info = self.plan.info[i]
        start = end - len(info.pattern) + 1
        need_last = start + (info.count - 1) * info.rho
        for run_start, run_last, _ in self.runs[info.k_id]:
            if run_start <= start and run_last >= need_last and (start - run_start) % info.rho == 0:
                return True
        return False

    def process(self, c: int | None = None) -> int | None:
        plan = self.plan
        kL = plan.kL
        buf = self.buffer
        ell = buf.position
        probes = 0
        best = None
        val, ipw, size, p = buf._val, buf._ipow, buf._size, buf._p
        end_val = val[ell % size]
        if ell >= kL:
            a = (ell - kL) % size
            v = (end_val - val[a]) * ipw[a] % p
            probes += 2
            s = ell - kL + 1
            for kid in plan.k_table.get(v, ()):
                runs = self.runs[kid]
                if runs and s - runs[-1][1] == plan.k_rho[kid]:
                    run = runs[-1]
                    run[1] = s
                    run[2] += 1
                else:
                    runs.append([s, s, 1])
        if ell >= 2 * kL:
            a = (ell - 2 * kL) % size
            v = (end_val - val[a]) * ipw[a] % p
            probes += 2
            for group in plan.tail_table.get(v, ()):
                # run checks read matcher state, not the tables: not probes
                self.run_checks += 1
                i = self._longest_in(group, ell)
                if i is not None and (best is None or len(plan.info[i].pattern) > len(plan.info[best].pattern)):
                    best = i
        self.probes = probes
        if probes > self.max_probes:
            self.max_probes = probes
        self.ops = 1
        self.last_longest = best
        return best

    def _longest_in(self, group: tuple[int, ...], ell: int) -> int | None:
        # Within a group a longer member matching implies every shorter one
        # does, so the predicate is monotone along the length-sorted group.
        lo, hi = 0, len(group) - 1
        found = None
        while lo <= hi:
            mid = (lo + hi) // 2
            if self._covered(group[mid], ell):
                found = group[mid]
                lo = mid + 1
            else:
                hi = mid - 1
        return found

    def longest_match_at(self) -> int | None:
        if not self.plan.appendix:
            raise ModeError("longest-match queries need appendix mode")
        return self.last_longest


def a2a_arrive(state: A2aMatcher, c: int) -> list[int]:
    return state.arrive(c)


def a2a_longest_match_at(state: A2aMatcher) -> int | None:
    return state.longest_match_at()
