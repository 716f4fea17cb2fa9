"""Arithmetic progressions of match start positions.

A progression stores the first and last start of a run of matches spaced
exactly ``rho`` apart, plus (phi(t_1..t_{fp-1}), r**(fp-1), r**-(fp-1)).
The prefix state in front of any other element, including elements
before ``fp`` when the text there continues the run, follows from the
fingerprint of the period string raised to a power (geometric series).
"""

from __future__ import annotations

from bisect import bisect_right

from .krhash import FpParams

PrefixState = tuple[int, int, int]


class MatchProgression:
    __slots__ = ("fp", "lp", "val", "pw", "ipw", "tags")

    def __init__(self, fp: int, lp: int, val: int, pw: int, ipw: int):
        self.fp = fp
        self.lp = lp
        self.val = val
        self.pw = pw
        self.ipw = ipw
        # (tag, first position carrying a tag >= it), tags nondecreasing
        self.tags: list[tuple[int, int]] | None = None

    def first_tagged(self, at_least: int) -> int | None:
        """First position whose tag is >= at_least."""
        for tag, pos in self.tags or ():
            if tag >= at_least:
                return pos
        return None

    def __repr__(self) -> str:
        return f"MatchProgression(fp={self.fp}, lp={self.lp})"

    def count(self, rho: int) -> int:
        return (self.lp - self.fp) // rho + 1

    def positions(self, rho: int) -> list[int]:
        return list(range(self.fp, self.lp + 1, rho))


class PeriodString:
    """phi(U) for a period string U together with what is needed to raise it to a power."""

    __slots__ = ("params", "rho", "phi", "step", "inv_step_minus_one")

    def __init__(self, phi: int, rho: int, params: FpParams):
        self.params = params
        self.rho = rho
        self.phi = phi
        self.step = params.rpow(rho)
        p = params.p
        self.inv_step_minus_one = pow(self.step - 1, p - 2, p) if self.step != 1 else None

    def power(self, t: int) -> int:
        """phi(U^t) for t >= 0."""
        if t == 0:
            return 0
        p = self.params.p
        if self.inv_step_minus_one is None:
            return self.phi * t % p
        return self.phi * (self.params.rpow(self.rho * t) - 1) % p * self.inv_step_minus_one % p

    def shift(self, state: PrefixState, q: int) -> PrefixState:
        """Prefix state q periods after (q < 0: before) the given one."""
        params = self.params
        p = params.p
        val, pw, ipw = state
        if q >= 0:
            e = q * self.rho
            return (val + pw * self.power(q)) % p, pw * params.rpow(e) % p, ipw * params.rinvpow(e) % p
        e = -q * self.rho
        pw2 = pw * params.rinvpow(e) % p
        return (val - pw2 * self.power(-q)) % p, pw2, ipw * params.rpow(e) % p


def lemma4_candidate(progression: MatchProgression, rho: int, r: int) -> int | None:
    """The r-th last element of a progression, or None if it is shorter than r."""
    if r < 1 or progression.count(rho) < r:
        return None
    return progression.lp - (r - 1) * rho


class ProgressionStore:
    """Progressions of one string's matches, sorted by first start.

    Starts may arrive out of order (delayed suffix updates); a start that
    already belongs to a progression is ignored. Tagged adds (used for the
    end positions of suffix chains, tagged with the matched length) must
    arrive in order.
    """

    def __init__(self, period: PeriodString):
        self.period = period
        self.rho = period.rho
        self.progs: list[MatchProgression] = []
        self.max_progs = 0
        self.added = 0

    def __len__(self) -> int:
        return len(self.progs)

    def contains(self, start: int) -> bool:
        rho = self.rho
        return any(pr.fp <= start <= pr.lp and (start - pr.fp) % rho == 0 for pr in self.progs)

    def add(self, start: int, state: PrefixState, expire_before: int | None = None, tag: int | None = None) -> bool:
        rho = self.rho
        progs = self.progs
        if expire_before is not None:
            while progs and progs[0].lp < expire_before:
                progs.pop(0)
        if tag is not None:
            if progs and start <= progs[-1].lp:
                raise ValueError("tagged positions must arrive in increasing order")
            if progs and start - progs[-1].lp == rho:
                last = progs[-1]
                last.lp = start
                if tag > last.tags[-1][0]:
                    last.tags.append((tag, start))
            else:
                pr = MatchProgression(start, start, *state)
                pr.tags = [(tag, start)]
                progs.append(pr)
        elif progs and start > progs[-1].lp:
            last = progs[-1]
            if start - last.lp == rho:
                last.lp = start
            else:
                progs.append(MatchProgression(start, start, *state))
        elif not progs:
            progs.append(MatchProgression(start, start, *state))
        else:
            if self.contains(start):
                return False
            i = bisect_right([pr.fp for pr in progs], start)
            if i > 0 and start - progs[i - 1].lp == rho:
                progs[i - 1].lp = start
            elif i < len(progs) and progs[i].fp - start == rho:
                pr = progs[i]
                pr.fp, pr.val, pr.pw, pr.ipw = start, *state
            else:
                progs.insert(i, MatchProgression(start, start, *state))
        self.added += 1
        self.max_progs = max(self.max_progs, len(progs))
        return True

    def state_at(self, pr: MatchProgression, start: int) -> PrefixState:
        q, rem = divmod(start - pr.fp, self.rho)
        if rem:
            raise ValueError("start is not aligned with the progression")
        return self.period.shift((pr.val, pr.pw, pr.ipw), q)
