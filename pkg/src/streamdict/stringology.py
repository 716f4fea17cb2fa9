"""Offline string utilities used while preprocessing the dictionary."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple


class PeriodInfo(NamedTuple):
    period: int
    is_properly_periodic: bool


@dataclass(frozen=True)
class Rung:
    length: int
    period: int


@dataclass(frozen=True)
class PrefixLadder:
    """Power-of-two prefixes of a pattern, shortest first."""

    rungs: tuple[Rung, ...]

    @property
    def lengths(self) -> list[int]:
        return [r.length for r in self.rungs]


def failure_function(x: bytes) -> list[int]:
    """KMP border table: fail[i] = length of the longest proper border of x[:i+1]."""
    fail = [0] * len(x)
    k = 0
    for i in range(1, len(x)):
        while k and x[i] != x[k]:
            k = fail[k - 1]
        if x[i] == x[k]:
            k += 1
        fail[i] = k
    return fail


def period_of(x: bytes) -> PeriodInfo:
    if not x:
        raise ValueError("period of an empty string is undefined")
    rho = len(x) - failure_function(x)[-1]
    return PeriodInfo(rho, 2 * rho <= len(x))


def prefix_periods(x: bytes) -> list[int]:
    """Period of every prefix: out[i] is the period of x[:i+1]."""
    return [i + 1 - b for i, b in enumerate(failure_function(x))]


def is_suffix(a: bytes, b: bytes) -> bool:
    return len(a) <= len(b) and b.endswith(a)


def rounded_log2(m: int) -> int:
    """log2 m rounded to the nearest integer, never below 1."""
    if m <= 1:
        return 1
    return max(1, round(math.log2(m)))


def build_ladder(pattern: bytes, k: int, L: int, kL: int | None = None) -> PrefixLadder:
    """Rungs of length 2**j with 1 <= 2**j <= |P| - 2kL."""
    kL = k * L if kL is None else kL
    limit = len(pattern) - 2 * kL
    if limit < 1:
        raise ValueError("pattern too short for a prefix ladder (belongs to the short class)")
    periods = prefix_periods(pattern)
    rungs = []
    length = 1
    while length <= limit:
        rungs.append(Rung(length, periods[length - 1]))
        length *= 2
    return PrefixLadder(tuple(rungs))


def is_period(x: bytes, p: int) -> bool:
    return 0 < p <= len(x) and x[p:] == x[: len(x) - p]


def periodicity_check(x: bytes, p1: int, p2: int) -> bool:
    """Whether gcd(p1, p2) is a period of x, for periods with p1 + p2 <= |x|."""
    if p1 + p2 > len(x):
        raise ValueError("periods too long for the periodicity lemma")
    if not (is_period(x, p1) and is_period(x, p2)):
        raise ValueError("arguments are not periods of x")
    return is_period(x, math.gcd(p1, p2))


def periodic_prefix_length(x: bytes, rho: int) -> int:
    """Length of the longest prefix of x that has period rho."""
    n = rho
    while n < len(x) and x[n] == x[n - rho]:
        n += 1
    return min(n, len(x))
