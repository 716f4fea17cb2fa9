"""Karp-Rabin fingerprints over byte strings.

phi(s_1..s_l) = sum s_i * r**i (mod p), with positions counted from 1.
Fingerprints carry their length so that concatenation and stripping can
be done without any side information.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import NamedTuple

MERSENNE61 = (1 << 61) - 1
DEFAULT_MAX_STREAM_LEN = 1 << 20


class EvictedPositionError(LookupError):
    """Requested prefix is no longer held by the circular buffer."""


class Fingerprint(NamedTuple):
    value: int
    len: int


EMPTY = Fingerprint(0, 0)


def _is_probable_prime(n: int) -> bool:
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class FpParams:
    """Modulus, random base and cached powers of the base.

    ``max_stream_len`` is the cap N on the stream length; the collision
    bound only holds while p > N**3, which is checked unless
    ``check_bound`` is switched off (tiny test primes).
    """

    p: int = MERSENNE61
    r: int = 0
    max_stream_len: int = DEFAULT_MAX_STREAM_LEN
    table_size: int = 0
    _pow: list = field(default_factory=list, repr=False, compare=False)
    _ipow: list = field(default_factory=list, repr=False, compare=False)

    @classmethod
    def create(
        cls,
        seed: int = 0,
        p: int = MERSENNE61,
        max_stream_len: int = DEFAULT_MAX_STREAM_LEN,
        table_size: int = 4096,
        r: int | None = None,
        check_bound: bool = True,
    ) -> "FpParams":
        if not _is_probable_prime(p):
            raise ValueError(f"modulus {p} is not prime")
        if check_bound and p <= max_stream_len**3:
            raise ValueError(f"modulus {p} must exceed max_stream_len**3")
        if r is None:
            r = random.Random(seed).randrange(1, p)
        if not 1 <= r < p:
            raise ValueError("base must lie in [1, p-1]")
        rinv = pow(r, p - 2, p)
        pw = [1] * (table_size + 1)
        ipw = [1] * (table_size + 1)
        for i in range(1, table_size + 1):
            pw[i] = pw[i - 1] * r % p
            ipw[i] = ipw[i - 1] * rinv % p
        return cls(p, r, max_stream_len, table_size, pw, ipw)

    def rpow(self, e: int) -> int:
        if 0 <= e <= self.table_size:
            return self._pow[e]
        return pow(self.r, e, self.p)

    def rinvpow(self, e: int) -> int:
        if 0 <= e <= self.table_size:
            return self._ipow[e]
        return pow(self.r, -e, self.p)


def fp_of_string(s: bytes, params: FpParams) -> Fingerprint:
    p, r = params.p, params.r
    acc = 0
    for c in reversed(s):
        acc = (acc + c) * r % p
    return Fingerprint(acc, len(s))


def fp_concat(u: Fingerprint, v: Fingerprint, params: FpParams) -> Fingerprint:
    return Fingerprint((u.value + params.rpow(u.len) * v.value) % params.p, u.len + v.len)


def fp_strip_prefix(uv: Fingerprint, u: Fingerprint, params: FpParams) -> Fingerprint:
    """Fingerprint of V given those of UV and U."""
    if u.len > uv.len:
        raise ValueError("prefix longer than the whole string")
    value = (uv.value - u.value) * params.rinvpow(u.len) % params.p
    return Fingerprint(value, uv.len - u.len)


def fp_strip_suffix(uv: Fingerprint, v: Fingerprint, params: FpParams) -> Fingerprint:
    """Fingerprint of U given those of UV and V."""
    if v.len > uv.len:
        raise ValueError("suffix longer than the whole string")
    ulen = uv.len - v.len
    value = (uv.value - params.rpow(ulen) * v.value) % params.p
    return Fingerprint(value, ulen)


def fp_power(u: Fingerprint, times: int, params: FpParams) -> Fingerprint:
    """Fingerprint of U repeated ``times`` times, in O(1) modular operations.

    phi(U^t) = phi(U) * (1 + r^l + ... + r^((t-1)l)), a geometric series.
    """
    if times <= 0 or u.len == 0:
        return Fingerprint(0, 0)
    p = params.p
    step = params.rpow(u.len)
    if step == 1:
        return Fingerprint(u.value * times % p, u.len * times)
    total = (params.rpow(u.len * times) - 1) * pow(step - 1, p - 2, p) % p
    return Fingerprint(u.value * total % p, u.len * times)


class PrefixFpBuffer:
    """Circular buffer holding phi(t_1..t_j) for the ``capacity`` latest j.

    Alongside every prefix value the buffer keeps r**j and r**-j so that
    a substring fingerprint costs two multiplications and no exponentiation.
    Position 0 (the empty prefix) is retrievable until it is evicted like
    any other position.
    """

    def __init__(self, capacity: int, params: FpParams):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.params = params
        self.capacity = capacity
        size = capacity + 1
        self._val = [0] * size
        self._pow = [1] * size
        self._ipow = [1] * size
        self._size = size
        self.position = 0
        self._p = params.p
        self._r = params.r
        self._rinv = pow(params.r, params.p - 2, params.p)

    def push(self, c: int) -> None:
        p = self._p
        size = self._size
        prev = self.position % size
        self.position += 1
        cur = self.position % size
        pw = self._pow[prev] * self._r % p
        self._pow[cur] = pw
        self._ipow[cur] = self._ipow[prev] * self._rinv % p
        self._val[cur] = (self._val[prev] + c * pw) % p

    def _slot(self, j: int) -> int:
        if j < 0 or j > self.position or j <= self.position - self.capacity:
            raise EvictedPositionError(f"prefix {j} not in window ending at {self.position}")
        return j % self._size

    def prefix(self, j: int) -> Fingerprint:
        return Fingerprint(self._val[self._slot(j)], j)

    def prefix_state(self, j: int) -> tuple[int, int, int]:
        """(phi(t_1..t_j), r**j, r**-j) for an in-window prefix."""
        s = self._slot(j)
        return self._val[s], self._pow[s], self._ipow[s]

    def window_value(self, start: int, end: int) -> int:
        """Raw fingerprint value of t_start..t_end (1-based, inclusive)."""
        pos = self.position
        a = start - 1
        if a < 0 or end > pos or a <= pos - self.capacity or end < a:
            raise EvictedPositionError(f"window {start}..{end} not held at position {pos}")
        size = self._size
        a %= size
        return (self._val[end % size] - self._val[a]) * self._ipow[a] % self._p

    def substring_fp(self, start: int, end: int) -> Fingerprint:
        if start > end + 1:
            raise ValueError("start must not exceed end + 1")
        return Fingerprint(self.window_value(start, end), end - start + 1)
