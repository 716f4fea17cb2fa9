"""Compacted tries with a coloured-ancestor overlay.

Two consumers:

* ``ZFastTrie`` stores reversed pattern heads and answers exit-node
  queries by fat binary search over prefix signatures. The signature of a
  trie string is the fingerprint of its reverse, so the signature of any
  prefix of a reversed text window is a plain window fingerprint and comes
  straight out of the prefix buffer.
* ``CompactQTrie`` stores reversed Q strings (edge labels dropped) and only
  serves as a host tree for coloured-ancestor queries.
"""

from __future__ import annotations

from bisect import bisect_right
from typing import Callable, Hashable, Sequence

from .krhash import FpParams, fp_of_string

ROOT = 0


class FrozenError(RuntimeError):
    pass


class SessionError(RuntimeError):
    pass


def two_fattest(a: int, b: int) -> int:
    """The number in (a, b] divisible by the largest power of two."""
    if b <= a:
        raise ValueError("empty interval")
    if a < 0:
        return 0 if b >= 0 else b
    mask = -1 << ((a ^ b).bit_length() - 1)
    return b & mask


def build_compacted(strings: Sequence[bytes]) -> tuple[list[int], list[int], list[int], dict[bytes, int]]:
    """Compacted trie over distinct non-empty strings.

    Returns (parent, depth, rep, node_of) where rep[v] indexes a string
    whose prefix of length depth[v] labels v, and node_of maps each input
    string to its node. Every input string gets its own node.
    """
    order = sorted(set(strings))
    parent, depth, rep = [-1], [0], [-1]
    node_of: dict[bytes, int] = {}
    src = {s: i for i, s in enumerate(strings)}
    stack = [ROOT]
    prev = b""
    for s in order:
        if not s:
            node_of[s] = ROOT
            continue
        lcp = 0
        lim = min(len(prev), len(s))
        while lcp < lim and prev[lcp] == s[lcp]:
            lcp += 1
        last = -1
        while depth[stack[-1]] > lcp:
            last = stack.pop()
        if depth[stack[-1]] < lcp:
            b = len(parent)
            parent.append(stack[-1])
            depth.append(lcp)
            rep.append(rep[last])
            parent[last] = b
            stack.append(b)
        v = len(parent)
        parent.append(stack[-1])
        depth.append(len(s))
        rep.append(src[s])
        node_of[s] = v
        stack.append(v)
        prev = s
    return parent, depth, rep, node_of


class ColourOverlay:
    """Nodes marked with colours; Find(u, c) = lowest ancestor-or-self of u marked c.

    Per colour, the marked nodes are sorted by DFS entry time. A query
    takes the last marked node entering before u and, if it is not an
    ancestor of u, climbs that node's same-colour ancestors with jump
    pointers. O(log) per query.
    """

    def __init__(self, parent: Sequence[int]):
        self.parent = list(parent)
        self._marks: dict[Hashable, set[int]] = {}
        self.frozen = False
        self.total_marks = 0

    def mark(self, node: int, colour: Hashable) -> None:
        if self.frozen:
            raise FrozenError("overlay is frozen")
        nodes = self._marks.setdefault(colour, set())
        if node not in nodes:
            nodes.add(node)
            self.total_marks += 1

    def freeze(self) -> "ColourOverlay":
        if self.frozen:
            return self
        n = len(self.parent)
        children: list[list[int]] = [[] for _ in range(n)]
        for v in range(1, n):
            children[self.parent[v]].append(v)
        tin, tout = [0] * n, [0] * n
        clock = 0
        stack = [(ROOT, 0)]
        while stack:
            v, i = stack.pop()
            if i == 0:
                tin[v] = clock
                clock += 1
            if i < len(children[v]):
                stack.append((v, i + 1))
                stack.append((children[v][i], 0))
            else:
                tout[v] = clock
        self.tin, self.tout = tin, tout
        self._colour_id: dict[Hashable, int] = {}
        self._lists: list[tuple[list[int], list[int], list[list[int]]]] = []
        for colour, nodes in self._marks.items():
            srt = sorted(nodes, key=tin.__getitem__)
            tins = [tin[v] for v in srt]
            up0 = [-1] * len(srt)
            chain: list[int] = []
            for i, v in enumerate(srt):
                while chain and tout[srt[chain[-1]]] <= tin[v]:
                    chain.pop()
                up0[i] = chain[-1] if chain else -1
                chain.append(i)
            jumps = [up0]
            while any(x != -1 for x in jumps[-1]):
                prev = jumps[-1]
                jumps.append([prev[x] if x != -1 else -1 for x in prev])
            self._colour_id[colour] = len(self._lists)
            self._lists.append((srt, tins, jumps))
        self.frozen = True
        self.queries = 0
        return self

    @property
    def num_colours(self) -> int:
        return len(self._marks)

    def _contains(self, a: int, u: int) -> bool:
        return self.tin[a] <= self.tin[u] < self.tout[a]

    def find(self, u: int, colour: Hashable) -> int | None:
        if not self.frozen:
            raise FrozenError("freeze the overlay before querying")
        self.queries += 1
        cid = self._colour_id.get(colour)
        if cid is None:
            return None
        srt, tins, jumps = self._lists[cid]
        i = bisect_right(tins, self.tin[u]) - 1
        if i < 0:
            return None
        if self._contains(srt[i], u):
            return srt[i]
        for level in reversed(jumps):
            j = level[i]
            if j != -1 and not self._contains(srt[j], u):
                i = j
        i = jumps[0][i]
        if i == -1 or not self._contains(srt[i], u):
            return None
        return srt[i]

    def find_naive(self, u: int, colour: Hashable) -> int | None:
        """Walk-to-root reference used by tests."""
        nodes = self._marks.get(colour, ())
        v = u
        while v != -1:
            if v in nodes:
                return v
            v = self.parent[v]
        return None


def colour_mark(overlay: ColourOverlay, node: int, colour: Hashable) -> ColourOverlay:
    overlay.mark(node, colour)
    return overlay


def colour_find(overlay: ColourOverlay, u: int, colour: Hashable) -> int | None:
    return overlay.find(u, colour)


def _reverse_sig(s: bytes, params: FpParams) -> int:
    return fp_of_string(s[::-1], params).value


class ZFastTrie:
    """Probabilistic z-fast trie keyed by reverse-fingerprint signatures.

    Each node v is registered under its handle: the 2-fattest length in
    (depth(parent), depth(v)], together with the signature of its label
    cut to that length. ``keep_strings`` retains the labels so that tests
    can log signature collisions.
    """

    COMPARISON_FACTOR = 2

    def __init__(self, strings: Sequence[bytes], params: FpParams, keep_strings: bool = True):
        self.params = params
        strings = list(dict.fromkeys(strings))
        parent, depth, rep, node_of = build_compacted(strings)
        self.parent, self.depth = parent, depth
        self.node_of = node_of
        self.handles: dict[tuple[int, int], int] = {}
        self.full_sig = [0] * len(parent)
        for v in range(1, len(parent)):
            label = strings[rep[v]][: depth[v]]
            h = two_fattest(depth[parent[v]], depth[v])
            self.handles[(h, _reverse_sig(label[:h], params))] = v
            self.full_sig[v] = _reverse_sig(label, params)
        self.labels = [strings[rep[v]][: depth[v]] if v else b"" for v in range(len(parent))] if keep_strings else None
        self.max_depth = max(depth)
        self.collisions = 0

    @property
    def num_nodes(self) -> int:
        return len(self.parent)

    def comparison_bound(self, length: int) -> int:
        return self.COMPARISON_FACTOR * (max(1, length).bit_length() + 1)

    def open_session(self, sig: Callable[[int], int], length: int, query: bytes | None = None) -> "ExitSearch":
        return ExitSearch(self, sig, length, query)

    def exit_node(self, sig: Callable[[int], int], length: int, query: bytes | None = None) -> tuple[int, int]:
        """Eager search; returns (exit node, signature comparisons)."""
        s = self.open_session(sig, length, query)
        node = s.step(1 << 30)
        return node, s.comparisons

    def exit_node_scan(self, x: bytes) -> int:
        """Oracle: deepest node whose label is a prefix of x, by linear scan."""
        if self.labels is None:
            raise RuntimeError("scan oracle needs keep_strings=True")
        best = ROOT
        for v in range(1, self.num_nodes):
            if self.depth[v] > self.depth[best] and x.startswith(self.labels[v]):
                best = v
        return best


class ExitSearch:
    """Fat binary search for an exit node that can be advanced a few comparisons at a time."""

    def __init__(self, trie: ZFastTrie, sig: Callable[[int], int], length: int, query: bytes | None):
        self.trie = trie
        self.sig = sig
        self.length = length
        self.query = query
        self.lo, self.hi = 0, min(length, trie.max_depth)
        self.found = ROOT
        self.comparisons = 0
        self.result: int | None = None
        self._verifying = False
        self.closed = False

    @property
    def done(self) -> bool:
        return self.result is not None

    def _log_collision(self, v: int, f: int) -> None:
        t = self.trie
        if self.query is not None and t.labels is not None and self.query[:f] != t.labels[v][:f]:
            t.collisions += 1

    def step(self, budget: int) -> int | None:
        if self.closed:
            raise SessionError("exit-node session already finished")
        t = self.trie
        sig = self.sig
        handles = t.handles
        lo, hi = self.lo, self.hi
        while budget > 0 and self.result is None:
            if not self._verifying:
                if lo >= hi:
                    self._verifying = True
                    continue
                mask = -1 << ((lo ^ hi).bit_length() - 1) if lo >= 0 else 0
                f = hi & mask
                self.comparisons += 1
                budget -= 1
                v = handles.get((f, sig(f)))
                if v is not None:
                    self._log_collision(v, f)
                    self.found = v
                    lo = t.depth[v]
                else:
                    hi = f - 1
            else:
                v = self.found
                if v == ROOT:
                    self.result = ROOT
                    break
                d = t.depth[v]
                if d > self.length:
                    self.result = t.parent[v]
                    break
                self.comparisons += 1
                budget -= 1
                if sig(d) == t.full_sig[v]:
                    self._log_collision(v, d)
                    self.result = v
                else:
                    self.result = t.parent[v]
        self.lo, self.hi = lo, hi
        if self.result is not None:
            self.closed = True
        return self.result


def zfast_build(strings: Sequence[bytes], params: FpParams, keep_strings: bool = True) -> ZFastTrie:
    return ZFastTrie(strings, params, keep_strings)


def zfast_exit_node(trie: ZFastTrie, sig: Callable[[int], int], max_len: int) -> int:
    return trie.exit_node(sig, max_len)[0]


def zfast_exit_node_stepped(session: ExitSearch | None, budget: int) -> int | None:
    """Advance a session; None while pending."""
    if session is None:
        raise SessionError("no exit-node session open")
    return session.step(budget)


class CompactQTrie:
    """Compacted trie of reversed Q strings; labels are not kept."""

    def __init__(self, qs: Sequence[bytes]):
        rev = [q[::-1] for q in qs]
        parent, depth, _rep, node_of = build_compacted(rev)
        self.parent, self.depth = parent, depth
        self.node_for = [node_of[r] for r in rev]
        self.overlay = ColourOverlay(parent)

    @property
    def num_nodes(self) -> int:
        return len(self.parent)


def qtrie_build(qs: Sequence[bytes], colours: Sequence[Hashable]) -> CompactQTrie:
    trie = CompactQTrie(qs)
    for i, c in enumerate(colours):
        trie.overlay.mark(trie.node_for[i], c)
    trie.overlay.freeze()
    return trie
