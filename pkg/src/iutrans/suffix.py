"""Suffix array, LCP array and constant-time LCP queries over token sequences."""
from __future__ import annotations

from typing import Hashable, Sequence


def suffix_array(seq: Sequence[Hashable]) -> list[int]:
    """Prefix-doubling construction, O(n log^2 n)."""
    n = len(seq)
    if n == 0:
        return []
    alphabet = {tok: i for i, tok in enumerate(sorted(set(seq), key=repr))}
    rank = [alphabet[t] for t in seq]
    sa = list(range(n))
    k = 1
    while True:
        key = lambda i: (rank[i], rank[i + k] if i + k < n else -1)  # noqa: E731
        sa.sort(key=key)
        new = [0] * n
        for a, b in zip(sa, sa[1:]):
            new[b] = new[a] + (key(a) != key(b))
        rank = new
        if rank[sa[-1]] == n - 1:
            return sa
        k *= 2


def lcp_array(seq: Sequence[Hashable], sa: Sequence[int]) -> list[int]:
    """Kasai: ``lcp[r]`` is the common prefix length of suffixes ``sa[r-1]`` and ``sa[r]``."""
    n = len(seq)
    rank = [0] * n
    for r, i in enumerate(sa):
        rank[i] = r
    lcp = [0] * n
    h = 0
    for i in range(n):
        r = rank[i]
        if r == 0:
            h = 0
            continue
        j = sa[r - 1]
        while i + h < n and j + h < n and seq[i + h] == seq[j + h]:
            h += 1
        lcp[r] = h
        if h:
            h -= 1
    return lcp


class SuffixIndex:
    """LCP of any two suffixes via a sparse table over the LCP array."""

    def __init__(self, seq: Sequence[Hashable]):
        self.seq = list(seq)
        self.n = len(self.seq)
        self.sa = suffix_array(self.seq)
        self.rank = [0] * self.n
        for r, i in enumerate(self.sa):
            self.rank[i] = r
        lcp = lcp_array(self.seq, self.sa)
        self._table = [lcp]
        j = 1
        while (1 << j) <= self.n:
            prev = self._table[-1]
            half = 1 << (j - 1)
            self._table.append([min(prev[i], prev[i + half]) for i in range(self.n - (1 << j) + 1)])
            j += 1

    def lcp(self, i: int, j: int) -> int:
        if i == j:
            return self.n - i
        if i >= self.n or j >= self.n:
            return 0
        a, b = sorted((self.rank[i], self.rank[j]))
        a += 1
        level = (b - a + 1).bit_length() - 1
        row = self._table[level]
        return min(row[a], row[b - (1 << level) + 1])
