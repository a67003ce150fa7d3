"""Sub-sentence pair extraction from word-aligned sentence pairs.

Links are 1-based ``(source, target)`` tuples internally. Pharaoh files on
disk are 0-based (``0-0 1-2 ...``) and are shifted when read.

A prefix pair ``(x_1..x_i, y_1..y_j)`` is a boundary when ``(i, j)`` is a link,
no source token up to ``i`` links past ``j``, and no source token after ``i``
links into ``y_1..y_j``. In other words, the two prefixes are translations
of each other and nothing crosses the cut.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

from .stream import FormatError

COMMAS = frozenset({",", "，", "、"})


@dataclass(frozen=True)
class AlignmentSet:
    links: frozenset
    n: int
    m: int

    def __post_init__(self):
        for a, b in self.links:
            if not (1 <= a <= self.n and 1 <= b <= self.m):
                raise ValueError(f"link ({a}, {b}) outside a {self.n}x{self.m} sentence pair")

    @classmethod
    def of(cls, links: Iterable[tuple[int, int]], n: int, m: int) -> "AlignmentSet":
        return cls(frozenset((int(a), int(b)) for a, b in links), n, m)

    def __contains__(self, link):
        return link in self.links

    def __len__(self):
        return len(self.links)


@dataclass(frozen=True)
class SubSentencePair:
    source_prefix: tuple[str, ...]
    target_prefix: tuple[str, ...]
    split_kind: str  # "subsentence" (comma-bounded) or "segment"

    def __post_init__(self):
        if not self.source_prefix or not self.target_prefix:
            raise ValueError("both prefixes must be non-empty")

    @property
    def split_point(self) -> tuple[int, int]:
        return len(self.source_prefix), len(self.target_prefix)


@dataclass(frozen=True)
class CorpusRecord:
    source: tuple[str, ...]
    target: tuple[str, ...]
    # 0 = given target prefix (no loss), 1 = trained position; None for partial records
    loss_mask: tuple[int, ...] | None = None

    def to_line(self) -> str:
        cols = [" ".join(self.source), " ".join(self.target)]
        if self.loss_mask is not None:
            cols.append(" ".join(map(str, self.loss_mask)))
        return "\t".join(cols)


def parse_pharaoh(line: str, n: int | None = None, m: int | None = None) -> list[tuple[int, int]]:
    """Parse ``a-b`` pairs (0-based) into 1-based links, checking bounds if given."""
    links = []
    for item in line.split():
        try:
            a, b = item.split("-")
            a, b = int(a) + 1, int(b) + 1
        except ValueError:
            raise FormatError(f"malformed alignment link {item!r}") from None
        if a < 1 or b < 1 or (n is not None and a > n) or (m is not None and b > m):
            raise FormatError(f"alignment link {item!r} out of range for {n}x{m}")
        links.append((a, b))
    return links


def format_pharaoh(links: Iterable[tuple[int, int]]) -> str:
    return " ".join(f"{a - 1}-{b - 1}" for a, b in sorted(links))


def is_pair_boundary(i: int, j: int, A: AlignmentSet | Iterable, n: int, m: int) -> bool:
    if not (1 <= i <= n and 1 <= j <= m):
        raise IndexError(f"({i}, {j}) outside a {n}x{m} sentence pair")
    links = A.links if isinstance(A, AlignmentSet) else set(A)
    if (i, j) not in links:
        return False
    for a, b in links:
        if a <= i and b > j:
            return False
        if a > i and b <= j:
            return False
    return True


def boundary_points(A: AlignmentSet) -> list[tuple[int, int]]:
    """All boundary ``(i, j)`` in O(|A| + n) using prefix maxima/suffix minima.

    For a boundary, ``j`` is the largest target index linked from ``x_1..x_i``
    and every later source token links strictly after ``j``.
    """
    n = A.n
    max_b = [0] * (n + 2)
    min_b = [A.m + 1] * (n + 2)
    for a, b in A.links:
        max_b[a] = max(max_b[a], b)
        min_b[a] = min(min_b[a], b)
    for a in range(1, n + 1):
        max_b[a] = max(max_b[a], max_b[a - 1])
    for a in range(n, 0, -1):
        min_b[a] = min(min_b[a], min_b[a + 1])
    out = []
    for i in range(1, n + 1):
        j = max_b[i]
        if j and (i, j) in A.links and min_b[i + 1] > j:
            out.append((i, j))
    return out


def extract_pairs(
    X: Sequence[str],
    Y: Sequence[str],
    A: AlignmentSet,
    comma_predicate: Callable[[str], bool] = COMMAS.__contains__,
) -> list[SubSentencePair]:
    if (A.n, A.m) != (len(X), len(Y)):
        raise ValueError("alignment dimensions do not match the sentence pair")
    pairs = []
    for i, j in boundary_points(A):
        kind = "subsentence" if comma_predicate(X[i - 1]) else "segment"
        pairs.append(SubSentencePair(tuple(X[:i]), tuple(Y[:j]), kind))
    return pairs


def _check_split(X, Y, A: AlignmentSet, split_point):
    if split_point is None:
        raise ValueError("a split point is required")
    i, j = split_point
    if not (1 <= i <= len(X) and 1 <= j <= len(Y)) or not is_pair_boundary(i, j, A, len(X), len(Y)):
        raise ValueError(f"{split_point} is not a sub-sentence boundary")
    return i, j


def make_partial_corpus(X, Y, A: AlignmentSet, split_point) -> CorpusRecord:
    """Training record for partial decoding: both sides cut at the boundary."""
    i, j = _check_split(X, Y, A, split_point)
    return CorpusRecord(tuple(X[:i]), tuple(Y[:j]))


def make_context_corpus(X, Y, A: AlignmentSet, split_point) -> CorpusRecord:
    """Training record for context-aware decoding.

    The full pair is kept; target positions ``1..j`` are marked as a given
    prefix. A split at the last target token leaves nothing to train on and
    is rejected.
    """
    i, j = _check_split(X, Y, A, split_point)
    if j >= len(Y):
        raise ValueError("split leaves no target tokens to train on")
    mask = (0,) * j + (1,) * (len(Y) - j)
    return CorpusRecord(tuple(X), tuple(Y), mask)
