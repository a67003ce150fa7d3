"""Latency metrics: Equilibrium Efficiency and average lagging.

Equilibrium Efficiency treats a sentence as ``n`` read/write segments with
source lengths ``LX_i`` and target lengths ``LY_i``. Playing the target of
segment ``i`` overlaps with listening to the source of segment ``i + 1``;
whatever is not absorbed accumulates as a backlog::

    S(0) = 0
    S(i) = max(S(i-1) + r * (LY_i - LX_{i+1}), 0)     i = 1 .. n-1
    EE   = 1 / (S(n-1) + LY_n)

For ``i = n - 1`` the recursion reads ``LX_n``, the last segment's own source
length, so no padding is involved. ``1 / EE`` reads as "words of lag".
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

DEFAULT_R = 0.3


@dataclass(frozen=True)
class EEParams:
    r: float = DEFAULT_R

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"r must be positive, got {self.r}")


def _check_segments(segments: Sequence[tuple[int, int]], r: float):
    if not segments:
        raise ValueError("equilibrium efficiency needs at least one segment")
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    for i, (lx, ly) in enumerate(segments, start=1):
        if lx < 1 or ly < 0:
            raise ValueError(f"segment {i}: need LX >= 1 and LY >= 0, got ({lx}, {ly})")


def backlog_trace(segments: Sequence[tuple[int, int]], r: float = DEFAULT_R) -> list[float]:
    """``[S(0), S(1), ..., S(n-1)]``."""
    _check_segments(segments, r)
    s = [0.0]
    for i in range(len(segments) - 1):
        ly_i = segments[i][1]
        lx_next = segments[i + 1][0]
        s.append(max(s[-1] + r * (ly_i - lx_next), 0.0))
    return s


def inverse_ee(segments: Sequence[tuple[int, int]], r: float = DEFAULT_R) -> float:
    """``S(n-1) + LY_n``, the lag in target words."""
    s = backlog_trace(segments, r)
    total = s[-1] + segments[-1][1]
    if total == 0:
        raise ValueError("equilibrium efficiency undefined: final segment is empty and no backlog remains")
    return total


def equilibrium_efficiency(segments: Sequence[tuple[int, int]], r: float = DEFAULT_R) -> float:
    return 1.0 / inverse_ee(segments, r)


def lag_terms(g: Sequence[int], ratio: float = 1.0) -> list[float]:
    """Per target position lag ``g(t) - (t-1) / ratio``, without any cut-off."""
    return [gt - t / ratio for t, gt in enumerate(g)]


def average_lagging(g: Sequence[int], source_len: int, target_len: int | None = None) -> float:
    """Average lagging of a read schedule.

    ``g[t-1]`` is the number of source tokens read when target token ``t`` was
    written. The mean of ``g(t) - (t-1)/ratio`` runs up to the first target
    position that has read the whole source (all positions if none has),
    where ``ratio = target_len / source_len`` and ``target_len`` defaults to
    ``len(g)``.
    """
    if len(g) == 0:
        raise ValueError("average lagging needs at least one target token")
    if source_len < 1:
        raise ValueError("source_len must be >= 1")
    if any(b < a for a, b in zip(g, g[1:])):
        raise ValueError("read counts must be non-decreasing")
    if g[-1] > source_len or g[0] < 0:
        raise ValueError("read counts must lie in [0, source_len]")
    ratio = (len(g) if target_len is None else target_len) / source_len
    cutoff = next((t + 1 for t, gt in enumerate(g) if gt >= source_len), len(g))
    terms = lag_terms(g[:cutoff], ratio)
    return sum(terms) / cutoff


def read_counts(segments: Sequence[tuple[int, int]]) -> list[int]:
    """Expand (LX, LY) segments into per-target-token read counts."""
    g = []
    read = 0
    for lx, ly in segments:
        read += lx
        g.extend([read] * ly)
    return g
