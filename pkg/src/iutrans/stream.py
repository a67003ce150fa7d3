"""Data model for token streams, information units and translation timelines.

A stream file holds one record per line::

    utt_id <TAB> ts_ms <TAB> token

A JSON object with the keys ``utt``, ``ts`` and ``token`` is accepted in place
of the tab-separated form. Blank lines and lines starting with ``#`` are
skipped. Token indices restart at 0 for every utterance.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from itertools import groupby
from typing import Iterable, Sequence


class FormatError(ValueError):
    """Raised for malformed input files."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Token:
    surface: str
    ts_ms: int
    index: int

    def __post_init__(self):
        if not self.surface or any(ch.isspace() for ch in self.surface):
            raise ValueError(f"invalid token surface {self.surface!r}")


@dataclass(frozen=True)
class StreamEvent:
    utt_id: str
    token: Token


@dataclass(frozen=True)
class InformationUnit:
    tokens: tuple[Token, ...]
    sentence_id: int
    iu_index_in_sentence: int
    is_sentence_final: bool

    def __post_init__(self):
        if not self.tokens:
            raise ValueError("an information unit needs at least one token")
        idx = [t.index for t in self.tokens]
        if idx != list(range(idx[0], idx[0] + len(idx))):
            raise ValueError(f"token indices are not contiguous: {idx}")

    @property
    def surfaces(self) -> list[str]:
        return [t.surface for t in self.tokens]

    @property
    def is_sentence_initial(self) -> bool:
        return self.iu_index_in_sentence == 0

    def __len__(self):
        return len(self.tokens)


@dataclass(frozen=True)
class Segment:
    """One closed read/write step of a timeline.

    ``source_len`` and ``target_len`` are the LX / LY counts consumed by the
    latency metrics. ``emitted`` holds the target tokens appended in this step
    after ``retracted`` previously displayed tokens were withdrawn.
    """

    source_len: int
    target_len: int
    read_end_ms: int
    write_end_ms: int
    emitted: tuple[str, ...] = ()
    retracted: int = 0
    sentence_id: int = 0
    sentence_final: bool = False

    def __post_init__(self):
        if self.source_len < 1:
            raise ValueError("a closed segment must consume at least one source token")
        if self.target_len < 0 or self.retracted < 0:
            raise ValueError("negative target or retraction count")


@dataclass
class TranslationTimeline:
    segments: list[Segment] = field(default_factory=list)
    committed_target: list[str] = field(default_factory=list)
    k_discard: int = 0

    @property
    def retracted_counts(self) -> list[int]:
        return [s.retracted for s in self.segments]

    @property
    def source_consumed(self) -> int:
        return sum(s.source_len for s in self.segments)

    def lengths(self) -> list[tuple[int, int]]:
        """(LX_i, LY_i) pairs in order."""
        return [(s.source_len, s.target_len) for s in self.segments]


def _parse_line(line: str, lineno: int) -> tuple[str, int, str]:
    if line.lstrip().startswith("{"):
        try:
            rec = json.loads(line)
            utt, ts, tok = rec["utt"], rec["ts"], rec["token"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise FormatError(f"bad JSON record ({exc})", lineno) from None
        utt = str(utt)
    else:
        parts = line.split("\t")
        if len(parts) != 3:
            raise FormatError(f"expected 3 tab-separated fields, got {len(parts)}", lineno)
        utt, ts, tok = parts
    try:
        ts = int(ts)
    except (TypeError, ValueError):
        raise FormatError(f"timestamp {ts!r} is not an integer", lineno) from None
    if not isinstance(tok, str) or not tok.strip():
        raise FormatError("empty token", lineno)
    tok = tok.strip()
    if any(ch.isspace() for ch in tok):
        raise FormatError(f"token {tok!r} contains whitespace", lineno)
    if not utt:
        raise FormatError("empty utterance id", lineno)
    return utt, ts, tok


def parse_stream(data: bytes | str) -> list[StreamEvent]:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise FormatError(f"not UTF-8: {exc}") from None
    events = []
    counters: dict[str, int] = {}
    last_ts = None
    for lineno, raw in enumerate(data.splitlines(), start=1):
        line = raw.rstrip("\r\n")
        if not line.strip() or line.startswith("#"):
            continue
        utt, ts, tok = _parse_line(line, lineno)
        if last_ts is not None and ts < last_ts:
            raise FormatError(f"timestamp {ts} decreases (previous {last_ts})", lineno)
        last_ts = ts
        idx = counters.get(utt, 0)
        counters[utt] = idx + 1
        events.append(StreamEvent(utt, Token(tok, ts, idx)))
    return events


def serialize_stream(events: Iterable[StreamEvent]) -> str:
    return "".join(f"{e.utt_id}\t{e.token.ts_ms}\t{e.token.surface}\n" for e in events)


def read_stream(path) -> list[StreamEvent]:
    with open(path, "rb") as fh:
        return parse_stream(fh.read())


def group_utterances(events: Sequence[StreamEvent]) -> list[tuple[str, list[Token]]]:
    """Split a stream into per-utterance token lists, keeping file order.

    An utterance id that reappears after a different one is rejected.
    """
    out = []
    seen = set()
    for utt, grp in groupby(events, key=lambda e: e.utt_id):
        if utt in seen:
            raise FormatError(f"utterance {utt!r} is interleaved with another utterance")
        seen.add(utt)
        out.append((utt, [e.token for e in grp]))
    return out


def tokens_from_surfaces(surfaces: Iterable[str], start_ms: int = 0, step_ms: int = 0) -> list[Token]:
    return [Token(s, start_ms + i * step_ms, i) for i, s in enumerate(surfaces)]
