"""Translation of a detected IU stream under different read/write policies.

Policies
--------
``full``
    translate each sentence once it is complete.
``subsentence``
    translate every IU on its own and concatenate the results.
``wait_k``
    start writing after ``k_wait`` source tokens of a sentence, then write one
    target token per source token read; flush the rest at sentence end.
``context_aware``
    a sentence-initial IU is translated on its own (partial decoding); every
    later IU of the same sentence re-translates the sentence so far with the
    previous translation as a forced prefix, after dropping its last
    ``k_discard`` tokens.

Only the current sentence's translation is ever retracted; once a
sentence-final IU is translated, that sentence's output is fixed.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Mapping, Protocol, Sequence

from .detector import DetectorConfig, DetectorState, flush, step
from .stream import FormatError, InformationUnit, Segment, StreamEvent, Token, TranslationTimeline

POLICIES = ("full", "subsentence", "wait_k", "context_aware")


class TranslationOracle(Protocol):
    def generate(self, source: Sequence[str], forced_prefix: Sequence[str] = ()) -> list[str]:
        """Translate ``source``; the output must start with ``forced_prefix``."""
        ...


class PrefixContractError(RuntimeError):
    """The oracle returned output that does not extend the forced prefix."""


class OracleError(RuntimeError):
    def __init__(self, segment_index: int, cause: Exception):
        self.segment_index = segment_index
        super().__init__(f"oracle failed at segment {segment_index}: {cause}")


@dataclass(frozen=True)
class ToyLexiconOracle:
    """Word-by-word lexicon translation; unknown tokens pass through unchanged.

    The forced prefix replaces the first ``len(prefix)`` positions of the
    word-by-word translation, so the output has length
    ``max(len(source), len(prefix))``.
    """

    lexicon: Mapping[str, str] = field(default_factory=dict)

    def translate_token(self, tok: str) -> str:
        return self.lexicon.get(tok, tok)

    def generate(self, source, forced_prefix=()):
        prefix = list(forced_prefix)
        return prefix + [self.translate_token(s) for s in source[len(prefix):]]

    @classmethod
    def loads(cls, text: str) -> "ToyLexiconOracle":
        lex = {}
        for lineno, line in enumerate(text.splitlines(), start=1):
            if not line.strip() or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2 or not cols[0].strip() or not cols[1].strip():
                raise FormatError("expected 'source<TAB>target'", lineno)
            src, tgt = cols[0].strip(), cols[1].strip()
            if " " in tgt or " " in src:
                raise FormatError("lexicon entries must be single tokens", lineno)
            lex[src] = tgt
        return cls(lex)

    @classmethod
    def load(cls, path) -> "ToyLexiconOracle":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())


@dataclass(frozen=True)
class PolicyConfig:
    kind: str = "context_aware"
    k_wait: int = 3
    k_discard: int = 1

    def __post_init__(self):
        if self.kind not in POLICIES:
            raise ValueError(f"unknown policy {self.kind!r}; expected one of {POLICIES}")
        if self.kind == "wait_k" and self.k_wait < 1:
            raise ValueError("k_wait must be >= 1")
        if self.kind == "context_aware" and self.k_discard < 0:
            raise ValueError("k_discard must be >= 0")


def _call(oracle, source, prefix, seg_index):
    try:
        out = list(oracle.generate(list(source), list(prefix)))
    except Exception as exc:  # noqa: BLE001 - re-raised with position
        raise OracleError(seg_index, exc) from exc
    if out[: len(prefix)] != list(prefix):
        raise PrefixContractError(
            f"segment {seg_index}: oracle output {out!r} does not start with {list(prefix)!r}"
        )
    return out


def forced_prefix(prev_translation: Sequence[str], k_discard: int) -> list[str]:
    keep = max(len(prev_translation) - k_discard, 0)
    return list(prev_translation[:keep])


def context_aware_continue(source_context, prev_translation, k_discard, oracle, seg_index=0):
    """Drop the last ``k_discard`` tokens of ``prev_translation`` and let the
    oracle complete the translation of ``source_context`` from there."""
    if k_discard < 0:
        raise ValueError("k_discard must be >= 0")
    return _call(oracle, source_context, forced_prefix(prev_translation, k_discard), seg_index)


@dataclass
class UtteranceTranslation:
    utt_id: str
    units: list[InformationUnit]
    timeline: TranslationTimeline
    sentences: list[list[str]]

    @property
    def committed(self) -> list[str]:
        return self.timeline.committed_target


class _Translator:
    def __init__(self, oracle, policy: PolicyConfig, partial_oracle=None):
        self.oracle = oracle
        self.partial_oracle = partial_oracle or oracle
        self.policy = policy
        k = policy.k_discard if policy.kind == "context_aware" else 0
        self.timeline = TranslationTimeline(k_discard=k)
        self.sentences: list[list[str]] = []
        self.sent_src: list[Token] = []
        self.sent_tgt: list[str] = []

    def _close(self, src_len, emitted, retracted, read_ms, write_ms, sid, final):
        self.timeline.segments.append(
            Segment(src_len, len(emitted), read_ms, write_ms, tuple(emitted), retracted, sid, final)
        )

    def _end_sentence(self):
        self.sentences.append(self.sent_tgt)
        self.timeline.committed_target.extend(self.sent_tgt)
        self.sent_src, self.sent_tgt = [], []

    def on_unit(self, iu: InformationUnit, emit_ms: int):
        kind = self.policy.kind
        seg = len(self.timeline.segments)
        src = [t.surface for t in iu.tokens]
        read_ms = iu.tokens[-1].ts_ms
        self.sent_src.extend(iu.tokens)
        if kind == "subsentence":
            out = _call(self.oracle, src, (), seg)
            self._close(len(src), out, 0, read_ms, emit_ms, iu.sentence_id, iu.is_sentence_final)
            self.sent_tgt += out
        elif kind == "context_aware":
            if iu.is_sentence_initial:
                out = _call(self.partial_oracle, src, (), seg)
                self._close(len(src), out, 0, read_ms, emit_ms, iu.sentence_id, iu.is_sentence_final)
                self.sent_tgt = out
            else:
                source_ctx = [t.surface for t in self.sent_src]
                prefix = forced_prefix(self.sent_tgt, self.policy.k_discard)
                out = _call(self.oracle, source_ctx, prefix, seg)
                retracted = len(self.sent_tgt) - len(prefix)
                self._close(
                    len(src), out[len(prefix):], retracted, read_ms, emit_ms,
                    iu.sentence_id, iu.is_sentence_final,
                )
                self.sent_tgt = out
        if not iu.is_sentence_final:
            return
        if kind == "full":
            sent = [t.surface for t in self.sent_src]
            out = _call(self.oracle, sent, (), seg)
            self._close(len(sent), out, 0, read_ms, emit_ms, iu.sentence_id, True)
            self.sent_tgt = out
        elif kind == "wait_k":
            self._wait_k(iu.sentence_id, emit_ms)
        self._end_sentence()

    def finish(self, sid: int, emit_ms: int):
        """Close a sentence left open when the stream ended after a non-final IU."""
        if not self.sent_src:
            return
        seg = len(self.timeline.segments)
        if self.policy.kind == "full":
            sent = [t.surface for t in self.sent_src]
            out = _call(self.oracle, sent, (), seg)
            self._close(len(sent), out, 0, self.sent_src[-1].ts_ms, emit_ms, sid, True)
            self.sent_tgt = out
        elif self.policy.kind == "wait_k":
            self._wait_k(sid, emit_ms)
        else:
            segs = self.timeline.segments
            segs[-1] = replace(segs[-1], sentence_final=True)
        self._end_sentence()

    def _wait_k(self, sid: int, emit_ms: int):
        k = self.policy.k_wait
        toks = self.sent_src
        src = [t.surface for t in toks]
        n = len(src)
        tgt: list[str] = []
        pending = 0
        for c in range(1, n + 1):
            pending += 1
            seg = len(self.timeline.segments)
            written: list[str] = []
            if c == n:
                out = _call(self.oracle, src, tgt, seg)
                written = out[len(tgt):]
            else:
                while len(tgt) + len(written) + k <= c:
                    have = tgt + written
                    out = _call(self.oracle, src[:c], have, seg)
                    if len(out) <= len(have):
                        break
                    written.append(out[len(have)])
            if written or c == n:
                write_ms = emit_ms if c == n else toks[c - 1].ts_ms
                self._close(pending, written, 0, toks[c - 1].ts_ms, write_ms, sid, c == n)
                tgt += written
                pending = 0
        self.sent_tgt = tgt


def _as_tokens(stream) -> list[Token]:
    toks = [e.token if isinstance(e, StreamEvent) else e for e in stream]
    return toks


def translate_stream(
    events: Sequence[StreamEvent | Token],
    detector_config: DetectorConfig,
    oracle: TranslationOracle,
    policy: PolicyConfig,
    partial_oracle: TranslationOracle | None = None,
    utt_id: str = "",
) -> UtteranceTranslation:
    """Detect IUs in one utterance and translate them under ``policy``.

    ``partial_oracle`` translates sentence-initial IUs under the
    context-aware policy; it defaults to ``oracle``.
    """
    tokens = _as_tokens(events)
    if events and isinstance(events[0], StreamEvent) and not utt_id:
        utt_id = events[0].utt_id
    tr = _Translator(oracle, policy, partial_oracle)
    state = DetectorState()
    units: list[InformationUnit] = []
    for tok in tokens:
        out, state = step(state, detector_config, tok)
        for iu in out:
            units.append(iu)
            tr.on_unit(iu, tok.ts_ms)
    last = flush(state)
    if last is not None:
        units.append(last)
        tr.on_unit(last, tokens[-1].ts_ms)
    if units:
        tr.finish(units[-1].sentence_id, tokens[-1].ts_ms)
    return UtteranceTranslation(utt_id, units, tr.timeline, tr.sentences)


def committed_prefix_trace(timeline: TranslationTimeline, hold_back: bool = False) -> list[tuple[str, ...]]:
    """Displayed target after each segment.

    With ``hold_back`` the last ``k_discard`` tokens of an unfinished sentence
    are withheld, which yields a retraction-free (monotone) display suitable
    for speech synthesis.
    """
    k = timeline.k_discard
    display: list[str] = []
    sent_start = 0
    current_sid = None
    snaps = []
    for seg in timeline.segments:
        if seg.sentence_id != current_sid:
            current_sid = seg.sentence_id
            sent_start = len(display)
        if seg.retracted:
            del display[len(display) - seg.retracted:]
        display.extend(seg.emitted)
        shown = display
        if hold_back and not seg.sentence_final:
            held = min(k, len(display) - sent_start)
            shown = display[: len(display) - held]
        snaps.append(tuple(shown))
        if seg.sentence_final:
            current_sid = None
    return snaps
