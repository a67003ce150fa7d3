"""Dynamic-context boundary detection for information units.

The detector keeps a buffer of undecided tokens and an anchor inside it. For
every anchor it queries a :class:`BoundaryScorer` with a dynamic context that
starts empty and grows one token at a time:

* ``p >= delta1``: the buffer up to and including the anchor is emitted as an
  information unit and detection restarts on the remainder;
* ``p < delta2``: the next token becomes the anchor (context reset to empty);
* otherwise the decision waits for one more context token. Once the context
  holds ``max_dynamic_context`` tokens the more probable of the two outcomes
  (``p >= 0.5`` means complete) is forced.

Every score depends only on tokens already read, so feeding a stream token by
token or in one batch produces the same units.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Protocol, Sequence

from .stream import FormatError, InformationUnit, Token

SEP = "[SEP]"

DEFAULT_PUNCTUATION = frozenset("，,。.？?！!；;：:、")
SENTENCE_FINAL = frozenset("。.？?！!")


class BoundaryScorer(Protocol):
    def score(self, prefix: Sequence[str], anchor_position: int, context: Sequence[str]) -> float:
        """Probability that ``prefix`` (ending in the anchor) is a complete unit.

        ``anchor_position`` is the stream index of the anchor token.
        """
        ...


@dataclass(frozen=True)
class PunctuationScorer:
    """Returns 1.0 when the anchor is a punctuation token, 0.0 otherwise."""

    punctuation: frozenset = DEFAULT_PUNCTUATION

    def score(self, prefix, anchor_position, context):
        return 1.0 if prefix[-1] in self.punctuation else 0.0


@dataclass(frozen=True)
class DetectorConfig:
    scorer: BoundaryScorer
    delta1: float = 0.7
    delta2: float = 0.3
    max_dynamic_context: int = 5
    sentence_final: frozenset = SENTENCE_FINAL

    def __post_init__(self):
        if not 0.0 < self.delta1 <= 1.0:
            raise ValueError(f"delta1 must lie in (0, 1], got {self.delta1}")
        if not 0.0 <= self.delta2 < 1.0:
            raise ValueError(f"delta2 must lie in [0, 1), got {self.delta2}")
        if not self.delta2 < self.delta1:
            raise ValueError(f"delta2 ({self.delta2}) must be smaller than delta1 ({self.delta1})")
        if self.max_dynamic_context < 0:
            raise ValueError("max_dynamic_context must be >= 0")


@dataclass(frozen=True)
class DetectorState:
    """Undecided tokens plus the position of the anchor under test.

    ``anchor_index == len(buffer)`` means every buffered token was judged
    incomplete and the next incoming token becomes the anchor.
    """

    buffer: tuple[Token, ...] = ()
    anchor_index: int = 0
    context_size: int = 0
    sentence_id: int = 0
    iu_index: int = 0

    @property
    def is_empty(self) -> bool:
        return not self.buffer


def classify(p: float, config: DetectorConfig) -> str:
    if p >= config.delta1:
        return "complete"
    if p < config.delta2:
        return "incomplete"
    return "undetermined"


def _emit(state: DetectorState, config: DetectorConfig, end: int):
    unit_tokens = state.buffer[:end]
    final = unit_tokens[-1].surface in config.sentence_final
    iu = InformationUnit(unit_tokens, state.sentence_id, state.iu_index, final)
    if final:
        sid, iu_idx = state.sentence_id + 1, 0
    else:
        sid, iu_idx = state.sentence_id, state.iu_index + 1
    new_state = DetectorState(state.buffer[end:], 0, 0, sid, iu_idx)
    return iu, new_state


def _run(state: DetectorState, config: DetectorConfig):
    emitted = []
    buf = state.buffer
    anchor, ctx = state.anchor_index, state.context_size
    while anchor + ctx < len(buf):
        prefix = [t.surface for t in buf[: anchor + 1]]
        context = [t.surface for t in buf[anchor + 1 : anchor + 1 + ctx]]
        p = float(config.scorer.score(prefix, buf[anchor].index, context))
        if not 0.0 <= p <= 1.0 or math.isnan(p):
            raise ValueError(f"scorer returned {p}, expected a probability")
        decision = classify(p, config)
        if decision == "undetermined" and ctx >= config.max_dynamic_context:
            decision = "complete" if p >= 0.5 else "incomplete"
        if decision == "complete":
            iu, state = _emit(replace(state, buffer=buf), config, anchor + 1)
            emitted.append(iu)
            buf, anchor, ctx = state.buffer, 0, 0
        elif decision == "incomplete":
            anchor, ctx = anchor + 1, 0
        else:
            ctx += 1
    return emitted, replace(state, buffer=buf, anchor_index=anchor, context_size=ctx)


def feed(state: DetectorState, config: DetectorConfig, tokens: Iterable[Token]):
    """Append several tokens at once and run the protocol."""
    return _run(replace(state, buffer=state.buffer + tuple(tokens)), config)


def step(state: DetectorState, config: DetectorConfig, token: Token):
    """Append one token; returns ``(emitted_units, new_state)``."""
    return feed(state, config, (token,))


def flush(state: DetectorState) -> InformationUnit | None:
    """Emit whatever is left in the buffer as a sentence-final unit."""
    if not state.buffer:
        return None
    return InformationUnit(state.buffer, state.sentence_id, state.iu_index, True)


def detect(tokens: Sequence[Token], config: DetectorConfig, streaming: bool = True) -> list[InformationUnit]:
    """Segment a whole utterance, flushing the residue at the end."""
    state = DetectorState()
    units: list[InformationUnit] = []
    if streaming:
        for tok in tokens:
            out, state = step(state, config, tok)
            units.extend(out)
    else:
        units, state = feed(state, config, tokens)
    last = flush(state)
    if last is not None:
        units.append(last)
    return units


# ---------------------------------------------------------------------------
# training data


def split_on_punctuation(tokens: Sequence[str], boundary_punct=DEFAULT_PUNCTUATION):
    """Strip punctuation and return ``(bare_tokens, boundaries)``.

    A boundary ``b`` means a unit ends after ``bare_tokens[b - 1]``. Trailing
    punctuation at the end of the sentence does not create a boundary.
    """
    bare: list[str] = []
    bounds: list[int] = []
    for tok in tokens:
        if tok in boundary_punct:
            if bare and (not bounds or bounds[-1] != len(bare)):
                bounds.append(len(bare))
        else:
            bare.append(tok)
    if bounds and bounds[-1] == len(bare):
        bounds.pop()
    return bare, bounds


def make_training_samples(
    sentence: Sequence[str], boundaries: Sequence[int], max_context: int | None = None
) -> list[tuple[tuple[str, ...], int]]:
    """Build labelled ``(prefix SEP context)`` samples for one sentence.

    The sentence is cut at ``boundaries`` into units. For each unit followed by
    another one, the unit plus SEP plus every non-empty prefix of the next
    unit (capped at ``max_context`` tokens) is a positive sample, and every
    proper prefix of the unit plus SEP plus its next token is a negative one.
    Prefixes restart at the unit start, as the detector does after emitting.
    """
    n = len(sentence)
    bounds = list(boundaries)
    if any(not 0 < b < n for b in bounds):
        raise ValueError(f"boundaries {bounds} out of range for a {n}-token sentence")
    if bounds != sorted(set(bounds)):
        raise ValueError("boundaries must be strictly increasing")
    cuts = [0, *bounds, n]
    samples = []
    for k in range(len(cuts) - 2):
        start, end, nxt = cuts[k], cuts[k + 1], cuts[k + 2]
        unit = tuple(sentence[start:end])
        for i in range(1, len(unit)):
            samples.append((unit[:i] + (SEP, unit[i]), 0))
        limit = nxt - end if max_context is None else min(max_context, nxt - end)
        for c in range(1, limit + 1):
            samples.append((unit + (SEP,) + tuple(sentence[end : end + c]), 1))
    return samples


def format_sample(sample) -> str:
    tokens, label = sample
    return f"{label}\t{' '.join(tokens)}"


def parse_samples(text: str) -> list[tuple[tuple[str, ...], int]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            label, body = line.split("\t", 1)
            label = int(label)
        except ValueError:
            raise FormatError("expected 'label<TAB>tokens'", lineno) from None
        toks = tuple(body.split())
        if label not in (0, 1) or toks.count(SEP) != 1 or toks[0] == SEP:
            raise FormatError("bad sample", lineno)
        out.append((toks, label))
    return out


# ---------------------------------------------------------------------------
# reference scorer

SCORER_HEADER = "#iutrans-boundary-scorer\tv1"


@dataclass(frozen=True)
class FrequencyBoundaryScorer:
    """Relative-frequency boundary scorer with back-off.

    Uses the positive rate of ``(anchor, first context token)`` when that pair
    was seen in training, else of the anchor alone, else the global rate.
    Only ratios of counts are used, so duplicating the corpus changes nothing.
    """

    pair_counts: dict = field(default_factory=dict)
    anchor_counts: dict = field(default_factory=dict)
    prior: tuple[int, int] = (0, 0)

    def score(self, prefix, anchor_position, context):
        anchor = prefix[-1]
        if context:
            hit = self.pair_counts.get((anchor, context[0]))
            if hit:
                return hit[0] / hit[1]
        hit = self.anchor_counts.get(anchor)
        if hit:
            return hit[0] / hit[1]
        pos, total = self.prior
        return pos / total

    @classmethod
    def train(cls, samples: Iterable[tuple[Sequence[str], int]]) -> "FrequencyBoundaryScorer":
        pair_pos, pair_all = Counter(), Counter()
        anc_pos, anc_all = Counter(), Counter()
        pos = total = 0
        for tokens, label in samples:
            tokens = list(tokens)
            s = tokens.index(SEP)
            if s == 0:
                raise ValueError("sample has no prefix before SEP")
            anchor = tokens[s - 1]
            anc_all[anchor] += 1
            anc_pos[anchor] += label
            if s + 1 < len(tokens):
                key = (anchor, tokens[s + 1])
                pair_all[key] += 1
                pair_pos[key] += label
            pos += label
            total += 1
        if total == 0:
            raise ValueError("cannot train a scorer on an empty corpus")
        return cls(
            {k: (pair_pos[k], v) for k, v in pair_all.items()},
            {k: (anc_pos[k], v) for k, v in anc_all.items()},
            (pos, total),
        )

    def dumps(self) -> str:
        lines = [SCORER_HEADER, f"prior\t\t{self.prior[0]}\t{self.prior[1]}"]
        for a in sorted(self.anchor_counts):
            p, t = self.anchor_counts[a]
            lines.append(f"anchor\t{a}\t{p}\t{t}")
        for a, c in sorted(self.pair_counts):
            p, t = self.pair_counts[(a, c)]
            lines.append(f"pair\t{a} {c}\t{p}\t{t}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "FrequencyBoundaryScorer":
        lines = text.splitlines()
        if not lines or lines[0] != SCORER_HEADER:
            raise FormatError("missing or unsupported scorer header", 1)
        pairs, anchors, prior = {}, {}, None
        for lineno, line in enumerate(lines[1:], start=2):
            if not line:
                continue
            try:
                kind, key, p, t = line.split("\t")
                p, t = int(p), int(t)
            except ValueError:
                raise FormatError("bad scorer record", lineno) from None
            if kind == "prior":
                prior = (p, t)
            elif kind == "anchor":
                anchors[key] = (p, t)
            elif kind == "pair":
                a, c = key.split(" ")
                pairs[(a, c)] = (p, t)
            else:
                raise FormatError(f"unknown record kind {kind!r}", lineno)
        if prior is None or prior[1] <= 0:
            raise FormatError("scorer file has no prior")
        return cls(pairs, anchors, prior)


def reference_scorer_train(samples) -> FrequencyBoundaryScorer:
    return FrequencyBoundaryScorer.train(samples)
