"""Transcript clean-up ahead of boundary detection.

Three drop-only passes: filler removal, collapsing of unconscious
repetitions, and an n-gram language model filter for tokens that are very
unlikely given what precedes them. Outputs are always subsequences of the
input.
"""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .stream import FormatError, Token
from .suffix import SuffixIndex

DEFAULT_FILLERS = frozenset({"嗯", "呃", "啊", "uh", "um", "er"})


@dataclass(frozen=True)
class NormalizerConfig:
    filler_lexicon: frozenset = DEFAULT_FILLERS
    whitelist: frozenset = frozenset()
    xi: float = 1e-4

    def __post_init__(self):
        if not 0.0 <= self.xi < 1.0:
            raise ValueError(f"xi must lie in [0, 1), got {self.xi}")
        for entry in self.whitelist:
            if not entry:
                raise ValueError("whitelist entries must be non-empty")


def read_entries(text: str) -> list[tuple[str, ...]]:
    """One entry per line, whitespace-separated tokens; ``#`` starts a comment line."""
    return [tuple(line.split()) for line in text.splitlines() if line.strip() and not line.startswith("#")]


def load_config(fillers_path=None, whitelist_path=None, xi: float = 1e-4) -> NormalizerConfig:
    fillers = DEFAULT_FILLERS
    whitelist = frozenset()
    if fillers_path:
        with open(fillers_path, encoding="utf-8") as fh:
            entries = read_entries(fh.read())
        if any(len(e) != 1 for e in entries):
            raise FormatError(f"{fillers_path}: filler entries must be single tokens")
        fillers = frozenset(e[0] for e in entries)
    if whitelist_path:
        with open(whitelist_path, encoding="utf-8") as fh:
            whitelist = frozenset(read_entries(fh.read()))
    return NormalizerConfig(fillers, whitelist, xi)


# ---------------------------------------------------------------------------
# fillers


def _filler_keep(tokens: Sequence[str], config: NormalizerConfig) -> list[int]:
    return [i for i, t in enumerate(tokens) if t not in config.filler_lexicon]


def remove_fillers(tokens: Sequence[str], config: NormalizerConfig) -> list[str]:
    return [tokens[i] for i in _filler_keep(tokens, config)]


# ---------------------------------------------------------------------------
# repetitions


def protected_mask(tokens: Sequence[str], whitelist: Iterable[Sequence[str]]) -> list[bool]:
    """Mark every position covered by an occurrence of a whitelist entry."""
    mask = [False] * len(tokens)
    by_first = defaultdict(list)
    for entry in whitelist:
        by_first[entry[0]].append(tuple(entry))
    if not by_first:
        return mask
    for s, tok in enumerate(tokens):
        for entry in by_first.get(tok, ()):
            if tuple(tokens[s : s + len(entry)]) == entry:
                for k in range(s, s + len(entry)):
                    mask[k] = True
    return mask


def find_repeat(tokens: Sequence[str], protected: Sequence[bool]):
    """Leftmost collapsible repeat as ``(start, period, copies)`` or None.

    Among squares ``w w`` starting at the leftmost possible position the
    shortest period wins; the whole run ``w^copies`` is reported. Runs whose
    removable copies touch a protected token are skipped.
    """
    n = len(tokens)
    if n < 2:
        return None
    index = SuffixIndex(tokens)
    occurrences = defaultdict(list)
    for i, t in enumerate(tokens):
        occurrences[t].append(i)
    for s in range(n - 1):
        for q in occurrences[tokens[s]]:
            p = q - s
            if p <= 0:
                continue
            if 2 * p > n - s:
                break
            common = index.lcp(s, q)
            if common < p:
                continue
            copies = 1 + common // p
            if not any(protected[s + p : s + copies * p]):
                return s, p, copies
    return None


def _repetition_keep(tokens: Sequence[str], config: NormalizerConfig) -> list[int]:
    toks = list(tokens)
    pos = list(range(len(toks)))
    prot = protected_mask(toks, config.whitelist)
    while (hit := find_repeat(toks, prot)) is not None:
        s, p, copies = hit
        cut = slice(s + p, s + copies * p)
        del toks[cut], pos[cut], prot[cut]
    return pos


def remove_repetitions(tokens: Sequence[str], config: NormalizerConfig) -> list[str]:
    """Collapse adjacent repeated blocks (``a b a b`` -> ``a b``) to one copy.

    Repeats are found with suffix-array LCP queries; only token pairs with
    equal surfaces are probed, so the scan stays near ``n log n`` on natural
    text. Occurrences of whitelist entries are never shortened. The result
    contains no collapsible repeat, so a second application is a no-op.
    """
    return [tokens[i] for i in _repetition_keep(tokens, config)]


# ---------------------------------------------------------------------------
# language model


@dataclass
class NGramLM:
    """Additively smoothed n-gram model without sentence padding.

    ``P(w | h) = (c(h w) + alpha) / (c(h .) + alpha * V)`` where ``h`` is the
    last ``order - 1`` tokens (fewer at the start of a sequence), ``c(h .)``
    counts n-grams extending ``h`` and ``V`` is the training vocabulary plus
    one slot for unseen tokens.
    """

    order: int = 3
    alpha: float = 0.1
    counts: Counter = field(default_factory=Counter)
    context_counts: Counter = field(default_factory=Counter)
    vocab: frozenset = frozenset()

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be >= 1")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")

    @property
    def vocab_size(self) -> int:
        return len(self.vocab) + 1

    @property
    def trained(self) -> bool:
        return self.context_counts[()] > 0

    @classmethod
    def train(cls, sentences: Iterable[Sequence[str]], order: int = 3, alpha: float = 0.1) -> "NGramLM":
        lm = cls(order, alpha)
        vocab = set()
        for sent in sentences:
            sent = tuple(sent)
            vocab.update(sent)
            for i in range(len(sent)):
                for k in range(1, order + 1):
                    if i + k > len(sent):
                        break
                    gram = sent[i : i + k]
                    lm.counts[gram] += 1
                    lm.context_counts[gram[:-1]] += 1
        lm.vocab = frozenset(vocab)
        return lm

    def history(self, tokens: Sequence[str], t: int) -> tuple[str, ...]:
        return tuple(tokens[max(0, t - self.order + 1) : t])

    def cond_prob(self, history: Sequence[str], word: str) -> float:
        if not self.trained:
            raise RuntimeError("language model has not been trained")
        h = tuple(history)[-(self.order - 1) :] if self.order > 1 else ()
        num = self.counts[h + (word,)] + self.alpha
        den = self.context_counts[h] + self.alpha * self.vocab_size
        return num / den

    def seq_logprob(self, tokens: Sequence[str]) -> float:
        if not self.trained:
            raise RuntimeError("language model has not been trained")
        return sum(math.log(self.cond_prob(self.history(tokens, t), w)) for t, w in enumerate(tokens))

    def dumps(self) -> str:
        lines = [f"#iutrans-ngram\torder={self.order}\talpha={self.alpha!r}\tvocab={len(self.vocab)}"]
        lines += [f"v\t{w}" for w in sorted(self.vocab)]
        lines += [f"n\t{c}\t{' '.join(g)}" for g, c in sorted(self.counts.items())]
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "NGramLM":
        lines = text.splitlines()
        try:
            magic, *fields = lines[0].split("\t")
            meta = dict(f.split("=", 1) for f in fields)
            if magic != "#iutrans-ngram":
                raise ValueError
            lm = cls(int(meta["order"]), float(meta["alpha"]))
            nvocab = int(meta["vocab"])
        except (IndexError, ValueError, KeyError):
            raise FormatError("missing or malformed LM header", 1) from None
        vocab = set()
        for lineno, line in enumerate(lines[1:], start=2):
            if not line:
                continue
            parts = line.split("\t")
            if parts[0] == "v" and len(parts) == 2:
                vocab.add(parts[1])
            elif parts[0] == "n" and len(parts) == 3:
                gram = tuple(parts[2].split())
                if not 1 <= len(gram) <= lm.order:
                    raise FormatError("n-gram longer than the model order", lineno)
                c = int(parts[1])
                lm.counts[gram] += c
                lm.context_counts[gram[:-1]] += c
            else:
                raise FormatError("bad LM record", lineno)
        if len(vocab) != nvocab:
            raise FormatError(f"header announces {nvocab} vocabulary entries, found {len(vocab)}")
        lm.vocab = frozenset(vocab)
        return lm


def seq_logprob(lm: NGramLM, tokens: Sequence[str]) -> float:
    return lm.seq_logprob(tokens)


def _abnormal_keep(tokens: Sequence[str], lm: NGramLM, xi: float, repair: bool = False) -> list[int]:
    kept: list[str] = []
    keep = []
    for i, tok in enumerate(tokens):
        history = lm.history(kept, len(kept)) if repair else lm.history(tokens, i)
        if lm.cond_prob(history, tok) < xi:
            continue
        kept.append(tok)
        keep.append(i)
    return keep


def filter_abnormal(tokens: Sequence[str], lm: NGramLM, xi: float, repair: bool = False):
    """Drop tokens whose conditional probability is below ``xi``.

    By default each token is scored against the original prefix, i.e. the
    ratio ``p(x_1..x_t) / p(x_1..x_{t-1})`` of the input itself. Every token
    is then judged independently of the threshold, so raising ``xi`` only
    ever drops more. With ``repair=True`` tokens are scored against the
    already filtered prefix instead, which keeps one outlier from spoiling the
    contexts after it but loses that monotonicity for models of order > 1.

    Returns ``(kept tokens, dropped positions)``.
    """
    keep = _abnormal_keep(tokens, lm, xi, repair)
    kept_set = set(keep)
    return [tokens[i] for i in keep], [i for i in range(len(tokens)) if i not in kept_set]


# ---------------------------------------------------------------------------


@dataclass
class NormalizationLog:
    fillers: list[int] = field(default_factory=list)
    repetitions: list[int] = field(default_factory=list)
    abnormal: list[int] = field(default_factory=list)


def normalize_tokens(tokens: Sequence[Token], config: NormalizerConfig, lm: NGramLM | None = None):
    """Run all passes over timestamped tokens.

    Returns the kept tokens, re-indexed from 0, and a log of dropped input
    positions per pass.
    """
    log = NormalizationLog()
    current = list(range(len(tokens)))

    def apply(keep_fn, bucket):
        nonlocal current
        surf = [tokens[i].surface for i in current]
        keep = keep_fn(surf)
        kept = [current[k] for k in keep]
        dropped = sorted(set(current) - set(kept))
        bucket.extend(dropped)
        current = kept

    apply(lambda s: _filler_keep(s, config), log.fillers)
    apply(lambda s: _repetition_keep(s, config), log.repetitions)
    if lm is not None and config.xi > 0:
        apply(lambda s: _abnormal_keep(s, lm, config.xi), log.abnormal)
    out = [Token(tokens[i].surface, tokens[i].ts_ms, k) for k, i in enumerate(current)]
    return out, log
