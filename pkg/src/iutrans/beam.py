"""Beam search with must-include and forbidden target phrases.

Positive phrases are handled with dynamic beam allocation: candidates are
grouped into banks by how many constraint tokens their completed phrases
cover, and the beam is split evenly across banks so hypotheses that made
progress are not crowded out by higher-scoring ones that did not. Every
hypothesis also proposes the tokens that start or continue an unmet phrase.

Forbidden phrases are absolute: a candidate that completes one is pruned.

Phrase matching runs on an Aho-Corasick automaton. The product of automaton
state and satisfied-phrase set is small, so the minimum number of tokens
still needed to satisfy every positive phrase without touching a forbidden
one is computed exactly up front. Hypotheses that cannot finish within
``max_len`` are dropped, which keeps at least one feasible hypothesis alive
at any beam size and turns impossible requests into an explicit error.
"""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Protocol, Sequence

from .stream import FormatError


class InfeasibleConstraints(ValueError):
    """No output of at most ``max_len`` tokens can satisfy the constraints."""


class StepScorer(Protocol):
    vocab: Sequence[str]
    eos: str

    def next_scores(self, prefix: Sequence[str]) -> Sequence[float]:
        """One finite score per entry of ``vocab``."""
        ...


def _phrases(items) -> tuple[tuple[str, ...], ...]:
    out = []
    for p in items:
        p = tuple(p.split()) if isinstance(p, str) else tuple(p)
        if not p:
            raise ValueError("constraint phrases must be non-empty")
        out.append(p)
    return tuple(out)


@dataclass(frozen=True)
class ConstraintSet:
    positive: tuple = ()
    negative: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "positive", _phrases(self.positive))
        object.__setattr__(self, "negative", _phrases(self.negative))

    @property
    def empty(self) -> bool:
        return not self.positive and not self.negative

    @property
    def patterns(self) -> list[tuple[str, ...]]:
        return list(self.positive) + list(self.negative)


def read_phrases(path) -> list[tuple[str, ...]]:
    with open(path, encoding="utf-8") as fh:
        lines = [line.split() for line in fh if line.strip() and not line.startswith("#")]
    if not all(lines):
        raise FormatError(f"{path}: empty phrase")
    return [tuple(x) for x in lines]


class PhraseMatcher:
    """Aho-Corasick automaton; pattern ids follow ``ConstraintSet.patterns``."""

    def __init__(self, constraints: ConstraintSet):
        self.constraints = constraints
        self.n_positive = len(constraints.positive)
        self.patterns = constraints.patterns
        self.goto: list[dict] = [{}]
        self.fail = [0]
        self.depth = [0]
        self.out: list[frozenset] = [frozenset()]
        for pid, pat in enumerate(self.patterns):
            node = 0
            for tok in pat:
                nxt = self.goto[node].get(tok)
                if nxt is None:
                    nxt = len(self.goto)
                    self.goto[node][tok] = nxt
                    self.goto.append({})
                    self.fail.append(0)
                    self.depth.append(self.depth[node] + 1)
                    self.out.append(frozenset())
                node = nxt
            self.out[node] = self.out[node] | {pid}
        queue = deque(self.goto[0].values())
        while queue:
            node = queue.popleft()
            for tok, child in self.goto[node].items():
                f = self.fail[node]
                while f and tok not in self.goto[f]:
                    f = self.fail[f]
                cand = self.goto[f].get(tok, 0)
                self.fail[child] = cand if cand != child else 0
                self.out[child] = self.out[child] | self.out[self.fail[child]]
                queue.append(child)
        self.alphabet = frozenset(t for pat in self.patterns for t in pat)

    def advance(self, state: int, token: str) -> tuple[int, frozenset]:
        while state and token not in self.goto[state]:
            state = self.fail[state]
        state = self.goto[state].get(token, 0)
        return state, self.out[state]

    def run(self, tokens: Iterable[str], state: int = 0):
        matched: set[int] = set()
        for tok in tokens:
            state, hits = self.advance(state, tok)
            matched |= hits
        return state, frozenset(matched)


@dataclass(frozen=True)
class MatchStep:
    state: int
    matched_positive: frozenset
    matched_negative: frozenset

    @property
    def violated(self) -> bool:
        return bool(self.matched_negative)


def match_state_advance(state: int, token: str, matcher: PhraseMatcher | ConstraintSet) -> MatchStep:
    """One automaton transition with positive and negative matches split out."""
    if isinstance(matcher, ConstraintSet):
        matcher = PhraseMatcher(matcher)
    new, hits = matcher.advance(state, token)
    k = matcher.n_positive
    return MatchStep(new, frozenset(h for h in hits if h < k), frozenset(h - k for h in hits if h >= k))


@dataclass(frozen=True)
class BeamResult:
    tokens: tuple[str, ...]
    score: float


@dataclass(frozen=True)
class _Hyp:
    score: float
    tokens: tuple
    key: tuple
    state: int = 0
    met: int = 0


def _sort_key(h: _Hyp):
    return (-h.score, h.key)


def _scores(scorer, prefix) -> list[float]:
    scores = list(scorer.next_scores(list(prefix)))
    if len(scores) != len(scorer.vocab):
        raise ValueError("scorer returned the wrong number of scores")
    if not all(math.isfinite(s) for s in scores):
        raise ValueError("scorer returned a non-finite score")
    return scores


def _top(scores: list[float], k: int) -> list[int]:
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    return order[:k]


def _check_args(scorer, beam_size, max_len):
    if beam_size < 1:
        raise ValueError("beam_size must be >= 1")
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    if scorer.eos not in scorer.vocab:
        raise ValueError("scorer vocabulary lacks the end-of-sequence token")


def plain_beam_search(scorer: StepScorer, beam_size: int, max_len: int, prefix: Sequence[str] = ()) -> BeamResult:
    """Unconstrained beam search.

    Each live hypothesis proposes its ``beam_size`` best next tokens; the
    ``beam_size`` best non-final candidates survive and end-of-sequence
    candidates are set aside as finished. After ``max_len`` generated tokens
    the remaining hypotheses are closed with end-of-sequence. Ties break on
    vocabulary order.
    """
    _check_args(scorer, beam_size, max_len)
    eos_id = list(scorer.vocab).index(scorer.eos)
    beam = [_Hyp(0.0, tuple(prefix), ())]
    finished: list[_Hyp] = []
    for step in range(max_len + 1):
        cands = []
        for h in beam:
            scores = _scores(scorer, h.tokens)
            picks = [eos_id] if step == max_len else _top(scores, beam_size)
            for i in picks:
                nh = _Hyp(h.score + scores[i], h.tokens + (scorer.vocab[i],), h.key + (i,))
                (finished if i == eos_id else cands).append(nh)
        beam = sorted(cands, key=_sort_key)[:beam_size]
        if not beam:
            break
    best = min(finished, key=_sort_key)
    return BeamResult(best.tokens[len(prefix) : -1], best.score)


class _Feasibility:
    """Exact distance to "all positive phrases met" over (state, met-mask)."""

    def __init__(self, matcher: PhraseMatcher, vocab: Sequence[str], eos: str):
        self.matcher = matcher
        self.full = (1 << matcher.n_positive) - 1
        toks = [t for t in vocab if t != eos]
        relevant = sorted(set(toks) & matcher.alphabet)
        other = next((t for t in toks if t not in matcher.alphabet), None)
        self.moves = relevant + ([other] if other is not None else [])
        self._dist: dict = {}
        self._explored: set = set()
        self._edges: dict = {}

    def step(self, state: int, met: int, tok: str):
        """Successor ``(state, met)`` or None when a forbidden phrase completes."""
        new, hits = self.matcher.advance(state, tok)
        k = self.matcher.n_positive
        for h in hits:
            if h >= k:
                return None
            met |= 1 << h
        return new, met

    def _explore(self, start):
        seen = {start}
        queue = deque([start])
        while queue:
            node = queue.popleft()
            succ = []
            for tok in self.moves:
                nxt = self.step(*node, tok)
                if nxt is None:
                    continue
                succ.append(nxt)
                if nxt not in seen and nxt not in self._explored:
                    seen.add(nxt)
                    queue.append(nxt)
            self._edges[node] = succ
        self._explored |= seen
        rev: dict = {}
        for u, vs in self._edges.items():
            for v in vs:
                rev.setdefault(v, []).append(u)
        dist = {u: 0 for u in self._edges if u[1] == self.full}
        queue = deque(dist)
        while queue:
            v = queue.popleft()
            for u in rev.get(v, ()):
                if u not in dist:
                    dist[u] = dist[v] + 1
                    queue.append(u)
        self._dist = dist

    def distance(self, state: int, met: int) -> float:
        node = (state, met)
        if node not in self._explored:
            self._explore(node)
        return self._dist.get(node, math.inf)


def _allocate(cands: list[_Hyp], beam_size: int, bank_of, n_banks: int) -> list[_Hyp]:
    banks: dict[int, list[_Hyp]] = {}
    for h in sorted(cands, key=_sort_key):
        banks.setdefault(bank_of(h), []).append(h)
    quota = {b: beam_size // n_banks for b in range(n_banks)}
    for b in range(n_banks - 1, n_banks - 1 - beam_size % n_banks, -1):
        quota[b] += 1
    chosen, rest = [], []
    for b, hs in banks.items():
        chosen += hs[: quota[b]]
        rest += hs[quota[b]:]
    chosen += sorted(rest, key=_sort_key)[: beam_size - len(chosen)]
    return sorted(chosen, key=_sort_key)


def beam_search(
    scorer: StepScorer,
    constraints: ConstraintSet,
    beam_size: int,
    max_len: int,
    prefix: Sequence[str] = (),
) -> BeamResult:
    """Best finished hypothesis that contains every positive phrase and no
    negative phrase; ``prefix`` is forced and not scored.

    Raises :class:`InfeasibleConstraints` when no such output of at most
    ``max_len`` generated tokens exists.
    """
    _check_args(scorer, beam_size, max_len)
    vocab = list(scorer.vocab)
    eos_id = vocab.index(scorer.eos)
    matcher = PhraseMatcher(constraints)
    feas = _Feasibility(matcher, vocab, scorer.eos)
    positive = constraints.positive
    bank_weights = [len(p) for p in positive]
    n_banks = sum(bank_weights) + 1

    def bank_of(h: _Hyp) -> int:
        return sum(w for i, w in enumerate(bank_weights) if h.met >> i & 1)

    node = (0, 0)
    for tok in prefix:
        node = feas.step(*node, tok)
        if node is None:
            raise InfeasibleConstraints("the forced prefix contains a forbidden phrase")
    if feas.distance(*node) > max_len:
        raise InfeasibleConstraints(f"constraints cannot be met within {max_len} tokens")

    index = {t: i for i, t in enumerate(vocab)}
    beam = [_Hyp(0.0, tuple(prefix), (), *node)]
    finished: list[_Hyp] = []
    for step in range(max_len + 1):
        remaining = max_len - step - 1
        cands = []
        for h in beam:
            scores = _scores(scorer, h.tokens)
            if step == max_len:
                picks = [eos_id]
            else:
                picks = _top(scores, beam_size)
                extra = set()
                for p in positive:
                    extra.add(p[0])
                    for L in range(min(len(p) - 1, len(h.tokens)), 0, -1):
                        if h.tokens[-L:] == p[:L]:
                            extra.add(p[L])
                            break
                d = feas.distance(h.state, h.met)
                for tok in feas.moves:
                    nxt = feas.step(h.state, h.met, tok)
                    if nxt is not None and feas.distance(*nxt) < d:
                        extra.add(tok)
                picks += sorted(index[t] for t in extra if t in index and index[t] not in picks)
                # done but every proposal is forbidden: stopping is the way out
                if d == 0 and eos_id not in picks and all(
                    i == eos_id or feas.step(h.state, h.met, vocab[i]) is None for i in picks
                ):
                    picks.append(eos_id)
            for i in picks:
                if i == eos_id:
                    if h.met == feas.full:
                        finished.append(_Hyp(h.score + scores[i], h.tokens + (scorer.eos,), h.key + (i,), h.state, h.met))
                    continue
                nxt = feas.step(h.state, h.met, vocab[i])
                if nxt is None or feas.distance(*nxt) > remaining:
                    continue
                cands.append(_Hyp(h.score + scores[i], h.tokens + (vocab[i],), h.key + (i,), *nxt))
        beam = _allocate(cands, beam_size, bank_of, n_banks)
        if not beam:
            break
    if not finished:
        raise InfeasibleConstraints("search ended without a hypothesis meeting the constraints")
    best = min(finished, key=_sort_key)
    return BeamResult(best.tokens[len(prefix) : -1], best.score)
