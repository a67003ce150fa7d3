"""Independent reference implementations shared by the unit and acceptance tests.

Each one is written the slow, literal way so it shares no code with the
package under test.
"""
import hashlib
import struct
from dataclasses import dataclass, field

import numpy as np

EOS = "</s>"


@dataclass
class HashScorer:
    """Prefix-dependent pseudo-random scores; ``ties`` draws small integers."""

    vocab: tuple
    seed: int
    ties: bool = False
    eos: str = EOS
    cache: dict = field(default_factory=dict, repr=False)

    def next_scores(self, prefix):
        key = tuple(prefix)
        hit = self.cache.get(key)
        if hit is None:
            raw = hashlib.blake2b(repr((self.seed, key)).encode(), digest_size=64).digest()
            words = struct.unpack("<8Q", raw)[: len(self.vocab)]
            if self.ties:
                hit = [-float(w % 4) for w in words]
            else:
                hit = [-(w / 2**64) * 4 for w in words]
            self.cache[key] = hit
        return hit


def contains(seq, phrase):
    k = len(phrase)
    return any(tuple(seq[i : i + k]) == tuple(phrase) for i in range(len(seq) - k + 1))


def exhaustive(scorer, constraints, max_len, prefix=()):
    """Best ``(score, key, tokens)`` over every output of at most ``max_len``
    tokens, ranked like the beam: score first, then vocabulary indices."""
    vocab = list(scorer.vocab)
    eos_id = vocab.index(scorer.eos)
    best = None

    def ok(tokens):
        full = list(prefix) + list(tokens)
        return all(contains(full, p) for p in constraints.positive) and not any(
            contains(full, n) for n in constraints.negative
        )

    def walk(tokens, key, score):
        nonlocal best
        scores = scorer.next_scores(list(prefix) + tokens)
        if ok(tokens):
            cand = (-(score + scores[eos_id]), key + (eos_id,), tuple(tokens))
            if best is None or cand[:2] < best[:2]:
                best = cand
        if len(tokens) == max_len:
            return
        for i, tok in enumerate(vocab):
            if i != eos_id:
                walk(tokens + [tok], key + (i,), score + scores[i])

    walk([], (), 0.0)
    return best


# --- latency -------------------------------------------------------------------


def lindley_inverse_ee(lx, ly, r):
    """Closed form of the clamped recursion: S(n-1) = max(0, max_j sum_{i>=j} d_i)
    with increments d_i = r * (LY_i - LX_{i+1})."""
    lx, ly = np.asarray(lx, float), np.asarray(ly, float)
    d = r * (ly[:-1] - lx[1:])
    tail_sums = np.cumsum(d[::-1])
    s = max(0.0, tail_sums.max()) if d.size else 0.0
    return s + ly[-1]


# --- alignment -----------------------------------------------------------------


def brute_force_boundaries(links, n, m):
    """Check the three alignment conditions literally for every (i, j)."""
    out = []
    for i in range(1, n + 1):
        for j in range(1, m + 1):
            if (i, j) not in links:
                continue
            ok = True
            for a in range(1, n + 1):
                for b in range(1, m + 1):
                    if (a, b) in links and ((a <= i and b > j) or (a > i and b <= j)):
                        ok = False
            if ok:
                out.append((i, j))
    return out


# --- repetitions ---------------------------------------------------------------


def naive_collapse(tokens, protected=None):
    """Repeatedly collapse the leftmost square (shortest period first) by direct comparison."""
    toks = list(tokens)
    prot = list(protected) if protected is not None else [False] * len(toks)
    while True:
        hit = None
        for s in range(len(toks)):
            for p in range(1, (len(toks) - s) // 2 + 1):
                if toks[s : s + p] != toks[s + p : s + 2 * p]:
                    continue
                copies = 2
                while toks[s : s + p] == toks[s + copies * p : s + (copies + 1) * p]:
                    copies += 1
                if not any(prot[s + p : s + copies * p]):
                    hit = (s, p, copies)
                    break
            if hit:
                break
        if hit is None:
            return toks
        s, p, copies = hit
        del toks[s + p : s + copies * p], prot[s + p : s + copies * p]


def has_square(toks):
    return any(
        toks[s : s + p] == toks[s + p : s + 2 * p] for s in range(len(toks)) for p in range(1, (len(toks) - s) // 2 + 1)
    )
