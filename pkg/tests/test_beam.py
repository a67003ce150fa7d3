import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import EOS, HashScorer, contains, exhaustive
from iutrans.beam import (
    ConstraintSet,
    InfeasibleConstraints,
    PhraseMatcher,
    beam_search,
    match_state_advance,
    plain_beam_search,
    read_phrases,
)


def random_instance(rng):
    n_tok = rng.randint(1, 4)
    toks = list("abcd")[:n_tok]
    vocab = toks + [EOS]
    rng.shuffle(vocab)
    vocab = tuple(vocab)
    max_len = rng.randint(1, 6)

    def phrases(k):
        return [tuple(rng.choice(toks) for _ in range(rng.randint(1, 2))) for _ in range(k)]

    cons = ConstraintSet(phrases(rng.randint(0, 2)), phrases(rng.randint(0, 2)))
    scorer = HashScorer(vocab, rng.randrange(10**6), ties=rng.random() < 0.5)
    return scorer, cons, max_len


def test_matcher_overlapping_patterns():
    m = PhraseMatcher(ConstraintSet([("a", "b"), ("b",)], [("b", "c")]))
    state, hits = m.run(["x", "a", "b"])
    assert hits == {0, 1}
    step = match_state_advance(state, "c", m)
    assert step.violated and step.matched_negative == {0} and not step.matched_positive
    # a pattern that is a suffix of another is reported through the failure links
    m2 = PhraseMatcher(ConstraintSet([("a", "b", "c"), ("b", "c")]))
    assert m2.run(list("abc"))[1] == {0, 1}
    assert m2.run(list("abbc"))[1] == {1}


@given(st.lists(st.sampled_from("abc"), max_size=12),
       st.lists(st.lists(st.sampled_from("abc"), min_size=1, max_size=3).map(tuple), min_size=1, max_size=4))
def test_matcher_against_naive_search(seq, patterns):
    m = PhraseMatcher(ConstraintSet(patterns))
    assert m.run(seq)[1] == {i for i, p in enumerate(patterns) if contains(seq, p)}


def test_constraint_set_validation(tmp_path):
    assert ConstraintSet(["a b"]).positive == (("a", "b"),)
    assert ConstraintSet().empty
    with pytest.raises(ValueError):
        ConstraintSet([()])
    f = tmp_path / "p.txt"
    f.write_text("# phrases\nmachine learning\nAI\n", encoding="utf-8")
    assert read_phrases(f) == [("machine", "learning"), ("AI",)]


def test_exhaustive_agreement_at_saturating_width():
    rng = random.Random(11)
    for _ in range(300):
        scorer, cons, max_len = random_instance(rng)
        width = (len(scorer.vocab) - 1) ** max_len + 1
        best = exhaustive(scorer, cons, max_len)
        if best is None:
            with pytest.raises(InfeasibleConstraints):
                beam_search(scorer, cons, width, max_len)
            continue
        res = beam_search(scorer, cons, width, max_len)
        assert res.tokens == best[2]
        assert res.score == -best[0]


def test_soundness_at_small_width():
    rng = random.Random(12)
    for _ in range(500):
        scorer, cons, max_len = random_instance(rng)
        feasible = exhaustive(scorer, cons, max_len) is not None
        for width in (1, 2, len(scorer.vocab)):
            if not feasible:
                with pytest.raises(InfeasibleConstraints):
                    beam_search(scorer, cons, width, max_len)
                continue
            res = beam_search(scorer, cons, width, max_len)
            assert len(res.tokens) <= max_len
            assert all(contains(res.tokens, p) for p in cons.positive)
            assert not any(contains(res.tokens, n) for n in cons.negative)


def test_empty_constraints_reduce_to_plain_search():
    rng = random.Random(13)
    for _ in range(300):
        scorer, _, max_len = random_instance(rng)
        for width in (1, 2, 3, 8):
            a = beam_search(scorer, ConstraintSet(), width, max_len)
            b = plain_beam_search(scorer, width, max_len)
            assert a == b
            assert repr(a.score) == repr(b.score)


def test_plain_search_at_saturating_width_is_exhaustive():
    rng = random.Random(14)
    for _ in range(100):
        scorer, _, max_len = random_instance(rng)
        width = (len(scorer.vocab) - 1) ** max_len + 1
        res = plain_beam_search(scorer, width, max_len)
        best = exhaustive(scorer, ConstraintSet(), max_len)
        assert (res.tokens, res.score) == (best[2], -best[0])


def test_forced_prefix_counts_toward_constraints():
    scorer = HashScorer(("a", "b", EOS), 3)
    res = beam_search(scorer, ConstraintSet([("a", "b")]), 2, 3, prefix=("a",))
    assert contains(("a",) + res.tokens, ("a", "b"))
    best = exhaustive(scorer, ConstraintSet([("a", "b")]), 3, prefix=("a",))
    wide = beam_search(scorer, ConstraintSet([("a", "b")]), 100, 3, prefix=("a",))
    assert wide.tokens == best[2]
    with pytest.raises(InfeasibleConstraints):
        beam_search(scorer, ConstraintSet([], [("a",)]), 2, 3, prefix=("a",))


def test_infeasible_requests():
    scorer = HashScorer(("a", "b", EOS), 1)
    with pytest.raises(InfeasibleConstraints):
        beam_search(scorer, ConstraintSet([("a", "b", "a")]), 4, 2)
    with pytest.raises(InfeasibleConstraints):
        beam_search(scorer, ConstraintSet([("a",)], [("a",)]), 4, 5)


def test_stops_when_every_proposal_is_forbidden():
    class PrefersA:
        vocab = ("a", "b", EOS)
        eos = EOS

        def next_scores(self, prefix):
            return [0.0, -5.0, -9.0]

    res = beam_search(PrefersA(), ConstraintSet([("a",)], [("a", "a")]), 1, 6)
    assert "a" in res.tokens and not contains(res.tokens, ("a", "a"))


def test_argument_checks():
    scorer = HashScorer(("a", EOS), 0)
    with pytest.raises(ValueError):
        beam_search(scorer, ConstraintSet(), 0, 3)
    with pytest.raises(ValueError):
        plain_beam_search(scorer, 1, 0)

    class NoEos:
        vocab = ("a",)
        eos = EOS

        def next_scores(self, prefix):
            return [0.0]

    with pytest.raises(ValueError):
        plain_beam_search(NoEos(), 1, 2)

    class Broken(HashScorer):
        def next_scores(self, prefix):
            return [float("nan")] * len(self.vocab)

    with pytest.raises(ValueError):
        beam_search(Broken(("a", EOS), 0), ConstraintSet(), 1, 2)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 4))
def test_constrained_beam_never_worse_than_exhaustive_bound(seed, max_len, width):
    scorer = HashScorer(("a", "b", "c", EOS), seed)
    cons = ConstraintSet([("b", "c")], [("a", "a")])
    best = exhaustive(scorer, cons, max_len)
    if best is None:
        with pytest.raises(InfeasibleConstraints):
            beam_search(scorer, cons, width, max_len)
        return
    res = beam_search(scorer, cons, width, max_len)
    assert res.score <= -best[0]
