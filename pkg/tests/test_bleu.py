import math

import pytest

from iutrans.bleu import corpus_bleu, ngrams


def test_identity_is_100():
    sent = "the cat sat on the mat".split()
    assert corpus_bleu([sent], [[sent]]).score == pytest.approx(100.0)


def test_no_four_gram_overlap_is_zero():
    hyp = "the cat sat on the mat".split()
    ref = "the cat is on the mat".split()
    res = corpus_bleu([hyp], [[ref]])
    assert res.precisions[3] == 0.0 and res.score == 0.0


def test_hand_worksheet():
    hyp = "the cat sat on the mat today".split()
    ref = "the cat sat on a mat today".split()
    res = corpus_bleu([hyp], [[ref]])
    # clipped matches per order: 6/7, 4/6, 2/5, 1/4; equal lengths so no penalty
    assert res.precisions == pytest.approx((6 / 7, 4 / 6, 2 / 5, 1 / 4))
    assert res.brevity_penalty == 1.0
    assert res.score == pytest.approx(100 * (6 / 7 * 4 / 6 * 2 / 5 * 1 / 4) ** 0.25)


def test_brevity_penalty_and_closest_reference():
    short = "the cat sat on".split()
    res = corpus_bleu([short], [["the cat sat on the mat".split()]])
    assert res.brevity_penalty == pytest.approx(math.exp(1 - 6 / 4))
    assert res.score == pytest.approx(100 * math.exp(-0.5))
    hyp = "a b c d e f".split()
    res = corpus_bleu([hyp], [["a b c".split(), "a b c d e f g".split()]])
    assert res.ref_len == 7


def test_clipping_and_pooling():
    assert ngrams(["a", "a"], 1) == {("a",): 2}
    res = corpus_bleu([["a", "a", "a", "a"]], [[["a", "b", "c", "d"]]], max_n=1)
    assert res.precisions == (0.25,)
    pooled = corpus_bleu([["x", "y"], ["x", "z"]], [[["x", "y"]], [["q", "q"]]], max_n=1)
    assert pooled.precisions == (0.5,)


def test_errors_and_str():
    with pytest.raises(ValueError):
        corpus_bleu([["a"]], [])
    with pytest.raises(ValueError):
        corpus_bleu([["a"]], [[]])
    assert corpus_bleu([[]], [[["a"]]]).score == 0.0
    assert str(corpus_bleu([["a"] * 4], [[["a"] * 4]])).startswith("BLEU = 100.00")
