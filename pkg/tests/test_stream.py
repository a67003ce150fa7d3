from pathlib import Path

import pytest
from hypothesis import given, strategies as st

from iutrans.stream import (
    FormatError,
    InformationUnit,
    Segment,
    Token,
    group_utterances,
    parse_stream,
    read_stream,
    serialize_stream,
)

DATA = Path(__file__).parent / "data"


def test_single_record():
    events = parse_stream("0\t0\t她说\n".encode())
    assert len(events) == 1
    assert events[0].utt_id == "0"
    assert events[0].token == Token("她说", 0, 0)


def test_decreasing_timestamp_rejected():
    with pytest.raises(FormatError):
        parse_stream(b"u\t100\ta\nu\t50\tb\n")


def test_four_line_fixture():
    events = read_stream(DATA / "four_tokens.tsv")
    assert [e.token.index for e in events] == [0, 1, 2, 3]
    assert [e.token.surface for e in events] == ["她说", "我", "错了", "。"]
    assert [e.token.ts_ms for e in events] == [0, 120, 260, 400]
    assert {e.utt_id for e in events} == {"u1"}


@pytest.mark.parametrize(
    "line",
    ["u\t0\t \n", "u\t0\n", "u\tzero\ta\n", "u\t0\ta b\n", '{"utt": "u", "ts": 0}\n'],
)
def test_malformed_lines(line):
    with pytest.raises(FormatError):
        parse_stream(line)


def test_json_records_and_comments():
    text = '# header\n{"utt": 3, "ts": 5, "token": "x"}\n\nu\t7\ty\n'
    events = parse_stream(text)
    assert [(e.utt_id, e.token.surface, e.token.index) for e in events] == [("3", "x", 0), ("u", "y", 0)]


def test_indices_reset_per_utterance():
    events = parse_stream("a\t0\tx\na\t1\ty\nb\t2\tz\n")
    assert [e.token.index for e in events] == [0, 1, 0]
    groups = group_utterances(events)
    assert [(u, [t.surface for t in toks]) for u, toks in groups] == [("a", ["x", "y"]), ("b", ["z"])]


def test_interleaved_utterances_rejected():
    events = parse_stream("a\t0\tx\nb\t1\ty\na\t2\tz\n")
    with pytest.raises(FormatError):
        group_utterances(events)


surface = st.text(alphabet=st.characters(blacklist_categories=("Z", "C")), min_size=1, max_size=4)


@given(st.lists(st.tuples(st.sampled_from(["u1", "u2"]), st.integers(0, 50), surface), max_size=20))
def test_roundtrip(records):
    ts, lines = 0, []
    for utt, dt, tok in sorted(records, key=lambda r: r[0]):
        ts += dt
        lines.append(f"{utt}\t{ts}\t{tok}")
    text = "\n".join(lines) + ("\n" if lines else "")
    assert serialize_stream(parse_stream(text)) == text


def test_unit_invariants():
    toks = (Token("a", 0, 3), Token("b", 1, 4))
    iu = InformationUnit(toks, 0, 0, False)
    assert iu.surfaces == ["a", "b"] and iu.is_sentence_initial
    with pytest.raises(ValueError):
        InformationUnit((), 0, 0, False)
    with pytest.raises(ValueError):
        InformationUnit((Token("a", 0, 1), Token("b", 0, 3)), 0, 0, False)
    with pytest.raises(ValueError):
        Token("", 0, 0)


def test_segment_bounds():
    Segment(1, 0, 0, 0)
    with pytest.raises(ValueError):
        Segment(0, 1, 0, 0)
