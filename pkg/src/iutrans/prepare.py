"""Training-corpus generation from tokenized bitext and Pharaoh alignments."""
from __future__ import annotations

from collections import Counter
from typing import Sequence

from .alignment import AlignmentSet, extract_pairs, make_context_corpus, make_partial_corpus, parse_pharaoh
from .detector import format_sample, make_training_samples, split_on_punctuation
from .stream import FormatError

MODES = ("partial", "context", "detector-samples")


def prepare_corpus(
    sources: Sequence[str],
    targets: Sequence[str] | None = None,
    alignments: Sequence[str] | None = None,
    mode: str = "partial",
    kinds: Sequence[str] = ("subsentence", "segment"),
    max_context: int | None = None,
) -> tuple[list[str], Counter]:
    """Return output lines and extraction statistics.

    ``partial`` and ``context`` need targets and alignments with matching line
    counts; ``detector-samples`` reads the source side only and uses its
    punctuation as unit boundaries.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    stats: Counter = Counter()
    lines: list[str] = []
    if mode == "detector-samples":
        for src in sources:
            bare, bounds = split_on_punctuation(src.split())
            samples = make_training_samples(bare, bounds, max_context)
            stats["sentences"] += 1
            stats["positive"] += sum(1 for _, y in samples if y == 1)
            stats["negative"] += sum(1 for _, y in samples if y == 0)
            lines.extend(format_sample(s) for s in samples)
        return lines, stats

    if targets is None or alignments is None:
        raise ValueError(f"mode {mode!r} needs targets and alignments")
    if not len(sources) == len(targets) == len(alignments):
        raise FormatError(
            f"line counts differ: {len(sources)} source, {len(targets)} target, {len(alignments)} alignment"
        )
    for lineno, (src, tgt, al) in enumerate(zip(sources, targets, alignments), start=1):
        X, Y = src.split(), tgt.split()
        try:
            A = AlignmentSet.of(parse_pharaoh(al, len(X), len(Y)), len(X), len(Y))
        except FormatError as exc:
            raise FormatError(str(exc), lineno) from None
        stats["sentences"] += 1
        for pair in extract_pairs(X, Y, A):
            stats[pair.split_kind] += 1
            if pair.split_kind not in kinds:
                continue
            split = pair.split_point
            if mode == "partial":
                rec = make_partial_corpus(X, Y, A, split)
            else:
                if split[1] == len(Y):
                    stats["skipped_full"] += 1
                    continue
                rec = make_context_corpus(X, Y, A, split)
            lines.append(rec.to_line())
            stats["records"] += 1
    return lines, stats
