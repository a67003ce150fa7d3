"""Command-line entry point.

Subcommands::

    iutrans run      --config run.ini [overrides]    full pipeline and report
    iutrans prepare  --mode partial|context|detector-samples ...
    iutrans bleu     --hyp hyp.txt --ref ref.txt [--ref ref2.txt]
    iutrans ee       --timeline segments.tsv [--ee-r 0.3]

Exit status: 0 success, 1 configuration error, 2 data error, 3 pipeline error.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys

from .bleu import corpus_bleu
from .latency import DEFAULT_R, equilibrium_efficiency, inverse_ee
from .pipeline import ConfigError, PipelineError, RunConfig, dumps_report, run_pipeline, summary_table
from .prepare import MODES, prepare_corpus
from .stream import FormatError

log = logging.getLogger("iutrans")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_PIPELINE = 0, 1, 2, 3


def _read_lines(path):
    with open(path, encoding="utf-8") as fh:
        return fh.read().splitlines()


def cmd_run(args) -> int:
    overrides = dict(kv.split("=", 1) for kv in args.set or [])
    for flag, key in [
        ("stream", "input.stream"), ("lexicon", "input.lexicon"), ("references", "input.references"),
        ("must_include", "input.must_include"), ("forbid", "input.forbid"),
        ("policy", "policy.kind"), ("k_wait", "policy.k_wait"), ("k_discard", "policy.k_discard"),
        ("ee_r", "metrics.ee_r"), ("report", "output.report"),
    ]:
        value = getattr(args, flag)
        if value is not None:
            overrides[key] = os.path.abspath(value) if key.startswith(("input.", "output.")) else value
    if args.no_normalize:
        overrides["normalize.enabled"] = "false"
    cfg = RunConfig.from_file(args.config, overrides)
    report = run_pipeline(cfg)
    text = dumps_report(report)
    if cfg.report:
        with open(cfg.report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if not args.quiet:
        sys.stderr.write(summary_table(report))
    return EXIT_OK


def cmd_prepare(args) -> int:
    sources = _read_lines(args.src)
    targets = _read_lines(args.tgt) if args.tgt else None
    aligns = _read_lines(args.align) if args.align else None
    lines, stats = prepare_corpus(sources, targets, aligns, args.mode, tuple(args.kind), args.max_context)
    out = "".join(line + "\n" for line in lines)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    sys.stderr.write(" ".join(f"{k}={stats[k]}" for k in sorted(stats)) + ("\n" if stats else "sentences=0\n"))
    return EXIT_OK


def cmd_bleu(args) -> int:
    hyps = [line.split() for line in _read_lines(args.hyp)]
    ref_sets = [[line.split() for line in _read_lines(p)] for p in args.ref]
    for p, refs in zip(args.ref, ref_sets):
        if len(refs) != len(hyps):
            raise FormatError(f"{p}: {len(refs)} lines, hypotheses have {len(hyps)}")
    print(corpus_bleu(hyps, list(zip(*ref_sets))))
    return EXIT_OK


def parse_timeline(lines) -> dict[str, list[tuple[int, int]]]:
    """``utt_id<TAB>LX<TAB>LY`` per line, one line per segment."""
    out: dict[str, list[tuple[int, int]]] = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        try:
            utt, lx, ly = parts
            out.setdefault(utt, []).append((int(lx), int(ly)))
        except ValueError:
            raise FormatError("expected 'utt_id<TAB>LX<TAB>LY'", lineno) from None
    return out


def cmd_ee(args) -> int:
    timelines = parse_timeline(_read_lines(args.timeline))
    print("utt_id\tsegments\tEE\t1/EE")
    for utt, segs in timelines.items():
        try:
            inv = inverse_ee(segs, args.ee_r)
        except ValueError as exc:
            raise FormatError(f"{utt}: {exc}") from None
        print(f"{utt}\t{len(segs)}\t{equilibrium_efficiency(segs, args.ee_r):.6f}\t{inv:.6f}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iutrans", description=__doc__.split("\n")[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="replay a token stream through the pipeline")
    p.add_argument("--config", help="INI run configuration")
    p.add_argument("--stream")
    p.add_argument("--lexicon")
    p.add_argument("--references")
    p.add_argument("--must-include", dest="must_include", help="phrases the output must contain")
    p.add_argument("--forbid", help="phrases the output must not contain")
    p.add_argument("--policy", choices=["full", "subsentence", "wait_k", "context_aware"])
    p.add_argument("--k-wait", dest="k_wait")
    p.add_argument("--k-discard", dest="k_discard")
    p.add_argument("--ee-r", dest="ee_r")
    p.add_argument("--report", help="write the JSON report here instead of stdout")
    p.add_argument("--no-normalize", action="store_true")
    p.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="override any config key")
    p.add_argument("-q", "--quiet", action="store_true", help="no summary table on stderr")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("prepare", help="build training corpora")
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--src", required=True)
    p.add_argument("--tgt")
    p.add_argument("--align", help="Pharaoh alignments, 0-based")
    p.add_argument("--kind", action="append", choices=["subsentence", "segment"])
    p.add_argument("--max-context", type=int, dest="max_context")
    p.add_argument("--out")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("bleu", help="corpus BLEU")
    p.add_argument("--hyp", required=True)
    p.add_argument("--ref", required=True, action="append")
    p.set_defaults(func=cmd_bleu)

    p = sub.add_parser("ee", help="equilibrium efficiency over a segment file")
    p.add_argument("--timeline", required=True)
    p.add_argument("--ee-r", dest="ee_r", type=float, default=DEFAULT_R)
    p.set_defaults(func=cmd_ee)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    if getattr(args, "kind", None) is None and args.command == "prepare":
        args.kind = ["subsentence", "segment"]
    if args.command == "prepare" and args.mode != "detector-samples" and not (args.tgt and args.align):
        log.error("--tgt and --align are required for mode %s", args.mode)
        return EXIT_CONFIG
    if args.command == "ee" and args.ee_r <= 0:
        log.error("--ee-r must be positive")
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        log.error("config error: %s", exc)
        return EXIT_CONFIG
    except (FormatError, FileNotFoundError, UnicodeDecodeError) as exc:
        log.error("data error: %s", exc)
        return EXIT_DATA
    except PipelineError as exc:
        log.error("pipeline error: %s", exc)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
