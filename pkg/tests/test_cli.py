import json
import subprocess
import sys
from collections import Counter
from pathlib import Path

import pytest

from iutrans.cli import main
from iutrans.detector import format_sample, make_training_samples, split_on_punctuation
from iutrans.pipeline import ConfigError, RunConfig, run_pipeline

TALK = Path(__file__).parent / "data" / "talk"
CONFIG = TALK / "run.ini"
GOLDEN = TALK / "golden_report.json"


def run_cli(*args):
    return subprocess.run(
        [sys.executable, "-m", "iutrans.cli", *args], capture_output=True, text=True, encoding="utf-8"
    )


def read_normalized(path):
    return Path(path).read_bytes().replace(b"\r\n", b"\n")


def test_golden_report_is_reproduced(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        proc = run_cli("run", "--config", str(CONFIG), "--report", str(out), "-q")
        assert proc.returncode == 0, proc.stderr
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0] == read_normalized(GOLDEN)


def test_report_contents():
    report = json.loads(GOLDEN.read_text(encoding="utf-8"))
    utts = report["utterances"]
    assert len(utts) == 6
    assert all(u["ee"] is not None and 0 < u["ee"] <= 1 for u in utts)
    first = utts[0]
    assert first["dropped_positions"] == {"abnormal": [], "fillers": [8], "repetitions": [7]}
    assert [u["tokens"] for u in first["units"]] == ["她说 我 错了 ，", "那个 叫 什么 妖姬 。"]
    assert first["retractions"] == 1
    # the whitelisted block survives normalization
    assert utts[3]["source"].startswith("一个 小格 一个 小格")
    assert report["summary"]["bleu"] is not None


def test_full_policy_inverse_ee_is_final_ly(capsys):
    assert main(["run", "--config", str(CONFIG), "--policy", "full", "-q"]) == 0
    report = json.loads(capsys.readouterr().out)
    for u in report["utterances"]:
        assert len(u["segments"]) == 1
        assert u["inverse_ee"] == u["segments"][-1]["ly"]


def test_stage_isolation_on_clean_input(tmp_path):
    (tmp_path / "s.tsv").write_text("a\t0\t我们\na\t1\t今天\na\t2\t，\na\t3\t讨论\na\t4\t。\n", encoding="utf-8")
    cfg = RunConfig.from_file(None, {"input.stream": str(tmp_path / "s.tsv"), "input.lexicon": str(TALK / "lexicon.tsv")})
    with_norm = run_pipeline(cfg)
    cfg.normalize = False
    without = run_pipeline(cfg)
    assert with_norm["config"].pop("normalize") and not without["config"].pop("normalize")
    assert with_norm == without


def test_missing_lexicon_is_config_error(tmp_path, caplog):
    assert main(["run", "--config", str(CONFIG), "--lexicon", str(tmp_path / "nope.tsv")]) == 1
    assert "config error" in caplog.text and "input.lexicon" in caplog.text


@pytest.mark.parametrize("override", ["policy.kind=greedy", "policy.bogus=1", "detector.delta1=0.2", "metrics.ee_r=0"])
def test_bad_settings_are_config_errors(override):
    assert main(["run", "--config", str(CONFIG), "--set", override, "-q"]) == 1


def test_unknown_section_is_config_error(tmp_path):
    cfg = tmp_path / "x.ini"
    cfg.write_text(CONFIG.read_text(encoding="utf-8") + "\n[extra]\nkey = 1\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        RunConfig.from_file(str(cfg))


def test_malformed_stream_is_data_error(tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("u\t10\ta\nu\t5\tb\n", encoding="utf-8")
    assert main(["run", "--config", str(CONFIG), "--stream", str(bad), "-q"]) == 2


def test_empty_utterance_is_pipeline_error(tmp_path, caplog):
    s = tmp_path / "s.tsv"
    s.write_text("ok\t0\t我\nok\t1\t。\nhush\t2\t嗯\nhush\t3\t呃\n", encoding="utf-8")
    assert main(["run", "--config", str(CONFIG), "--stream", str(s), "--set", "input.references=", "-q"]) == 3
    assert "'hush'" in caplog.text and "stage normalize" in caplog.text


def test_constrained_run(tmp_path, capsys):
    must = tmp_path / "must.txt"
    must.write_text("AI\n", encoding="utf-8")
    forbid = tmp_path / "forbid.txt"
    forbid.write_text("artificial intelligence\n", encoding="utf-8")
    s = tmp_path / "s.tsv"
    s.write_text("a\t0\t我们\na\t1\t讨论\na\t2\t人工\na\t3\t智能\na\t4\t。\n", encoding="utf-8")
    argv = ["run", "--config", str(CONFIG), "--stream", str(s), "--set", "input.references=", "-q"]
    assert main(argv + ["--must-include", str(must), "--forbid", str(forbid)]) == 0
    translation = json.loads(capsys.readouterr().out)["utterances"][0]["translation"]
    assert "AI" in translation.split() and "artificial intelligence" not in translation


def test_prepare_partial(tmp_path, capsys):
    (tmp_path / "s").write_text("x1 ， x3 x4\n", encoding="utf-8")
    (tmp_path / "t").write_text("y1 y2 y3 y4\n", encoding="utf-8")
    (tmp_path / "a").write_text("0-0 1-1 2-2 3-3\n", encoding="utf-8")
    args = ["prepare", "--mode", "partial", "--src", str(tmp_path / "s"), "--tgt", str(tmp_path / "t"),
            "--align", str(tmp_path / "a")]
    assert main(args) == 0
    out = capsys.readouterr()
    assert out.out.splitlines() == ["x1\ty1", "x1 ，\ty1 y2", "x1 ， x3\ty1 y2 y3", "x1 ， x3 x4\ty1 y2 y3 y4"]
    assert "subsentence=1" in out.err and "segment=3" in out.err
    assert main(args + ["--kind", "subsentence"]) == 0
    assert capsys.readouterr().out.splitlines() == ["x1 ，\ty1 y2"]
    assert main([*args[:2], "context", *args[3:]]) == 0
    assert capsys.readouterr().out.splitlines()[1] == "x1 ， x3 x4\ty1 y2 y3 y4\t0 0 1 1"


def test_prepare_detector_samples(tmp_path, capsys):
    sent = "她说 我 错了 ， 那个 叫 什么 什么 呃 妖姬 。"
    (tmp_path / "s").write_text(sent + "\n", encoding="utf-8")
    assert main(["prepare", "--mode", "detector-samples", "--src", str(tmp_path / "s")]) == 0
    bare, bounds = split_on_punctuation(sent.split())
    expect = [format_sample(x) for x in make_training_samples(bare, bounds)]
    assert Counter(capsys.readouterr().out.splitlines()) == Counter(expect)


def test_prepare_empty_and_mismatch(tmp_path, capsys):
    for name in "sta":
        (tmp_path / name).write_text("", encoding="utf-8")
    args = ["prepare", "--mode", "partial", "--src", str(tmp_path / "s"), "--tgt", str(tmp_path / "t"),
            "--align", str(tmp_path / "a")]
    assert main(args) == 0
    out = capsys.readouterr()
    assert out.out == "" and "sentences=0" in out.err
    (tmp_path / "t").write_text("y\n", encoding="utf-8")
    assert main(args) == 2
    assert main(["prepare", "--mode", "partial", "--src", str(tmp_path / "s")]) == 1


def test_bleu_command(tmp_path, capsys):
    (tmp_path / "h").write_text("the cat sat on the mat\n", encoding="utf-8")
    assert main(["bleu", "--hyp", str(tmp_path / "h"), "--ref", str(tmp_path / "h")]) == 0
    assert capsys.readouterr().out.startswith("BLEU = 100.00")
    (tmp_path / "r").write_text("a\nb\n", encoding="utf-8")
    assert main(["bleu", "--hyp", str(tmp_path / "h"), "--ref", str(tmp_path / "r")]) == 2


def test_ee_command(tmp_path, capsys):
    tl = tmp_path / "tl.tsv"
    tl.write_text("# utt\tLX\tLY\none\t5\t8\ntwo\t2\t10\ntwo\t4\t10\ntwo\t4\t4\n", encoding="utf-8")
    assert main(["ee", "--timeline", str(tl)]) == 0
    rows = [line.split("\t") for line in capsys.readouterr().out.splitlines()[1:]]
    assert rows == [["one", "1", "0.125000", "8.000000"], ["two", "3", f"{1 / 7.6:.6f}", "7.600000"]]
    tl.write_text("one\t5\n", encoding="utf-8")
    assert main(["ee", "--timeline", str(tl)]) == 2
    assert main(["ee", "--timeline", str(tl), "--ee-r", "0"]) == 1
