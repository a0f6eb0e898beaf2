from __future__ import annotations

import json
import subprocess
import sys

import pytest

from readgrade.cli import build_parser, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_human(capsys):
    code, out, _ = run(capsys, "analyze", "The cat sat on the mat.")
    assert code == 0
    assert "116.145" in out


def test_analyze_json(capsys):
    code, out, _ = run(capsys, "analyze", "--json", "The cat sat on the mat.")
    data = json.loads(out)
    assert code == 0
    assert data["scores"]["FRES"]["raw"] == pytest.approx(116.145)
    assert data["band"] == 1 and data["decided_by"] == "unanimous"


def test_analyze_errors(capsys, tmp_path):
    assert run(capsys, "analyze", "")[0] == 2
    assert run(capsys, "analyze", "--file", str(tmp_path / "missing.txt"))[0] == 1


def test_unknown_flag_exits_nonzero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["analyze", "--frobnicate"])
    assert exc.value.code != 0


def test_help_documents_every_flag():
    parser = build_parser()
    for sub in parser._subparsers._group_actions[0].choices.values():
        for action in sub._actions:
            assert action.help, f"{sub.prog}: {action.dest} has no help"


def test_pipeline_roundtrip(capsys, tmp_path):
    gen = tmp_path / "gen.jsonl"
    assert run(capsys, "generate", "--question", "Why is the sky blue?", "--seed", "1", "-o", str(gen))[0] == 0
    assert len(gen.read_text().splitlines()) == 54

    outs = []
    for jobs in ("1", "2"):
        cls = tmp_path / f"cls{jobs}.jsonl"
        code, _, err = run(capsys, "classify", str(gen), "-o", str(cls), "--jobs", jobs)
        assert code == 0
        assert json.loads(err.strip().splitlines()[-1])["total"] == 54
        outs.append(cls.read_bytes())
    assert outs[0] == outs[1]

    code, out, _ = run(capsys, "partition", str(tmp_path / "cls1.jsonl"), "--out-dir", str(tmp_path / "p"))
    assert code == 0 and json.loads(out)["total"] == 54
    assert run(capsys, "emit-finetune", "--partition-dir", str(tmp_path / "p"), "--out-dir", str(tmp_path / "f"))[0] == 0
    assert len(list((tmp_path / "f").glob("finetune_*.jsonl"))) == 6

    targets = tmp_path / "targets.jsonl"
    rows = [json.loads(line) for line in gen.read_text().splitlines()]
    targets.write_text("".join(json.dumps({"id": r["id"], "target_band": r["target_band"]}) + "\n" for r in rows))
    code, out, _ = run(
        capsys, "evaluate", "--classified", str(tmp_path / "cls1.jsonl"), "--targets", str(targets), "--out-dir", str(tmp_path / "ev")
    )
    assert code == 0
    assert (tmp_path / "ev" / "report.json").exists() and (tmp_path / "ev" / "confusion.csv").exists()
    assert sum(json.loads(out)["counts"].values()) == 54

    code, out, _ = run(capsys, "diversity", "--base", str(gen), "--new", str(gen))
    assert json.loads(out)["diversity_gain"] == 0.0
    code, out, _ = run(capsys, "lengths", str(gen))
    assert json.loads(out)["total"] > 54
    code, out, _ = run(capsys, "zipf", str(gen), "--min-count", "5")
    assert out.splitlines()[0] == "rank,word,count"


def test_generate_is_deterministic(capsys):
    a = run(capsys, "generate", "--question", "What is rain?", "--seed", "9")[1]
    b = run(capsys, "generate", "--question", "What is rain?", "--seed", "9")[1]
    assert a == b and len(a.splitlines()) == 54


def test_gen_prompts(capsys):
    code, out, _ = run(capsys, "gen-prompts", "--question", "Why is the sky blue?")
    assert code == 0 and len(out.splitlines()) == 54
    code, out, _ = run(capsys, "gen-questions", "-n", "3")
    assert len(out.splitlines()) == 54


def test_classify_line_diagnostics(capsys, tmp_path):
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"id": "a", "question": "Q", "answer": "Ok."}\n{"id": "b"}\n')
    code, _, err = run(capsys, "classify", str(bad))
    assert code == 2 and "line 2" in err
    code, out, err = run(capsys, "classify", str(bad), "--lenient")
    assert code == 0 and len(out.splitlines()) == 1
    assert json.loads(err.strip().splitlines()[-1])["skipped"] == 1


def test_config_file(capsys, tmp_path):
    (tmp_path / "dc.txt").write_text("the\n")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"word_lists": {"dale_chall": "dc.txt"}, "band_mapping": {"metrics": {"FRES": {"cuts": [200, 190, 180, 170, 160], "direction": "descending", "closed": "left"}}}}))
    code, out, _ = run(capsys, "analyze", "--json", "--config", str(cfg), "The cat sat on the mat.")
    data = json.loads(out)
    assert data["stats"]["dc_difficult_count"] == 4
    assert data["scores"]["FRES"]["band"] == 6
    cfg.write_text(json.dumps({"word_lists": {"spache": "missing.txt"}}))
    assert run(capsys, "analyze", "--config", str(cfg), "Hi.")[0] == 2


def test_survey(capsys, tmp_path):
    rk = tmp_path / "rk.csv"
    rk.write_text("rater_id,position,assigned_rank\n" + "".join(f"r1,{p},{7 - p}\n" for p in range(1, 7)))
    code, out, _ = run(capsys, "survey", "--rankings", str(rk))
    data = json.loads(out)["ranking"]
    assert data["l1_by_position"] == [5, 3, 1, 1, 3, 5]
    assert data["tau_pooled"] == -1.0
    assert run(capsys, "survey")[0] == 2


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "readgrade.cli", "gen-prompts", "--question", "Why?"], capture_output=True, text=True)
    assert res.returncode == 0
    assert len(res.stdout.splitlines()) == 54
