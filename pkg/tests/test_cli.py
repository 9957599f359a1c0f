import json
import subprocess
import sys

import pytest

from skqes.cli import main

SMALL = {
    "name": "small",
    "defaults": {"trials": 60, "seed": 5},
    "thresholds": {"secure_max": 0.05, "broken_min": 0.25},
    "rows": [
        {"game": "uf", "scheme": "classical_otp", "adversary": "bit_flip", "expect": "broken"},
        {"game": "uf", "scheme": {"id": "classical_etm"}, "adversary": "replay_c",
         "expect": "secure"},
        {"game": "quf", "scheme": "extra_bit", "adversary": "flip", "expect": "broken"},
        {"game": "quf_forge", "scheme": {"id": "twodes_tag_rand", "m": 1, "t": 1},
         "adversary": "random"},
    ],
}


def _write(tmp_path, cfg, name="c.cfg"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def _json_lines(text):
    return [json.loads(l) for l in text.splitlines() if l.startswith("{")]


@pytest.mark.parametrize("argv,code", [
    (["verify-design", "--family", "pauli", "--t", "1", "--n", "1"], 0),
    (["verify-design", "--family", "clifford", "--t", "2", "--n", "1"], 0),
    (["verify-design", "--family", "pauli", "--t", "2", "--n", "1"], 1),
    (["verify-design", "--family", "haar", "--t", "2", "--n", "1"], 2),
])
def test_verify_design_exit_codes(argv, code, capsys):
    assert main(argv) == code


def test_qca_exit_codes(capsys):
    assert main(["qca", "--scheme", "pauli_otp", "--param", "n=1", "--attack", "id"]) == 0
    assert main(["qca", "--scheme", "extra_bit", "--param", "base=\"twodes_tag\"",
                 "--attack", "flip_extra_bit"]) == 1
    report = json.loads(capsys.readouterr().out.splitlines()[-1])
    assert report["distance"] >= 0.4 and report["plaintext_marginal"] <= 1e-6
    assert main(["qca", "--scheme", "nope", "--attack", "id"]) == 2


def test_run_small_config(tmp_path, capsys):
    out = tmp_path / "res.jsonl"
    assert main(["run", "--config", _write(tmp_path, SMALL), "--out", str(out)]) == 0
    summaries = [s for s in _json_lines(capsys.readouterr().out) if s.get("kind") == "summary"]
    assert [s["verdict"] for s in summaries] == ["broken", "secure", "broken", "n/a"]
    lines = [json.loads(l) for l in out.read_text().splitlines()]
    assert sum(l["kind"] == "trial" for l in lines) == 60 * 7
    assert lines[-1]["kind"] == "manifest"


def test_run_is_reproducible(tmp_path, capsys):
    cfg = _write(tmp_path, SMALL)
    texts = []
    for name in ("a.jsonl", "b.jsonl"):
        main(["run", "--config", cfg, "--trials", "20", "--out", str(tmp_path / name)])
        texts.append([l for l in (tmp_path / name).read_text().splitlines()
                      if '"kind": "manifest"' not in l])
    assert texts[0] == texts[1]


def test_run_flags_unexpected_and_inconclusive(tmp_path, capsys):
    wrong = dict(SMALL, rows=[dict(SMALL["rows"][0], expect="secure")])
    assert main(["run", "--config", _write(tmp_path, wrong), "--trials", "30"]) == 1
    # a t=4 garbage forger sits between the thresholds
    mid = dict(SMALL, rows=[{"game": "quf", "scheme": {"id": "twodes_tag_rand", "m": 1, "t": 2},
                             "adversary": "random", "expect": "secure"}])
    assert main(["run", "--config", _write(tmp_path, mid), "--trials", "400"]) == 3


@pytest.mark.parametrize("argv", [
    ["run", "--config", "/does/not/exist.cfg"],
    ["run", "--trials", "0"],
])
def test_run_usage_errors(argv, capsys):
    assert main(argv) == 2


def test_config_errors(tmp_path, capsys):
    for bad in ({"rows": []},
                {"rows": [{"game": "nope", "scheme": "pauli_otp", "adversary": "replay"}]},
                {"rows": [{"game": "quf", "scheme": "nope", "adversary": "replay"}]},
                {"rows": [{"game": "quf", "scheme": "pauli_otp", "adversary": "replay",
                           "trials": -1}]}):
        assert main(["run", "--config", _write(tmp_path, bad)]) == 2


def test_list(capsys):
    assert main(["list"]) == 0
    out = capsys.readouterr().out
    assert "schemes:" in out and "twodes_tag" in out and "qae_to_quf" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "skqes.cli", "list"], capture_output=True,
                          text=True)
    assert proc.returncode == 0 and "games:" in proc.stdout
