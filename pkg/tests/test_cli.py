import io
import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from oneshot_gestures import language as L
from oneshot_gestures.cli import main
from oneshot_gestures.metrics import circularity
from oneshot_gestures.scripted import IMAGE_SIZE, demonstration
from oneshot_gestures.session import bracket, format_stream
from oneshot_gestures.shape import from_pbm, resample_contour, trace_contour

GOLDEN = Path(__file__).parent / "golden"
REGEN = os.environ.get("OSG_REGEN_GOLDEN") == "1"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def check_golden(name, data):
    path = GOLDEN / name
    if isinstance(data, str):
        data = data.encode("utf-8")
    if REGEN:
        path.write_bytes(data)
    assert path.exists(), f"missing golden file {name}; run with OSG_REGEN_GOLDEN=1"
    assert data == path.read_bytes(), f"output differs from golden {name}"


@pytest.fixture(scope="module")
def work(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    assert main(["scripted", "--set", "small", "--out", str(root / "demos")]) == 0
    for label in ("circle", "wedge", "three"):
        assert main(["define", "--in", str(root / "demos" / f"{label}.jsonl"),
                     "--label", label, "--lang", str(root / "lang.json")]) == 0
    return root


def two_gesture_stream(path):
    a = bracket(demonstration("circle"))
    b = bracket(demonstration("three", t0=10.0))
    path.write_text(format_stream(a + b, *IMAGE_SIZE))
    return path


def test_define_output_and_language_golden(work, capsys, tmp_path):
    code, out, _ = run(capsys, "define", "--in", work / "demos" / "circle.jsonl",
                       "--label", "circle", "--lang", tmp_path / "l.json")
    assert code == 0
    assert json.loads(out)["salient_keypoints"] == ["right_wrist"]
    check_golden("define_circle.json", out)
    check_golden("lang_small.json", (work / "lang.json").read_bytes())


def test_define_duplicate_and_bad_streams(work, capsys, tmp_path):
    code, _, err = run(capsys, "define", "--in", work / "demos" / "circle.jsonl",
                       "--label", "circle", "--lang", work / "lang.json")
    assert code == 2 and "DuplicateLabel" in err
    no_trig = tmp_path / "none.jsonl"
    no_trig.write_text(format_stream(demonstration("circle").frames, *IMAGE_SIZE))
    assert run(capsys, "define", "--in", no_trig, "--label", "x",
               "--lang", tmp_path / "l.json")[0] == 2
    assert run(capsys, "define", "--in", two_gesture_stream(tmp_path / "two.jsonl"),
               "--label", "x", "--lang", tmp_path / "l.json")[0] == 2
    bad = tmp_path / "bad.jsonl"
    bad.write_text('{"type": "header"')
    assert run(capsys, "define", "--in", bad, "--label", "x", "--lang", tmp_path / "l.json")[0] == 3
    assert run(capsys, "define", "--in", tmp_path / "missing.jsonl", "--label", "x",
               "--lang", tmp_path / "l.json")[0] == 3
    assert not (tmp_path / "l.json").exists()


def test_define_failure_leaves_language_intact(work, capsys, tmp_path, monkeypatch):
    lang = tmp_path / "l.json"
    lang.write_bytes((work / "lang.json").read_bytes())
    before = lang.read_bytes()

    def boom(*a, **k):
        raise OSError("disk full")

    monkeypatch.setattr(os, "replace", boom)
    with pytest.raises(OSError):
        main(["define", "--in", str(work / "demos" / "circle.jsonl"), "--label", "o",
              "--lang", str(lang)])
    assert lang.read_bytes() == before
    assert [p.name for p in tmp_path.iterdir()] == ["l.json"]


def test_recognize_two_gestures_json(work, capsys, tmp_path):
    stream = two_gesture_stream(tmp_path / "two.jsonl")
    code, out, _ = run(capsys, "recognize", "--in", stream, "--lang", work / "lang.json", "--json")
    assert code == 0
    res = json.loads(out)
    assert [r["predicted"] for r in res] == ["circle", "three"]
    assert res[0]["tally"]["circle"] == 7
    check_golden("recognize_two.json", out)
    again = run(capsys, "recognize", "--in", stream, "--lang", work / "lang.json", "--json")[1]
    assert again == out


def test_recognize_text_and_stdin(work, capsys, monkeypatch):
    text = (work / "demos" / "wedge.jsonl").read_text()
    monkeypatch.setattr(sys, "stdin", io.StringIO(text))
    code, out, _ = run(capsys, "recognize", "--in", "-", "--lang", work / "lang.json")
    assert code == 0 and out.startswith("gesture 1: wedge (7/7 votes)")


def test_recognize_empty_language(work, capsys, tmp_path):
    blank = tmp_path / "blank.json"
    blank.write_text("")
    stream = work / "demos" / "circle.jsonl"
    assert run(capsys, "recognize", "--in", stream, "--lang", blank)[0] == 2
    blank.write_bytes(L.save(L.GestureLanguage()))
    assert run(capsys, "recognize", "--in", stream, "--lang", blank)[0] == 2
    blank.write_text('{"version": 999}')
    assert run(capsys, "recognize", "--in", stream, "--lang", blank)[0] == 3


def test_recognize_missing_everything(work, capsys, tmp_path):
    from oneshot_gestures.trajectory import GestureTrajectory, KeypointFrame
    traj = demonstration("circle")
    bare = GestureTrajectory(KeypointFrame(f.t, {k: v for k, v in f.keypoints.items()
                                                 if "wrist" not in k}) for f in traj.frames)
    p = tmp_path / "bare.jsonl"
    p.write_text(format_stream(bracket(bare), *IMAGE_SIZE))
    assert run(capsys, "recognize", "--in", p, "--lang", work / "lang.json")[0] == 1


def test_augment_evaluate_golden(work, capsys, tmp_path):
    outs = []
    for name in ("a", "b"):
        code, _, _ = run(capsys, "augment", "--lang", work / "demos", "--n", 4, "--seed", 7,
                         "--out", tmp_path / name)
        assert code == 0
        outs.append(sorted((p.name, p.read_bytes()) for p in (tmp_path / name).iterdir()))
    assert outs[0] == outs[1]
    manifest = json.loads((tmp_path / "a" / "manifest.json").read_text())
    assert manifest["seed"] == 7 and len(manifest["files"]) == 12
    check_golden("augment_manifest.json", (tmp_path / "a" / "manifest.json").read_bytes())
    check_golden("augment_sample.jsonl", (tmp_path / "a" / "three_0002.jsonl").read_bytes())

    code, out, _ = run(capsys, "evaluate", "--dataset", tmp_path / "a" / "manifest.json",
                       "--lang", work / "lang.json", "--json")
    assert code == 0 and json.loads(out)["total"] == 12
    check_golden("evaluate_seed7.json", out)
    par = run(capsys, "evaluate", "--dataset", tmp_path / "a" / "manifest.json",
              "--lang", work / "lang.json", "--json", "--parallel", 3)[1]
    assert par == out
    by_dir = run(capsys, "evaluate", "--dataset", tmp_path / "a",
                 "--lang", work / "lang.json", "--json")[1]
    assert by_dir == out
    table = run(capsys, "evaluate", "--dataset", tmp_path / "a" / "manifest.json",
                "--lang", work / "lang.json")[1]
    assert table.splitlines()[0].split() == ["true\\pred", "circle", "wedge", "three"]


def test_augment_builtin_and_errors(capsys, tmp_path):
    assert run(capsys, "augment", "--lang", "builtin:large", "--n", 1, "--out", tmp_path / "o")[0] == 0
    assert len(json.loads((tmp_path / "o" / "manifest.json").read_text())["files"]) == 8
    assert run(capsys, "augment", "--lang", "builtin:huge", "--n", 1, "--out", tmp_path / "x")[0] == 2
    assert run(capsys, "augment", "--lang", tmp_path / "nodir", "--n", 1,
               "--out", tmp_path / "x")[0] == 3


def test_render(work, capsys, tmp_path):
    out = tmp_path / "c.pbm"
    assert run(capsys, "render", "--in", work / "demos" / "circle.jsonl", "--out", out)[0] == 0
    data = out.read_bytes()
    assert data.startswith(b"P4\n256 256\n")
    check_golden("render_circle.pbm", data)
    clean = tmp_path / "clean.jsonl"
    clean.write_text(format_stream(bracket(demonstration("circle", jitter=0.0)), *IMAGE_SIZE))
    assert run(capsys, "render", "--in", clean, "--out", out)[0] == 0
    contour = resample_contour(trace_contour(from_pbm(out.read_bytes())), 128)
    assert circularity(contour) >= 0.9
    pgm = tmp_path / "s.pgm"
    assert run(capsys, "render", "--in", work / "demos" / "circle.jsonl", "--out", pgm,
               "--salient", "right_wrist,left_wrist", "--size", 64)[0] == 0
    assert pgm.read_bytes().startswith(b"P2\n64 64\n255\n")


def test_describe_golden(work, capsys):
    code, out, _ = run(capsys, "describe", "--in", work / "demos" / "three.jsonl",
                       "--lang", work / "lang.json")
    assert code == 0
    refs = json.loads(out)[0]["references"]
    assert [r["label"] for r in refs] == ["circle", "wedge", "three"]
    assert list(refs[0]["descriptors"]) == ["hu", "zernike", "fourier", "metrics"]
    check_golden("describe_three.json", out)


def test_bench(work, capsys):
    code, out, _ = run(capsys, "bench", "--lang", work / "lang.json",
                       "--in", work / "demos" / "three.jsonl", "--iters", 3, "--json")
    rep = json.loads(out)
    assert code == 0 and rep["iters"] == 3 and rep["references"] == 3
    assert rep["median_ms"] > 0 and rep["p95_ms"] >= rep["median_ms"] * 0.5


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["recognize"])
    assert exc.value.code == 2


def test_console_script_and_log_env(work, tmp_path):
    env = dict(os.environ, OSG_LOG="debug")
    proc = subprocess.run([sys.executable, "-m", "oneshot_gestures.cli", "recognize", "--in",
                           str(work / "demos" / "circle.jsonl"), "--lang",
                           str(work / "lang.json"), "--json"],
                          capture_output=True, text=True, env=env)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)[0]["predicted"] == "circle"
