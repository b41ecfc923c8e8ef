import json
import shutil

import pytest

from pediloop.cli import main
from pediloop.recording import load_recording
from pediloop.worldsim.types import ScenarioPhase

from conftest import data_path


@pytest.fixture()
def workdir(tmp_path):
    for name in (
        "scenario_yield_aggressive.ini",
        "scenario_ignore.ini",
        "university_crossing.xodr",
        "walk_17joint.bvh",
        "presence_synthetic_18.csv",
    ):
        shutil.copy(data_path(name), tmp_path / name)
    return tmp_path


def run_cli(*argv) -> int:
    return main(list(argv))


def live_recording(workdir, name="run.plrec", scenario="scenario_yield_aggressive.ini"):
    out = workdir / name
    code = run_cli(
        "live", "--config", str(workdir / scenario), "--out", str(out), "--fast"
    )
    assert code == 0
    return out


def test_live_records_full_scenario(workdir, capsys):
    out = live_recording(workdir)
    stdout = capsys.readouterr().out
    assert "achieved_fps" in stdout
    assert "sensor_ops=0" in stdout
    assert "budget_violations" in stdout
    rec = load_recording(out)
    assert rec.snapshots[-1].scenario_phase is ScenarioPhase.DONE
    assert rec.dt_ms == 55


def test_live_missing_map_exits_2(workdir, capsys):
    cfg = workdir / "scenario_yield_aggressive.ini"
    broken = workdir / "broken.ini"
    broken.write_text(cfg.read_text().replace("university_crossing.xodr", "missing.xodr"))
    code = run_cli("live", "--config", str(broken), "--out", str(workdir / "x.plrec"), "--fast")
    assert code == 2
    assert "missing.xodr" in capsys.readouterr().err


def test_live_missing_config_exits_2(workdir, monkeypatch, capsys):
    monkeypatch.delenv("PEDILOOP_CONFIG", raising=False)
    code = run_cli("live", "--out", str(workdir / "x.plrec"), "--fast")
    assert code == 2


def test_config_via_environment(workdir, monkeypatch):
    monkeypatch.setenv("PEDILOOP_CONFIG", str(workdir / "scenario_yield_aggressive.ini"))
    code = run_cli("live", "--out", str(workdir / "env.plrec"), "--fast")
    assert code == 0


def test_replay_verifies_and_exits_0(workdir, capsys):
    out = live_recording(workdir)
    code = run_cli("replay", "--recording", str(out))
    assert code == 0
    assert "hash verification passed" in capsys.readouterr().out


def test_replay_without_sensors_prints_snapshots(workdir, capsys):
    out = live_recording(workdir)
    code = run_cli("replay", "--recording", str(out), "--print-snapshots", "2")
    assert code == 0
    stdout = capsys.readouterr().out
    lines = [l for l in stdout.splitlines() if l.startswith("{")]
    assert len(lines) == 2
    assert json.loads(lines[0])["tick"] == 0


def test_replay_tampered_recording_exits_3(workdir, capsys):
    out = live_recording(workdir)
    raw = bytearray(out.read_bytes())
    raw[-30] ^= 0x01
    out.write_bytes(bytes(raw))
    code = run_cli("replay", "--recording", str(out))
    assert code == 3


def test_replay_with_sensors_writes_exports(workdir, capsys):
    out = live_recording(workdir)
    export = workdir / "exports"
    code = run_cli(
        "replay",
        "--recording", str(out),
        "--lidar", "--lidar-channels", "4", "--lidar-points", "90",
        "--depth",
        "--out-dir", str(export),
    )
    assert code == 0
    stdout = capsys.readouterr().out
    assert "walker points=" in stdout
    assert list(export.glob("lidar_*.txt"))
    assert list(export.glob("lidar_*.bin"))
    assert list(export.glob("depth_*.pgm"))


def test_merge_bvh_roundtrip_and_immutability(workdir, capsys):
    out = live_recording(workdir)
    before = out.read_bytes()
    merged = workdir / "merged.plrec"
    code = run_cli(
        "merge-bvh",
        "--recording", str(out),
        "--clip", str(workdir / "walk_17joint.bvh"),
        "--out", str(merged),
    )
    assert code == 0
    assert out.read_bytes() == before  # input untouched
    rec = load_recording(merged)
    assert rec.motion_track is not None


def test_merge_bvh_refuses_inplace(workdir, capsys):
    out = live_recording(workdir)
    code = run_cli(
        "merge-bvh", "--recording", str(out), "--clip", str(workdir / "walk_17joint.bvh"),
        "--out", str(out),
    )
    assert code == 2


def test_merge_bvh_short_clip_exits_3(workdir, capsys):
    out = live_recording(workdir)
    clip_text = (workdir / "walk_17joint.bvh").read_text()
    lines = clip_text.splitlines()
    frames_at = next(i for i, l in enumerate(lines) if l.startswith("Frames:"))
    short = "\n".join(lines[: frames_at] + ["Frames: 40", lines[frames_at + 1]] + lines[frames_at + 2 : frames_at + 42]) + "\n"
    (workdir / "short.bvh").write_text(short)
    code = run_cli(
        "merge-bvh", "--recording", str(out), "--clip", str(workdir / "short.bvh"),
        "--out", str(workdir / "m.plrec"),
    )
    assert code == 3
    assert "tick poses" in capsys.readouterr().err


def test_score_prints_subscales_and_alpha(workdir, capsys):
    code = run_cli("score", "--responses", str(workdir / "presence_synthetic_18.csv"))
    assert code == 0
    out = capsys.readouterr().out
    assert out.count("M=") == 3
    assert out.count("SD=") == 3
    assert "alpha=" in out


def test_score_json_summary(workdir):
    summary = workdir / "report.json"
    code = run_cli(
        "score", "--responses", str(workdir / "presence_synthetic_18.csv"), "--json", str(summary)
    )
    assert code == 0
    payload = json.loads(summary.read_text())
    assert len(payload["subscales"]) == 3
    assert 0.0 < payload["cronbach_alpha"] <= 1.0


def test_score_malformed_row_names_row(workdir, capsys):
    bad = workdir / "bad.csv"
    rows = (workdir / "presence_synthetic_18.csv").read_text().splitlines()
    rows[3] = "p03,5,5"
    bad.write_text("\n".join(rows) + "\n")
    code = run_cli("score", "--responses", str(bad))
    assert code == 3
    assert "row 4" in capsys.readouterr().err


def test_score_perfectly_correlated_prints_alpha_one(workdir, capsys):
    header = "participant," + ",".join(f"i{n:02d}" for n in range(1, 16))
    rows = [header]
    for p in range(9):
        rows.append(f"a{p}," + ",".join(["2"] * 15))
    for p in range(9):
        rows.append(f"b{p}," + ",".join(["4"] * 15))
    f = workdir / "correlated.csv"
    f.write_text("\n".join(rows) + "\n")
    code = run_cli("score", "--responses", str(f))
    assert code == 0
    assert "alpha=1.000" in capsys.readouterr().out


def test_inspect_shows_header(workdir, capsys):
    out = live_recording(workdir)
    code = run_cli("inspect", "--recording", str(out), "--snapshots", "--limit", "1")
    assert code == 0
    stdout = capsys.readouterr().out
    assert "dt_ms=55" in stdout
    assert "scenario=" in stdout
