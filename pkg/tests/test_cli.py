import json
import math
import re
import subprocess
import sys

import numpy as np
import pytest

from spherefrac import Cap, cap_area, perimeter_minus_n, sample_uniform
from spherefrac.cli import (
    DEFAULT_SEED,
    SetSyntaxError,
    main,
    parse_function,
    parse_set,
    render_set,
    resolve_seed,
)
from spherefrac.estimation import QuadratureError

CSV_HEADER = "param,value,error,target,deviation"


# ---------------------------------------------------------------------------
# descriptions


def test_parse_set_cap_and_membership():
    E = parse_set("cap:0,0,1:0.8")
    assert isinstance(E, Cap)
    assert E.radius == 0.8
    assert E.contains(np.array([[0.0, 0.0, 1.0]]))[0]


def test_parse_render_round_trip_preserves_membership():
    texts = [
        "union:cap:0,0,1:0.5+refl:cap:0,0,1:0.3",
        "compl:poly:-1,0,0;0,-1,0;0,0,-1",
        "arcs:0,1;2,0.5",
    ]
    gen = np.random.default_rng(41)
    for text in texts:
        E = parse_set(text)
        F = parse_set(render_set(E))
        pts = sample_uniform(E.dimension, 10_000, gen)
        assert np.array_equal(E.contains(pts), F.contains(pts))


def test_parse_set_error_positions():
    with pytest.raises(SetSyntaxError) as exc:
        parse_set("cap:0,0,1")  # missing radius
    assert exc.value.position == 4
    with pytest.raises(SetSyntaxError) as exc:
        parse_set("blob:1")
    assert exc.value.position == 0
    with pytest.raises(SetSyntaxError) as exc:
        parse_set("union:cap:0,0,1:0.5+cap:x,0,1:0.3")
    # the position points at the bad token inside the nested description
    assert exc.value.position == 24


def test_parse_set_overlapping_union_downgrades(capsys):
    E = parse_set("union:cap:0,0,1:1.0+cap:0,0.19612,0.98058:1.0")
    assert not E.assume_disjoint
    assert E.exact_measure() is None
    assert "overlap" in capsys.readouterr().err


def test_parse_function_kinds():
    pts = np.array([[0.6, 0.0, -0.8], [0.0, 1.0, 0.0]])
    f, lip = parse_function("coord:2", 2)
    assert lip == 1.0
    assert np.allclose(f(pts), [-0.8, 0.0])
    f, lip = parse_function("abs-coord:2", 2)
    assert lip == 1.0
    assert np.allclose(f(pts), [0.8, 0.0])
    f, lip = parse_function("const:2.5", 2)
    assert lip == 0.0
    assert np.allclose(f(pts), [2.5, 2.5])
    for bad in ("coord:9", "coord:x", "const:x", "sine:1", "plain"):
        with pytest.raises(SetSyntaxError):
            parse_function(bad, 2)


def test_resolve_seed_sources(monkeypatch):
    monkeypatch.delenv("SPHEREFRAC_SEED", raising=False)
    assert resolve_seed(None) == DEFAULT_SEED
    assert resolve_seed("123") == 123
    assert resolve_seed("0x7b") == 123
    monkeypatch.setenv("SPHEREFRAC_SEED", "99")
    assert resolve_seed(None) == 99
    assert resolve_seed("7") == 7  # flag wins over the environment
    with pytest.raises(ValueError):
        resolve_seed("zzz")


# ---------------------------------------------------------------------------
# output files and exit codes


def test_csv_output_schema_and_reruns_are_byte_identical(tmp_path):
    first, second = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["beta-check", "--n", "2", "--out", str(first)]) == 0
    assert main(["beta-check", "--n", "2", "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()
    lines = first.read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 5  # three grid rows plus the extrapolated line
    # rows carry 17 significant digits: t = 20 gives exactly 20/19
    assert lines[1].split(",")[1] == format(20.0 / 19.0, ".17g")
    # the limit line sits at the sweep's limit point, t = infinity
    assert lines[4].startswith("inf,")
    assert lines[4].split(",")[2] == "nan"  # no error estimate for the fit


def test_json_record_schema(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    out = tmp_path / "r.json"
    assert main(["beta-check", "--n", "2", "--format", "json", "--out", str(out)]) == 0
    rec = json.loads(out.read_text())
    assert set(rec) == {
        "experiment", "timestamp", "config_hash", "config",
        "rows", "limit", "verdicts", "detail", "seed",
    }
    assert rec["experiment"] == "beta-check"
    assert rec["seed"] == DEFAULT_SEED
    assert re.fullmatch(r"[0-9a-f]{64}", rec["config_hash"])
    assert rec["timestamp"] == "2023-11-14T22:13:20+00:00"
    assert rec["verdicts"] == {"within_threshold": True}
    assert rec["limit"]["deviation"] < 1e-3
    assert rec["rows"][-1]["param"] is None  # inf is null in JSON


def test_json_reruns_are_byte_identical_with_pinned_epoch(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    args = ["crofton", "--n", "2", "--set", "cap:0,0,1:0.8", "--planes", "2000",
            "--format", "json"]
    assert main(args + ["--out", str(first)]) == 0
    assert main(args + ["--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_seed_precedence_changes_and_reproduces_output(tmp_path, monkeypatch):
    monkeypatch.delenv("SPHEREFRAC_SEED", raising=False)
    args = ["crofton", "--n", "2", "--set", "cap:0,0,1:0.8", "--planes", "2000"]

    def run(extra, env_seed=None):
        out = tmp_path / f"{len(list(tmp_path.iterdir()))}.csv"
        if env_seed is None:
            monkeypatch.delenv("SPHEREFRAC_SEED", raising=False)
        else:
            monkeypatch.setenv("SPHEREFRAC_SEED", env_seed)
        assert main(args + extra + ["--out", str(out)]) == 0
        return out.read_bytes()

    by_flag = run(["--seed", "123"])
    by_env = run([], env_seed="123")
    by_hex_env = run([], env_seed="0x7b")
    flag_beats_env = run(["--seed", "123"], env_seed="999")
    default = run([])
    assert by_flag == by_env == by_hex_env == flag_beats_env
    assert default != by_flag


def test_exit_1_on_config_errors(tmp_path, capsys):
    assert main(["perimeter", "--n", "2", "--set", "gibberish", "--s", "-1"]) == 1
    assert "config error" in capsys.readouterr().err
    assert main(["perimeter", "--n", "3", "--set", "cap:0,0,1:1.0", "--s", "-1"]) == 1
    assert "S^2" in capsys.readouterr().err
    assert main(["beta-check", "--n", "2", "--seed", "zzz"]) == 1
    assert "bad seed" in capsys.readouterr().err
    # invalid s (the closed endpoint) is a config error too
    assert main(["perimeter", "--n", "2", "--set", "cap:0,0,1:1.0", "--s", "1.0"]) == 1
    capsys.readouterr()


def test_exit_1_on_bad_usage():
    with pytest.raises(SystemExit) as exc:
        main(["perimeter", "--bogus"])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 1


def test_exit_2_on_verdict_failure_still_writes_output(tmp_path, capsys):
    out = tmp_path / "fail.csv"
    rc = main(["beta-check", "--n", "2", "--threshold", "1e-9", "--out", str(out)])
    assert rc == 2
    assert "verdict failure" in capsys.readouterr().err
    assert out.read_text().splitlines()[0] == CSV_HEADER


def test_exit_3_on_numerical_failure(monkeypatch, capsys):
    def explode(*args, **kwargs):
        raise QuadratureError("interval budget exhausted")

    monkeypatch.setattr("spherefrac.cli.perimeter_cap", explode)
    rc = main(["perimeter", "--n", "2", "--set", "cap:0,0,1:1.0", "--s", "-1"])
    assert rc == 3
    assert "numerical failure" in capsys.readouterr().err


def test_unnormalized_center_warning(capsys):
    rc = main(["perimeter", "--n", "2", "--set", "cap:0,0,2:1.0", "--s", "-1"])
    assert rc == 0
    captured = capsys.readouterr()
    assert "normalizing" in captured.err
    scaled = float(captured.out.splitlines()[1].split(",")[1])

    rc = main(["perimeter", "--n", "2", "--set", "cap:0,0,1:1.0", "--s", "-1"])
    assert rc == 0
    captured = capsys.readouterr()
    assert "normalizing" not in captured.err
    unit = float(captured.out.splitlines()[1].split(",")[1])
    assert scaled == unit  # same cap after normalization, same oracle value


# ---------------------------------------------------------------------------
# subcommand behavior


def test_perimeter_pivot_attaches_exact_target(tmp_path):
    out = tmp_path / "pivot.json"
    rc = main([
        "perimeter", "--n", "2", "--set", "cap:0,0,1:1.0", "--s", "-2",
        "--threshold", "1e-6", "--format", "json", "--out", str(out),
    ])
    assert rc == 0
    rec = json.loads(out.read_text())
    row = rec["rows"][0]
    assert row["target"] == pytest.approx(perimeter_minus_n(2, cap_area(2, 1.0)), rel=1e-12)
    assert row["deviation"] <= 1e-6
    assert rec["verdicts"] == {"within_threshold": True}
    assert rec["detail"]["method"] == "cap_oracle"


def test_sweep_s1_appends_limit_row_at_param_1(tmp_path):
    out = tmp_path / "s1.csv"
    rc = main(["sweep-s1", "--n", "2", "--set", "cap:0,0,1:0.7", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 5
    assert lines[-1].startswith("1,")
    target = 4.0 * math.pi * math.sin(0.7)
    extrapolated = float(lines[-1].split(",")[1])
    assert extrapolated == pytest.approx(target, rel=0.02)


def test_s0_check_runs_clean(tmp_path):
    out = tmp_path / "s0.json"
    rc = main([
        "s0-check", "--n", "2", "--function", "coord:0", "--samples", "50000",
        "--format", "json", "--out", str(out),
    ])
    assert rc == 0
    rec = json.loads(out.read_text())
    assert rec["verdicts"]["monotone_within_3se"]
    assert rec["verdicts"]["final_below_bound"]


def test_profile_reports_vanishing_tail(tmp_path):
    out = tmp_path / "prof.json"
    rc = main([
        "profile", "--n", "2", "--s", "-3", "--alpha-grid", "0.5,2,6,12",
        "--format", "json", "--out", str(out),
    ])
    assert rc == 0
    rec = json.loads(out.read_text())
    assert rec["verdicts"]["gamma_vanishes_at_full_measure"]


def test_console_script_and_module_entry_points(tmp_path):
    for cmd in (["spherefrac"], [sys.executable, "-m", "spherefrac"]):
        proc = subprocess.run(
            cmd + ["beta-check", "--n", "2"], capture_output=True, text=True
        )
        assert proc.returncode == 0
        assert proc.stdout.splitlines()[0] == CSV_HEADER
