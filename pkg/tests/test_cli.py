"""Command-line interface, exercised through main(argv)."""

from __future__ import annotations

import json

import numpy as np
import pytest

from hessplit import LoadProfile, parse_profile_file, write_profile_csv
from hessplit.cli import CONFIG_ENV_VAR, _parse_range, main
from hessplit.errors import InvalidRangeError


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    monkeypatch.delenv(CONFIG_ENV_VAR, raising=False)


@pytest.fixture
def profile_csv(tmp_path, rng):
    samples = rng.uniform(2.0, 6.0, size=400)
    samples[rng.integers(0, 400, size=12)] = 20.0
    profile = LoadProfile(site_id="p", t0=0.0, dt=1.0, samples=samples)
    path = tmp_path / "site-a.csv"
    write_profile_csv(profile, path)
    return path


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# --- analyze ---

def test_analyze_stdout_json(capsys, profile_csv):
    code, out, err = run(capsys, "analyze", str(profile_csv))
    assert code == 0
    report = json.loads(out)
    assert report["site_id"] == "site-a"
    assert report["classification"]["hess_compliant"] in (True, False)
    assert report["resolution"]["sc_suitable"] is True
    assert err == ""


def test_analyze_out_file(capsys, tmp_path, profile_csv):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "analyze", str(profile_csv), "--out", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["site_id"] == "site-a"


def test_analyze_coarse_profile_warns(capsys, tmp_path):
    profile = LoadProfile(site_id="slow", t0=0.0, dt=900.0,
                          samples=np.linspace(1.0, 10.0, 200))
    path = tmp_path / "slow.csv"
    write_profile_csv(profile, path)
    code, out, err = run(capsys, "analyze", str(path))
    assert code == 0
    assert "transient analysis skipped" in err
    assert json.loads(out)["classification"] is None


def test_analyze_manifest(capsys, tmp_path, rng):
    for name in ("one", "two"):
        write_profile_csv(
            LoadProfile(site_id=name, t0=0.0, dt=1.0,
                        samples=rng.uniform(1.0, 9.0, size=150)),
            tmp_path / f"{name}.csv",
        )
    manifest = tmp_path / "catalog.json"
    manifest.write_text(json.dumps([
        {"path": "one.csv", "site_id": "one", "category_hint": "PS"},
        {"path": "two.csv", "site_id": "two"},
    ]))
    code, out, _ = run(capsys, "analyze", str(manifest), "--manifest")
    assert code == 0
    reports = json.loads(out)
    assert [r["site_id"] for r in reports] == ["one", "two"]
    assert reports[0]["classification"]["category"] == "PS"


def test_analyze_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "analyze", str(tmp_path / "nope.csv"))
    assert code == 2
    assert "error:" in err


def test_analyze_malformed_row_cited(capsys, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("timestamp,power_kw\n0,1\n1,oops\n")
    code, _, err = run(capsys, "analyze", str(bad))
    assert code == 2
    assert "row 3" in err


def test_analyze_negative_power_and_clamp(capsys, tmp_path):
    neg = tmp_path / "neg.csv"
    rows = "".join(f"{i},{1.0 if i % 2 else -1.0}\n" for i in range(150))
    neg.write_text("timestamp,power_kw\n" + rows)
    code, _, err = run(capsys, "analyze", str(neg))
    assert code == 2 and "negative power" in err
    code, out, _ = run(capsys, "analyze", str(neg), "--clamp-negative")
    assert code == 0
    assert json.loads(out)["metrics"]["base_power_kw"] == 1.0


# --- dispatch ---

def test_dispatch_summary_and_trace(capsys, tmp_path, profile_csv):
    trace = tmp_path / "trace.csv"
    code, out, _ = run(capsys, "dispatch", str(profile_csv), "--trace", str(trace))
    assert code == 0
    summary = json.loads(out)
    assert summary["site_id"] == "site-a"
    assert summary["n_steps"] == 400
    assert 0.0 <= summary["sc_engaged_fraction"] <= 1.0
    lines = trace.read_text().strip().splitlines()
    assert lines[0].startswith("t,p_load_kw,")
    assert len(lines) == 401


def test_dispatch_config_file(capsys, tmp_path, profile_csv):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "sc_threshold": 0.6,
        "recharge_threshold": 0.1,
        "sc_engage_mode": "ThresholdOnly",
        "vrfb_power_kw": 3.0,
    }))
    code, out, _ = run(capsys, "dispatch", str(profile_csv), "--config", str(cfg))
    assert code == 0
    assert json.loads(out)["recharge_threshold"] == 0.1


def test_dispatch_config_via_env(capsys, tmp_path, monkeypatch, profile_csv):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"recharge_threshold": 0.25}))
    monkeypatch.setenv(CONFIG_ENV_VAR, str(cfg))
    code, out, _ = run(capsys, "dispatch", str(profile_csv))
    assert code == 0
    assert json.loads(out)["recharge_threshold"] == 0.25


def test_dispatch_explicit_config_beats_env(capsys, tmp_path, monkeypatch, profile_csv):
    env_cfg = tmp_path / "env.json"
    env_cfg.write_text(json.dumps({"recharge_threshold": 0.25}))
    cli_cfg = tmp_path / "cli.json"
    cli_cfg.write_text(json.dumps({"recharge_threshold": 0.35}))
    monkeypatch.setenv(CONFIG_ENV_VAR, str(env_cfg))
    code, out, _ = run(capsys, "dispatch", str(profile_csv), "--config", str(cli_cfg))
    assert code == 0
    assert json.loads(out)["recharge_threshold"] == 0.35


def test_dispatch_unknown_config_key(capsys, tmp_path, profile_csv):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"sc_treshold": 0.6}))
    code, _, err = run(capsys, "dispatch", str(profile_csv), "--config", str(cfg))
    assert code == 2
    assert "unknown config key" in err and "sc_treshold" in err


def test_dispatch_missing_config_file(capsys, profile_csv):
    code, _, err = run(capsys, "dispatch", str(profile_csv), "--config", "/no/such.json")
    assert code == 2
    assert "config file not found" in err


def test_dispatch_coarse_profile_rejected(capsys, tmp_path):
    profile = LoadProfile(site_id="slow", t0=0.0, dt=60.0,
                          samples=np.linspace(1.0, 10.0, 120))
    path = tmp_path / "slow.csv"
    write_profile_csv(profile, path)
    code, _, err = run(capsys, "dispatch", str(path))
    assert code == 2
    assert "supercapacitor dispatch" in err


# --- sweep ---

def test_parse_range():
    assert _parse_range("0.6:0.9:0.1") == [0.6, 0.7, 0.8, 0.9]
    assert _parse_range("0.8:0.8:0.1") == [0.8]
    with pytest.raises(InvalidRangeError):
        _parse_range("0.9:0.5:0.1")
    with pytest.raises(InvalidRangeError):
        _parse_range("0.5:0.9")
    with pytest.raises(InvalidRangeError):
        _parse_range("0.5:0.9:0")
    with pytest.raises(InvalidRangeError):
        _parse_range("0:0.9:0.1")


def test_sweep_stdout(capsys, profile_csv):
    code, out, _ = run(capsys, "sweep", str(profile_csv), "--range", "0.6:0.8:0.1")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "threshold,sc_engaged_fraction,sc_energy_share,vrfb_energy_share,grid_peak_kw"
    assert len(lines) == 4
    assert [ln.split(",")[0] for ln in lines[1:]] == ["0.6", "0.7", "0.8"]


def test_sweep_out_file(capsys, tmp_path, profile_csv):
    target = tmp_path / "sweep.csv"
    code, out, _ = run(capsys, "sweep", str(profile_csv),
                       "--range", "0.8:0.8:0.1", "--out", str(target))
    assert code == 0 and out == ""
    assert len(target.read_text().strip().splitlines()) == 2


def test_sweep_bad_range_exit_code(capsys, profile_csv):
    code, _, err = run(capsys, "sweep", str(profile_csv), "--range", "0.9:0.5:0.1")
    assert code == 2
    assert "range lo" in err


# --- ups ---

def test_ups_feasible(capsys, tmp_path):
    profile = LoadProfile(site_id="u", t0=0.0, dt=1.0, samples=np.full(7200, 1.0))
    path = tmp_path / "u.csv"
    write_profile_csv(profile, path)
    code, out, _ = run(capsys, "ups", str(path), "--start", "0", "--duration", "3600")
    assert code == 0
    data = json.loads(out)
    assert data["feasible"] is True
    assert data["limiting"] == "None"
    assert data["window_energy_kwh"] == pytest.approx(1.0)


def test_ups_infeasible_then_override(capsys, tmp_path):
    profile = LoadProfile(site_id="u", t0=0.0, dt=1.0,
                          samples=np.full(11 * 3600, 5.0))
    path = tmp_path / "u.csv"
    write_profile_csv(profile, path)
    args = ("ups", str(path), "--start", "0", "--duration", str(10 * 3600))
    code, out, _ = run(capsys, *args)
    assert code == 0
    assert json.loads(out)["limiting"] == "Energy"
    code, out, _ = run(capsys, *args, "--vrfb-energy", "100")
    assert json.loads(out)["feasible"] is True


def test_ups_demand_out(capsys, tmp_path):
    profile = LoadProfile(site_id="u", t0=0.0, dt=1.0,
                          samples=np.arange(2.0, 12.0))
    path = tmp_path / "u.csv"
    write_profile_csv(profile, path)
    demand = tmp_path / "demand.csv"
    code, _, _ = run(capsys, "ups", str(path), "--start", "2", "--duration", "3",
                     "--demand-out", str(demand))
    assert code == 0
    written = parse_profile_file(demand)
    assert np.array_equal(written.samples, [0, 0, 4, 5, 6, 0, 0, 0, 0, 0])


def test_ups_window_error(capsys, tmp_path):
    profile = LoadProfile(site_id="u", t0=0.0, dt=1.0, samples=np.ones(100))
    path = tmp_path / "u.csv"
    write_profile_csv(profile, path)
    code, _, err = run(capsys, "ups", str(path), "--start", "90", "--duration", "60")
    assert code == 2
    assert "outside profile span" in err


# --- synth ---

def test_synth_municipal_round_trip(capsys, tmp_path):
    out_csv = tmp_path / "muni.csv"
    code, _, _ = run(capsys, "synth", "--kind", "municipal", "--out", str(out_csv),
                     "--days", "1", "--seed", "9")
    assert code == 0
    profile = parse_profile_file(out_csv)
    assert profile.n_samples == 86400
    assert profile.dt == 1.0
    from hessplit import MunicipalSpec, gen_municipal
    reference, _ = gen_municipal(MunicipalSpec(days=1, seed=9))
    assert np.array_equal(profile.samples, reference.samples)


def test_synth_machine_event_log(capsys, tmp_path):
    out_csv = tmp_path / "mach.csv"
    events_json = tmp_path / "events.json"
    code, _, _ = run(capsys, "synth", "--kind", "machine", "--out", str(out_csv),
                     "--events", str(events_json), "--seed", "4")
    assert code == 0
    log = json.loads(events_json.read_text())
    assert log["spec"]["kind"] == "machine"
    assert log["spec"]["seed"] == 4
    assert all(e["kind"] == "cycle" for e in log["events"])
    profile = parse_profile_file(out_csv)
    assert profile.max_kw == 10.0  # per-kind default scale preserved


def test_synth_ev_park(capsys, tmp_path):
    out_csv = tmp_path / "ev.csv"
    code, _, _ = run(capsys, "synth", "--kind", "ev_park", "--out", str(out_csv),
                     "--arrival-rate", "2.0", "--charge-power", "7.0")
    assert code == 0
    profile = parse_profile_file(out_csv)
    assert profile.max_kw >= 2 * 7.0  # sessions overlap and stack
    nonzero = profile.samples[profile.samples > 0.0]
    values, counts = np.unique(nonzero, return_counts=True)
    assert values[np.argmax(counts)] == 7.0  # constant phase dominates


def test_synth_bad_spec(capsys, tmp_path):
    code, _, err = run(capsys, "synth", "--kind", "municipal",
                       "--out", str(tmp_path / "x.csv"), "--days", "0")
    assert code == 2
    assert "days" in err


def test_synth_then_analyze(capsys, tmp_path):
    out_csv = tmp_path / "mach.csv"
    run(capsys, "synth", "--kind", "machine", "--out", str(out_csv))
    code, out, _ = run(capsys, "analyze", str(out_csv))
    assert code == 0
    report = json.loads(out)
    assert report["classification"]["sc_relevance"] == "High"


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    out, _ = capsys.readouterr()
    assert out.startswith("hessplit 0.1")
