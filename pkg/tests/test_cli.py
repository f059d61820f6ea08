import json

import pytest

from ampcon.cli import DEFAULTS, deep_merge, main, parse_set
from ampcon.runio import read_csv

TABLE1 = {8: (0.7654, 0.6325, 0.8678), 16: (0.3902, 0.4714, 0.5411),
          32: (0.1960, 0.3430, 0.3606), 64: (0.0981, 0.2020, 0.2446)}
TABLE2 = {8: (0.7654, 0.8165, 0.9277), 16: (0.3902, 0.6325, 0.6233),
          32: (0.1960, 0.4472, 0.4393), 64: (0.0981, 0.3086, 0.3109)}


def run(*argv):
    return main([str(a) for a in argv])


def outputs(d):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())
            if p.suffix in (".csv", ".json", ".txt") and p.name != "manifest.json"}


def test_design_constellation_32(tmp_path, capsys):
    assert run("design-constellation", "--M", 32, "--out", tmp_path, "--no-plot") == 0
    out = capsys.readouterr().out
    assert "d_min = 0.3606" in out
    assert "rings = [5, 10, 17]" in (tmp_path / "summary.txt").read_text()
    c = json.loads((tmp_path / "constellation.json").read_text())
    assert c["M"] == 32 and len(c["points"]) == 32 and len(c["rings"]) == 3
    m = json.loads((tmp_path / "manifest.json").read_text())
    assert {o["path"] for o in m["outputs"]} == {"constellation.json", "summary.txt"}


def test_design_constellation_qpsk(tmp_path):
    assert run("design-constellation", "--M", 4, "--out", tmp_path, "--no-plot") == 0
    assert "rings = [4]" in (tmp_path / "summary.txt").read_text()


def test_design_constellation_repeatable(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run("design-constellation", "--M", 16, "--out", a) == 0
    assert run("design-constellation", "--M", 16, "--out", b) == 0
    assert outputs(a) == outputs(b)
    assert (a / "constellation.png").exists()


@pytest.mark.parametrize("M", [12, 2, 2048])
def test_invalid_order_exit_code(tmp_path, capsys, M):
    assert run("design-constellation", "--M", M, "--out", tmp_path) == 2
    assert "power of two" in capsys.readouterr().err


def test_schema_errors_reported(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"M": "x", "bogus": 1}))
    assert run("design-constellation", "--config", cfg, "--out", tmp_path / "o") == 2
    err = capsys.readouterr().err
    assert "M" in err and "bogus" in err


def test_malformed_json_and_missing_file(tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert run("evaluate", "table1", "--config", cfg, "--out", tmp_path / "o") == 2
    assert run("evaluate", "table1", "--config", tmp_path / "none.json") == 4


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as e:
        main(["design-constellation", "--M", "abc"])
    assert e.value.code == 2


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"M": 8, "seed": 4}))
    assert run("design-constellation", "--config", cfg, "--M", 16, "--out", tmp_path / "o",
               "--no-plot") == 0
    m = json.loads((tmp_path / "o" / "manifest.json").read_text())
    assert m["config"]["M"] == 16 and m["seed"] == 4


def test_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("AMPCON_SEED", "77")
    assert run("evaluate", "table1", "--set", "M_list=[8]", "--out", tmp_path, "--no-plot") == 0
    assert json.loads((tmp_path / "manifest.json").read_text())["seed"] == 77


def test_parse_set_and_merge():
    over = parse_set(["cmpim.alpha=2.5", "method=ls", "range.x=[-0.2, 0.2]"])
    assert over == {"cmpim": {"alpha": 2.5}, "method": "ls", "range": {"x": [-0.2, 0.2]}}
    merged = deep_merge(DEFAULTS["design-pattern"], over)
    assert merged["cmpim"]["restarts"] == 64 and merged["range"]["y"] == [-0.25, 0.25]


@pytest.mark.parametrize("which,ref", [("table1", TABLE1), ("table2", TABLE2)])
def test_tables(tmp_path, which, ref):
    assert run("evaluate", which, "--out", tmp_path) == 0
    rows = read_csv(tmp_path / f"{which}.csv")
    assert len(rows) == 4
    for r in rows:
        M = int(r["M"])
        got = (float(r["psk"]), float(r["qam"]), float(r["apsk"]))
        assert got == pytest.approx(ref[M], abs=1e-3)
    assert (tmp_path / f"{which}.png").exists()


def test_pattern_scalar_array(tmp_path):
    assert run("design-pattern", "--nx", 1, "--ny", 1, "--out", tmp_path, "--no-plot") == 0
    m = json.loads((tmp_path / "metrics.json").read_text())
    assert m["power_ratio"] == pytest.approx(0.5 / 4)
    b = json.loads((tmp_path / "beam.json").read_text())
    assert b["fx"] == [[1.0, 0.0]] and b["fy"] == [[1.0, 0.0]]


def test_pattern_ls_baseline(tmp_path):
    assert run("design-pattern", "--baseline", "ls", "--out", tmp_path) == 0
    m = json.loads((tmp_path / "metrics.json").read_text())
    assert m["method"] == "ls" and m["power_ratio"] <= 0.05
    assert "converged" not in m
    assert (tmp_path / "pattern_axes.png").exists()


def test_pattern_cmpim_default_setting(tmp_path):
    assert run("design-pattern", "--out", tmp_path, "--no-plot") == 0
    m = json.loads((tmp_path / "metrics.json").read_text())
    assert m["power_ratio"] >= 0.75 and m["converged"] is True
    rows = read_csv(tmp_path / "diagnostics_x.csv")
    assert list(rows[0]) == ["iter", "min_objective", "argmin_psi"]


def test_pattern_nonconvergence_still_exit_zero(tmp_path):
    assert run("design-pattern", "--nx", 8, "--ny", 8, "--max-iters", 3, "--restarts", 2,
               "--out", tmp_path, "--no-plot") == 0
    assert json.loads((tmp_path / "metrics.json").read_text())["converged"] is False


def test_ber_zero_symbols(tmp_path):
    assert run("evaluate", "ber", "--max-symbols", 0, "--out", tmp_path) == 0
    rows = read_csv(tmp_path / "ber_APSK-16.csv")
    assert rows == []
    header = (tmp_path / "ber_APSK-16.csv").read_text().splitlines()[0]
    assert header == "ebn0_db,ber,symbols,errors"


def test_ber_small_run_and_replay(tmp_path, capsys):
    out = tmp_path / "ber"
    assert run("evaluate", "ber", "--set", "ebn0_db=[0, 4]", "--max-symbols", 20000,
               "--out", out) == 0
    assert (out / "ber.png").exists()
    text = (out / "ber_QAM-16.csv").read_text()
    assert "\r" not in text and text.count("\n") == 3
    assert run("replay", out / "manifest.json", "--no-plot") == 0
    assert "replay ok" in capsys.readouterr().out


def test_replay_detects_tampering(tmp_path, capsys):
    out = tmp_path / "t"
    assert run("evaluate", "table1", "--set", "M_list=[8, 16]", "--out", out, "--no-plot") == 0
    m = json.loads((out / "manifest.json").read_text())
    m["outputs"][0]["sha256"] = "0" * 64
    (out / "manifest.json").write_text(json.dumps(m))
    assert run("replay", out / "manifest.json") == 1
    assert "table1.csv" in capsys.readouterr().err


def test_replay_missing_manifest(tmp_path):
    assert run("replay", tmp_path / "nope.json") == 4


def test_cdf_and_table3_small(tmp_path):
    quick = ["--restarts", 2, "--samples", 10000, "--no-plot"]
    assert run("evaluate", "cdf", *quick, "--out", tmp_path / "c") == 0
    rows = read_csv(tmp_path / "c" / "cdf_cmpim.csv")
    assert list(rows[0]) == ["amp_db", "cdf"] and float(rows[-1]["cdf"]) == 1.0
    assert run("evaluate", "table3", *quick, "--out", tmp_path / "t") == 0
    rows = read_csv(tmp_path / "t" / "table3.csv")
    sources = {r["method"]: r["source"] for r in rows}
    assert sources["cmpim"] == "computed" and sources["ls"] == "computed"
    assert sources["sdr"].startswith("literature") and sources["subarray"].startswith("literature")
    lit = {r["method"]: float(r["power_ratio"]) for r in rows}
    assert lit["sdr"] == 0.275 and lit["subarray"] == 0.4278


def test_directional_requires_beam(tmp_path, capsys):
    cfg = tmp_path / "d.json"
    cfg.write_text(json.dumps({"mode": "directional", "curves": [{"kind": "qam", "M": 16}],
                               "max_symbols": 10000}))
    assert run("evaluate", "ber", "--config", cfg, "--out", tmp_path / "o") == 2
    assert "beam" in capsys.readouterr().err


def test_threads_flag_validation(tmp_path):
    assert run("--threads", 0, "evaluate", "table1", "--out", tmp_path) == 2
