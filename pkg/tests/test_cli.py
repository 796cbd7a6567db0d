import csv
import json

import pytest

from dihedral.cli import ConfigError, ExperimentConfig, config_from_args, main, parallel_map


def body(path):
    return [ln for ln in open(path) if not ln.startswith("# wall_time")]


def test_bad_level_names_rule(capsys):
    assert main(["field", "--q", "12"]) == 2
    err = json.loads(capsys.readouterr().err)
    assert any("1 mod 4" in f for f in err["fields"])


def test_every_bad_field_listed():
    cfg = ExperimentConfig("nodal", q=15, k_min=5, k_max=2, segment="3:1")
    with pytest.raises(ConfigError) as ei:
        cfg.validate()
    assert len(ei.value.problems) >= 3


def test_deterministic_output(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (a, b):
        assert main(["largesieve", "--K", "20", "--N", "30", "--trials", "4", "--seed", "5", "--out", str(p)]) == 0
    assert body(a) == body(b)
    rows = list(csv.DictReader(ln for ln in body(a) if not ln.startswith("#")))
    assert len(rows) == 4 and rows[0]["schema_version"] == "1"


def test_fifteen_digits(tmp_path):
    out = tmp_path / "b.csv"
    assert main(["bessel", "--T", "0", "--x", "1", "--out", str(out)]) == 0
    row = list(csv.DictReader(ln for ln in body(out) if not ln.startswith("#")))[0]
    assert row["scaled_K"] == "0.421024438240708"


def test_json_output(tmp_path):
    out = tmp_path / "f.json"
    assert main(["field", "--q", "29", "--out", str(out)]) == 0
    doc = json.load(open(out))
    assert doc["schema_version"] == 1 and doc["rows"][0]["eps_a"] == "2"


def test_supnorm_row_count(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["supnorm", "--q", "13", "--k-min", "2", "--k-max", "12", "--points-per-wave", "3",
                 "--threads", "4", "--out", str(out)]) == 0
    rows = [ln for ln in body(out) if not ln.startswith("#")]
    assert len(rows) == 1 + 11


def test_unknown_preset_is_usage_error():
    with pytest.raises(SystemExit) as ei:
        main(["suite", "--preset", "bogus"])
    assert ei.value.code == 2


def test_threads_env_and_config_file(tmp_path, monkeypatch):
    conf = tmp_path / "c.json"
    conf.write_text(json.dumps({"k": 9, "t": 0.5}))
    monkeypatch.setenv("DIHEDRAL_THREADS", "3")
    cfg = config_from_args(["lvalue", "--config", str(conf), "--t", "0.25"])
    assert cfg.threads == 3 and cfg.k == 9 and cfg.t == 0.25


def test_parallel_map_keeps_order():
    assert parallel_map(lambda x: x * x, range(20), 4) == [x * x for x in range(20)]


def test_secondmoment_columns(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["secondmoment", "--K", "4", "--out", str(out)]) == 0
    rows = list(csv.DictReader(ln for ln in body(out) if not ln.startswith("#")))
    assert len(rows) == 4 and {"K", "t", "average", "k", "abs_L_squared"} <= set(rows[0])
