import json
import math

import pytest

from rankone_ps.cli import main
from rankone_ps.config import SUITES, ConfigError, load_config, parse_config
from rankone_ps.report import CSV_FIELDS, CaseRecord, VerificationReport, emit_report, read_csv, render
from rankone_ps.suites import plan_cases, run_suite

SMALL = """model: [h2, h3]
suite: [iwasawa, bracket]
seed: 3
params:
  iwasawa: {n_samples: 200, n_triples: 50, chunk: 100}
  bracket: {n_samples: 50}
"""


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.yaml"
    p.write_text(SMALL)
    return p


def test_parse_config_errors():
    with pytest.raises(ConfigError, match="valid suites"):
        parse_config({"suite": "nope"})
    with pytest.raises(ConfigError, match="valid models"):
        parse_config({"suite": "iwasawa", "model": "h5"})
    with pytest.raises(ConfigError, match="valid symbols"):
        parse_config({"suite": "msp-rate", "symbols": [{"name": "weird"}]})
    with pytest.raises(ConfigError, match="unknown config keys"):
        parse_config({"suite": "iwasawa", "colour": 1})
    with pytest.raises(ConfigError, match="needs a 'suite'"):
        parse_config({})
    with pytest.raises(ConfigError):
        parse_config({"suite": "iwasawa", "lambda_grid": ["x"]})
    with pytest.raises(ConfigError):
        parse_config("not a mapping")


def test_suite_all_and_override():
    cfg = parse_config({"suite": "all"})
    assert cfg.suites == list(SUITES)
    cfg = parse_config({"suite": "all"}, suite_override="bracket")
    assert cfg.suites == ["bracket"]


def test_echo_roundtrip():
    cfg = parse_config({"model": "h3", "suite": ["msp-rate"], "lambda_grid": [20, 40],
                        "symbols": ["plateau"], "tolerances": {"slope": 0.2}})
    again = parse_config(cfg.echo())
    assert again.echo() == cfg.echo()


def test_load_config_errors(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.yaml")
    bad = tmp_path / "bad.yaml"
    bad.write_text("suite: [unclosed\n")
    with pytest.raises(ConfigError, match="malformed"):
        load_config(bad)


def test_threads_env(monkeypatch):
    monkeypatch.setenv("RANKONE_PS_THREADS", "3")
    assert parse_config({"suite": "iwasawa"}).parallelism == 3
    assert parse_config({"suite": "iwasawa"}, parallelism=2).parallelism == 2
    monkeypatch.setenv("RANKONE_PS_THREADS", "zero")
    with pytest.raises(ConfigError, match="RANKONE_PS_THREADS"):
        parse_config({"suite": "iwasawa"})


def test_fourier_skipped_for_h3():
    cases, skipped = plan_cases(parse_config({"model": ["h2", "h3"], "suite": "fourier-inversion"}))
    assert {c["model"] for c in cases} == {"h2"}
    assert skipped and skipped[0]["model"] == "h3"


def test_case_record_modes():
    assert CaseRecord("s", "h2", 0, "c", 100.5, 100.0, 0.01).passed
    assert not CaseRecord("s", "h2", 0, "c", 100.5, 100.0, 0.01, mode="abs").passed
    assert CaseRecord("s", "h2", 0, "c", 1e-9, 0.0, 1e-8).passed
    assert not CaseRecord("s", "h2", 0, "c", 1e-9, 0.0, 1e-8, mode="rel").passed
    failed = CaseRecord.failure("s", "h2", 0, "c", RuntimeError("boom"))
    assert not failed.passed and "boom" in failed.error and math.isinf(failed.rel_err)


def test_empty_report_renders():
    rep = VerificationReport([], {"suite": []})
    assert rep.passed
    d = json.loads(render(rep, "json"))
    assert d["summary"]["n_cases"] == 0 and d["summary"]["max_rel_err"] is None
    assert read_csv(render(rep, "csv")) == []
    with pytest.raises(ValueError, match="valid"):
        render(rep, "xml")


def test_emit_report_names_unwritable_path(tmp_path):
    target = tmp_path / "nodir" / "out.json"
    with pytest.raises(OSError, match="nodir"):
        emit_report(VerificationReport([], {}), "json", target)


def test_json_and_csv_outputs(small_cfg, tmp_path, capsys):
    out_json = tmp_path / "r.json"
    assert main(["verify", str(small_cfg), "--out", str(out_json), "--no-timestamp"]) == 0
    d = json.loads(out_json.read_text())
    assert d["schema_version"] == 1 and d["summary"]["pass"]
    assert "timestamp" not in d
    assert set(d["config_echo"]["suite"]) == {"iwasawa", "bracket"}
    out_csv = tmp_path / "r.csv"
    assert main(["verify", str(small_cfg), "--format", "csv", "--out", str(out_csv)]) == 0
    rows = read_csv(out_csv.read_text())
    assert list(rows[0]) == CSV_FIELDS
    assert len(rows) == d["summary"]["n_cases"]
    # numeric columns round-trip exactly
    for row, case in zip(rows, d["cases"]):
        assert float(row["lhs_re"]) == case["lhs"][0]
        assert float(row["abs_err"]) == case["abs_err"]
    assert "checks passed" in capsys.readouterr().err


def test_deterministic_and_parallel(small_cfg, tmp_path):
    texts = []
    for par in ("1", "1", "2"):
        out = tmp_path / f"r{len(texts)}.json"
        main(["verify", str(small_cfg), "--out", str(out), "--no-timestamp", "--parallelism", par])
        d = json.loads(out.read_text())
        d["config_echo"].pop("parallelism")
        texts.append(json.dumps(d["cases"]))
    assert texts[0] == texts[1] == texts[2]


def test_exit_codes(tmp_path, small_cfg, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("suite: nope\n")
    assert main(["verify", str(bad)]) == 2
    assert "valid suites" in capsys.readouterr().err
    assert main(["verify", str(tmp_path / "missing.yaml")]) == 2
    assert main(["verify", str(small_cfg), "--out", str(tmp_path / "no" / "x.json")]) == 2
    strict = tmp_path / "strict.yaml"
    strict.write_text(SMALL + "tolerances: {roundtrip: 0.0, identity: 0.0}\n")
    assert main(["verify", str(strict), "--out", str(tmp_path / "s.json")]) == 1
    with pytest.raises(SystemExit):
        main(["verify", str(small_cfg), "--parallelism", "0"])


def test_listing(capsys):
    assert main(["list-suites"]) == 0
    out = capsys.readouterr().out
    assert all(s in out for s in SUITES)
    assert main(["list-symbols"]) == 0
    assert "gauss-trig" in capsys.readouterr().out


def test_msp_csv_has_ratio_columns(tmp_path):
    cfg = parse_config({"model": "h2", "suite": "msp-rate"})
    rep = run_suite(cfg, timestamp=False)
    rows = read_csv(render(rep, "csv"))
    ratio_rows = [r for r in rows if r["check"] == "ratio"]
    assert len(ratio_rows) == 5
    assert all(r["ratio_re"] and r["abs_dev"] and r["lambda"] for r in ratio_rows)
    assert rep.passed


def test_error_in_case_becomes_failed_record():
    cfg = parse_config({"model": "h2", "suite": "msp-rate", "lambda_grid": [20, 40],
                        "params": {"msp-rate": {"point": [0.0, 40.0]}}})
    rep = run_suite(cfg, timestamp=False)
    assert not rep.passed
    assert "IllConditionedError" in rep.cases[0].error
    assert run_suite(cfg, timestamp=True).timestamp is not None
