import csv
import gzip
import io
import json

import pytest

from crankscope import cli, exact_core
from crankscope.config import RunConfig


def run(capsys, *argv):
    rc = cli.main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_crank_table_n50(capsys, cache_dir, tmp_path):
    target = tmp_path / "t.csv"
    rc, _, _ = run(capsys, "crank-table", "--k", "1", "--n-max", "50", "--cache-dir", cache_dir, "-o", str(target))
    assert rc == 0
    got = {(int(r["m"]), int(r["n"])): int(r["M"]) for r in rows(target.read_text())}
    assert got[(0, 50)] == 8626
    # idempotent given the cache
    first = target.read_text()
    run(capsys, "crank-table", "--k", "1", "--n-max", "50", "--cache-dir", cache_dir, "-o", str(target))
    assert target.read_text() == first


def test_crank_table_n0(capsys, cache_dir):
    rc, out, _ = run(capsys, "crank-table", "--k", "1", "--n-max", "0", "--cache-dir", cache_dir)
    assert rc == 0 and rows(out) == [{"k": "1", "n": "0", "m": "0", "M": "1"}]


def test_crank_table_k2_json(capsys, cache_dir):
    rc, out, _ = run(capsys, "--format", "json", "crank-table", "--k", "2", "--n-max", "3", "--cache-dir", cache_dir)
    assert rc == 0
    sums = {}
    for r in json.loads(out):
        sums[r["n"]] = sums.get(r["n"], 0) + r["M"]
    assert [sums[n] for n in range(4)] == [1, 2, 5, 10]


def test_crank_table_limit(capsys, cache_dir):
    rc, _, err = run(capsys, "crank-table", "--n-max", "80", "--truncation-limit", "50", "--cache-dir", cache_dir)
    assert rc != 0 and "truncation limit" in err


def test_verify_tables_partial(capsys, cache_dir):
    rc, out, err = run(capsys, "verify-tables", "--n-limit", "50", "--cache-dir", cache_dir)
    assert rc == 0
    assert "PASS 8/8 cells" in err
    assert all(r["status"] == "PASS" for r in rows(out))


def test_verify_tables_tampered_cache(capsys, tmp_path):
    # a consistent-looking file with one wrong coefficient must be caught by the comparison
    s = exact_core.expand_C(1, 60)
    path = exact_core.save_series(s, 1, tmp_path)
    with gzip.open(path, "rt") as fh:
        doc = json.load(fh)
    lo, coeffs = doc["terms"][50]
    coeffs[0 - lo] += 1  # M(0, 50)
    doc["checksum"] = exact_core._checksum(1, 60, doc["terms"])
    with gzip.open(path, "wt") as fh:
        json.dump(doc, fh)
    rc, _, err = run(capsys, "verify-tables", "--n-limit", "50", "--cache-dir", str(tmp_path))
    assert rc == 1
    assert "FAIL M(0,50): expected 8626, got 8627" in err


def test_verify_tables_corrupt_checksum_is_ignored(capsys, tmp_path):
    path = exact_core.save_series(exact_core.expand_C(1, 60), 1, tmp_path)
    with gzip.open(path, "rt") as fh:
        doc = json.load(fh)
    doc["terms"][50][1][5] += 7
    with gzip.open(path, "wt") as fh:
        json.dump(doc, fh)
    rc, _, err = run(capsys, "verify-tables", "--n-limit", "50", "--cache-dir", str(tmp_path))
    assert rc == 0 and "PASS 8/8" in err


@pytest.mark.parametrize("suite", ["euler", "modular"])
def test_verify_fast_suites(capsys, suite):
    rc, out, err = run(capsys, "verify", suite)
    assert rc == 0 and err.strip().endswith(f"{suite} checks")
    assert all(r["status"] == "PASS" for r in rows(out))


def test_verify_circle(capsys, cache_dir):
    rc, out, _ = run(capsys, "--format", "json", "verify", "circle", "--n", "30", "--m", "1", "--cache-dir", cache_dir)
    assert rc == 0
    recs = json.loads(out)
    assert recs[0]["name"].startswith("cauchy") and recs[0]["status"] == "PASS"


def test_verify_rejects_bad_option(capsys):
    rc, _, err = run(capsys, "verify", "euler", "--n", "3")
    assert rc == 2 and "does not apply" in err


def test_asymptotic_rows(capsys, cache_dir):
    rc, out, _ = run(capsys, "asymptotic", "--k", "1", "--n", "20", "--m", "0", "--cache-dir", cache_dir)
    assert rc == 0 and rows(out)[0]["ratio"] == "0.912"
    rc, out, _ = run(capsys, "asymptotic", "--n", "1000", "--m", "1", "--cache-dir", cache_dir)
    assert rows(out)[0]["ratio"] == "0.985"


def test_asymptotic_beyond_truncation(capsys, cache_dir):
    rc, out, _ = run(capsys, "asymptotic", "--n", "1000000", "--cache-dir", cache_dir)
    r = rows(out)[0]
    assert rc == 0 and r["M_exact"] == "unavailable" and r["ratio"] == ""
    assert r["M_tilde"].startswith("4.71877332326")


def test_circle_dump(capsys, cache_dir, tmp_path):
    dump = tmp_path / "arcs.json"
    rc, out, _ = run(capsys, "circle", "--n", "20", "--m", "1", "--dump", str(dump), "--cache-dir", cache_dir)
    assert rc == 0
    recs = json.loads(dump.read_text())
    assert [r["label"] for r in recs] == ["cauchy", "major", "minor"]
    assert round(float(recs[0]["value"])) == exact_core.M_exact(1, 1, 20)


def test_cache_info_and_clear(capsys, tmp_path):
    run(capsys, "crank-table", "--n-max", "10", "--cache-dir", str(tmp_path))
    rc, out, _ = run(capsys, "cache", "info", "--cache-dir", str(tmp_path))
    assert rc == 0 and len(rows(out)) == 1
    rc, _, err = run(capsys, "cache", "clear", "--cache-dir", str(tmp_path))
    assert rc == 0 and "removed 1" in err
    assert not list(tmp_path.glob("*.json.gz"))


def test_unknown_flag_is_error(capsys):
    with pytest.raises(SystemExit) as ei:
        cli.main(["crank-table", "--n-max", "3", "--bogus"])
    assert ei.value.code == 2


@pytest.mark.parametrize("cmd", ["crank-table", "verify-tables", "verify", "asymptotic", "circle", "cache"])
def test_help_everywhere(capsys, cmd):
    with pytest.raises(SystemExit) as ei:
        cli.main([cmd, "--help"])
    assert ei.value.code == 0
    assert "usage" in capsys.readouterr().out


def test_global_flag_before_subcommand_survives():
    args = cli.build_parser().parse_args(["--precision-bits", "300", "verify", "euler"])
    assert args.precision_bits == 300
    args = cli.build_parser().parse_args(["verify", "euler", "--precision-bits", "320"])
    assert args.precision_bits == 320


# --- config precedence -------------------------------------------------

def test_config_precedence(tmp_path, monkeypatch):
    f = tmp_path / "c.json"
    f.write_text(json.dumps({"precision_bits": 128, "truncation_limit": 300}))
    monkeypatch.delenv("CRANKSCOPE_PRECISION_BITS", raising=False)
    assert RunConfig.resolve(f).precision_bits == 128
    monkeypatch.setenv("CRANKSCOPE_PRECISION_BITS", "192")
    cfg = RunConfig.resolve(f)
    assert cfg.precision_bits == 192 and cfg.truncation_limit == 300
    assert RunConfig.resolve(f, precision_bits=512).precision_bits == 512


def test_config_validation(tmp_path):
    with pytest.raises(ValueError):
        RunConfig(precision_bits=32)
    with pytest.raises(ValueError):
        RunConfig(truncation_limit=0)
    with pytest.raises(ValueError):
        RunConfig(output_format="xml")
    f = tmp_path / "c.json"
    f.write_text(json.dumps({"colour": "blue"}))
    with pytest.raises(ValueError):
        RunConfig.resolve(f)


def test_bad_precision_flag_exit(capsys):
    rc, _, err = run(capsys, "--precision-bits", "16", "verify", "euler")
    assert rc == 2 and "precision_bits" in err
