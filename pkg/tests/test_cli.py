import csv
import json
import logging

import pytest

from citemetrics.cli import main
from citemetrics.manifest import RunManifest


@pytest.fixture(autouse=True)
def private_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("CITEMETRICS_CACHE_DIR", str(tmp_path / "cache"))


def read_rows(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture(scope="module")
def synth_corpus(tmp_path_factory):
    d = tmp_path_factory.mktemp("synth")
    corpus = d / "corpus.tsv"
    assert main(["synth", "--out", str(corpus), "--years", "1950:2010", "--base-count", "30",
                 "--growth", "0.02", "--refs-mean", "6", "--beta", "0.5", "--copy-prob", "0.4",
                 "--seed", "3"]) == 0
    table = d / "metrics.csv"
    assert main(["metrics", "--meta", str(corpus), "--out", str(table)]) == 0
    return corpus, table


# -- ingest / validate ----------------------------------------------------------

def test_ingest_three_papers(three_file, tmp_path, capsys):
    out = tmp_path / "corpus.idx"
    assert main(["ingest", "--meta", str(three_file), "--out", str(out)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["papers_loaded"] == 3 and out.is_file()
    assert len(report["corpus_hash"]) == 64


def test_ingest_missing_file(tmp_path, capsys):
    missing = tmp_path / "nope.tsv"
    assert main(["ingest", "--meta", str(missing)]) != 0
    assert str(missing) in capsys.readouterr().err


def test_ingest_malformed_line(tmp_path, capsys):
    lines = [f"p{k}\t2000\t\t" for k in range(6)] + ["p6\tnineteen\t\t"]
    bad = tmp_path / "bad.tsv"
    bad.write_text("\n".join(lines) + "\n", encoding="utf-8")
    assert main(["ingest", "--meta", str(bad)]) != 0
    assert "line 7" in capsys.readouterr().err


def test_ingest_uses_cache_dir(three_file, tmp_path, capsys):
    assert main(["ingest", "--meta", str(three_file)]) == 0
    index = json.loads(capsys.readouterr().out)["index"]
    assert index.startswith(str(tmp_path / "cache"))
    assert main(["validate", "--meta", str(three_file)]) == 0


def test_validate_strict(tmp_path, capsys):
    p = tmp_path / "back.tsv"
    p.write_text("A\t2001\tB\t\nB\t2005\t\t\n", encoding="utf-8")
    assert main(["validate", "--meta", str(p)]) == 0
    assert "cites later" in capsys.readouterr().out
    assert main(["validate", "--meta", str(p), "--strict"]) == 1


# -- metrics ------------------------------------------------------------------

def test_metrics_toy_row(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["metrics", "--meta", "data/toy_corpus.tsv", "--out", str(out)]) == 0
    rows = {r["id"]: r for r in read_rows(out)}
    assert float(rows["F"]["d_w"]) == 0.25
    manifest = RunManifest.read(tmp_path / "m.manifest.json")
    assert manifest.window == [1, 5] and manifest.verify(tmp_path) == []


def test_metrics_min_citations_empty(tmp_path):
    out = tmp_path / "m.csv"
    assert main(["metrics", "--meta", "data/toy_corpus.tsv", "--out", str(out),
                 "--min-citations", "10"]) == 0
    assert read_rows(out) == []
    assert out.read_text().startswith("id,")


def test_metrics_window_flag(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["metrics", "--meta", "data/toy_corpus.tsv", "--out", str(a)])
    main(["metrics", "--meta", "data/toy_corpus.tsv", "--out", str(b), "--window", "0,1"])
    assert {r["id"]: r["c_w"] for r in read_rows(a)}["F"] == "3"
    assert {r["id"]: r["c_w"] for r in read_rows(b)}["F"] == "0"
    assert RunManifest.read(tmp_path / "b.manifest.json").window == [0, 1]


def test_unknown_flag_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["metrics", "--meta", "data/toy_corpus.tsv", "--out", "x.csv", "--bogus"])
    assert exc.value.code == 2


# -- analyze ------------------------------------------------------------------

def test_correlations_three_methods(synth_corpus, tmp_path):
    _, table = synth_corpus
    assert main(["analyze", "correlations", "--table", str(table), "--out-dir", str(tmp_path),
                 "--methods", "pearson,spearman,kendall"]) == 0
    files = sorted(p.name for p in tmp_path.glob("correlation_*_d_w.csv"))
    assert files == ["correlation_kendall_d_w.csv", "correlation_pearson_d_w.csv",
                     "correlation_spearman_d_w.csv"]
    manifest = RunManifest.read(tmp_path / "correlations.manifest.json")
    assert set(manifest.outputs) == {p.name for p in tmp_path.glob("*.csv")}
    assert manifest.verify(tmp_path) == []


def test_surrogate_deterministic(synth_corpus, tmp_path):
    _, table = synth_corpus
    runs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["analyze", "surrogate", "--table", str(table), "--out-dir", str(out),
                     "--trials", "100", "--seed", "7"]) == 0
        runs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
    assert runs[0] == runs[1]
    assert "surrogate_summary.csv" in runs[0]


def test_era_deltas_ten_rows(synth_corpus, tmp_path):
    _, table = synth_corpus
    assert main(["analyze", "era-deltas", "--table", str(table), "--out-dir", str(tmp_path),
                 "--early", "1960", "--late", "2000", "--bins", "10"]) == 0
    rows = read_rows(tmp_path / "era_deltas_mean.csv")
    assert len(rows) == 10
    assert float(rows[0]["bin_lo"]) == 0 and float(rows[-1]["bin_hi"]) == 100


@pytest.mark.parametrize("analysis,extra,expected", [
    ("relative-citations", [], "relative_d_w_positive.csv"),
    ("strata", [], "strata_top10_mean.csv"),
    ("pref-attach", [], "pref_attach.csv"),
    ("share", ["--top", "0.1"], "share_c_w.csv"),
    ("fields", [], "fields.csv"),
    ("growth", [], "growth.json"),
    ("shift-test", ["--max-shift", "3"], "shift_test.csv"),
    ("bootstrap", ["--realizations", "200", "--subset", "positive:d_w"], "bootstrap_summary.json"),
])
def test_analyses_write_outputs(synth_corpus, tmp_path, analysis, extra, expected):
    corpus, _ = synth_corpus
    assert main(["analyze", analysis, "--meta", str(corpus), "--out-dir", str(tmp_path)] + extra) == 0
    assert (tmp_path / expected).is_file()
    manifest = RunManifest.read(tmp_path / f"{analysis}.manifest.json")
    assert expected in manifest.outputs and manifest.verify(tmp_path) == []
    assert manifest.corpus_hash is not None


def test_growth_rate_reported(synth_corpus, tmp_path):
    corpus, _ = synth_corpus
    main(["analyze", "growth", "--meta", str(corpus), "--out-dir", str(tmp_path)])
    assert json.loads((tmp_path / "growth.json").read_text())["growth_rate"] == pytest.approx(0.02, rel=0.1)


def test_ks_between_tables(synth_corpus, tmp_path):
    _, table = synth_corpus
    assert main(["analyze", "ks", "--a", f"{table}:c_w", "--b", f"{table}:c_w",
                 "--out-dir", str(tmp_path)]) == 0
    result = json.loads((tmp_path / "ks.json").read_text())
    assert result["statistic"] == 0.0


def test_undefined_series_warns(tmp_path, caplog):
    with caplog.at_level(logging.WARNING):
        assert main(["analyze", "correlations", "--meta", "data/toy_corpus.tsv",
                     "--out-dir", str(tmp_path)]) == 0
    out = tmp_path / "correlation_pearson_d_w.csv"
    assert out.read_text().strip() == "key,value,n"
    assert "undefined" in caplog.text


# -- synth --------------------------------------------------------------------

def test_synth_writes_corpus_and_truth(tmp_path):
    args = ["--years", "1950:2010", "--growth", "0.05", "--seed", "1", "--base-count", "10"]
    for name in ("a", "b"):
        assert main(["synth", "--out", str(tmp_path / name / "c.tsv")] + args) == 0
    for f in ("c.tsv", "c.truth.json", "c.manifest.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    assert main(["metrics", "--meta", str(tmp_path / "a" / "c.tsv"),
                 "--out", str(tmp_path / "m.csv")]) == 0


def test_synth_ramp_truth(tmp_path):
    out = tmp_path / "c.tsv"
    assert main(["synth", "--out", str(out), "--years", "1950:2010", "--base-count", "5",
                 "--beta", "ramp:0.8:-0.8"]) == 0
    assert json.loads(out.with_suffix(".truth.json").read_text())["sign_flip"] is True


def test_synth_invalid_config_is_usage_error(tmp_path):
    with pytest.raises(SystemExit) as exc:
        main(["synth", "--out", str(tmp_path / "c.tsv"), "--alpha", "2"])
    assert exc.value.code == 2
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"no_such_field": 1}))
    with pytest.raises(SystemExit):
        main(["synth", "--out", str(tmp_path / "c.tsv"), "--config", str(cfg)])
