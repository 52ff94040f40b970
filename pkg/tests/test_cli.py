import csv
import json

import pytest

from patpairs.cli import main
from patpairs.records import read_pairs, read_rows

from conftest import FIXTURES


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def build_fixture_dataset(tmp_path, capsys, extra=()):
    out_dir = tmp_path / "out"
    code, out, err = run_cli(
        capsys, "build",
        "--mode", "fixture",
        "--seed-query", "redox flow battery",
        "--fixture-dir", FIXTURES / "api",
        "--out-dir", out_dir,
        *extra,
    )
    assert code == 0, err
    return out_dir


def test_build_fixture_dataset(tmp_path, capsys):
    out_dir = build_fixture_dataset(tmp_path, capsys)
    rows = read_rows(out_dir / "rows.csv")
    assert len(rows) == 12
    report = json.loads((out_dir / "build_report.json").read_text())
    assert report["rows_with_positive"] == 4
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["config"]["seed_query"] == "redox flow battery"
    assert (out_dir / "corpus_stats.tsv").exists()
    assert (out_dir / "build.log").exists()


def test_build_k_flag_plumbs_through(tmp_path, capsys):
    out_dir = build_fixture_dataset(tmp_path, capsys, extra=("--k", "10"))
    rows = read_rows(out_dir / "rows.csv")
    assert all(r.k == 10 for r in rows)


def test_build_live_without_key_is_config_error(tmp_path, capsys, monkeypatch):
    monkeypatch.delenv("USPTO_API_KEY", raising=False)
    code, out, err = run_cli(capsys, "build", "--mode", "live", "--out-dir", tmp_path / "o")
    assert code == 2
    envelope = json.loads(err.strip().splitlines()[-1])
    assert envelope["error"] == "config"


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# fixture demo\n"
        "mode = fixture\n"
        f"fixture_dir = {FIXTURES / 'api'}\n"
        "k = 25\n"
        "seed_query = redox flow battery\n"
    )
    out_dir = tmp_path / "out"
    code, _, err = run_cli(capsys, "build", "--config", cfg, "--k", "10", "--out-dir", out_dir)
    assert code == 0, err
    rows = read_rows(out_dir / "rows.csv")
    assert all(r.k == 10 for r in rows)  # flag beats file
    manifest = json.loads((out_dir / "manifest.json").read_text())
    assert manifest["config"]["k"] == "10"


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("definitely_not_a_key = 1\n")
    code, _, err = run_cli(capsys, "build", "--config", cfg)
    assert code == 2


def make_pairs_file(tmp_path, capsys):
    out_dir = build_fixture_dataset(tmp_path, capsys)
    pairs_path = tmp_path / "pairs.csv"
    code, out, err = run_cli(capsys, "pairs", "--rows", out_dir / "rows.csv", "--out", pairs_path)
    assert code == 0, err
    return pairs_path


def test_pairs_subcommand(tmp_path, capsys):
    pairs_path = make_pairs_file(tmp_path, capsys)
    pairs = read_pairs(pairs_path)
    assert len(pairs) == 12 * 25
    assert sum(p.label for p in pairs) == 5
    manifest = json.loads(pairs_path.with_suffix(".manifest.json").read_text())
    assert manifest["pairs"] == 300


def test_split_subcommand_three_runs(tmp_path, capsys):
    pairs_path = make_pairs_file(tmp_path, capsys)
    splits_dir = tmp_path / "splits"
    code, _, err = run_cli(capsys, "split", "--pairs", pairs_path,
                           "--runs", "3", "--seed", "7", "--out-dir", splits_dir)
    assert code == 0, err
    for i in range(3):
        run_dir = splits_dir / f"run_{i}"
        assert (run_dir / "train.csv").exists()
        manifest = json.loads((run_dir / "manifest.json").read_text())
        assert manifest["seed"] == 7 + i
        assert manifest["master_seed"] == 7


def test_split_byte_identical_reruns(tmp_path, capsys):
    pairs_path = make_pairs_file(tmp_path, capsys)
    out_dir = tmp_path / "splits"
    argv = ("split", "--pairs", pairs_path, "--seed", "5", "--out-dir", out_dir)
    code, _, err = run_cli(capsys, *argv)
    assert code == 0, err
    out_dir.rename(tmp_path / "first")
    code, _, err = run_cli(capsys, *argv)  # identical config, second run
    assert code == 0, err
    for i in range(3):
        for f in ("train.csv", "val.csv", "test.csv", "manifest.json"):
            a = (tmp_path / "first" / f"run_{i}" / f).read_bytes()
            b = (out_dir / f"run_{i}" / f).read_bytes()
            assert a == b, f"run_{i}/{f} differs between reruns"


def split_runs(tmp_path, capsys):
    pairs_path = make_pairs_file(tmp_path, capsys)
    splits_dir = tmp_path / "splits"
    code, _, err = run_cli(capsys, "split", "--pairs", pairs_path,
                           "--runs", "3", "--seed", "7", "--out-dir", splits_dir)
    assert code == 0, err
    return splits_dir


def test_downsample_subcommand(tmp_path, capsys):
    splits_dir = split_runs(tmp_path, capsys)
    out_dir = tmp_path / "k5" / "run_0"
    code, _, err = run_cli(capsys, "downsample", "--run-dir", splits_dir / "run_0",
                           "--k", "5", "--seed", "3", "--out-dir", out_dir)
    assert code == 0, err
    for split in ("train", "val", "test"):
        pairs = read_pairs(out_dir / f"{split}.csv")
        by_base = {}
        for p in pairs:
            by_base.setdefault(str(p.base_pub), []).append(p)
        assert all(len(m) == 5 for m in by_base.values())


def test_downsample_k_too_small_fails(tmp_path, capsys):
    splits_dir = split_runs(tmp_path, capsys)
    code, _, err = run_cli(capsys, "downsample", "--run-dir", splits_dir / "run_0",
                           "--k", "1", "--seed", "3", "--out-dir", tmp_path / "k1")
    # the two-positive base patent cannot shrink to one pair
    assert code == 3
    assert json.loads(err.strip().splitlines()[-1])["error"] == "data"


def write_scores(pairs_path, scores_path, scorer):
    pairs = read_pairs(pairs_path)
    with open(scores_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["base_pub", "cand_pub", "score"])
        for p in pairs:
            w.writerow([str(p.base_pub), str(p.cand_pub), scorer(p)])
    return pairs


def test_evaluate_oracle_scorer_all_ones(tmp_path, capsys):
    splits_dir = split_runs(tmp_path, capsys)
    test_csv = splits_dir / "run_0" / "test.csv"
    scores_csv = tmp_path / "scores.csv"
    write_scores(test_csv, scores_csv, lambda p: float(p.label))
    code, out, err = run_cli(capsys, "evaluate", "--pairs", test_csv,
                             "--scores", scores_csv, "--out-dir", tmp_path / "eval")
    assert code == 0, err
    report = json.loads((tmp_path / "eval" / "report.json").read_text())
    assert report["mrr"] == 1.0 and report["p_at_1"] == 1.0
    assert "mean" in out


def test_evaluate_constant_scorer_placeholder_wins(tmp_path, capsys):
    splits_dir = split_runs(tmp_path, capsys)
    # use train.csv: more sets, both strata present
    train_csv = splits_dir / "run_0" / "train.csv"
    scores_csv = tmp_path / "scores.csv"
    pairs = write_scores(train_csv, scores_csv, lambda p: 0.5)
    code, _, err = run_cli(capsys, "evaluate", "--pairs", train_csv,
                           "--scores", scores_csv, "--out-dir", tmp_path / "eval")
    assert code == 0, err
    groups = {}
    for p in pairs:
        groups.setdefault(str(p.base_pub), []).append(p.label)
    no_pos = sum(1 for labels in groups.values() if not any(labels))
    report = json.loads((tmp_path / "eval" / "report.json").read_text())
    assert report["p_at_1"] == pytest.approx(no_pos / len(groups))


def test_evaluate_missing_scores_is_join_error(tmp_path, capsys):
    splits_dir = split_runs(tmp_path, capsys)
    test_csv = splits_dir / "run_0" / "test.csv"
    scores_csv = tmp_path / "scores.csv"
    pairs = read_pairs(test_csv)
    with open(scores_csv, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["base_pub", "cand_pub", "score"])
        for p in pairs[:-1]:  # drop one row
            w.writerow([str(p.base_pub), str(p.cand_pub), 0.5])
    code, _, err = run_cli(capsys, "evaluate", "--pairs", test_csv,
                           "--scores", scores_csv, "--out-dir", tmp_path / "eval")
    assert code == 3
    assert json.loads(err.strip().splitlines()[-1])["error"] == "schema"


def test_extract_test_meets_reference(tmp_path, capsys):
    report_path = tmp_path / "extract.json"
    code, out, err = run_cli(capsys, "extract-test",
                             "--corpus", FIXTURES / "rejections" / "corpus.jsonl",
                             "--out", report_path)
    assert code == 0, err
    payload = json.loads(report_path.read_text())
    assert payload["cases"] == 50
    assert payload["success_rate"] >= 0.94
    assert payload["meets_reference"] is True
