#!/usr/bin/env python3
"""Offline end-to-end demo: build rows from the bundled fixtures, make three
split runs, downsample k 25->10->5, score the test split with two synthetic
scorers, and evaluate.

Usage: python scripts/run_fixture_pipeline.py [out_dir]
"""

from __future__ import annotations

import csv
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from patpairs.builder import BuildConfig, build_dataset
from patpairs.gpatents import PageClientConfig
from patpairs.metrics import evaluate, format_table, join_scores
from patpairs.records import write_rows
from patpairs.splits import downsample, make_runs, to_pairwise, write_bundle
from patpairs.uspto import ClientConfig


def write_scores(pairs, path, scorer):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["base_pub", "cand_pub", "score"])
        for p in pairs:
            w.writerow([str(p.base_pub), str(p.cand_pub), scorer(p)])


def main() -> None:
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else REPO / "out" / "fixture_demo"
    out.mkdir(parents=True, exist_ok=True)
    api = REPO / "fixtures" / "api"

    cfg = BuildConfig(
        seed_query="redox flow battery",
        bulk=ClientConfig(mode="FIXTURE", fixture_dir=api),
        office_actions=ClientConfig(mode="FIXTURE", fixture_dir=api),
        pages=PageClientConfig(mode="FIXTURE", fixture_dir=api, cache_dir=out / "cache"),
    )
    rows, report = build_dataset(cfg)
    write_rows(rows, out / "rows.csv")
    print(f"rows: {report.rows_built}  with positive: {report.rows_with_positive}  "
          f"two positives: {report.rows_with_two_positives}")

    pairs = to_pairwise(rows)
    runs = make_runs(pairs, n_runs=3, master_seed=7)
    for bundle in runs:
        write_bundle(bundle, out / f"run_{bundle.run_id}")
        for k_new in (10, 5):
            write_bundle(downsample(bundle, k_new, seed=bundle.seed),
                         out / f"run_{bundle.run_id}_k{k_new}")

    for name, scorer in (("oracle", lambda p: float(p.label)), ("constant", lambda p: 0.5)):
        per_run_sets = []
        for bundle in runs:
            write_scores(bundle.test, out / f"scores_{name}_run{bundle.run_id}.csv", scorer)
            scores = {(str(p.base_pub), str(p.cand_pub)): scorer(p) for p in bundle.test}
            per_run_sets.append(join_scores(bundle.test, scores))
        print(f"\n{name} scorer, averaged over {len(runs)} runs:")
        print(format_table(evaluate(per_run_sets)), end="")


if __name__ == "__main__":
    main()
