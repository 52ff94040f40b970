"""Command line entry point: build, pairs, split, downsample, evaluate,
extract-test.

Configuration comes from an optional KEY=VALUE file plus flags (flags win).
The API key is only ever read from the USPTO_API_KEY environment variable so
it cannot leak into manifests.  Failures print a JSON error envelope on
stderr and exit nonzero with a category-specific code.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .builder import BuildConfig, TooManyPositives, build_dataset
from .gpatents import NoClaims, NotFound, PageClientConfig
from .keywords import EmptyAbstract, build_corpus_stats, save_corpus_stats
from .metrics import (
    DegenerateClasses,
    PLACEHOLDER_SCORE,
    evaluate,
    format_table,
    load_run,
    write_report,
)
from .records import MalformedNumber, SchemaError, read_rows, write_pairs, write_rows
from .rejections import ExternalExtractor, measure_extraction_success
from .splits import (
    KTooSmall,
    TooFewGroups,
    downsample,
    make_runs,
    read_bundle,
    to_pairwise,
    write_bundle,
)
from .uspto import ClientConfig, DecodeError, HttpError, RetryPolicy

log = logging.getLogger("patpairs")

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NETWORK = 4
EXIT_IO = 5

DEFAULTS = {
    "mode": "fixture",
    "seed_query": "redox flow battery",
    "k": "25",
    "max_base_patents": "100",
    "seed": "0",
    "runs": "3",
    "ratios": "0.8,0.1,0.1",
    "page_size": "50",
    "workers": "1",
    "rate_limit": "4.0",
    "page_rate_limit": "1.0",
    "retry_max_attempts": "3",
    "retry_backoff_ms": "250",
    "fixture_dir": "fixtures/api",
    "cache_dir": "",
    "out_dir": "out",
    "keyword_count": "5",
    "placeholder_score": str(PLACEHOLDER_SCORE),
}


class ConfigError(ValueError):
    pass


def load_config_file(path: str | Path) -> dict[str, str]:
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ConfigError(f"{path}:{lineno}: expected KEY=VALUE, got {raw!r}")
        values[key.strip()] = value.strip()
    return values


def effective_config(args: argparse.Namespace) -> dict[str, str]:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(load_config_file(args.config))
    for key in DEFAULTS:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = str(flag)
    unknown = set(cfg) - set(DEFAULTS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _ratios(text: str) -> tuple[float, float, float]:
    parts = [float(p) for p in text.split(",")]
    if len(parts) != 3 or abs(sum(parts) - 1.0) > 1e-9:
        raise ConfigError(f"ratios must be three numbers summing to 1, got {text!r}")
    return tuple(parts)  # type: ignore[return-value]


def build_configs(cfg: dict[str, str]) -> BuildConfig:
    mode = cfg["mode"].upper()
    if mode not in ("LIVE", "FIXTURE"):
        raise ConfigError(f"mode must be live or fixture, got {cfg['mode']!r}")
    api_key = os.environ.get("USPTO_API_KEY")
    if mode == "LIVE" and not api_key:
        raise ConfigError("LIVE mode requires the USPTO_API_KEY environment variable")
    fixture_dir = Path(cfg["fixture_dir"]) if cfg["fixture_dir"] else None
    if mode == "FIXTURE" and (fixture_dir is None or not fixture_dir.is_dir()):
        raise ConfigError(f"fixture mode requires an existing fixture_dir, got {fixture_dir}")
    retry = RetryPolicy(
        max_attempts=int(cfg["retry_max_attempts"]),
        backoff_base_ms=int(cfg["retry_backoff_ms"]),
    )
    client = dict(api_key=api_key, rate_limit=float(cfg["rate_limit"]), retry=retry,
                  mode=mode, fixture_dir=fixture_dir)
    try:
        return BuildConfig(
            seed_query=cfg["seed_query"],
            k=int(cfg["k"]),
            max_base_patents=int(cfg["max_base_patents"]),
            seed=int(cfg["seed"]),
            keyword_count=int(cfg["keyword_count"]),
            page_size=int(cfg["page_size"]),
            workers=int(cfg["workers"]),
            bulk=ClientConfig(**client),
            office_actions=ClientConfig(**client),
            pages=PageClientConfig(
                rate_limit=float(cfg["page_rate_limit"]),
                retry=retry,
                mode=mode,
                fixture_dir=fixture_dir,
                cache_dir=Path(cfg["cache_dir"]) if cfg["cache_dir"] else None,
            ),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def manifest_payload(cfg: dict[str, str], command: str, extra: dict | None = None) -> dict:
    payload = {"command": command, "version": __version__, "config": dict(cfg)}
    if extra:
        payload.update(extra)
    return payload


def write_manifest(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")


# -- subcommands -----------------------------------------------------------------


def cmd_build(args) -> int:
    cfg = effective_config(args)
    build_cfg = build_configs(cfg)
    out_dir = Path(cfg["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    handler = logging.FileHandler(out_dir / "build.log", mode="w", encoding="utf-8")
    handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s %(message)s"))
    logging.getLogger().addHandler(handler)
    try:
        rows, report = build_dataset(build_cfg)
    finally:
        logging.getLogger().removeHandler(handler)
        handler.close()
    write_rows(rows, out_dir / "rows.csv")
    write_rows(rows, out_dir / "rows.jsonl")
    # the same frequency table the keyword scorer saw (emitted rows = kept bases)
    stats = build_corpus_stats(r.base.abstract for r in rows if r.base.abstract.strip())
    save_corpus_stats(stats, out_dir / "corpus_stats.tsv")
    (out_dir / "build_report.json").write_text(
        json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    write_manifest(out_dir / "manifest.json",
                   manifest_payload(cfg, "build", {"report": report.to_json_dict()}))
    print(f"built {report.rows_built} rows -> {out_dir / 'rows.csv'}")
    return 0


def cmd_pairs(args) -> int:
    cfg = effective_config(args)
    rows = read_rows(args.rows)
    pairs = to_pairwise(rows)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_pairs(pairs, out)
    write_manifest(out.with_suffix(".manifest.json"),
                   manifest_payload(cfg, "pairs", {
                       "rows": len(rows),
                       "pairs": len(pairs),
                       "positive_pairs": sum(p.label for p in pairs),
                   }))
    print(f"wrote {len(pairs)} pairs -> {out}")
    return 0


def cmd_split(args) -> int:
    cfg = effective_config(args)
    from .records import read_pairs

    pairs = read_pairs(args.pairs)
    ratios = _ratios(cfg["ratios"])
    master_seed = int(cfg["seed"])
    bundles = make_runs(pairs, n_runs=int(cfg["runs"]), master_seed=master_seed, ratios=ratios)
    out_dir = Path(cfg["out_dir"])
    for bundle in bundles:
        write_bundle(bundle, out_dir / f"run_{bundle.run_id}",
                     extra_manifest=manifest_payload(cfg, "split", {"master_seed": master_seed,
                                                                    "ratios": list(ratios)}))
    print(f"wrote {len(bundles)} runs under {out_dir}")
    return 0


def cmd_downsample(args) -> int:
    cfg = effective_config(args)
    bundle = read_bundle(args.run_dir)
    smaller = downsample(bundle, k_new=int(cfg["k"]), seed=int(cfg["seed"]))
    out_dir = Path(args.out_dir) if args.out_dir else Path(cfg["out_dir"])
    write_bundle(smaller, out_dir, extra_manifest=manifest_payload(cfg, "downsample", {
        "source": str(args.run_dir),
    }))
    print(f"downsampled to k={int(cfg['k'])} -> {out_dir}")
    return 0


def cmd_evaluate(args) -> int:
    cfg = effective_config(args)
    if len(args.pairs) != len(args.scores):
        raise ConfigError("--pairs and --scores must be given the same number of times")
    placeholder = float(cfg["placeholder_score"])
    runs = [load_run(p, s) for p, s in zip(args.pairs, args.scores)]
    report = evaluate(runs, placeholder_score=placeholder)
    out_dir = Path(cfg["out_dir"])
    out_dir.mkdir(parents=True, exist_ok=True)
    write_report(report, out_dir / "report.json", out_dir / "report.txt")
    sys.stdout.write(format_table(report))
    return 0


def cmd_extract_test(args) -> int:
    corpus = []
    for lineno, line in enumerate(Path(args.corpus).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        obj = json.loads(line)
        corpus.append((obj["text"], obj["expected"]))
    if args.external_cmd:
        with ExternalExtractor(args.external_cmd.split()) as ext:
            rate = measure_extraction_success(corpus, extractor=ext)
        method = "external"
    else:
        rate = measure_extraction_success(corpus)
        method = "rules"
    payload = {
        "cases": len(corpus),
        "correct": round(rate * len(corpus)),
        "success_rate": rate,
        "method": method,
        "reference_rate": 0.94,
        "meets_reference": rate >= 0.94,
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
    return 0


# -- plumbing --------------------------------------------------------------------


def _add_config_flags(p: argparse.ArgumentParser, keys: list[str]) -> None:
    p.add_argument("--config", help="KEY=VALUE config file")
    for key in keys:
        p.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None)


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="patpairs", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="crawl sources and emit k-slot rows")
    _add_config_flags(p, ["mode", "seed_query", "k", "max_base_patents", "seed", "page_size",
                          "workers", "rate_limit", "page_rate_limit", "retry_max_attempts",
                          "retry_backoff_ms", "fixture_dir", "cache_dir", "out_dir",
                          "keyword_count"])
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("pairs", help="convert rows to the pairwise format")
    p.add_argument("--rows", required=True)
    p.add_argument("--out", required=True)
    _add_config_flags(p, [])
    p.set_defaults(func=cmd_pairs)

    p = sub.add_parser("split", help="grouped stratified train/val/test runs")
    p.add_argument("--pairs", required=True)
    _add_config_flags(p, ["runs", "seed", "ratios", "out_dir"])
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("downsample", help="shrink every base patent to k pairs")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--out-dir", default=None)
    _add_config_flags(p, ["k", "seed"])
    p.set_defaults(func=cmd_downsample)

    p = sub.add_parser("evaluate", help="score a model's output files")
    p.add_argument("--pairs", action="append", required=True,
                   help="test pairs CSV (repeat per run)")
    p.add_argument("--scores", action="append", required=True,
                   help="scores CSV matching --pairs (repeat per run)")
    _add_config_flags(p, ["out_dir", "placeholder_score"])
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("extract-test", help="score the citation extractor on a corpus")
    p.add_argument("--corpus", required=True, help="JSONL with text/expected fields")
    p.add_argument("--out", default=None)
    p.add_argument("--external-cmd", default=None,
                   help="command for an external line-protocol extractor")
    _add_config_flags(p, [])
    p.set_defaults(func=cmd_extract_test)
    return parser


_ERROR_CATEGORIES: list[tuple[type, str, int]] = [
    (ConfigError, "config", EXIT_CONFIG),
    (TooFewGroups, "data", EXIT_DATA),
    (KTooSmall, "data", EXIT_DATA),
    (TooManyPositives, "data", EXIT_DATA),
    (SchemaError, "schema", EXIT_DATA),
    (DecodeError, "schema", EXIT_DATA),
    (MalformedNumber, "data", EXIT_DATA),
    (DegenerateClasses, "data", EXIT_DATA),
    (EmptyAbstract, "data", EXIT_DATA),
    (NoClaims, "data", EXIT_DATA),
    (NotFound, "network", EXIT_NETWORK),
    (HttpError, "network", EXIT_NETWORK),
    (ValueError, "data", EXIT_DATA),
    (OSError, "io", EXIT_IO),
]


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s %(message)s")
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # envelope for tooling
        for etype, category, code in _ERROR_CATEGORIES:
            if isinstance(exc, etype):
                break
        else:
            category, code = "internal", 1
        sys.stderr.write(json.dumps({"error": category, "message": str(exc)}) + "\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
