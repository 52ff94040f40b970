"""Set-level evaluation of pairwise novelty scorers.

Classification path: each base patent's candidate set collapses to one
(label, score) point via logical OR of labels and max of scores, then AUROC
and average precision are computed over the collapsed points.

Ranking path: a placeholder candidate with a fixed score (0.9) is inserted
into every set before sorting so MRR and P@1 stay defined for sets that
contain no true positive; in that case the placeholder itself is the
relevant element, otherwise the true positives are.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .records import PairExample, PublicationNumber, SchemaError, read_pairs

PLACEHOLDER_SCORE = 0.9


class DegenerateClasses(ValueError):
    """Metric undefined because one class is absent."""


@dataclass(frozen=True)
class ScoredItem:
    cand_pub: PublicationNumber
    score: float
    label: int

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score out of [0,1]: {self.score}")
        if self.label not in (0, 1):
            raise ValueError("label must be 0 or 1")


@dataclass(frozen=True)
class ScoreSet:
    base_pub: PublicationNumber
    items: tuple[ScoredItem, ...]

    def __post_init__(self):
        if not self.items:
            raise ValueError("a score set needs at least one item")
        pubs = [str(i.cand_pub) for i in self.items]
        if len(set(pubs)) != len(pubs):
            raise ValueError(f"duplicate candidates in set {self.base_pub}")


def set_label(s: ScoreSet) -> int:
    """Logical OR over the set's item labels."""
    return 1 if any(i.label == 1 for i in s.items) else 0


def set_score(s: ScoreSet) -> float:
    """Max item score; the ranking placeholder never participates here."""
    return max(i.score for i in s.items)


def auroc(points: Sequence[tuple[int, float]]) -> float:
    """Probability a positive outscores a negative, ties counted half.

    Computed through the rank-sum identity rather than pair counting.
    """
    pos = [s for l, s in points if l == 1]
    neg = [s for l, s in points if l == 0]
    if not pos or not neg:
        raise DegenerateClasses("AUROC needs both classes")
    ranked = sorted((s, l) for l, s in points)
    # average ranks over tie groups
    ranks: list[float] = [0.0] * len(ranked)
    i = 0
    while i < len(ranked):
        j = i
        while j < len(ranked) and ranked[j][0] == ranked[i][0]:
            j += 1
        avg = (i + 1 + j) / 2.0
        for t in range(i, j):
            ranks[t] = avg
        i = j
    rank_sum = sum(r for r, (_, l) in zip(ranks, ranked) if l == 1)
    u = rank_sum - len(pos) * (len(pos) + 1) / 2.0
    return u / (len(pos) * len(neg))


def average_precision(points: Sequence[tuple[int, float]]) -> float:
    """Step-wise AP over distinct score thresholds, descending.

    All points tied at one score enter as a single threshold group, so the
    result does not depend on input order:  AP = sum over thresholds of
    (recall gain) * (precision at threshold).
    """
    n_pos = sum(1 for l, _ in points if l == 1)
    if n_pos == 0:
        raise DegenerateClasses("AP needs at least one positive")
    groups: dict[float, list[int]] = {}
    for l, s in points:
        g = groups.setdefault(s, [0, 0])
        g[l] += 1
    tp = 0
    fp = 0
    total = 0.0
    for score in sorted(groups, reverse=True):
        g_neg, g_pos = groups[score]
        tp += g_pos
        fp += g_neg
        if g_pos:
            total += (g_pos / n_pos) * (tp / (tp + fp))
    return total


@dataclass(frozen=True)
class RankedEntry:
    cand_pub: PublicationNumber | None   # None marks the placeholder
    score: float
    label: int

    @property
    def is_placeholder(self) -> bool:
        return self.cand_pub is None


@dataclass(frozen=True)
class RankedSet:
    ordering: tuple[RankedEntry, ...]
    placeholder_score: float
    relevant_rank: int

    def __post_init__(self):
        if self.relevant_rank < 1:
            raise ValueError("relevant_rank must be >= 1")


def rank_with_placeholder(s: ScoreSet, placeholder_score: float = PLACEHOLDER_SCORE) -> RankedSet:
    """Sort the set plus the placeholder by score, then locate the first
    relevant element.

    Tie rule: equal scores put real candidates before the placeholder, and
    order real candidates by publication number ascending.  When the set has
    true positives they are the relevant elements; otherwise the placeholder
    is.
    """
    entries = [RankedEntry(cand_pub=i.cand_pub, score=i.score, label=i.label) for i in s.items]
    entries.append(RankedEntry(cand_pub=None, score=placeholder_score, label=0))
    entries.sort(key=lambda e: (-e.score, e.is_placeholder, str(e.cand_pub or "")))
    has_positive = any(e.label == 1 for e in entries)
    for rank, e in enumerate(entries, start=1):
        if (e.label == 1) if has_positive else e.is_placeholder:
            return RankedSet(ordering=tuple(entries), placeholder_score=placeholder_score,
                             relevant_rank=rank)
    raise AssertionError("unreachable: placeholder always present")


def mrr(ranked: Sequence[RankedSet]) -> float:
    if not ranked:
        raise ValueError("no ranked sets")
    return sum(1.0 / r.relevant_rank for r in ranked) / len(ranked)


def p_at_1(ranked: Sequence[RankedSet]) -> float:
    if not ranked:
        raise ValueError("no ranked sets")
    return sum(1 for r in ranked if r.relevant_rank == 1) / len(ranked)


@dataclass(frozen=True)
class RunMetrics:
    auroc: float
    ap: float
    mrr: float
    p_at_1: float
    n_sets: int


@dataclass(frozen=True)
class MetricsReport:
    auroc: float
    ap: float
    mrr: float
    p_at_1: float
    per_run: tuple[RunMetrics, ...]
    n_sets: int

    def to_json_dict(self) -> dict:
        return {
            "auroc": self.auroc,
            "ap": self.ap,
            "mrr": self.mrr,
            "p_at_1": self.p_at_1,
            "n_sets": self.n_sets,
            "per_run": [
                {"auroc": r.auroc, "ap": r.ap, "mrr": r.mrr, "p_at_1": r.p_at_1, "n_sets": r.n_sets}
                for r in self.per_run
            ],
        }


def evaluate_run(sets: Sequence[ScoreSet], placeholder_score: float = PLACEHOLDER_SCORE) -> RunMetrics:
    points = [(set_label(s), set_score(s)) for s in sets]
    ranked = [rank_with_placeholder(s, placeholder_score) for s in sets]
    return RunMetrics(
        auroc=auroc(points),
        ap=average_precision(points),
        mrr=mrr(ranked),
        p_at_1=p_at_1(ranked),
        n_sets=len(sets),
    )


def evaluate(runs: Sequence[Sequence[ScoreSet]], placeholder_score: float = PLACEHOLDER_SCORE) -> MetricsReport:
    """Per-run metrics plus their arithmetic mean across runs."""
    if not runs:
        raise ValueError("need at least one run")
    per_run = tuple(evaluate_run(sets, placeholder_score) for sets in runs)
    n = len(per_run)
    return MetricsReport(
        auroc=sum(r.auroc for r in per_run) / n,
        ap=sum(r.ap for r in per_run) / n,
        mrr=sum(r.mrr for r in per_run) / n,
        p_at_1=sum(r.p_at_1 for r in per_run) / n,
        per_run=per_run,
        n_sets=sum(r.n_sets for r in per_run),
    )


# -- scores-file ingestion -----------------------------------------------------

SCORE_COLUMNS = ["base_pub", "cand_pub", "score"]


def read_scores(path: str | Path) -> dict[tuple[str, str], float]:
    scores: dict[tuple[str, str], float] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty scores file") from None
        if header != SCORE_COLUMNS:
            raise SchemaError(f"bad scores header: {header}")
        for lineno, rec in enumerate(reader, start=2):
            if len(rec) != 3:
                raise SchemaError(f"line {lineno}: expected 3 fields")
            key = (rec[0], rec[1])
            if key in scores:
                raise SchemaError(f"line {lineno}: duplicate score for {key}")
            score = float(rec[2])
            if not 0.0 <= score <= 1.0:
                raise SchemaError(f"line {lineno}: score out of [0,1]")
            scores[key] = score
    return scores


def join_scores(pairs: Sequence[PairExample], scores: dict[tuple[str, str], float]) -> list[ScoreSet]:
    """Zip test pairs with their scores into per-base sets.

    Every pair must have exactly one score row and vice versa; base order is
    sorted, item order follows the pairs file.
    """
    wanted = {(str(p.base_pub), str(p.cand_pub)) for p in pairs}
    if len(wanted) != len(pairs):
        raise SchemaError("duplicate (base, candidate) pair in pairs file")
    missing = sorted(wanted - set(scores))
    extra = sorted(set(scores) - wanted)
    if missing:
        raise SchemaError(f"{len(missing)} pairs lack scores, first: {missing[0]}")
    if extra:
        raise SchemaError(f"{len(extra)} score rows match no pair, first: {extra[0]}")
    by_base: dict[str, list[ScoredItem]] = {}
    base_pubs: dict[str, PublicationNumber] = {}
    for p in pairs:
        key = (str(p.base_pub), str(p.cand_pub))
        base_pubs[key[0]] = p.base_pub
        by_base.setdefault(key[0], []).append(
            ScoredItem(cand_pub=p.cand_pub, score=scores[key], label=p.label)
        )
    return [ScoreSet(base_pub=base_pubs[b], items=tuple(items))
            for b, items in sorted(by_base.items())]


def load_run(pairs_path: str | Path, scores_path: str | Path) -> list[ScoreSet]:
    return join_scores(read_pairs(pairs_path), read_scores(scores_path))


def format_table(report: MetricsReport) -> str:
    """Aligned text table: one row per run plus the mean."""
    headers = ["run", "AUROC", "AP", "MRR", "P@1", "sets"]
    rows = [
        [f"run_{i}", f"{r.auroc:.4f}", f"{r.ap:.4f}", f"{r.mrr:.4f}", f"{r.p_at_1:.4f}", str(r.n_sets)]
        for i, r in enumerate(report.per_run)
    ]
    rows.append(["mean", f"{report.auroc:.4f}", f"{report.ap:.4f}", f"{report.mrr:.4f}",
                 f"{report.p_at_1:.4f}", str(report.n_sets)])
    widths = [max(len(h), *(len(r[c]) for r in rows)) for c, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(widths[c]) for c, h in enumerate(headers))]
    for r in rows:
        lines.append("  ".join(v.ljust(widths[c]) for c, v in enumerate(r)))
    return "\n".join(lines) + "\n"


def write_report(report: MetricsReport, json_path: str | Path, table_path: str | Path | None = None) -> None:
    Path(json_path).write_text(json.dumps(report.to_json_dict(), indent=2, sort_keys=True) + "\n",
                               encoding="utf-8")
    if table_path is not None:
        Path(table_path).write_text(format_table(report), encoding="utf-8")
