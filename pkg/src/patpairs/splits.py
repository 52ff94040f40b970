"""Pairwise transform, grouped stratified splits, seeded runs, downsampling.

Splitting shuffles whole base-patent groups, never individual pairs, so all
of one base patent's pairs land in a single split (no leakage).  Strata are
"group contains a positive pair" vs not; positive groups are spread across
splits by proportional quota with largest-remainder rounding, which keeps
each split's positive-group fraction within one group of the global one.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .records import DatasetRow, PairExample, read_pairs, write_pairs

RATIOS = (0.8, 0.1, 0.1)
SPLIT_NAMES = ("train", "val", "test")


class TooFewGroups(ValueError):
    """A split would receive zero base patents."""


class KTooSmall(ValueError):
    """Downsampling target below a base patent's positive count."""


def to_pairwise(rows: Sequence[DatasetRow]) -> list[PairExample]:
    """One pair per non-null slot, rows in order, slots ascending."""
    pairs = []
    for row in rows:
        for slot in row.slots:
            if slot.is_null():
                continue
            pairs.append(
                PairExample(
                    base_pub=row.base.publication_number,
                    cand_pub=slot.pub,
                    claims_x=row.base.claims,
                    claims_y=slot.claims,
                    label=slot.label,
                )
            )
    return pairs


@dataclass
class SplitBundle:
    train: list[PairExample]
    val: list[PairExample]
    test: list[PairExample]
    seed: int
    k_effective: int
    run_id: int = 0

    def splits(self) -> dict[str, list[PairExample]]:
        return {"train": self.train, "val": self.val, "test": self.test}


def _group_pairs(pairs: Sequence[PairExample]) -> dict[str, list[PairExample]]:
    groups: dict[str, list[PairExample]] = {}
    for p in pairs:
        groups.setdefault(str(p.base_pub), []).append(p)
    return groups


def _canonical(pairs: list[PairExample]) -> list[PairExample]:
    # canonical pair order makes the bundle independent of input order
    return sorted(pairs, key=lambda p: (str(p.base_pub), str(p.cand_pub), p.label))


def split_sizes(n: int, ratios: tuple[float, float, float]) -> tuple[int, int, int]:
    """floor/floor/remainder on group counts."""
    t = int(n * ratios[0])
    v = int(n * ratios[1])
    return t, v, n - t - v


def _quota(n_positive: int, sizes: tuple[int, int, int], n: int) -> list[int]:
    """Largest-remainder allocation of positive groups across the splits."""
    ideal = [n_positive * s / n for s in sizes]
    counts = [int(q) for q in ideal]
    leftover = n_positive - sum(counts)
    order = sorted(range(3), key=lambda i: (-(ideal[i] - counts[i]), i))
    for i in order[:leftover]:
        counts[i] += 1
    return counts


def stratified_group_split(
    pairs: Sequence[PairExample],
    ratios: tuple[float, float, float] = RATIOS,
    seed: int = 0,
    run_id: int = 0,
) -> SplitBundle:
    groups = _group_pairs(pairs)
    n = len(groups)
    if n < 3:
        raise TooFewGroups(f"need at least 3 base patents, got {n}")
    sizes = split_sizes(n, ratios)
    if min(sizes) < 1:
        raise TooFewGroups(f"split sizes {sizes} leave an empty split for n={n}")

    positive = sorted(g for g, ps in groups.items() if any(p.label == 1 for p in ps))
    negative = sorted(g for g in groups if g not in set(positive))
    rng = random.Random(seed)
    rng.shuffle(positive)
    rng.shuffle(negative)

    pos_counts = _quota(len(positive), sizes, n)
    neg_counts = [sizes[i] - pos_counts[i] for i in range(3)]
    if min(neg_counts) < 0:
        raise TooFewGroups(f"positive quota {pos_counts} exceeds split sizes {sizes}")

    assignment: list[list[str]] = [[], [], []]
    pi = ni = 0
    for split_idx in range(3):
        assignment[split_idx] += positive[pi: pi + pos_counts[split_idx]]
        pi += pos_counts[split_idx]
        assignment[split_idx] += negative[ni: ni + neg_counts[split_idx]]
        ni += neg_counts[split_idx]

    buckets = []
    for names in assignment:
        members = set(names)
        buckets.append(_canonical([p for g in members for p in groups[g]]))
    k_effective = max(len(ps) for ps in groups.values())
    return SplitBundle(train=buckets[0], val=buckets[1], test=buckets[2],
                       seed=seed, k_effective=k_effective, run_id=run_id)


def make_runs(
    pairs: Sequence[PairExample],
    n_runs: int = 3,
    master_seed: int = 0,
    ratios: tuple[float, float, float] = RATIOS,
) -> list[SplitBundle]:
    """n_runs independent splits with derived seeds master_seed + run index."""
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    return [
        stratified_group_split(pairs, ratios=ratios, seed=master_seed + i, run_id=i)
        for i in range(n_runs)
    ]


def downsample(bundle: SplitBundle, k_new: int, seed: int = 0) -> SplitBundle:
    """Shrink every base patent to k_new pairs, keeping every positive.

    Negatives are drawn without replacement; the draw is deterministic for a
    fixed seed.  An underfilled base patent (fewer than k_new pairs) keeps
    everything it has.
    """
    if k_new > bundle.k_effective:
        raise ValueError(f"k_new={k_new} exceeds k_effective={bundle.k_effective}")
    rng = random.Random(seed)
    out: dict[str, list[PairExample]] = {}
    for name, pairs in bundle.splits().items():
        kept: list[PairExample] = []
        groups = _group_pairs(pairs)
        for base in sorted(groups):
            members = groups[base]
            positives = [p for p in members if p.label == 1]
            negatives = [p for p in members if p.label == 0]
            if len(positives) > k_new:
                raise KTooSmall(
                    f"base {base} has {len(positives)} positives, cannot reduce to k={k_new}"
                )
            needed = k_new - len(positives)
            if needed < len(negatives):
                chosen_idx = sorted(rng.sample(range(len(negatives)), needed))
                chosen = [negatives[i] for i in chosen_idx]
            else:
                chosen = negatives
            selected = {id(p) for p in chosen} | {id(p) for p in positives}
            kept.extend(p for p in members if id(p) in selected)
        out[name] = kept
    return SplitBundle(train=out["train"], val=out["val"], test=out["test"],
                       seed=seed, k_effective=k_new, run_id=bundle.run_id)


# -- run directories ------------------------------------------------------------


def bundle_counts(bundle: SplitBundle) -> dict:
    counts = {}
    for name, pairs in bundle.splits().items():
        groups = _group_pairs(pairs)
        counts[name] = {
            "pairs": len(pairs),
            "groups": len(groups),
            "positive_pairs": sum(p.label for p in pairs),
            "positive_groups": sum(1 for ps in groups.values() if any(p.label for p in ps)),
        }
    return counts


def write_bundle(bundle: SplitBundle, out_dir: str | Path, extra_manifest: dict | None = None) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    for name, pairs in bundle.splits().items():
        write_pairs(pairs, out_dir / f"{name}.csv")
    manifest = {
        "run_id": bundle.run_id,
        "seed": bundle.seed,
        "k_effective": bundle.k_effective,
        "counts": bundle_counts(bundle),
    }
    if extra_manifest:
        manifest.update(extra_manifest)
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    return out_dir


def read_bundle(run_dir: str | Path) -> SplitBundle:
    run_dir = Path(run_dir)
    manifest = json.loads((run_dir / "manifest.json").read_text(encoding="utf-8"))
    return SplitBundle(
        train=read_pairs(run_dir / "train.csv"),
        val=read_pairs(run_dir / "val.csv"),
        test=read_pairs(run_dir / "test.csv"),
        seed=int(manifest["seed"]),
        k_effective=int(manifest["k_effective"]),
        run_id=int(manifest["run_id"]),
    )
