import random

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from patpairs.records import (
    ApplicationNumber,
    ClaimSet,
    DatasetRow,
    PairExample,
    PatentRecord,
    PublicationNumber,
    Slot,
)
from patpairs.splits import (
    KTooSmall,
    SplitBundle,
    TooFewGroups,
    bundle_counts,
    downsample,
    make_runs,
    read_bundle,
    split_sizes,
    stratified_group_split,
    to_pairwise,
    write_bundle,
)


def pub(i):
    return PublicationNumber("US", str(20200000000 + i), "A1")


def make_row(idx, k=25, n_pos=0, n_null=0):
    base = PatentRecord(
        application_number=ApplicationNumber(str(16000000 + idx)),
        publication_number=pub(idx),
        abstract=f"Abstract {idx}.",
        claims=ClaimSet.from_text(f"1. A base device {idx}."),
    )
    n_neg = k - n_pos - n_null
    slots = [Slot() for _ in range(n_null)]
    slots += [
        Slot(pub=pub(1000 + idx * 100 + i), claims=ClaimSet.from_text(f"1. Neg {idx}-{i}."), label=0)
        for i in range(n_neg)
    ]
    slots += [
        Slot(pub=pub(5000 + idx * 100 + i), claims=ClaimSet.from_text(f"1. Pos {idx}-{i}."), label=1)
        for i in range(n_pos)
    ]
    return DatasetRow(
        base=base, k=k, slots=slots,
        rejection_texts=[f"rejection {idx}-{i}" for i in range(n_pos)],
        underfilled=n_null > 0,
    )


def synthetic_pairs(n_groups, k=25, positive_every=3, seed=0):
    rng = random.Random(seed)
    rows = []
    for i in range(n_groups):
        n_pos = rng.choice([1, 2]) if i % positive_every == 0 else 0
        rows.append(make_row(i, k=k, n_pos=n_pos))
    return to_pairwise(rows)


def test_full_row_yields_k_pairs():
    row = make_row(0, k=25, n_pos=1)
    pairs = to_pairwise([row])
    assert len(pairs) == 25
    assert sum(p.label for p in pairs) == 1
    assert all(p.claims_x == row.base.claims for p in pairs)


def test_null_slots_skipped():
    pairs = to_pairwise([make_row(0, k=25, n_pos=0, n_null=3)])
    assert len(pairs) == 22


def test_pair_count_equals_nonnull_slots():
    rows = [make_row(i, k=10, n_pos=i % 2, n_null=i % 3) for i in range(12)]
    pairs = to_pairwise(rows)
    expected = sum(sum(1 for s in r.slots if not s.is_null()) for r in rows)
    assert len(pairs) == expected
    assert sum(p.label for p in pairs) == sum(r.positive_count() for r in rows)


def test_split_sizes_on_1045():
    assert split_sizes(1045, (0.8, 0.1, 0.1)) == (836, 104, 105)


def group_sets(bundle):
    return [
        {str(p.base_pub) for p in pairs}
        for pairs in (bundle.train, bundle.val, bundle.test)
    ]


def test_split_group_integrity_and_counts():
    pairs = synthetic_pairs(20, k=5)
    bundle = stratified_group_split(pairs, seed=3)
    train_g, val_g, test_g = group_sets(bundle)
    assert not train_g & val_g and not train_g & test_g and not val_g & test_g
    assert (len(train_g), len(val_g), len(test_g)) == (16, 2, 2)
    assert len(bundle.train) + len(bundle.val) + len(bundle.test) == len(pairs)


def test_split_deterministic_and_input_order_independent():
    pairs = synthetic_pairs(15, k=4)
    a = stratified_group_split(pairs, seed=9)
    shuffled = list(pairs)
    random.Random(4).shuffle(shuffled)
    b = stratified_group_split(shuffled, seed=9)
    assert a == b
    c = stratified_group_split(pairs, seed=10)
    assert group_sets(a) != group_sets(c)


def test_stratification_quota_small_case():
    # 10 groups, 4 positive-containing: quota rounding forces 3/1/0 or 3/0/1
    rows = [make_row(i, k=4, n_pos=1 if i < 4 else 0) for i in range(10)]
    pairs = to_pairwise(rows)
    for seed in range(10):
        bundle = stratified_group_split(pairs, seed=seed)
        counts = bundle_counts(bundle)
        sizes = (counts["train"]["groups"], counts["val"]["groups"], counts["test"]["groups"])
        assert sizes == (8, 1, 1)
        pos = [counts[n]["positive_groups"] for n in ("train", "val", "test")]
        ideal = [4 * s / 10 for s in sizes]
        assert sum(pos) == 4
        for got, want in zip(pos, ideal):
            assert int(want) <= got <= int(want) + 1


def test_too_few_groups():
    pairs = synthetic_pairs(5, k=3)
    with pytest.raises(TooFewGroups):
        stratified_group_split(pairs, seed=0)  # floor(0.1*5) == 0


def test_make_runs_distinct_and_reproducible():
    pairs = synthetic_pairs(30, k=4)
    runs = make_runs(pairs, n_runs=3, master_seed=7)
    assert [b.run_id for b in runs] == [0, 1, 2]
    assignments = [tuple(sorted(map(tuple, map(sorted, group_sets(b))))) for b in runs]
    assert len(set(assignments)) == 3
    again = make_runs(pairs, n_runs=3, master_seed=7)
    assert runs == again


def test_make_runs_single_equals_plain_split():
    pairs = synthetic_pairs(30, k=4)
    [only] = make_runs(pairs, n_runs=1, master_seed=5)
    assert only == stratified_group_split(pairs, seed=5, run_id=0)


def test_downsample_keeps_positives():
    rows = [make_row(i, k=25, n_pos=2 if i == 0 else (1 if i % 3 == 0 else 0)) for i in range(12)]
    bundle = stratified_group_split(to_pairwise(rows), seed=1)
    for k_new in (10, 5):
        small = downsample(bundle, k_new, seed=2)
        for name, pairs in small.splits().items():
            by_base = {}
            for p in pairs:
                by_base.setdefault(str(p.base_pub), []).append(p)
            for base, members in by_base.items():
                assert len(members) == k_new
            assert sum(p.label for p in pairs) == sum(
                p.label for p in bundle.splits()[name]
            )
        bundle = small  # chain 25 -> 10 -> 5


def test_downsample_zero_positive_group():
    rows = [make_row(i, k=25, n_pos=0) for i in range(10)]
    bundle = stratified_group_split(to_pairwise(rows), seed=1)
    small = downsample(bundle, 10, seed=3)
    for pairs in small.splits().values():
        by_base = {}
        for p in pairs:
            by_base.setdefault(str(p.base_pub), []).append(p)
        assert all(len(m) == 10 for m in by_base.values())


def test_downsample_k_too_small():
    rows = [make_row(i, k=25, n_pos=2 if i % 2 == 0 else 0) for i in range(10)]
    bundle = stratified_group_split(to_pairwise(rows), seed=1)
    with pytest.raises(KTooSmall):
        downsample(bundle, 1, seed=0)


def test_downsample_deterministic():
    bundle = stratified_group_split(synthetic_pairs(12, k=12), seed=4)
    assert downsample(bundle, 5, seed=8) == downsample(bundle, 5, seed=8)


def test_bundle_write_read_roundtrip(tmp_path):
    bundle = stratified_group_split(synthetic_pairs(12, k=6), seed=4)
    out = write_bundle(bundle, tmp_path / "run_0")
    back = read_bundle(out)
    assert back == bundle
    manifest = (out / "manifest.json").read_text()
    assert '"seed": 4' in manifest


def test_bundle_write_byte_stable(tmp_path):
    pairs = synthetic_pairs(12, k=6)
    for name in ("a", "b"):
        write_bundle(stratified_group_split(pairs, seed=4), tmp_path / name)
    for f in ("train.csv", "val.csv", "test.csv", "manifest.json"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


@settings(max_examples=30, deadline=None)
@given(
    n_groups=st.integers(min_value=10, max_value=40),
    pos_rate=st.integers(min_value=2, max_value=5),
    seed=st.integers(min_value=0, max_value=999),
)
def test_split_properties_randomized(n_groups, pos_rate, seed):
    pairs = synthetic_pairs(n_groups, k=4, positive_every=pos_rate, seed=seed)
    bundle = stratified_group_split(pairs, seed=seed)
    train_g, val_g, test_g = group_sets(bundle)
    # zero leakage
    assert not train_g & val_g and not train_g & test_g and not val_g & test_g
    # floor/floor/remainder sizes
    n = len(train_g) + len(val_g) + len(test_g)
    assert (len(train_g), len(val_g), len(test_g)) == split_sizes(n, (0.8, 0.1, 0.1))
    # label multiset preserved
    assert sum(p.label for ps in bundle.splits().values() for p in ps) == sum(
        p.label for p in pairs
    )
    # quota rounding on positive groups
    counts = bundle_counts(bundle)
    total_pos = sum(counts[s]["positive_groups"] for s in ("train", "val", "test"))
    for name in ("train", "val", "test"):
        size = counts[name]["groups"]
        ideal = total_pos * size / n
        assert int(ideal) <= counts[name]["positive_groups"] <= int(ideal) + 1
