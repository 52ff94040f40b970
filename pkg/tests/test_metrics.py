import random

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from oracles import (
    ap_by_selection,
    auroc_pair_count,
    mrr_from_sets,
    p1_from_sets,
    relevant_rank_by_comparison,
)
from patpairs.metrics import (
    DegenerateClasses,
    MetricsReport,
    ScoreSet,
    ScoredItem,
    auroc,
    average_precision,
    evaluate,
    evaluate_run,
    format_table,
    join_scores,
    mrr,
    p_at_1,
    rank_with_placeholder,
    set_label,
    set_score,
)
from patpairs.records import (
    ClaimSet,
    PairExample,
    PublicationNumber,
    SchemaError,
)


def pub(i):
    return PublicationNumber("US", str(9000000 + i))


def make_set(scores_labels, base=0):
    return ScoreSet(
        base_pub=pub(990000 + base),
        items=tuple(ScoredItem(cand_pub=pub(i), score=s, label=l)
                    for i, (s, l) in enumerate(scores_labels)),
    )


def random_set(rng, base, n=None):
    n = n or rng.randint(1, 8)
    grid = [i / 10 for i in range(11)]  # coarse grid forces ties
    return make_set([(rng.choice(grid), rng.randint(0, 1)) for _ in range(n)], base=base)


def test_set_label_is_or():
    assert set_label(make_set([(0.2, 0), (0.3, 0)])) == 0
    assert set_label(make_set([(0.2, 0), (0.3, 1)])) == 1


def test_set_score_is_max():
    assert set_score(make_set([(0.2, 0), (0.7, 1), (0.4, 0)])) == 0.7


def test_set_reductions_match_fold_oracle():
    rng = random.Random(7)
    for base in range(200):
        s = random_set(rng, base)
        lbl = 0
        mx = 0.0
        for item in s.items:
            lbl = lbl or item.label
            mx = mx if mx >= item.score else item.score
        assert set_label(s) == lbl
        assert set_score(s) == mx


def test_auroc_perfect_separation():
    assert auroc([(1, 0.9), (0, 0.1)]) == 1.0


def test_auroc_all_ties():
    assert auroc([(1, 0.5), (0, 0.5)]) == 0.5


def test_auroc_requires_both_classes():
    with pytest.raises(DegenerateClasses):
        auroc([(1, 0.5), (1, 0.2)])


def test_auroc_matches_pair_count_oracle():
    rng = random.Random(11)
    for _ in range(300):
        n = rng.randint(2, 8)
        points = [(rng.randint(0, 1), rng.choice([0.0, 0.25, 0.5, 0.75, 1.0])) for _ in range(n)]
        if not any(l for l, _ in points) or all(l for l, _ in points):
            continue
        assert auroc(points) == pytest.approx(auroc_pair_count(points), abs=1e-12)


def test_ap_single_positive_first_and_second():
    assert average_precision([(1, 0.9), (0, 0.1)]) == 1.0
    assert average_precision([(1, 0.1), (0, 0.9)]) == 0.5


def test_ap_matches_selection_oracle():
    rng = random.Random(13)
    for _ in range(300):
        n = rng.randint(1, 8)
        points = [(rng.randint(0, 1), rng.choice([0.0, 0.5, 1.0])) for _ in range(n)]
        if not any(l for l, _ in points):
            continue
        assert average_precision(points) == pytest.approx(ap_by_selection(points), abs=1e-12)


def test_positive_above_placeholder_ranks_first():
    s = make_set([(0.95, 1), (0.2, 0), (0.1, 0)])
    assert rank_with_placeholder(s).relevant_rank == 1


def test_placeholder_wins_positive_free_set():
    s = make_set([(0.3, 0), (0.2, 0)])
    ranked = rank_with_placeholder(s)
    assert ranked.relevant_rank == 1
    assert ranked.ordering[0].is_placeholder


def test_low_positive_falls_below_placeholder():
    s = make_set([(0.8, 1), (0.95, 0)])
    ranked = rank_with_placeholder(s)
    labels = [(e.is_placeholder, e.label) for e in ranked.ordering]
    assert labels == [(False, 0), (True, 0), (False, 1)]
    assert ranked.relevant_rank == 3


def test_tie_with_placeholder_puts_real_item_first():
    s = make_set([(0.9, 1)])
    ranked = rank_with_placeholder(s)
    assert not ranked.ordering[0].is_placeholder
    assert ranked.relevant_rank == 1


def test_mrr_and_p1_definitions():
    sets = [make_set([(1.0, 1)]), make_set([(0.99, 1)]), make_set([(0.5, 1), (0.6, 0)])]
    ranked = [rank_with_placeholder(s) for s in sets]
    assert [r.relevant_rank for r in ranked] == [1, 1, 3]
    assert mrr(ranked) == pytest.approx((1 + 1 + 1 / 3) / 3)
    assert p_at_1(ranked) == pytest.approx(2 / 3)


def test_rank_matches_comparison_oracle():
    rng = random.Random(17)
    for base in range(400):
        s = random_set(rng, base)
        got = rank_with_placeholder(s).relevant_rank
        want = relevant_rank_by_comparison(s, 0.9)
        assert got == want


def test_evaluate_identical_runs_mean_equals_single():
    sets = [make_set([(0.9, 1), (0.1, 0)], base=1), make_set([(0.2, 0)], base=2)]
    single = evaluate([sets])
    triple = evaluate([sets, sets, sets])
    assert triple.auroc == single.auroc
    assert triple.mrr == single.mrr
    assert len(triple.per_run) == 3


def test_evaluate_means_two_runs():
    run_a = [make_set([(1.0, 1)], base=1), make_set([(0.2, 0)], base=2)]
    run_b = [make_set([(0.5, 1), (0.6, 0)], base=3), make_set([(0.2, 0)], base=4)]
    report = evaluate([run_a, run_b])
    assert report.mrr == pytest.approx((report.per_run[0].mrr + report.per_run[1].mrr) / 2)


def test_metrics_permutation_invariant():
    rng = random.Random(23)
    sets = [random_set(rng, b) for b in range(12)]
    if not any(set_label(s) for s in sets):
        sets[0] = make_set([(0.7, 1)], base=99)
    if all(set_label(s) for s in sets):
        sets[1] = make_set([(0.7, 0)], base=98)
    forward = evaluate_run(sets)
    shuffled = list(sets)
    rng.shuffle(shuffled)
    backward = evaluate_run(shuffled)
    assert forward.auroc == pytest.approx(backward.auroc, abs=1e-12)
    assert forward.mrr == pytest.approx(backward.mrr, abs=1e-12)
    assert forward.p_at_1 == pytest.approx(backward.p_at_1, abs=1e-12)
    assert forward.ap == pytest.approx(backward.ap, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(
    scores=st.lists(st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0]), min_size=3, max_size=8),
    labels=st.lists(st.booleans(), min_size=3, max_size=8),
    pos_idx=st.integers(min_value=0, max_value=7),
    bump=st.sampled_from([0.1, 0.25, 0.5]),
)
def test_raising_positive_set_score_never_hurts_auroc(scores, labels, pos_idx, bump):
    n = min(len(scores), len(labels))
    points = [(int(labels[i]), scores[i]) for i in range(n)]
    positives = [i for i, (l, _) in enumerate(points) if l == 1]
    if not positives or len(positives) == n:
        return
    pos_idx = positives[pos_idx % len(positives)]
    before = auroc(points)
    raised = list(points)
    raised[pos_idx] = (1, min(1.0, points[pos_idx][1] + bump))
    assert auroc(raised) >= before - 1e-12


@settings(max_examples=60, deadline=None)
@given(
    scores=st.lists(st.sampled_from([0.0, 0.2, 0.4, 0.6, 0.8, 1.0]), min_size=2, max_size=6),
    pos_idx=st.integers(min_value=0, max_value=5),
    bump=st.sampled_from([0.1, 0.2, 0.3]),
)
def test_raising_relevant_score_never_hurts_rank(scores, pos_idx, bump):
    pos_idx %= len(scores)
    items = [(s, 1 if i == pos_idx else 0) for i, s in enumerate(scores)]
    before = rank_with_placeholder(make_set(items))
    raised = list(items)
    raised[pos_idx] = (min(1.0, scores[pos_idx] + bump), 1)
    after = rank_with_placeholder(make_set(raised))
    assert after.relevant_rank <= before.relevant_rank


def test_oracle_scorer_is_perfect():
    rng = random.Random(29)
    sets = []
    for b in range(20):
        n = rng.randint(1, 6)
        labels = [rng.random() < 0.2 for _ in range(n)]
        sets.append(make_set([(1.0 if l else 0.0, int(l)) for l in labels], base=b))
    if not any(set_label(s) for s in sets):
        sets[0] = make_set([(1.0, 1)], base=77)
    if all(set_label(s) for s in sets):
        sets[1] = make_set([(0.0, 0)], base=76)
    report = evaluate([sets])
    assert report.auroc == report.ap == report.mrr == report.p_at_1 == 1.0


# -- score joining -------------------------------------------------------------


def make_pairs():
    cx = ClaimSet.from_text("1. A base claim.")
    cy = ClaimSet.from_text("1. A candidate claim.")
    return [
        PairExample(base_pub=pub(1), cand_pub=pub(10), claims_x=cx, claims_y=cy, label=0),
        PairExample(base_pub=pub(1), cand_pub=pub(11), claims_x=cx, claims_y=cy, label=1),
        PairExample(base_pub=pub(2), cand_pub=pub(12), claims_x=cx, claims_y=cy, label=0),
    ]


def score_key(p):
    return (str(p.base_pub), str(p.cand_pub))


def test_join_groups_by_base():
    pairs = make_pairs()
    scores = {score_key(p): 0.5 for p in pairs}
    sets = join_scores(pairs, scores)
    assert [str(s.base_pub) for s in sets] == ["US9000001", "US9000002"]
    assert len(sets[0].items) == 2


def test_join_rejects_missing_and_extra():
    pairs = make_pairs()
    scores = {score_key(p): 0.5 for p in pairs[:-1]}
    with pytest.raises(SchemaError):
        join_scores(pairs, scores)
    scores = {score_key(p): 0.5 for p in pairs}
    scores[("US9999999", "US9999998")] = 0.1
    with pytest.raises(SchemaError):
        join_scores(pairs, scores)


def test_format_table_alignment():
    sets = [make_set([(0.9, 1)], base=1), make_set([(0.1, 0)], base=2)]
    text = format_table(evaluate([sets]))
    lines = text.splitlines()
    assert lines[0].split() == ["run", "AUROC", "AP", "MRR", "P@1", "sets"]
    assert lines[-1].startswith("mean")
