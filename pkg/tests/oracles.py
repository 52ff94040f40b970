"""Brute-force reference implementations the metric tests check against.

Each oracle recomputes its metric by a different route than the package
(pair counting instead of rank sums, selection instead of sorting, pairwise
comparison counting instead of sort order) so agreement is meaningful.
"""

from patpairs.metrics import ScoreSet


def auroc_pair_count(points):
    """P(score+ > score-) + 0.5 P(tie) by explicit pair enumeration."""
    pos = [s for l, s in points if l == 1]
    neg = [s for l, s in points if l == 0]
    total = 0.0
    for sp in pos:
        for sn in neg:
            if sp > sn:
                total += 1.0
            elif sp == sn:
                total += 0.5
    return total / (len(pos) * len(neg))


def ap_by_selection(points):
    """Average precision via repeated distinct-threshold selection.

    Scans for the next-highest unprocessed score instead of sorting; tied
    points are consumed together as one threshold group.
    """
    n_pos = sum(1 for l, _ in points if l == 1)
    acc = 0.0
    tp = 0
    fp = 0
    processed: set[float] = set()
    while len(processed) < len({s for _, s in points}):
        threshold = max(s for _, s in points if s not in processed)
        processed.add(threshold)
        g_pos = sum(1 for l, s in points if s == threshold and l == 1)
        g_neg = sum(1 for l, s in points if s == threshold and l == 0)
        tp += g_pos
        fp += g_neg
        if g_pos:
            acc += (g_pos / n_pos) * (tp / (tp + fp))
    return acc


def _entry_key(score, is_placeholder, pub):
    return (-score, 1 if is_placeholder else 0, pub)


def relevant_rank_by_comparison(s: ScoreSet, placeholder_score: float) -> int:
    """Rank of the first relevant element computed without sorting."""
    entries = [( _entry_key(i.score, False, str(i.cand_pub)), i.label) for i in s.items]
    entries.append((_entry_key(placeholder_score, True, ""), 0))
    has_positive = any(lbl == 1 for _, lbl in entries)
    best = None
    for key, lbl in entries:
        relevant = (lbl == 1) if has_positive else key[1] == 1
        if not relevant:
            continue
        rank = 1 + sum(1 for other, _ in entries if other < key)
        if best is None or rank < best:
            best = rank
    assert best is not None
    return best


def mrr_from_sets(sets, placeholder_score):
    ranks = [relevant_rank_by_comparison(s, placeholder_score) for s in sets]
    return sum(1.0 / r for r in ranks) / len(ranks)


def p1_from_sets(sets, placeholder_score):
    ranks = [relevant_rank_by_comparison(s, placeholder_score) for s in sets]
    return sum(1 for r in ranks if r == 1) / len(ranks)
