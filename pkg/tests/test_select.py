import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from motifspam.canon import all_motifs
from motifspam.motif import MotifFilter
from motifspam.select import (
    LabeledSample,
    RankedMotifs,
    best_split,
    build_sample,
    entropy,
    information_gain,
    rank_motifs,
    read_ranking,
    select_campaign_motifs,
    select_top,
    union_filter,
    write_ranking,
)

MOTIFS = list(all_motifs())


def population(n_spam, n_reg, n_motifs=4, seed=0):
    rng = np.random.default_rng(seed)
    labels = np.array([1] * n_spam + [0] * n_reg)
    values = rng.normal(size=(len(labels), n_motifs))
    egos = [f"e{i}" for i in range(len(labels))]
    return egos, MOTIFS[:n_motifs], values, labels


def brute_gain(values, labels):
    """Best gain over every threshold between distinct values, by direct counting."""
    def h(ys):
        if not ys:
            return 0.0
        p = sum(ys) / len(ys)
        return 0.0 if p in (0, 1) else -p * math.log2(p) - (1 - p) * math.log2(1 - p)
    base = h(list(labels))
    distinct = sorted(set(values))
    best = 0.0
    for a, b in zip(distinct, distinct[1:]):
        t = (a + b) / 2
        left = [y for x, y in zip(values, labels) if x <= t]
        right = [y for x, y in zip(values, labels) if x > t]
        cond = (len(left) * h(left) + len(right) * h(right)) / len(labels)
        best = max(best, base - cond)
    return best


# --- sampling ---------------------------------------------------------------------

@pytest.mark.parametrize("ratio,n_spam,expected", [((3, 1), 22, (66, 22)),
                                                   ((2, 1), 68, (136, 68)),
                                                   ((5, 1), 5, (25, 5))])
def test_sample_sizes(ratio, n_spam, expected):
    s = build_sample(*population(80, 200), ratio=ratio, n_spam=n_spam, seed=1)
    assert s.counts() == expected


def test_sample_deterministic_and_seed_sensitive():
    pop = population(30, 100)
    a = build_sample(*pop, ratio=(3, 1), n_spam=10, seed=5)
    b = build_sample(*pop, ratio=(3, 1), n_spam=10, seed=5)
    c = build_sample(*pop, ratio=(3, 1), n_spam=10, seed=6)
    assert a.egos == b.egos and np.array_equal(a.values, b.values)
    assert a.egos != c.egos


def test_sample_rows_keep_their_labels():
    egos, motifs, values, labels = population(30, 100)
    s = build_sample(egos, motifs, values, labels, ratio=(2, 1), n_spam=10, seed=0)
    for e, row, y in zip(s.egos, s.values, s.labels):
        i = egos.index(e)
        assert labels[i] == y and np.array_equal(values[i], row)


def test_sample_insufficient_rows_names_class():
    pop = population(5, 10)
    with pytest.raises(ValueError, match="spam"):
        build_sample(*pop, ratio=(1, 1), n_spam=6)
    with pytest.raises(ValueError, match="regular"):
        build_sample(*pop, ratio=(3, 1), n_spam=5)
    with pytest.raises(ValueError):
        build_sample(*pop, ratio=(0, 1), n_spam=1)


# --- information gain ---------------------------------------------------------------

def test_entropy_values():
    assert entropy([0, 0, 1, 1]) == pytest.approx(1.0)
    assert entropy([1, 1]) == 0.0
    assert entropy([]) == 0.0


def test_constant_feature_has_zero_gain():
    assert best_split([2.0] * 6, [0, 0, 1, 1, 1, 1]) == (0.0, None)


def test_separable_feature_gain_equals_entropy():
    labels = [0, 0, 1, 1, 1, 1]
    gain, t = best_split([0.1, 0.2, 0.7, 0.8, 0.9, 1.0], labels)
    assert gain == pytest.approx(0.9182958340544896, abs=1e-12)
    assert t == pytest.approx(0.45)


def test_information_gain_needs_both_classes():
    egos, motifs, values, _ = population(0, 6)
    s = LabeledSample(egos, motifs, values, np.zeros(6))
    with pytest.raises(ValueError):
        information_gain(s, motifs[0])
    with pytest.raises(ValueError):
        rank_motifs(s)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 6), st.integers(0, 1)), min_size=2, max_size=30))
def test_gain_matches_brute_force(rows):
    values = [float(v) for v, _ in rows]
    labels = [y for _, y in rows]
    gain, _ = best_split(values, labels)
    assert gain == pytest.approx(brute_gain(values, labels), abs=1e-12)
    assert 0.0 <= gain <= entropy(labels) + 1e-12


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(-20, 20), st.integers(0, 1)), min_size=2, max_size=30))
def test_gain_invariant_under_monotone_transform(rows):
    values = np.array([v / 4 for v, _ in rows])
    labels = [y for _, y in rows]
    a, _ = best_split(values, labels)
    b, _ = best_split(np.exp(values) * 3 + 1, labels)
    assert a == pytest.approx(b, abs=1e-9)


def test_ranking_order_and_ties():
    labels = np.array([0, 0, 0, 1, 1, 1])
    perfect = [0, 0, 0, 1, 1, 1]
    values = np.array([[0, 0, 0, 0, 0, 0], perfect, [5, 1, 0, 3, 2, 4], perfect], float).T
    ms = [MOTIFS[7], MOTIFS[3], MOTIFS[5], MOTIFS[1]]
    ranked = rank_motifs(LabeledSample([f"e{i}" for i in range(6)], ms, values, labels))
    # both perfect features tie at 1 bit; lower motif id first
    assert ranked.ids()[:2] == [MOTIFS[1], MOTIFS[3]]
    assert ranked.ids()[-1] == MOTIFS[7]
    assert ranked.gain(MOTIFS[1]) == pytest.approx(1.0)


def test_select_top_and_override():
    ranked = RankedMotifs([(m, 1.0 - i / 10) for i, m in enumerate(MOTIFS[:10])])
    assert select_top(ranked, 3) == MotifFilter(frozenset(MOTIFS[:3]))
    assert set(select_top(ranked, 3, manual_override=[MOTIFS[8]])) == {MOTIFS[8]}
    with pytest.raises(ValueError):
        select_top(ranked, 3, manual_override=[MOTIFS[50]])
    with pytest.raises(ValueError):
        select_top(ranked, 0)


def test_union_deduplicates():
    a = MotifFilter(frozenset(MOTIFS[:7]))
    b = MotifFilter(frozenset(MOTIFS[3:10]))
    c = MotifFilter(frozenset(MOTIFS[14:20]))
    assert len(union_filter([a, b, c])) == 16


def test_campaign_selection_modes():
    r1 = RankedMotifs([(m, 1.0) for m in MOTIFS[:12]])
    r2 = RankedMotifs([(m, 1.0) for m in MOTIFS[2:14]])
    r3 = RankedMotifs([(m, 1.0) for m in MOTIFS[20:40]])
    assert len(select_campaign_motifs([r1, r2, r3], 7, distinct=False)) == 7 + 2 + 7
    distinct = select_campaign_motifs([r1, r2, r3], 7)
    assert len(distinct) == 21
    assert set(MOTIFS[7:14]) <= set(distinct)


def test_ranking_roundtrip(tmp_path):
    ranked = RankedMotifs([(m, 1 / (i + 3)) for i, m in enumerate(MOTIFS[:5])])
    write_ranking(ranked, tmp_path / "r.csv")
    assert read_ranking(tmp_path / "r.csv").entries == ranked.entries
