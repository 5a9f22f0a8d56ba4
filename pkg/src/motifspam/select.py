"""Labeled samples and information-gain ranking of motifs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .canon import MotifId
from .motif import MotifFilter

SPAM = 1
REGULAR = 0


@dataclass
class LabeledSample:
    egos: list[str]
    motifs: list[MotifId]
    values: np.ndarray  # rows x motifs (normalized ratio values)
    labels: np.ndarray  # 1 = spam, 0 = regular
    ratio: tuple[int, int] | None = None
    seed: int | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.labels = np.asarray(self.labels, dtype=int)
        if self.values.shape != (len(self.egos), len(self.motifs)):
            raise ValueError("values shape does not match egos x motifs")
        if self.labels.shape != (len(self.egos),):
            raise ValueError("one label per row is required")

    def counts(self) -> tuple[int, int]:
        """(regular, spam) row counts."""
        n_spam = int(self.labels.sum())
        return len(self.labels) - n_spam, n_spam


@dataclass
class RankedMotifs:
    entries: list[tuple[MotifId, float]]

    def ids(self) -> list[MotifId]:
        return [m for m, _ in self.entries]

    def gain(self, m: MotifId) -> float:
        return dict(self.entries)[m]


def build_sample(egos, motifs, values, labels, ratio: tuple[int, int], n_spam: int,
                 seed: int = 0) -> LabeledSample:
    """Draw ``n_spam`` spam rows and ``n_spam * regular/spam`` regular rows.

    Rows are drawn uniformly without replacement; the result keeps the
    population's row order.
    """
    reg_part, spam_part = ratio
    if reg_part < 1 or spam_part < 1:
        raise ValueError("ratio parts must be positive")
    if n_spam < 1:
        raise ValueError("n_spam must be >= 1")
    n_regular = round(n_spam * reg_part / spam_part)
    labels = np.asarray(labels, dtype=int)
    spam_idx = np.nonzero(labels == SPAM)[0]
    reg_idx = np.nonzero(labels == REGULAR)[0]
    if len(spam_idx) < n_spam:
        raise ValueError(f"not enough spam rows: need {n_spam}, have {len(spam_idx)}")
    if len(reg_idx) < n_regular:
        raise ValueError(f"not enough regular rows: need {n_regular}, have {len(reg_idx)}")
    rng = np.random.default_rng(seed)
    chosen = np.sort(np.concatenate([
        rng.choice(spam_idx, size=n_spam, replace=False),
        rng.choice(reg_idx, size=n_regular, replace=False),
    ]))
    values = np.asarray(values, dtype=float)
    return LabeledSample([egos[i] for i in chosen], list(motifs), values[chosen],
                         labels[chosen], tuple(ratio), seed)


def entropy(labels) -> float:
    """Binary label entropy in bits."""
    labels = np.asarray(labels)
    if labels.size == 0:
        return 0.0
    p = labels.mean()
    if p <= 0 or p >= 1:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def best_split(values, labels) -> tuple[float, float | None]:
    """(gain, threshold) of the best ``value <= t`` split; thresholds are midpoints."""
    values = np.asarray(values, dtype=float)
    labels = np.asarray(labels, dtype=int)
    order = np.argsort(values, kind="stable")
    v = values[order]
    y = labels[order]
    n = len(y)
    base = entropy(y)
    # candidate cut after position i (left = 0..i) where the value changes
    cut = np.nonzero(v[1:] > v[:-1])[0]
    if cut.size == 0:
        return 0.0, None
    left_n = cut + 1
    left_pos = np.cumsum(y)[cut]
    right_n = n - left_n
    right_pos = y.sum() - left_pos

    def h(pos, tot):
        p = pos / tot
        with np.errstate(divide="ignore", invalid="ignore"):
            out = -p * np.log2(p) - (1 - p) * np.log2(1 - p)
        return np.nan_to_num(out)

    cond = (left_n * h(left_pos, left_n) + right_n * h(right_pos, right_n)) / n
    best = int(np.argmin(cond))
    gain = max(base - float(cond[best]), 0.0)
    return gain, float((v[cut[best]] + v[cut[best] + 1]) / 2)


def information_gain(sample: LabeledSample, motif: MotifId) -> float:
    if len(sample.labels) == 0:
        raise ValueError("empty sample")
    if len(set(sample.labels.tolist())) < 2:
        raise ValueError("information gain needs both classes in the sample")
    col = sample.motifs.index(motif)
    return best_split(sample.values[:, col], sample.labels)[0]


def rank_motifs(sample: LabeledSample) -> RankedMotifs:
    if len(set(sample.labels.tolist())) < 2:
        raise ValueError("information gain needs both classes in the sample")
    gains = [(m, best_split(sample.values[:, j], sample.labels)[0])
             for j, m in enumerate(sample.motifs)]
    # round away float noise so equal splits tie and fall back to id order
    gains.sort(key=lambda mg: (-round(mg[1], 12), mg[0]))
    return RankedMotifs(gains)


def select_top(ranked: RankedMotifs, k: int = 7, manual_override=None) -> MotifFilter:
    """Filter of the top-``k`` motifs, or of the hand-picked ``manual_override`` ids."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if manual_override is not None:
        known = set(ranked.ids())
        missing = [m for m in manual_override if m not in known]
        if missing:
            raise ValueError(f"override motifs not in ranking: {', '.join(map(str, missing))}")
        return MotifFilter(frozenset(manual_override))
    return MotifFilter(frozenset(ranked.ids()[:k]))


def union_filter(selections) -> MotifFilter:
    """Deduplicated union of per-campaign selections."""
    allowed = set()
    for sel in selections:
        allowed.update(sel)
    return MotifFilter(frozenset(allowed))


def select_campaign_motifs(rankings, k: int = 7, distinct: bool = True) -> MotifFilter:
    """Combine per-campaign rankings into one filter.

    With ``distinct`` each campaign contributes its ``k`` best motifs not
    already taken by an earlier campaign, so ``n`` campaigns give ``n * k``
    motifs when the rankings are long enough; otherwise the plain union of
    the per-campaign top-``k`` is returned.
    """
    if not distinct:
        return union_filter(select_top(r, k) for r in rankings)
    chosen: list[MotifId] = []
    for r in rankings:
        fresh = [m for m in r.ids() if m not in chosen]
        chosen.extend(fresh[:k])
    return MotifFilter(frozenset(chosen))


def write_ranking(ranked: RankedMotifs, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("motif_id,gain,rank\n")
        for rank, (m, g) in enumerate(ranked.entries, start=1):
            fh.write(f"{m},{g:.17g},{rank}\n")


def read_ranking(path) -> RankedMotifs:
    with open(path, encoding="utf-8") as fh:
        if fh.readline().strip() != "motif_id,gain,rank":
            raise ValueError(f"{path}: expected header 'motif_id,gain,rank'")
        rows = [line.strip().split(",") for line in fh if line.strip()]
    rows.sort(key=lambda r: int(r[2]))
    return RankedMotifs([(MotifId.parse(m), float(g)) for m, g, _ in rows])
