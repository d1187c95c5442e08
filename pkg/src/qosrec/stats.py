"""Statistical analysis of rated sessions.

Contingency tables and chi-square independence tests (p-values kept in the
log10 domain), Pearson correlation, Welch's t-test, High/Low binarization of
the 1-5 ratings, and a Naive Bayes classifier predicting whether the overall
experience is High, swept over a range of class priors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._special import log10_gamma_sf, student_t_sf_two_sided

LOW = "Low"
HIGH = "High"
LEVELS = (LOW, HIGH)

NB_FEATURES = ("qos", "interest", "qor")
DEFAULT_PRIORS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)


def binarize(rating: int) -> str:
    """Collapse a 1-5 rating to Low (<= 3) or High (>= 4)."""
    if not isinstance(rating, (int, np.integer)) or not 1 <= rating <= 5:
        raise ValueError(f"rating must be an integer in 1..5, got {rating!r}")
    return LOW if rating <= 3 else HIGH


@dataclass(frozen=True)
class BinaryFeatures:
    qos: str
    interest: str
    qor: str
    qoe: str

    def __post_init__(self):
        for name in ("qos", "interest", "qor", "qoe"):
            if getattr(self, name) not in LEVELS:
                raise ValueError(f"{name} must be one of {LEVELS}")

    @classmethod
    def from_ratings(cls, qos: int, interest: int, qor: int, qoe: int) -> "BinaryFeatures":
        return cls(binarize(qos), binarize(interest), binarize(qor), binarize(qoe))

    def feature_tuple(self) -> tuple[str, str, str]:
        return (self.qos, self.interest, self.qor)


@dataclass(frozen=True)
class ContingencyTable:
    counts: np.ndarray
    row_labels: tuple = ()
    col_labels: tuple = ()

    def __post_init__(self):
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] < 2 or counts.shape[1] < 2:
            raise ValueError("contingency table must be at least 2x2")
        if np.any(counts < 0):
            raise ValueError("counts must be non-negative")
        object.__setattr__(self, "counts", counts.astype(np.float64))


def contingency_from_pairs(xs, ys, x_categories=None, y_categories=None) -> ContingencyTable:
    """Cross-tabulate two category sequences of equal length."""
    xs, ys = list(xs), list(ys)
    if len(xs) != len(ys):
        raise ValueError("sequences must have equal length")
    x_cats = tuple(x_categories) if x_categories is not None else tuple(sorted(set(xs)))
    y_cats = tuple(y_categories) if y_categories is not None else tuple(sorted(set(ys)))
    x_index = {c: i for i, c in enumerate(x_cats)}
    y_index = {c: i for i, c in enumerate(y_cats)}
    counts = np.zeros((len(x_cats), len(y_cats)))
    for x, y in zip(xs, ys):
        counts[x_index[x], y_index[y]] += 1
    return ContingencyTable(counts=counts, row_labels=x_cats, col_labels=y_cats)


@dataclass(frozen=True)
class ChiSquareResult:
    statistic: float
    dof: int
    log10_p: float

    @property
    def p_value(self) -> float:
        # Underflows to 0.0 for extreme statistics; log10_p stays exact.
        return 10.0 ** self.log10_p


def chi_square(table, yates: bool = False) -> ChiSquareResult:
    """Pearson chi-square test of independence on a contingency table.

    The p-value is the upper tail of the chi-square distribution, computed
    and reported in the log10 domain.  ``yates`` applies the continuity
    correction (only meaningful for 2x2 tables).
    """
    if not isinstance(table, ContingencyTable):
        table = ContingencyTable(counts=np.asarray(table))
    counts = table.counts
    row = counts.sum(axis=1)
    col = counts.sum(axis=0)
    if np.any(row == 0) or np.any(col == 0):
        raise ValueError("zero row or column marginal")
    expected = np.outer(row, col) / counts.sum()
    diff = np.abs(counts - expected)
    if yates:
        diff = np.maximum(diff - 0.5, 0.0)
    statistic = float(np.sum(diff ** 2 / expected))
    dof = (counts.shape[0] - 1) * (counts.shape[1] - 1)
    return ChiSquareResult(statistic=statistic, dof=dof,
                           log10_p=log10_gamma_sf(dof / 2.0, statistic / 2.0))


def pearson_corr(x, y) -> float:
    """Sample Pearson correlation coefficient."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise ValueError("x and y must be equal-length 1-d sequences of length >= 2")
    dx = x - x.mean()
    dy = y - y.mean()
    sx = np.sqrt(np.sum(dx ** 2))
    sy = np.sqrt(np.sum(dy ** 2))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("zero variance input")
    return float(np.clip(np.sum(dx * dy) / (sx * sy), -1.0, 1.0))


@dataclass(frozen=True)
class TTestResult:
    t: float
    dof: float
    p_value: float


def welch_t_test(a, b) -> TTestResult:
    """Welch's unequal-variance t-test with Welch-Satterthwaite dof, two-sided."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if len(a) < 2 or len(b) < 2:
        raise ValueError("both samples need at least 2 observations")
    va = a.var(ddof=1) / len(a)
    vb = b.var(ddof=1) / len(b)
    if va + vb == 0.0:
        raise ValueError("both samples have zero variance")
    t = (a.mean() - b.mean()) / math.sqrt(va + vb)
    dof_num = (va + vb) ** 2
    dof_den = va ** 2 / (len(a) - 1) + vb ** 2 / (len(b) - 1)
    dof = dof_num / dof_den
    return TTestResult(t=float(t), dof=float(dof),
                       p_value=student_t_sf_two_sided(abs(float(t)), float(dof)))


# ---------------------------------------------------------------------------
# Naive Bayes High/Low experience classifier
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NBModel:
    """Conditional probabilities P(feature=High | experience class), plus the
    empirical prior of the High class.  Laplace smoothing keeps every entry
    strictly inside (0, 1)."""

    p_high_given_high: tuple[float, float, float]
    p_high_given_low: tuple[float, float, float]
    prior_high: float

    def __post_init__(self):
        for probs in (self.p_high_given_high, self.p_high_given_low):
            if len(probs) != len(NB_FEATURES):
                raise ValueError(f"need one probability per feature {NB_FEATURES}")
            if any(not 0.0 < p < 1.0 for p in probs):
                raise ValueError("conditional probabilities must be strictly inside (0, 1)")
        if not 0.0 < self.prior_high < 1.0:
            raise ValueError("prior must be strictly inside (0, 1)")


def nb_fit(samples: list[BinaryFeatures]) -> NBModel:
    """Estimate smoothed conditional tables from binarized samples."""
    high = [s for s in samples if s.qoe == HIGH]
    low = [s for s in samples if s.qoe == LOW]
    if not high or not low:
        raise ValueError("samples must cover both experience classes")

    def cpt(group):
        n = len(group)
        return tuple(
            (sum(getattr(s, feat) == HIGH for s in group) + 1.0) / (n + 2.0)
            for feat in NB_FEATURES
        )

    return NBModel(p_high_given_high=cpt(high), p_high_given_low=cpt(low),
                   prior_high=len(high) / len(samples))


def nb_predict(model: NBModel, features: tuple[str, str, str], prior: float | None = None) -> str:
    """Predict the experience class for one binary feature combination.

    Returns High iff prior * prod P(x_i|High) >= (1 - prior) * prod P(x_i|Low);
    computed with log-probabilities, ties go to High.
    """
    if prior is None:
        prior = model.prior_high
    if not 0.0 < prior < 1.0:
        raise ValueError("prior must be strictly inside (0, 1)")
    if len(features) != len(NB_FEATURES) or any(f not in LEVELS for f in features):
        raise ValueError(f"features must be {len(NB_FEATURES)} Low/High levels")

    log_high = math.log(prior)
    log_low = math.log(1.0 - prior)
    for value, ph, pl in zip(features, model.p_high_given_high, model.p_high_given_low):
        if value == HIGH:
            log_high += math.log(ph)
            log_low += math.log(pl)
        else:
            log_high += math.log(1.0 - ph)
            log_low += math.log(1.0 - pl)
    return HIGH if log_high >= log_low else LOW


@dataclass(frozen=True)
class DecisionTable:
    """Predicted class for all 8 feature combinations across a sweep of priors."""

    priors: tuple[float, ...]
    rows: tuple[tuple[tuple[str, str, str], tuple[str, ...]], ...]

    def prediction(self, features: tuple[str, str, str], prior: float) -> str:
        for combo, predictions in self.rows:
            if combo == features:
                return predictions[self.priors.index(prior)]
        raise KeyError(features)


def nb_decision_table(model: NBModel, priors=DEFAULT_PRIORS) -> DecisionTable:
    rows = []
    for combo in itertools.product(LEVELS, repeat=len(NB_FEATURES)):
        predictions = tuple(nb_predict(model, combo, prior) for prior in priors)
        rows.append((combo, predictions))
    return DecisionTable(priors=tuple(priors), rows=tuple(rows))


def nb_cv_accuracy(samples: list[BinaryFeatures], k: int = 5, seed: int = 0) -> float:
    """k-fold cross-validated accuracy (percent) at the training folds' empirical prior."""
    if len(samples) < k:
        raise ValueError("need at least k samples")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(samples))
    folds = np.array_split(order, k)
    correct = 0
    for fold in folds:
        test_idx = set(int(i) for i in fold)
        train = [s for i, s in enumerate(samples) if i not in test_idx]
        model = nb_fit(train)
        for i in test_idx:
            if nb_predict(model, samples[i].feature_tuple()) == samples[i].qoe:
                correct += 1
    return 100.0 * correct / len(samples)


def feature_dependence_tests(samples: list[BinaryFeatures]) -> dict[str, ChiSquareResult]:
    """Chi-square battery over binarized samples.

    Tests each feature against the experience label, features pairwise against
    each other, and each feature pair (as a 4-level joint factor) against the
    label.
    """
    columns = {name: [getattr(s, name) for s in samples] for name in NB_FEATURES}
    qoe = [s.qoe for s in samples]
    results: dict[str, ChiSquareResult] = {}
    for name in NB_FEATURES:
        results[f"{name}_vs_qoe"] = chi_square(contingency_from_pairs(columns[name], qoe))
    for a, b in itertools.combinations(NB_FEATURES, 2):
        results[f"{a}_vs_{b}"] = chi_square(contingency_from_pairs(columns[a], columns[b]))
    for a, b in itertools.combinations(NB_FEATURES, 2):
        joint = [f"{x}/{y}" for x, y in zip(columns[a], columns[b])]
        results[f"{a}+{b}_vs_qoe"] = chi_square(contingency_from_pairs(joint, qoe))
    return results
