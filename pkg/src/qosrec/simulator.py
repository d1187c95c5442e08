"""User-session simulation: position-bias clicks, ratings, and abandonment.

A session starts from a trending video, walks the recommendation lists for up
to five steps, and rates every watched video on four 1-5 scales (interest,
QoS, recommendation quality, overall experience).  All randomness flows from
one seed per session, so runs are exactly reproducible and sessions can be
simulated in parallel without changing the output.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .catalog import CacheSet, RelatedGraph
from .recommender import RecommendationEngine, RecommendationList

MAX_STEPS = 5
INITIAL_CANDIDATES = 20

ACTION_SELECTED = "selected"
ACTION_ABANDONED = "abandoned"
ACTION_SESSION_END = "session_end"


def _sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + np.exp(-z))
    e = np.exp(z)
    return e / (1.0 + e)


@dataclass(frozen=True)
class ClickModel:
    """Probability of clicking list position i: uniform, or ~ i**-exponent (Zipf)."""

    kind: str = "zipf"
    exponent: float = 0.78

    def __post_init__(self):
        if self.kind not in ("uniform", "zipf"):
            raise ValueError(f"unknown click model kind {self.kind!r}")
        if self.kind == "zipf" and self.exponent < 0:
            raise ValueError("zipf exponent must be non-negative")


def click_probabilities(model: ClickModel, list_len: int) -> np.ndarray:
    """Click probability per position 1..list_len; sums to 1."""
    if list_len < 1:
        raise ValueError("list_len must be >= 1")
    if model.kind == "uniform":
        return np.full(list_len, 1.0 / list_len)
    ranks = np.arange(1, list_len + 1, dtype=np.float64)
    weights = ranks ** (-model.exponent)
    return weights / weights.sum()


@lru_cache(maxsize=64)
def _click_cumulative(model: ClickModel, list_len: int) -> np.ndarray:
    return np.cumsum(click_probabilities(model, list_len))


def _sample_index(cumulative: np.ndarray, rng: np.random.Generator) -> int:
    # Inverse-CDF draw; clip guards the u ~= 1 edge after rounding.
    idx = int(np.searchsorted(cumulative, rng.random(), side="right"))
    return min(idx, len(cumulative) - 1)


def _check_distribution(probs, name):
    arr = np.asarray(probs, dtype=np.float64)
    if arr.shape != (5,) or np.any(arr < 0) or abs(arr.sum() - 1.0) > 1e-9:
        raise ValueError(f"{name} must be 5 non-negative probabilities summing to 1")
    return tuple(float(p) for p in arr)


# Defaults match the observed rating behaviour of the two QoS classes:
# QoS means 4.30 (high) and 1.87 (low); interest barely differs by class.
DEFAULT_QOS_HIGH = (0.02, 0.04, 0.10, 0.30, 0.54)
DEFAULT_QOS_LOW = (0.50, 0.25, 0.15, 0.08, 0.02)
DEFAULT_INTEREST_HIGH = (0.13, 0.12, 0.18, 0.23, 0.34)
DEFAULT_INTEREST_LOW = (0.08, 0.16, 0.19, 0.30, 0.27)


@dataclass(frozen=True)
class QoeRule:
    """Ground-truth experience generator.

    Latent score s = w1*qos + w2*interest + w3*min(qos, interest) plus
    logistic noise, discretised by fixed thresholds into a 1-5 label.  The
    defaults use the weight profile where the minimum term dominates.
    """

    weights: tuple[float, float, float] = (0.17, 0.30, 0.53)
    noise_scale: float = 0.45
    thresholds: tuple[float, float, float, float] = (1.5, 2.5, 3.5, 4.5)

    def __post_init__(self):
        if self.noise_scale <= 0:
            raise ValueError("noise_scale must be positive")
        if list(self.thresholds) != sorted(self.thresholds):
            raise ValueError("thresholds must be increasing")

    def latent(self, qos: int, interest: int) -> float:
        w1, w2, w3 = self.weights
        return w1 * qos + w2 * interest + w3 * min(qos, interest)

    def sample(self, qos: int, interest: int, rng: np.random.Generator) -> int:
        s = self.latent(qos, interest) + rng.logistic(0.0, self.noise_scale)
        return 1 + int(sum(s > t for t in self.thresholds))


@dataclass(frozen=True)
class RatingModel:
    """Per-step rating distributions, conditioned on the watched video's QoS class."""

    interest_dist_high: tuple = DEFAULT_INTEREST_HIGH
    interest_dist_low: tuple = DEFAULT_INTEREST_LOW
    qos_dist_high: tuple = DEFAULT_QOS_HIGH
    qos_dist_low: tuple = DEFAULT_QOS_LOW
    # Mean recommendation-quality rating drifts linearly with the fraction of
    # high-QoS items in the shown list (3.6 for none nudged, 3.4 for all).
    qor_mean_plain: float = 3.6
    qor_mean_nudged: float = 3.4
    qoe: QoeRule = field(default_factory=QoeRule)

    def __post_init__(self):
        for name in ("interest_dist_high", "interest_dist_low", "qos_dist_high", "qos_dist_low"):
            object.__setattr__(self, name, _check_distribution(getattr(self, name), name))
        for mean in (self.qor_mean_plain, self.qor_mean_nudged):
            if not 1.0 <= mean <= 5.0:
                raise ValueError("qor means must lie in [1, 5]")
        cumulatives = {
            name: np.cumsum(getattr(self, name))
            for name in ("interest_dist_high", "interest_dist_low", "qos_dist_high", "qos_dist_low")
        }
        object.__setattr__(self, "_cumulatives", cumulatives)
        object.__setattr__(self, "_qor_cumulatives", {})

    def qor_distribution(self, high_qos_fraction: float) -> np.ndarray:
        """Rating distribution for a list where ``high_qos_fraction`` of items are high-QoS.

        Shifted-binomial construction: 1 + Binomial(4, p) hits the target mean
        exactly and always stays on the 1..5 scale.
        """
        mean = self.qor_mean_plain + (self.qor_mean_nudged - self.qor_mean_plain) * high_qos_fraction
        p = (mean - 1.0) / 4.0
        k = np.arange(5)
        comb = np.array([1.0, 4.0, 6.0, 4.0, 1.0])
        return comb * p ** k * (1.0 - p) ** (4 - k)

    def sample_step(self, watched_high_qos: bool, high_qos_fraction: float,
                    rng: np.random.Generator) -> tuple[int, int, int, int]:
        """Draw (interest, qos, qor, qoe) for one watched video."""
        suffix = "high" if watched_high_qos else "low"
        qos = 1 + _sample_index(self._cumulatives[f"qos_dist_{suffix}"], rng)
        interest = 1 + _sample_index(self._cumulatives[f"interest_dist_{suffix}"], rng)
        qor_cum = self._qor_cumulatives.get(high_qos_fraction)
        if qor_cum is None:
            qor_cum = np.cumsum(self.qor_distribution(high_qos_fraction))
            self._qor_cumulatives[high_qos_fraction] = qor_cum
        qor = 1 + _sample_index(qor_cum, rng)
        qoe = self.qoe.sample(qos, interest, rng)
        return interest, qos, qor, qoe


@dataclass(frozen=True)
class AbandonModel:
    """Logistic probability of quitting after a step, driven by interest and QoS.

    ``base_rate`` is the abandonment probability at neutral ratings (3, 3);
    negative coefficients make low ratings push users out.  The defaults are
    calibrated so the mean interest/QoS ratings of abandoned steps fall about
    10-15% below the overall mean.
    """

    base_rate: float = 0.07
    interest_coef: float = -0.55
    qos_coef: float = -0.30

    def __post_init__(self):
        if not 0.0 <= self.base_rate <= 1.0:
            raise ValueError("base_rate must be a probability")
        if 0.0 < self.base_rate < 1.0:
            object.__setattr__(self, "_base_logit", float(np.log(self.base_rate / (1.0 - self.base_rate))))

    def probability(self, interest: int, qos: int) -> float:
        if self.base_rate == 0.0 or self.base_rate == 1.0:
            return self.base_rate
        z = self._base_logit + self.interest_coef * (interest - 3) + self.qos_coef * (qos - 3)
        return _sigmoid(z)


@dataclass(frozen=True)
class SessionStep:
    step_index: int
    watched: int
    watched_high_qos: bool
    recs: RecommendationList
    interest: int
    qos: int
    qor: int
    qoe: int
    action: str
    selected_position: int | None = None

    def __post_init__(self):
        for name in ("interest", "qos", "qor", "qoe"):
            value = getattr(self, name)
            if not 1 <= value <= 5:
                raise ValueError(f"{name} rating {value} out of range 1..5")
        if self.action == ACTION_SELECTED:
            if self.selected_position is None or not 1 <= self.selected_position <= len(self.recs):
                raise ValueError("selected_position must index the recommendation list")
        elif self.action in (ACTION_ABANDONED, ACTION_SESSION_END):
            if self.selected_position is not None:
                raise ValueError(f"{self.action} step cannot carry a selected position")
        else:
            raise ValueError(f"unknown action {self.action!r}")

    @property
    def selected_id(self) -> int | None:
        if self.selected_position is None:
            return None
        return self.recs.items[self.selected_position - 1].id


@dataclass(frozen=True)
class Session:
    session_id: str
    region_label: str
    steps: tuple[SessionStep, ...]

    def __post_init__(self):
        if not 1 <= len(self.steps) <= MAX_STEPS:
            raise ValueError(f"sessions have 1..{MAX_STEPS} steps")
        for idx, step in enumerate(self.steps, start=1):
            if step.step_index != idx:
                raise ValueError("step indices must be contiguous from 1")
            if idx < len(self.steps) and step.selected_id != self.steps[idx].watched:
                raise ValueError("each step must watch the id selected at the previous step")


def child_seed(master_seed: int, index: int) -> tuple[int, int]:
    """Per-session seed material derived from the experiment master seed."""
    return (master_seed, index)


def run_session(graph: RelatedGraph, cache: CacheSet, trending: list[int],
                recommender_kind: str, click: ClickModel, ratings: RatingModel,
                abandon: AbandonModel, seed, *, session_id: str = "s000000",
                region_label: str = "synthetic", engine: RecommendationEngine | None = None,
                placement: str = "top", exclude_history: bool = False) -> Session:
    """Simulate one viewing session; fully deterministic given ``seed``.

    The first video is picked uniformly from a random 20-candidate slice of
    the trending list.  Each step draws ratings, then (before the last
    possible step) an abandonment decision, then a position-biased click.
    """
    if not trending:
        raise ValueError("trending list must be non-empty")
    if engine is None:
        engine = RecommendationEngine(graph, cache, recommender_kind,
                                      placement=placement, exclude_history=exclude_history)

    rng = np.random.default_rng(seed)
    candidates = rng.permutation(np.asarray(trending))[:INITIAL_CANDIDATES]
    current = int(candidates[rng.integers(len(candidates))])

    history: set[int] = set()
    steps: list[SessionStep] = []
    for step_index in range(1, MAX_STEPS + 1):
        history.add(current)
        watched_high_qos = current in cache
        recs = engine.recommend(current, frozenset(history))
        frac_high = recs.high_qos_count() / len(recs) if len(recs) else 0.0
        interest, qos, qor, qoe = ratings.sample_step(watched_high_qos, frac_high, rng)

        action = ACTION_SESSION_END
        selected_position = None
        if step_index < MAX_STEPS:
            if rng.random() < abandon.probability(interest, qos):
                action = ACTION_ABANDONED
            elif len(recs) > 0:
                selected_position = 1 + _sample_index(_click_cumulative(click, len(recs)), rng)
                action = ACTION_SELECTED

        step = SessionStep(step_index=step_index, watched=current,
                           watched_high_qos=watched_high_qos, recs=recs,
                           interest=interest, qos=qos, qor=qor, qoe=qoe,
                           action=action, selected_position=selected_position)
        steps.append(step)
        if action != ACTION_SELECTED:
            break
        current = step.selected_id

    return Session(session_id=session_id, region_label=region_label, steps=tuple(steps))


def _run_chunk(args) -> list[Session]:
    (graph, cache, trending, recommender_kind, click, ratings, abandon,
     master_seed, start, stop, region_label, placement, exclude_history) = args
    engine = RecommendationEngine(graph, cache, recommender_kind,
                                  placement=placement, exclude_history=exclude_history)
    return [
        run_session(graph, cache, trending, recommender_kind, click, ratings, abandon,
                    child_seed(master_seed, i), session_id=f"s{i:06d}",
                    region_label=region_label, engine=engine)
        for i in range(start, stop)
    ]


def run_experiment(n_sessions: int, graph: RelatedGraph, cache: CacheSet, trending: list[int],
                   recommender_kind: str, click: ClickModel, ratings: RatingModel,
                   abandon: AbandonModel, master_seed: int, *, jobs: int = 1,
                   region_label: str = "synthetic", placement: str = "top",
                   exclude_history: bool = False) -> list[Session]:
    """Simulate a batch of independent sessions.

    Session i always runs with seed ``child_seed(master_seed, i)`` and output
    is ordered by i, so the result is identical for any ``jobs`` value.
    """
    if n_sessions < 1:
        raise ValueError("n_sessions must be >= 1")
    jobs = max(1, jobs)

    bounds = np.linspace(0, n_sessions, min(jobs, n_sessions) + 1).astype(int)
    chunks = [
        (graph, cache, trending, recommender_kind, click, ratings, abandon,
         master_seed, int(start), int(stop), region_label, placement, exclude_history)
        for start, stop in zip(bounds[:-1], bounds[1:])
        if stop > start
    ]

    if jobs == 1 or len(chunks) == 1:
        results = [_run_chunk(chunk) for chunk in chunks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_chunk, chunks))

    return [session for chunk in results for session in chunk]
