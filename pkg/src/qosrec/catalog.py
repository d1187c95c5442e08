"""Synthetic content catalogs: related-item graph, popularity, and the high-QoS set.

A catalog is a universe of videos with Zipf-skewed view counts, a trending
list, and an ordered related-items graph biased toward popular items.  The
high-QoS ("cache") set mimics an edge cache: it reserves slots for the top
trending videos and fills the remainder with the most-viewed items among
their depth-1 related videos.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# View count assigned to popularity rank 1; rank r gets VIEW_SCALE / r**skew.
VIEW_SCALE = 10_000_000

# Slots reserved for trending videos when building the high-QoS set.
TRENDING_RESERVE = 50


@dataclass(frozen=True)
class VideoMeta:
    id: int
    view_count: int
    is_trending: bool

    def __post_init__(self):
        if self.id < 0:
            raise ValueError(f"video id must be non-negative, got {self.id}")
        if self.view_count < 0:
            raise ValueError(f"view_count must be non-negative, got {self.view_count}")


@dataclass(frozen=True)
class RelatedGraph:
    """Ordered related-item lists: ``adjacency[v]`` ranks neighbours, most related first."""

    adjacency: dict[int, tuple[int, ...]]

    def __post_init__(self):
        nodes = set(self.adjacency)
        for src, related in self.adjacency.items():
            if src in related:
                raise ValueError(f"self-loop on video {src}")
            if len(set(related)) != len(related):
                raise ValueError(f"duplicate related ids for video {src}")
            for dst in related:
                if dst not in nodes:
                    raise ValueError(f"related id {dst} of video {src} not in catalog")

    def related(self, video: int) -> tuple[int, ...]:
        return self.adjacency.get(video, ())

    def __contains__(self, video: int) -> bool:
        return video in self.adjacency


@dataclass(frozen=True)
class CacheSet:
    """Ids deliverable in high QoS. ``under_capacity`` marks an exhausted candidate pool."""

    members: frozenset[int]
    capacity: int
    under_capacity: bool = False

    def __post_init__(self):
        if self.capacity <= 0:
            raise ValueError(f"capacity must be positive, got {self.capacity}")
        if len(self.members) > self.capacity:
            raise ValueError(f"{len(self.members)} members exceed capacity {self.capacity}")

    def __contains__(self, video: int) -> bool:
        return video in self.members

    @classmethod
    def empty(cls, capacity: int = 500) -> "CacheSet":
        return cls(members=frozenset(), capacity=capacity, under_capacity=True)


@dataclass(frozen=True)
class CatalogConfig:
    n_videos: int
    n_trending: int = 50
    related_out_degree: int = 50
    popularity_skew: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if self.n_videos <= 0:
            raise ValueError("n_videos must be positive")
        if self.n_trending <= 0 or self.n_trending > self.n_videos:
            raise ValueError("n_trending must be in 1..n_videos")
        if self.related_out_degree <= 0 or self.related_out_degree >= self.n_videos:
            raise ValueError("related_out_degree must be in 1..n_videos-1")
        if self.popularity_skew <= 0:
            raise ValueError("popularity_skew must be positive")


def _weighted_sample_order(rng: np.random.Generator, log_weights: np.ndarray, size: int,
                           exclude: int | None = None) -> np.ndarray:
    """Sample `size` distinct indices without replacement, probability ~ weights.

    Gumbel top-k: adding Gumbel noise to log-weights and taking the k largest
    keys reproduces sequential weighted sampling without replacement; sorting
    by key descending gives the draw order.
    """
    keys = log_weights + rng.gumbel(size=log_weights.shape[0])
    if exclude is not None:
        keys[exclude] = -np.inf
    top = np.argpartition(keys, -size)[-size:]
    return top[np.argsort(-keys[top])]


def generate_catalog(config: CatalogConfig) -> tuple[list[VideoMeta], RelatedGraph, list[int]]:
    """Build a synthetic catalog: metadata, related graph, and ordered trending list.

    Deterministic for a given config. View counts follow a Zipf law over a
    seeded popularity ranking; trending videos and related lists are drawn
    with popularity-weighted sampling, so related lists are biased toward
    popular items. Related lists never contain their source video.
    """
    n = config.n_videos
    if n < config.n_trending + config.related_out_degree:
        raise ValueError(
            f"n_videos={n} too small for n_trending={config.n_trending} "
            f"plus related_out_degree={config.related_out_degree}"
        )

    rng = np.random.default_rng(config.seed)
    ranks = rng.permutation(n) + 1
    view_counts = (VIEW_SCALE / ranks.astype(np.float64) ** config.popularity_skew).astype(np.int64)
    log_weights = np.log(np.maximum(view_counts, 1).astype(np.float64))

    trending = _weighted_sample_order(rng, log_weights, config.n_trending)
    trending_set = set(int(v) for v in trending)

    adjacency: dict[int, tuple[int, ...]] = {}
    for src in range(n):
        order = _weighted_sample_order(rng, log_weights, config.related_out_degree, exclude=src)
        adjacency[src] = tuple(int(v) for v in order)

    catalog = [
        VideoMeta(id=i, view_count=int(view_counts[i]), is_trending=i in trending_set)
        for i in range(n)
    ]
    return catalog, RelatedGraph(adjacency=adjacency), [int(v) for v in trending]


def build_cache_set(catalog: list[VideoMeta], graph: RelatedGraph, trending: list[int],
                    capacity: int = 500) -> CacheSet:
    """Select the high-QoS set: reserved trending slots plus top-viewed related items.

    The first min(50, capacity) trending ids are always included.  Remaining
    slots are filled from the depth-1 related items of those trending videos,
    ranked by view count descending with ties broken by ascending id.  If the
    candidate pool cannot fill the capacity, the result is smaller and marked
    ``under_capacity``.
    """
    if capacity <= 0:
        raise ValueError("capacity must be positive")
    views = {meta.id: meta.view_count for meta in catalog}

    reserve = []
    for vid in trending[: min(TRENDING_RESERVE, capacity)]:
        if vid not in views:
            raise ValueError(f"trending id {vid} not in catalog")
        if vid not in reserve:
            reserve.append(vid)

    members = set(reserve)
    pool = set()
    for vid in reserve:
        for rel in graph.related(vid):
            if rel not in members:
                pool.add(rel)

    slots = capacity - len(members)
    ranked = sorted(pool, key=lambda v: (-views[v], v))
    members.update(ranked[:slots])

    return CacheSet(
        members=frozenset(members),
        capacity=capacity,
        under_capacity=len(members) < capacity,
    )
