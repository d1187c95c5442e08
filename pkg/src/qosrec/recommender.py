"""Recommendation lists: vanilla top-related, or nudged toward high-QoS items.

The nudged variant searches the related graph breadth-first up to depth 2 for
items in the high-QoS set.  If it finds enough, they fill the whole list;
otherwise the high-QoS items found are promoted to the top positions and the
list is completed with the original top related items.
"""

from __future__ import annotations

from dataclasses import dataclass

from .catalog import CacheSet, RelatedGraph

LIST_SIZE = 5


@dataclass(frozen=True)
class RecItem:
    position: int
    id: int
    high_qos: bool


@dataclass(frozen=True)
class RecommendationList:
    """Ordered recommendations. ``truncated`` marks lists cut short by graph exhaustion."""

    items: tuple[RecItem, ...]
    truncated: bool = False

    def __post_init__(self):
        seen = set()
        for idx, item in enumerate(self.items, start=1):
            if item.position != idx:
                raise ValueError("positions must be contiguous from 1")
            if item.id in seen:
                raise ValueError(f"duplicate recommendation id {item.id}")
            seen.add(item.id)

    def __len__(self) -> int:
        return len(self.items)

    def ids(self) -> tuple[int, ...]:
        return tuple(item.id for item in self.items)

    def high_qos_flags(self) -> tuple[bool, ...]:
        return tuple(item.high_qos for item in self.items)

    def high_qos_count(self) -> int:
        return sum(item.high_qos for item in self.items)


def _make_list(ids: list[int], cache: CacheSet | None, n: int) -> RecommendationList:
    members = cache.members if cache is not None else frozenset()
    items = tuple(
        RecItem(position=pos, id=vid, high_qos=vid in members)
        for pos, vid in enumerate(ids, start=1)
    )
    return RecommendationList(items=items, truncated=len(items) < n)


def vanilla_recommend(graph: RelatedGraph, watched: int, n: int = LIST_SIZE,
                      cache: CacheSet | None = None,
                      exclude: frozenset[int] = frozenset()) -> RecommendationList:
    """First ``n`` related items of ``watched`` in graph rank order.

    ``cache`` only fills the high_qos flags; it does not alter the selection.
    """
    if watched not in graph:
        raise KeyError(f"video {watched} not in graph")
    chosen = []
    for vid in graph.related(watched):
        if vid == watched or vid in exclude:
            continue
        chosen.append(vid)
        if len(chosen) == n:
            break
    return _make_list(chosen, cache, n)


def nudge_recommend(graph: RelatedGraph, cache: CacheSet, watched: int, n: int = LIST_SIZE,
                    placement: str = "top",
                    exclude: frozenset[int] = frozenset()) -> RecommendationList:
    """QoS-aware list for ``watched``: promote high-QoS items found by shallow BFS.

    Breadth-first search runs over the related lists at depth 1 then depth 2,
    within each depth in rank order, deduplicating and skipping ``watched``
    (plus any ``exclude`` ids).  High-QoS items are collected in encounter
    order.  If at least ``n`` are found the list is the first ``n`` of them;
    otherwise the ones found are placed first and the list is completed with
    the top vanilla recommendations not already present.

    ``placement="interleave"`` keeps the same selection but orders it by the
    original related-list rank (depth-2-only items keep encounter order at
    the end) instead of forcing high-QoS items to the top.
    """
    if watched not in graph:
        raise KeyError(f"video {watched} not in graph")
    if placement not in ("top", "interleave"):
        raise ValueError(f"unknown placement {placement!r}")

    skip = {watched} | set(exclude)
    seen = set(skip)
    cached_found: list[int] = []

    depth1 = []
    for vid in graph.related(watched):
        if vid in seen:
            continue
        seen.add(vid)
        depth1.append(vid)
        if vid in cache:
            cached_found.append(vid)

    if len(cached_found) < n:
        for hub in depth1:
            for vid in graph.related(hub):
                if vid in seen:
                    continue
                seen.add(vid)
                if vid in cache:
                    cached_found.append(vid)
                    if len(cached_found) >= n:
                        break
            if len(cached_found) >= n:
                break

    if len(cached_found) >= n:
        chosen = cached_found[:n]
    else:
        chosen = list(cached_found)
        for vid in depth1:
            if len(chosen) == n:
                break
            if vid not in chosen:
                chosen.append(vid)

    if placement == "interleave":
        rank = {vid: pos for pos, vid in enumerate(graph.related(watched))}
        in_depth1 = sorted((v for v in chosen if v in rank), key=rank.__getitem__)
        deeper = [v for v in chosen if v not in rank]
        chosen = in_depth1 + deeper

    return _make_list(chosen, cache, n)


class RecommendationEngine:
    """Fixed-policy recommender over one (graph, cache) pair, with memoization.

    Lists are pure functions of the watched id when session-history exclusion
    is off, so they are cached per watched id; with history exclusion enabled
    every call recomputes.
    """

    def __init__(self, graph: RelatedGraph, cache: CacheSet, kind: str = "nudge",
                 n: int = LIST_SIZE, placement: str = "top", exclude_history: bool = False):
        if kind not in ("vanilla", "nudge"):
            raise ValueError(f"unknown recommender kind {kind!r}")
        self.graph = graph
        self.cache = cache
        self.kind = kind
        self.n = n
        self.placement = placement
        self.exclude_history = exclude_history
        self._memo: dict[int, RecommendationList] = {}

    def recommend(self, watched: int, history: frozenset[int] = frozenset()) -> RecommendationList:
        if not self.exclude_history and watched in self._memo:
            return self._memo[watched]
        exclude = history if self.exclude_history else frozenset()
        if self.kind == "vanilla":
            recs = vanilla_recommend(self.graph, watched, self.n, self.cache, exclude)
        else:
            recs = nudge_recommend(self.graph, self.cache, watched, self.n,
                                   self.placement, exclude)
        if not self.exclude_history:
            self._memo[watched] = recs
        return recs
