"""Directed citation graph: bounded shortest paths and cocitation ranking.

Separates implicit hidden citations (credit going nowhere traceable) from
indirect ones (the hidden citation cites an intermediary that cites a
foundational paper, a path of length 2).
"""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .corpus.records import Corpus
from .detector import TopicProfile
from .tabulator import FollowerTable

DEFAULT_MAX_DEPTH = 4


class CitationGraph:
    """Adjacency over reference edges (citing -> cited), corpus-restricted."""

    def __init__(self, papers: Corpus):
        out_refs: dict[str, tuple[str, ...]] = {}
        in_refs: dict[str, list[str]] = {pid: [] for pid in papers.ids()}
        for paper in papers:
            refs = tuple(
                ref for ref in paper.references if ref in papers and ref != paper.paper_id
            )
            out_refs[paper.paper_id] = refs
            for ref in refs:
                in_refs[ref].append(paper.paper_id)
        self._out = out_refs
        self._in = {pid: tuple(sorted(citers)) for pid, citers in in_refs.items()}

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self._out

    def __len__(self) -> int:
        return len(self._out)

    def out_refs(self, paper_id: str) -> tuple[str, ...]:
        return self._out[paper_id]

    def in_refs(self, paper_id: str) -> tuple[str, ...]:
        return self._in[paper_id]


def shortest_citation_path(
    graph: CitationGraph,
    source: str,
    targets: Iterable[str],
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> int | None:
    """Length of the shortest reference path from source into targets.

    Breadth-first over out-edges, visiting each node once; None when no
    target is reachable within max_depth. Unknown targets are simply
    unreachable.
    """
    if source not in graph:
        raise ValueError(f"source {source!r} not in graph")
    target_set = set(targets)
    visited = {source}
    frontier = [source]
    for depth in range(1, max_depth + 1):
        next_frontier: list[str] = []
        for node in frontier:
            for ref in graph.out_refs(node):
                if ref in target_set:
                    return depth
                if ref not in visited:
                    visited.add(ref)
                    next_frontier.append(ref)
        if not next_frontier:
            return None
        frontier = next_frontier
    return None


@dataclass(frozen=True)
class PathHistogram:
    """Hidden citations of one topic bucketed by shortest path to foundational."""

    topic_id: int
    max_depth: int
    by_depth: dict[int, int]  # depths 2..max_depth
    unreachable: int          # > max_depth or no path at all

    @property
    def total(self) -> int:
        return sum(self.by_depth.values()) + self.unreachable

    def fraction_at(self, depth: int) -> float:
        if self.total == 0:
            return 0.0
        return self.by_depth.get(depth, 0) / self.total


def path_histogram(
    graph: CitationGraph,
    table: FollowerTable,
    profile: TopicProfile,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> PathHistogram:
    """Bucket each mention-only follower by its citation distance to the topic."""
    foundational = profile.foundational_set
    by_depth = {depth: 0 for depth in range(2, max_depth + 1)}
    unreachable = 0
    for record in table.records:
        if record.cites:
            continue
        length = shortest_citation_path(graph, record.paper_id, foundational, max_depth)
        if length == 1:
            raise ValueError(
                f"follower {record.paper_id} cites the foundational set directly "
                "but was classified mention-only; table and graph disagree"
            )
        if length is None:
            unreachable += 1
        else:
            by_depth[length] += 1
    return PathHistogram(
        topic_id=table.topic_id,
        max_depth=max_depth,
        by_depth=by_depth,
        unreachable=unreachable,
    )


def indirect_adjusted_p(
    table: FollowerTable,
    graph: CitationGraph,
    profile: TopicProfile,
    lag: int,
) -> float:
    """p[(cite or indirectly cite) | mention] at one lag.

    The numerator adds mention-only followers whose shortest citation path to
    the foundational set is exactly 2 to the direct citers.
    """
    year = table.lag_year(lag)
    both, _, mention_only = table.counts((year, year))
    m = both + mention_only
    if m == 0:
        raise ValueError(f"topic {table.topic_id}: no mentions at lag {lag}")
    indirect = 0
    foundational = profile.foundational_set
    for record in table.records:
        if record.cites or record.year != year:
            continue
        if shortest_citation_path(graph, record.paper_id, foundational, 2) == 2:
            indirect += 1
    return (both + indirect) / m


@dataclass(frozen=True)
class Alternative:
    paper_id: str
    cocitations: int
    path_to_foundational: int | None


def top_alternatives(
    graph: CitationGraph,
    table: FollowerTable,
    profile: TopicProfile,
    k: int,
    max_depth: int = DEFAULT_MAX_DEPTH,
) -> list[Alternative]:
    """Papers most frequently cited by the topic's hidden citations.

    Each citing paper counts once per alternative; foundational papers are
    excluded. Ties break by paper id.
    """
    counts: Counter[str] = Counter()
    foundational = profile.foundational_set
    for record in table.records:
        if record.cites:
            continue
        refs = set(graph.out_refs(record.paper_id)) - foundational
        counts.update(refs)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:k]
    return [
        Alternative(
            paper_id=paper_id,
            cocitations=count,
            path_to_foundational=shortest_citation_path(
                graph, paper_id, foundational, max_depth
            ),
        )
        for paper_id, count in ranked
    ]
