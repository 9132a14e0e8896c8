"""Follower classification and hidden-citation statistics.

For each detected topic, every other paper is classified by two independent
bits: cites (its references intersect the topic's foundational set) and
mentions (its full text contains at least one catchphrase, per the mention
index). Papers with neither bit are not followers and are not stored; a
topic's own foundational papers are never its followers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus.mentions import MentionIndex
from .corpus.records import Corpus
from .detector import TopicProfile
from .topicmodel import Z95


@dataclass(frozen=True)
class FollowerRecord:
    paper_id: str
    topic_id: int
    cites: bool
    mentions: bool
    year: int

    def __post_init__(self):
        if not (self.cites or self.mentions):
            raise ValueError("a follower must cite or mention")


@dataclass(frozen=True)
class FollowerTable:
    """Per-year follower counts for one topic, with the records behind them.

    c = n_both + n_cite_only (explicit citations), h = n_mention_only (hidden
    citations), m = n_both + n_mention_only (mentions).
    """

    topic_id: int
    first_foundational_year: int
    records: tuple[FollowerRecord, ...]
    by_year: dict[int, tuple[int, int, int]] = field(default_factory=dict)

    @staticmethod
    def from_records(
        topic_id: int, first_year: int, records: Sequence[FollowerRecord]
    ) -> "FollowerTable":
        by_year: dict[int, list[int]] = {}
        for rec in records:
            counts = by_year.setdefault(rec.year, [0, 0, 0])
            if rec.cites and rec.mentions:
                counts[0] += 1
            elif rec.cites:
                counts[1] += 1
            else:
                counts[2] += 1
        return FollowerTable(
            topic_id=topic_id,
            first_foundational_year=first_year,
            records=tuple(records),
            by_year={year: tuple(counts) for year, counts in sorted(by_year.items())},
        )

    def years(self) -> list[int]:
        return sorted(self.by_year)

    def counts(self, year_range: tuple[int, int] | None = None) -> tuple[int, int, int]:
        """(n_both, n_cite_only, n_mention_only) over an inclusive year range."""
        both = cite_only = mention_only = 0
        for year, (b, c, m) in self.by_year.items():
            if year_range is not None and not (year_range[0] <= year <= year_range[1]):
                continue
            both += b
            cite_only += c
            mention_only += m
        return both, cite_only, mention_only

    def explicit(self, year_range: tuple[int, int] | None = None) -> int:
        both, cite_only, _ = self.counts(year_range)
        return both + cite_only

    def hidden(self, year_range: tuple[int, int] | None = None) -> int:
        return self.counts(year_range)[2]

    def mentions(self, year_range: tuple[int, int] | None = None) -> int:
        both, _, mention_only = self.counts(year_range)
        return both + mention_only

    def lag_year(self, lag: int) -> int:
        return self.first_foundational_year + lag


def tabulate(
    profiles: Sequence[TopicProfile],
    papers: Corpus,
    index: MentionIndex,
) -> list[FollowerTable]:
    """Classify every paper against every topic and bin counts by year.

    The mention index must cover every catchphrase of every profile; a
    missing catchphrase indicates an index/profile mismatch and is an error.
    """
    for profile in profiles:
        for catchphrase in profile.catchphrase_set:
            if catchphrase not in index:
                raise ValueError(
                    f"catchphrase {catchphrase!r} of topic {profile.topic_id} "
                    "missing from mention index"
                )
    tables: list[FollowerTable] = []
    for profile in profiles:
        foundational = profile.foundational_set
        mentioning: set[str] = set()
        for catchphrase in sorted(profile.catchphrase_set):
            mentioning |= index.papers_with(catchphrase)
        records: list[FollowerRecord] = []
        for paper in papers:
            if paper.paper_id in foundational:
                continue
            cites = bool(foundational.intersection(paper.references))
            mentions = paper.paper_id in mentioning
            if not (cites or mentions):
                continue
            records.append(
                FollowerRecord(
                    paper_id=paper.paper_id,
                    topic_id=profile.topic_id,
                    cites=cites,
                    mentions=mentions,
                    year=paper.year,
                )
            )
        tables.append(
            FollowerTable.from_records(
                profile.topic_id, profile.first_foundational_year, records
            )
        )
    return tables


def hidden_fraction(table: FollowerTable, since_year: int) -> float:
    """h / (h + c) over years >= since_year."""
    year_range = (since_year, max(table.years(), default=since_year))
    hidden = table.hidden(year_range)
    explicit = table.explicit(year_range)
    if hidden + explicit == 0:
        raise ValueError(
            f"topic {table.topic_id}: no followers in years >= {since_year}"
        )
    return hidden / (hidden + explicit)


def p_cite_given_mention(
    table: FollowerTable, year_range: tuple[int, int] | None = None
) -> tuple[float, float]:
    """Among mentioning followers, the fraction that also cite; 95% half-width."""
    both, _, mention_only = table.counts(year_range)
    m = both + mention_only
    if m == 0:
        raise ValueError(f"topic {table.topic_id}: no mentions in range {year_range}")
    p = both / m
    return p, Z95 * math.sqrt(p * (1.0 - p) / m)


@dataclass(frozen=True)
class DecayPoint:
    lag: int
    mean: float
    halfwidth: float  # inf when fewer than two topics contribute
    n_topics: int


def temporal_decay(
    tables: Sequence[FollowerTable],
    horizon_years: int,
    pooled: bool = False,
) -> list[DecayPoint]:
    """Cross-topic p(cite|mention) at each lag since the first foundational year.

    Default aggregation is the unweighted mean of per-topic probabilities with
    a 1.96 * standard-error half-width across topics; pooled=True instead
    merges counts across topics and uses a binomial half-width.
    """
    points: list[DecayPoint] = []
    for lag in range(horizon_years + 1):
        per_topic: list[float] = []
        pooled_both = pooled_m = 0
        for table in tables:
            year = table.lag_year(lag)
            both, _, mention_only = table.counts((year, year))
            m = both + mention_only
            if m == 0:
                continue
            per_topic.append(both / m)
            pooled_both += both
            pooled_m += m
        n = len(per_topic)
        if n == 0:
            points.append(DecayPoint(lag, math.nan, math.inf, 0))
            continue
        if pooled:
            p = pooled_both / pooled_m
            half = Z95 * math.sqrt(p * (1.0 - p) / pooled_m)
            points.append(DecayPoint(lag, p, half, n))
            continue
        mean = sum(per_topic) / n
        if n < 2:
            points.append(DecayPoint(lag, mean, math.inf, n))
            continue
        variance = sum((p - mean) ** 2 for p in per_topic) / (n - 1)
        half = Z95 * math.sqrt(variance / n)
        points.append(DecayPoint(lag, mean, half, n))
    if points[0].n_topics == 0:
        raise ValueError("no topic has mention data at lag 0")
    return points
