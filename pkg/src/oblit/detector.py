"""Catchphrase / foundational-paper detection and exclusivity entropies.

A topic survives detection only if it has at least one catchphrase
(P(z|w) above the strict catch threshold) and at least one foundational paper
(P(d|z) above the loose foundational threshold). Thresholding compares point
estimates, not estimate minus half-width.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus.records import Corpus
from .topicmodel import Z95, TopicModel


@dataclass(frozen=True)
class DetectorConfig:
    p_catch: float = 0.95
    p_found: float = 0.05

    def __post_init__(self):
        for name, value in (("p_catch", self.p_catch), ("p_found", self.p_found)):
            if not (0.0 < value <= 1.0):
                raise ValueError(f"{name} must be in (0, 1], got {value}")


@dataclass(frozen=True)
class TopicProfile:
    """One detected topic: its catchphrases and foundational papers."""

    topic_id: int
    catchphrases: tuple[tuple[str, float, float], ...]
    foundational_papers: tuple[tuple[str, float, float], ...]
    first_foundational_year: int

    @property
    def catchphrase_set(self) -> frozenset[str]:
        return frozenset(c for c, _, _ in self.catchphrases)

    @property
    def foundational_set(self) -> frozenset[str]:
        return frozenset(d for d, _, _ in self.foundational_papers)


def detect_topics(
    model: TopicModel,
    papers: Corpus,
    config: DetectorConfig | None = None,
) -> list[TopicProfile]:
    """Profiles for every topic with both a catchphrase and a foundational paper.

    Catchphrases are sorted by estimate descending (ties by n-gram),
    foundational papers by estimate descending (ties by id); output is sorted
    by topic id.
    """
    config = config or DetectorConfig()
    p_zw = model.pooled_zw / model.n_w[None, :]
    hw_zw = Z95 * np.sqrt(np.clip(p_zw * (1.0 - p_zw), 0.0, None) / model.n_w[None, :])
    profiles: list[TopicProfile] = []
    for topic in range(model.num_topics):
        n_z = model.pooled_z[topic]
        if n_z <= 0:
            continue
        catch_hits = np.nonzero(p_zw[topic] > config.p_catch)[0]
        if catch_hits.size == 0:
            continue
        catchphrases = [
            (model.vocab[wi], float(p_zw[topic, wi]), float(hw_zw[topic, wi]))
            for wi in catch_hits
        ]
        p_d = model.pooled_dz[:, topic] / n_z
        found_hits = np.nonzero(p_d > config.p_found)[0]
        if found_hits.size == 0:
            continue
        foundational = [
            (
                model.doc_ids[di],
                float(p_d[di]),
                float(Z95 * math.sqrt(max(p_d[di] * (1.0 - p_d[di]), 0.0) / n_z)),
            )
            for di in found_hits
        ]
        for paper_id, _, _ in foundational:
            if paper_id not in papers:
                raise ValueError(f"model document {paper_id!r} missing from corpus")
        catchphrases.sort(key=lambda item: (-item[1], item[0]))
        foundational.sort(key=lambda item: (-item[1], item[0]))
        first_year = min(papers[pid].year for pid, _, _ in foundational)
        profiles.append(
            TopicProfile(
                topic_id=topic,
                catchphrases=tuple(catchphrases),
                foundational_papers=tuple(foundational),
                first_foundational_year=first_year,
            )
        )
    return profiles


def _entropy_bits(counts: Sequence[int]) -> float:
    total = float(sum(counts))
    entropy = 0.0
    for count in counts:
        if count > 0:
            p = count / total
            entropy -= p * math.log2(p)
    return entropy


def entropy_doc_given_ngram(model: TopicModel, ngram: str) -> float:
    """S(d|w) in bits over the empirical co-occurrence distribution."""
    return _entropy_bits(list(model.doc_counts_for_ngram(ngram).values()))


def entropy_ngram_given_doc(model: TopicModel, paper_id: str) -> float:
    """S(w|d) in bits over the empirical co-occurrence distribution."""
    return _entropy_bits(list(model.ngram_counts_for_doc(paper_id).values()))
