"""Extraction of (n-gram, cited paper) occurrence tuples from citation contexts.

An n-gram is identified by its canonical form: the space-joined sequence of
word stems. Candidate n-grams of every length 1..n_max are counted corpus-wide
first; candidates seen too rarely, or with too few distinct cited papers, are
pruned before any tuple is emitted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .records import CitationContext, Corpus
from .text import Tokenizer, default_tokenizer


@dataclass(frozen=True)
class NgramConfig:
    n_max: int = 6
    min_count: int = 5
    min_cited_papers: int = 2

    def __post_init__(self):
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.min_count < 1 or self.min_cited_papers < 1:
            raise ValueError("pruning thresholds must be >= 1")


@dataclass(frozen=True)
class OccurrenceTuple:
    """One exact occurrence of an n-gram in the contexts citing a paper."""

    ngram: str
    cited_id: str


def iter_ngrams(stems: Sequence[str], n_max: int) -> Iterable[str]:
    """All contiguous n-grams of length 1..n_max, in start-major order."""
    length = len(stems)
    for start in range(length):
        limit = min(n_max, length - start)
        for n in range(1, limit + 1):
            yield " ".join(stems[start : start + n])


def extract_occurrences(
    contexts: Sequence[CitationContext],
    papers: Corpus,
    config: NgramConfig | None = None,
    tokenizer: Tokenizer | None = None,
) -> list[OccurrenceTuple]:
    """Expand contexts into pruned occurrence tuples.

    Contexts citing a book or review contribute nothing; a cited id absent
    from the corpus is an error. Output order follows context order, then
    n-gram position within the stemmed text.
    """
    config = config or NgramConfig()
    tokenizer = tokenizer or default_tokenizer()

    stem_cache: list[list[str] | None] = []
    counts: dict[str, int] = {}
    cited_by: dict[str, set[str]] = {}
    for ctx in contexts:
        paper = papers.get(ctx.cited_id)
        if paper is None:
            raise ValueError(f"context cites unknown paper {ctx.cited_id!r}")
        if paper.is_book_or_review:
            stem_cache.append(None)
            continue
        stems = tokenizer.stems(ctx.text)
        stem_cache.append(stems)
        for gram in iter_ngrams(stems, config.n_max):
            counts[gram] = counts.get(gram, 0) + 1
            cited_by.setdefault(gram, set()).add(ctx.cited_id)

    retained = {
        gram
        for gram, count in counts.items()
        if count >= config.min_count and len(cited_by[gram]) >= config.min_cited_papers
    }

    tuples: list[OccurrenceTuple] = []
    for ctx, stems in zip(contexts, stem_cache):
        if stems is None:
            continue
        for gram in iter_ngrams(stems, config.n_max):
            if gram in retained:
                tuples.append(OccurrenceTuple(gram, ctx.cited_id))
    return tuples


def vocabulary(tuples: Iterable[OccurrenceTuple]) -> list[str]:
    """Sorted distinct n-grams appearing in a tuple list."""
    return sorted({t.ngram for t in tuples})
