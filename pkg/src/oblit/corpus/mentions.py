"""Full-text mention index: which papers contain which n-grams.

Matching is multi-pattern Aho-Corasick over the stemmed token stream, so one
pass per text finds every vocabulary n-gram regardless of vocabulary size.
Tokens, not characters, are the alphabet: a pattern matches only a contiguous
run of stems.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Mapping, Sequence

from .records import Corpus
from .text import Tokenizer, default_tokenizer


class PhraseMatcher:
    """Aho-Corasick automaton over stem sequences for a fixed pattern set."""

    def __init__(self, patterns: Iterable[str]):
        # One trie node per prefix: transitions on stems, plus failure links.
        self.patterns: list[str] = sorted(set(patterns))
        self._next: list[dict[str, int]] = [{}]
        self._fail: list[int] = [0]
        self._output: list[list[int]] = [[]]
        for index, pattern in enumerate(self.patterns):
            node = 0
            for stem in pattern.split(" "):
                node = self._next[node].setdefault(stem, self._new_node())
            self._output[node].append(index)
        self._build_failure_links()

    def _new_node(self) -> int:
        self._next.append({})
        self._fail.append(0)
        self._output.append([])
        return len(self._next) - 1

    def _build_failure_links(self) -> None:
        queue: deque[int] = deque()
        for child in self._next[0].values():
            queue.append(child)
        while queue:
            node = queue.popleft()
            for stem, child in self._next[node].items():
                queue.append(child)
                fail = self._fail[node]
                while fail and stem not in self._next[fail]:
                    fail = self._fail[fail]
                self._fail[child] = self._next[fail].get(stem, 0)
                if self._fail[child] == child:
                    self._fail[child] = 0
                self._output[child] = self._output[child] + self._output[self._fail[child]]
        # deduplicate outputs accumulated through failure chains
        self._output = [sorted(set(out)) for out in self._output]

    def _step(self, node: int, stem: str) -> int:
        while node and stem not in self._next[node]:
            node = self._fail[node]
        return self._next[node].get(stem, 0)

    def matches(self, stems: Sequence[str]) -> set[str]:
        """All patterns occurring contiguously in the stem stream."""
        found: set[int] = set()
        node = 0
        for stem in stems:
            node = self._step(node, stem)
            found.update(self._output[node])
        return {self.patterns[i] for i in found}

    def contains_any(self, stems: Sequence[str]) -> bool:
        node = 0
        for stem in stems:
            node = self._step(node, stem)
            if self._output[node]:
                return True
        return False


class MentionIndex:
    """Mapping from each vocabulary n-gram to the papers whose text contains it."""

    def __init__(self, postings: Mapping[str, frozenset[str]]):
        self._postings = dict(postings)

    def __contains__(self, ngram: str) -> bool:
        return ngram in self._postings

    def __len__(self) -> int:
        return len(self._postings)

    def ngrams(self) -> list[str]:
        return sorted(self._postings)

    def papers_with(self, ngram: str) -> frozenset[str]:
        if ngram not in self._postings:
            raise KeyError(f"n-gram {ngram!r} not in mention index")
        return self._postings[ngram]


def build_mention_index(
    papers: Corpus,
    vocabulary: Iterable[str],
    tokenizer: Tokenizer | None = None,
) -> MentionIndex:
    """Scan every full text once and index each vocabulary n-gram.

    Papers without full_text are absent from all entries; every vocabulary
    n-gram gets an entry, possibly empty.
    """
    tokenizer = tokenizer or default_tokenizer()
    matcher = PhraseMatcher(vocabulary)
    if not matcher.patterns:
        raise ValueError("vocabulary must be nonempty")
    hits: dict[str, set[str]] = {pattern: set() for pattern in matcher.patterns}
    for paper in papers:
        if paper.full_text is None:
            continue
        stems = tokenizer.stems(paper.full_text)
        for pattern in matcher.matches(stems):
            hits[pattern].add(paper.paper_id)
    return MentionIndex({gram: frozenset(ids) for gram, ids in hits.items()})
