"""Paper and citation-context records plus the line-oriented corpus format.

A corpus file is UTF-8 text with one JSON object per line. Every object is
self-describing via its "kind" key, either "paper" or "context"; unknown keys
are ignored so producers may carry extra metadata.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

YEAR_MIN = 1800
YEAR_MAX = 2100


class CorpusFormatError(ValueError):
    """A corpus file line violates the record format."""


@dataclass(frozen=True)
class PaperRecord:
    """One publication: identity, metadata, references, optional full text."""

    paper_id: str
    year: int
    venue: str = ""
    discipline: str = "other"
    title: str = ""
    abstract: str = ""
    authors: tuple[str, ...] = ()
    is_book_or_review: bool = False
    references: tuple[str, ...] = ()
    full_text: str | None = None

    def __post_init__(self):
        if not self.paper_id:
            raise ValueError("paper_id must be nonempty")
        if not (YEAR_MIN <= self.year <= YEAR_MAX):
            raise ValueError(
                f"paper {self.paper_id}: year {self.year} outside [{YEAR_MIN}, {YEAR_MAX}]"
            )
        if len(set(self.references)) != len(self.references):
            raise ValueError(f"paper {self.paper_id}: duplicate references")
        if self.paper_id in self.references:
            raise ValueError(f"paper {self.paper_id}: references itself")


@dataclass(frozen=True)
class CitationContext:
    """The sentence window around one in-text citation marker."""

    citing_id: str
    cited_id: str
    text: str

    def __post_init__(self):
        if not self.citing_id or not self.cited_id:
            raise ValueError("citing_id and cited_id must be nonempty")
        if self.citing_id == self.cited_id:
            raise ValueError(f"context on {self.citing_id}: cites itself")
        if not self.text.split():
            raise ValueError(
                f"context {self.citing_id} -> {self.cited_id}: empty text"
            )


class Corpus:
    """An id-keyed collection of papers, immutable once built."""

    def __init__(self, papers: Iterable[PaperRecord]):
        self._papers: dict[str, PaperRecord] = {}
        for paper in papers:
            if paper.paper_id in self._papers:
                raise ValueError(f"duplicate paper_id {paper.paper_id!r}")
            self._papers[paper.paper_id] = paper

    def __len__(self) -> int:
        return len(self._papers)

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self._papers

    def __getitem__(self, paper_id: str) -> PaperRecord:
        return self._papers[paper_id]

    def __iter__(self) -> Iterator[PaperRecord]:
        # Iteration order is sorted by id so every downstream pass is
        # independent of file ordering.
        for pid in sorted(self._papers):
            yield self._papers[pid]

    def ids(self) -> list[str]:
        return sorted(self._papers)

    def get(self, paper_id: str) -> PaperRecord | None:
        return self._papers.get(paper_id)


_PAPER_REQUIRED = ("paper_id", "year")
_CONTEXT_REQUIRED = ("citing_id", "cited_id", "text")


def _parse_paper(obj: dict, lineno: int) -> PaperRecord:
    for key in _PAPER_REQUIRED:
        if key not in obj:
            raise CorpusFormatError(f"line {lineno}: missing field {key!r}")
    try:
        return PaperRecord(
            paper_id=str(obj["paper_id"]),
            year=int(obj["year"]),
            venue=str(obj.get("venue", "")),
            discipline=str(obj.get("discipline", "other")),
            title=str(obj.get("title", "")),
            abstract=str(obj.get("abstract", "")),
            authors=tuple(str(a) for a in obj.get("authors", ())),
            is_book_or_review=bool(obj.get("is_book_or_review", False)),
            references=tuple(str(r) for r in obj.get("references", ())),
            full_text=None if obj.get("full_text") is None else str(obj["full_text"]),
        )
    except (TypeError, ValueError) as exc:
        raise CorpusFormatError(f"line {lineno}: {exc}") from exc


def _parse_context(obj: dict, lineno: int) -> CitationContext:
    for key in _CONTEXT_REQUIRED:
        if key not in obj:
            raise CorpusFormatError(f"line {lineno}: missing field {key!r}")
    try:
        return CitationContext(
            citing_id=str(obj["citing_id"]),
            cited_id=str(obj["cited_id"]),
            text=str(obj["text"]),
        )
    except ValueError as exc:
        raise CorpusFormatError(f"line {lineno}: {exc}") from exc


def ingest(path: str | Path) -> tuple[list[PaperRecord], list[CitationContext]]:
    """Read a corpus file into validated paper and context records.

    Raises CorpusFormatError naming the offending line (and field, where one
    is identifiable) on malformed input; duplicate paper ids are rejected by
    id.
    """
    papers: list[PaperRecord] = []
    contexts: list[CitationContext] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict):
                raise CorpusFormatError(f"line {lineno}: record is not a key-value object")
            kind = obj.get("kind")
            if kind == "paper":
                paper = _parse_paper(obj, lineno)
                if paper.paper_id in seen:
                    raise CorpusFormatError(
                        f"line {lineno}: duplicate paper_id {paper.paper_id!r}"
                    )
                seen.add(paper.paper_id)
                papers.append(paper)
            elif kind == "context":
                contexts.append(_parse_context(obj, lineno))
            else:
                raise CorpusFormatError(
                    f"line {lineno}: missing field 'kind' or unknown kind {kind!r}"
                )
    return papers, contexts


def _paper_to_obj(paper: PaperRecord) -> dict:
    obj = {
        "kind": "paper",
        "paper_id": paper.paper_id,
        "year": paper.year,
        "venue": paper.venue,
        "discipline": paper.discipline,
        "title": paper.title,
        "abstract": paper.abstract,
        "authors": list(paper.authors),
        "is_book_or_review": paper.is_book_or_review,
        "references": list(paper.references),
    }
    if paper.full_text is not None:
        obj["full_text"] = paper.full_text
    return obj


def write_corpus(
    path: str | Path,
    papers: Iterable[PaperRecord],
    contexts: Iterable[CitationContext],
) -> None:
    """Write records in the line-oriented corpus format, byte-deterministic."""
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for paper in papers:
            handle.write(json.dumps(_paper_to_obj(paper), sort_keys=True))
            handle.write("\n")
        for ctx in contexts:
            obj = {
                "kind": "context",
                "citing_id": ctx.citing_id,
                "cited_id": ctx.cited_id,
                "text": ctx.text,
            }
            handle.write(json.dumps(obj, sort_keys=True))
            handle.write("\n")
