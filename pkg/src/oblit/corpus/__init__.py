"""Corpus ingestion, text normalization, n-gram extraction and mention indexing."""

from .mentions import MentionIndex, PhraseMatcher, build_mention_index
from .occurrences import NgramConfig, OccurrenceTuple, extract_occurrences, iter_ngrams, vocabulary
from .porter import porter_stem
from .records import (
    CitationContext,
    Corpus,
    CorpusFormatError,
    PaperRecord,
    ingest,
    write_corpus,
)
from .text import (
    Tokenizer,
    default_stopwords,
    default_tokenizer,
    load_stem_exceptions,
    load_wordlist,
    tokenize_and_stem,
)

__all__ = [
    "CitationContext",
    "Corpus",
    "CorpusFormatError",
    "MentionIndex",
    "NgramConfig",
    "OccurrenceTuple",
    "PaperRecord",
    "PhraseMatcher",
    "Tokenizer",
    "build_mention_index",
    "default_stopwords",
    "default_tokenizer",
    "extract_occurrences",
    "ingest",
    "iter_ngrams",
    "load_stem_exceptions",
    "load_wordlist",
    "porter_stem",
    "tokenize_and_stem",
    "vocabulary",
    "write_corpus",
]
