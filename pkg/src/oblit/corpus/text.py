"""Text normalization: lowercasing, punctuation handling, stopword removal, stemming.

The pipeline is deliberately simple and fully deterministic: every downstream
identity (n-gram vocabulary, catchphrases, mention matching) is defined in
terms of the stem streams produced here.
"""

from __future__ import annotations

from importlib import resources
from pathlib import Path
from typing import Iterable

from .porter import porter_stem

# Apostrophes are deleted in place ("don't" -> "dont"); every other
# non-alphanumeric character, including hyphens and slashes, separates tokens.
_APOSTROPHES = {"'", "’"}


def _split_words(text: str) -> list[str]:
    words: list[str] = []
    current: list[str] = []
    for ch in text.lower():
        if ch.isalnum():
            current.append(ch)
        elif ch in _APOSTROPHES:
            continue
        elif current:
            words.append("".join(current))
            current = []
    if current:
        words.append("".join(current))
    return words


def load_wordlist(path: str | Path) -> frozenset[str]:
    """Read a one-entry-per-line UTF-8 word file; blank lines ignored."""
    entries = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        word = line.strip()
        if word:
            entries.append(word.lower())
    return frozenset(entries)


def load_stem_exceptions(path: str | Path) -> dict[str, str]:
    """Read stemmer exceptions, one `surface stem` pair per line."""
    exceptions: dict[str, str] = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}: line {lineno}: expected 'surface stem', got {line!r}")
        exceptions[parts[0].lower()] = parts[1].lower()
    return exceptions


def default_stopwords() -> frozenset[str]:
    data = resources.files("oblit.corpus").joinpath("data/stopwords.txt").read_text("utf-8")
    return frozenset(w.strip().lower() for w in data.splitlines() if w.strip())


class Tokenizer:
    """Turns raw text into a stopword-free stream of word stems.

    Rules, in order: lowercase; delete apostrophes; treat every other
    non-alphanumeric character (hyphens included) as a token separator;
    drop stopwords; stem each survivor, honoring explicit exceptions.
    """

    def __init__(
        self,
        stopwords: frozenset[str] | None = None,
        stem_exceptions: dict[str, str] | None = None,
    ):
        self.stopwords = default_stopwords() if stopwords is None else stopwords
        self.stem_exceptions = dict(stem_exceptions or {})

    def stems(self, text: str) -> list[str]:
        out = []
        for word in _split_words(text):
            if word in self.stopwords:
                continue
            exc = self.stem_exceptions.get(word)
            out.append(exc if exc is not None else porter_stem(word))
        return out

    def ngram(self, phrase: str) -> str:
        """Canonical form of a phrase: its space-joined stem sequence."""
        return " ".join(self.stems(phrase))


_DEFAULT: Tokenizer | None = None


def default_tokenizer() -> Tokenizer:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = Tokenizer()
    return _DEFAULT


def tokenize_and_stem(text: str) -> list[str]:
    """Stem stream of `text` under the default stopword list and stemmer."""
    return default_tokenizer().stems(text)
