"""Cross-topic and per-paper statistics.

Regressions are ordinary least squares in transformed space (log-log for the
hidden-vs-explicit scaling, p-vs-log-mentions for the discourse effect) with
t-based slope intervals and standard single-observation prediction bands.
Rank analysis redistributes each topic's hidden citations over its
foundational papers and re-sorts.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy import stats

from .corpus.mentions import PhraseMatcher
from .corpus.records import Corpus
from .corpus.text import Tokenizer, default_tokenizer
from .detector import TopicProfile
from .tabulator import FollowerTable
from .topicmodel import Z95

logger = logging.getLogger(__name__)

CATCHPHRASE_CLASSES = ("eponym", "experiment", "other")


# ---------------------------------------------------------------------------
# rank correlation
# ---------------------------------------------------------------------------

def spearman(
    xs: Sequence[float],
    ys: Sequence[float],
    n_permutations: int = 10_000,
    seed: int = 0,
) -> tuple[float, float]:
    """Spearman rho (average ranks for ties) with a permutation-test p-value.

    The p-value is two-sided: the fraction of label permutations whose |rho|
    reaches the observed |rho|, with the +1 correction for the identity.
    """
    if len(xs) != len(ys):
        raise ValueError(f"length mismatch: {len(xs)} vs {len(ys)}")
    if len(xs) < 3:
        raise ValueError("need at least 3 points")
    rx = stats.rankdata(xs)
    ry = stats.rankdata(ys)
    cx = rx - rx.mean()
    cy = ry - ry.mean()
    denom = math.sqrt(float(cx @ cx) * float(cy @ cy))
    if denom == 0.0:
        raise ValueError("rank correlation undefined for constant input")
    rho = float(cx @ cy) / denom
    rng = np.random.Generator(np.random.PCG64(seed))
    hits = 0
    threshold = abs(rho) - 1e-12
    for _ in range(n_permutations):
        perm = rng.permutation(cy)
        r = float(cx @ perm) / denom
        if abs(r) >= threshold:
            hits += 1
    p_value = (hits + 1) / (n_permutations + 1)
    return rho, p_value


# ---------------------------------------------------------------------------
# regressions with confidence bands
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RegressionFit:
    """OLS fit in transformed space, with slope CI and prediction bands.

    With fewer than 3 points the fit interpolates exactly and the bands are
    flagged degenerate (NaN half-widths).
    """

    slope: float
    intercept: float
    slope_halfwidth: float
    n: int
    x_mean: float
    sxx: float
    resid_std: float
    x_min: float
    x_max: float
    degenerate: bool

    def predict(self, x: float) -> float:
        return self.slope * x + self.intercept

    def prediction_halfwidth(self, x: float) -> float:
        """95% single-observation half-width at abscissa x (transformed space)."""
        if self.degenerate:
            return math.nan
        t = stats.t.ppf(0.975, self.n - 2)
        spread = 1.0 + 1.0 / self.n + (x - self.x_mean) ** 2 / self.sxx
        return float(t * self.resid_std * math.sqrt(spread))

    def band_samples(self, num: int = 100) -> list[tuple[float, float, float, float]]:
        """(x, predicted, lower, upper) at evenly spaced abscissae."""
        if num < 2:
            raise ValueError("need at least 2 samples")
        xs = np.linspace(self.x_min, self.x_max, num)
        out = []
        for x in xs:
            x = float(x)
            yhat = self.predict(x)
            half = self.prediction_halfwidth(x)
            out.append((x, yhat, yhat - half, yhat + half))
        return out


def _ols(x: np.ndarray, y: np.ndarray) -> RegressionFit:
    n = len(x)
    x_mean = float(x.mean())
    sxx = float(((x - x_mean) ** 2).sum())
    if sxx == 0.0:
        raise ValueError("all abscissae identical; slope undefined")
    slope = float(((x - x_mean) * (y - y.mean())).sum()) / sxx
    intercept = float(y.mean()) - slope * x_mean
    residuals = y - (slope * x + intercept)
    degenerate = n < 3
    if degenerate:
        resid_std = 0.0
        slope_halfwidth = math.nan
    else:
        resid_std = math.sqrt(float(residuals @ residuals) / (n - 2))
        t = stats.t.ppf(0.975, n - 2)
        slope_halfwidth = float(t * resid_std / math.sqrt(sxx))
    return RegressionFit(
        slope=slope,
        intercept=intercept,
        slope_halfwidth=slope_halfwidth,
        n=n,
        x_mean=x_mean,
        sxx=sxx,
        resid_std=resid_std,
        x_min=float(x.min()),
        x_max=float(x.max()),
        degenerate=degenerate,
    )


def _check_positive(name: str, values: Sequence[float]) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    for i, v in enumerate(arr):
        if v <= 0:
            raise ValueError(f"{name}[{i}] must be positive for a log transform, got {v}")
    return arr


def loglog_fit(c: Sequence[float], h: Sequence[float]) -> RegressionFit:
    """OLS of log10(h) against log10(c): the h ~ c^slope scaling."""
    if len(c) != len(h):
        raise ValueError(f"length mismatch: {len(c)} vs {len(h)}")
    if len(c) < 2:
        raise ValueError("need at least 2 points")
    xc = _check_positive("c", c)
    yh = _check_positive("h", h)
    return _ols(np.log10(xc), np.log10(yh))


def loglinear_fit(mentions: Sequence[float], p: Sequence[float]) -> RegressionFit:
    """OLS of p against log10(mentions)."""
    if len(mentions) != len(p):
        raise ValueError(f"length mismatch: {len(mentions)} vs {len(p)}")
    if len(mentions) < 2:
        raise ValueError("need at least 2 points")
    xm = _check_positive("mentions", mentions)
    yp = np.asarray(p, dtype=np.float64)
    for i, v in enumerate(yp):
        if not (0.0 <= v <= 1.0):
            raise ValueError(f"p[{i}] must be in [0, 1], got {v}")
    return _ols(np.log10(xm), yp)


# ---------------------------------------------------------------------------
# hidden-citation attribution and ranks
# ---------------------------------------------------------------------------

def attribute_hidden_to_papers(
    profiles: Sequence[TopicProfile],
    tables: Sequence[FollowerTable],
    mode: str = "proportional",
) -> dict[str, float]:
    """Distribute each topic's hidden citations over its foundational papers.

    Proportional mode splits by P(d|z) renormalized over the foundational set
    (mass-conserving); "full" mode credits every foundational paper with the
    topic's entire hidden count.
    """
    if mode not in ("proportional", "full"):
        raise ValueError(f"unknown attribution mode {mode!r}")
    by_topic = {table.topic_id: table for table in tables}
    shares: dict[str, float] = {}
    for profile in profiles:
        table = by_topic.get(profile.topic_id)
        if table is None:
            raise ValueError(f"no follower table for topic {profile.topic_id}")
        hidden = table.hidden()
        if mode == "full":
            for paper_id, _, _ in profile.foundational_papers:
                shares[paper_id] = shares.get(paper_id, 0.0) + hidden
            continue
        total_weight = sum(est for _, est, _ in profile.foundational_papers)
        for paper_id, est, _ in profile.foundational_papers:
            shares[paper_id] = shares.get(paper_id, 0.0) + hidden * (est / total_weight)
    return shares


@dataclass(frozen=True)
class RankDelta:
    paper_id: str
    rank_explicit: int
    rank_with_hidden: int
    c_explicit: float
    h_attributed: float

    @property
    def delta(self) -> int:
        return self.rank_explicit - self.rank_with_hidden


def rank_deltas(
    paper_ids: Iterable[str],
    c_explicit: Mapping[str, float],
    h_attributed: Mapping[str, float],
) -> list[RankDelta]:
    """Rank papers by explicit citations, then by explicit + hidden.

    Both rankings sort descending with ties broken by paper id; output is
    ordered by the explicit rank.
    """
    ids = sorted(set(paper_ids))
    for pid in ids:
        if c_explicit.get(pid, 0) < 0 or h_attributed.get(pid, 0) < 0:
            raise ValueError(f"negative count for paper {pid!r}")
    explicit_order = sorted(ids, key=lambda pid: (-c_explicit.get(pid, 0.0), pid))
    combined_order = sorted(
        ids,
        key=lambda pid: (-(c_explicit.get(pid, 0.0) + h_attributed.get(pid, 0.0)), pid),
    )
    combined_rank = {pid: i + 1 for i, pid in enumerate(combined_order)}
    return [
        RankDelta(
            paper_id=pid,
            rank_explicit=i + 1,
            rank_with_hidden=combined_rank[pid],
            c_explicit=float(c_explicit.get(pid, 0.0)),
            h_attributed=float(h_attributed.get(pid, 0.0)),
        )
        for i, pid in enumerate(explicit_order)
    ]


# ---------------------------------------------------------------------------
# catchphrase origin and classes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OriginStats:
    n_checked: int
    n_absent: int       # catchphrases appear nowhere in title or abstract
    n_excluded: int     # papers missing both title and abstract

    @property
    def fraction_absent(self) -> float:
        if self.n_checked == 0:
            return math.nan
        return self.n_absent / self.n_checked


def _foundational_catchphrases(
    profiles: Sequence[TopicProfile],
) -> dict[str, set[str]]:
    by_paper: dict[str, set[str]] = {}
    for profile in profiles:
        for paper_id in profile.foundational_set:
            by_paper.setdefault(paper_id, set()).update(profile.catchphrase_set)
    return by_paper


def catchphrase_origin(
    profiles: Sequence[TopicProfile],
    papers: Corpus,
    tokenizer: Tokenizer | None = None,
) -> OriginStats:
    """Fraction of foundational papers whose title+abstract omit their catchphrases.

    Containment is tested on stemmed token streams with the same matcher as
    the mention index. Papers missing both title and abstract are excluded
    and tallied separately.
    """
    tokenizer = tokenizer or default_tokenizer()
    by_paper = _foundational_catchphrases(profiles)
    n_checked = n_absent = n_excluded = 0
    for paper_id in sorted(by_paper):
        paper = papers[paper_id]
        text = f"{paper.title} {paper.abstract}".strip()
        if not text:
            n_excluded += 1
            continue
        n_checked += 1
        matcher = PhraseMatcher(by_paper[paper_id])
        if not matcher.contains_any(tokenizer.stems(text)):
            n_absent += 1
    return OriginStats(n_checked=n_checked, n_absent=n_absent, n_excluded=n_excluded)


def load_catchphrase_overrides(
    path: str | Path, tokenizer: Tokenizer | None = None
) -> dict[str, str]:
    """Read catchphrase class overrides: one `phrase<TAB>class` entry per line.

    Phrases are canonicalized through the tokenizer so surface forms match
    detected catchphrases.
    """
    tokenizer = tokenizer or default_tokenizer()
    overrides: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValueError(f"{path}: line {lineno}: expected 'phrase<TAB>class'")
        phrase, label = parts[0].strip(), parts[1].strip()
        if label not in CATCHPHRASE_CLASSES:
            raise ValueError(
                f"{path}: line {lineno}: unknown class {label!r} "
                f"(expected one of {', '.join(CATCHPHRASE_CLASSES)})"
            )
        overrides[tokenizer.ngram(phrase)] = label
    return overrides


def classify_catchphrases(
    profiles: Sequence[TopicProfile],
    papers: Corpus,
    overrides: Mapping[str, str] | None = None,
    tokenizer: Tokenizer | None = None,
) -> dict[int, str]:
    """Per-topic class: eponym, experiment, or other.

    A topic is an eponym when any catchphrase contains the stem of any
    foundational-paper author surname. Experiment labels come only from the
    override mapping, which also wins over the eponym heuristic.
    """
    tokenizer = tokenizer or default_tokenizer()
    overrides = overrides or {}
    classes: dict[int, str] = {}
    for profile in profiles:
        label = None
        for catchphrase in sorted(profile.catchphrase_set):
            if catchphrase in overrides:
                label = overrides[catchphrase]
                break
        if label is None:
            surname_stems: set[str] = set()
            for paper_id in profile.foundational_set:
                for author in papers[paper_id].authors:
                    surname_stems.update(tokenizer.stems(author))
            label = "other"
            for catchphrase in profile.catchphrase_set:
                if surname_stems.intersection(catchphrase.split(" ")):
                    label = "eponym"
                    break
        classes[profile.topic_id] = label
    return classes


@dataclass(frozen=True)
class AuthorCountStats:
    n_papers: int
    mean: float
    halfwidth: float  # NaN (flagged) for single-paper classes


def author_count_stats(
    profiles: Sequence[TopicProfile],
    papers: Corpus,
    classes: Mapping[int, str],
) -> dict[str, AuthorCountStats]:
    """Mean author-list length per catchphrase class, with 1.96*SE half-width.

    Distinct foundational papers are counted once per class; empty classes
    are omitted with a log notice.
    """
    members: dict[str, set[str]] = {label: set() for label in CATCHPHRASE_CLASSES}
    for profile in profiles:
        label = classes.get(profile.topic_id)
        if label is None:
            raise ValueError(f"no class for topic {profile.topic_id}")
        members[label].update(profile.foundational_set)
    out: dict[str, AuthorCountStats] = {}
    for label in CATCHPHRASE_CLASSES:
        paper_ids = sorted(members[label])
        if not paper_ids:
            logger.info("author_count_stats: class %r empty, omitted", label)
            continue
        counts = [len(papers[pid].authors) for pid in paper_ids]
        mean = sum(counts) / len(counts)
        if len(counts) < 2:
            half = math.nan
        else:
            var = sum((c - mean) ** 2 for c in counts) / (len(counts) - 1)
            half = Z95 * math.sqrt(var / len(counts))
        out[label] = AuthorCountStats(n_papers=len(counts), mean=mean, halfwidth=half)
    return out
