"""Synthetic corpora with fully known ground truth.

The generator plants topics (catchphrases, foundational papers), follower
behavior over time (cite-and-mention, cite-only, mention-only), an indirect
citation structure (hidden citations reaching the foundational papers through
intermediaries), and a shared background vocabulary. Every statistic the
pipeline estimates is therefore known exactly at generation time, and the
emitted corpus is re-classified with naive scans before being returned.

Vocabulary control: words that must survive pruning (catchphrases, background
words, frequency twins) never sit adjacent in any text; low-use filler words
separate them. Every unplanned n-gram therefore contains a word occurring
fewer than five times and is pruned, which pins the trained vocabulary to the
planted one.

Two modes: "exact" realizes planted rates as deterministic rounded counts
(zero sampling error); "sampled" draws per-follower coins and converges to
the planted rates as counts grow. Both are byte-deterministic per seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .artifacts import read_artifact, write_artifact
from .corpus.records import CitationContext, Corpus, PaperRecord, write_corpus
from .corpus.text import Tokenizer, default_tokenizer
from .detector import TopicProfile

TRUTH_KIND = "ground-truth"
TRUTH_VERSION = 1

DISCIPLINES = ("hep", "cond", "quant", "astro", "other")
VENUES = ("ann-synth-phys", "j-model-lett", "rev-latent-sci", "proc-corpus")

# Words reused at most this often stay far below the default pruning
# threshold of five occurrences.
CHAFF_REUSE = 3


class GenerationError(ValueError):
    """Spec infeasible, or the emitted corpus failed its self-check."""


# ---------------------------------------------------------------------------
# word inventory
# ---------------------------------------------------------------------------

_SYLLABLES = (
    "ba", "ce", "di", "fo", "gu", "hy", "ja", "ke", "lo", "mu",
    "ne", "pi", "qa", "ru", "sa", "te", "vu", "wi", "xo", "zy",
)


class _WordInventory:
    """Endless stream of invented words with pairwise-distinct stems."""

    def __init__(self, tokenizer: Tokenizer):
        self._tokenizer = tokenizer
        self._counter = 0
        self._seen_stems: set[str] = set()

    def _raw(self, index: int) -> str:
        parts = []
        index += len(_SYLLABLES)  # skip 1-syllable forms
        while index:
            index, digit = divmod(index, len(_SYLLABLES))
            parts.append(_SYLLABLES[digit])
        return "".join(parts)

    def next_word(self) -> str:
        while True:
            word = self._raw(self._counter)
            self._counter += 1
            stems = self._tokenizer.stems(word)
            if len(stems) != 1:
                continue  # stopword or degenerate form
            if stems[0] in self._seen_stems:
                continue
            self._seen_stems.add(stems[0])
            return word


class _ChaffStream:
    """Filler words, each reused at most CHAFF_REUSE times."""

    def __init__(self, inventory: _WordInventory):
        self._inventory = inventory
        self._word = inventory.next_word()
        self._uses = 0
        self.words_issued = 1

    def next(self) -> str:
        if self._uses >= CHAFF_REUSE:
            self._word = self._inventory.next_word()
            self._uses = 0
            self.words_issued += 1
        self._uses += 1
        return self._word


def _assemble(units: Sequence[Sequence[str]], chaff: _ChaffStream) -> str:
    """Join token units with one chaff word between consecutive units."""
    tokens: list[str] = []
    for i, unit in enumerate(units):
        if i:
            tokens.append(chaff.next())
        tokens.extend(unit)
    if not tokens:
        tokens = [chaff.next()]
    return " ".join(tokens)


# ---------------------------------------------------------------------------
# spec and ground truth
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorSpec:
    num_topics: int = 20
    n_years: int = 21
    mentioning_per_year: int = 24
    cite_only_per_year: int = 5
    foundational_per_topic: int = 2
    p_cite_start: float = 0.8
    p_cite_end: float = 0.8
    indirect_start: float = 0.6
    indirect_end: float = 0.6
    first_year_base: int = 1984
    first_year_stagger: int = 7
    topic_scale_min: float = 0.7
    topic_scale_max: float = 1.6
    exclusive_words_per_context: int = 2
    background_vocab: int = 60
    background_papers: int = 160
    background_contexts: int = 1200
    background_words_per_context: int = 4
    noise_papers: int = 200
    leak_fraction: float = 0.3
    twin_bg_share: float = 0.75
    eponym_fraction: float = 0.25
    experiment_fraction: float = 0.10
    catchphrase_in_title_fraction: float = 0.25
    emit_entropy_controls: bool = True
    mode: str = "exact"
    seed: int = 7

    def validate(self) -> None:
        if self.num_topics < 1:
            raise GenerationError("num_topics must be >= 1")
        if self.n_years < 1:
            raise GenerationError("n_years must be >= 1")
        if self.foundational_per_topic < 1:
            raise GenerationError("foundational_per_topic must be >= 1")
        if self.mentioning_per_year < 0 or self.cite_only_per_year < 0:
            raise GenerationError("follower counts must be >= 0")
        for name in (
            "p_cite_start", "p_cite_end", "indirect_start", "indirect_end",
            "leak_fraction", "twin_bg_share", "eponym_fraction",
            "experiment_fraction", "catchphrase_in_title_fraction",
        ):
            value = getattr(self, name)
            if not (0.0 <= value <= 1.0):
                raise GenerationError(f"{name} must be in [0, 1], got {value}")
        if self.mode not in ("exact", "sampled"):
            raise GenerationError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        followers = self.n_years * (self.mentioning_per_year + self.cite_only_per_year)
        min_followers = int(math.floor(followers * self.topic_scale_min))
        if min_followers < self.foundational_per_topic:
            raise GenerationError(
                f"infeasible spec: {self.foundational_per_topic} foundational papers "
                f"per topic but only ~{min_followers} followers"
            )
        if self.background_vocab < 1:
            raise GenerationError("background_vocab must be >= 1")
        if self.background_papers < 1 or self.noise_papers < 1:
            raise GenerationError("background_papers and noise_papers must be >= 1")


@dataclass
class TopicTruth:
    key: int
    name: str
    catchphrases: list[str]             # canonical stem forms
    foundational: list[str]             # paper ids, planted-weight order
    foundational_years: dict[str, int]
    foundational_weights: dict[str, float]
    first_year: int
    class_label: str
    scale: float
    per_year: dict[int, tuple[int, int, int]]      # year -> (both, cite_only, mention_only)
    indirect_per_year: dict[int, int]              # year -> depth-2 hidden citations
    twin_word_by_catchphrase: dict[str, str]
    control_paper_by_foundational: dict[str, str]
    cp_in_title_by_foundational: dict[str, bool]
    intermediaries: list[str]

    def hidden_total(self) -> int:
        return sum(m for _, _, m in self.per_year.values())

    def explicit_total(self) -> int:
        return sum(b + c for b, c, _ in self.per_year.values())


@dataclass
class GroundTruth:
    mode: str
    seed: int
    p_schedule: tuple[float, float]
    indirect_schedule: tuple[float, float]
    topics: list[TopicTruth]
    background_words: list[str]   # canonical stems, twins excluded
    exclusive_pool_size: int

    def planted_pairs(self) -> set[tuple[str, str]]:
        pairs = set()
        for topic in self.topics:
            for cp in topic.catchphrases:
                for fid in topic.foundational:
                    pairs.add((cp, fid))
        return pairs

    def planted_catchphrases(self) -> set[str]:
        return {cp for topic in self.topics for cp in topic.catchphrases}

    def to_profiles(self) -> list[TopicProfile]:
        """Planted truth expressed as TopicProfiles, for oracle tabulation."""
        profiles = []
        for topic in self.topics:
            catchphrases = tuple((cp, 1.0, 0.0) for cp in sorted(topic.catchphrases))
            weights = topic.foundational_weights
            foundational = tuple(
                (fid, weights[fid], 0.0)
                for fid in sorted(topic.foundational, key=lambda f: (-weights[f], f))
            )
            profiles.append(
                TopicProfile(
                    topic_id=topic.key,
                    catchphrases=catchphrases,
                    foundational_papers=foundational,
                    first_foundational_year=topic.first_year,
                )
            )
        return profiles

    # -- persistence -------------------------------------------------------

    def save(self, path: str | Path) -> None:
        def records():
            yield {
                "t": "meta",
                "mode": self.mode,
                "seed": self.seed,
                "p_schedule": list(self.p_schedule),
                "indirect_schedule": list(self.indirect_schedule),
                "exclusive_pool_size": self.exclusive_pool_size,
            }
            yield {"t": "background", "words": self.background_words}
            for topic in self.topics:
                yield {
                    "t": "topic",
                    "key": topic.key,
                    "name": topic.name,
                    "catchphrases": topic.catchphrases,
                    "foundational": topic.foundational,
                    "foundational_years": topic.foundational_years,
                    "foundational_weights": topic.foundational_weights,
                    "first_year": topic.first_year,
                    "class_label": topic.class_label,
                    "scale": topic.scale,
                    "per_year": {str(y): list(c) for y, c in topic.per_year.items()},
                    "indirect_per_year": {
                        str(y): c for y, c in topic.indirect_per_year.items()
                    },
                    "twin_word_by_catchphrase": topic.twin_word_by_catchphrase,
                    "control_paper_by_foundational": topic.control_paper_by_foundational,
                    "cp_in_title_by_foundational": topic.cp_in_title_by_foundational,
                    "intermediaries": topic.intermediaries,
                }

        write_artifact(path, TRUTH_KIND, TRUTH_VERSION, records())

    @classmethod
    def load(cls, path: str | Path) -> "GroundTruth":
        meta: dict = {}
        background: list[str] = []
        topics: list[TopicTruth] = []
        for rec in read_artifact(path, TRUTH_KIND, TRUTH_VERSION):
            if rec["t"] == "meta":
                meta = rec
            elif rec["t"] == "background":
                background = rec["words"]
            elif rec["t"] == "topic":
                topics.append(
                    TopicTruth(
                        key=rec["key"],
                        name=rec["name"],
                        catchphrases=rec["catchphrases"],
                        foundational=rec["foundational"],
                        foundational_years={
                            k: int(v) for k, v in rec["foundational_years"].items()
                        },
                        foundational_weights=rec["foundational_weights"],
                        first_year=rec["first_year"],
                        class_label=rec["class_label"],
                        scale=rec["scale"],
                        per_year={
                            int(y): tuple(c) for y, c in rec["per_year"].items()
                        },
                        indirect_per_year={
                            int(y): c for y, c in rec["indirect_per_year"].items()
                        },
                        twin_word_by_catchphrase=rec["twin_word_by_catchphrase"],
                        control_paper_by_foundational=rec["control_paper_by_foundational"],
                        cp_in_title_by_foundational=rec["cp_in_title_by_foundational"],
                        intermediaries=rec["intermediaries"],
                    )
                )
        return cls(
            mode=meta["mode"],
            seed=meta["seed"],
            p_schedule=tuple(meta["p_schedule"]),
            indirect_schedule=tuple(meta["indirect_schedule"]),
            topics=topics,
            background_words=background,
            exclusive_pool_size=meta["exclusive_pool_size"],
        )


@dataclass
class SyntheticCorpus:
    papers: list[PaperRecord]
    contexts: list[CitationContext]
    truth: GroundTruth

    def corpus(self) -> Corpus:
        return Corpus(self.papers)

    def write(self, corpus_path: str | Path, truth_path: str | Path) -> None:
        write_corpus(corpus_path, self.papers, self.contexts)
        self.truth.save(truth_path)


def default_spec() -> GeneratorSpec:
    return GeneratorSpec()


# ---------------------------------------------------------------------------
# generation
# ---------------------------------------------------------------------------

def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def _linear(start: float, end: float, step: int, steps: int) -> float:
    if steps <= 1:
        return start
    return start + (end - start) * step / (steps - 1)


def _class_labels(spec: GeneratorSpec) -> list[str]:
    n_epo = _round_half_up(spec.eponym_fraction * spec.num_topics)
    n_exp = _round_half_up(spec.experiment_fraction * spec.num_topics)
    labels = ["eponym"] * n_epo + ["experiment"] * n_exp
    labels += ["other"] * (spec.num_topics - len(labels))
    return labels[: spec.num_topics]


class _Builder:
    def __init__(self, spec: GeneratorSpec, mode: str, seed: int, tokenizer: Tokenizer):
        self.spec = spec
        self.mode = mode
        self.seed = seed
        self.tok = tokenizer
        self.rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
        self.inventory = _WordInventory(tokenizer)
        self.chaff = _ChaffStream(self.inventory)
        self.papers: list[PaperRecord] = []
        self.contexts: list[CitationContext] = []
        self.noise_refs: list[set[str]] = []
        self.context_count: dict[str, int] = {}  # contexts citing each foundational

    # -- small helpers -----------------------------------------------------

    def bg_word(self) -> str:
        return self.bg_words[int(self.rng.integers(0, len(self.bg_words)))]

    def bg_paper(self) -> str:
        return self.bg_paper_ids[int(self.rng.integers(0, len(self.bg_paper_ids)))]

    def noise_citer(self, cited: str) -> str:
        i = int(self.rng.integers(0, self.spec.noise_papers))
        self.noise_refs[i].add(cited)
        return f"noise{i:04d}"

    def add_context(self, citing: str, cited: str, units: list[list[str]]) -> str:
        order = list(self.rng.permutation(len(units)))
        text = _assemble([units[i] for i in order], self.chaff)
        self.contexts.append(CitationContext(citing, cited, text))
        return text

    # -- main build --------------------------------------------------------

    def build(self) -> SyntheticCorpus:
        spec = self.spec
        self.bg_words = [self.inventory.next_word() for _ in range(spec.background_vocab)]
        labels = _class_labels(spec)
        scales = self._scales()
        self.bg_paper_ids = [f"bg{i:04d}" for i in range(spec.background_papers)]

        plans = []
        for t in range(spec.num_topics):
            plans.append(self._plan_topic(t, labels[t], scales[t]))

        # Sprinkle jobs: leaked catchphrase components and frequency twins.
        leak_jobs: list[list[str]] = []
        twin_bg_jobs: list[list[str]] = []
        twin_partner_jobs: dict[int, list[str]] = {t: [] for t in range(spec.num_topics)}
        for plan in plans:
            leak_jobs.extend(plan["leak_jobs"])
            if spec.emit_entropy_controls:
                partner = (plan["t"] + 1) % spec.num_topics
                for twin_word, total in plan["twin_counts"]:
                    n_bg = int(math.floor(spec.twin_bg_share * total))
                    twin_bg_jobs.extend([twin_word] for _ in range(n_bg))
                    twin_partner_jobs[partner].extend([twin_word] * (total - n_bg))

        # Emit topic-side papers and contexts, hosting partner twin sprinkles.
        truths = []
        for plan in plans:
            truths.append(self._emit_topic(plan, twin_partner_jobs[plan["t"]]))

        self._emit_background(leak_jobs, twin_bg_jobs)
        if spec.emit_entropy_controls:
            for plan, truth in zip(plans, truths):
                self._emit_controls(plan, truth)
        self._emit_noise_papers()

        truth = GroundTruth(
            mode=self.mode,
            seed=self.seed,
            p_schedule=(spec.p_cite_start, spec.p_cite_end),
            indirect_schedule=(spec.indirect_start, spec.indirect_end),
            topics=truths,
            background_words=[self.tok.stems(w)[0] for w in self.bg_words],
            exclusive_pool_size=self.chaff.words_issued,
        )
        result = SyntheticCorpus(self.papers, self.contexts, truth)
        _self_check(result, self.tok)
        return result

    def _scales(self) -> list[float]:
        spec = self.spec
        if spec.num_topics == 1:
            return [1.0]
        lo, hi = math.log(spec.topic_scale_min), math.log(spec.topic_scale_max)
        return [
            math.exp(_linear(lo, hi, t, spec.num_topics))
            for t in range(spec.num_topics)
        ]

    # -- per-topic planning -------------------------------------------------

    def _plan_topic(self, t: int, label: str, scale: float) -> dict:
        spec = self.spec
        rng = self.rng
        if label == "eponym":
            cp_words = [[self.inventory.next_word(), self.inventory.next_word()]]
        elif label == "experiment":
            cp_words = [[self.inventory.next_word()]]
        else:
            length = 3 if t == spec.num_topics - 1 and spec.num_topics > 2 else (2 if t % 2 else 1)
            cp_words = [[self.inventory.next_word() for _ in range(length)]]
        if label == "other" and t % 5 == 2:
            cp_words.append([self.inventory.next_word(), self.inventory.next_word()])

        first_year = spec.first_year_base + (t % max(1, spec.first_year_stagger))
        foundational = [f"t{t:02d}f{j}" for j in range(spec.foundational_per_topic)]
        f_years = {fid: first_year + j for j, fid in enumerate(foundational)}
        weights_raw = [spec.foundational_per_topic - j for j in range(spec.foundational_per_topic)]
        total_w = sum(weights_raw)
        f_weights = {fid: w / total_w for fid, w in zip(foundational, weights_raw)}
        # cyclic assignment pattern realizing the planted weights in tenths
        pattern: list[int] = []
        for j, w in enumerate(weights_raw):
            pattern.extend([j] * max(1, _round_half_up(10 * w / total_w)))

        per_year: dict[int, tuple[int, int, int]] = {}
        indirect_per_year: dict[int, int] = {}
        follower_plan = []
        for lag in range(spec.n_years):
            year = first_year + lag
            m = _round_half_up(spec.mentioning_per_year * scale)
            p = _linear(spec.p_cite_start, spec.p_cite_end, lag, spec.n_years)
            q = _linear(spec.indirect_start, spec.indirect_end, lag, spec.n_years)
            if self.mode == "exact":
                both = _round_half_up(m * p)
                cite_flags = [True] * both + [False] * (m - both)
            else:
                cite_flags = [bool(rng.random() < p) for _ in range(m)]
                both = sum(cite_flags)
            mention_only = m - both
            if self.mode == "exact":
                n_ind = _round_half_up(mention_only * q)
                indirect_flags = [True] * n_ind + [False] * (mention_only - n_ind)
            else:
                indirect_flags = [bool(rng.random() < q) for _ in range(mention_only)]
                n_ind = sum(indirect_flags)
            cite_only = _round_half_up(spec.cite_only_per_year * scale)
            per_year[year] = (both, cite_only, mention_only)
            indirect_per_year[year] = n_ind
            follower_plan.append((year, cite_flags, indirect_flags, cite_only))

        # intermediaries are cite-only followers at first_year + 1
        n_intermediaries = 2 if spec.indirect_start > 0 or spec.indirect_end > 0 else 0
        if n_intermediaries:
            y = first_year + 1
            if y not in per_year:
                per_year[y] = (0, 0, 0)
            b, c, m_ = per_year[y]
            per_year[y] = (b, c + n_intermediaries, m_)

        canonical = [" ".join(self.tok.stems(" ".join(words))) for words in cp_words]
        cp_totals = self._cp_totals(cp_words, follower_plan)
        leak_jobs = []
        for words, total in zip(cp_words, cp_totals):
            if len(words) > 1:
                for sub_len in range(1, len(words)):
                    for start in range(len(words) - sub_len + 1):
                        block = words[start : start + sub_len]
                        n_leak = max(1, int(math.floor(spec.leak_fraction * total)))
                        leak_jobs.extend([list(block)] for _ in range(n_leak))
        twin_counts = []
        if spec.emit_entropy_controls:
            for total in cp_totals:
                twin_counts.append((self.inventory.next_word(), total))

        return {
            "t": t,
            "label": label,
            "scale": scale,
            "cp_words": cp_words,
            "canonical": canonical,
            "first_year": first_year,
            "foundational": foundational,
            "f_years": f_years,
            "f_weights": f_weights,
            "pattern": pattern,
            "per_year": per_year,
            "indirect_per_year": indirect_per_year,
            "follower_plan": follower_plan,
            "n_intermediaries": n_intermediaries,
            "leak_jobs": leak_jobs,
            "twin_counts": twin_counts,
            "cp_totals": cp_totals,
        }

    def _cp_totals(self, cp_words, follower_plan) -> list[int]:
        """Catchphrase-bearing context counts per catchphrase (round-robin)."""
        totals = [0] * len(cp_words)
        serial = 0
        for _, cite_flags, _, _ in follower_plan:
            for flag in cite_flags:
                if flag:
                    totals[serial % len(cp_words)] += 1
                    serial += 1
        return totals

    # -- per-topic emission --------------------------------------------------

    def _emit_topic(self, plan: dict, partner_twin_jobs: list[str]) -> TopicTruth:
        spec = self.spec
        t = plan["t"]
        label = plan["label"]
        cp_words = plan["cp_words"]
        foundational = plan["foundational"]
        discipline = DISCIPLINES[t % len(DISCIPLINES)]

        # foundational papers
        authors_pool = [self.inventory.next_word().capitalize() for _ in range(8)]
        cp_in_title: dict[str, bool] = {}
        n_with_title = _round_half_up(
            spec.catchphrase_in_title_fraction * len(foundational)
        )
        for j, fid in enumerate(foundational):
            if label == "eponym":
                authors = [w.capitalize() for w in cp_words[0]]
                if j % 2:
                    authors = authors + [authors_pool[0]]
            elif label == "experiment":
                authors = [
                    self.inventory.next_word().capitalize() for _ in range(30 + 2 * (t % 6))
                ]
            else:
                authors = authors_pool[: 3 + (j + t) % 5]
            has_cp = j < n_with_title
            cp_in_title[fid] = has_cp
            title_units = [[self.chaff.next()]]
            if has_cp:
                title_units.append(list(cp_words[0]))
            title = _assemble(title_units, self.chaff)
            abstract = _assemble([[self.bg_word()], [self.bg_word()]], self.chaff)
            self.papers.append(
                PaperRecord(
                    paper_id=fid,
                    year=plan["f_years"][fid],
                    venue=VENUES[j % len(VENUES)],
                    discipline=discipline,
                    title=title,
                    abstract=abstract,
                    authors=tuple(authors),
                    references=(),
                    full_text=_assemble([[self.bg_word()]], self.chaff),
                )
            )
            self.context_count[fid] = 0

        # intermediaries: cite every foundational paper; one is a review
        intermediaries = []
        for j in range(plan["n_intermediaries"]):
            iid = f"t{t:02d}i{j}"
            intermediaries.append(iid)
            self.papers.append(
                PaperRecord(
                    paper_id=iid,
                    year=plan["first_year"] + 1,
                    venue=VENUES[(j + 1) % len(VENUES)],
                    discipline=discipline,
                    title=_assemble([[self.bg_word()]], self.chaff),
                    abstract="",
                    authors=(authors_pool[1], authors_pool[2]),
                    is_book_or_review=(j == 1),
                    references=tuple(foundational),
                    full_text=_assemble([[self.bg_word()], [self.bg_word()]], self.chaff),
                )
            )
            self.add_context(iid, foundational[0], [[self.bg_word()]])
            self.context_count[foundational[0]] += 1

        # followers
        twin_queue = list(partner_twin_jobs)
        serial = 0
        cp_serial = 0
        for year, cite_flags, indirect_flags, cite_only in plan["follower_plan"]:
            mo_index = 0
            for flag in cite_flags:
                if flag:
                    pid = f"t{t:02d}b{serial:05d}"
                    words = cp_words[cp_serial % len(cp_words)]
                    cp_serial += 1
                    fid = foundational[plan["pattern"][serial % len(plan["pattern"])]]
                    refs = (fid, self.bg_paper())
                    text = self.add_context(pid, fid, [list(words), [self.bg_word()]])
                    self.context_count[fid] += 1
                    full_text = text + " " + _assemble([[self.bg_word()]], self.chaff)
                else:
                    pid = f"t{t:02d}m{serial:05d}"
                    words = cp_words[cp_serial % len(cp_words)]
                    cp_serial += 1
                    indirect = indirect_flags[mo_index]
                    mo_index += 1
                    if indirect and intermediaries:
                        target = intermediaries[serial % len(intermediaries)]
                    else:
                        target = self.bg_paper()
                    refs = (target, ) if target == self.bg_paper_ids[0] else (target, self.bg_paper())
                    refs = tuple(dict.fromkeys(refs))
                    self.add_context(pid, target, [[self.bg_word()]])
                    full_text = _assemble(
                        [list(words), [self.bg_word()]], self.chaff
                    )
                self.papers.append(
                    PaperRecord(
                        paper_id=pid,
                        year=year,
                        venue=VENUES[serial % len(VENUES)],
                        discipline=discipline,
                        title=_assemble([[self.chaff.next()]], self.chaff),
                        abstract="",
                        authors=(authors_pool[serial % len(authors_pool)],),
                        references=refs,
                        full_text=full_text,
                    )
                )
                serial += 1
            for _ in range(cite_only):
                pid = f"t{t:02d}c{serial:05d}"
                fid = foundational[plan["pattern"][serial % len(plan["pattern"])]]
                units: list[list[str]] = [[self.bg_word()]]
                if twin_queue:
                    units.append([twin_queue.pop()])
                text = self.add_context(pid, fid, units)
                self.context_count[fid] += 1
                self.papers.append(
                    PaperRecord(
                        paper_id=pid,
                        year=year,
                        venue=VENUES[serial % len(VENUES)],
                        discipline=discipline,
                        title=_assemble([[self.chaff.next()]], self.chaff),
                        abstract="",
                        authors=(authors_pool[serial % len(authors_pool)],),
                        references=(fid,),
                        full_text=text + " " + _assemble([[self.bg_word()]], self.chaff),
                    )
                )
                serial += 1
        # leftover partner twins ride along in dedicated filler contexts
        while twin_queue:
            fid = foundational[0]
            pid = f"t{t:02d}c{serial:05d}"
            text = self.add_context(pid, fid, [[twin_queue.pop()]])
            self.context_count[fid] += 1
            year = plan["first_year"]
            b, c, m_ = plan["per_year"][year]
            plan["per_year"][year] = (b, c + 1, m_)
            self.papers.append(
                PaperRecord(
                    paper_id=pid,
                    year=year,
                    venue=VENUES[serial % len(VENUES)],
                    discipline=discipline,
                    title=_assemble([[self.chaff.next()]], self.chaff),
                    abstract="",
                    authors=(authors_pool[serial % len(authors_pool)],),
                    references=(fid,),
                    full_text=text + " " + _assemble([[self.bg_word()]], self.chaff),
                )
            )
            serial += 1

        twin_map = {}
        if spec.emit_entropy_controls:
            twin_map = {
                canonical: self.tok.stems(word)[0]
                for canonical, (word, _) in zip(plan["canonical"], plan["twin_counts"])
            }
        return TopicTruth(
            key=t,
            name=f"topic{t:02d}",
            catchphrases=list(plan["canonical"]),
            foundational=list(foundational),
            foundational_years=dict(plan["f_years"]),
            foundational_weights=dict(plan["f_weights"]),
            first_year=plan["first_year"],
            class_label=label,
            scale=plan["scale"],
            per_year=dict(plan["per_year"]),
            indirect_per_year=dict(plan["indirect_per_year"]),
            twin_word_by_catchphrase=twin_map,
            control_paper_by_foundational={},
            cp_in_title_by_foundational=cp_in_title,
            intermediaries=list(intermediaries),
        )

    # -- background, controls, noise ----------------------------------------

    def _emit_background(self, leak_jobs: list[list[str]], twin_jobs: list[list[str]]) -> None:
        spec = self.spec
        for i, pid in enumerate(self.bg_paper_ids):
            self.papers.append(
                PaperRecord(
                    paper_id=pid,
                    year=1960 + i % 30,
                    venue=VENUES[i % len(VENUES)],
                    discipline=DISCIPLINES[i % len(DISCIPLINES)],
                    title=_assemble([[self.bg_word()]], self.chaff),
                    abstract="",
                    authors=(f"Author{i % 40}",),
                    references=(),
                    full_text=_assemble([[self.bg_word()], [self.bg_word()]], self.chaff),
                )
            )
        jobs: list[list[str]] = []
        jobs.extend(leak_jobs)
        jobs.extend(twin_jobs)
        per_context = 3
        n_contexts = max(spec.background_contexts, (len(jobs) + per_context - 1) // per_context)
        job_index = 0
        for i in range(n_contexts):
            units = [[self.bg_word()] for _ in range(spec.background_words_per_context)]
            for _ in range(per_context):
                if job_index < len(jobs):
                    units.append(list(jobs[job_index]))
                    job_index += 1
            cited = self.bg_paper()
            citing = self.noise_citer(cited)
            self.add_context(citing, cited, units)

    def _emit_controls(self, plan: dict, truth: TopicTruth) -> None:
        """Per foundational paper, a non-foundational twin with the same
        number of citing contexts but diverse, unconcentrated text."""
        spec = self.spec
        t = plan["t"]
        for j, fid in enumerate(plan["foundational"]):
            cid = f"t{t:02d}x{j}"
            truth.control_paper_by_foundational[fid] = cid
            self.papers.append(
                PaperRecord(
                    paper_id=cid,
                    year=plan["f_years"][fid],
                    venue=VENUES[j % len(VENUES)],
                    discipline=DISCIPLINES[t % len(DISCIPLINES)],
                    title=_assemble([[self.bg_word()]], self.chaff),
                    abstract="",
                    authors=(f"Author{t % 40}",),
                    references=(),
                    full_text=_assemble([[self.bg_word()]], self.chaff),
                )
            )
            for _ in range(self.context_count[fid]):
                citing = self.noise_citer(cid)
                units = [[self.bg_word()] for _ in range(3)]
                self.add_context(citing, cid, units)

    def _emit_noise_papers(self) -> None:
        spec = self.spec
        for i in range(spec.noise_papers):
            full_text = None
            if i % 3:
                full_text = _assemble([[self.bg_word()]], self.chaff)
            self.papers.append(
                PaperRecord(
                    paper_id=f"noise{i:04d}",
                    year=1985 + i % 25,
                    venue=VENUES[i % len(VENUES)],
                    discipline=DISCIPLINES[i % len(DISCIPLINES)],
                    title=_assemble([[self.bg_word()]], self.chaff),
                    abstract="",
                    authors=(f"Author{i % 40}",),
                    references=tuple(sorted(self.noise_refs[i])),
                    full_text=full_text,
                )
            )


def generate(
    spec: GeneratorSpec,
    mode: str | None = None,
    seed: int | None = None,
    tokenizer: Tokenizer | None = None,
) -> SyntheticCorpus:
    """Build a synthetic corpus plus its ground truth; deterministic per seed."""
    spec.validate()
    mode = mode or spec.mode
    seed = spec.seed if seed is None else seed
    if mode not in ("exact", "sampled"):
        raise GenerationError(f"mode must be 'exact' or 'sampled', got {mode!r}")
    builder = _Builder(spec, mode, seed, tokenizer or default_tokenizer())
    return builder.build()


def generate_files(
    spec: GeneratorSpec,
    corpus_path: str | Path,
    truth_path: str | Path,
    mode: str | None = None,
    seed: int | None = None,
) -> SyntheticCorpus:
    result = generate(spec, mode=mode, seed=seed)
    result.write(corpus_path, truth_path)
    return result


# ---------------------------------------------------------------------------
# self-check: naive reclassification of the emitted corpus
# ---------------------------------------------------------------------------

def _contains_sequence(stems: list[str], pattern: list[str]) -> bool:
    n = len(pattern)
    if n == 0 or n > len(stems):
        return False
    for start in range(len(stems) - n + 1):
        if stems[start : start + n] == pattern:
            return True
    return False


def _self_check(result: SyntheticCorpus, tokenizer: Tokenizer) -> None:
    papers = result.papers
    truth = result.truth
    stem_cache: dict[str, list[str]] = {}
    stem_sets: dict[str, frozenset[str]] = {}
    for paper in papers:
        if paper.full_text is not None:
            stems = tokenizer.stems(paper.full_text)
            stem_cache[paper.paper_id] = stems
            stem_sets[paper.paper_id] = frozenset(stems)

    for topic in truth.topics:
        foundational = set(topic.foundational)
        patterns = [cp.split(" ") for cp in topic.catchphrases]
        first_stems = {p[0] for p in patterns}
        counted: dict[int, list[int]] = {}
        indirect: dict[int, int] = {}
        intermediaries = set(topic.intermediaries)
        for paper in papers:
            if paper.paper_id in foundational:
                continue
            cites = bool(foundational.intersection(paper.references))
            mentions = False
            stems = stem_cache.get(paper.paper_id)
            if stems is not None and first_stems & stem_sets[paper.paper_id]:
                mentions = any(_contains_sequence(stems, p) for p in patterns)
            if not (cites or mentions):
                continue
            counts = counted.setdefault(paper.year, [0, 0, 0])
            if cites and mentions:
                counts[0] += 1
            elif cites:
                counts[1] += 1
            else:
                counts[2] += 1
                if intermediaries.intersection(paper.references):
                    indirect[paper.year] = indirect.get(paper.year, 0) + 1
        recount = {y: tuple(c) for y, c in counted.items()}
        planted = {y: c for y, c in topic.per_year.items() if c != (0, 0, 0)}
        if recount != planted:
            raise GenerationError(
                f"self-check failed for {topic.name}: planted {planted} != recount {recount}"
            )
        planted_ind = {y: c for y, c in topic.indirect_per_year.items() if c}
        if indirect != planted_ind:
            raise GenerationError(
                f"self-check failed for {topic.name} indirect counts: "
                f"planted {planted_ind} != recount {indirect}"
            )

    # frequency twins must match catchphrase context-occurrence counts exactly
    ctx_stems = [tokenizer.stems(ctx.text) for ctx in result.contexts]
    counts: dict[str, int] = {}
    for stems in ctx_stems:
        for topic in truth.topics:
            for cp, twin in topic.twin_word_by_catchphrase.items():
                pattern = cp.split(" ")
                for start in range(len(stems)):
                    if stems[start : start + len(pattern)] == pattern:
                        counts[cp] = counts.get(cp, 0) + 1
                if twin:
                    counts[twin] = counts.get(twin, 0) + stems.count(twin)
    for topic in truth.topics:
        for cp, twin in topic.twin_word_by_catchphrase.items():
            if counts.get(cp, 0) != counts.get(twin, 0):
                raise GenerationError(
                    f"self-check failed: twin frequency mismatch for {cp!r}: "
                    f"{counts.get(cp, 0)} vs {counts.get(twin, 0)}"
                )


# ---------------------------------------------------------------------------
# planted scaling counts (for regression recovery, no corpus needed)
# ---------------------------------------------------------------------------

def make_scaling_counts(
    n_topics: int,
    exponent: float = 0.763,
    intercept: float = -0.5,
    noise_sigma: float = 0.25,
    c_range: tuple[float, float] = (50.0, 5000.0),
    seed: int = 0,
) -> tuple[list[int], list[int]]:
    """Per-topic (explicit, hidden) counts obeying h ~ c^exponent with
    log-normal noise; the ground-truth slope is `exponent`."""
    if n_topics < 3:
        raise GenerationError("need at least 3 topics for a scaling sample")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    log_c = rng.uniform(math.log10(c_range[0]), math.log10(c_range[1]), size=n_topics)
    noise = rng.normal(0.0, noise_sigma, size=n_topics)
    log_h = intercept + exponent * log_c + noise
    c = [max(1, int(round(10.0 ** v))) for v in log_c]
    h = [max(1, int(round(10.0 ** v))) for v in log_h]
    return c, h
