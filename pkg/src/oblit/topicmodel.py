"""Latent-topic assignment for occurrence tuples via collapsed Gibbs sampling.

Each (n-gram, cited-paper) tuple carries a latent topic label. A sweep
resamples every label from the standard collapsed conditional

    p(z_i = k)  ∝  (n(d,k) - i + alpha) * (n(k,w) - i + beta) / (n(k) - i + V*beta)

where "- i" excludes the tuple being resampled and V is the vocabulary size.
After burn-in, every lag-th state is pooled (counts averaged) into the final
model, from which P(z|w) and P(d|z) are estimated with binomial
normal-approximation 95% half-widths.

The inner sweep is compiled with numba when available; the uniform variates
it consumes are drawn outside the kernel from a seeded PCG64 stream, so
results are bit-identical with or without compilation.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .artifacts import ArtifactError, read_artifact, write_artifact
from .corpus.occurrences import OccurrenceTuple

Z95 = 1.96

MODEL_KIND = "topic-model"
MODEL_VERSION = 1


@dataclass(frozen=True)
class LdaConfig:
    num_topics: int = 400
    alpha: float | None = None  # None -> 50 / num_topics
    beta: float = 0.01
    burn_in_sweeps: int = 500
    retained_samples: int = 20
    sample_lag_sweeps: int = 10
    seed: int = 0
    chains: int = 1

    def __post_init__(self):
        if self.num_topics < 1:
            raise ValueError("num_topics must be >= 1")
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.beta <= 0:
            raise ValueError("beta must be positive")
        if self.burn_in_sweeps < 1 or self.sample_lag_sweeps < 1:
            raise ValueError("sweep counts must be >= 1")
        if self.retained_samples < 1:
            raise ValueError("retained_samples must be >= 1")
        if self.chains < 1:
            raise ValueError("chains must be >= 1")

    def effective_alpha(self) -> float:
        return 50.0 / self.num_topics if self.alpha is None else self.alpha


def _sweep(w_idx, d_idx, z, n_dz, n_zw, n_z, alpha, beta, v_beta, uniforms, weights):
    num_topics = n_z.shape[0]
    for i in range(w_idx.shape[0]):
        w = w_idx[i]
        d = d_idx[i]
        old = z[i]
        n_dz[d, old] -= 1
        n_zw[old, w] -= 1
        n_z[old] -= 1
        total = 0.0
        for k in range(num_topics):
            p = (n_dz[d, k] + alpha) * (n_zw[k, w] + beta) / (n_z[k] + v_beta)
            weights[k] = p
            total += p
        r = uniforms[i] * total
        acc = 0.0
        new = num_topics - 1
        for k in range(num_topics):
            acc += weights[k]
            if r < acc:
                new = k
                break
        z[i] = new
        n_dz[d, new] += 1
        n_zw[new, w] += 1
        n_z[new] += 1


_sweep_py = _sweep
try:  # pragma: no cover - exercised implicitly everywhere
    from numba import njit

    _sweep = njit(cache=True, nogil=True)(_sweep)
except ImportError:  # pragma: no cover
    pass


class TopicModel:
    """Pooled assignment counts and the probability estimates derived from them."""

    def __init__(
        self,
        config: LdaConfig,
        vocab: Sequence[str],
        doc_ids: Sequence[str],
        pooled_zw: np.ndarray,
        pooled_dz: np.ndarray,
        n_w: np.ndarray,
        n_d: np.ndarray,
        wd_counts: dict[tuple[int, int], int],
        convergence_tv: float | None = None,
    ):
        self.config = config
        self.vocab = tuple(vocab)
        self.doc_ids = tuple(doc_ids)
        self.pooled_zw = pooled_zw
        self.pooled_dz = pooled_dz
        self.pooled_z = pooled_zw.sum(axis=1)
        self.n_w = n_w
        self.n_d = n_d
        self.wd_counts = wd_counts
        self.convergence_tv = convergence_tv
        self._w_index = {w: i for i, w in enumerate(self.vocab)}
        self._d_index = {d: i for i, d in enumerate(self.doc_ids)}
        self._by_w: dict[int, dict[int, int]] | None = None
        self._by_d: dict[int, dict[int, int]] | None = None

    # -- lookups ---------------------------------------------------------

    @property
    def num_topics(self) -> int:
        return self.pooled_zw.shape[0]

    @property
    def n_tuples(self) -> int:
        return int(self.n_w.sum())

    def has_ngram(self, ngram: str) -> bool:
        return ngram in self._w_index

    def has_doc(self, paper_id: str) -> bool:
        return paper_id in self._d_index

    def _wi(self, ngram: str) -> int:
        try:
            return self._w_index[ngram]
        except KeyError:
            raise ValueError(f"unknown n-gram {ngram!r}") from None

    def _di(self, paper_id: str) -> int:
        try:
            return self._d_index[paper_id]
        except KeyError:
            raise ValueError(f"unknown document {paper_id!r}") from None

    def occurrence_count(self, ngram: str) -> int:
        return int(self.n_w[self._wi(ngram)])

    def doc_occurrence_count(self, paper_id: str) -> int:
        return int(self.n_d[self._di(paper_id)])

    # -- probability estimates -------------------------------------------

    def topic_distribution(self, ngram: str) -> np.ndarray:
        """P(z|w) over all topics for one n-gram."""
        wi = self._wi(ngram)
        return self.pooled_zw[:, wi] / self.n_w[wi]

    def doc_distribution(self, topic: int) -> np.ndarray:
        """P(d|z) over all documents for one topic with n(z) > 0."""
        self._check_topic(topic)
        return self.pooled_dz[:, topic] / self.pooled_z[topic]

    def _check_topic(self, topic: int) -> None:
        if not (0 <= topic < self.num_topics):
            raise ValueError(f"unknown topic {topic}")
        if self.pooled_z[topic] <= 0:
            raise ValueError(f"topic {topic} has no pooled occurrences")

    def p_topic_given_ngram(self, ngram: str, topic: int) -> tuple[float, float]:
        """Estimate and 95% half-width of P(z=topic | w=ngram)."""
        wi = self._wi(ngram)
        if not (0 <= topic < self.num_topics):
            raise ValueError(f"unknown topic {topic}")
        n = float(self.n_w[wi])
        p = float(self.pooled_zw[topic, wi]) / n
        return p, Z95 * math.sqrt(max(p * (1.0 - p), 0.0) / n)

    def p_doc_given_topic(self, paper_id: str, topic: int) -> tuple[float, float]:
        """Estimate and 95% half-width of P(d=paper | z=topic)."""
        self._check_topic(topic)
        di = self._di(paper_id)
        n = float(self.pooled_z[topic])
        p = float(self.pooled_dz[di, topic]) / n
        return p, Z95 * math.sqrt(max(p * (1.0 - p), 0.0) / n)

    # -- co-occurrence views (topic-free, fixed by the input tuples) ------

    def _wd_views(self):
        if self._by_w is None:
            by_w: dict[int, dict[int, int]] = {}
            by_d: dict[int, dict[int, int]] = {}
            for (wi, di), count in self.wd_counts.items():
                by_w.setdefault(wi, {})[di] = count
                by_d.setdefault(di, {})[wi] = count
            self._by_w, self._by_d = by_w, by_d
        return self._by_w, self._by_d

    def doc_counts_for_ngram(self, ngram: str) -> dict[str, int]:
        wi = self._wi(ngram)
        by_w, _ = self._wd_views()
        return {self.doc_ids[di]: c for di, c in by_w.get(wi, {}).items()}

    def ngram_counts_for_doc(self, paper_id: str) -> dict[str, int]:
        di = self._di(paper_id)
        _, by_d = self._wd_views()
        return {self.vocab[wi]: c for wi, c in by_d.get(di, {}).items()}

    # -- serialization -----------------------------------------------------

    def save(self, path: str | Path) -> None:
        def records():
            cfg = {
                "t": "config",
                "num_topics": self.config.num_topics,
                "alpha": self.config.alpha,
                "beta": self.config.beta,
                "burn_in_sweeps": self.config.burn_in_sweeps,
                "retained_samples": self.config.retained_samples,
                "sample_lag_sweeps": self.config.sample_lag_sweeps,
                "seed": self.config.seed,
                "chains": self.config.chains,
            }
            yield cfg
            yield {"t": "meta", "convergence_tv": self.convergence_tv}
            yield {"t": "vocab", "v": list(self.vocab)}
            yield {"t": "docs", "v": list(self.doc_ids)}
            yield {"t": "nw", "v": [int(x) for x in self.n_w]}
            yield {"t": "nd", "v": [int(x) for x in self.n_d]}
            for k in range(self.num_topics):
                row = self.pooled_zw[k]
                for wi in np.nonzero(row)[0]:
                    yield {"t": "zw", "z": int(k), "w": int(wi), "c": float(row[wi])}
            for di in range(len(self.doc_ids)):
                row = self.pooled_dz[di]
                for k in np.nonzero(row)[0]:
                    yield {"t": "dz", "d": int(di), "z": int(k), "c": float(row[k])}
            for (wi, di) in sorted(self.wd_counts):
                yield {"t": "wd", "w": int(wi), "d": int(di), "c": self.wd_counts[(wi, di)]}

        write_artifact(path, MODEL_KIND, MODEL_VERSION, records())

    @classmethod
    def load(cls, path: str | Path) -> "TopicModel":
        config = None
        meta: dict = {}
        vocab: list[str] = []
        docs: list[str] = []
        n_w = n_d = None
        zw_entries: list[dict] = []
        dz_entries: list[dict] = []
        wd_counts: dict[tuple[int, int], int] = {}
        for rec in read_artifact(path, MODEL_KIND, MODEL_VERSION):
            t = rec["t"]
            if t == "config":
                config = LdaConfig(
                    num_topics=rec["num_topics"],
                    alpha=rec["alpha"],
                    beta=rec["beta"],
                    burn_in_sweeps=rec["burn_in_sweeps"],
                    retained_samples=rec["retained_samples"],
                    sample_lag_sweeps=rec["sample_lag_sweeps"],
                    seed=rec["seed"],
                    chains=rec["chains"],
                )
            elif t == "meta":
                meta = rec
            elif t == "vocab":
                vocab = rec["v"]
            elif t == "docs":
                docs = rec["v"]
            elif t == "nw":
                n_w = np.asarray(rec["v"], dtype=np.int64)
            elif t == "nd":
                n_d = np.asarray(rec["v"], dtype=np.int64)
            elif t == "zw":
                zw_entries.append(rec)
            elif t == "dz":
                dz_entries.append(rec)
            elif t == "wd":
                wd_counts[(rec["w"], rec["d"])] = rec["c"]
            else:
                raise ArtifactError(f"{path}: unknown record type {t!r}")
        if config is None or n_w is None or n_d is None:
            raise ArtifactError(f"{path}: incomplete model dump")
        pooled_zw = np.zeros((config.num_topics, len(vocab)))
        for rec in zw_entries:
            pooled_zw[rec["z"], rec["w"]] = rec["c"]
        pooled_dz = np.zeros((len(docs), config.num_topics))
        for rec in dz_entries:
            pooled_dz[rec["d"], rec["z"]] = rec["c"]
        return cls(
            config, vocab, docs, pooled_zw, pooled_dz, n_w, n_d, wd_counts,
            convergence_tv=meta.get("convergence_tv"),
        )


def _chain_seed(config: LdaConfig, chain: int) -> np.random.SeedSequence:
    # Documented derivation: chain c of a model seeded s draws from
    # SeedSequence((s, c)).
    return np.random.SeedSequence((config.seed, chain))


def _assert_state_consistent(w_idx, d_idx, z, n_dz, n_zw, n_z) -> None:
    K, V = n_zw.shape
    ref_zw = np.zeros((K, V), dtype=np.int64)
    np.add.at(ref_zw, (z, w_idx), 1)
    ref_dz = np.zeros(n_dz.shape, dtype=np.int64)
    np.add.at(ref_dz, (d_idx, z), 1)
    if not (
        np.array_equal(ref_zw, n_zw)
        and np.array_equal(ref_dz, n_dz)
        and np.array_equal(ref_zw.sum(axis=1), n_z)
    ):
        raise AssertionError("count tables inconsistent with assignments")


def _train_chain(
    w_idx: np.ndarray,
    d_idx: np.ndarray,
    num_docs: int,
    vocab_size: int,
    config: LdaConfig,
    chain: int,
    check_invariants: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    num_topics = config.num_topics
    alpha = config.effective_alpha()
    beta = config.beta
    v_beta = vocab_size * beta
    rng = np.random.Generator(np.random.PCG64(_chain_seed(config, chain)))
    n_tuples = w_idx.shape[0]

    z = rng.integers(0, num_topics, size=n_tuples, dtype=np.int64)
    n_zw = np.zeros((num_topics, vocab_size), dtype=np.int64)
    n_dz = np.zeros((num_docs, num_topics), dtype=np.int64)
    np.add.at(n_zw, (z, w_idx), 1)
    np.add.at(n_dz, (d_idx, z), 1)
    n_z = n_zw.sum(axis=1)
    weights = np.empty(num_topics, dtype=np.float64)

    def run_sweep():
        uniforms = rng.random(n_tuples)
        _sweep(w_idx, d_idx, z, n_dz, n_zw, n_z, alpha, beta, v_beta, uniforms, weights)
        if check_invariants:
            _assert_state_consistent(w_idx, d_idx, z, n_dz, n_zw, n_z)

    for _ in range(config.burn_in_sweeps):
        run_sweep()
    pooled_zw = np.zeros((num_topics, vocab_size), dtype=np.float64)
    pooled_dz = np.zeros((num_docs, num_topics), dtype=np.float64)
    for _ in range(config.retained_samples):
        for _ in range(config.sample_lag_sweeps):
            run_sweep()
        pooled_zw += n_zw
        pooled_dz += n_dz
    pooled_zw /= config.retained_samples
    pooled_dz /= config.retained_samples
    return pooled_zw, pooled_dz


def gibbs_train(
    tuples: Sequence[OccurrenceTuple],
    config: LdaConfig,
    threads: int = 1,
    check_invariants: bool = False,
) -> TopicModel:
    """Train a topic model; deterministic given config.seed.

    With config.chains > 1 the extra chains feed a convergence diagnostic
    (max over n-grams of the total-variation distance between per-chain
    P(.|w) after optimal label matching); only chain 0 is pooled into the
    returned model.
    """
    if not tuples:
        raise ValueError("cannot train on an empty tuple list")
    if config.num_topics > len(tuples):
        raise ValueError(
            f"num_topics {config.num_topics} exceeds tuple count {len(tuples)}"
        )

    vocab = sorted({t.ngram for t in tuples})
    doc_ids = sorted({t.cited_id for t in tuples})
    w_index = {w: i for i, w in enumerate(vocab)}
    d_index = {d: i for i, d in enumerate(doc_ids)}
    w_idx = np.fromiter((w_index[t.ngram] for t in tuples), dtype=np.int64, count=len(tuples))
    d_idx = np.fromiter((d_index[t.cited_id] for t in tuples), dtype=np.int64, count=len(tuples))

    n_w = np.bincount(w_idx, minlength=len(vocab)).astype(np.int64)
    n_d = np.bincount(d_idx, minlength=len(doc_ids)).astype(np.int64)
    wd_counts: dict[tuple[int, int], int] = {}
    for wi, di in zip(w_idx, d_idx):
        key = (int(wi), int(di))
        wd_counts[key] = wd_counts.get(key, 0) + 1

    def train(chain: int):
        return _train_chain(
            w_idx, d_idx, len(doc_ids), len(vocab), config, chain, check_invariants
        )

    if config.chains == 1:
        results = [train(0)]
    else:
        workers = max(1, min(threads, config.chains))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(train, range(config.chains)))

    pooled_zw, pooled_dz = results[0]
    convergence = None
    if config.chains > 1:
        per_chain = [
            TopicModel(config, vocab, doc_ids, zw, dz, n_w, n_d, wd_counts)
            for zw, dz in results
        ]
        convergence = convergence_diagnostic(per_chain)
    return TopicModel(
        config, vocab, doc_ids, pooled_zw, pooled_dz, n_w, n_d, wd_counts,
        convergence_tv=convergence,
    )


def convergence_diagnostic(models: Sequence[TopicModel]) -> float:
    """Max over n-grams of the TV distance between per-chain P(.|w).

    Later chains are label-matched onto the first with the Hungarian
    algorithm before distances are taken.
    """
    from scipy.optimize import linear_sum_assignment

    if len(models) < 2:
        raise ValueError("need at least two chains to diagnose convergence")
    base = models[0]
    p_base = base.pooled_zw / base.n_w[None, :]
    worst = 0.0
    for other in models[1:]:
        p_other = other.pooled_zw / other.n_w[None, :]
        cost = np.abs(p_base[:, None, :] - p_other[None, :, :]).sum(axis=2)
        _, perm = linear_sum_assignment(cost)
        tv = 0.5 * np.abs(p_base - p_other[perm]).sum(axis=0)
        worst = max(worst, float(tv.max()))
    return worst
