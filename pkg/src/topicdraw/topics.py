"""Latent Dirichlet allocation by collapsed Gibbs sampling.

One strictly sequential chain: documents are visited in (year, seq)
order and tokens left to right, so a seed fully determines the result.
The per-sweep token loop is compiled with numba when available and runs
as plain Python otherwise; both paths consume the same pre-drawn
uniform variates, so they produce identical chains.

phi and theta are point estimates from the final sweep's counts with
the usual alpha/beta smoothing.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .condenser import CondensedCorpus
from .corpus import CorpusHandle, Document, StopwordList
from .errors import ConfigError, EmptyResultError


def _gibbs_sweep(doc_of, word_of, z, n_dk, n_kw, n_k, alpha, beta, u, p):
    K = n_kw.shape[0]
    V = n_kw.shape[1]
    vbeta = V * beta
    for i in range(len(word_of)):
        d = doc_of[i]
        w = word_of[i]
        k_old = z[i]
        n_dk[d, k_old] -= 1
        n_kw[k_old, w] -= 1
        n_k[k_old] -= 1
        total = 0.0
        for k in range(K):
            p[k] = (n_dk[d, k] + alpha) * (n_kw[k, w] + beta) / (n_k[k] + vbeta)
            total += p[k]
        r = u[i] * total
        acc = 0.0
        k_new = K - 1
        for k in range(K):
            acc += p[k]
            if r < acc:
                k_new = k
                break
        z[i] = k_new
        n_dk[d, k_new] += 1
        n_kw[k_new, w] += 1
        n_k[k_new] += 1


try:
    from numba import njit

    _gibbs_sweep = njit(cache=True)(_gibbs_sweep)
except ImportError:  # pragma: no cover - numba is a declared dependency
    pass


@dataclass
class LdaConfig:
    seed: int
    k: int = 20
    alpha: float | None = None  # resolved to 50/k
    beta: float = 0.01
    iterations: int = 1000
    burn_in: int = 200
    min_doc_len: int = 1

    def resolved_alpha(self) -> float:
        return 50.0 / self.k if self.alpha is None else self.alpha

    def validate(self) -> None:
        if self.k < 1:
            raise ConfigError(f"topic count must be >= 1, got {self.k}")
        if self.resolved_alpha() <= 0 or self.beta <= 0:
            raise ConfigError("alpha and beta must be > 0")
        if self.iterations < 1:
            raise ConfigError("iterations must be >= 1")
        if not 0 <= self.burn_in < self.iterations:
            raise ConfigError("burn_in must satisfy 0 <= burn_in < iterations")
        if self.min_doc_len < 1:
            raise ConfigError("min_doc_len must be >= 1")

    def as_dict(self) -> dict:
        return {
            "k": self.k,
            "alpha": self.resolved_alpha(),
            "beta": self.beta,
            "iterations": self.iterations,
            "burn_in": self.burn_in,
            "seed": self.seed,
            "min_doc_len": self.min_doc_len,
        }


@dataclass
class TopicModelResult:
    config: LdaConfig
    vocabulary: list[str]
    doc_refs: list[tuple[int, int]]
    phi: np.ndarray
    theta: np.ndarray
    assignments: list[np.ndarray]
    log_likelihood: list[float]
    trained_on: str

    def top_words(self, topic: int, n: int = 12) -> list[str]:
        return top_words(self, topic, n)


@dataclass
class PrevalenceSeries:
    """Per-year mean document-topic mass."""

    points: list[tuple[int, np.ndarray]]

    def as_dict(self) -> dict:
        return {str(year): [float(v) for v in vec] for year, vec in self.points}


def _collect_documents(
    source: CondensedCorpus | CorpusHandle,
) -> tuple[list[Document], str]:
    if isinstance(source, CondensedCorpus):
        docs = list(source.documents())
        trained_on = source.condensed_id
    else:
        docs = list(source.documents())
        trained_on = source.fingerprint
    docs.sort(key=lambda d: (d.year, d.seq))
    return docs, trained_on


def train_lda(
    source: CondensedCorpus | CorpusHandle,
    stop: StopwordList | None,
    cfg: LdaConfig,
    on_sweep: Callable[[int, np.ndarray, np.ndarray, np.ndarray, np.ndarray], None] | None = None,
) -> TopicModelResult:
    """Run the Gibbs chain and return final-sweep estimates.

    Stopword tokens are dropped first, then documents shorter than
    ``min_doc_len``. ``on_sweep(sweep, z, n_dk, n_kw, n_k)`` is a
    diagnostic hook invoked after every sweep.
    """
    cfg.validate()
    docs, trained_on = _collect_documents(source)
    if not docs:
        raise EmptyResultError("no documents to train on")
    vocab = docs[0].vocab

    stop_mask = np.zeros(len(vocab), dtype=bool)
    for surface in (stop.words if stop else ()):
        wid = vocab.get_id(surface)
        if wid is not None:
            stop_mask[wid] = True

    kept_refs: list[tuple[int, int]] = []
    kept_tokens: list[np.ndarray] = []
    for doc in docs:
        ids = doc.word_ids[~stop_mask[doc.word_ids]]
        if len(ids) < cfg.min_doc_len:
            continue
        kept_refs.append((doc.year, doc.seq))
        kept_tokens.append(ids)

    if not kept_tokens:
        raise EmptyResultError("no documents left after stopword and length filtering")
    all_ids = np.concatenate(kept_tokens)
    effective = np.unique(all_ids)
    if len(effective) < 2:
        raise EmptyResultError("fewer than 2 vocabulary items left after filtering")
    if cfg.k > len(effective):
        warnings.warn(
            f"topic count {cfg.k} exceeds effective vocabulary {len(effective)}",
            stacklevel=2,
        )

    # Remap to a dense sampler vocabulary.
    remap = np.full(int(effective.max()) + 1, -1, dtype=np.int32)
    remap[effective] = np.arange(len(effective), dtype=np.int32)
    surfaces = [vocab.surface_of(int(w)) for w in effective]

    D = len(kept_tokens)
    K = cfg.k
    V = len(effective)
    alpha = cfg.resolved_alpha()
    beta = cfg.beta

    doc_of = np.concatenate(
        [np.full(len(t), d, dtype=np.int32) for d, t in enumerate(kept_tokens)]
    )
    word_of = remap[all_ids]
    n_tokens = len(word_of)

    rng = np.random.default_rng(cfg.seed)
    z = rng.integers(0, K, n_tokens, dtype=np.int32)
    n_dk = np.zeros((D, K), dtype=np.int32)
    n_kw = np.zeros((K, V), dtype=np.int32)
    n_k = np.zeros(K, dtype=np.int32)
    np.add.at(n_dk, (doc_of, z), 1)
    np.add.at(n_kw, (z, word_of), 1)
    np.add.at(n_k, z, 1)

    p = np.empty(K, dtype=np.float64)
    doc_len = np.bincount(doc_of, minlength=D).astype(np.int64)
    ll_trace: list[float] = []
    for sweep in range(1, cfg.iterations + 1):
        u = rng.random(n_tokens)
        _gibbs_sweep(doc_of, word_of, z, n_dk, n_kw, n_k, alpha, beta, u, p)
        ll_trace.append(_joint_log_likelihood(n_dk, n_kw, n_k, doc_len, alpha, beta))
        if on_sweep is not None:
            on_sweep(sweep, z, n_dk, n_kw, n_k)

    phi = (n_kw + beta) / (n_k + V * beta)[:, None]
    theta = (n_dk + alpha) / (doc_len + K * alpha)[:, None]
    offsets = np.cumsum([0] + [len(t) for t in kept_tokens])
    assignments = [z[offsets[d]:offsets[d + 1]].copy() for d in range(D)]
    return TopicModelResult(
        cfg, surfaces, kept_refs, phi, theta, assignments, ll_trace, trained_on
    )


def _joint_log_likelihood(n_dk, n_kw, n_k, doc_len, alpha, beta) -> float:
    K, V = n_kw.shape
    D = n_dk.shape[0]
    word_part = (
        K * gammaln(V * beta)
        - gammaln(n_k + V * beta).sum()
        + gammaln(n_kw + beta).sum()
        - K * V * gammaln(beta)
    )
    doc_part = (
        D * gammaln(K * alpha)
        - gammaln(doc_len + K * alpha).sum()
        + gammaln(n_dk + alpha).sum()
        - D * K * gammaln(alpha)
    )
    return float(word_part + doc_part)


def top_words(result: TopicModelResult, topic: int, n: int = 12) -> list[str]:
    """The n highest-probability words of one topic; ties by word id."""
    K, V = result.phi.shape
    if not 0 <= topic < K:
        raise ConfigError(f"topic {topic} out of range 0..{K - 1}")
    order = np.lexsort((np.arange(V), -result.phi[topic]))[:n]
    return [result.vocabulary[i] for i in order]


def summary_words(result: TopicModelResult, n: int = 12) -> list[str]:
    """Prevalence-weighted average of topic rows as one pseudo-ranking."""
    weights = result.theta.mean(axis=0)
    scores = weights @ result.phi
    order = np.lexsort((np.arange(len(scores)), -scores))[:n]
    return [result.vocabulary[i] for i in order]


def prevalence(result: TopicModelResult, condensed: CondensedCorpus) -> PrevalenceSeries:
    """Mean theta per year over the documents the model was trained on."""
    if result.trained_on != condensed.condensed_id:
        raise ConfigError("model was not trained on this condensed corpus")
    years = sorted({year for year, _ in result.doc_refs})
    points = []
    ref_years = np.array([year for year, _ in result.doc_refs])
    for year in years:
        rows = result.theta[ref_years == year]
        if len(rows):
            points.append((year, rows.mean(axis=0)))
    return PrevalenceSeries(points)


def _fixed6(x: float) -> float:
    return round(float(x), 6)


def model_json(result: TopicModelResult, summary: bool = False, top_n: int = 12) -> dict:
    """Canonical model artifact (CLI --out and service job result)."""
    K = result.phi.shape[0]
    payload = {
        "config": result.config.as_dict(),
        "trained_on": result.trained_on,
        "num_documents": len(result.doc_refs),
        "num_tokens": int(sum(len(a) for a in result.assignments)),
        "vocabulary": result.vocabulary,
        "documents": [[year, seq] for year, seq in result.doc_refs],
        "top_words": [top_words(result, t, top_n) for t in range(K)],
        "phi": [[_fixed6(v) for v in row] for row in result.phi],
        "theta": [[_fixed6(v) for v in row] for row in result.theta],
        "log_likelihood": result.log_likelihood,
    }
    if summary:
        payload["summary"] = summary_words(result, top_n)
    return payload
