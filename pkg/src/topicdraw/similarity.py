"""Sparse PPMI word vectors and top-k cosine neighbor queries.

Each word's vector lives in a 2V-dimensional space: left and right
contexts are distinct dimensions (``dim = 2 * context_id + side``),
because the window rule is side-asymmetric. Entries are positive
pointwise mutual information over the side-specific pair space; zero
and negative PMI dimensions are dropped, which keeps vectors sparse
and well-defined. Queries are exact scans, never approximate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, UnknownWordError
from .window_stats import CountStore

__all__ = [
    "PmiVector",
    "Neighbor",
    "SimilarWordSet",
    "dim_of",
    "pmi",
    "pmi_vector",
    "ppmi_matrix",
    "cosine",
    "top_k_similar",
    "similar_json",
]


def dim_of(context_id: int, side: int) -> int:
    return 2 * context_id + side


@dataclass
class PmiVector:
    """Sparse PPMI vector: dimension ids ascending, positive values only."""

    word_id: int
    dims: np.ndarray
    values: np.ndarray
    norm: float = field(init=False)

    def __post_init__(self):
        self.norm = float(np.sqrt(np.dot(self.values, self.values)))

    def __len__(self) -> int:
        return len(self.dims)


def pmi(target: int, context_dim: int, store: CountStore) -> float:
    """Pointwise mutual information of (target, context, side).

    log(N_side * c(x,y,side) / (c_t(y,side) * c_c(x,side))); an unseen
    pair yields -inf (the dimension is simply absent from PPMI vectors).
    """
    V = len(store.vocab)
    if not 0 <= target < V:
        raise UnknownWordError(str(target))
    if not 0 <= context_dim < 2 * V:
        raise UnknownWordError(str(context_dim), detail="unknown context dimension")
    side = context_dim & 1
    context = context_dim >> 1
    count = store.pair_count(target, context, side)
    if count == 0:
        return -math.inf
    n_side = store.total_pairs[side]
    m_target = int(store.target_marginals[target, side])
    m_context = int(store.context_marginals[context, side])
    return math.log((n_side * count) / (m_target * m_context))


def ppmi_matrix(store: CountStore) -> tuple[sp.csr_matrix, np.ndarray]:
    """All PPMI vectors as a V x 2V CSR matrix, plus per-row L2 norms."""
    V = len(store.vocab)
    targets, contexts, sides, counts = store.pair_arrays()
    if len(targets) == 0:
        matrix = sp.csr_matrix((V, 2 * V), dtype=np.float64)
        return matrix, np.zeros(V)
    n_side = np.array(store.total_pairs, dtype=np.int64)
    numer = n_side[sides] * counts
    denom = (
        store.target_marginals[targets, sides] * store.context_marginals[contexts, sides]
    )
    values = np.log(numer / denom)
    keep = values > 0
    matrix = sp.csr_matrix(
        (values[keep], (targets[keep], 2 * contexts[keep] + sides[keep])),
        shape=(V, 2 * V),
    )
    matrix.sort_indices()
    norms = np.sqrt(np.asarray(matrix.multiply(matrix).sum(axis=1)).ravel())
    return matrix, norms


def pmi_vector(word_id: int, store: CountStore) -> PmiVector:
    """The PPMI vector of one word (positive dimensions only, sorted)."""
    V = len(store.vocab)
    if not 0 <= word_id < V:
        raise UnknownWordError(str(word_id))
    targets, contexts, sides, counts = store.pair_arrays()
    mask = targets == word_id
    if not mask.any():
        return PmiVector(word_id, np.empty(0, np.int64), np.empty(0, np.float64))
    contexts, sides, counts = contexts[mask], sides[mask], counts[mask]
    n_side = np.array(store.total_pairs, dtype=np.int64)
    numer = n_side[sides] * counts
    denom = (
        store.target_marginals[word_id, sides] * store.context_marginals[contexts, sides]
    )
    values = np.log(numer / denom)
    keep = values > 0
    dims = 2 * contexts[keep] + sides[keep]
    order = np.argsort(dims)
    return PmiVector(word_id, dims[order].astype(np.int64), values[keep][order])


def cosine(u: PmiVector, v: PmiVector) -> float:
    """dot(u,v) / (|u||v|); zero if either vector has zero norm."""
    if u.norm == 0.0 or v.norm == 0.0:
        return 0.0
    _, iu, iv = np.intersect1d(u.dims, v.dims, assume_unique=True, return_indices=True)
    if len(iu) == 0:
        return 0.0
    return float(np.dot(u.values[iu], v.values[iv])) / (u.norm * v.norm)


@dataclass
class Neighbor:
    word_id: int
    surface: str
    score: float
    included: bool = True


@dataclass
class SimilarWordSet:
    """Ranked neighbors of a central word, with user include/exclude flags."""

    central_id: int
    central: str
    neighbors: list[Neighbor]
    k: int
    thresholds_fingerprint: str

    def match_surfaces(self) -> set[str]:
        """The condensation match set: central plus included neighbors."""
        matched = {n.surface for n in self.neighbors if n.included}
        matched.add(self.central)
        return matched

    def set_included(self, surface: str, included: bool) -> None:
        for n in self.neighbors:
            if n.surface == surface:
                n.included = included
                return
        raise UnknownWordError(surface, detail="word not among neighbors")


DEFAULT_K = 300
DEFAULT_MIN_FREQUENCY = 5


def top_k_similar(
    central: str,
    k: int,
    store: CountStore,
    min_frequency: int = DEFAULT_MIN_FREQUENCY,
    pos_class: str | None = None,
) -> SimilarWordSet:
    """Exact top-k cosine neighbors of ``central`` over PPMI vectors.

    Candidates must reach ``min_frequency`` occurrences in the store's
    scope and, when given, match the coarse POS class of their dominant
    tag. Ranking is score-descending with ties broken by word id, so
    results are reproducible across runs and platforms.
    """
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    central_id = store.vocab.get_id(central)
    if central_id is None:
        raise UnknownWordError(central)

    matrix, norms = ppmi_matrix(store)
    candidates = np.flatnonzero(store.unigram >= min_frequency)
    candidates = candidates[candidates != central_id]
    if pos_class is not None:
        from .window_stats import ThresholdTable

        classes = np.array(
            [ThresholdTable.class_for_tag(store.vocab.dominant_pos(int(w))) for w in candidates]
        )
        candidates = candidates[classes == pos_class]

    central_row = matrix.getrow(central_id)
    central_norm = float(norms[central_id])
    if central_norm == 0.0 or len(candidates) == 0:
        scores = np.zeros(len(candidates))
    else:
        dense = np.zeros(matrix.shape[1])
        dense[central_row.indices] = central_row.data
        dots = matrix[candidates] @ dense
        denom = norms[candidates] * central_norm
        scores = np.divide(dots, denom, out=np.zeros_like(dots), where=denom != 0)

    order = np.lexsort((candidates, -scores))[:k]
    neighbors = [
        Neighbor(int(candidates[i]), store.vocab.surface_of(int(candidates[i])), float(scores[i]))
        for i in order
    ]
    fingerprint = store.thresholds.fingerprint() if store.thresholds else "none"
    return SimilarWordSet(central_id, central, neighbors, k, fingerprint)


def similar_json(result: SimilarWordSet, store: CountStore, min_frequency: int,
                 pos_class: str | None = None) -> dict:
    """Canonical JSON payload shared by the CLI and the HTTP service."""
    return {
        "central": result.central,
        "neighbors": [
            {"word": n.surface, "score": n.score, "included": n.included}
            for n in result.neighbors
        ],
        "meta": {
            "k": result.k,
            "min_frequency": min_frequency,
            "pos_class": pos_class,
            "scope": list(store.scope),
            "thresholds_fingerprint": result.thresholds_fingerprint,
            "corpus_fingerprint": store.fingerprint,
        },
    }
