"""Information-budgeted context windows and directed co-occurrence counts.

Around each token (the target), left and right context windows grow one
token at a time. Each candidate context token costs its conditional
self-information -log Pr(context | target, side), estimated from a
bootstrap pass of fixed-width counts; growth stops before the token
whose cost would push the side's cumulative total strictly above the
budget for the target's POS class. Two passes:

  pass 1: fixed +/-5-token windows, bootstrapping the probabilities;
  pass 2: budget-grown windows scored against the pass-1 counts.

Counts are directed: (target, context, side). All probabilities here
are side-specific. Natural log throughout.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .corpus import CorpusHandle, Document, Vocabulary
from .errors import ConfigError, UnknownWordError
from .jsonio import dumps

LEFT = 0
RIGHT = 1
SIDE_NAMES = ("left", "right")

PASS1_WIDTH = 5     # fixed bootstrap window, tokens per side
WINDOW_CAP = 50     # hard cap on grown extents, tokens per side
EPSILON = 0.5       # add-eps smoothing for unseen pairs at query time

POS_CLASSES = ("noun", "verb", "adjective", "adverb", "default")

_DEFAULT_THRESHOLDS = {
    "noun": (21.0, 14.0),
    "verb": (24.0, 15.0),
    "adjective": (7.0, 9.0),
    "adverb": (12.0, 20.0),
    "default": (15.0, 15.0),
}

_TAG_CLASS = {"n": "noun", "v": "verb", "a": "adjective", "d": "adverb"}


class ThresholdTable:
    """Per-POS-class (left, right) information budgets, in nats.

    Classes are keyed by the first letter of the target token's tag:
    n* noun, v* verb, a* adjective, d* adverb, anything else default.
    """

    def __init__(self, entries: dict[str, tuple[float, float]] | None = None):
        table = dict(_DEFAULT_THRESHOLDS)
        for name, (left, right) in (entries or {}).items():
            if name not in POS_CLASSES:
                raise ConfigError(f"unknown POS class in thresholds: {name!r}")
            if left < 0 or right < 0:
                raise ConfigError(f"thresholds must be >= 0: {name} = ({left}, {right})")
            table[name] = (float(left), float(right))
        self._table = table

    @classmethod
    def default(cls) -> "ThresholdTable":
        return cls()

    @classmethod
    def from_dict(cls, payload: dict) -> "ThresholdTable":
        entries = {}
        for name, row in payload.items():
            try:
                entries[name] = (float(row["left"]), float(row["right"]))
            except (TypeError, KeyError) as exc:
                raise ConfigError(f"threshold row {name!r} needs left/right numbers") from exc
        return cls(entries)

    @classmethod
    def from_json(cls, path: Path | str) -> "ThresholdTable":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read thresholds file {path}: {exc}") from exc
        return cls.from_dict(payload)

    def to_dict(self) -> dict:
        return {
            name: {"left": self._table[name][0], "right": self._table[name][1]}
            for name in POS_CLASSES
        }

    def fingerprint(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True)
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    @staticmethod
    def class_for_tag(tag: str) -> str:
        return _TAG_CLASS.get(tag[:1].lower(), "default") if tag else "default"

    def for_class(self, name: str) -> tuple[float, float]:
        return self._table[name]

    def for_tag(self, tag: str) -> tuple[float, float]:
        return self._table[self.class_for_tag(tag)]


@dataclass
class WindowTrace:
    """Sizing record for one target occurrence."""

    position: int
    left_extent: int
    right_extent: int
    left_information: float
    right_information: float


class CountStore:
    """Directed co-occurrence and unigram counts over a year scope.

    Pair keys are packed as ``(target * V + context) * 2 + side`` into a
    plain dict; marginals are precomputed arrays. Immutable after build.
    """

    def __init__(
        self,
        vocab: Vocabulary,
        unigram: np.ndarray,
        pairs: dict[int, int],
        scope: tuple[int, ...],
        fingerprint: str,
        pass_number: int,
        thresholds: ThresholdTable | None,
    ):
        self.vocab = vocab
        self.unigram = unigram
        self.pairs = pairs
        self.scope = tuple(scope)
        self.fingerprint = fingerprint
        self.pass_number = pass_number
        self.thresholds = thresholds
        self.total_tokens = int(unigram.sum())
        V = len(vocab)
        target_marg = np.zeros((V, 2), dtype=np.int64)
        context_marg = np.zeros((V, 2), dtype=np.int64)
        if pairs:
            keys = np.fromiter(pairs.keys(), dtype=np.int64, count=len(pairs))
            counts = np.fromiter(pairs.values(), dtype=np.int64, count=len(pairs))
            sides = keys & 1
            yx = keys >> 1
            target_marg = (
                np.bincount((yx // V) * 2 + sides, weights=counts, minlength=2 * V)
                .reshape(V, 2)
                .astype(np.int64)
            )
            context_marg = (
                np.bincount((yx % V) * 2 + sides, weights=counts, minlength=2 * V)
                .reshape(V, 2)
                .astype(np.int64)
            )
        self.target_marginals = target_marg
        self.context_marginals = context_marg
        self.total_pairs = (int(target_marg[:, LEFT].sum()), int(target_marg[:, RIGHT].sum()))

    def pair_count(self, target: int, context: int, side: int) -> int:
        V = len(self.vocab)
        return self.pairs.get((target * V + context) * 2 + side, 0)

    def pair_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """(targets, contexts, sides, counts) sorted by (target, context, side)."""
        V = len(self.vocab)
        keys = np.fromiter(self.pairs.keys(), dtype=np.int64, count=len(self.pairs))
        counts = np.fromiter(self.pairs.values(), dtype=np.int64, count=len(self.pairs))
        order = np.argsort(keys)
        keys, counts = keys[order], counts[order]
        sides = keys & 1
        yx = keys >> 1
        return yx // V, yx % V, sides, counts

    def _check_target(self, target: int) -> None:
        if not 0 <= target < len(self.vocab) or self.unigram[target] == 0:
            name = (
                self.vocab.surface_of(target)
                if 0 <= target < len(self.vocab)
                else str(target)
            )
            raise UnknownWordError(name, detail="unknown target")

    def meta(self) -> dict:
        return {
            "pass": self.pass_number,
            "thresholds": self.thresholds.to_dict() if self.thresholds else None,
            "corpus_fingerprint": self.fingerprint,
            "log_base": "e",
            "epsilon": EPSILON,
            "cap": WINDOW_CAP,
            "pass1_width": PASS1_WIDTH,
            "scope": list(self.scope),
            "total_tokens": self.total_tokens,
        }

    def save(self, directory: Path | str) -> None:
        """On-disk cache: vocab.tsv, pairs.tsv, meta.json."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        with open(directory / "vocab.tsv", "w", encoding="utf-8") as out:
            for wid in range(len(self.vocab)):
                out.write(
                    f"{wid}\t{self.vocab.surface_of(wid)}\t"
                    f"{self.vocab.dominant_pos(wid)}\t{int(self.unigram[wid])}\n"
                )
        targets, contexts, sides, counts = self.pair_arrays()
        with open(directory / "pairs.tsv", "w", encoding="utf-8") as out:
            for y, x, s, c in zip(targets, contexts, sides, counts):
                out.write(f"{y}\t{x}\t{'L' if s == LEFT else 'R'}\t{c}\n")
        (directory / "meta.json").write_text(dumps(self.meta()), encoding="utf-8")

    @classmethod
    def load(cls, directory: Path | str) -> "CountStore":
        directory = Path(directory)
        try:
            meta = json.loads((directory / "meta.json").read_text(encoding="utf-8"))
            vocab_rows = (directory / "vocab.tsv").read_text(encoding="utf-8").splitlines()
            pair_rows = (directory / "pairs.tsv").read_text(encoding="utf-8").splitlines()
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read count store at {directory}: {exc}") from exc
        entries = []
        unigram = []
        for row in vocab_rows:
            _, surface, pos, freq = row.split("\t")
            entries.append((surface, int(freq), pos))
            unigram.append(int(freq))
        vocab = Vocabulary(entries)
        V = len(vocab)
        pairs: dict[int, int] = {}
        for row in pair_rows:
            y, x, s, c = row.split("\t")
            side = LEFT if s == "L" else RIGHT
            pairs[(int(y) * V + int(x)) * 2 + side] = int(c)
        thresholds = (
            ThresholdTable.from_dict(meta["thresholds"]) if meta.get("thresholds") else None
        )
        return cls(
            vocab,
            np.array(unigram, dtype=np.int64),
            pairs,
            tuple(meta["scope"]),
            meta["corpus_fingerprint"],
            meta["pass"],
            thresholds,
        )


def information(
    x: int, y: int, side: int, store: CountStore, eps: float = EPSILON
) -> float:
    """Conditional self-information -log Pr(x | y, side), add-eps smoothed.

    With eps = 0 this is -log(pair / target-marginal) exactly; an unseen
    pair is then infinitely surprising.
    """
    store._check_target(y)
    if not 0 <= x < len(store.vocab):
        raise UnknownWordError(str(x))
    count = store.pair_count(y, x, side)
    marginal = int(store.target_marginals[y, side])
    if eps == 0:
        if count == 0:
            return math.inf
        return math.log(marginal) - math.log(count)
    return -math.log(count + eps) + math.log(marginal + eps * len(store.vocab))


def _side_extent(
    ids: list[int],
    position: int,
    step: int,
    budget: float,
    target: int,
    pairs: dict[int, int],
    log_marginal: float,
    side: int,
    V: int,
) -> tuple[int, float]:
    """Grow one side of a window under a cumulative information budget.

    A token is included while the running total stays <= budget; an
    unseen pair (infinite cost) or the cap stops growth. Returns
    (extent, accumulated information).
    """
    n = len(ids)
    base = (target * V) * 2 + side
    cumulative = 0.0
    extent = 0
    j = position + step
    while 0 <= j < n and extent < WINDOW_CAP:
        count = pairs.get(base + 2 * ids[j], 0)
        if count == 0:
            break
        cost = log_marginal - math.log(count)
        if cumulative + cost <= budget:
            cumulative += cost
            extent += 1
            j += step
        else:
            break
    return extent, cumulative


def grow_window(
    doc: Document, pos_index: int, table: ThresholdTable, store: CountStore
) -> WindowTrace:
    """Size the context window around ``doc``'s token at ``pos_index``.

    Unsmoothed (eps = 0) information from ``store`` is accumulated per
    side against the budget for the target token's POS class. Document
    edges simply truncate.
    """
    if not 0 <= pos_index < len(doc):
        raise IndexError(f"position {pos_index} out of range for document of {len(doc)}")
    ids = doc.word_ids.tolist()
    target = ids[pos_index]
    left_budget, right_budget = table.for_tag(doc.tag_at(pos_index))
    V = len(store.vocab)
    marg = store.target_marginals
    left = right = (0, 0.0)
    if marg[target, LEFT] > 0:
        left = _side_extent(
            ids, pos_index, -1, left_budget, target, store.pairs,
            math.log(marg[target, LEFT]), LEFT, V,
        )
    if marg[target, RIGHT] > 0:
        right = _side_extent(
            ids, pos_index, +1, right_budget, target, store.pairs,
            math.log(marg[target, RIGHT]), RIGHT, V,
        )
    return WindowTrace(pos_index, left[0], right[0], left[1], right[1])


def _scope_unigram(corpus: CorpusHandle, scope: list[int]) -> np.ndarray:
    unigram = np.zeros(len(corpus.vocab), dtype=np.int64)
    for year in scope:
        unigram += corpus.year_word_counts(year)
    return unigram


def build_pass1(
    corpus: CorpusHandle,
    scope: Iterable[int] | None = None,
    width: int = PASS1_WIDTH,
    progress: Callable[[float], None] | None = None,
) -> CountStore:
    """Fixed +/-width-token directed pair counts (the bootstrap pass)."""
    years = corpus.resolve_scope(scope)
    V = len(corpus.vocab)
    pairs: dict[int, int] = {}
    for yi, year in enumerate(years):
        for doc in corpus.year_documents(year):
            ids = doc.word_ids.tolist()
            n = len(ids)
            for i, target in enumerate(ids):
                base = (target * V) * 2
                for j in range(max(0, i - width), i):
                    key = base + 2 * ids[j] + LEFT
                    pairs[key] = pairs.get(key, 0) + 1
                for j in range(i + 1, min(n, i + width + 1)):
                    key = base + 2 * ids[j] + RIGHT
                    pairs[key] = pairs.get(key, 0) + 1
        if progress:
            progress((yi + 1) / len(years))
    return CountStore(
        corpus.vocab, _scope_unigram(corpus, years), pairs,
        tuple(years), corpus.fingerprint, 1, None,
    )


def build_pass2(
    corpus: CorpusHandle,
    table: ThresholdTable,
    pass1: CountStore,
    progress: Callable[[float], None] | None = None,
) -> CountStore:
    """Re-count pairs under windows grown against the pass-1 estimates."""
    years = list(pass1.scope)
    V = len(corpus.vocab)
    pairs1 = pass1.pairs
    marg1 = pass1.target_marginals

    budgets = {}
    for tag_id, tag in enumerate(corpus.tags):
        budgets[tag_id] = table.for_tag(tag)

    pairs: dict[int, int] = {}
    for yi, year in enumerate(years):
        for doc in corpus.year_documents(year):
            ids = doc.word_ids.tolist()
            tids = doc.tag_ids.tolist()
            for i, target in enumerate(ids):
                left_budget, right_budget = budgets[tids[i]]
                base = (target * V) * 2
                if marg1[target, LEFT] > 0:
                    ext, _ = _side_extent(
                        ids, i, -1, left_budget, target, pairs1,
                        math.log(marg1[target, LEFT]), LEFT, V,
                    )
                    for d in range(1, ext + 1):
                        key = base + 2 * ids[i - d] + LEFT
                        pairs[key] = pairs.get(key, 0) + 1
                if marg1[target, RIGHT] > 0:
                    ext, _ = _side_extent(
                        ids, i, +1, right_budget, target, pairs1,
                        math.log(marg1[target, RIGHT]), RIGHT, V,
                    )
                    for d in range(1, ext + 1):
                        key = base + 2 * ids[i + d] + RIGHT
                        pairs[key] = pairs.get(key, 0) + 1
        if progress:
            progress((yi + 1) / len(years))
    return CountStore(
        corpus.vocab, pass1.unigram, pairs,
        pass1.scope, corpus.fingerprint, 2, table,
    )


def build_counts(
    corpus: CorpusHandle,
    table: ThresholdTable,
    scope: Iterable[int] | None = None,
    progress: Callable[[float], None] | None = None,
) -> CountStore:
    """Two-pass count build; the returned store is the pass-2 store."""
    half = (lambda f: progress(f / 2)) if progress else None
    pass1 = build_pass1(corpus, scope, progress=half)
    rest = (lambda f: progress(0.5 + f / 2)) if progress else None
    return build_pass2(corpus, table, pass1, progress=rest)
