"""Tagged-corpus ingestion and indexing.

Corpus format: UTF-8 text files, one document per line, tokens separated
by ASCII spaces/tabs, each token ``surface/pos`` (split on the LAST
slash). Files are grouped by year, inferred from the digits in the file
name stem (``1957.txt``) or declared in a JSON manifest
``{"years": {"1957": "path", ...}}``.

Documents are stored column-encoded (word-id and tag-id arrays) so a
multi-million-token corpus stays small in memory; ``Document.tokens``
materializes ``Token`` objects on demand.
"""

from __future__ import annotations

import hashlib
import json
import re
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import ConfigError, EmptyResultError, UnknownWordError

_YEAR_RE = re.compile(r"(\d+)")

# Tag assigned to tokens that do not parse as surface/pos.
MALFORMED_POS = "x"


@dataclass(frozen=True)
class Token:
    """One surface form with its part-of-speech tag."""

    surface: str
    pos: str


def parse_token(raw: str) -> tuple[str, str, bool]:
    """Split a raw token on its last '/'.

    Returns (surface, pos, well_formed). Tokens without a slash, or with
    an empty surface or tag, are kept whole under the fallback tag so a
    dirty corpus never aborts an ingest.
    """
    head, sep, tail = raw.rpartition("/")
    if sep and head and tail:
        return head, tail, True
    return raw, MALFORMED_POS, False


class Vocabulary:
    """Dense word-id <-> surface map with frequency and dominant POS.

    Ids are assigned after the whole corpus is counted: descending total
    frequency, ties broken by codepoint order of the surface. Two ingests
    of the same files therefore produce identical ids.
    """

    def __init__(self, ordered: list[tuple[str, int, str]]):
        self._surfaces = [s for s, _, _ in ordered]
        self._ids = {s: i for i, s in enumerate(self._surfaces)}
        self.frequency = np.array([f for _, f, _ in ordered], dtype=np.int64)
        self._dominant_pos = [p for _, _, p in ordered]

    def __len__(self) -> int:
        return len(self._surfaces)

    def __contains__(self, surface: str) -> bool:
        return surface in self._ids

    def id_of(self, surface: str) -> int:
        try:
            return self._ids[surface]
        except KeyError:
            raise UnknownWordError(surface) from None

    def get_id(self, surface: str) -> int | None:
        return self._ids.get(surface)

    def surface_of(self, word_id: int) -> str:
        return self._surfaces[word_id]

    def dominant_pos(self, word_id: int) -> str:
        return self._dominant_pos[word_id]

    @property
    def surfaces(self) -> list[str]:
        return self._surfaces


@dataclass
class Document:
    """One corpus line: year, 0-based line index in the year file, tokens."""

    year: int
    seq: int
    word_ids: np.ndarray
    tag_ids: np.ndarray
    _vocab: Vocabulary = field(repr=False)
    _tags: list[str] = field(repr=False)

    def __len__(self) -> int:
        return len(self.word_ids)

    @property
    def vocab(self) -> Vocabulary:
        return self._vocab

    def surface_at(self, i: int) -> str:
        return self._vocab.surface_of(int(self.word_ids[i]))

    def tag_at(self, i: int) -> str:
        return self._tags[int(self.tag_ids[i])]

    @property
    def tokens(self) -> list[Token]:
        return [
            Token(self._vocab.surface_of(int(w)), self._tags[int(t)])
            for w, t in zip(self.word_ids, self.tag_ids)
        ]

    def tagged_line(self) -> str:
        return " ".join(f"{t.surface}/{t.pos}" for t in self.tokens)

    def plain_line(self) -> str:
        return " ".join(self._vocab.surface_of(int(w)) for w in self.word_ids)

    def byte_size(self) -> int:
        """UTF-8 size of the normalized tagged line plus its LF."""
        return len(self.tagged_line().encode("utf-8")) + 1


class StopwordList:
    """Exact-match set of surface forms (POS-insensitive)."""

    def __init__(self, words: Iterable[str] = ()):
        self.words = set(words)

    def __contains__(self, surface: str) -> bool:
        return surface in self.words

    def __len__(self) -> int:
        return len(self.words)


def load_stopwords(path: Path | str) -> StopwordList:
    """One surface per line; blank lines and '#' comment lines ignored."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read stopword file {path}: {exc}") from exc
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        words.add(line)
    return StopwordList(words)


def default_stopwords() -> StopwordList:
    return load_stopwords(Path(__file__).parent / "data" / "stopwords_zh.txt")


@dataclass
class YearStats:
    documents: int = 0
    tokens: int = 0
    bytes: int = 0
    warnings: int = 0


class CorpusHandle:
    """Immutable view of an ingested corpus; safe for concurrent readers."""

    def __init__(
        self,
        vocab: Vocabulary,
        tags: list[str],
        docs_by_year: dict[int, list[Document]],
        stats: dict[int, YearStats],
        fingerprint: str,
    ):
        self.vocab = vocab
        self.tags = tags
        self._docs = docs_by_year
        self.stats = stats
        self.fingerprint = fingerprint
        self._year_counts: dict[int, np.ndarray] = {}

    @property
    def years(self) -> list[int]:
        return sorted(self._docs)

    def documents(self, years: Iterable[int] | None = None) -> Iterator[Document]:
        """Yield documents in (year, seq) order."""
        for year in sorted(years) if years is not None else self.years:
            yield from self._docs[year]

    def year_documents(self, year: int) -> list[Document]:
        return self._docs[year]

    def total_documents(self) -> int:
        return sum(s.documents for s in self.stats.values())

    def total_tokens(self) -> int:
        return sum(s.tokens for s in self.stats.values())

    def total_warnings(self) -> int:
        return sum(s.warnings for s in self.stats.values())

    def resolve_scope(self, years: Iterable[int] | None) -> list[int]:
        """Validate an explicit year set against the corpus, sorted."""
        if years is None:
            return self.years
        scope = sorted(set(years))
        if not scope:
            raise EmptyResultError("empty year scope")
        missing = [y for y in scope if y not in self._docs]
        if missing:
            raise DomainScopeError(missing)
        return scope

    def year_word_counts(self, year: int) -> np.ndarray:
        """Per-word occurrence counts for one year (cached)."""
        cached = self._year_counts.get(year)
        if cached is None:
            counts = np.zeros(len(self.vocab), dtype=np.int64)
            for doc in self._docs[year]:
                np.add.at(counts, doc.word_ids, 1)
            cached = self._year_counts[year] = counts
        return cached

    def stats_summary(self) -> dict:
        return {
            "years": {
                str(y): {
                    "documents": s.documents,
                    "tokens": s.tokens,
                    "bytes": s.bytes,
                    "warnings": s.warnings,
                }
                for y, s in sorted(self.stats.items())
            },
            "totals": {
                "documents": self.total_documents(),
                "tokens": self.total_tokens(),
                "bytes": sum(s.bytes for s in self.stats.values()),
                "warnings": self.total_warnings(),
                "vocabulary": len(self.vocab),
            },
            "fingerprint": self.fingerprint,
        }


class DomainScopeError(EmptyResultError):
    def __init__(self, missing: list[int]):
        super().__init__(f"scope years absent from corpus: {missing}")
        self.missing = missing


def parse_year_range(text: str) -> tuple[int, int]:
    """Parse '1957..1966' (inclusive) or a single '1957'."""
    text = text.strip()
    if ".." in text:
        lo, _, hi = text.partition("..")
        try:
            bounds = (int(lo), int(hi))
        except ValueError as exc:
            raise ConfigError(f"bad year range: {text!r}") from exc
        if bounds[0] > bounds[1]:
            raise ConfigError(f"year range is reversed: {text!r}")
        return bounds
    try:
        year = int(text)
    except ValueError as exc:
        raise ConfigError(f"bad year range: {text!r}") from exc
    return year, year


def range_scope(handle: CorpusHandle, text: str | None) -> list[int]:
    """Corpus years within an inclusive range; all years if None."""
    if text is None:
        return handle.years
    lo, hi = parse_year_range(text)
    scope = [y for y in handle.years if lo <= y <= hi]
    if not scope:
        raise EmptyResultError(f"no corpus years within {text}")
    return scope


def _year_from_name(path: Path) -> int | None:
    match = _YEAR_RE.search(path.stem)
    return int(match.group(1)) if match else None


def discover_year_files(
    path: Path | str, manifest: dict[int, Path] | None = None
) -> dict[int, Path]:
    """Map years to files from a directory, a single file, or a manifest."""
    if manifest is not None:
        return {int(y): Path(p) for y, p in manifest.items()}
    root = Path(path)
    if root.is_file():
        if root.suffix == ".json":
            return _read_manifest(root)
        year = _year_from_name(root)
        if year is None:
            raise ConfigError(f"cannot infer year from file name: {root.name}")
        return {year: root}
    if not root.is_dir():
        raise ConfigError(f"corpus path does not exist: {root}")
    manifest_path = root / "manifest.json"
    if manifest_path.exists():
        return _read_manifest(manifest_path)
    files: dict[int, Path] = {}
    for child in sorted(root.glob("*.txt")):
        year = _year_from_name(child)
        if year is None:
            raise ConfigError(f"cannot infer year from file name: {child.name}")
        if year in files:
            raise ConfigError(f"duplicate year {year}: {files[year].name}, {child.name}")
        files[year] = child
    if not files:
        raise EmptyResultError(f"no corpus files found under {root}")
    return files


def _read_manifest(path: Path) -> dict[int, Path]:
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read manifest {path}: {exc}") from exc
    years = payload.get("years")
    if not isinstance(years, dict) or not years:
        raise ConfigError(f"manifest {path} must contain a non-empty 'years' map")
    out: dict[int, Path] = {}
    for year, rel in years.items():
        try:
            y = int(year)
        except ValueError as exc:
            raise ConfigError(f"manifest year is not an integer: {year!r}") from exc
        p = Path(rel)
        out[y] = p if p.is_absolute() else path.parent / p
    return out


def _scan_file(path: Path) -> tuple[Counter, Counter, bytes]:
    """First pass over one year file: frequencies, (surface,pos) tag counts."""
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read corpus file {path}: {exc}") from exc
    freq: Counter = Counter()
    tag_counts: Counter = Counter()
    for line in raw.decode("utf-8").splitlines():
        for token in line.split():
            surface, pos, _ = parse_token(token)
            freq[surface] += 1
            tag_counts[(surface, pos)] += 1
    return freq, tag_counts, raw


def ingest(
    path: Path | str,
    manifest: dict[int, Path] | None = None,
    threads: int = 1,
) -> CorpusHandle:
    """Parse and index a tagged corpus.

    Two streaming passes: the first counts frequencies to fix vocabulary
    ids deterministically, the second encodes documents against those
    ids. Malformed tokens are kept under the fallback tag and tallied as
    warnings. An ingest that yields zero documents is an error.
    """
    files = discover_year_files(path, manifest)
    years = sorted(files)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            scans = list(pool.map(_scan_file, [files[y] for y in years]))
    else:
        scans = [_scan_file(files[y]) for y in years]

    total_freq: Counter = Counter()
    total_tag_counts: Counter = Counter()
    hasher = hashlib.sha256()
    for year, (freq, tag_counts, raw) in zip(years, scans):
        total_freq.update(freq)
        total_tag_counts.update(tag_counts)
        hasher.update(str(year).encode("ascii"))
        hasher.update(b"\n")
        hasher.update(raw)
    fingerprint = hasher.hexdigest()

    if not total_freq:
        raise EmptyResultError("empty corpus: no documents found")

    # Dominant POS per surface: highest count, ties by tag codepoint order.
    best_tag: dict[str, tuple[int, str]] = {}
    for (surface, pos), count in total_tag_counts.items():
        current = best_tag.get(surface)
        if current is None or (-count, pos) < current:
            best_tag[surface] = (-count, pos)

    ordered = sorted(total_freq.items(), key=lambda item: (-item[1], item[0]))
    vocab = Vocabulary([(s, f, best_tag[s][1]) for s, f in ordered])

    tags = sorted({pos for _, pos in total_tag_counts})
    tag_ids = {t: i for i, t in enumerate(tags)}
    tag_dtype = np.int16 if len(tags) < 2**15 else np.int32

    docs_by_year: dict[int, list[Document]] = {}
    stats: dict[int, YearStats] = {}
    for year in years:
        docs: list[Document] = []
        ystats = YearStats()
        text = files[year].read_bytes().decode("utf-8")
        for seq, line in enumerate(text.splitlines()):
            raw_tokens = line.split()
            if not raw_tokens:
                continue
            wids = np.empty(len(raw_tokens), dtype=np.int32)
            tids = np.empty(len(raw_tokens), dtype=tag_dtype)
            for i, raw_token in enumerate(raw_tokens):
                surface, pos, ok = parse_token(raw_token)
                wids[i] = vocab.id_of(surface)
                tids[i] = tag_ids[pos]
                if not ok:
                    ystats.warnings += 1
            doc = Document(year, seq, wids, tids, vocab, tags)
            docs.append(doc)
            ystats.documents += 1
            ystats.tokens += len(raw_tokens)
            ystats.bytes += doc.byte_size()
        docs_by_year[year] = docs
        stats[year] = ystats

    if not any(s.documents for s in stats.values()):
        raise EmptyResultError("empty corpus: no documents found")
    return CorpusHandle(vocab, tags, docs_by_year, stats, fingerprint)
