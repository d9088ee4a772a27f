"""Related-corpus extraction: keep every line containing a match-set word.

A line matches when any token's surface form is in the match set (exact
token match, POS ignored; the corpus is pre-segmented so substring
matching would fire on compounds). The central word is always part of
the match set; user-excluded neighbors are honored. Reduction stats are
exact and reported per year.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .corpus import CorpusHandle, Document
from .errors import EmptyResultError
from .jsonio import dumps
from .similarity import SimilarWordSet


@dataclass
class CondenseStats:
    lines_kept: int = 0
    lines_scanned: int = 0
    bytes_kept: int = 0
    bytes_scanned: int = 0

    def as_dict(self) -> dict:
        return {
            "lines_kept": self.lines_kept,
            "lines_scanned": self.lines_scanned,
            "bytes_kept": self.bytes_kept,
            "bytes_scanned": self.bytes_scanned,
        }


@dataclass
class CondensedCorpus:
    """References into the source corpus for every matching line."""

    source_fingerprint: str
    central: str
    match_set: set[str]
    scope: list[int]
    refs: list[tuple[int, int]]
    per_year: dict[int, CondenseStats]
    _docs: list[Document] = field(repr=False, default_factory=list)

    @property
    def condensed_id(self) -> str:
        payload = "\x1f".join(
            [
                self.source_fingerprint,
                self.central,
                ",".join(sorted(self.match_set)),
                ",".join(str(y) for y in self.scope),
            ]
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]

    @property
    def years(self) -> list[int]:
        return sorted({year for year, _ in self.refs})

    def documents(self) -> Iterator[Document]:
        yield from self._docs

    def year_documents(self, year: int) -> list[Document]:
        return [d for d in self._docs if d.year == year]

    def totals(self) -> CondenseStats:
        total = CondenseStats()
        for stats in self.per_year.values():
            total.lines_kept += stats.lines_kept
            total.lines_scanned += stats.lines_scanned
            total.bytes_kept += stats.bytes_kept
            total.bytes_scanned += stats.bytes_scanned
        return total


def effective_match_set(words: SimilarWordSet | Iterable[str], central: str | None = None) -> set[str]:
    """Apply include/exclude flags and force the central word in."""
    if isinstance(words, SimilarWordSet):
        return words.match_surfaces()
    match = set(words)
    if central:
        match.add(central)
    return match


def condense(
    corpus: CorpusHandle,
    words: SimilarWordSet | Iterable[str],
    scope: Iterable[int] | None = None,
    central: str | None = None,
) -> CondensedCorpus:
    """Single ordered pass over the scope, keeping matching lines."""
    match = effective_match_set(words, central)
    if not match:
        raise EmptyResultError("empty effective match set")
    if isinstance(words, SimilarWordSet):
        central = words.central
    years = corpus.resolve_scope(scope)

    match_ids = [wid for s in match if (wid := corpus.vocab.get_id(s)) is not None]
    mask = np.zeros(len(corpus.vocab), dtype=bool)
    mask[match_ids] = True

    refs: list[tuple[int, int]] = []
    kept_docs: list[Document] = []
    per_year: dict[int, CondenseStats] = {}
    for year in years:
        stats = CondenseStats()
        for doc in corpus.year_documents(year):
            size = doc.byte_size()
            stats.lines_scanned += 1
            stats.bytes_scanned += size
            if mask[doc.word_ids].any():
                stats.lines_kept += 1
                stats.bytes_kept += size
                refs.append((year, doc.seq))
                kept_docs.append(doc)
        per_year[year] = stats
    return CondensedCorpus(
        corpus.fingerprint, central or "", match, years, refs, per_year, kept_docs
    )


def reduction_report(condensed: CondensedCorpus) -> dict:
    """Original vs condensed sizes and their ratio, per year and total."""

    def row(stats: CondenseStats) -> dict:
        ratio = stats.bytes_kept / stats.bytes_scanned if stats.bytes_scanned else 0.0
        return {
            "original_bytes": stats.bytes_scanned,
            "condensed_bytes": stats.bytes_kept,
            "ratio": ratio,
        }

    return {
        "per_year": {str(y): row(s) for y, s in sorted(condensed.per_year.items())},
        "total": row(condensed.totals()),
    }


def format_reduction_table(report: dict) -> str:
    lines = [f"{'year':>8}  {'original':>12}  {'condensed':>12}  {'ratio':>7}"]
    for year, row in report["per_year"].items():
        lines.append(
            f"{year:>8}  {row['original_bytes']:>12}  "
            f"{row['condensed_bytes']:>12}  {row['ratio']:>7.4f}"
        )
    total = report["total"]
    lines.append(
        f"{'total':>8}  {total['original_bytes']:>12}  "
        f"{total['condensed_bytes']:>12}  {total['ratio']:>7.4f}"
    )
    return "\n".join(lines)


def stats_json(condensed: CondensedCorpus) -> dict:
    """Canonical condensation stats, shared by CLI and service."""
    totals = condensed.totals()
    ratio = totals.bytes_kept / totals.bytes_scanned if totals.bytes_scanned else 0.0
    return {
        "central": condensed.central,
        "match_set": sorted(condensed.match_set),
        "scope": list(condensed.scope),
        "condensed_id": condensed.condensed_id,
        "lines": {"kept": totals.lines_kept, "scanned": totals.lines_scanned},
        "bytes": {"kept": totals.bytes_kept, "scanned": totals.bytes_scanned},
        "reduction_ratio": ratio,
        "per_year": {
            str(y): s.as_dict() for y, s in sorted(condensed.per_year.items())
        },
        "source_fingerprint": condensed.source_fingerprint,
    }


def export(
    condensed: CondensedCorpus, sink: Path | str, format: str = "tagged"
) -> list[Path]:
    """Write one file per year plus stats.json into ``sink``.

    ``tagged`` keeps surface/pos tokens (re-ingestable as a corpus);
    ``plain`` writes surfaces only. Output order is (year, seq).
    """
    if format not in ("tagged", "plain"):
        raise ValueError(f"unknown export format: {format!r}")
    sink = Path(sink)
    sink.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    by_year: dict[int, list[Document]] = {}
    for doc in condensed.documents():
        by_year.setdefault(doc.year, []).append(doc)
    for year in sorted(by_year):
        path = sink / f"{year}.txt"
        with open(path, "w", encoding="utf-8", newline="\n") as out:
            for doc in by_year[year]:
                line = doc.tagged_line() if format == "tagged" else doc.plain_line()
                out.write(line + "\n")
        written.append(path)
    stats_path = sink / "stats.json"
    stats_path.write_text(dumps(stats_json(condensed)), encoding="utf-8")
    written.append(stats_path)
    return written
