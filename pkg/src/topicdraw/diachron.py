"""Per-year word statistics: frequency series and similarity variation.

Frequency is relative (share of the year's tokens), so series compare
across years of different sizes; a year where the word is absent is a
zero point. Similarity variation rebuilds counts and the word's PPMI
vector per year and compares against an anchor: the base year's vector
(semantic-change reading) or the previous present year's (adjacent
mode). A year where the word is absent has no meaningful vector and is
reported as a gap, never as zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .corpus import CorpusHandle
from .errors import DomainError, EmptyResultError, UnknownWordError
from .similarity import cosine, pmi_vector
from .window_stats import ThresholdTable, build_counts


@dataclass
class FrequencySeries:
    word: str
    points: list[tuple[int, float]]


@dataclass
class SimilarityVariationSeries:
    word: str
    base_year: int
    mode: str
    points: list[tuple[int, float]]
    gaps: list[int]


def _present_years(corpus: CorpusHandle, years: Iterable[int]) -> list[int]:
    requested = sorted(set(years))
    if not requested:
        raise EmptyResultError("empty year range")
    return [y for y in requested if y in corpus.stats]


def frequency_series(
    word: str, corpus: CorpusHandle, years: Iterable[int]
) -> FrequencySeries:
    """Relative frequency of ``word`` for each corpus year in the range."""
    wid = corpus.vocab.get_id(word)
    if wid is None:
        raise UnknownWordError(word)
    points = []
    for year in _present_years(corpus, years):
        total = corpus.stats[year].tokens
        count = int(corpus.year_word_counts(year)[wid])
        points.append((year, count / total if total else 0.0))
    return FrequencySeries(word, points)


def similarity_series(
    word: str,
    corpus: CorpusHandle,
    base_year: int,
    years: Iterable[int],
    table: ThresholdTable | None = None,
    mode: str = "base",
) -> SimilarityVariationSeries:
    """Year-over-year cosine of the word's PPMI vector.

    ``base`` anchors every year at ``base_year``; ``adjacent`` compares
    each present year to the previous present one (first present year
    scores against itself).
    """
    if mode not in ("base", "adjacent"):
        raise DomainError(f"unknown similarity mode: {mode!r}")
    table = table or ThresholdTable.default()
    wid = corpus.vocab.get_id(word)
    if wid is None:
        raise UnknownWordError(word)
    if base_year not in corpus.stats or corpus.year_word_counts(base_year)[wid] == 0:
        raise DomainError(f"word absent from base year {base_year}: {word}")

    scope = _present_years(corpus, years)

    def year_vector(year: int):
        store = build_counts(corpus, table, [year])
        return pmi_vector(wid, store)

    points: list[tuple[int, float]] = []
    gaps: list[int] = []
    if mode == "base":
        reference = year_vector(base_year)
        for year in scope:
            if corpus.year_word_counts(year)[wid] == 0:
                gaps.append(year)
                continue
            vec = reference if year == base_year else year_vector(year)
            points.append((year, cosine(vec, reference)))
    else:
        previous = None
        for year in scope:
            if corpus.year_word_counts(year)[wid] == 0:
                gaps.append(year)
                continue
            vec = year_vector(year)
            points.append((year, cosine(vec, previous if previous is not None else vec)))
            previous = vec
    return SimilarityVariationSeries(word, base_year, mode, points, gaps)


def series_json(series: FrequencySeries | SimilarityVariationSeries) -> dict:
    """Canonical series payload shared by the CLI and the HTTP service."""
    gaps = series.gaps if isinstance(series, SimilarityVariationSeries) else []
    return {
        "word": series.word,
        "points": [{"year": year, "value": value} for year, value in series.points],
        "gaps": list(gaps),
    }
