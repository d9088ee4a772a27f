"""Shared fixtures: corpus writers and random tagged-text generators."""

from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from topicdraw import corpus as corpus_mod

TAGS = ["n", "v", "a", "d", "t", "m", "q", "u", "p"]


def pytest_runtest_logreport(report):
    """One visible PASS/FAIL line per acceptance criterion."""
    if report.when != "call" or "test_acceptance" not in report.nodeid:
        return
    status = "PASS" if report.passed else "FAIL"
    name = report.nodeid.split("::", 1)[1]
    print(f"\nACCEPTANCE {status}: {name}", flush=True)


def write_corpus(root: Path, years: dict[int, list[str]]) -> Path:
    root.mkdir(parents=True, exist_ok=True)
    for year, lines in years.items():
        (root / f"{year}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    return root


def make_handle(tmp_path: Path, years: dict[int, list[str]]) -> corpus_mod.CorpusHandle:
    return corpus_mod.ingest(write_corpus(tmp_path / "corpus", years))


def random_tagged_lines(
    rng: np.random.Generator,
    n_lines: int,
    vocab_size: int,
    min_len: int = 3,
    max_len: int = 12,
    word_prefix: str = "w",
) -> list[str]:
    """Zipf-ish random tagged text over a synthetic vocabulary."""
    words = [f"{word_prefix}{i}" for i in range(vocab_size)]
    tags = [TAGS[i % len(TAGS)] for i in range(vocab_size)]
    weights = 1.0 / np.arange(1, vocab_size + 1)
    weights /= weights.sum()
    lines = []
    for _ in range(n_lines):
        length = int(rng.integers(min_len, max_len + 1))
        ids = rng.choice(vocab_size, size=length, p=weights)
        lines.append(" ".join(f"{words[i]}/{tags[i]}" for i in ids))
    return lines


@pytest.fixture
def tiny_handle(tmp_path):
    """Three tiny years of hand-written tagged text."""
    return make_handle(
        tmp_path,
        {
            1957: ["人民/n 日报/n 新闻/n", "人民/n 代表/n 大会/n"],
            1958: ["生产/v 建设/v 人民/n", "经济/n 发展/v"],
            1959: ["人民/n 公社/n 好/a"],
        },
    )
