"""Command-line entry point wiring all pipeline stages.

Subcommands: ingest-check, similar, condense, topics, series freq|sim,
serve, and the end-to-end draw. Exit codes: 0 success, 1 I/O or
configuration error, 2 domain error (unknown word, empty result where
one is required).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import sys
from pathlib import Path

from . import condenser, corpus, diachron, jsonio, similarity, topics, window_stats
from .errors import ConfigError, DomainError, TopicdrawError

log = logging.getLogger("topicdraw")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DOMAIN = 2


class _JsonLogFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        return json.dumps(
            {"level": record.levelname.lower(), "logger": record.name, "msg": record.getMessage()},
            ensure_ascii=False,
        )


def _setup_logging(quiet: bool, json_logs: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    if json_logs:
        handler.setFormatter(_JsonLogFormatter())
    else:
        handler.setFormatter(logging.Formatter("%(levelname)s %(message)s"))
    root = logging.getLogger()
    root.handlers[:] = [handler]
    root.setLevel(logging.WARNING if quiet else logging.INFO)


def _load_thresholds(path: str | None) -> window_stats.ThresholdTable:
    if path is None:
        return window_stats.ThresholdTable.default()
    return window_stats.ThresholdTable.from_json(path)


def _load_stopwords(source: str | None) -> corpus.StopwordList:
    if source is None or source == "default":
        return corpus.default_stopwords()
    if source == "none":
        return corpus.StopwordList()
    return corpus.load_stopwords(source)


def _ingest(args) -> corpus.CorpusHandle:
    manifest = None
    if getattr(args, "manifest", None):
        payload = jsonio.read(args.manifest)
        manifest = {
            int(y): (Path(args.manifest).parent / p if not Path(p).is_absolute() else Path(p))
            for y, p in payload["years"].items()
        }
    return corpus.ingest(args.corpus, manifest=manifest, threads=args.threads)


def _counts_for(
    handle: corpus.CorpusHandle,
    table: window_stats.ThresholdTable,
    scope: list[int],
    cache_dir: str | None,
) -> window_stats.CountStore:
    if cache_dir is None:
        return window_stats.build_counts(handle, table, scope)
    key = hashlib.sha256(
        f"{handle.fingerprint}|{','.join(map(str, scope))}|{table.fingerprint()}".encode()
    ).hexdigest()[:16]
    slot = Path(cache_dir) / key
    if (slot / "meta.json").exists():
        log.info("reusing cached counts at %s", slot)
        return window_stats.CountStore.load(slot)
    store = window_stats.build_counts(handle, table, scope)
    store.save(slot)
    return store


def _emit(payload: dict, out: str | None) -> None:
    text = jsonio.dumps(payload)
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_ingest_check(args) -> int:
    handle = _ingest(args)
    _emit(handle.stats_summary(), args.out)
    return EXIT_OK


def cmd_similar(args) -> int:
    handle = _ingest(args)
    table = _load_thresholds(args.thresholds)
    scope = corpus.range_scope(handle, args.years)
    store = _counts_for(handle, table, scope, args.cache_dir)
    result = similarity.top_k_similar(
        args.central, args.k, store,
        min_frequency=args.min_frequency, pos_class=args.pos_class,
    )
    _emit(similarity.similar_json(result, store, args.min_frequency, args.pos_class), args.out)
    return EXIT_OK


def _match_words_from_file(path: str) -> tuple[set[str], str | None]:
    """Read a similar.json (or bare word list) as a match set."""
    payload = jsonio.read(path)
    if isinstance(payload, list):
        return set(payload), None
    central = payload.get("central")
    words = {
        n["word"]
        for n in payload.get("neighbors", [])
        if n.get("included", True)
    }
    return words, central


def cmd_condense(args) -> int:
    handle = _ingest(args)
    scope = corpus.range_scope(handle, args.years)
    if args.match_file:
        words, file_central = _match_words_from_file(args.match_file)
        central = args.central or file_central
    else:
        words, central = set(), args.central
    condensed = condenser.condense(handle, words, scope=scope, central=central)
    condenser.export(condensed, args.out, format=args.format)
    log.info(
        "kept %d of %d lines", condensed.totals().lines_kept, condensed.totals().lines_scanned
    )
    return EXIT_OK


def cmd_topics(args) -> int:
    handle = corpus.ingest(args.in_dir, threads=args.threads)
    stop = _load_stopwords(args.stopwords)
    cfg = topics.LdaConfig(
        seed=args.seed,
        k=args.k,
        alpha=args.alpha,
        beta=args.beta,
        iterations=args.iters,
        burn_in=args.burn_in,
        min_doc_len=args.min_doc_len,
    )
    result = topics.train_lda(handle, stop, cfg)
    _emit(topics.model_json(result, summary=args.summary), args.out)
    return EXIT_OK


def cmd_series(args) -> int:
    handle = _ingest(args)
    lo, hi = corpus.parse_year_range(args.years)
    years = range(lo, hi + 1)
    if args.series_kind == "freq":
        series = diachron.frequency_series(args.word, handle, years)
    else:
        table = _load_thresholds(args.thresholds)
        series = diachron.similarity_series(
            args.word, handle, args.base, years, table, mode=args.mode
        )
    _emit(diachron.series_json(series), args.out)
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve

    serve(
        corpus_path=args.corpus,
        bind=args.bind,
        stopwords=_load_stopwords(args.stopwords),
        static_dir=args.static,
        cache_cap=args.cache_cap,
        threads=args.threads,
    )
    return EXIT_OK


def cmd_draw(args) -> int:
    out = Path(args.out)
    resolved = {
        "corpus": args.corpus,
        "central": args.central,
        "k": args.k,
        "years": args.years,
        "thresholds": args.thresholds,
        "stopwords": args.stopwords,
        "min_frequency": args.min_frequency,
        "lda": {
            "k": args.topics_k,
            "alpha": args.alpha,
            "beta": args.beta,
            "iterations": args.iters,
            "burn_in": args.burn_in,
            "seed": args.seed,
            "min_doc_len": args.min_doc_len,
        },
        "out": str(out),
    }
    if args.dry_run:
        sys.stdout.write(jsonio.dumps(resolved))
        return EXIT_OK

    out.mkdir(parents=True, exist_ok=True)
    stage = "ingest"
    try:
        handle = _ingest(args)
        table = _load_thresholds(args.thresholds)
        scope = corpus.range_scope(handle, args.years)

        stage = "counts"
        store = _counts_for(handle, table, scope, args.cache_dir)

        stage = "similar"
        words = similarity.top_k_similar(
            args.central, args.k, store, min_frequency=args.min_frequency
        )
        _emit(
            similarity.similar_json(words, store, args.min_frequency, None),
            str(out / "similar.json"),
        )

        stage = "condense"
        condensed = condenser.condense(handle, words, scope=scope)
        condenser.export(condensed, out, format="tagged")

        stage = "topics"
        stop = _load_stopwords(args.stopwords)
        cfg = topics.LdaConfig(
            seed=args.seed,
            k=args.topics_k,
            alpha=args.alpha,
            beta=args.beta,
            iterations=args.iters,
            burn_in=args.burn_in,
            min_doc_len=args.min_doc_len,
        )
        # Train on the re-ingested export so the run directory equals a
        # chain of the individual subcommands byte for byte.
        result = topics.train_lda(corpus.ingest(out), stop, cfg)
        _emit(topics.model_json(result, summary=True), str(out / "model.json"))

        stage = "report"
        (out / "report.md").write_text(
            _render_report(args.central, words, condensed, result), encoding="utf-8"
        )
    except TopicdrawError as exc:
        (out / "FAILED").write_text(f"{stage}: {exc}\n", encoding="utf-8")
        print(f"stage {stage} failed: {exc}", file=sys.stderr)
        raise
    return EXIT_OK


def _render_report(
    central: str,
    words: similarity.SimilarWordSet,
    condensed: condenser.CondensedCorpus,
    result: topics.TopicModelResult,
) -> str:
    lines = [f"# topicdraw: {central}", ""]
    lines += [f"## Similar words (top {len(words.neighbors)})", ""]
    lines.append("| rank | word | score |")
    lines.append("|-----:|------|------:|")
    for rank, n in enumerate(words.neighbors[:30], start=1):
        flag = "" if n.included else " (excluded)"
        lines.append(f"| {rank} | {n.surface}{flag} | {n.score:.4f} |")
    lines += ["", "## Size reduction", "", "```"]
    lines.append(condenser.format_reduction_table(condenser.reduction_report(condensed)))
    lines += ["```", "", f"## Topics (k={result.config.k})", ""]
    for t in range(result.config.k):
        lines.append(f"- topic {t}: {' '.join(topics.top_words(result, t))}")
    lines += ["", "## Combined ranking", ""]
    lines.append(" ".join(topics.summary_words(result)))
    lines.append("")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topicdraw",
        description="Central-word topic exploration over POS-tagged diachronic corpora.",
    )
    parser.add_argument("--threads", type=int, default=1, help="Worker threads for ingest.")
    parser.add_argument("--quiet", action="store_true", help="Log warnings and errors only.")
    parser.add_argument("--json-logs", action="store_true", help="Emit logs as JSON lines.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_corpus(p):
        p.add_argument("--corpus", required=True, help="Corpus directory, file, or manifest.")
        p.add_argument("--manifest", help="Explicit year-to-file JSON manifest.")

    p = sub.add_parser("ingest-check", help="Parse the corpus and print its stats.")
    add_corpus(p)
    p.add_argument("--out", help="Write stats JSON here instead of stdout.")
    p.set_defaults(func=cmd_ingest_check)

    p = sub.add_parser("similar", help="Top-k similar words of a central word.")
    add_corpus(p)
    p.add_argument("--central", required=True)
    p.add_argument("-k", type=int, default=similarity.DEFAULT_K)
    p.add_argument("--years", help="Inclusive year range, e.g. 1957..1966.")
    p.add_argument("--thresholds", help="Threshold table JSON file.")
    p.add_argument("--min-frequency", type=int, default=similarity.DEFAULT_MIN_FREQUENCY)
    p.add_argument("--pos-class", choices=window_stats.POS_CLASSES)
    p.add_argument("--cache-dir", help="Count-store cache directory.")
    p.add_argument("--out", help="Write the neighbor JSON here instead of stdout.")
    p.set_defaults(func=cmd_similar)

    p = sub.add_parser("condense", help="Extract all lines containing match-set words.")
    add_corpus(p)
    p.add_argument("--central", help="Central word (always part of the match set).")
    p.add_argument("--match-file", help="similar.json (include flags honored) or a word list.")
    p.add_argument("--years")
    p.add_argument("--format", choices=("tagged", "plain"), default="tagged")
    p.add_argument("--out", required=True, help="Output directory.")
    p.set_defaults(func=cmd_condense)

    p = sub.add_parser("topics", help="Train LDA on a (condensed) corpus directory.")
    p.add_argument("--in", dest="in_dir", required=True, help="Corpus/condensed directory.")
    p.add_argument("--k", type=int, default=20)
    p.add_argument("--alpha", type=float, default=None, help="Default: 50/k.")
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--burn-in", type=int, default=200)
    p.add_argument("--min-doc-len", type=int, default=1)
    p.add_argument("--seed", type=int, required=True, help="Chain seed (no silent default).")
    p.add_argument("--stopwords", default="default", help="Path, 'default', or 'none'.")
    p.add_argument("--summary", action="store_true", help="Add the combined word ranking.")
    p.add_argument("--out", help="Write model JSON here instead of stdout.")
    p.set_defaults(func=cmd_topics)

    p = sub.add_parser("series", help="Diachronic series for one word.")
    series_sub = p.add_subparsers(dest="series_kind", required=True)
    for kind in ("freq", "sim"):
        sp = series_sub.add_parser(kind)
        add_corpus(sp)
        sp.add_argument("--word", required=True)
        sp.add_argument("--years", required=True, help="Inclusive range, e.g. 1947..1996.")
        sp.add_argument("--out")
        if kind == "sim":
            sp.add_argument("--base", type=int, required=True)
            sp.add_argument("--mode", choices=("base", "adjacent"), default="base")
            sp.add_argument("--thresholds")
        sp.set_defaults(func=cmd_series, series_kind=kind)

    p = sub.add_parser("serve", help="Run the HTTP service.")
    add_corpus(p)
    p.add_argument("--bind", default="127.0.0.1:8080")
    p.add_argument("--cache-dir", help="Unused by the in-memory service; reserved.")
    p.add_argument("--cache-cap", type=int, default=8, help="LRU capacity for count stores.")
    p.add_argument("--static", help="Directory of built UI assets served at /.")
    p.add_argument("--stopwords", default="default")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("draw", help="End-to-end: similar -> condense -> topics.")
    add_corpus(p)
    p.add_argument("--central", required=True)
    p.add_argument("-k", type=int, default=similarity.DEFAULT_K)
    p.add_argument("--years")
    p.add_argument("--thresholds")
    p.add_argument("--stopwords", default="default")
    p.add_argument("--min-frequency", type=int, default=similarity.DEFAULT_MIN_FREQUENCY)
    p.add_argument("--topics-k", type=int, default=20)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=0.01)
    p.add_argument("--iters", type=int, default=1000)
    p.add_argument("--burn-in", type=int, default=200)
    p.add_argument("--min-doc-len", type=int, default=1)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--cache-dir")
    p.add_argument("--out", required=True, help="Run directory.")
    p.add_argument("--dry-run", action="store_true")
    p.set_defaults(func=cmd_draw)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _setup_logging(args.quiet, args.json_logs)
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except DomainError as exc:
        log.error("%s", exc)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
