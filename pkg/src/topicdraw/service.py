"""HTTP service for the exploration UI.

One session per process over one corpus. The two heavy stages (count
building, LDA) run as background jobs with polling; everything else is
synchronous. Count stores are cached per (year scope, threshold table)
so threshold tweaking re-uses the bootstrap pass where the scope
matches. ``similar``, ``condense``, and ``series`` responses are
rendered through the same canonical JSON writers as the CLI, so the two
surfaces are byte-identical for identical inputs.
"""

from __future__ import annotations

import hashlib
import json
import threading
import uuid
from collections import OrderedDict
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles

from . import condenser, corpus, diachron, jsonio, similarity, topics, window_stats
from .errors import ConfigError, DomainError, UnknownWordError


@dataclass
class Job:
    job_id: str
    stage: str
    status: str = "queued"
    progress: float = 0.0
    result: dict | None = None
    error: str | None = None

    def advance(self, fraction: float) -> None:
        # Progress is monotone regardless of callback scheduling.
        self.progress = max(self.progress, min(1.0, fraction))

    def as_dict(self) -> dict:
        payload = {
            "job_id": self.job_id,
            "stage": self.stage,
            "status": self.status,
            "progress": self.progress,
        }
        if self.error is not None:
            payload["error"] = self.error
        if self.status == "done" and self.result is not None:
            payload["result"] = self.result
        return payload


@dataclass
class Session:
    """All mutable service state: caches, jobs, loaded word sets."""

    handle: corpus.CorpusHandle
    stopwords: corpus.StopwordList
    cache_cap: int = 8
    session_id: str = field(default_factory=lambda: uuid.uuid4().hex[:12])
    lock: threading.Lock = field(default_factory=threading.Lock)
    pass1_cache: dict = field(default_factory=dict)
    counts_cache: OrderedDict = field(default_factory=OrderedDict)
    jobs: dict = field(default_factory=dict)
    similar_sets: dict = field(default_factory=dict)
    condensed: dict = field(default_factory=dict)

    def cached_store(self, key) -> window_stats.CountStore | None:
        with self.lock:
            store = self.counts_cache.get(key)
            if store is not None:
                self.counts_cache.move_to_end(key)
            return store

    def put_store(self, key, store: window_stats.CountStore) -> None:
        with self.lock:
            self.counts_cache[key] = store
            self.counts_cache.move_to_end(key)
            while len(self.counts_cache) > self.cache_cap:
                self.counts_cache.popitem(last=False)

    def build_store(
        self,
        scope: list[int],
        table: window_stats.ThresholdTable,
        progress=None,
    ) -> window_stats.CountStore:
        key = (tuple(scope), table.fingerprint())
        store = self.cached_store(key)
        if store is not None:
            if progress:
                progress(1.0)
            return store
        scope_key = tuple(scope)
        pass1 = self.pass1_cache.get(scope_key)
        if pass1 is None:
            half = (lambda f: progress(f / 2)) if progress else None
            pass1 = window_stats.build_pass1(self.handle, scope, progress=half)
            with self.lock:
                self.pass1_cache[scope_key] = pass1
        rest = (lambda f: progress(0.5 + f / 2)) if progress else None
        store = window_stats.build_pass2(self.handle, table, pass1, progress=rest)
        self.put_store(key, store)
        return store


class ApiError(Exception):
    def __init__(self, status: int, payload: dict):
        super().__init__(payload.get("error", "error"))
        self.status = status
        self.payload = payload


def _bad_request(detail: str) -> ApiError:
    return ApiError(400, {"error": "bad_request", "detail": detail})


def _canonical(payload: dict, status: int = 200) -> Response:
    return Response(
        content=jsonio.dump_bytes(payload), status_code=status, media_type="application/json"
    )


def _resolve_scope(handle: corpus.CorpusHandle, years) -> list[int]:
    if years is None:
        return handle.years
    if isinstance(years, str):
        return corpus.range_scope(handle, years)
    if isinstance(years, list):
        return handle.resolve_scope(int(y) for y in years)
    raise _bad_request("years must be null, a 'A..B' string, or a list of integers")


def _thresholds_from(payload) -> window_stats.ThresholdTable:
    if payload is None:
        return window_stats.ThresholdTable.default()
    if not isinstance(payload, dict):
        raise _bad_request("thresholds must be an object")
    return window_stats.ThresholdTable.from_dict(payload)


def _start_job(session: Session, job_id: str, stage: str, work) -> Job:
    job = Job(job_id, stage)
    session.jobs[job_id] = job

    def run():
        job.status = "running"
        try:
            job.result = work(job.advance)
            job.advance(1.0)
            job.status = "done"
        except Exception as exc:  # surfaced through polling
            job.error = str(exc)
            job.status = "failed"

    threading.Thread(target=run, daemon=True, name=f"job-{job_id}").start()
    return job


def create_app(
    handle: corpus.CorpusHandle,
    stopwords: corpus.StopwordList | None = None,
    static_dir: str | None = None,
    cache_cap: int = 8,
) -> FastAPI:
    app = FastAPI(title="topicdraw", docs_url=None, redoc_url=None)
    session = Session(handle, stopwords or corpus.StopwordList(), cache_cap=cache_cap)
    app.state.session = session

    @app.exception_handler(ApiError)
    async def api_error_handler(_request: Request, exc: ApiError):
        return _canonical(exc.payload, exc.status)

    @app.exception_handler(UnknownWordError)
    async def unknown_word_handler(_request: Request, exc: UnknownWordError):
        return _canonical({"error": "unknown word", "word": exc.word}, 404)

    @app.exception_handler(ConfigError)
    async def config_error_handler(_request: Request, exc: ConfigError):
        return _canonical({"error": "bad_request", "detail": str(exc)}, 400)

    @app.exception_handler(DomainError)
    async def domain_error_handler(_request: Request, exc: DomainError):
        return _canonical({"error": "domain_error", "detail": str(exc)}, 404)

    async def _json_body(request: Request) -> dict:
        try:
            payload = json.loads(await request.body() or b"{}")
        except json.JSONDecodeError:
            raise _bad_request("body is not valid JSON") from None
        if not isinstance(payload, dict):
            raise _bad_request("body must be a JSON object")
        return payload

    @app.get("/api/health")
    async def health():
        return _canonical(
            {
                "status": "ok",
                "corpus": {"years": handle.years, "tokens": handle.total_tokens()},
            }
        )

    @app.post("/api/jobs/counts")
    async def counts_job(request: Request):
        payload = await _json_body(request)
        scope = _resolve_scope(handle, payload.get("years"))
        table = _thresholds_from(payload.get("thresholds"))
        cache_key = f"counts|{','.join(map(str, scope))}|{table.fingerprint()}"
        job_id = hashlib.sha256(cache_key.encode()).hexdigest()[:16]
        if job_id in session.jobs:
            return _canonical({"error": "duplicate_job", "job_id": job_id}, 409)

        def work(progress):
            store = session.build_store(scope, table, progress=progress)
            return {
                "scope": list(store.scope),
                "thresholds_fingerprint": table.fingerprint(),
                "pairs": len(store.pairs),
                "total_tokens": store.total_tokens,
            }

        job = _start_job(session, job_id, "counts", work)
        return _canonical({"job_id": job.job_id, "status": job.status})

    @app.get("/api/jobs/{job_id}")
    async def job_status(job_id: str):
        job = session.jobs.get(job_id)
        if job is None:
            raise ApiError(404, {"error": "unknown_job", "job_id": job_id})
        return _canonical(job.as_dict())

    @app.post("/api/similar")
    async def similar(request: Request):
        payload = await _json_body(request)
        central = payload.get("central")
        if not isinstance(central, str) or not central:
            raise _bad_request("central must be a non-empty string")
        k = payload.get("k", similarity.DEFAULT_K)
        min_frequency = payload.get("min_frequency", similarity.DEFAULT_MIN_FREQUENCY)
        pos_class = payload.get("pos_class")
        if not isinstance(k, int) or not isinstance(min_frequency, int):
            raise _bad_request("k and min_frequency must be integers")
        scope = _resolve_scope(handle, payload.get("years"))
        table = _thresholds_from(payload.get("thresholds"))
        store = session.build_store(scope, table)
        result = similarity.top_k_similar(
            central, k, store, min_frequency=min_frequency, pos_class=pos_class
        )
        with session.lock:
            session.similar_sets[central] = {
                "set": result,
                "store": store,
                "min_frequency": min_frequency,
                "pos_class": pos_class,
            }
        return _canonical(similarity.similar_json(result, store, min_frequency, pos_class))

    @app.patch("/api/similar/{central}/include")
    async def patch_include(central: str, request: Request):
        payload = await _json_body(request)
        word = payload.get("word")
        included = payload.get("included")
        if not isinstance(word, str) or not isinstance(included, bool):
            raise _bad_request("body must carry 'word' (string) and 'included' (boolean)")
        entry = session.similar_sets.get(central)
        if entry is None:
            raise ApiError(404, {"error": "unknown_handle", "central": central})
        entry["set"].set_included(word, included)
        return _canonical(
            similarity.similar_json(
                entry["set"], entry["store"], entry["min_frequency"], entry["pos_class"]
            )
        )

    @app.post("/api/condense")
    async def condense_endpoint(request: Request):
        payload = await _json_body(request)
        central = payload.get("central")
        if not isinstance(central, str) or not central:
            raise _bad_request("central must be a non-empty string")
        if central not in handle.vocab:
            raise UnknownWordError(central)
        scope = _resolve_scope(handle, payload.get("years"))
        entry = session.similar_sets.get(central)
        words = entry["set"] if entry else {central}
        condensed = condenser.condense(handle, words, scope=scope, central=central)
        with session.lock:
            session.condensed[condensed.condensed_id] = condensed
        return _canonical(condenser.stats_json(condensed))

    @app.post("/api/jobs/topics")
    async def topics_job(request: Request):
        payload = await _json_body(request)
        cid = payload.get("condensed")
        condensed = session.condensed.get(cid)
        if condensed is None:
            raise ApiError(404, {"error": "unknown_handle", "condensed": cid})
        raw_cfg = payload.get("config")
        if not isinstance(raw_cfg, dict) or "seed" not in raw_cfg:
            raise _bad_request("config object with an explicit seed is required")
        try:
            cfg = topics.LdaConfig(
                seed=int(raw_cfg["seed"]),
                k=int(raw_cfg.get("k", 20)),
                alpha=raw_cfg.get("alpha"),
                beta=float(raw_cfg.get("beta", 0.01)),
                iterations=int(raw_cfg.get("iterations", 1000)),
                burn_in=int(raw_cfg.get("burn_in", 200)),
                min_doc_len=int(raw_cfg.get("min_doc_len", 1)),
            )
            cfg.validate()
        except (TypeError, ValueError) as exc:
            raise _bad_request(f"invalid config: {exc}") from None
        summary = bool(raw_cfg.get("summary", False))
        cache_key = f"topics|{cid}|{json.dumps(cfg.as_dict(), sort_keys=True)}|{summary}"
        job_id = hashlib.sha256(cache_key.encode()).hexdigest()[:16]
        if job_id in session.jobs:
            return _canonical({"error": "duplicate_job", "job_id": job_id}, 409)

        def work(progress):
            def on_sweep(sweep, *_arrays):
                progress(sweep / cfg.iterations)

            result = topics.train_lda(condensed, session.stopwords, cfg, on_sweep=on_sweep)
            return topics.model_json(result, summary=summary)

        job = _start_job(session, job_id, "topics", work)
        return _canonical({"job_id": job.job_id, "status": job.status})

    def _int_param(value: str | None, name: str) -> int:
        if value is None:
            raise _bad_request(f"query parameter {name} is required")
        try:
            return int(value)
        except ValueError:
            raise _bad_request(f"{name} must be an integer") from None

    @app.get("/api/series/freq")
    async def series_freq(request: Request):
        params = request.query_params
        word = params.get("word")
        if not word:
            raise _bad_request("query parameter word is required")
        lo = _int_param(params.get("from"), "from")
        hi = _int_param(params.get("to"), "to")
        series = diachron.frequency_series(word, handle, range(lo, hi + 1))
        return _canonical(diachron.series_json(series))

    @app.get("/api/series/sim")
    async def series_sim(request: Request):
        params = request.query_params
        word = params.get("word")
        if not word:
            raise _bad_request("query parameter word is required")
        base = _int_param(params.get("base"), "base")
        lo = _int_param(params.get("from"), "from")
        hi = _int_param(params.get("to"), "to")
        mode = params.get("mode", "base")
        if mode not in ("base", "adjacent"):
            raise _bad_request("mode must be 'base' or 'adjacent'")
        series = diachron.similarity_series(
            word, handle, base, range(lo, hi + 1), mode=mode
        )
        return _canonical(diachron.series_json(series))

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def serve(
    corpus_path: str,
    bind: str = "127.0.0.1:8080",
    stopwords: corpus.StopwordList | None = None,
    static_dir: str | None = None,
    cache_cap: int = 8,
    threads: int = 1,
) -> None:
    """Ingest the corpus and run uvicorn until interrupted."""
    import uvicorn

    handle = corpus.ingest(corpus_path, threads=threads)
    app = create_app(handle, stopwords=stopwords, static_dir=static_dir, cache_cap=cache_cap)
    host, _, port = bind.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))
