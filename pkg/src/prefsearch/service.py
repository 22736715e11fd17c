"""HTTP API over both engines: session lifecycle, suggestions, queries,
facet counts and evaluation reports.

Session query state is kept server-side so the session logs written through
this layer are authoritative.  Every state-changing request carries a client
request id; retries with the same id return the cached response and append
no second event.
"""

from __future__ import annotations

import threading
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

from fastapi import Body, FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles

from . import catalog as cat, engine as eng, evaluate, facetbase, session as session_mod
from .errors import PrefSearchError, SessionClosedError, ValidationError


@dataclass
class ServiceConfig:
    catalog_path: str
    host: str = "127.0.0.1"
    port: int = 8000
    log_dir: str = "logs"
    page_size: int = 15
    suggestion_limit: int = 10
    static_dir: Optional[str] = None
    # injectable for deterministic tests; returns milliseconds
    clock_ms: Optional[Callable[[], int]] = None

    def __post_init__(self):
        if self.page_size < 1:
            raise ValidationError("page size must be >= 1")


@dataclass
class _SessionState:
    session_id: str
    engine_name: str
    recorder: session_mod.SessionRecorder
    started_ms: int
    query_state: dict = field(default_factory=dict)
    ranked_ids: list = field(default_factory=list)
    results: list = field(default_factory=list)
    pages_viewed: int = 0
    request_cache: dict = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


def create_app(config: ServiceConfig) -> FastAPI:
    catalog_path = Path(config.catalog_path)
    if not catalog_path.exists():
        raise PrefSearchError(f"catalog file not found: {catalog_path}")
    catalog = cat.load_catalog(catalog_path)
    catalog_hash = cat.catalog_hash(catalog)
    search_engine = eng.Engine(catalog)
    log_dir = Path(config.log_dir)
    log_dir.mkdir(parents=True, exist_ok=True)
    clock_ms = config.clock_ms or (lambda: int(time.monotonic() * 1000))

    app = FastAPI(title="prefsearch")
    sessions: dict[str, _SessionState] = {}

    def get_session(session_id: str) -> _SessionState:
        state = sessions.get(session_id)
        if state is None:
            raise HTTPException(404, f"unknown session {session_id!r}")
        return state

    def visible_ids(state: _SessionState) -> list[str]:
        return state.ranked_ids[: state.pages_viewed * config.page_size]

    def record(state: _SessionState, action: str, selected: Optional[str] = None) -> None:
        event = session_mod.QueryEvent(
            session_id=state.session_id,
            timestamp_ms=max(0, clock_ms() - state.started_ms),
            engine=state.engine_name,
            action=action,
            query_state=state.query_state,
            ranked_ids=tuple(state.ranked_ids),
            visible_ids=tuple(visible_ids(state)),
            selected_product=selected,
        )
        state.recorder.record(event)

    def page_json(state: _SessionState, page_index: int) -> dict:
        if state.engine_name == session_mod.ENGINE_WEIGHTED:
            page = eng.paginate(state.results, page_index, config.page_size)
            return page.to_json()
        start = page_index * config.page_size
        ids = state.ranked_ids[start:start + config.page_size]
        return {
            "page_index": page_index,
            "page_size": config.page_size,
            "total_count": len(state.ranked_ids),
            "items": [{"product_id": pid} for pid in ids],
        }

    @app.get("/ready")
    def ready():
        return {"status": "ok", "catalog_hash": catalog_hash,
                "products": len(catalog.products)}

    @app.get("/catalog/products/{product_id}")
    def get_product(product_id: str):
        try:
            product = catalog.product(product_id)
        except KeyError:
            raise HTTPException(404, f"unknown product {product_id!r}")
        return cat._product_to_json(product)

    @app.get("/suggest")
    def get_suggestions(prefix: str = "", limit: Optional[int] = None):
        suggestions = eng.suggest(prefix, catalog, limit or config.suggestion_limit)
        return {"suggestions": [s.to_json() for s in suggestions]}

    @app.post("/sessions")
    def create_session(body: dict = Body(...)):
        engine_name = body.get("engine")
        if engine_name not in (session_mod.ENGINE_WEIGHTED, session_mod.ENGINE_FACETED):
            raise HTTPException(400, f"unknown engine {engine_name!r}")
        session_id = body.get("session_id") or uuid.uuid4().hex[:12]
        if session_id in sessions:
            raise HTTPException(400, f"session {session_id!r} already exists")
        recorder = session_mod.SessionRecorder(
            session_id, engine_name, catalog_hash, log_dir / f"{session_id}.ndjson"
        )
        state = _SessionState(session_id, engine_name, recorder, started_ms=clock_ms())
        if engine_name == session_mod.ENGINE_WEIGHTED:
            state.query_state = eng.WeightedQuery().to_json()
            state.results = search_engine.rank(eng.WeightedQuery())
        else:
            state.query_state = facetbase.FacetSelection().to_json()
            state.results = []
        state.ranked_ids = (
            [r.product_id for r in state.results]
            if engine_name == session_mod.ENGINE_WEIGHTED
            else facetbase.facet_filter(facetbase.FacetSelection(), catalog)
        )
        state.pages_viewed = 1
        sessions[session_id] = state
        return {"session_id": session_id, "engine": engine_name,
                "catalog_hash": catalog_hash}

    def _with_idempotency(state: _SessionState, request_id: Optional[str], fn):
        with state.lock:
            if request_id and request_id in state.request_cache:
                return state.request_cache[request_id]
            response = fn()
            if request_id:
                state.request_cache[request_id] = response
            return response

    @app.post("/sessions/{session_id}/query")
    def submit_query(session_id: str, body: dict = Body(...)):
        state = get_session(session_id)
        if state.engine_name != session_mod.ENGINE_WEIGHTED:
            raise HTTPException(400, "session uses the faceted engine")

        def run():
            try:
                query = eng.WeightedQuery.from_json(body["query_state"])
                results = search_engine.rank(query)
            except (KeyError, ValidationError, PrefSearchError) as exc:
                raise HTTPException(400, str(exc))
            state.query_state = query.to_json()
            state.results = results
            state.ranked_ids = [r.product_id for r in results]
            state.pages_viewed = 1
            action = body.get("action", "AddTerm")
            try:
                record(state, action)
            except SessionClosedError as exc:
                raise HTTPException(409, str(exc))
            return {"page": page_json(state, 0)}

        return _with_idempotency(state, body.get("request_id"), run)

    @app.post("/sessions/{session_id}/selection")
    def submit_selection(session_id: str, body: dict = Body(...)):
        state = get_session(session_id)
        if state.engine_name != session_mod.ENGINE_FACETED:
            raise HTTPException(400, "session uses the weighted engine")

        def run():
            try:
                selection = facetbase.FacetSelection.from_json(body["selection"])
                ranked = facetbase.facet_filter(selection, catalog)
            except (KeyError, ValidationError, PrefSearchError) as exc:
                raise HTTPException(400, str(exc))
            state.query_state = selection.to_json()
            state.ranked_ids = ranked
            state.pages_viewed = 1
            action = body.get("action", "SelectFacet")
            try:
                record(state, action)
            except SessionClosedError as exc:
                raise HTTPException(409, str(exc))
            return {"page": page_json(state, 0)}

        return _with_idempotency(state, body.get("request_id"), run)

    @app.get("/sessions/{session_id}/facet-counts")
    def get_facet_counts(session_id: str):
        state = get_session(session_id)
        if state.engine_name != session_mod.ENGINE_FACETED:
            raise HTTPException(400, "session uses the weighted engine")
        selection = facetbase.FacetSelection.from_json(state.query_state)
        counts = facetbase.facet_counts(selection, catalog)
        return {
            "counts": [
                {"facet_id": f, "value": v, "count": n}
                for (f, v), n in sorted(counts.items())
            ]
        }

    @app.post("/sessions/{session_id}/page")
    def fetch_page(session_id: str, body: dict = Body(...)):
        state = get_session(session_id)
        page_index = int(body.get("page_index", 0))
        if page_index < 0:
            raise HTTPException(400, "page_index must be >= 0")

        def run():
            pages_needed = page_index + 1
            if pages_needed > state.pages_viewed:
                state.pages_viewed = min(
                    pages_needed,
                    -(-len(state.ranked_ids) // config.page_size) if state.ranked_ids else 1,
                )
                try:
                    record(state, "NextPage")
                except SessionClosedError as exc:
                    raise HTTPException(409, str(exc))
            return {"page": page_json(state, page_index)}

        return _with_idempotency(state, body.get("request_id"), run)

    @app.post("/sessions/{session_id}/select")
    def select_product(session_id: str, body: dict = Body(...)):
        state = get_session(session_id)
        product_id = body.get("product_id")
        if not product_id:
            raise HTTPException(400, "product_id required")

        def run():
            try:
                record(state, "SelectProduct", selected=product_id)
            except SessionClosedError as exc:
                raise HTTPException(409, str(exc))
            state.recorder.close()
            return {"session_id": session_id, "selected": product_id}

        return _with_idempotency(state, body.get("request_id"), run)

    @app.post("/eval/report")
    def eval_report(body: dict = Body(default={})):
        spec_path = body.get("spec_path") or cat.bundled_spec_path()
        try:
            spec = evaluate.load_relevance_spec(spec_path)
            judgments = evaluate.judge_catalog(catalog, spec)
        except (OSError, PrefSearchError) as exc:
            raise HTTPException(400, str(exc))
        logs = []
        for path in sorted(log_dir.glob("*.ndjson")):
            log = session_mod.load_session_log(path)
            if log.events:
                logs.append(log)
        out_dir = body.get("out_dir") or str(log_dir / "report")
        result = evaluate.report(logs, judgments, out_dir, catalog=catalog,
                                 groupings=body.get("groupings") or {})
        return result

    if config.static_dir:
        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app


def start(config: ServiceConfig):
    """Run the service with uvicorn (blocking)."""
    import uvicorn

    app = create_app(config)
    uvicorn.run(app, host=config.host, port=config.port)
