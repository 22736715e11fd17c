"""Append-only session logs and deterministic replay.

Log files are newline-delimited JSON: a header line with session metadata
and the catalog content hash, then one line per query event.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import catalog as cat, engine as eng, facetbase
from .errors import (
    PrefSearchError,
    ReplayDivergenceError,
    SessionClosedError,
    ValidationError,
)

LOG_FORMAT = "prefsearch-session/1"

ENGINE_WEIGHTED = "weighted"
ENGINE_FACETED = "faceted"

ACTIONS = (
    "AddTerm", "RemoveTerm", "SetWeight", "SelectFacet", "DeselectFacet",
    "Sort", "NextPage", "SelectProduct",
)


@dataclass(frozen=True)
class QueryEvent:
    session_id: str
    timestamp_ms: int
    engine: str
    action: str
    query_state: dict
    ranked_ids: tuple[str, ...]
    visible_ids: tuple[str, ...]
    selected_product: Optional[str] = None

    def __post_init__(self):
        if self.action not in ACTIONS:
            raise ValidationError(f"unknown action {self.action!r}")
        if self.engine not in (ENGINE_WEIGHTED, ENGINE_FACETED):
            raise ValidationError(f"unknown engine {self.engine!r}")
        if tuple(self.ranked_ids[: len(self.visible_ids)]) != tuple(self.visible_ids):
            raise ValidationError("visible_ids must be a prefix of ranked_ids")

    def to_json(self) -> dict:
        d = {
            "session_id": self.session_id,
            "timestamp_ms": self.timestamp_ms,
            "engine": self.engine,
            "action": self.action,
            "query_state": self.query_state,
            "ranked_ids": list(self.ranked_ids),
            "visible_ids": list(self.visible_ids),
        }
        if self.selected_product is not None:
            d["selected_product"] = self.selected_product
        return d

    @staticmethod
    def from_json(d: dict) -> "QueryEvent":
        return QueryEvent(
            session_id=d["session_id"],
            timestamp_ms=int(d["timestamp_ms"]),
            engine=d["engine"],
            action=d["action"],
            query_state=d["query_state"],
            ranked_ids=tuple(d["ranked_ids"]),
            visible_ids=tuple(d["visible_ids"]),
            selected_product=d.get("selected_product"),
        )


@dataclass
class SessionLog:
    session_id: str
    engine: str
    catalog_hash: str
    events: list[QueryEvent] = field(default_factory=list)

    @property
    def final_selection(self) -> Optional[str]:
        if self.events and self.events[-1].action == "SelectProduct":
            return self.events[-1].selected_product
        return None

    @property
    def closed(self) -> bool:
        return any(e.action == "SelectProduct" for e in self.events)


class SessionRecorder:
    """Single writer for one session's log file; enforces append-only order."""

    def __init__(self, session_id: str, engine: str, catalog_hash: str, path):
        self.log = SessionLog(session_id, engine, catalog_hash)
        self.path = Path(path)
        header = {
            "format": LOG_FORMAT,
            "session_id": session_id,
            "engine": engine,
            "catalog_hash": catalog_hash,
        }
        self._fh = open(self.path, "w", encoding="utf-8")
        self._fh.write(json.dumps(header, sort_keys=True) + "\n")
        self._fh.flush()

    def record(self, event: QueryEvent) -> None:
        if self.log.closed:
            raise SessionClosedError(
                f"session {self.log.session_id} already ended with SelectProduct"
            )
        if self.log.events and event.timestamp_ms < self.log.events[-1].timestamp_ms:
            raise ValidationError(
                f"timestamp regression: {event.timestamp_ms} after "
                f"{self.log.events[-1].timestamp_ms}"
            )
        if event.session_id != self.log.session_id:
            raise ValidationError("event belongs to a different session")
        self._fh.write(json.dumps(event.to_json(), sort_keys=True) + "\n")
        self._fh.flush()
        self.log.events.append(event)

    def close(self) -> None:
        self._fh.close()


def load_session_log(path) -> SessionLog:
    with open(path, encoding="utf-8") as fh:
        lines = [line for line in fh.read().splitlines() if line.strip()]
    if not lines:
        raise ValidationError(f"empty session log {path}")
    header = json.loads(lines[0])
    if header.get("format") != LOG_FORMAT:
        raise ValidationError(f"unsupported session log format {header.get('format')!r}")
    log = SessionLog(header["session_id"], header["engine"], header["catalog_hash"])
    for line in lines[1:]:
        log.events.append(QueryEvent.from_json(json.loads(line)))
    return log


def save_session_log(log: SessionLog, path) -> None:
    header = {
        "format": LOG_FORMAT,
        "session_id": log.session_id,
        "engine": log.engine,
        "catalog_hash": log.catalog_hash,
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for event in log.events:
            fh.write(json.dumps(event.to_json(), sort_keys=True) + "\n")


def recompute_ranking(event: QueryEvent, search_engine: eng.Engine) -> list[str]:
    if event.engine == ENGINE_WEIGHTED:
        query = eng.WeightedQuery.from_json(event.query_state)
        return [r.product_id for r in search_engine.rank(query)]
    selection = facetbase.FacetSelection.from_json(event.query_state)
    return facetbase.facet_filter(selection, search_engine.catalog)


def replay(log: SessionLog, catalog: cat.Catalog) -> list[list[str]]:
    """Recompute every event's ranking; raise on the first divergence."""
    actual_hash = cat.catalog_hash(catalog)
    if actual_hash != log.catalog_hash:
        raise ReplayDivergenceError(
            f"catalog mismatch: log recorded {log.catalog_hash[:12]}…, "
            f"got {actual_hash[:12]}…"
        )
    search_engine = eng.Engine(catalog)
    rankings = []
    for i, event in enumerate(log.events):
        recomputed = recompute_ranking(event, search_engine)
        if recomputed != list(event.ranked_ids):
            raise ReplayDivergenceError(
                f"session {log.session_id}: event {i} ({event.action}) diverges"
            )
        rankings.append(recomputed)
    return rankings
