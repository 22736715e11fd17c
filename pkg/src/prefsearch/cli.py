"""Command-line front door: dataset generation, one-shot searches, scripted
sessions, judging and report generation.

Exit codes: 0 success, 2 validation/usage errors, 1 runtime errors.
"""

from __future__ import annotations

import csv
import json
import math
import sys
from collections import Counter
from pathlib import Path

import click

from . import catalog as cat, engine as eng, evaluate, facetbase, session as session_mod
from .errors import (
    CatalogParseError,
    PrefSearchError,
    ValidationError,
)

SCRIPT_FORMAT = "prefsearch-script/1"

EXIT_VALIDATION = 2
EXIT_RUNTIME = 1


def _fail(exc: Exception):
    click.echo(f"error: {exc}", err=True)
    if isinstance(exc, (ValidationError, CatalogParseError)):
        sys.exit(EXIT_VALIDATION)
    sys.exit(EXIT_RUNTIME)


@click.group()
def main():
    """Preference-weighted product search and session evaluation."""


@main.command()
@click.option("--seed", type=int, required=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--products", type=int, default=150, show_default=True)
def generate(seed, out, products):
    """Generate a synthetic catalog satisfying the bundled scenario stats."""
    try:
        constraints = cat.DatasetConstraints(n_products=products)
        catalog = cat.generate_dataset(seed, constraints)
        cat.save_catalog(catalog, out)
    except PrefSearchError as exc:
        _fail(exc)
    click.echo(f"wrote {len(catalog.products)} products to {out} "
               f"(hash {cat.catalog_hash(catalog)[:12]})")


@main.command()
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), required=True)
def validate(catalog_path):
    """Load a catalog file and check every invariant."""
    try:
        catalog = cat.load_catalog(catalog_path)
    except PrefSearchError as exc:
        _fail(exc)
    categories = {f.category for f in catalog.schema}
    click.echo(f"ok: {len(catalog.products)} products, {len(catalog.schema)} facets, "
               f"{len(categories)} categories")


@main.command()
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), required=True)
@click.option("--query", "query_path", type=click.Path(exists=True), required=True,
              help="JSON file with a weighted query state")
@click.option("--page", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text")
def search(catalog_path, query_path, page, fmt):
    """Rank one weighted query against a catalog and print a result page."""
    try:
        catalog = cat.load_catalog(catalog_path)
        with open(query_path, encoding="utf-8") as fh:
            query = eng.WeightedQuery.from_json(json.load(fh))
        results = eng.Engine(catalog).rank(query)
        result_page = eng.paginate(results, page)
    except (PrefSearchError, json.JSONDecodeError) as exc:
        _fail(exc)
    if fmt == "json":
        click.echo(json.dumps(result_page.to_json(), indent=1))
    else:
        click.echo(f"{result_page.total_count} results (page {page})")
        for item in result_page.items:
            product = catalog.product(item.product_id)
            click.echo(f"  {item.product_id}  srs={item.srs:.3f}  {product.name}")


@main.command()
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), required=True)
@click.option("--prefix", default="")
@click.option("--limit", type=int, default=10, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="text")
def suggest(catalog_path, prefix, limit, fmt):
    """Autocomplete facet terms and categories for a prefix."""
    try:
        catalog = cat.load_catalog(catalog_path)
        suggestions = eng.suggest(prefix, catalog, limit)
    except PrefSearchError as exc:
        _fail(exc)
    if fmt == "json":
        click.echo(json.dumps([s.to_json() for s in suggestions], indent=1))
    else:
        for s in suggestions:
            extra = f" ({s.category})" if s.category else " (free text)"
            click.echo(f"{s.text}{extra}")


@main.command()
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), required=True)
@click.option("--spec", "spec_path", type=click.Path(exists=True), default=None,
              help="relevance spec JSON; defaults to the bundled scenario")
@click.option("--format", "fmt", type=click.Choice(["json", "csv", "text"]), default="text")
def judge(catalog_path, spec_path, fmt):
    """Grade every product against a relevance spec."""
    try:
        catalog = cat.load_catalog(catalog_path)
        spec = evaluate.load_relevance_spec(spec_path or cat.bundled_spec_path())
        judgments = evaluate.judge_catalog(catalog, spec)
    except PrefSearchError as exc:
        _fail(exc)
    histogram = Counter(judgments.values())
    relevant = sum(n for g, n in histogram.items() if g >= 1)
    if fmt == "json":
        click.echo(json.dumps({
            "spec": spec.name,
            "histogram": {str(g): histogram[g] for g in sorted(histogram)},
            "relevant": relevant,
            "judgments": judgments,
        }, indent=1))
    elif fmt == "csv":
        writer = csv.writer(sys.stdout)
        writer.writerow(["product_id", "grs"])
        for pid in sorted(judgments):
            writer.writerow([pid, judgments[pid]])
    else:
        click.echo(f"spec {spec.name}: {relevant} relevant of {len(judgments)}")
        for grade in sorted(histogram, reverse=True):
            click.echo(f"  grs={grade}: {histogram[grade]}")


@main.command()
@click.option("--log", "log_path", type=click.Path(exists=True), required=True)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), required=True)
def replay(log_path, catalog_path):
    """Recompute a session log's rankings and verify they match."""
    try:
        catalog = cat.load_catalog(catalog_path)
        log = session_mod.load_session_log(log_path)
        session_mod.replay(log, catalog)
    except PrefSearchError as exc:
        _fail(exc)
    click.echo(f"ok: {len(log.events)} events replay identically")


@main.command("script-run")
@click.option("--script", "script_path", type=click.Path(exists=True), required=True)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), required=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def script_run(script_path, catalog_path, out_path):
    """Execute a scripted session and write its log."""
    try:
        catalog = cat.load_catalog(catalog_path)
        with open(script_path, encoding="utf-8") as fh:
            script = json.load(fh)
        log = run_script(script, catalog, out_path)
    except (PrefSearchError, json.JSONDecodeError) as exc:
        _fail(exc)
    click.echo(f"session {log.session_id}: {len(log.events)} events -> {out_path}")


@main.command("eval")
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), required=True)
@click.option("--spec", "spec_path", type=click.Path(exists=True), default=None)
@click.option("--logs", "log_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
@click.option("--groupings", "groupings_path", type=click.Path(exists=True), default=None,
              help="CSV mapping session_id -> label (e.g. perceived support)")
def eval_cmd(catalog_path, spec_path, log_dir, out_dir, groupings_path):
    """Judge the catalog and emit the CSV report bundle over stored logs."""
    try:
        catalog = cat.load_catalog(catalog_path)
        spec = evaluate.load_relevance_spec(spec_path or cat.bundled_spec_path())
        judgments = evaluate.judge_catalog(catalog, spec)
        groupings = {}
        if groupings_path:
            with open(groupings_path, newline="", encoding="utf-8") as fh:
                for row in csv.DictReader(fh):
                    groupings[row["session_id"]] = row["label"]
        logs = [session_mod.load_session_log(p)
                for p in sorted(Path(log_dir).glob("*.ndjson"))]
        result = evaluate.report(logs, judgments, out_dir, catalog=catalog,
                                 groupings=groupings)
    except PrefSearchError as exc:
        _fail(exc)
    for path in result["files"]:
        click.echo(f"wrote {path}")
    for err in result["errors"]:
        click.echo(f"warning: {err}", err=True)


@main.command()
@click.option("--catalog", "catalog_path", type=click.Path(exists=True), required=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--log-dir", default="logs", show_default=True)
@click.option("--static", "static_dir", type=click.Path(file_okay=False), default=None,
              help="directory with the built web UI bundle")
def serve(catalog_path, host, port, log_dir, static_dir):
    """Start the HTTP service."""
    from . import service

    try:
        config = service.ServiceConfig(
            catalog_path=catalog_path, host=host, port=port,
            log_dir=log_dir, static_dir=static_dir,
        )
        service.start(config)
    except PrefSearchError as exc:
        _fail(exc)


# ---------------------------------------------------------------------------
# Scripted sessions


def run_script(script: dict, catalog: cat.Catalog, out_path) -> session_mod.SessionLog:
    """Execute a scripted session (stand-in for a study participant) and
    write its log file."""
    if script.get("format") != SCRIPT_FORMAT:
        raise ValidationError(f"unsupported script format {script.get('format')!r}")
    engine_name = script["engine"]
    session_id = script["session_id"]
    search_engine = eng.Engine(catalog)
    recorder = session_mod.SessionRecorder(
        session_id, engine_name, cat.catalog_hash(catalog), out_path
    )

    criteria: list[eng.Criterion] = []
    selection = facetbase.FacetSelection()
    ranked: list[str] = []
    results: list[eng.ScoredResult] = []
    pages_viewed = 0

    def recompute():
        nonlocal ranked, results
        if engine_name == session_mod.ENGINE_WEIGHTED:
            results = search_engine.rank(eng.WeightedQuery(tuple(criteria)))
            ranked = [r.product_id for r in results]
        else:
            ranked = facetbase.facet_filter(selection, catalog)

    def query_state() -> dict:
        if engine_name == session_mod.ENGINE_WEIGHTED:
            return eng.WeightedQuery(tuple(criteria)).to_json()
        return selection.to_json()

    try:
        for step in script["actions"]:
            action = step["action"]
            t_ms = int(step.get("t_ms", 0))
            selected = None
            if action == "AddTerm":
                criteria.append(eng.Criterion.from_json(step["criterion"]))
                recompute()
                pages_viewed = 1
            elif action == "RemoveTerm":
                criteria[:] = [c for c in criteria if c.criterion_id != step["criterion_id"]]
                recompute()
                pages_viewed = 1
            elif action == "SetWeight":
                criteria[:] = [
                    eng.Criterion.from_json({**c.to_json(), "weight": step["weight"]})
                    if c.criterion_id == step["criterion_id"] else c
                    for c in criteria
                ]
                recompute()
                pages_viewed = 1
            elif action == "SelectFacet":
                selection = selection.with_value(step["facet_id"], step["value"])
                recompute()
                pages_viewed = 1
            elif action == "DeselectFacet":
                selection = facetbase.FacetSelection(
                    selection.selected - {(step["facet_id"], step["value"])}, selection.sort
                )
                recompute()
                pages_viewed = 1
            elif action == "Sort":
                selection = facetbase.FacetSelection(selection.selected, step["sort"])
                recompute()
                pages_viewed = 1
            elif action == "NextPage":
                max_pages = max(1, math.ceil(len(ranked) / eng.PAGE_SIZE))
                pages_viewed = min(pages_viewed + 1, max_pages)
            elif action == "SelectProduct":
                selected = step.get("product_id") or (ranked[0] if ranked else None)
                if selected is None:
                    raise ValidationError("SelectProduct on an empty result list")
            else:
                raise ValidationError(f"unknown script action {action!r}")
            if pages_viewed == 0:
                pages_viewed = 1
            recorder.record(session_mod.QueryEvent(
                session_id=session_id,
                timestamp_ms=t_ms,
                engine=engine_name,
                action=action,
                query_state=query_state(),
                ranked_ids=tuple(ranked),
                visible_ids=tuple(ranked[: pages_viewed * eng.PAGE_SIZE]),
                selected_product=selected,
            ))
    finally:
        recorder.close()
    return recorder.log


if __name__ == "__main__":
    main()
