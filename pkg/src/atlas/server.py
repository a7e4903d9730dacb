"""HTTP/JSON read API over catalog snapshots."""

from __future__ import annotations

import threading
from typing import Any, Iterable, Sequence

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .annotations import ANNOTATION_KINDS, AudioAnnotation
from .errors import (
    InvertedRange,
    MalformedUrn,
    UnknownReference,
    UnknownVersion,
)
from .store import Catalog
from .text import Token
from .urn import DottedRef, format_cite2_urn, format_cts_urn, parse_cts_urn

# Upper bound on rows in one passage payload; larger requests are windowed.
PART_CAP = 100


class SnapshotHolder:
    """Hands out the current catalog; swaps are atomic for readers."""

    def __init__(self, catalog: Catalog) -> None:
        self._catalog = catalog
        self._lock = threading.Lock()

    def get(self) -> Catalog:
        return self._catalog

    def swap(self, catalog: Catalog) -> None:
        with self._lock:
            self._catalog = catalog


def _error_body(error: str, detail: str) -> dict[str, str]:
    return {"error": error, "detail": detail}


def _respond(request: Request, payload: Any, snapshot_id: str) -> Response:
    etag = f'"{snapshot_id}"'
    if request.headers.get("if-none-match") == etag:
        return Response(status_code=304, headers={"ETag": etag})
    return JSONResponse(payload, headers={"ETag": etag})


def _token_payload(token: Token) -> dict[str, Any]:
    return {
        "ve_ref": token.ve_ref,
        "value": token.value,
        "kind": token.kind,
        "start": token.start,
        "end": token.end,
    }


def _window_urn(version_key: str, refs: Sequence[DottedRef]) -> str:
    first = ".".join(refs[0])
    last = ".".join(refs[-1])
    if first == last:
        return f"{version_key}:{first}"
    return f"{version_key}:{first}-{last}"


def _record_urn_text(record: Any) -> str | None:
    urn = record.record_urn
    if urn is not None:
        return format_cite2_urn(urn)
    if isinstance(record, AudioAnnotation):
        return record.to_jsonable()["urn"]
    return None


def create_app(
    holder: SnapshotHolder,
    cors_origins: Iterable[str] = ("*",),
    part_cap: int = PART_CAP,
) -> FastAPI:
    app = FastAPI(title="atlas", docs_url=None, redoc_url=None, openapi_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["GET"],
        allow_headers=["*"],
    )

    @app.exception_handler(MalformedUrn)
    @app.exception_handler(InvertedRange)
    async def _bad_request(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(
            _error_body(type(exc).__name__, str(exc)), status_code=400
        )

    @app.exception_handler(UnknownVersion)
    @app.exception_handler(UnknownReference)
    async def _not_found(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(
            _error_body(type(exc).__name__, str(exc)), status_code=404
        )

    @app.get("/api/library")
    async def library(request: Request) -> Response:
        catalog = holder.get()
        return _respond(request, catalog.library_entries(), catalog.snapshot_id)

    @app.get("/api/passages/{urn:path}")
    async def passages(request: Request, urn: str) -> Response:
        catalog = holder.get()
        parsed = parse_cts_urn(urn)
        entry = catalog.entry_for(parsed)
        resolved = catalog.resolve_passage(parsed)
        window = resolved[:part_cap]
        parts = [
            {
                "ref": ".".join(row.ref),
                "text": row.text,
                "tokens": [_token_payload(t) for t in tokens],
            }
            for row, tokens in window
        ]
        version_text = format_cts_urn(parsed.up_to_version())
        prev_urn = next_urn = None
        if window:
            size = len(window)
            first_pos = entry.index.position(window[0][0].ref)
            last_pos = entry.index.position(window[-1][0].ref)
            before = entry.index.refs[max(0, first_pos - size) : first_pos]
            after = entry.index.refs[last_pos + 1 : last_pos + 1 + size]
            if before:
                prev_urn = _window_urn(version_text, before)
            if after:
                next_urn = _window_urn(version_text, after)
        payload = {
            "urn": urn,
            "metadata": {
                "label": entry.meta.label,
                "language": entry.meta.language,
                "citation_scheme": list(entry.meta.scheme),
            },
            "text_parts": parts,
            "prev": prev_urn,
            "next": next_urn,
        }
        return _respond(request, payload, catalog.snapshot_id)

    @app.get("/api/annotations")
    async def annotations(
        request: Request, urn: str, kind: str | None = None
    ) -> Response:
        catalog = holder.get()
        if kind is not None and kind not in ANNOTATION_KINDS:
            return JSONResponse(
                _error_body("UnknownKind", f"unknown annotation kind {kind!r}"),
                status_code=400,
            )
        parsed = parse_cts_urn(urn)
        records = catalog.annotations_overlapping(parsed, kind=kind)
        payload = [
            {
                "kind": record.kind,
                "urn": _record_urn_text(record),
                "data": record.to_jsonable(),
            }
            for record in records
        ]
        return _respond(request, payload, catalog.snapshot_id)

    @app.get("/api/attributions/report")
    async def attributions_report(request: Request) -> Response:
        catalog = holder.get()
        payload = [
            {"role": row.role, "contributor": row.contributor, "count": row.count}
            for row in catalog.aggregate_attributions()
        ]
        return _respond(request, payload, catalog.snapshot_id)

    return app
