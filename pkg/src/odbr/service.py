"""HTTP front end over the document store.

Exposes report ingestion with compare-and-set revisions (via If-Match),
attachment upload/download, the rendered HTML page, and deterministic
regeneration of both replay scripts from the stored document.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, Request, Response
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .bundle import build_replay_scripts
from .report import (
    ReportValidationError,
    compute_report_id,
    from_json,
    render_html,
    to_json,
)
from .store import (
    AttachmentConflict,
    DocumentStore,
    MissingDocument,
    RevisionConflict,
    StoreError,
)

DEFAULT_PORT = 8477

_ANNOTATION_KEYS = {"title", "expected_behavior", "actual_behavior"}


def _violations(violations: list[str]) -> JSONResponse:
    return JSONResponse(status_code=422, content={"violations": violations})


def _conflict(exc: RevisionConflict) -> JSONResponse:
    return JSONResponse(
        status_code=409,
        content={"error": str(exc), "current_revision": exc.current_revision},
    )


def _not_found(message: str) -> JSONResponse:
    return JSONResponse(status_code=404, content={"error": message})


def _parse_if_match(request: Request) -> Optional[int]:
    value = request.headers.get("if-match")
    if value is None:
        return None
    value = value.strip().strip('"')
    if not value.isdigit():
        raise ValueError(f"If-Match must be a revision integer, got {value!r}")
    return int(value)


def create_app(store_root: str | Path, ui_dir: Optional[str | Path] = None) -> FastAPI:
    store = DocumentStore(store_root)
    app = FastAPI(title="odbr report service", docs_url=None, redoc_url=None)
    app.state.store = store

    @app.post("/reports")
    async def create_report(request: Request):
        body = await request.body()
        try:
            doc = json.loads(body)
        except json.JSONDecodeError as exc:
            return _violations([f"document is not valid JSON: {exc}"])
        if isinstance(doc, dict) and not doc.get("id"):
            doc["id"] = "0" * 16  # placeholder so validation passes, replaced below
            assigned = True
        else:
            assigned = False
        try:
            report = from_json(json.dumps(doc))
        except ReportValidationError as exc:
            return _violations(exc.violations)
        if assigned:
            report.id = compute_report_id(report)
        try:
            if store.exists(report.id):
                return JSONResponse(
                    status_code=409,
                    content={"error": f"report {report.id!r} already exists"},
                )
            revision = store.put(report.id, to_json(report), expected_revision=0)
        except RevisionConflict as exc:
            return _conflict(exc)
        except StoreError as exc:
            return _violations([str(exc)])
        return JSONResponse(status_code=201, content={"id": report.id, "revision": revision})

    @app.get("/reports")
    def list_reports():
        entries = []
        for doc_id in store.list_ids():
            try:
                doc = json.loads(store.get(doc_id).json_text)
            except (MissingDocument, json.JSONDecodeError):
                continue
            entries.append(
                {
                    "id": doc_id,
                    "title": doc.get("title", ""),
                    "created_at": doc.get("created_at", ""),
                    "step_count": len(doc.get("steps") or []),
                }
            )
        entries.sort(key=lambda e: (e["created_at"], e["id"]), reverse=True)
        return entries

    @app.get("/reports/{doc_id}")
    def get_report(doc_id: str):
        try:
            stored = store.get(doc_id)
        except (MissingDocument, StoreError):
            return _not_found(f"no report {doc_id!r}")
        return Response(
            content=stored.json_text,
            media_type="application/json",
            headers={"ETag": str(stored.revision)},
        )

    @app.put("/reports/{doc_id}")
    async def update_report(doc_id: str, request: Request):
        try:
            expected = _parse_if_match(request)
        except ValueError as exc:
            return _violations([str(exc)])
        if expected is None:
            return JSONResponse(
                status_code=428,
                content={"error": "If-Match header with the current revision is required"},
            )
        if not store.exists(doc_id):
            return _not_found(f"no report {doc_id!r}")
        body = await request.body()
        try:
            report = from_json(body.decode("utf-8"))
        except (ReportValidationError, UnicodeDecodeError) as exc:
            violations = exc.violations if isinstance(exc, ReportValidationError) else [str(exc)]
            return _violations(violations)
        if report.id != doc_id:
            return _violations([f"document id {report.id!r} does not match path id {doc_id!r}"])
        try:
            revision = store.put(doc_id, to_json(report), expected_revision=expected)
        except RevisionConflict as exc:
            return _conflict(exc)
        return {"id": doc_id, "revision": revision}

    @app.patch("/reports/{doc_id}/annotations")
    async def patch_annotations(doc_id: str, request: Request):
        try:
            expected = _parse_if_match(request)
        except ValueError as exc:
            return _violations([str(exc)])
        body = await request.body()
        try:
            patch = json.loads(body)
        except json.JSONDecodeError as exc:
            return _violations([f"patch is not valid JSON: {exc}"])
        if not isinstance(patch, dict):
            return _violations(["patch must be a JSON object"])
        problems = [f"unknown annotation field: {k}" for k in patch if k not in _ANNOTATION_KEYS]
        problems += [
            f"annotation {k} must be a string"
            for k, v in patch.items()
            if k in _ANNOTATION_KEYS and not isinstance(v, str)
        ]
        if problems:
            return _violations(problems)
        try:
            stored = store.get(doc_id)
        except (MissingDocument, StoreError):
            return _not_found(f"no report {doc_id!r}")
        if expected is not None and expected != stored.revision:
            return _conflict(
                RevisionConflict(
                    f"document {doc_id!r} is at revision {stored.revision}, "
                    f"caller expected {expected}",
                    current_revision=stored.revision,
                )
            )
        report = from_json(stored.json_text)
        for key, value in patch.items():
            setattr(report, key, value)
        try:
            revision = store.put(doc_id, to_json(report), expected_revision=stored.revision)
        except RevisionConflict as exc:  # racing writer slipped in after our read
            return _conflict(exc)
        return {"id": doc_id, "revision": revision}

    @app.post("/reports/{doc_id}/attachments/{name}")
    async def upload_attachment(doc_id: str, name: str, request: Request):
        data = await request.body()
        content_type = request.headers.get("content-type", "application/octet-stream")
        try:
            revision = store.put_attachment(doc_id, name, data, content_type)
        except MissingDocument:
            return _not_found(f"no report {doc_id!r}")
        except AttachmentConflict as exc:
            return JSONResponse(status_code=409, content={"error": str(exc)})
        except StoreError as exc:
            return _violations([str(exc)])
        return JSONResponse(status_code=201, content={"name": name, "revision": revision})

    @app.get("/reports/{doc_id}/attachments/{name}")
    def download_attachment(doc_id: str, name: str):
        try:
            data, content_type = store.get_attachment(doc_id, name)
        except (MissingDocument, StoreError):
            return _not_found(f"no attachment {name!r} on report {doc_id!r}")
        return Response(content=data, media_type=content_type)

    @app.get("/reports/{doc_id}/html")
    def report_html(doc_id: str):
        try:
            stored = store.get(doc_id)
            report = from_json(stored.json_text)
        except (MissingDocument, StoreError):
            return _not_found(f"no report {doc_id!r}")
        except ReportValidationError as exc:
            return _violations(exc.violations)
        page = render_html(
            report,
            asset_resolver=lambda name: f"/reports/{doc_id}/attachments/{name}",
            replay_links={
                "sendevent": f"/reports/{doc_id}/replay/sendevent",
                "adb": f"/reports/{doc_id}/replay/adb",
            },
        )
        return Response(content=page, media_type="text/html; charset=utf-8")

    @app.get("/reports/{doc_id}/replay/{flavor}")
    def replay_script(doc_id: str, flavor: str):
        if flavor not in ("sendevent", "adb"):
            return _not_found(f"unknown replay flavor {flavor!r}")
        try:
            stored = store.get(doc_id)
            report = from_json(stored.json_text)
        except (MissingDocument, StoreError):
            return _not_found(f"no report {doc_id!r}")
        except ReportValidationError as exc:
            return _violations(exc.violations)
        events_text = ""
        if report.raw_events_ref:
            try:
                data, _ = store.get_attachment(doc_id, report.raw_events_ref)
                events_text = data.decode("utf-8")
            except (MissingDocument, StoreError):
                events_text = ""
        sendevent, adb = build_replay_scripts(report, events_text)
        script = sendevent if flavor == "sendevent" else adb
        return Response(content=script, media_type="text/x-shellscript")

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
