"""Filesystem document store: one directory per report, revisioned updates.

Layout under the store root:

    <id>/report.json              current document
    <id>/rev                      current revision integer
    <id>/attachments/<name>       attachment bytes
    <id>/attachment-types.json    name -> {content_type, revision written at}

Updates are compare-and-set on the revision and serialized per id; every file
lands via write-temp-then-rename so readers never observe a partial write.
"""

from __future__ import annotations

import json
import os
import threading
from dataclasses import dataclass
from pathlib import Path


class StoreError(Exception):
    pass


class MissingDocument(StoreError):
    """No document with this id."""


class RevisionConflict(StoreError):
    """Compare-and-set failed: the caller's revision is stale."""

    def __init__(self, message: str, current_revision: int):
        super().__init__(message)
        self.current_revision = current_revision


class AttachmentConflict(StoreError):
    """An attachment with this name was already written at this revision."""


@dataclass(frozen=True)
class StoredDocument:
    id: str
    revision: int
    json_text: str


_ID_OK = set(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_."
)


def _check_id(doc_id: str) -> str:
    if not doc_id or not set(doc_id) <= _ID_OK or doc_id.startswith("."):
        raise StoreError(f"invalid document id {doc_id!r}")
    return doc_id


def _check_name(name: str) -> str:
    if not name or "/" in name or "\\" in name or name.startswith("."):
        raise StoreError(f"invalid attachment name {name!r}")
    return name


class DocumentStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        # fault-injection seam for crash tests: called after the temp file is
        # written, before it is renamed into place
        self._before_rename = None

    def _lock(self, doc_id: str) -> threading.Lock:
        with self._locks_guard:
            if doc_id not in self._locks:
                self._locks[doc_id] = threading.Lock()
            return self._locks[doc_id]

    def _atomic_write(self, path: Path, data: bytes) -> None:
        tmp = path.parent / f".{path.name}.tmp-{os.getpid()}-{threading.get_ident()}"
        tmp.write_bytes(data)
        if self._before_rename is not None:
            self._before_rename(path)
        os.replace(tmp, path)

    def _doc_dir(self, doc_id: str) -> Path:
        return self.root / _check_id(doc_id)

    def _read_revision(self, doc_dir: Path) -> int:
        try:
            return int((doc_dir / "rev").read_text())
        except FileNotFoundError:
            return 0

    # -- documents ------------------------------------------------------------

    def list_ids(self) -> list[str]:
        return sorted(
            p.name for p in self.root.iterdir() if (p / "report.json").is_file()
        )

    def exists(self, doc_id: str) -> bool:
        return (self._doc_dir(doc_id) / "report.json").is_file()

    def get(self, doc_id: str) -> StoredDocument:
        doc_dir = self._doc_dir(doc_id)
        try:
            text = (doc_dir / "report.json").read_text(encoding="utf-8")
        except FileNotFoundError:
            raise MissingDocument(f"no document {doc_id!r}") from None
        return StoredDocument(doc_id, self._read_revision(doc_dir), text)

    def put(self, doc_id: str, json_text: str, expected_revision: int) -> int:
        """CAS write: expected_revision 0 creates, r updates r -> r+1."""
        doc_dir = self._doc_dir(doc_id)
        with self._lock(doc_id):
            current = self._read_revision(doc_dir)
            if current != expected_revision:
                raise RevisionConflict(
                    f"document {doc_id!r} is at revision {current}, "
                    f"caller expected {expected_revision}",
                    current_revision=current,
                )
            doc_dir.mkdir(parents=True, exist_ok=True)
            # commit order: document body first, then the revision marker
            self._atomic_write(doc_dir / "report.json", json_text.encode("utf-8"))
            new_revision = current + 1
            self._atomic_write(doc_dir / "rev", str(new_revision).encode("ascii"))
            return new_revision

    # -- attachments ------------------------------------------------------------

    def _read_manifest(self, doc_dir: Path) -> dict:
        try:
            return json.loads((doc_dir / "attachment-types.json").read_text(encoding="utf-8"))
        except FileNotFoundError:
            return {}

    def put_attachment(self, doc_id: str, name: str, data: bytes, content_type: str) -> int:
        """Store bytes under the current revision; same-name same-revision is a conflict."""
        _check_name(name)
        doc_dir = self._doc_dir(doc_id)
        with self._lock(doc_id):
            if not (doc_dir / "report.json").is_file():
                raise MissingDocument(f"no document {doc_id!r}")
            revision = self._read_revision(doc_dir)
            manifest = self._read_manifest(doc_dir)
            entry = manifest.get(name)
            if entry is not None and entry.get("revision") == revision:
                raise AttachmentConflict(
                    f"attachment {name!r} already written at revision {revision}"
                )
            (doc_dir / "attachments").mkdir(exist_ok=True)
            self._atomic_write(doc_dir / "attachments" / name, data)
            manifest[name] = {"content_type": content_type, "revision": revision}
            self._atomic_write(
                doc_dir / "attachment-types.json",
                json.dumps(manifest, indent=2, sort_keys=True).encode("utf-8"),
            )
            return revision

    def get_attachment(self, doc_id: str, name: str) -> tuple[bytes, str]:
        _check_name(name)
        doc_dir = self._doc_dir(doc_id)
        path = doc_dir / "attachments" / name
        try:
            data = path.read_bytes()
        except FileNotFoundError:
            raise MissingDocument(f"no attachment {name!r} on document {doc_id!r}") from None
        entry = self._read_manifest(doc_dir).get(name) or {}
        return data, entry.get("content_type", "application/octet-stream")

    def list_attachments(self, doc_id: str) -> dict[str, str]:
        doc_dir = self._doc_dir(doc_id)
        if not (doc_dir / "report.json").is_file():
            raise MissingDocument(f"no document {doc_id!r}")
        manifest = self._read_manifest(doc_dir)
        return {name: entry.get("content_type", "") for name, entry in sorted(manifest.items())}
