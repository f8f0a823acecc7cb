"""File-backed document store, one namespace (database) per directory.

Layout: `<data_dir>/<db_name>/<encoded-uri>` holds the raw document bytes
and `<encoded-uri>.meta` a key=value sidecar (uri, format, lastprocessed).
URIs are percent-encoded into a single path segment, with dots encoded as
well so the `.meta` suffix stays unambiguous.  Writes go through a temp
file and an atomic rename, so readers only ever see complete versions.
Ingest failures append one line to `<error_dir>/<db_name>.log`.
"""

from __future__ import annotations

import logging
import os
import tempfile
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from urllib.parse import quote, unquote

from .model import (
    DocumentMeta,
    DocumentTree,
    format_timestamp,
    parse_timestamp,
    validate_uri,
)
from .wikitext import parse_wiki
from .xmlio import ParseError, parse_xml

__all__ = ["DocumentStore", "StoreConfig", "StoreError", "StoredDocument", "parse_document"]

log = logging.getLogger(__name__)

DEFAULT_DATA_DIR = "test/data"
DEFAULT_ERROR_DIR = "error"


class StoreError(OSError):
    """The store could not read or write the filesystem."""


@dataclass
class StoreConfig:
    db_name: str
    data_dir: Path = field(default_factory=lambda: Path(DEFAULT_DATA_DIR))
    error_dir: Path = field(default_factory=lambda: Path(DEFAULT_ERROR_DIR))

    def __post_init__(self) -> None:
        self.data_dir = Path(self.data_dir)
        self.error_dir = Path(self.error_dir)
        if not self.db_name or "/" in self.db_name or self.db_name in (".", ".."):
            raise ValueError(f"database name is not a valid path segment: {self.db_name!r}")

    @property
    def db_dir(self) -> Path:
        return self.data_dir / self.db_name

    @property
    def error_log(self) -> Path:
        return self.error_dir / f"{self.db_name}.log"


@dataclass
class StoredDocument:
    meta: DocumentMeta
    raw: bytes
    tree: DocumentTree


def parse_document(raw: bytes, uri: str, fmt: str) -> DocumentTree:
    """Parse raw bytes under the named format; wiki input never fails."""
    if fmt == "xml":
        return parse_xml(raw, uri)
    if fmt == "wiki":
        return parse_wiki(raw.decode("utf-8", errors="replace"), uri).tree
    raise ValueError(f"unknown document format: {fmt!r}")


def _encode_uri(uri: str) -> str:
    return quote(uri, safe="").replace(".", "%2E").replace("~", "%7E")


def _decode_uri(name: str) -> str:
    return unquote(name)


class DocumentStore:
    """Read/write access to one database directory."""

    def __init__(self, config: StoreConfig):
        self.config = config

    # -- paths ---------------------------------------------------------

    def _data_path(self, uri: str) -> Path:
        return self.config.db_dir / _encode_uri(uri)

    def _meta_path(self, uri: str) -> Path:
        return self.config.db_dir / (_encode_uri(uri) + ".meta")

    # -- operations ----------------------------------------------------

    def put(self, uri: str, raw: bytes, fmt: str) -> StoredDocument:
        """Parse and persist; replaces any prior version of the URI."""
        validate_uri(uri)
        try:
            tree = parse_document(raw, uri, fmt)
        except ParseError as exc:
            self.log_error(uri, exc)
            raise
        meta = DocumentMeta(uri=uri, lastprocessed=datetime.now().astimezone(), format=fmt)
        sidecar = (
            f"uri={meta.uri}\n"
            f"format={meta.format}\n"
            f"lastprocessed={format_timestamp(meta.lastprocessed)}\n"
        )
        try:
            self.config.db_dir.mkdir(parents=True, exist_ok=True)
            _atomic_write(self._data_path(uri), raw)
            _atomic_write(self._meta_path(uri), sidecar.encode("utf-8"))
        except OSError as exc:
            raise StoreError(f"cannot persist {uri!r}: {exc}") from exc
        return StoredDocument(meta=meta, raw=raw, tree=tree)

    def delete(self, uri: str) -> bool:
        found = False
        for path in (self._data_path(uri), self._meta_path(uri)):
            try:
                path.unlink()
                found = True
            except FileNotFoundError:
                pass
            except OSError as exc:
                raise StoreError(f"cannot delete {uri!r}: {exc}") from exc
        return found

    def load_all(self) -> list[StoredDocument]:
        """Load every persisted document; corrupt entries are logged and skipped."""
        db_dir = self.config.db_dir
        if not db_dir.exists():
            return []
        try:
            names = sorted(p.name for p in db_dir.iterdir())
        except OSError as exc:
            raise StoreError(f"cannot read database directory {db_dir}: {exc}") from exc
        docs = []
        for name in names:
            if name.endswith(".meta") or name.endswith(".tmp"):
                continue
            uri = _decode_uri(name)
            try:
                docs.append(self._load_one(name, uri))
            except (OSError, ValueError, KeyError) as exc:
                self.log_error(uri, exc)
        docs.sort(key=lambda d: d.meta.uri)
        return docs

    def _load_one(self, name: str, uri: str) -> StoredDocument:
        raw = (self.config.db_dir / name).read_bytes()
        sidecar = (self.config.db_dir / (name + ".meta")).read_text("utf-8")
        fields: dict[str, str] = {}
        for line in sidecar.splitlines():
            if line:
                key, _, value = line.partition("=")
                fields[key] = value
        meta = DocumentMeta(
            uri=fields["uri"],
            lastprocessed=parse_timestamp(fields["lastprocessed"]),
            format=fields["format"],
        )
        if meta.uri != uri:
            raise ValueError(f"sidecar uri {meta.uri!r} does not match file name")
        return StoredDocument(meta=meta, raw=raw, tree=parse_document(raw, uri, meta.format))

    def list_uris(self) -> list[str]:
        return [doc.meta.uri for doc in self.load_all()]

    def log_error(self, uri: str, exc: Exception) -> None:
        """Append one structured line: timestamp, uri, error class, message."""
        message = " ".join(str(exc).split())
        stamp = format_timestamp(datetime.now().astimezone())
        line = f"{stamp}\t{uri}\t{type(exc).__name__}\t{message}\n"
        try:
            self.config.error_dir.mkdir(parents=True, exist_ok=True)
            with open(self.config.error_log, "a", encoding="utf-8") as fh:
                fh.write(line)
        except OSError:
            log.warning("cannot append to error log %s", self.config.error_log)


def _atomic_write(path: Path, data: bytes) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
