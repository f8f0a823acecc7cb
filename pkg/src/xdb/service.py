"""REST surface: the /darc query endpoint plus PUT/DELETE ingestion.

Queries arrive as HTTP GET (query string in the URI) or POST (the same
grammar, form-urlencoded in the body) and return an XML result set:

    <?xml version="1.0"?>
    <resultset><query>
      <uri>/darc?name=Yoo</uri>
      <depth>100</depth>
      <maxhits>10000</maxhits>
      <syntax type="xdb"/>
      <time>Tue Aug 24 11:21:15 2010</time>
      <version>0.1.0</version>
    </query>
    <result><meta>
      <uri>/testdb/data/output.xml</uri>
      <lastprocessed>2010-08-24T11:20:52-0800</lastprocessed>
    </meta><value>
      <context>name<content>Wook-Sung Yoo</content></context>
    </value></result>
    </resultset>

Documents are ingested with PUT /{db}/{path} and removed with DELETE on
the same path; the first path segment names the database, the whole path
is the document URI.  Queries select a database with the db key (default
`default`).  Queries are read-only and stateless; mutations are
serialized per database, and every query sees a consistent index state.
"""

from __future__ import annotations

import logging
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import unquote_plus
from xml.sax.saxutils import escape

from . import __version__
from .index import ContextIndex, Match
from .model import DocumentMeta, Node, content_text, format_timestamp, resolve_path
from .query import DarcQuery, QueryError, QueryOptions, parse_query_string
from .store import (
    DEFAULT_DATA_DIR,
    DEFAULT_ERROR_DIR,
    DocumentStore,
    StoreConfig,
    StoredDocument,
    StoreError,
)
from .xmlio import XML_DECLARATION, ParseError, serialize_node

__all__ = ["Database", "DarcService", "ServiceConfig", "make_server", "render_value"]

log = logging.getLogger(__name__)

DEFAULT_DB = "default"
XML_CONTENT_TYPE = "application/xml; charset=utf-8"

_FORMAT_BY_SUFFIX = {".xml": "xml", ".wiki": "wiki"}


@dataclass
class ServiceConfig:
    data_dir: Path = field(default_factory=lambda: Path(DEFAULT_DATA_DIR))
    error_dir: Path = field(default_factory=lambda: Path(DEFAULT_ERROR_DIR))
    default_db: str = DEFAULT_DB
    version: str = __version__

    def __post_init__(self) -> None:
        self.data_dir = Path(self.data_dir)
        self.error_dir = Path(self.error_dir)


class Database:
    """One namespace: a document store, its index, and the parsed trees.

    The index is rebuilt from the store on startup; the store remains the
    source of truth.  A single lock serializes mutations and gives every
    search a consistent snapshot.
    """

    def __init__(self, config: StoreConfig):
        self.name = config.db_name
        self.store = DocumentStore(config)
        self.index = ContextIndex()
        self.docs: dict[str, StoredDocument] = {}
        self._lock = threading.RLock()
        for doc in self.store.load_all():
            self.docs[doc.meta.uri] = doc
            self.index.ingest(doc.tree, doc.meta)

    def ingest(self, uri: str, raw: bytes, fmt: str) -> bool:
        """Store and index a document; True when the URI is new."""
        with self._lock:
            created = uri not in self.docs
            doc = self.store.put(uri, raw, fmt)
            self.docs[uri] = doc
            self.index.ingest(doc.tree, doc.meta)
            return created

    def remove(self, uri: str) -> bool:
        with self._lock:
            self.docs.pop(uri, None)
            in_store = self.store.delete(uri)
            in_index = self.index.remove(uri)
            return in_store or in_index

    def uris(self) -> list[str]:
        with self._lock:
            return sorted(self.docs)

    def search_resolved(self, query: DarcQuery) -> list[tuple[Match, Node]]:
        """Matches paired with their nodes; entries gone stale are skipped."""
        with self._lock:
            resolved = []
            for match in self.index.search(query):
                doc = self.docs.get(match.uri)
                if doc is None:
                    continue
                resolved.append((match, resolve_path(doc.tree.root, match.path)))
            return resolved


def render_value(node: Node, context_name: str, syntax: str) -> str:
    """Render one matched node: its own subtree, or the context wrapper."""
    if syntax == "xml":
        return serialize_node(node)
    return f"<context>{escape(context_name)}<content>{escape(content_text(node))}</content></context>"


def render_result_set(
    request_uri: str,
    options: QueryOptions,
    entries: list[tuple[DocumentMeta, str]],
    version: str,
) -> bytes:
    lines = [
        XML_DECLARATION,
        "<resultset><query>",
        f"  <uri>{escape(request_uri)}</uri>",
        f"  <depth>{options.depth}</depth>",
        f"  <maxhits>{options.maxhits}</maxhits>",
        f'  <syntax type="{options.syntax}"/>',
        f"  <time>{time.asctime()}</time>",
        f"  <version>{escape(version)}</version>",
        "</query>",
    ]
    for meta, value in entries:
        lines += [
            "<result><meta>",
            f"  <uri>{escape(meta.uri)}</uri>",
            f"  <lastprocessed>{format_timestamp(meta.lastprocessed)}</lastprocessed>",
            "</meta><value>",
            f"  {value}",
            "</value></result>",
        ]
    lines.append("</resultset>")
    return ("\n".join(lines) + "\n").encode("utf-8")


def render_error(code: str, message: str) -> bytes:
    body = f"{XML_DECLARATION}\n<error><code>{escape(code)}</code><message>{escape(message)}</message></error>\n"
    return body.encode("utf-8")


class DarcService:
    """Transport-independent request handling behind the HTTP endpoints."""

    def __init__(self, config: ServiceConfig | None = None):
        self.config = config or ServiceConfig()
        self._databases: dict[str, Database] = {}
        self._registry_lock = threading.Lock()
        if self.config.data_dir.is_dir():
            for entry in sorted(self.config.data_dir.iterdir()):
                if entry.is_dir():
                    self.database(entry.name, create=True)

    def database(self, name: str, create: bool = False) -> Database | None:
        """Look up a namespace; unknown names exist only for the default db."""
        with self._registry_lock:
            db = self._databases.get(name)
            if db is not None:
                return db
            known = name == self.config.default_db or (self.config.data_dir / name).is_dir()
            if not (create or known):
                return None
            try:
                config = StoreConfig(
                    db_name=name, data_dir=self.config.data_dir, error_dir=self.config.error_dir
                )
            except ValueError:
                if create:
                    raise
                return None
            db = Database(config)
            self._databases[name] = db
            return db

    # -- query ----------------------------------------------------------

    def handle_query(self, raw_query: str, request_uri: str | None = None) -> tuple[int, bytes]:
        """Evaluate a raw query string; returns (status, XML body)."""
        raw_query = raw_query or ""
        if request_uri is None:
            request_uri = f"/darc?{raw_query}" if raw_query else "/darc"
        db_name, effective = _split_db_key(raw_query)
        db = self.database(db_name or self.config.default_db)
        if db is None:
            return 404, render_error("NotFound", f"unknown database: {db_name!r}")
        try:
            query = parse_query_string(effective)
        except QueryError as exc:
            return 400, render_error(type(exc).__name__, str(exc))
        entries = [
            (match.meta, render_value(node, match.context_name, query.options.syntax))
            for match, node in db.search_resolved(query)
        ]
        body = render_result_set(request_uri, query.options, entries, self.config.version)
        return 200, body

    # -- ingestion ------------------------------------------------------

    def handle_put(self, path: str, body: bytes, content_type: str | None = None) -> tuple[int, bytes]:
        parsed = self._parse_document_path(path)
        if isinstance(parsed, bytes):
            return 400, parsed
        db_name, uri = parsed
        fmt = _choose_format(path, content_type)
        if fmt is None:
            return 400, render_error("BadRequest", "cannot determine document format; use a .xml or .wiki path or a content type")
        try:
            db = self.database(db_name, create=True)
        except ValueError as exc:
            return 400, render_error("BadRequest", str(exc))
        try:
            created = db.ingest(uri, body, fmt)
        except ParseError as exc:
            return 400, render_error("ParseError", str(exc))
        except StoreError as exc:
            return 500, render_error("StoreError", str(exc))
        return (201 if created else 204), b""

    def handle_delete(self, path: str) -> tuple[int, bytes]:
        parsed = self._parse_document_path(path)
        if isinstance(parsed, bytes):
            return 400, parsed
        db_name, uri = parsed
        db = self.database(db_name)
        if db is None:
            return 404, render_error("NotFound", f"unknown database: {db_name!r}")
        try:
            found = db.remove(uri)
        except StoreError as exc:
            return 500, render_error("StoreError", str(exc))
        if not found:
            return 404, render_error("NotFound", f"no document stored at {uri!r}")
        return 204, b""

    @staticmethod
    def _parse_document_path(path: str) -> tuple[str, str] | bytes:
        segments = [s for s in path.split("/") if s]
        if len(segments) < 2:
            return render_error("BadRequest", "document paths take the form /{db}/{path}")
        return segments[0], path


def _split_db_key(raw_query: str) -> tuple[str | None, str]:
    """Pull the service-level db selector out of the query string."""
    db_name: str | None = None
    kept = []
    for part in raw_query.split("&"):
        decoded = unquote_plus(part)
        if decoded.startswith("db="):
            db_name = decoded[len("db=") :]
        else:
            kept.append(part)
    return db_name, "&".join(kept)


def _choose_format(path: str, content_type: str | None) -> str | None:
    if content_type:
        base = content_type.split(";")[0].strip().lower()
        if base in ("application/xml", "text/xml"):
            return "xml"
        if "wiki" in base:
            return "wiki"
    return _FORMAT_BY_SUFFIX.get(Path(path).suffix.lower())


class DarcRequestHandler(BaseHTTPRequestHandler):
    """Thin HTTP adapter over a DarcService."""

    service: DarcService  # set by make_server on the subclass
    protocol_version = "HTTP/1.1"

    def _respond(self, status: int, body: bytes) -> None:
        self.send_response(status)
        if body:
            self.send_header("Content-Type", XML_CONTENT_TYPE)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        if body:
            self.wfile.write(body)

    def do_GET(self) -> None:
        path, _, query = self.path.partition("?")
        if path != "/darc":
            self._respond(404, render_error("NotFound", f"no such endpoint: {path}"))
            return
        status, body = self.service.handle_query(query, request_uri=self.path)
        self._respond(status, body)

    def do_POST(self) -> None:
        path, _, _ = self.path.partition("?")
        if path != "/darc":
            self._respond(404, render_error("NotFound", f"no such endpoint: {path}"))
            return
        raw_query = self._read_body().decode("utf-8", errors="replace").strip()
        request_uri = f"/darc?{raw_query}" if raw_query else "/darc"
        status, body = self.service.handle_query(raw_query, request_uri=request_uri)
        self._respond(status, body)

    def do_PUT(self) -> None:
        status, body = self.service.handle_put(
            self.path, self._read_body(), self.headers.get("Content-Type")
        )
        self._respond(status, body)

    def do_DELETE(self) -> None:
        status, body = self.service.handle_delete(self.path)
        self._respond(status, body)

    def _read_body(self) -> bytes:
        length = int(self.headers.get("Content-Length") or 0)
        return self.rfile.read(length) if length > 0 else b""

    def log_message(self, format: str, *args) -> None:
        log.debug("%s %s", self.address_string(), format % args)


def make_server(service: DarcService, host: str = "127.0.0.1", port: int = 0) -> ThreadingHTTPServer:
    """Build a threaded HTTP server bound to host:port (0 picks a free port)."""
    handler = type("BoundDarcRequestHandler", (DarcRequestHandler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)
