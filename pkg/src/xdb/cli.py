"""Command-line interface.

    xdb put <db> <uri> <file> [--format xml|wiki]
    xdb rm <db> <uri>
    xdb ls <db>
    xdb query <db> <query-string> [--endpoint URL]
    xdb convert <file>
    xdb serve [--listen host:port] [--config path]

Exit codes: 0 ok, 1 data/store error, 2 usage or query error.  Data and
error directories come from --data-dir/--error-dir, the XDB_DATA_DIR and
XDB_ERROR_DIR environment variables, or the built-in defaults, in that
order.  `serve` additionally reads a key=value config file; flags beat
the file, the file beats the defaults.
"""

from __future__ import annotations

import argparse
import os
import sys
import urllib.error
import urllib.request
from pathlib import Path
from urllib.parse import quote

from . import __version__
from .service import DEFAULT_DB, DarcService, ServiceConfig, make_server
from .store import DEFAULT_DATA_DIR, DEFAULT_ERROR_DIR, StoreError
from .wikitext import parse_wiki
from .xmlio import ParseError, serialize_tree

_FORMAT_BY_SUFFIX = {".xml": "xml", ".wiki": "wiki"}


def build_parser() -> argparse.ArgumentParser:
    dirs = argparse.ArgumentParser(add_help=False)
    dirs.add_argument("--data-dir", help="document store directory")
    dirs.add_argument("--error-dir", help="error log directory")

    parser = argparse.ArgumentParser(prog="xdb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"xdb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("put", parents=[dirs], help="store and index a document")
    p.add_argument("db")
    p.add_argument("uri")
    p.add_argument("file")
    p.add_argument("--format", choices=("xml", "wiki"), help="override extension-based format")
    p.set_defaults(func=cmd_put)

    p = sub.add_parser("rm", parents=[dirs], help="remove a document")
    p.add_argument("db")
    p.add_argument("uri")
    p.set_defaults(func=cmd_rm)

    p = sub.add_parser("ls", parents=[dirs], help="list stored document URIs")
    p.add_argument("db")
    p.set_defaults(func=cmd_ls)

    p = sub.add_parser("query", parents=[dirs], help="run a query, print the XML result set")
    p.add_argument("db")
    p.add_argument("query_string")
    p.add_argument("--endpoint", help="query a running server instead of the local store")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("convert", parents=[dirs], help="print a wikitext file as XML")
    p.add_argument("file")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("serve", parents=[dirs], help="run the HTTP query service")
    p.add_argument("--listen", help="host:port to bind (default 127.0.0.1:8080)")
    p.add_argument("--config", help="key=value config file (listen, data_dir, error_dir, default_db)")
    p.set_defaults(func=cmd_serve)

    return parser


def _service_config(args: argparse.Namespace, file_values: dict[str, str] | None = None) -> ServiceConfig:
    file_values = file_values or {}
    data_dir = (
        args.data_dir
        or os.environ.get("XDB_DATA_DIR")
        or file_values.get("data_dir")
        or DEFAULT_DATA_DIR
    )
    error_dir = (
        args.error_dir
        or os.environ.get("XDB_ERROR_DIR")
        or file_values.get("error_dir")
        or DEFAULT_ERROR_DIR
    )
    return ServiceConfig(
        data_dir=Path(data_dir),
        error_dir=Path(error_dir),
        default_db=file_values.get("default_db", DEFAULT_DB),
    )


def cmd_put(args: argparse.Namespace) -> int:
    fmt = args.format or _FORMAT_BY_SUFFIX.get(Path(args.file).suffix.lower())
    if fmt is None:
        print(f"xdb put: cannot infer format of {args.file!r}; pass --format", file=sys.stderr)
        return 2
    try:
        raw = Path(args.file).read_bytes()
    except OSError as exc:
        print(f"xdb put: {exc}", file=sys.stderr)
        return 1
    service = DarcService(_service_config(args))
    try:
        db = service.database(args.db, create=True)
        db.ingest(args.uri, raw, fmt)
    except (ParseError, StoreError, ValueError) as exc:
        print(f"xdb put: {exc}", file=sys.stderr)
        return 1
    return 0


def cmd_rm(args: argparse.Namespace) -> int:
    service = DarcService(_service_config(args))
    db = service.database(args.db)
    if db is None:
        print(f"xdb rm: unknown database: {args.db!r}", file=sys.stderr)
        return 1
    try:
        found = db.remove(args.uri)
    except StoreError as exc:
        print(f"xdb rm: {exc}", file=sys.stderr)
        return 1
    if not found:
        print(f"xdb rm: no document stored at {args.uri!r}", file=sys.stderr)
        return 1
    return 0


def cmd_ls(args: argparse.Namespace) -> int:
    service = DarcService(_service_config(args))
    db = service.database(args.db)
    if db is None:
        print(f"xdb ls: unknown database: {args.db!r}", file=sys.stderr)
        return 1
    for uri in db.uris():
        print(uri)
    return 0


def cmd_query(args: argparse.Namespace) -> int:
    config = _service_config(args)
    effective = args.query_string
    if args.db != config.default_db:
        effective = f"{effective}&db={quote(args.db, safe='')}" if effective else f"db={quote(args.db, safe='')}"
    if args.endpoint:
        status, body = _remote_query(args.endpoint, effective)
    else:
        service = DarcService(config)
        status, body = service.handle_query(effective, request_uri=f"/darc?{effective}")
    if status == 200:
        sys.stdout.write(body.decode("utf-8"))
        return 0
    sys.stderr.write(body.decode("utf-8", errors="replace"))
    return 2 if status == 400 else 1


def _remote_query(endpoint: str, raw_query: str) -> tuple[int, bytes]:
    url = f"{endpoint.rstrip('/')}/darc?{raw_query}"
    try:
        with urllib.request.urlopen(url) as response:
            return response.status, response.read()
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read()
    except urllib.error.URLError as exc:
        return 1, f"xdb query: cannot reach {url}: {exc.reason}\n".encode()


def cmd_convert(args: argparse.Namespace) -> int:
    try:
        source = Path(args.file).read_text(encoding="utf-8", errors="replace")
    except OSError as exc:
        print(f"xdb convert: {exc}", file=sys.stderr)
        return 1
    report = parse_wiki(source, "/" + quote(Path(args.file).name, safe=""))
    for warning in report.warnings:
        print(f"xdb convert: line {warning.line}: {warning.message}", file=sys.stderr)
    sys.stdout.write(serialize_tree(report.tree))
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    file_values = _load_config_file(args.config) if args.config else {}
    config = _service_config(args, file_values)
    listen = args.listen or file_values.get("listen") or "127.0.0.1:8080"
    host, _, port_text = listen.rpartition(":")
    if not host or not port_text.isdigit():
        print(f"xdb serve: --listen takes host:port, got {listen!r}", file=sys.stderr)
        return 2
    server = make_server(DarcService(config), host, int(port_text))
    host, port = server.server_address[:2]
    print(f"xdb serve: listening on http://{host}:{port}/darc", file=sys.stderr)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if sep:
            values[key.strip()] = value.strip()
    return values


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
