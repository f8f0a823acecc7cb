"""Query-string grammar for contextual search requests.

A query is one or more expressions joined with `&`, each selecting context
nodes by element name and, optionally, by content tokens:

    context=C&content=V    explicit pair (content binds to the nearest
                           preceding context part still missing content)
    C=V                    shorthand pair
    C_co_V                 contains operator
    term=C=V               term form
    C_nc_V                 negation: nodes named C not containing V
    context=C  or  C       content omitted: every node named C
    content=V              any context containing V

All contains-family forms parse to identical expression values, so
syntactically different but equivalent queries are equal by construction.
The option keys depth, maxhits and syntax tune evaluation and rendering;
every other `key=value` pair is an expression.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from urllib.parse import quote, unquote_plus

__all__ = [
    "CONTAINS",
    "DEFAULT_DEPTH",
    "DEFAULT_MAXHITS",
    "NOT_CONTAINS",
    "DarcQuery",
    "EmptyQueryError",
    "ExpressionError",
    "OptionError",
    "QueryError",
    "QueryExpression",
    "QueryOptions",
    "canonicalize",
    "parse_query_string",
]

CONTAINS = "contains"
NOT_CONTAINS = "not_contains"

DEFAULT_DEPTH = 100
DEFAULT_MAXHITS = 10000
DEFAULT_SYNTAX = "xdb"
SYNTAXES = ("xdb", "xml")

RESERVED_KEYS = frozenset({"context", "content", "term", "syntax", "depth", "maxhits"})


class QueryError(ValueError):
    """Base class for query-string parse failures."""


class EmptyQueryError(QueryError):
    """The query string contains no expression."""


class OptionError(QueryError):
    """An option key carries a malformed value."""


class ExpressionError(QueryError):
    """An expression part cannot be classified."""


@dataclass(frozen=True)
class QueryExpression:
    """One (context, content, operator) selector.

    context None means any context (standalone content search); content
    None means content omitted (match every node of that name).
    """

    context: str | None
    content: str | None
    op: str = CONTAINS

    def __post_init__(self) -> None:
        if self.op not in (CONTAINS, NOT_CONTAINS):
            raise ValueError(f"unknown operator: {self.op!r}")
        if self.op == NOT_CONTAINS and self.content is None:
            raise ValueError("negation requires content")
        if self.context is None and self.content is None:
            raise ValueError("content search requires content")


@dataclass(frozen=True)
class QueryOptions:
    depth: int = DEFAULT_DEPTH
    maxhits: int = DEFAULT_MAXHITS
    syntax: str = DEFAULT_SYNTAX


@dataclass
class DarcQuery:
    """A parsed query: a union of expressions plus evaluation options."""

    expressions: list[QueryExpression]
    options: QueryOptions = QueryOptions()
    raw: str = field(default="", compare=False)


_PENDING = object()


def parse_query_string(raw: str) -> DarcQuery:
    """Parse the percent-encoded query-string portion of a request URI."""
    entries: list[list] = []  # [context, content-or-_PENDING, op]
    options: dict[str, object] = {}

    for part in raw.split("&"):
        if not part:
            continue
        decoded = unquote_plus(part)

        if decoded.startswith("context="):
            context = decoded[len("context=") :]
            if not context:
                raise ExpressionError("context part with empty name")
            entries.append([context, _PENDING, CONTAINS])
        elif decoded.startswith("content="):
            content = decoded[len("content=") :]
            for entry in reversed(entries):
                if entry[1] is _PENDING:
                    entry[1] = content
                    break
            else:
                entries.append([None, content, CONTAINS])
        elif decoded.startswith("term="):
            context, sep, content = decoded[len("term=") :].partition("=")
            if not sep:
                raise ExpressionError(f"term form requires context=content: {decoded!r}")
            if not context:
                raise ExpressionError("term form with empty context")
            entries.append([context, content, CONTAINS])
        elif decoded.startswith(("syntax=", "depth=", "maxhits=")):
            key, _, value = decoded.partition("=")
            options[key] = _parse_option(key, value)
        elif "=" in decoded:
            key, _, value = decoded.partition("=")
            if not key:
                raise ExpressionError(f"expression with empty context: {decoded!r}")
            entries.append([key, value, CONTAINS])
        else:
            entries.append(_parse_bare(decoded))

    expressions = [
        QueryExpression(context, None if content is _PENDING else content, op)
        for context, content, op in entries
    ]
    if not expressions:
        raise EmptyQueryError("query contains no expression")
    return DarcQuery(expressions, QueryOptions(**options), raw)  # type: ignore[arg-type]


def _parse_bare(decoded: str) -> list:
    """Classify a part without `=`: the _co_/_nc_ forms or a bare context."""
    cuts = [(decoded.find(op), op) for op in ("_co_", "_nc_")]
    cuts = [(i, op) for i, op in cuts if i >= 0]
    if not cuts:
        if not decoded.strip():
            raise ExpressionError(f"blank query part: {decoded!r}")
        return [decoded, None, CONTAINS]
    i, op = min(cuts)
    context, content = decoded[:i], decoded[i + len(op) :]
    if not context:
        raise ExpressionError(f"expression with empty context: {decoded!r}")
    if op == "_nc_":
        if not content:
            raise ExpressionError(f"negation with empty content: {decoded!r}")
        return [context, content, NOT_CONTAINS]
    return [context, content, CONTAINS]


def _parse_option(key: str, value: str) -> object:
    if key == "syntax":
        if value not in SYNTAXES:
            raise OptionError(f"unknown syntax: {value!r}")
        return value
    try:
        number = int(value)
    except ValueError:
        raise OptionError(f"{key} must be an integer: {value!r}") from None
    if number <= 0:
        raise OptionError(f"{key} must be positive: {value!r}")
    return number


def canonicalize(query: DarcQuery) -> str:
    """Deterministic rendering; equal canonical strings mean equal semantics.

    Values are percent-encoded so that separator characters survive a
    re-parse.  Only queries whose contexts and contents avoid the grammar
    metacharacters (`=`, the _co_/_nc_ operators, reserved key prefixes)
    round-trip exactly; generated values in tests stay inside that set.
    """
    parts = []
    for expr in query.expressions:
        context = quote(expr.context, safe="") if expr.context is not None else None
        content = quote(expr.content, safe="") if expr.content is not None else None
        if expr.op == NOT_CONTAINS:
            parts.append(f"{context}_nc_{content}")
        elif content is None:
            parts.append(context)
        elif context is None:
            parts.append(f"content={content}")
        else:
            parts.append(f"term={context}={content}")
    opts = query.options
    parts += [f"depth={opts.depth}", f"maxhits={opts.maxhits}", f"syntax={opts.syntax}"]
    return "&".join(parts)
