"""Schema-less context index over ingested document trees.

Every element node of every document gets one posting, keyed by the
lowercase element name and carrying the stemmed token set of the node's
subtree text.  An expression matches a node when the name matches (or the
context is omitted), the node is within the depth limit, and the query
tokens are (or, negated, are not) a subset of the node's tokens.  A query
returns the union of its expressions' matches.

`brute_force_search` evaluates the same contract by direct tree traversal
with no index; it exists as the test oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .model import DocumentMeta, DocumentTree, Node, NodePath, content_text, iter_contexts
from .query import CONTAINS, DarcQuery, QueryExpression
from .stem import tokenize_and_stem

__all__ = ["ContextIndex", "Match", "Posting", "brute_force_search"]


@dataclass(frozen=True)
class Posting:
    uri: str
    path: NodePath
    depth: int
    name: str
    tokens: frozenset[str]


@dataclass(frozen=True, eq=True)
class Match:
    """A matched context node; ordered by (uri, path in document order)."""

    uri: str
    path: NodePath
    context_name: str
    meta: DocumentMeta

    def sort_key(self) -> tuple[str, NodePath]:
        return (self.uri, self.path)


class ContextIndex:
    """Name-keyed postings for all ingested documents.

    Not internally synchronized; callers serialize mutation against search.
    """

    def __init__(self) -> None:
        self._postings: dict[str, list[Posting]] = {}
        self._meta: dict[str, DocumentMeta] = {}

    def __contains__(self, uri: str) -> bool:
        return uri in self._meta

    def __len__(self) -> int:
        return len(self._meta)

    def posting_count(self) -> int:
        return sum(len(bucket) for bucket in self._postings.values())

    def postings(self, name: str) -> list[Posting]:
        return list(self._postings.get(name.lower(), ()))

    def ingest(self, tree: DocumentTree, meta: DocumentMeta) -> None:
        """Index every element node of the tree, replacing prior postings."""
        if tree.uri != meta.uri:
            raise ValueError(f"tree uri {tree.uri!r} does not match meta uri {meta.uri!r}")
        self.remove(meta.uri)
        for path, node in iter_contexts(tree.root):
            posting = Posting(
                uri=meta.uri,
                path=path,
                depth=len(path) + 1,
                name=node.name,
                tokens=frozenset(tokenize_and_stem(content_text(node))),
            )
            self._postings.setdefault(node.name.lower(), []).append(posting)
        self._meta[meta.uri] = meta

    def remove(self, uri: str) -> bool:
        """Drop all postings for the URI; False when it was never ingested."""
        if uri not in self._meta:
            return False
        del self._meta[uri]
        for name in list(self._postings):
            bucket = [p for p in self._postings[name] if p.uri != uri]
            if bucket:
                self._postings[name] = bucket
            else:
                del self._postings[name]
        return True

    def search(self, query: DarcQuery) -> list[Match]:
        hits: dict[tuple[str, NodePath], Match] = {}
        for expr in query.expressions:
            tokens = (
                frozenset(tokenize_and_stem(expr.content)) if expr.content is not None else None
            )
            if expr.context is None:
                buckets: Iterable[list[Posting]] = self._postings.values()
            else:
                buckets = (self._postings.get(expr.context.lower(), []),)
            for bucket in buckets:
                for posting in bucket:
                    if posting.depth > query.options.depth:
                        continue
                    if tokens is not None:
                        contained = tokens <= posting.tokens
                        if contained != (expr.op == CONTAINS):
                            continue
                    key = (posting.uri, posting.path)
                    if key not in hits:
                        hits[key] = Match(posting.uri, posting.path, posting.name, self._meta[posting.uri])
        ordered = sorted(hits.values(), key=Match.sort_key)
        return ordered[: query.options.maxhits]


def brute_force_search(
    docs: Iterable[tuple[DocumentTree, DocumentMeta]], query: DarcQuery
) -> list[Match]:
    """Reference evaluation by full traversal; used only as a test oracle."""
    found: dict[tuple[str, NodePath], Match] = {}
    for tree, meta in docs:
        _walk(tree.root, (), tree.uri, meta, query, found)
    ordered = sorted(found.values(), key=Match.sort_key)
    return ordered[: query.options.maxhits]


def _walk(node, path, uri, meta, query, found) -> None:
    if len(path) + 1 <= query.options.depth:
        for expr in query.expressions:
            if _node_matches(node, expr):
                found.setdefault((uri, path), Match(uri, path, node.name, meta))
                break
    index = 0
    for child in node.children:
        if isinstance(child, Node):
            _walk(child, path + (index,), uri, meta, query, found)
            index += 1


def _node_matches(node: Node, expr: QueryExpression) -> bool:
    if expr.context is not None and node.name.lower() != expr.context.lower():
        return False
    if expr.content is None:
        return True
    contained = set(tokenize_and_stem(expr.content)) <= set(tokenize_and_stem(content_text(node)))
    return contained == (expr.op == CONTAINS)
