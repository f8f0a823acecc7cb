"""Uniform context/content tree shared by every parser, the index and the server.

Any ingested document, whatever its source format, becomes a tree of named
Node elements.  A node is a context; the text carried inside its subtree is
the content that queries search.  Nodes are addressed by paths: sequences of
zero-based child indices counting element children only.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from datetime import datetime
from typing import Iterator

__all__ = [
    "DOCUMENT_FORMATS",
    "DocumentMeta",
    "DocumentTree",
    "Node",
    "NodePath",
    "PathError",
    "content_text",
    "format_timestamp",
    "iter_contexts",
    "node_depth",
    "normalize_text",
    "parse_timestamp",
    "resolve_path",
    "validate_uri",
]

NodePath = tuple[int, ...]

DOCUMENT_FORMATS = ("xml", "wiki")

# Element names: letters, digits, hyphen, underscore, period; must start
# with a letter or underscore.
_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9._-]*\Z")

_TIMESTAMP_FORMAT = "%Y-%m-%dT%H:%M:%S%z"


class PathError(LookupError):
    """A node path does not resolve inside the tree it was applied to."""


def normalize_text(text: str) -> str:
    """Trim and collapse internal whitespace runs to single spaces."""
    return " ".join(text.split())


def validate_uri(uri: str) -> str:
    """Check the document URI invariants: non-empty, no whitespace."""
    if not uri:
        raise ValueError("document URI must be non-empty")
    if any(ch.isspace() for ch in uri):
        raise ValueError(f"document URI must not contain whitespace: {uri!r}")
    return uri


@dataclass
class Node:
    """One context: an element with ordered text and element children.

    Children may be text segments (str) or child Nodes.  Attributes from
    XML input are preserved but take no part in content search.  Treat
    instances as immutable once constructed.
    """

    name: str
    children: tuple[Node | str, ...] = ()
    attrs: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not _NAME_RE.match(self.name):
            raise ValueError(f"invalid element name: {self.name!r}")
        self.children = tuple(self.children)

    def element_children(self) -> list[Node]:
        return [c for c in self.children if isinstance(c, Node)]


@dataclass
class DocumentTree:
    """A parsed document: a root node plus the URI it was stored under."""

    root: Node
    uri: str

    def __post_init__(self) -> None:
        validate_uri(self.uri)


@dataclass
class DocumentMeta:
    """Store-level metadata attached to every ingested document."""

    uri: str
    lastprocessed: datetime
    format: str

    def __post_init__(self) -> None:
        validate_uri(self.uri)
        if self.lastprocessed.tzinfo is None:
            raise ValueError("lastprocessed must carry a UTC offset")
        if self.format not in DOCUMENT_FORMATS:
            raise ValueError(f"unknown document format: {self.format!r}")


def format_timestamp(value: datetime) -> str:
    """Render as YYYY-MM-DDThh:mm:ss+-hhmm, e.g. 2010-08-24T11:20:52-0800."""
    return value.strftime(_TIMESTAMP_FORMAT)


def parse_timestamp(text: str) -> datetime:
    return datetime.strptime(text, _TIMESTAMP_FORMAT)


def content_text(node: Node) -> str:
    """Concatenate all text segments of the subtree in document order.

    Segments are joined with single spaces; a node with no text anywhere
    yields the empty string.
    """
    return " ".join(_iter_segments(node))


def _iter_segments(node: Node) -> Iterator[str]:
    for child in node.children:
        if isinstance(child, Node):
            yield from _iter_segments(child)
        elif child:
            yield child


def iter_contexts(root: Node) -> Iterator[tuple[NodePath, Node]]:
    """Yield (path, node) for every element node in preorder, root included."""
    stack: list[tuple[NodePath, Node]] = [((), root)]
    while stack:
        path, node = stack.pop()
        yield path, node
        elems = node.element_children()
        for i in reversed(range(len(elems))):
            stack.append((path + (i,), elems[i]))


def resolve_path(root: Node, path: NodePath) -> Node:
    node = root
    for step, index in enumerate(path):
        elems = node.element_children()
        if not 0 <= index < len(elems):
            raise PathError(f"no element child {index} at {tuple(path[:step])}")
        node = elems[index]
    return node


def node_depth(tree: DocumentTree, path: NodePath) -> int:
    """Depth of the addressed node; the root has depth 1."""
    resolve_path(tree.root, path)
    return len(path) + 1
