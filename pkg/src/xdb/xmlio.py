"""XML reading and writing for the uniform document tree.

Parsing accepts well-formed XML only: the five predefined entities work,
comments and processing instructions are dropped, and text is normalized
(whitespace collapsed, empty segments removed).  Serialization is compact
and deterministic, so a serialize/parse round trip reproduces the tree.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from xml.sax.saxutils import escape, quoteattr

from .model import DocumentTree, Node, normalize_text

__all__ = ["ParseError", "parse_xml", "serialize_node", "serialize_tree"]

XML_DECLARATION = '<?xml version="1.0"?>'


class ParseError(ValueError):
    """Input could not be parsed into a document tree."""


def parse_xml(data: bytes | str, uri: str) -> DocumentTree:
    try:
        root = ET.fromstring(data)
    except ET.ParseError as exc:
        raise ParseError(f"malformed XML: {exc}") from None
    try:
        return DocumentTree(_from_element(root), uri)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _from_element(elem: ET.Element) -> Node:
    children: list[Node | str] = []
    text = normalize_text(elem.text or "")
    if text:
        children.append(text)
    for child in elem:
        children.append(_from_element(child))
        tail = normalize_text(child.tail or "")
        if tail:
            children.append(tail)
    return Node(elem.tag, tuple(children), dict(elem.attrib))


def serialize_node(node: Node) -> str:
    attrs = "".join(f" {k}={quoteattr(v)}" for k, v in node.attrs.items())
    if not node.children:
        return f"<{node.name}{attrs}/>"
    inner = "".join(
        serialize_node(c) if isinstance(c, Node) else escape(c) for c in node.children
    )
    return f"<{node.name}{attrs}>{inner}</{node.name}>"


def serialize_tree(tree: DocumentTree) -> str:
    return f"{XML_DECLARATION}\n{serialize_node(tree.root)}\n"
