"""Parser for a 16-tag MediaWiki subset producing the uniform document tree.

Block constructs, recognized line by line:

    ----                horizontal rule (hr), four or more hyphens alone
    * item              bulleted item, levels * ** *** (bull1..bull3)
    # item              numbered item, levels # ## (num1, num2)
    ; term              definition list term (def)
    = t = .. ==== t ==== headings h1..h4, fences of equal length
    anything else       paragraph (p); runs of non-blank lines, a blank
                        line starts a new paragraph

Inline constructs, recognized inside block content:

    [[target]]          link holding a text element with the target
    [[target|label]]    link holding the text element plus the label
    ''x''  '''x'''  '''''x'''''    i, b, bi

List items are emitted as flat siblings of the page root; blocks never
nest.  Markup outside the subset is kept as literal text and reported as
a warning, never as an error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import DocumentTree, Node, normalize_text

__all__ = ["ParseWarning", "WikiParseReport", "parse_wiki", "tag_table", "to_wikitext"]

_TAG_TABLE = {
    "----": "hr",
    "*": "bull1",
    "**": "bull2",
    "***": "bull3",
    "#": "num1",
    "##": "num2",
    ";": "def",
    "=": "h1",
    "==": "h2",
    "===": "h3",
    "====": "h4",
    "[[.]]": "link",
    "''": "i",
    "'''": "b",
    "'''''": "bi",
    "blank line": "p",
}

_BULLET_TAGS = {1: "bull1", 2: "bull2", 3: "bull3"}
_NUMBER_TAGS = {1: "num1", 2: "num2"}
_QUOTE_TAGS = {2: "i", 3: "b", 5: "bi"}

_HR_RE = re.compile(r"-{4,}\Z")
_INLINE_TOKEN_RE = re.compile(r"\[\[|'{2,}")
_QUOTE_CLOSERS = {n: re.compile(r"(?<!')'{%d}(?!')" % n) for n in (2, 3, 5)}


@dataclass
class ParseWarning:
    line: int
    message: str


@dataclass
class WikiParseReport:
    tree: DocumentTree
    warnings: list[ParseWarning]


def tag_table() -> dict[str, str]:
    """The wikitext constructs of the supported subset and their elements."""
    return dict(_TAG_TABLE)


def parse_wiki(source: str, uri: str) -> WikiParseReport:
    """Parse wikitext into a tree rooted at `page`.  Never raises on markup."""
    warnings: list[ParseWarning] = []
    blocks: list[Node] = []
    paragraph: list[Node | str] = []

    def flush_paragraph() -> None:
        if paragraph:
            blocks.append(Node("p", tuple(paragraph)))
            paragraph.clear()

    def paragraph_line(text: str, lineno: int) -> None:
        items = _parse_inline(text, lineno, warnings)
        if paragraph and items and isinstance(paragraph[-1], str) and isinstance(items[0], str):
            paragraph[-1] = f"{paragraph[-1]} {items[0]}"
            items = items[1:]
        paragraph.extend(items)

    for lineno, line in enumerate(source.splitlines(), 1):
        stripped = line.strip()
        if not stripped:
            flush_paragraph()
            continue

        if _HR_RE.match(stripped):
            flush_paragraph()
            blocks.append(Node("hr"))
            continue

        first = stripped[0]
        if first == "=":
            node = _parse_heading(stripped, lineno, warnings)
            if node is None:
                paragraph_line(stripped, lineno)
            else:
                flush_paragraph()
                blocks.append(node)
            continue

        if first in "*#":
            run = len(stripped) - len(stripped.lstrip(first))
            rest = stripped[run:]
            tags = _BULLET_TAGS if first == "*" else _NUMBER_TAGS
            if rest[:1] in ("*", "#"):
                warnings.append(ParseWarning(lineno, f"mixed list markers: {stripped[: run + 1]!r}"))
                paragraph_line(stripped, lineno)
            elif run not in tags:
                warnings.append(ParseWarning(lineno, f"unsupported list level: {first * run!r}"))
                paragraph_line(stripped, lineno)
            else:
                flush_paragraph()
                blocks.append(Node(tags[run], tuple(_parse_inline(rest, lineno, warnings))))
            continue

        if first == ";":
            flush_paragraph()
            blocks.append(Node("def", tuple(_parse_inline(stripped[1:], lineno, warnings))))
            continue

        if first == ":":
            warnings.append(ParseWarning(lineno, "definition descriptions (:) are not supported"))
            paragraph_line(stripped, lineno)
            continue

        paragraph_line(stripped, lineno)

    flush_paragraph()
    return WikiParseReport(DocumentTree(Node("page", tuple(blocks)), uri), warnings)


def _parse_heading(stripped: str, lineno: int, warnings: list[ParseWarning]) -> Node | None:
    lead = len(stripped) - len(stripped.lstrip("="))
    if lead == len(stripped):
        warnings.append(ParseWarning(lineno, f"heading line without title: {stripped!r}"))
        return None
    trail = len(stripped) - len(stripped.rstrip("="))
    title = stripped[lead : len(stripped) - trail].strip()
    if lead != trail or not 1 <= lead <= 4 or not title:
        warnings.append(ParseWarning(lineno, f"unsupported heading fences: {stripped!r}"))
        return None
    return Node(f"h{lead}", tuple(_parse_inline(title, lineno, warnings)))


def _parse_inline(text: str, lineno: int, warnings: list[ParseWarning]) -> list[Node | str]:
    """Scan one line of block content for links and quote emphasis."""
    pieces: list[Node | str] = []
    pos = 0
    while True:
        m = _INLINE_TOKEN_RE.search(text, pos)
        if m is None:
            pieces.append(text[pos:])
            break
        pieces.append(text[pos : m.start()])
        token = m.group()

        if token == "[[":
            end = text.find("]]", m.end())
            if end < 0:
                warnings.append(ParseWarning(lineno, "unclosed link markup"))
                pieces.append(token)
                pos = m.end()
                continue
            inner = text[m.end() : end]
            pos = end + 2
            target, _, label = inner.partition("|")
            target = normalize_text(target)
            label = normalize_text(label)
            if not target:
                warnings.append(ParseWarning(lineno, "link with empty target"))
                pieces.append(text[m.start() : pos])
                continue
            children: tuple[Node | str, ...] = (Node("text", (target,)),)
            if label:
                children += (label,)
            pieces.append(Node("link", children))
            continue

        run = len(token)
        if run not in _QUOTE_TAGS:
            warnings.append(ParseWarning(lineno, f"unsupported quote run: {token!r}"))
            pieces.append(token)
            pos = m.end()
            continue
        closer = _QUOTE_CLOSERS[run].search(text, m.end())
        if closer is None:
            warnings.append(ParseWarning(lineno, f"unclosed quote markup: {token!r}"))
            pieces.append(token)
            pos = m.end()
            continue
        inner = normalize_text(text[m.end() : closer.start()])
        pieces.append(Node(_QUOTE_TAGS[run], (inner,) if inner else ()))
        pos = closer.end()

    return _coalesce(pieces)


def _coalesce(pieces: list[Node | str]) -> list[Node | str]:
    """Merge adjacent literal chunks, normalize them, drop empties."""
    out: list[Node | str] = []
    literal = ""
    for piece in pieces:
        if isinstance(piece, str):
            literal += piece
            continue
        text = normalize_text(literal)
        if text:
            out.append(text)
        literal = ""
        out.append(piece)
    text = normalize_text(literal)
    if text:
        out.append(text)
    return out


def to_wikitext(tree: DocumentTree) -> str:
    """Regenerate wikitext from a parsed tree (subset constructs only)."""
    lines: list[str] = []
    previous_paragraph = False
    for block in tree.root.children:
        if not isinstance(block, Node):
            continue
        if block.name == "p" and previous_paragraph:
            lines.append("")
        previous_paragraph = block.name == "p"
        lines.append(_block_to_wikitext(block))
    return "\n".join(lines)


_BLOCK_MARKERS = {
    "bull1": "* ",
    "bull2": "** ",
    "bull3": "*** ",
    "num1": "# ",
    "num2": "## ",
    "def": "; ",
}


def _block_to_wikitext(block: Node) -> str:
    if block.name == "hr":
        return "----"
    body = _inline_to_wikitext(block.children)
    if block.name == "p":
        return body
    if block.name in _BLOCK_MARKERS:
        return _BLOCK_MARKERS[block.name] + body
    if block.name in ("h1", "h2", "h3", "h4"):
        fence = "=" * int(block.name[1])
        return f"{fence} {body} {fence}"
    raise ValueError(f"not a subset block element: {block.name}")


def _inline_to_wikitext(children: tuple[Node | str, ...]) -> str:
    parts = []
    for child in children:
        if isinstance(child, str):
            parts.append(child)
        elif child.name == "link":
            target = content_first_text(child)
            label = next((c for c in child.children if isinstance(c, str)), "")
            parts.append(f"[[{target}|{label}]]" if label else f"[[{target}]]")
        elif child.name in ("i", "b", "bi"):
            quotes = {"i": "''", "b": "'''", "bi": "'''''"}[child.name]
            inner = child.children[0] if child.children else ""
            parts.append(f"{quotes}{inner}{quotes}")
        else:
            raise ValueError(f"not a subset inline element: {child.name}")
    return " ".join(parts)


def content_first_text(link: Node) -> str:
    for child in link.children:
        if isinstance(child, Node) and child.name == "text" and child.children:
            return str(child.children[0])
    return ""
