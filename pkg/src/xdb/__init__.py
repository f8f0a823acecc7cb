"""Schema-less contextual search over semi-structured documents.

XML and MediaWiki-subset wikitext are parsed into one context/content
tree model, indexed by element name with stemmed content tokens, and
served over a REST query endpoint that answers in XML.
"""

__version__ = "0.1.0"

from .index import ContextIndex, Match, brute_force_search
from .model import DocumentMeta, DocumentTree, Node, content_text, node_depth
from .query import DarcQuery, QueryExpression, QueryOptions, canonicalize, parse_query_string
from .stem import porter_stem, tokenize_and_stem
from .store import DocumentStore, StoreConfig, StoredDocument
from .wikitext import parse_wiki, tag_table
from .xmlio import ParseError, parse_xml, serialize_tree

__all__ = [
    "ContextIndex",
    "DarcQuery",
    "DocumentMeta",
    "DocumentStore",
    "DocumentTree",
    "Match",
    "Node",
    "ParseError",
    "QueryExpression",
    "QueryOptions",
    "StoreConfig",
    "StoredDocument",
    "__version__",
    "brute_force_search",
    "canonicalize",
    "content_text",
    "node_depth",
    "parse_query_string",
    "parse_wiki",
    "parse_xml",
    "porter_stem",
    "serialize_tree",
    "tag_table",
    "tokenize_and_stem",
]
