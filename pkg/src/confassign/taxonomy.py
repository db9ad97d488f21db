"""Rooted keyword taxonomy: XML import/export and tree queries.

The taxonomy is the controlled vocabulary a conference is described with.
It is loaded once from an XML document and is immutable afterwards, so all
query methods are safe for concurrent readers.
"""

from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass
from typing import Iterable, Mapping
from xml.sax.saxutils import quoteattr

from .errors import (
    DuplicateId,
    EmptyDocument,
    MalformedXml,
    MultipleRoots,
    UnknownKeyword,
)

ROOT_TAG = "taxonomy"
NODE_TAG = "node"


@dataclass(frozen=True)
class TaxonomyNode:
    id: str
    label: str
    parent: str | None
    children: tuple[str, ...]


class Taxonomy:
    """Immutable rooted tree of keywords.

    Node identity is the ``id`` attribute; labels are display-only.
    Children keep document order, which makes every downstream
    tie-break deterministic.
    """

    def __init__(self, root: str, nodes: Mapping[str, TaxonomyNode]):
        self._root = root
        self._nodes = dict(nodes)
        self._validate()
        self._depth = self._compute_depths()

    # -- construction -------------------------------------------------

    @classmethod
    def from_parent_map(
        cls,
        root: str,
        parents: Mapping[str, str],
        labels: Mapping[str, str] | None = None,
    ) -> "Taxonomy":
        """Build a taxonomy from child->parent links (insertion order = child order)."""
        labels = labels or {}
        children: dict[str, list[str]] = {root: []}
        for child in parents:
            children.setdefault(child, [])
        for child, parent in parents.items():
            children.setdefault(parent, [])
            children[parent].append(child)
        nodes = {
            node_id: TaxonomyNode(
                id=node_id,
                label=labels.get(node_id, node_id),
                parent=parents.get(node_id),
                children=tuple(children[node_id]),
            )
            for node_id in children
        }
        return cls(root, nodes)

    def _validate(self) -> None:
        if not self._nodes or self._root not in self._nodes:
            raise EmptyDocument("taxonomy has no root node")
        roots = [n.id for n in self._nodes.values() if n.parent is None]
        if len(roots) != 1:
            raise MultipleRoots(f"expected a single root, found: {sorted(roots)}")
        if roots[0] != self._root:
            raise MalformedXml(f"declared root {self._root!r} has a parent")
        for node in self._nodes.values():
            if not node.id:
                raise MalformedXml("node with empty id")
            if node.parent is not None:
                parent = self._nodes.get(node.parent)
                if parent is None or node.id not in parent.children:
                    raise MalformedXml(f"inconsistent parent link at {node.id!r}")
            for child_id in node.children:
                child = self._nodes.get(child_id)
                if child is None or child.parent != node.id:
                    raise MalformedXml(f"inconsistent child link at {node.id!r}")
        # connectivity: everything must be reachable from the root
        seen = set()
        stack = [self._root]
        while stack:
            cur = stack.pop()
            if cur in seen:
                raise MalformedXml(f"cycle detected at {cur!r}")
            seen.add(cur)
            stack.extend(self._nodes[cur].children)
        if len(seen) != len(self._nodes):
            missing = sorted(set(self._nodes) - seen)
            raise MalformedXml(f"nodes unreachable from root: {missing}")

    def _compute_depths(self) -> dict[str, int]:
        depths = {self._root: 0}
        stack = [self._root]
        while stack:
            cur = stack.pop()
            for child in self._nodes[cur].children:
                depths[child] = depths[cur] + 1
                stack.append(child)
        return depths

    # -- queries --------------------------------------------------------

    @property
    def root(self) -> str:
        return self._root

    def ids(self) -> tuple[str, ...]:
        return tuple(self._nodes)

    def __contains__(self, keyword: str) -> bool:
        return keyword in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def require(self, keyword: str) -> TaxonomyNode:
        node = self._nodes.get(keyword)
        if node is None:
            raise UnknownKeyword(f"unknown keyword: {keyword!r}")
        return node

    def label(self, keyword: str) -> str:
        return self.require(keyword).label

    def parent(self, keyword: str) -> str | None:
        return self.require(keyword).parent

    def depth(self, keyword: str) -> int:
        self.require(keyword)
        return self._depth[keyword]

    def children(self, keyword: str) -> tuple[str, ...]:
        return self.require(keyword).children

    def max_depth(self) -> int:
        return max(self._depth.values())

    def lca(self, a: str, b: str) -> str:
        """Deepest node that is an ancestor-or-self of both arguments."""
        self.require(a)
        self.require(b)
        da, db = self._depth[a], self._depth[b]
        while da > db:
            a = self._nodes[a].parent  # type: ignore[assignment]
            da -= 1
        while db > da:
            b = self._nodes[b].parent  # type: ignore[assignment]
            db -= 1
        while a != b:
            a = self._nodes[a].parent  # type: ignore[assignment]
            b = self._nodes[b].parent  # type: ignore[assignment]
        return a

    def validate_keywords(self, keywords: Iterable[str]) -> None:
        for kw in keywords:
            self.require(kw)

    # -- equality / serialization -----------------------------------------

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Taxonomy):
            return NotImplemented
        return self._root == other._root and self._nodes == other._nodes

    def __hash__(self) -> int:  # pragma: no cover - not used as a dict key
        return hash((self._root, tuple(sorted(self._nodes))))

    def __repr__(self) -> str:
        return f"Taxonomy(root={self._root!r}, nodes={len(self._nodes)})"

    def to_xml(self) -> bytes:
        """Serialize back to the import schema; reloading yields an equal tree.

        Hand-rolled writer: the stdlib serializer recurses and the tree
        depth is unbounded.
        """
        parts = ['<?xml version="1.0" encoding="utf-8"?>', f"<{ROOT_TAG}>"]
        # stack holds node ids to open and sentinel tuples to close
        stack: list[object] = [self._root]
        while stack:
            item = stack.pop()
            if isinstance(item, tuple):
                parts.append(f"</{NODE_TAG}>")
                continue
            node = self._nodes[item]  # type: ignore[index]
            attrs = f"id={quoteattr(node.id)} label={quoteattr(node.label)}"
            if node.children:
                parts.append(f"<{NODE_TAG} {attrs}>")
                stack.append(("close",))
                stack.extend(reversed(node.children))
            else:
                parts.append(f"<{NODE_TAG} {attrs}/>")
        parts.append(f"</{ROOT_TAG}>")
        return "".join(parts).encode("utf-8")


def load_taxonomy_xml(document: bytes | str) -> Taxonomy:
    """Parse and validate a taxonomy XML document.

    Schema: a ``<taxonomy>`` element containing exactly one ``<node id label>``,
    nested arbitrarily via child ``<node>`` elements.
    """
    if isinstance(document, str):
        document = document.encode("utf-8")
    if not document.strip():
        raise EmptyDocument("empty taxonomy document")
    try:
        root_el = ET.fromstring(document)
    except ET.ParseError as exc:
        raise MalformedXml(f"not well-formed XML: {exc}") from exc
    if root_el.tag != ROOT_TAG:
        raise MalformedXml(f"expected <{ROOT_TAG}> root element, got <{root_el.tag}>")
    top_nodes = list(root_el)
    if not top_nodes:
        raise EmptyDocument("taxonomy document contains no <node> element")
    if len(top_nodes) > 1:
        raise MultipleRoots(f"{len(top_nodes)} top-level nodes, expected exactly 1")

    nodes: dict[str, TaxonomyNode] = {}
    # iterative walk: taxonomy depth is unbounded, recursion is not safe
    stack: list[tuple[ET.Element, str | None]] = [(top_nodes[0], None)]
    while stack:
        element, parent_id = stack.pop()
        if element.tag != NODE_TAG:
            raise MalformedXml(f"unexpected element <{element.tag}>")
        node_id = element.get("id")
        label = element.get("label")
        if node_id is None or label is None:
            raise MalformedXml("node is missing a required id/label attribute")
        if not node_id:
            raise MalformedXml("node id attribute must be non-empty")
        if node_id in nodes:
            raise DuplicateId(f"duplicate node id: {node_id!r}")
        child_ids = []
        for child in element:
            if child.tag != NODE_TAG:
                raise MalformedXml(f"unexpected element <{child.tag}>")
            child_ids.append(child.get("id"))
        nodes[node_id] = TaxonomyNode(
            id=node_id,
            label=label,
            parent=parent_id,
            children=tuple(child_ids),  # type: ignore[arg-type]
        )
        for child in reversed(list(element)):
            stack.append((child, node_id))

    root_id = top_nodes[0].get("id")
    # child ids recorded before children were visited; missing ids surface here
    for node in nodes.values():
        if any(c is None for c in node.children):
            raise MalformedXml(f"child of {node.id!r} is missing its id attribute")
    return Taxonomy(root_id, nodes)  # type: ignore[arg-type]
