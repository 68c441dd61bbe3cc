"""Symbolic task schema: event types, triggers, roles, relations, entity types.

The graph is loaded from JSON lines and is immutable afterwards. Node ids are
case-sensitive and every ordering exposed here is ascending by id.
"""
from __future__ import annotations

import graphlib
import hashlib
import json
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

from ._io import iter_jsonl
from .errors import NodeNotFound, ParseError, ValidationError

SUBTYPE = "SubType"
HAS_TRIGGER = "has_trigger"
HAS_ROLE = "has_role"
HAS_HEAD_TYPE = "has_head_type"
HAS_TAIL_TYPE = "has_tail_type"


class NodeKind(str, Enum):
    EVENT_TYPE = "event_type"
    TRIGGER_WORD = "trigger_word"
    ARGUMENT_ROLE = "argument_role"
    RELATION_TYPE = "relation_type"
    ENTITY_TYPE = "entity_type"


@dataclass(frozen=True, order=True)
class SchemaNode:
    id: str
    kind: NodeKind
    definition: str | None = None

    def __post_init__(self):
        if not isinstance(self.id, str) or not self.id:
            raise ValueError("schema node id must be a non-empty string")
        object.__setattr__(self, "kind", NodeKind(self.kind))


@dataclass(frozen=True, order=True)
class SchemaEdge:
    head: str
    rel: str
    tail: str


@dataclass(frozen=True)
class Violation:
    code: str
    detail: str

    def __str__(self) -> str:
        return f"{self.code}: {self.detail}"


class SchemaGraph:
    """Immutable node/edge sets with adjacency lookups.

    Construction does not validate; use :func:`validate` or :func:`load_schema`.
    """

    def __init__(self, nodes: Iterable[SchemaNode] = (), edges: Iterable[SchemaEdge] = ()):
        by_id: dict[str, SchemaNode] = {}
        for node in nodes:
            by_id[node.id] = node
        self._nodes = {k: by_id[k] for k in sorted(by_id)}
        self._edges = tuple(sorted(set(edges)))
        self._out: dict[str, list[SchemaEdge]] = {}
        self._in: dict[str, list[SchemaEdge]] = {}
        for e in self._edges:
            self._out.setdefault(e.head, []).append(e)
            self._in.setdefault(e.tail, []).append(e)
        self._hash: str | None = None

    @property
    def nodes(self) -> dict[str, SchemaNode]:
        return dict(self._nodes)

    @property
    def edges(self) -> tuple[SchemaEdge, ...]:
        return self._edges

    def __contains__(self, node_id) -> bool:
        return node_id in self._nodes

    def __len__(self) -> int:
        return len(self._nodes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SchemaGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __repr__(self) -> str:
        return f"SchemaGraph(nodes={len(self._nodes)}, edges={len(self._edges)})"

    def node(self, node_id: str) -> SchemaNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise NodeNotFound(node_id) from None

    def get(self, node_id: str) -> SchemaNode | None:
        return self._nodes.get(node_id)

    def ids_of_kind(self, kind: NodeKind | str) -> list[str]:
        kind = NodeKind(kind)
        return [n.id for n in self._nodes.values() if n.kind is kind]

    def is_kind(self, node_id: str, kind: NodeKind | str) -> bool:
        node = self._nodes.get(node_id)
        return node is not None and node.kind is NodeKind(kind)

    def to_lines(self) -> list[str]:
        """Canonical JSON-lines serialization (nodes then edges, sorted)."""
        lines = [
            json.dumps({"node": n.id, "kind": n.kind.value, "definition": n.definition}, ensure_ascii=False)
            for n in self._nodes.values()
        ]
        lines += [json.dumps({"triple": [e.head, e.rel, e.tail]}, ensure_ascii=False) for e in self._edges]
        return lines

    def content_hash(self) -> str:
        if self._hash is None:
            h = hashlib.sha256()
            for line in self.to_lines():
                h.update(line.encode("utf-8"))
                h.update(b"\n")
            self._hash = h.hexdigest()
        return self._hash


_NODE_KEYS = {"node", "kind", "definition"}
_EDGE_KEYS = {"triple"}


def _parse_line(obj: dict, lineno: int, path) -> SchemaNode | SchemaEdge:
    keys = set(obj)
    if "node" in obj:
        unknown = keys - _NODE_KEYS
        if unknown:
            raise ParseError(f"unknown key(s) {sorted(unknown)}", line=lineno, path=path)
        if "kind" not in obj:
            raise ParseError("node line without 'kind'", line=lineno, path=path)
        node_id, kind, definition = obj["node"], obj["kind"], obj.get("definition")
        if not isinstance(node_id, str) or not node_id:
            raise ParseError("node id must be a non-empty string", line=lineno, path=path)
        if definition is not None and not isinstance(definition, str):
            raise ParseError("definition must be a string or null", line=lineno, path=path)
        try:
            kind = NodeKind(kind)
        except ValueError:
            raise ParseError(f"unknown node kind {kind!r}", line=lineno, path=path) from None
        return SchemaNode(node_id, kind, definition)
    if "triple" in obj:
        unknown = keys - _EDGE_KEYS
        if unknown:
            raise ParseError(f"unknown key(s) {sorted(unknown)}", line=lineno, path=path)
        triple = obj["triple"]
        if (
            not isinstance(triple, list)
            or len(triple) != 3
            or not all(isinstance(t, str) and t for t in triple)
        ):
            raise ParseError("triple must be a list of three non-empty strings", line=lineno, path=path)
        return SchemaEdge(*triple)
    raise ParseError(f"line is neither a node nor a triple (keys {sorted(keys)})", line=lineno, path=path)


def load_schema(path) -> SchemaGraph:
    """Read a schema JSON-lines file into a validated graph.

    Identical duplicate lines collapse; a node id redeclared with a different
    kind or definition is a ValidationError.
    """
    nodes: dict[str, SchemaNode] = {}
    conflicts: list[Violation] = []
    edges: set[SchemaEdge] = set()
    for lineno, obj in iter_jsonl(path):
        item = _parse_line(obj, lineno, path)
        if isinstance(item, SchemaEdge):
            edges.add(item)
            continue
        seen = nodes.get(item.id)
        if seen is None:
            nodes[item.id] = item
        elif seen.kind is not item.kind:
            kinds = sorted((seen.kind.value, item.kind.value))
            conflicts.append(Violation("conflicting_node", f"{item.id!r} declared as {kinds[0]} and {kinds[1]}"))
        elif seen.definition != item.definition:
            conflicts.append(Violation("conflicting_node", f"{item.id!r} declared with two definitions"))
    graph = SchemaGraph(nodes.values(), edges)
    report = sorted(set(conflicts), key=lambda v: (v.code, v.detail)) + validate(graph)
    if report:
        raise ValidationError(report)
    return graph


def validate(g: SchemaGraph) -> list[Violation]:
    """Return every invariant violation; an empty list means the graph is valid."""
    report: list[Violation] = []
    nodes = g._nodes
    for e in g.edges:
        missing = [x for x in (e.head, e.tail) if x not in nodes]
        if missing:
            report.append(Violation("dangling_edge", f"({e.head}, {e.rel}, {e.tail}) references unknown {', '.join(missing)}"))

    sorter = graphlib.TopologicalSorter()
    for e in g.edges:
        if e.rel == SUBTYPE:
            sorter.add(e.head, e.tail)
    try:
        sorter.prepare()
    except graphlib.CycleError as exc:
        cycle = exc.args[1]
        report.append(Violation("subtype_cycle", " -> ".join(cycle)))

    for node in nodes.values():
        if node.kind is not NodeKind.TRIGGER_WORD:
            continue
        linked = any(
            g.is_kind(other, NodeKind.EVENT_TYPE)
            for other in [e.tail for e in g._out.get(node.id, ())] + [e.head for e in g._in.get(node.id, ())]
        )
        if not linked:
            report.append(Violation("orphan_trigger", f"trigger {node.id!r} has no edge to an event type"))
    return report


def neighbors(g: SchemaGraph, node_id: str, rel: str | None = None, direction: str = "out") -> list[SchemaNode]:
    """Adjacent nodes, optionally filtered by edge label, sorted by id."""
    if node_id not in g:
        raise NodeNotFound(node_id)
    if direction not in ("out", "in", "both"):
        raise ValueError(f"direction must be 'out', 'in' or 'both', got {direction!r}")
    found: set[str] = set()
    if direction in ("out", "both"):
        found.update(e.tail for e in g._out.get(node_id, ()) if rel is None or e.rel == rel)
    if direction in ("in", "both"):
        found.update(e.head for e in g._in.get(node_id, ()) if rel is None or e.rel == rel)
    return [g._nodes[i] for i in sorted(found) if i in g._nodes]


def resolve_pointer(g: SchemaGraph, pointer: Iterable[str]) -> SchemaGraph:
    """Induced subgraph over the pointed nodes plus their 1-hop neighbours."""
    pointer = list(pointer)
    missing = sorted({p for p in pointer if p not in g})
    if missing:
        raise NodeNotFound(missing)
    keep = set(pointer)
    for p in pointer:
        keep.update(e.tail for e in g._out.get(p, ()))
        keep.update(e.head for e in g._in.get(p, ()))
    keep &= set(g._nodes)
    edges = [e for e in g.edges if e.head in keep and e.tail in keep]
    return SchemaGraph((g._nodes[i] for i in keep), edges)


def hypernyms(g: SchemaGraph, event_type: str) -> list[str]:
    return [n.id for n in neighbors(g, event_type, SUBTYPE, "out")]


def triggers_of(g: SchemaGraph, event_type: str) -> list[str]:
    return [n.id for n in neighbors(g, event_type, None, "both") if n.kind is NodeKind.TRIGGER_WORD]


def roles_of(g: SchemaGraph, event_type: str) -> list[str]:
    return [n.id for n in neighbors(g, event_type, None, "both") if n.kind is NodeKind.ARGUMENT_ROLE]


def structures_of(g: SchemaGraph, relation: str) -> list[tuple[str, str, str]]:
    """(head type, relation, tail type) combinations declared for a relation."""
    heads = [n.id for n in neighbors(g, relation, HAS_HEAD_TYPE, "out")]
    tails = [n.id for n in neighbors(g, relation, HAS_TAIL_TYPE, "out")]
    return [(h, relation, t) for h in heads for t in tails]


def write_schema(g: SchemaGraph, path) -> None:
    from ._io import atomic_write_lines

    atomic_write_lines(path, g.to_lines())
