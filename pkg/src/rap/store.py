"""Schema-instance hybrid reference store.

Every entry is a context text, its label set, and pointers into the schema
graph. Gold entries come from training records; weak entries come from the
weak labeler and are appended with :func:`extend_store`.
"""
from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

from ._io import atomic_write_lines, dumps, iter_jsonl
from .dataset import ExtractionRecord
from .errors import ParseError, SchemaMismatch, UnknownLabel
from .schema import HAS_HEAD_TYPE, HAS_TAIL_TYPE, NodeKind, SchemaGraph, neighbors
from .text import terms

log = logging.getLogger(__name__)

GOLD = "gold"
WEAK = "weak"
SOURCES = (GOLD, WEAK)


@dataclass(frozen=True)
class StoreEntry:
    id: int
    text: str
    labels: tuple[str, ...]
    pointers: tuple[str, ...]
    source: str = GOLD
    origin_record: int | None = None

    def __post_init__(self):
        if not self.text:
            raise ValueError("store entry text must be non-empty")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}, got {self.source!r}")
        object.__setattr__(self, "labels", tuple(self.labels))
        object.__setattr__(self, "pointers", tuple(sorted(set(self.pointers))))

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "text": self.text,
            "labels": list(self.labels),
            "pointers": list(self.pointers),
            "source": self.source,
            "origin_record": self.origin_record,
        }


@dataclass(frozen=True)
class ReferenceStore:
    entries: tuple[StoreEntry, ...]
    schema_id: str

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))
        for i, e in enumerate(self.entries):
            if e.id != i:
                raise ValueError(f"entry ids must be dense from 0; position {i} holds id {e.id}")

    def __len__(self) -> int:
        return len(self.entries)

    def __getitem__(self, entry_id: int) -> StoreEntry:
        return self.entries[entry_id]

    def __iter__(self):
        return iter(self.entries)


@dataclass
class RejectionReport:
    accepted: int = 0
    rejected: int = 0
    reasons: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"accepted": self.accepted, "rejected": self.rejected, "reasons": list(self.reasons)}


def _sorted_unique(items: Iterable[str]) -> tuple[str, ...]:
    return tuple(sorted(set(items)))


def record_pointers(record: ExtractionRecord, g: SchemaGraph) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Labels and schema pointers named by a record's gold structures.

    Raises UnknownLabel when an event type, role or relation is not a schema
    node of the matching kind. Trigger words are pointed at only when the
    schema lists them.
    """
    labels: list[str] = []
    pointers: list[str] = []
    for ev in record.events or ():
        if not g.is_kind(ev.type, NodeKind.EVENT_TYPE):
            raise UnknownLabel(record.id, ev.type)
        labels.append(ev.type)
        pointers.append(ev.type)
        for cand in (ev.trigger.text, ev.trigger.text.lower()):
            if g.is_kind(cand, NodeKind.TRIGGER_WORD):
                pointers.append(cand)
                break
        for arg in ev.arguments:
            if not g.is_kind(arg.role, NodeKind.ARGUMENT_ROLE):
                raise UnknownLabel(record.id, arg.role)
            pointers.append(arg.role)
    for tr in record.triples or ():
        if not g.is_kind(tr.relation, NodeKind.RELATION_TYPE):
            raise UnknownLabel(record.id, tr.relation)
        labels.append(tr.relation)
        pointers.append(tr.relation)
        for rel in (HAS_HEAD_TYPE, HAS_TAIL_TYPE):
            pointers.extend(n.id for n in neighbors(g, tr.relation, rel, "out") if n.kind is NodeKind.ENTITY_TYPE)
    return _sorted_unique(labels), _sorted_unique(pointers)


def build_store(dataset: Sequence[ExtractionRecord], g: SchemaGraph) -> ReferenceStore:
    """One gold entry per training record, linked to the schema by its labels."""
    entries = []
    for i, record in enumerate(dataset):
        labels, pointers = record_pointers(record, g)
        entries.append(StoreEntry(i, record.text, labels, pointers, GOLD, record.id))
    return ReferenceStore(tuple(entries), g.content_hash())


def extend_store(
    store: ReferenceStore, weak: Sequence[StoreEntry], g: SchemaGraph
) -> tuple[ReferenceStore, RejectionReport]:
    """Append weak entries with continuing ids.

    Entries that are not marked weak or point at unknown nodes are skipped and
    counted in the report rather than raising.
    """
    if g.content_hash() != store.schema_id:
        raise SchemaMismatch("schema graph differs from the one the store was built against")
    report = RejectionReport()
    entries = list(store.entries)
    for item in weak:
        if item.source != WEAK:
            report.rejected += 1
            report.reasons.append(f"entry {item.id}: source is {item.source!r}, expected 'weak'")
            continue
        missing = [p for p in item.pointers if p not in g]
        if missing:
            report.rejected += 1
            report.reasons.append(f"entry {item.id}: unresolved pointer(s) {', '.join(missing)}")
            continue
        entries.append(replace(item, id=len(entries)))
        report.accepted += 1
    if report.rejected:
        log.warning("extend_store rejected %d weak entries", report.rejected)
    return ReferenceStore(tuple(entries), store.schema_id), report


def store_stats(store: ReferenceStore) -> dict:
    """Counts per source, per label (event or relation type), and total tokens."""
    by_source = Counter({s: 0 for s in SOURCES})
    by_type: Counter = Counter()
    tokens = 0
    for e in store.entries:
        by_source[e.source] += 1
        by_type.update(set(e.labels))
        tokens += len(terms(e.text))
    return {
        "entries": len(store.entries),
        "by_source": dict(by_source),
        "by_type": dict(sorted(by_type.items())),
        "tokens": tokens,
    }


def check_pointers(store: ReferenceStore, g: SchemaGraph) -> list[str]:
    """Entry pointers that do not resolve in ``g`` (empty when consistent)."""
    return [f"entry {e.id}: {p}" for e in store.entries for p in e.pointers if p not in g]


def write_store(store: ReferenceStore, path) -> int:
    lines = [dumps({"schema_id": store.schema_id})]
    lines += [dumps(e.to_json()) for e in store.entries]
    return atomic_write_lines(path, lines)


def read_store(path) -> ReferenceStore:
    schema_id = None
    entries = []
    for lineno, obj in iter_jsonl(path):
        if schema_id is None:
            if set(obj) != {"schema_id"} or not isinstance(obj["schema_id"], str):
                raise ParseError("first line must be {\"schema_id\": ...}", line=lineno, path=path)
            schema_id = obj["schema_id"]
            continue
        try:
            entry = StoreEntry(
                id=obj["id"],
                text=obj["text"],
                labels=tuple(obj["labels"]),
                pointers=tuple(obj["pointers"]),
                source=obj["source"],
                origin_record=obj.get("origin_record"),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad store entry ({exc})", line=lineno, path=path) from None
        if entry.id != len(entries):
            raise ParseError(f"entry id {entry.id} out of sequence", line=lineno, path=path)
        entries.append(entry)
    if schema_id is None:
        raise ParseError("store file has no schema_id header", path=path)
    return ReferenceStore(tuple(entries), schema_id)
