"""Task datasets: loading, low-resource splits, and augmented output files."""
from __future__ import annotations

from decimal import ROUND_HALF_UP, Decimal
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._io import atomic_write_lines, dumps, iter_jsonl
from .errors import InvalidFraction, LengthMismatch, ParseError, SpanError

MODES = ("event", "triple")
LOW_RESOURCE_FRACTIONS = (0.01, 0.03, 0.05, 0.10, 0.20, 0.30)


@dataclass(frozen=True)
class Span:
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class Argument:
    role: str
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class Event:
    type: str
    trigger: Span
    arguments: tuple[Argument, ...] = ()


@dataclass(frozen=True)
class Triple:
    head: str
    relation: str
    tail: str


@dataclass(frozen=True)
class ExtractionRecord:
    id: int
    text: str
    events: tuple[Event, ...] | None = None
    triples: tuple[Triple, ...] | None = None

    @property
    def mode(self) -> str:
        return "event" if self.events is not None else "triple"

    def target(self) -> dict:
        """Gold structure in its on-disk form."""
        if self.events is not None:
            return {"events": [_event_to_json(e) for e in self.events]}
        return {"triples": [{"head": t.head, "relation": t.relation, "tail": t.tail} for t in self.triples or ()]}

    def to_json(self) -> dict:
        return {"id": self.id, "text": self.text, **self.target()}


def _event_to_json(e: Event) -> dict:
    return {
        "type": e.type,
        "trigger": {"text": e.trigger.text, "start": e.trigger.start, "end": e.trigger.end},
        "arguments": [{"role": a.role, "text": a.text, "start": a.start, "end": a.end} for a in e.arguments],
    }


def _check_span(start, end, text: str, what: str, lineno, path) -> None:
    if not (isinstance(start, int) and isinstance(end, int)) or isinstance(start, bool) or isinstance(end, bool):
        raise ParseError(f"{what} offsets must be integers", line=lineno, path=path)
    if start < 0 or end < start or end > len(text):
        raise SpanError(f"{path}:{lineno}: {what} span [{start}, {end}) invalid for text of length {len(text)}")


def _require(obj: dict, key: str, typ, lineno, path):
    if key not in obj:
        raise ParseError(f"missing key {key!r}", line=lineno, path=path)
    value = obj[key]
    if not isinstance(value, typ):
        raise ParseError(f"{key!r} has wrong type {type(value).__name__}", line=lineno, path=path)
    return value


def _parse_events(raw, text, lineno, path) -> tuple[Event, ...]:
    if not isinstance(raw, list):
        raise ParseError("'events' must be a list", line=lineno, path=path)
    events = []
    for ev in raw:
        if not isinstance(ev, dict):
            raise ParseError("event must be an object", line=lineno, path=path)
        etype = _require(ev, "type", str, lineno, path)
        trig = _require(ev, "trigger", dict, lineno, path)
        ttext = _require(trig, "text", str, lineno, path)
        _check_span(trig.get("start"), trig.get("end"), text, "trigger", lineno, path)
        args = []
        for a in ev.get("arguments", []):
            if not isinstance(a, dict):
                raise ParseError("argument must be an object", line=lineno, path=path)
            role = _require(a, "role", str, lineno, path)
            atext = _require(a, "text", str, lineno, path)
            _check_span(a.get("start"), a.get("end"), text, f"argument {role!r}", lineno, path)
            args.append(Argument(role, atext, a["start"], a["end"]))
        events.append(Event(etype, Span(ttext, trig["start"], trig["end"]), tuple(args)))
    return tuple(events)


def _parse_triples(raw, lineno, path) -> tuple[Triple, ...]:
    if not isinstance(raw, list):
        raise ParseError("'triples' must be a list", line=lineno, path=path)
    out = []
    for t in raw:
        if not isinstance(t, dict):
            raise ParseError("triple must be an object", line=lineno, path=path)
        out.append(Triple(*(_require(t, k, str, lineno, path) for k in ("head", "relation", "tail"))))
    return tuple(out)


def parse_record(obj: dict, mode: str, index: int, lineno=None, path=None) -> ExtractionRecord:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    text = _require(obj, "text", str, lineno, path)
    rid = obj.get("id", index)
    if not isinstance(rid, int) or isinstance(rid, bool):
        raise ParseError("'id' must be an integer", line=lineno, path=path)
    if mode == "event":
        if "triples" in obj:
            raise ParseError("event-mode line carries 'triples'", line=lineno, path=path)
        if "events" not in obj:
            raise ParseError("missing key 'events'", line=lineno, path=path)
        return ExtractionRecord(rid, text, events=_parse_events(obj["events"], text, lineno, path))
    if "events" in obj:
        raise ParseError("triple-mode line carries 'events'", line=lineno, path=path)
    if "triples" not in obj:
        raise ParseError("missing key 'triples'", line=lineno, path=path)
    return ExtractionRecord(rid, text, triples=_parse_triples(obj["triples"], lineno, path))


def load_dataset(path, mode: str) -> list[ExtractionRecord]:
    """Records in file order. A line's own ``id`` is kept; otherwise its index is used."""
    records = []
    seen: set[int] = set()
    for lineno, obj in iter_jsonl(path):
        rec = parse_record(obj, mode, len(records), lineno, path)
        if rec.id in seen:
            raise ParseError(f"duplicate record id {rec.id}", line=lineno, path=path)
        seen.add(rec.id)
        records.append(rec)
    return records


def write_dataset(records: Sequence[ExtractionRecord], path) -> int:
    return atomic_write_lines(path, (dumps(r.to_json()) for r in records))


def split_size(n: int, fraction: float) -> int:
    # decimal on the shortest repr so 0.15 * 10 rounds to 2, not 1
    exact = Decimal(repr(float(fraction))) * n
    return max(1, int(exact.quantize(Decimal(1), rounding=ROUND_HALF_UP)))


def split_order(n: int, seed: int) -> np.ndarray:
    """Seeded ranking of indices 0..n-1.

    Each index gets a uniform key from one stream, so the relative order of
    the first n indices does not change when more records are appended.
    """
    keys = np.random.default_rng(seed).random(n)
    return np.argsort(keys, kind="stable")


def sample_split(records: Sequence, fraction: float, seed: int, nested: bool = True) -> list:
    """Uniform sample without replacement, returned in original order.

    With ``nested=True`` every fraction takes a prefix of one seeded ranking, so
    smaller splits are subsets of larger ones under the same seed. With
    ``nested=False`` each fraction is an independent draw.
    """
    if isinstance(fraction, bool) or not isinstance(fraction, (int, float)) or not (0.0 < fraction <= 1.0):
        raise InvalidFraction(f"fraction must be in (0, 1], got {fraction!r}")
    n = len(records)
    if n == 0:
        raise ValueError("cannot sample from an empty dataset")
    size = split_size(n, fraction)
    if nested:
        chosen = split_order(n, seed)[:size]
    else:
        rng = np.random.default_rng([seed, int(round(fraction * 1_000_000))])
        chosen = rng.choice(n, size=size, replace=False)
    return [records[i] for i in sorted(int(i) for i in chosen)]


@dataclass(frozen=True)
class AugmentedRecord:
    id: int
    input: str
    prompt_mask: tuple[int, ...]
    target: dict
    retrieved_ids: tuple[int, ...] = field(default=())

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "input": self.input,
            "prompt_mask": list(self.prompt_mask),
            "target": self.target,
            "retrieved_ids": list(self.retrieved_ids),
        }


def emit_augmented(records: Sequence[ExtractionRecord], bundles: Sequence, path) -> int:
    """Write one augmented JSON line per (record, bundle) pair; returns the count."""
    if len(records) != len(bundles):
        raise LengthMismatch(f"{len(records)} records but {len(bundles)} prompt bundles")
    rows = (
        AugmentedRecord(r.id, b.input, tuple(b.mask), r.target(), tuple(b.retrieved_ids)).to_json()
        for r, b in zip(records, bundles)
    )
    return atomic_write_lines(path, (dumps(row) for row in rows))


def load_augmented(path) -> list[AugmentedRecord]:
    out = []
    for lineno, obj in iter_jsonl(path):
        try:
            out.append(
                AugmentedRecord(
                    int(obj["id"]),
                    obj["input"],
                    tuple(int(m) for m in obj["prompt_mask"]),
                    obj["target"],
                    tuple(int(i) for i in obj["retrieved_ids"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad augmented line ({exc})", line=lineno, path=path) from None
    return out
