"""Knowledge-guided weak labeling of unlabeled sentences.

Per sentence: assign each token a part of speech and word sense, keep verbs
and nouns whose sense is flagged as eventive (the candidate triggers), then
map those senses onto event types present in the schema graph. Sentences that
yield at least one event type become weak reference-store entries.

The sense assigner is pluggable. The default picks the most frequent sense,
i.e. the first sense the lexicon lists for the token's lemma.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

from ._io import iter_jsonl
from .errors import ParseError
from .schema import NodeKind, SchemaGraph
from .store import WEAK, StoreEntry
from .text import Token, lemma_candidates, tokenize

log = logging.getLogger(__name__)

POS_VALUES = ("verb", "noun", "other")
TRIGGER_POS = frozenset({"verb", "noun"})


@dataclass(frozen=True)
class Sense:
    id: str
    event: bool
    types: tuple[str, ...] = ()


class SenseLexicon:
    """(lemma, pos) -> senses in frequency-rank order."""

    def __init__(self, entries: dict[tuple[str, str], Sequence[Sense]] | None = None):
        self._entries: dict[tuple[str, str], tuple[Sense, ...]] = {}
        self._by_id: dict[str, Sense] = {}
        for (lemma, pos), senses in (entries or {}).items():
            self.add(lemma, pos, senses)

    def add(self, lemma: str, pos: str, senses: Iterable[Sense]) -> None:
        if pos not in POS_VALUES:
            raise ValueError(f"pos must be one of {POS_VALUES}, got {pos!r}")
        senses = tuple(senses)
        ids = [s.id for s in senses]
        if len(set(ids)) != len(ids):
            raise ValueError(f"duplicate sense id for ({lemma!r}, {pos!r})")
        key = (lemma.lower(), pos)
        self._entries[key] = self._entries.get(key, ()) + senses
        for s in senses:
            self._by_id.setdefault(s.id, s)

    def senses(self, lemma: str, pos: str) -> tuple[Sense, ...]:
        return self._entries.get((lemma.lower(), pos), ())

    def sense(self, sense_id: str) -> Sense | None:
        return self._by_id.get(sense_id)

    def __len__(self) -> int:
        return len(self._entries)


def load_lexicon(path) -> SenseLexicon:
    lex = SenseLexicon()
    for lineno, obj in iter_jsonl(path):
        try:
            lemma, pos, raw = obj["lemma"], obj["pos"], obj["senses"]
            senses = [Sense(str(s["id"]), bool(s["event"]), tuple(s.get("types", ()))) for s in raw]
            lex.add(lemma, pos, senses)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad lexicon entry ({exc})", line=lineno, path=path) from None
    return lex


class SensedToken(NamedTuple):
    token: str
    start: int
    end: int
    pos: str
    sense: str | None


@dataclass(frozen=True)
class Nugget:
    token: str
    span: tuple[int, int]
    pos: str
    sense_id: str

    def __post_init__(self):
        if self.pos not in TRIGGER_POS:
            raise ValueError(f"nugget pos must be verb or noun, got {self.pos!r}")
        if not 0 <= self.span[0] <= self.span[1]:
            raise ValueError(f"bad nugget span {self.span}")


class WeakLabel(NamedTuple):
    label: str
    nugget: Nugget


# A tagger maps the tokens of one sentence to (pos, sense id or None) per token.
Tagger = Callable[[Sequence[Token], SenseLexicon], Sequence[tuple[str, "str | None"]]]


def most_frequent_sense(tokens: Sequence[Token], lex: SenseLexicon) -> list[tuple[str, str | None]]:
    """Lexicon-driven tagger: first (lemma, pos) hit wins, rank-1 sense chosen.

    Lemma candidates are tried surface form first, then suffix-stripped forms;
    for each candidate verb entries are preferred over noun over other.
    """
    out = []
    for tok in tokens:
        found = ("other", None)
        for lemma in lemma_candidates(tok.text):
            hit = next(((pos, lex.senses(lemma, pos)) for pos in POS_VALUES if lex.senses(lemma, pos)), None)
            if hit is not None:
                found = (hit[0], hit[1][0].id)
                break
        out.append(found)
    return out


def disambiguate(sentence: str, lex: SenseLexicon, tagger: Tagger | None = None) -> list[SensedToken]:
    if not sentence or not sentence.strip():
        raise ValueError("sentence must be non-empty")
    tokens = tokenize(sentence)
    tags = (tagger or most_frequent_sense)(tokens, lex)
    if len(tags) != len(tokens):
        raise ValueError(f"tagger returned {len(tags)} tags for {len(tokens)} tokens")
    return [SensedToken(t.text, t.start, t.end, pos, sense) for t, (pos, sense) in zip(tokens, tags) if sense is not None]


def detect_nuggets(sensed: Sequence[SensedToken], lex: SenseLexicon) -> list[Nugget]:
    nuggets = []
    for st in sensed:
        if st.pos not in TRIGGER_POS:
            continue
        sense = lex.sense(st.sense) if st.sense is not None else None
        if sense is not None and sense.event:
            nuggets.append(Nugget(st.token, (st.start, st.end), st.pos, st.sense))
    return nuggets


def map_to_schema(sentence: str, nuggets: Sequence[Nugget], lex: SenseLexicon, g: SchemaGraph) -> list[WeakLabel]:
    """Event types reachable from each nugget's sense, sorted by type id."""
    labels = []
    for nug in nuggets:
        sense = lex.sense(nug.sense_id)
        if sense is None:
            continue
        for t in sense.types:
            if g.is_kind(t, NodeKind.EVENT_TYPE):
                labels.append(WeakLabel(t, nug))
    labels.sort(key=lambda wl: (wl.label, wl.nugget.span))
    return labels


def label_sentence(sentence: str, lex: SenseLexicon, g: SchemaGraph, tagger: Tagger | None = None) -> list[WeakLabel]:
    sensed = disambiguate(sentence, lex, tagger)
    return map_to_schema(sentence, detect_nuggets(sensed, lex), lex, g)


def annotate_corpus(
    corpus: Iterable[str], lex: SenseLexicon, g: SchemaGraph, tagger: Tagger | None = None
) -> list[StoreEntry]:
    """Weak entries (ids from 0) for every sentence that maps to an event type."""
    entries = []
    for i, sentence in enumerate(corpus):
        if not sentence.strip():
            continue
        try:
            weak = label_sentence(sentence, lex, g, tagger)
        except Exception as exc:
            log.warning("skipping sentence %d: %s", i, exc)
            continue
        if not weak:
            continue
        types = sorted({wl.label for wl in weak})
        entries.append(StoreEntry(len(entries), sentence, tuple(types), tuple(types), WEAK, None))
    return entries


def read_corpus(path) -> list[str]:
    with open(path, encoding="utf-8") as fh:
        return [line.rstrip("\r\n") for line in fh]
