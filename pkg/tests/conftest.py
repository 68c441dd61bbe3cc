import json
import sys
from importlib.resources import files
from pathlib import Path

import pytest

from rap.schema import load_schema

DATA = Path(str(files("rap") / "data"))

SHIPS_SENTENCE = (
    "He commanded several ships contracted by Jonathan Forward to transport "
    "convicted felons from London to Maryland."
)

ACE_LINES = [
    {"node": "Contact", "kind": "event_type", "definition": "Communication between entities."},
    {"node": "Movement", "kind": "event_type", "definition": None},
    {"node": "Conflict", "kind": "event_type", "definition": None},
    {"node": "Justice", "kind": "event_type", "definition": None},
    {"node": "Meet", "kind": "event_type", "definition": "Entities come together at a single location."},
    {"node": "Transport", "kind": "event_type", "definition": "Something is moved from one place to another."},
    {"node": "Attack", "kind": "event_type", "definition": "A violent physical act."},
    {"node": "Convict", "kind": "event_type", "definition": None},
    {"triple": ["Meet", "SubType", "Contact"]},
    {"triple": ["Transport", "SubType", "Movement"]},
    {"triple": ["Attack", "SubType", "Conflict"]},
    {"triple": ["Convict", "SubType", "Justice"]},
]
for ev, trigs in {
    "Meet": ["meet", "meeting", "summit"],
    "Transport": ["transport", "travel"],
    "Attack": ["attack", "fired", "hacked", "struck"],
    "Convict": ["convicted"],
}.items():
    for t in trigs:
        ACE_LINES.append({"node": t, "kind": "trigger_word", "definition": None})
        ACE_LINES.append({"triple": [ev, "has_trigger", t]})
for ev, roles in {
    "Meet": ["Entity", "Place"],
    "Transport": ["Artifact", "Destination", "Origin"],
    "Attack": ["Attacker", "Place", "Victim"],
    "Convict": ["Defendant"],
}.items():
    for r in roles:
        ACE_LINES.append({"node": r, "kind": "argument_role", "definition": None})
        ACE_LINES.append({"triple": [ev, "has_role", r]})

REL_LINES = [
    {"node": "city", "kind": "entity_type", "definition": None},
    {"node": "country", "kind": "entity_type", "definition": None},
    {"node": "capital_of", "kind": "relation_type", "definition": None},
    {"node": "located_in", "kind": "relation_type", "definition": None},
    {"triple": ["capital_of", "has_head_type", "city"]},
    {"triple": ["capital_of", "has_tail_type", "city"]},
    {"triple": ["located_in", "has_head_type", "city"]},
    {"triple": ["located_in", "has_tail_type", "country"]},
]

LEXICON_LINES = [
    {"lemma": "command", "pos": "verb", "senses": [{"id": "command.v.01", "event": True, "types": []}]},
    {"lemma": "contract", "pos": "verb", "senses": [{"id": "contract.v.01", "event": True, "types": []}]},
    {"lemma": "transport", "pos": "verb", "senses": [
        {"id": "transport.v.01", "event": True, "types": ["Transport"]},
        {"id": "transport.v.02", "event": False, "types": []},
    ]},
    {"lemma": "convict", "pos": "verb", "senses": [{"id": "convict.v.01", "event": True, "types": ["Convict"]}]},
    {"lemma": "ship", "pos": "noun", "senses": [{"id": "ship.n.01", "event": False, "types": []}]},
    {"lemma": "felon", "pos": "noun", "senses": [{"id": "felon.n.01", "event": False, "types": []}]},
    {"lemma": "several", "pos": "other", "senses": [{"id": "several.s.01", "event": True, "types": []}]},
    {"lemma": "strike", "pos": "verb", "senses": [{"id": "strike.v.01", "event": True, "types": ["Attack", "Meet"]}]},
]


def write_jsonl(path: Path, rows) -> Path:
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")
    return path


@pytest.fixture
def ace_schema_path(tmp_path):
    return write_jsonl(tmp_path / "ace.jsonl", ACE_LINES)


@pytest.fixture
def ace_graph(ace_schema_path):
    return load_schema(ace_schema_path)


@pytest.fixture
def rel_graph(tmp_path):
    return load_schema(write_jsonl(tmp_path / "rel.jsonl", REL_LINES))


@pytest.fixture
def lexicon(tmp_path):
    from rap.weak import load_lexicon

    return load_lexicon(write_jsonl(tmp_path / "lex.jsonl", LEXICON_LINES))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for num in sorted(results):
            ok, line = results[num]
            terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num}. {line}")
