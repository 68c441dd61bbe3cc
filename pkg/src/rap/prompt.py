"""Prompt construction from retrieved references, and model-input formatting.

Event prompts concatenate four components in order: E (event type, hypernym,
definition), T (sampled similar triggers), A (argument descriptions) and
I (retrieved instance texts). Relation prompts use R (relation types),
S (head/tail type structures) and I.

The formatted input is ``x [SEP] z``. Its mask is over whitespace tokens:
1 on the tokens of ``x``, 0 on the separator and the prompt. Subword
tokenizers downstream must expand the mask to their own pieces.
"""
from __future__ import annotations

import json
import random
import string
from dataclasses import dataclass, field, replace
from typing import Mapping

from .errors import TemplateError
from .schema import NodeKind, SchemaGraph, hypernyms, roles_of, structures_of, triggers_of

EVENT_COMPONENTS = ("E", "T", "A", "I")
RELATION_COMPONENTS = ("R", "S", "I")
DEFAULT_SEP = "[SEP]"
TRIGGERS_PER_TYPE = 3

DEFAULT_TEMPLATES = {
    "event_type": "Event type {type} is a subtype of {hypernym}.",
    "event_type_root": "Event type {type}.",
    "definition": "{definition}",
    "triggers": "Similar trigger such as {triggers}.",
    "argument": "The event has argument {role}.",
    "relation": "Relation {relation}.",
    "structure": "({head_type}, {relation}, {tail_type})",
    "instance": "{text}",
    "instance_labeled": "{text} ({labels})",
}

_PLACEHOLDERS = {
    "event_type": {"type", "hypernym", "definition"},
    "event_type_root": {"type", "definition"},
    "definition": {"type", "definition"},
    "triggers": {"type", "triggers"},
    "argument": {"role", "type"},
    "relation": {"relation"},
    "structure": {"head_type", "relation", "tail_type"},
    "instance": {"text", "labels"},
    "instance_labeled": {"text", "labels"},
}


def check_templates(templates: Mapping[str, str]) -> dict[str, str]:
    """Merge overrides onto the defaults, rejecting unknown keys or placeholders."""
    merged = dict(DEFAULT_TEMPLATES)
    for key, fmt in templates.items():
        if key not in _PLACEHOLDERS:
            raise TemplateError(f"unknown template component {key!r}")
        if not isinstance(fmt, str):
            raise TemplateError(f"template {key!r} must be a string")
        try:
            fields = {name for _, name, _, _ in string.Formatter().parse(fmt) if name is not None}
        except ValueError as exc:
            raise TemplateError(f"template {key!r}: {exc}") from None
        bad = fields - _PLACEHOLDERS[key]
        if bad:
            raise TemplateError(f"template {key!r} uses unknown placeholder(s) {sorted(bad)}")
        merged[key] = fmt
    return merged


def load_templates(path) -> dict[str, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise TemplateError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(raw, dict):
        raise TemplateError(f"{path}: expected a JSON object")
    return check_templates(raw)


@dataclass(frozen=True)
class PromptParts:
    """Structured prompt pieces; rendering and truncation work on these.

    ``items[name]`` holds rendered strings for every component except T,
    whose items are ``(event type, triggers)`` pairs rendered on demand.
    """

    order: tuple[str, ...]
    items: Mapping[str, tuple]
    trigger_template: str = DEFAULT_TEMPLATES["triggers"]

    def component_text(self, name: str) -> str:
        if name == "T":
            return " ".join(
                self.trigger_template.format(type=t, triggers=", ".join(trigs))
                for t, trigs in self.items.get("T", ())
                if trigs
            )
        return " ".join(s for s in self.items.get(name, ()) if s)

    def render(self) -> tuple[str, dict[str, tuple[int, int]]]:
        """Prompt text and per-component spans that tile it exactly.

        Components are joined by one space; the joining space belongs to the
        component before it, so concatenating the spans in order gives back
        the whole prompt.
        """
        texts = [(name, self.component_text(name)) for name in self.order]
        nonempty = [name for name, text in texts if text]
        last = nonempty[-1] if nonempty else None
        spans: dict[str, tuple[int, int]] = {}
        pieces = []
        pos = 0
        for name, text in texts:
            if text and name != last:
                text += " "
            spans[name] = (pos, pos + len(text))
            pieces.append(text)
            pos += len(text)
        return "".join(pieces), spans

    def drop_one(self) -> "PromptParts | None":
        """Shed the last instance, else the last sampled trigger; None when neither is left."""
        inst = self.items.get("I", ())
        if inst:
            return replace(self, items={**self.items, "I": inst[:-1]})
        groups = list(self.items.get("T", ()))
        for i in range(len(groups) - 1, -1, -1):
            t, trigs = groups[i]
            if trigs:
                groups[i] = (t, trigs[:-1])
                return replace(self, items={**self.items, "T": tuple(groups)})
        return None


@dataclass(frozen=True)
class PromptBundle:
    prompt: str = ""
    input: str = ""
    mask: tuple[int, ...] = ()
    retrieved_ids: tuple[int, ...] = ()
    component_spans: Mapping[str, tuple[int, int]] = field(default_factory=dict)
    warning: str | None = None
    parts: PromptParts | None = field(default=None, repr=False, compare=False)

    def component(self, name: str) -> str:
        s, e = self.component_spans[name]
        return self.prompt[s:e]


def _bundle(parts: PromptParts, retrieved_ids, warning=None) -> PromptBundle:
    prompt, spans = parts.render()
    return PromptBundle(prompt=prompt, retrieved_ids=tuple(retrieved_ids), component_spans=spans,
                        warning=warning, parts=parts)


def _instances(hits, store, templates, with_labels: bool) -> tuple[tuple[str, ...], list]:
    entries = [store[i] for i in hits.ids]
    key = "instance_labeled" if with_labels else "instance"
    texts = tuple(templates[key].format(text=e.text, labels=", ".join(e.labels)) for e in entries)
    return texts, entries


def assemble_event_prompt(hits, store, g: SchemaGraph, seed: int = 0, templates=None,
                          with_labels: bool = False) -> PromptBundle:
    """Event-extraction prompt from the retrieved entries and their schema pointers.

    Event types pointed at by any hit are described in ascending id order.
    Up to three triggers per type are drawn with ``random.Random(seed)``.
    """
    templates = check_templates(templates or {})
    if not hits.hits:
        return _bundle(PromptParts(EVENT_COMPONENTS, {}), (), warning="no references retrieved")
    instances, entries = _instances(hits, store, templates, with_labels)
    types = sorted({p for e in entries for p in e.pointers if g.is_kind(p, NodeKind.EVENT_TYPE)})
    rng = random.Random(seed)
    e_items, t_items = [], []
    for t in types:
        definition = g.node(t).definition
        parents = hypernyms(g, t)
        if parents:
            head = templates["event_type"].format(type=t, hypernym=", ".join(parents), definition=definition or "")
        else:
            head = templates["event_type_root"].format(type=t, definition=definition or "")
        if definition:
            head += " " + templates["definition"].format(type=t, definition=definition)
        e_items.append(head)
        candidates = triggers_of(g, t)
        chosen = rng.sample(candidates, min(TRIGGERS_PER_TYPE, len(candidates)))
        t_items.append((t, tuple(chosen)))
    roles = sorted({r for t in types for r in roles_of(g, t)})
    a_items = tuple(templates["argument"].format(role=r, type="") for r in roles)
    parts = PromptParts(
        EVENT_COMPONENTS,
        {"E": tuple(e_items), "T": tuple(t_items), "A": a_items, "I": instances},
        templates["triggers"],
    )
    return _bundle(parts, hits.ids)


def assemble_relation_prompt(hits, store, g: SchemaGraph, templates=None, with_labels: bool = False) -> PromptBundle:
    """Relation-extraction prompt: relation names, their type structures, instances."""
    templates = check_templates(templates or {})
    if not hits.hits:
        return _bundle(PromptParts(RELATION_COMPONENTS, {}), (), warning="no references retrieved")
    instances, entries = _instances(hits, store, templates, with_labels)
    relations = sorted({p for e in entries for p in e.pointers if g.is_kind(p, NodeKind.RELATION_TYPE)})
    r_items = tuple(templates["relation"].format(relation=r) for r in relations)
    s_items = tuple(
        templates["structure"].format(head_type=h, relation=r, tail_type=t)
        for rel in relations
        for h, r, t in structures_of(g, rel)
    )
    parts = PromptParts(RELATION_COMPONENTS, {"R": r_items, "S": s_items, "I": instances})
    return _bundle(parts, hits.ids)


def _count(x: str, sep: str, z: str) -> int:
    n = len(x.split())
    if z.strip():
        n += len(sep.split()) + len(z.split())
    return n


def format_input(x: str, z, sep: str = DEFAULT_SEP, budget: int | None = None) -> PromptBundle:
    """Join sentence and prompt as ``x + " " + sep + " " + z`` and build the mask.

    ``z`` is a prompt string or a bundle from the assemblers. With a token
    budget, instances are dropped from the end first, then sampled triggers;
    if that still does not fit the prompt is left out entirely. ``x`` is
    never shortened, so a sentence longer than the budget is returned alone
    with a warning.
    """
    if not sep or not sep.strip():
        raise ValueError("separator must contain a non-whitespace token")
    if budget is not None and budget < 0:
        raise ValueError("budget must be non-negative")
    if isinstance(z, PromptBundle):
        base = z
        parts = z.parts if z.parts is not None else PromptParts(("I",), {"I": (z.prompt,)})
    else:
        base = PromptBundle()
        parts = PromptParts(("I",), {"I": (z,)})
    warning = base.warning
    prompt, spans = parts.render()
    if budget is not None:
        while _count(x, sep, prompt) > budget:
            smaller = parts.drop_one()
            if smaller is None:
                parts = PromptParts(parts.order, {}, parts.trigger_template)
                prompt, spans = parts.render()
                break
            parts = smaller
            prompt, spans = parts.render()
        if len(x.split()) > budget:
            warning = "sentence alone exceeds the token budget"
    if prompt.strip():
        text = f"{x} {sep} {prompt}"
        mask = (1,) * len(x.split()) + (0,) * (len(sep.split()) + len(prompt.split()))
    else:
        text = x
        mask = (1,) * len(x.split())
    return replace(base, prompt=prompt, input=text, mask=mask, component_spans=spans, warning=warning, parts=parts)
