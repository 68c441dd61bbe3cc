"""Tokenization and lemma candidates shared by weak labeling and retrieval."""
from __future__ import annotations

import re
from typing import NamedTuple

_WORD = re.compile(r"\w+", re.UNICODE)

# (suffix, replacement) tried in order after the surface form
_SUFFIXES = (
    ("ing", ""),
    ("ing", "e"),
    ("ed", ""),
    ("ed", "e"),
    ("es", ""),
    ("s", ""),
)


class Token(NamedTuple):
    text: str
    start: int
    end: int


def tokenize(text: str) -> list[Token]:
    """Split on whitespace and punctuation; spans index into ``text``."""
    return [Token(m.group(), m.start(), m.end()) for m in _WORD.finditer(text)]


def terms(text: str) -> list[str]:
    """Lowercased tokens, the unit of indexing and lexicon lookup."""
    return [m.group().lower() for m in _WORD.finditer(text)]


def lemma_candidates(word: str) -> list[str]:
    word = word.lower()
    out = [word]
    for suffix, repl in _SUFFIXES:
        if word.endswith(suffix) and len(word) > len(suffix) + 1:
            cand = word[: -len(suffix)] + repl
            if cand not in out:
                out.append(cand)
    return out
