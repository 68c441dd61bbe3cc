"""Micro precision/recall/F1 for trigger classification, argument
classification and exact-match relational triples.

Every metric reduces records to hashable keys and matches gold and predicted
keys one-to-one, so a duplicated prediction of one gold item scores one hit
and one spurious prediction.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

from .dataset import ExtractionRecord
from .errors import AlignmentError


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    num_gold: int
    num_pred: int
    num_correct: int

    @classmethod
    def from_counts(cls, num_gold: int, num_pred: int, num_correct: int) -> "EvalReport":
        p = num_correct / num_pred if num_pred else 0.0
        r = num_correct / num_gold if num_gold else 0.0
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        return cls(p, r, f1, num_gold, num_pred, num_correct)

    @property
    def counts(self) -> tuple[int, int, int]:
        return (self.num_gold, self.num_pred, self.num_correct)

    def to_json(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "num_gold": self.num_gold,
            "num_pred": self.num_pred,
            "num_correct": self.num_correct,
        }


def match_counts(gold_keys: Iterable[Hashable], pred_keys: Iterable[Hashable]) -> tuple[int, int, int]:
    gold = Counter(gold_keys)
    pred = Counter(pred_keys)
    correct = sum(min(n, pred[k]) for k, n in gold.items())
    return sum(gold.values()), sum(pred.values()), correct


def _align(gold: Sequence[ExtractionRecord], pred: Sequence[ExtractionRecord]):
    gold_ids = [r.id for r in gold]
    pred_by_id = {r.id: r for r in pred}
    if len(pred_by_id) != len(pred) or len(set(gold_ids)) != len(gold_ids):
        raise AlignmentError("duplicate record ids")
    if set(gold_ids) != set(pred_by_id):
        missing = sorted(set(gold_ids) - set(pred_by_id))[:5]
        extra = sorted(set(pred_by_id) - set(gold_ids))[:5]
        raise AlignmentError(f"record ids differ (missing from pred: {missing}, unexpected: {extra})")
    return [(g, pred_by_id[g.id]) for g in gold]


def _evaluate(gold, pred, keys: Callable[[ExtractionRecord], list]) -> EvalReport:
    g_all, p_all = [], []
    for g, p in _align(gold, pred):
        g_all.extend(keys(g))
        p_all.extend(keys(p))
    return EvalReport.from_counts(*match_counts(g_all, p_all))


def _trigger_keys(r: ExtractionRecord) -> list:
    return [(r.id, e.trigger.start, e.trigger.end, e.type) for e in r.events or ()]


def _argument_keys(r: ExtractionRecord) -> list:
    return [(r.id, a.start, a.end, e.type, a.role) for e in r.events or () for a in e.arguments]


def _strict_argument_keys(r: ExtractionRecord) -> list:
    return [
        (r.id, e.trigger.start, e.trigger.end, a.start, a.end, e.type, a.role)
        for e in r.events or ()
        for a in e.arguments
    ]


def _triple_keys(r: ExtractionRecord) -> list:
    return [(r.id, t.head, t.relation, t.tail) for t in r.triples or ()]


def eval_trigger_classification(gold, pred) -> EvalReport:
    """Correct iff trigger offsets and event type match a gold trigger."""
    return _evaluate(gold, pred, _trigger_keys)


def eval_argument_classification(gold, pred, require_trigger: bool = False) -> EvalReport:
    """Correct iff argument offsets, event type and role match.

    ``require_trigger`` also demands the enclosing trigger's offsets match.
    """
    return _evaluate(gold, pred, _strict_argument_keys if require_trigger else _argument_keys)


def eval_triples(gold, pred) -> EvalReport:
    return _evaluate(gold, pred, _triple_keys)


def evaluate(gold, pred, mode: str, require_trigger: bool = False) -> dict[str, EvalReport]:
    if mode == "event":
        return {
            "trigger": eval_trigger_classification(gold, pred),
            "argument": eval_argument_classification(gold, pred, require_trigger),
        }
    if mode == "triple":
        return {"triple": eval_triples(gold, pred)}
    raise ValueError(f"unknown mode {mode!r}")
