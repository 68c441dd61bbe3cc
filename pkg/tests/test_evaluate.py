import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from rap.dataset import Event, ExtractionRecord, Span, Triple
from rap.errors import AlignmentError
from rap.evaluate import (
    EvalReport,
    eval_argument_classification,
    eval_trigger_classification,
    eval_triples,
    evaluate,
)
from tests.eval_fixtures import argument_pair, trigger_pair, triple_pair

TOKYO = "Tokyo is the capital of Japan."


def test_trigger_identity():
    gold, _ = trigger_pair()
    r = eval_trigger_classification(gold, gold)
    assert (r.precision, r.recall, r.f1) == (1.0, 1.0, 1.0)


def test_trigger_offset_shift_is_wrong():
    text = "They attacked."
    gold = [ExtractionRecord(0, text, events=(Event("Attack", Span("attacked", 5, 13)),))]
    pred = [ExtractionRecord(0, text, events=(Event("Attack", Span("ttacked.", 6, 14)),))]
    assert eval_trigger_classification(gold, pred).num_correct == 0


def test_trigger_fixture():
    r = eval_trigger_classification(*trigger_pair())
    assert r.counts == (3, 2, 1)
    assert r.precision == 0.5
    assert r.recall == 1 / 3
    assert math.isclose(r.f1, 0.4, abs_tol=1e-15)


def test_argument_fixture():
    r = eval_argument_classification(*argument_pair())
    assert r.counts == (4, 4, 2)
    assert (r.precision, r.recall, r.f1) == (0.5, 0.5, 0.5)


def test_argument_wrong_role():
    gold, pred = argument_pair()
    r = eval_argument_classification(gold[:1], pred[:1])
    assert r.counts == (3, 3, 2)


def test_argument_require_trigger():
    gold, _ = argument_pair()
    text = gold[1].text
    moved = Event("Attack", Span("bridge", text.index("bridge"), text.index("bridge") + 6), gold[1].events[0].arguments)
    pred = [gold[0], ExtractionRecord(1, text, events=(moved,))]
    assert eval_argument_classification(gold, pred).num_correct == 4
    assert eval_argument_classification(gold, pred, require_trigger=True).num_correct == 3


def test_triples_identity():
    recs = [ExtractionRecord(0, TOKYO, triples=(Triple("Tokyo", "capital-of", "Japan"),))]
    r = eval_triples(recs, recs)
    assert (r.precision, r.recall, r.f1) == (1.0, 1.0, 1.0)


def test_triples_exact_string():
    gold = [ExtractionRecord(0, TOKYO, triples=(Triple("Tokyo", "capital-of", "Japan"),))]
    pred = [ExtractionRecord(0, TOKYO, triples=(Triple("Tokyo.", "capital-of", "Japan"),))]
    assert eval_triples(gold, pred).f1 == 0.0


def test_triples_fixture():
    r = eval_triples(*triple_pair())
    assert r.counts == (3, 3, 2)
    assert r.precision == r.recall == r.f1 == 2 / 3


def test_evaluate_dispatch():
    assert set(evaluate(*trigger_pair(), mode="event")) == {"trigger", "argument"}
    assert set(evaluate(*triple_pair(), mode="triple")) == {"triple"}
    with pytest.raises(ValueError):
        evaluate([], [], mode="ner")


def test_alignment_errors():
    gold, pred = triple_pair()
    with pytest.raises(AlignmentError):
        eval_triples(gold, pred[:1])
    with pytest.raises(AlignmentError):
        eval_triples(gold, [pred[0], pred[0]])


def test_empty_prediction_convention():
    gold, _ = triple_pair()
    empty = [ExtractionRecord(r.id, r.text, triples=()) for r in gold]
    r = eval_triples(gold, empty)
    assert (r.precision, r.recall, r.f1) == (0.0, 0.0, 0.0)
    assert r.counts == (3, 0, 0)


def test_duplicate_prediction_is_one_hit_one_spurious():
    gold = [ExtractionRecord(0, TOKYO, triples=(Triple("Tokyo", "capital-of", "Japan"),))]
    pred = [ExtractionRecord(0, TOKYO, triples=(Triple("Tokyo", "capital-of", "Japan"),) * 2)]
    r = eval_triples(gold, pred)
    assert r.counts == (1, 2, 1)
    assert r.precision == 0.5 and r.recall == 1.0


def independent_f1(g, p, c):
    if p == 0 or g == 0 or c == 0:
        return 0.0
    return 2 * c / (g + p)


@given(st.integers(0, 50), st.integers(0, 50), st.integers(0, 50))
def test_report_from_counts(g, p, c):
    c = min(c, g, p)
    r = EvalReport.from_counts(g, p, c)
    assert r.precision == (c / p if p else 0.0)
    assert r.recall == (c / g if g else 0.0)
    assert math.isclose(r.f1, independent_f1(g, p, c), rel_tol=1e-12, abs_tol=1e-15)
    assert 0.0 <= r.f1 <= 1.0


_triple = st.tuples(st.sampled_from("ABC"), st.sampled_from(["r1", "r2"]), st.sampled_from("XY"))


@given(st.lists(st.tuples(st.lists(_triple, max_size=5), st.lists(_triple, max_size=5)), min_size=1, max_size=4),
       st.randoms(use_true_random=False))
def test_triples_permutation_invariant(pairs, rnd):
    gold = [ExtractionRecord(i, "t", triples=tuple(Triple(*t) for t in g)) for i, (g, _) in enumerate(pairs)]
    pred = [ExtractionRecord(i, "t", triples=tuple(Triple(*t) for t in p)) for i, (_, p) in enumerate(pairs)]
    base = eval_triples(gold, pred)

    def shuffled(recs):
        out = []
        for r in recs:
            items = list(r.triples)
            rnd.shuffle(items)
            out.append(ExtractionRecord(r.id, r.text, triples=tuple(items)))
        rnd.shuffle(out)
        return out

    assert eval_triples(shuffled(gold), shuffled(pred)) == base
    if base.num_gold:
        assert eval_triples(gold, gold).f1 == 1.0


def test_record_order_irrelevant():
    gold, pred = trigger_pair()
    assert eval_trigger_classification(gold[::-1], pred) == eval_trigger_classification(gold, pred)
