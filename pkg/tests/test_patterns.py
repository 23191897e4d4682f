from __future__ import annotations

import itertools

import pytest

from ailtl.events import Event, EventKind, History
from ailtl.kb import FactBase
from ailtl.patterns import (
    Complete,
    Mismatch,
    NoEvents,
    PatternElem,
    PatternSeq,
    Prefix,
    Quant,
    match_prefix,
    occurs_any,
)
from ailtl.terms import Const, Var, Wildcard, atom

from oracles import oracle_match_prefix


def elem(name, *args, kind=None, quant=Quant.ONE):
    return PatternElem(atom(name, *args), kind, quant)


def seq(*elems):
    return PatternSeq(tuple(elems))


def log(*payloads, kind=EventKind.ACTION):
    h = History()
    for t, p in enumerate(payloads, start=1):
        h.record(Event(kind, p, t))
    return h


A, B, C = Const("a"), Const("b"), Const("c")


def test_plus_absorbs_a_whole_run():
    p = seq(elem("supply", Const("r"), Wildcard("_s"), kind=EventKind.PAST, quant=Quant.PLUS))
    h = log(
        atom("supply", Const("r"), Const(5)),
        atom("supply", Const("r"), Const(2)),
        atom("supply", Const("r"), Const(9)),
    )
    assert match_prefix(p, h, 0) == Complete({})


def test_partial_pattern_is_a_prefix():
    p = seq(elem("a"), elem("b"))
    result = match_prefix(p, log(A), 0)
    assert result == Prefix(1, {})


def test_out_of_order_event_is_a_mismatch():
    p = seq(elem("a"), elem("b"))
    assert match_prefix(p, log(B, A), 0) == Mismatch(0)


def test_no_relevant_events():
    p = seq(elem("a"))
    assert match_prefix(p, log(C), 0) == NoEvents()
    assert match_prefix(p, History(), 0) == NoEvents()


def test_empty_pattern_always_satisfied():
    assert match_prefix(PatternSeq(()), History(), 0) == Complete({})


def test_irrelevant_events_are_skipped():
    p = seq(elem("a"), elem("b"))
    assert match_prefix(p, log(A, C, C, B), 0) == Complete({})


def test_shared_variable_constrains_later_elements():
    # the queue id must recur; the pushed items may differ
    p = seq(
        elem("push", Var("Req"), Var("Q"), quant=Quant.PLUS),
        elem("pop", Var("E"), Var("Q"), quant=Quant.PLUS),
    )
    h = log(
        atom("push", Const(1), Const("q1")),
        atom("push", Const(2), Const("q1")),
        atom("pop", Const("e1"), Const("q1")),
    )
    result = match_prefix(p, h, 0)
    assert isinstance(result, Complete)
    assert result.binding["Q"] == Const("q1")
    assert "Req" not in result.binding  # demoted: items differed across the run


def test_uniform_run_variable_is_exported():
    p = seq(elem("push", Var("Req"), Var("Q"), quant=Quant.PLUS))
    h = log(atom("push", Const(7), Const("q1")), atom("push", Const(7), Const("q1")))
    result = match_prefix(p, h, 0)
    assert result == Complete({"Req": Const(7), "Q": Const("q1")})


def test_mismatched_shared_variable_dies():
    p = seq(elem("ask", Var("V")), elem("ack", Var("V")))
    h = log(atom("ask", Const(1)), atom("ack", Const(2)))
    assert match_prefix(p, h, 0) == Mismatch(1)


def test_kind_filter_restricts_matches():
    p = seq(elem("ping", kind=EventKind.PRESENT))
    h = log(Const("ping"))  # logged as an action
    assert match_prefix(p, h, 0) == NoEvents()


def test_since_restricts_the_scan():
    p = seq(elem("a"))
    h = log(A, B, A)  # a@1, b@2, a@3
    assert match_prefix(p, h, 2) == Complete({})
    assert match_prefix(p, h, 4) == NoEvents()


def test_star_elements_can_be_skipped():
    p = seq(elem("a", quant=Quant.STAR), elem("b"))
    assert match_prefix(p, log(B), 0) == Complete({})
    assert match_prefix(p, log(A, B), 0) == Complete({})


def test_classification_via_fact_base():
    kb = FactBase()
    kb.assert_fact(atom("extensive_usage_action", Const("dry_water")))
    p = seq(elem("extensive_usage_action", Var("Act"), quant=Quant.STAR))
    h = log(Const("dry_water"))
    hit = occurs_any(p, h, 0, kb)
    assert hit is not None
    event, binding = hit
    assert event.payload == Const("dry_water")
    assert binding["Act"] == Const("dry_water")


def test_occurs_any_on_empty_log():
    p = seq(elem("boom"))
    assert occurs_any(p, History(), 0) is None


def test_occurs_any_returns_earliest_hit():
    p = seq(elem("boom"), elem("crash"))
    h = log(Const("crash"), Const("boom"))
    event, _ = occurs_any(p, h, 0)
    assert event.payload == Const("crash") and event.timestamp == 1


def test_occurs_any_is_strictly_after_since():
    p = seq(elem("boom"))
    h = log(Const("boom"))  # at t=1
    assert occurs_any(p, h, 1) is None
    assert occurs_any(p, h, 0) is not None


def test_monotone_triggering():
    p = seq(elem("a"), elem("b"))
    h = History()
    h.record(Event(EventKind.ACTION, A, 1))
    first = match_prefix(p, h, 0)
    assert isinstance(first, Prefix)
    h.record(Event(EventKind.ACTION, B, 2))
    assert not isinstance(match_prefix(p, h, 0), NoEvents)


# exhaustive equivalence with the segmentation oracle: every log of length
# <= 5 over a 3-symbol alphabet, against a catalogue of patterns
_CATALOGUE = [
    seq(elem("a")),
    seq(elem("a", quant=Quant.PLUS)),
    seq(elem("a"), elem("b")),
    seq(elem("a", quant=Quant.PLUS), elem("b")),
    seq(elem("a", quant=Quant.STAR), elem("b")),
    seq(elem("a", quant=Quant.STAR), elem("b", quant=Quant.STAR), elem("c")),
    seq(elem("a"), elem("b", quant=Quant.PLUS), elem("c")),
    seq(elem("a", quant=Quant.PLUS), elem("a")),
    seq(elem("a", quant=Quant.STAR), elem("a"), elem("b")),
    seq(elem("b"), elem("a", quant=Quant.STAR)),
]


@pytest.mark.parametrize("pattern", _CATALOGUE, ids=range(len(_CATALOGUE)))
def test_exhaustive_equivalence_with_oracle(pattern):
    for length in range(6):
        for combo in itertools.product((A, B, C), repeat=length):
            h = log(*combo)
            got = match_prefix(pattern, h, 0)
            expected = oracle_match_prefix(pattern, h.log, 0)
            assert got == expected, f"log={combo}"


def test_binding_equivalence_with_oracle():
    x_ = Const("x")
    y_ = Const("y")
    payloads = (atom("f", x_), atom("f", y_), atom("g", x_))
    patterns = [
        seq(elem("f", Var("V"), quant=Quant.PLUS)),
        seq(elem("f", Var("V")), elem("g", Var("V"))),
        seq(elem("f", Var("V"), quant=Quant.PLUS), elem("g", Var("V"))),
    ]
    for pattern in patterns:
        for length in range(5):
            for combo in itertools.product(payloads, repeat=length):
                h = log(*combo)
                got = match_prefix(pattern, h, 0)
                expected = oracle_match_prefix(pattern, h.log, 0)
                assert got == expected, f"pattern={pattern} log={combo}"
