"""Derived-state evaluators: state predicates computed from the event log.

The fact layer has no rules, so predicates that describe evolving state
(queue contents, stock level, battery charge) are registered evaluators
that derive their answers from the history on demand.  A program selects
a profile in its config section (``derived = queue.``), which is what
makes a run fully determined by the program and trace files alone.

* ``queue``   -- ``in_queue(E, V)``: the i-th recorded ``push(V, Q)``
  enters as entry ``e<i>``; ``pop(e<i>, Q)`` removes it.
* ``stock``   -- ``quantity(R, V)``: ``initial_quantity(R, N)`` facts plus
  recorded ``supply(R, Q)`` minus ``consume(R, Q)``.
* ``battery`` -- ``charge_level(L)``: ``battery_full(N)`` (default 100)
  minus the ``drain(Action, D)`` cost of every action logged after the
  latest ``recharge_battery`` event.
"""

from __future__ import annotations

from typing import Dict, Iterator, List, Optional, Tuple

from .events import EventKind, History, PAST_LIKE
from .kb import FactBase, Literal, yield_matches
from .terms import Binding, Compound, Const, Term, Var, functor_of

PROFILES = ("queue", "stock", "battery")


class UnknownProfile(Exception):
    pass


def install(kb: FactBase, name: str) -> None:
    if name == "queue":
        kb.register("in_queue", 2, _QueueState().evaluate)
    elif name == "stock":
        kb.register("quantity", 2, _StockState().evaluate)
    elif name == "battery":
        kb.register("charge_level", 1, _BatteryState().evaluate)
    else:
        raise UnknownProfile(f"unknown derived-state profile {name!r}")


def _remembered(history: History) -> Iterator[Term]:
    for e in history.log:
        if e.kind in PAST_LIKE:
            yield e.payload


class _QueueState:
    def __init__(self) -> None:
        self._at = -1
        self._rows: List[Tuple[Const, Term]] = []
        self._by_value: Dict[Term, List[Tuple[Const, Term]]] = {}

    def _refresh(self, history: History) -> None:
        if self._at == len(history.log):
            return
        entries: Dict[str, Tuple[Const, Term]] = {}
        pushes = 0
        for payload in _remembered(history):
            fa = functor_of(payload)
            if fa == ("push", 2):
                pushes += 1
                index = Const(f"e{pushes}")
                entries[index.value] = (index, payload.args[0])
            elif fa == ("pop", 2) and isinstance(payload.args[0], Const):
                entries.pop(str(payload.args[0].value), None)
        self._rows = list(entries.values())
        self._by_value = {}
        for row in self._rows:
            self._by_value.setdefault(row[1], []).append(row)
        self._at = len(history.log)

    def evaluate(
        self, kb: FactBase, history: Optional[History], args: Tuple[Term, ...], binding: Binding
    ) -> Iterator[Binding]:
        if history is None:
            return
        self._refresh(history)
        value = args[1]
        rows = self._by_value.get(value, []) if isinstance(value, Const) else self._rows
        yield from yield_matches(args, binding, rows)


class _StockState:
    def __init__(self) -> None:
        self._at = -1
        self._facts_at = -1
        self._rows: List[Tuple[Term, Const]] = []

    def _refresh(self, kb: FactBase, history: History) -> None:
        if self._at == len(history.log) and self._facts_at == kb.version:
            return
        totals: Dict[Term, int] = {}
        probe = Literal(Compound("initial_quantity", (Var("R"), Var("N"))))
        for hit in kb.query((probe,)):
            totals[hit["R"]] = totals.get(hit["R"], 0) + hit["N"].value
        for payload in _remembered(history):
            fa = functor_of(payload)
            if fa not in (("supply", 2), ("consume", 2)):
                continue
            amount = payload.args[1]
            if not (isinstance(amount, Const) and isinstance(amount.value, int)):
                continue
            delta = amount.value if fa[0] == "supply" else -amount.value
            resource = payload.args[0]
            totals[resource] = totals.get(resource, 0) + delta
        self._rows = [(r, Const(v)) for r, v in totals.items()]
        self._at = len(history.log)
        self._facts_at = kb.version

    def evaluate(
        self, kb: FactBase, history: Optional[History], args: Tuple[Term, ...], binding: Binding
    ) -> Iterator[Binding]:
        if history is None:
            return
        self._refresh(kb, history)
        yield from yield_matches(args, binding, self._rows)


class _BatteryState:
    def __init__(self) -> None:
        self._at = -1
        self._level: Optional[int] = None

    def _full_charge(self, kb: FactBase) -> int:
        probe = Literal(Compound("battery_full", (Var("N"),)))
        hit = next(kb.query((probe,)), None)
        return hit["N"].value if hit else 100

    def _drain(self, kb: FactBase, action: Term) -> int:
        fa = functor_of(action)
        if fa is None:
            return 0
        probe = Literal(Compound("drain", (Const(fa[0]), Var("D"))))
        hit = next(kb.query((probe,)), None)
        return hit["D"].value if hit else 0

    def _refresh(self, kb: FactBase, history: History) -> None:
        if self._at == len(history.log):
            return
        level = self._full_charge(kb)
        for e in history.log:
            if e.kind in PAST_LIKE and functor_of(e.payload) == ("recharge_battery", 0):
                level = self._full_charge(kb)
            elif e.kind is EventKind.ACTION:
                level -= self._drain(kb, e.payload)
        self._level = level
        self._at = len(history.log)

    def evaluate(
        self, kb: FactBase, history: Optional[History], args: Tuple[Term, ...], binding: Binding
    ) -> Iterator[Binding]:
        if history is None:
            return
        self._refresh(kb, history)
        yield from yield_matches(args, binding, [(Const(self._level),)])
