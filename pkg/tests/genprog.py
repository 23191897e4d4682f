"""Seeded random generator of well-formed Program values.

Used by the DSL round-trip tests: generate a Program, render it, parse it
back, compare structurally.  The generator only builds values the
concrete syntax can express (identifiers never carry accidental kind
postfixes, preconditions only close a reaction, intervals are ordered).
"""

from __future__ import annotations

import random
from typing import List, Tuple

from ailtl.dsl import Program
from ailtl.events import EventKind
from ailtl.evolutionary import EvolutionaryExpr
from ailtl.kb import Comparison, EventRef, Literal
from ailtl.metagate import MetaRule, Polarity
from ailtl.patterns import PatternElem, PatternSeq, Quant
from ailtl.temporal import Choice, ContextualFormula, IntervalOp, ReactionAtom, ReactiveRule, TemporalOp
from ailtl.terms import Compound, Const, Term, Var, Wildcard

IDENTS = ["alpha", "beta", "gamma", "delta", "omega", "sensor", "motor", "stock"]
VARS = ["X", "Y", "Z", "V", "W"]
WILDS = ["_a", "_b", "_any"]
KINDS = list(EventKind)
CMPS = ["<", "<=", ">", ">=", "=", "\\="]


def _const(rng: random.Random) -> Const:
    if rng.random() < 0.4:
        return Const(rng.randrange(0, 100))
    return Const(rng.choice(IDENTS))


def _term(rng: random.Random, depth: int = 0, ground: bool = False) -> Term:
    roll = rng.random()
    if depth < 2 and roll < 0.3:
        args = tuple(_term(rng, depth + 1, ground) for _ in range(rng.randint(1, 3)))
        return Compound(rng.choice(IDENTS), args)
    if not ground and roll < 0.55:
        return Var(rng.choice(VARS))
    if not ground and roll < 0.65:
        return Wildcard(rng.choice(WILDS))
    return _const(rng)


def _atom(rng: random.Random, ground: bool = False) -> Term:
    if rng.random() < 0.25:
        return Const(rng.choice(IDENTS))
    args = tuple(_term(rng, 1, ground) for _ in range(rng.randint(1, 3)))
    return Compound(rng.choice(IDENTS), args)


def _literal(rng: random.Random) -> Literal:
    roll = rng.random()
    negated = rng.random() < 0.2
    if roll < 0.2:
        return Literal(Comparison(rng.choice(CMPS), _term(rng, 2), _term(rng, 2)), negated)
    if roll < 0.4:
        template = _atom(rng)
        return Literal(EventRef(rng.choice(KINDS), template), negated)
    return Literal(_atom(rng), negated)


def _conj(rng: random.Random, lo: int = 1, hi: int = 3) -> Tuple[Literal, ...]:
    return tuple(_literal(rng) for _ in range(rng.randint(lo, hi)))


def _op(rng: random.Random) -> IntervalOp:
    kind = rng.choice(list(TemporalOp))
    shape = rng.randrange(5)
    if shape == 0:
        return IntervalOp(kind)
    m = rng.randrange(0, 60)
    if shape == 1:
        return IntervalOp(kind, m)
    if shape == 2:
        return IntervalOp(kind, m, m + rng.randrange(0, 60))
    if shape == 3:
        return IntervalOp(kind, m, None, rng.randrange(1, 20))
    return IntervalOp(kind, m, m + rng.randrange(0, 60), rng.randrange(1, 20))


def _pattern_elem(rng: random.Random) -> PatternElem:
    kind = rng.choice(KINDS + [None, None])
    quant = rng.choice(list(Quant))
    return PatternElem(_atom(rng), kind, quant)


def _patseq(rng: random.Random, lo: int = 1, hi: int = 2) -> PatternSeq:
    return PatternSeq(tuple(_pattern_elem(rng) for _ in range(rng.randint(lo, hi))))


def _reaction_atom(rng: random.Random, precond: bool = False) -> ReactionAtom:
    kind = rng.choice(KINDS) if rng.random() < 0.3 else EventKind.ACTION
    cond = _conj(rng, 1, 2) if precond else ()
    return ReactionAtom(_atom(rng), kind, cond)


def _reaction(rng: random.Random) -> Tuple:
    elems: List = []
    for _ in range(rng.randint(1, 2)):
        if rng.random() < 0.3:
            options = tuple(_const(rng) for _ in range(rng.randint(2, 3)))
            elems.append(Choice(rng.choice(VARS), options, rng.choice(IDENTS)))
        else:
            elems.append(_reaction_atom(rng))
    if rng.random() < 0.3:
        # a precondition conjunction is greedy, so it may only close the list
        elems.append(_reaction_atom(rng, precond=True))
    return tuple(elems)


def _metarule(rng: random.Random) -> MetaRule:
    polarity = rng.choice(list(Polarity))
    head = Compound(rng.choice(["act", "launch"]), tuple(_term(rng, 1) for _ in range(rng.randint(1, 2))))
    body = _conj(rng, 0, 2)
    return MetaRule(polarity, head, body)


def _reactive(rng: random.Random) -> ReactiveRule:
    chi = _conj(rng, 1, 2) if rng.random() < 0.5 else ()
    return ReactiveRule(ContextualFormula(_op(rng), _conj(rng), chi), _reaction(rng))


def _evolutionary(rng: random.Random) -> EvolutionaryExpr:
    chi = _conj(rng, 1, 2) if rng.random() < 0.4 else ()
    return EvolutionaryExpr(
        core=ContextualFormula(_op(rng), _conj(rng), chi),
        pre=_patseq(rng) if rng.random() < 0.7 else PatternSeq(()),
        future=_patseq(rng) if rng.random() < 0.5 else PatternSeq(()),
        breaking=_patseq(rng) if rng.random() < 0.5 else PatternSeq(()),
        repair=_reaction(rng) if rng.random() < 0.6 else (),
        eta1=_reaction_atom(rng) if rng.random() < 0.4 else None,
        eta2=_reaction_atom(rng) if rng.random() < 0.4 else None,
        eta3=_reaction(rng) if rng.random() < 0.3 else (),
    )


def random_program(rng: random.Random) -> Program:
    program = Program()
    for _ in range(rng.randint(0, 4)):
        program.facts.append(_atom(rng, ground=True))
    for _ in range(rng.randint(0, 3)):
        program.metarules.append(_metarule(rng))
    for _ in range(rng.randint(0, 3)):
        program.reactive.append((f"r{len(program.reactive) + 1}", _reactive(rng)))
    for _ in range(rng.randint(0, 3)):
        program.evolutionary.append((f"e{len(program.evolutionary) + 1}", _evolutionary(rng)))
    for _ in range(rng.randint(0, 2)):
        table = {rng.choice(IDENTS) + str(i): rng.randrange(0, 50) for i in range(rng.randint(1, 3))}
        program.costs[f"cost{len(program.costs) + 1}"] = table
    if rng.random() < 0.5:
        program.config["frequency"] = rng.randrange(1, 10)
    if rng.random() < 0.3:
        program.config["retention"] = rng.randrange(1, 100)
    if not (
        program.facts
        or program.metarules
        or program.reactive
        or program.evolutionary
        or program.costs
        or program.config
    ):
        program.facts.append(_atom(rng, ground=True))
    return program
