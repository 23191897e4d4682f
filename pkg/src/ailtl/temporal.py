"""Interval temporal operators over the timed state sequence.

Three operators, all interpreted over states with inclusive interval
bounds ``[m, n]``:

* ``ALWAYS``     -- the condition must hold at every checked state;
* ``EVENTUALLY`` -- the condition must hold at some checked state;
* ``NEVER``      -- the condition must be satisfiable at no checked state.

Bounds are absolute engine ticks; a missing lower bound anchors at the
moment the expression was enabled, a missing upper bound means "from then
on".  Operators do not nest.  Each constraint carries its own checking
frequency ``k``: with enable time ``e``, checks are due at the ticks where
``(now - e) mod k = 0``.  A violation whose truth span falls strictly
between due ticks is by design undetected; raising the frequency is the
remedy.

A formula is a conjunction of literals, optionally instantiated by a
context conjunction evaluated first (first solution wins, no backtracking
into the context).  Evaluation reports whether the formula has a
satisfying instance; the verdict machine decides what that means for the
operator at hand.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Tuple, Union

from .events import EventKind, History
from .kb import Conj, FactBase, UnboundBuiltinArg
from .terms import Binding, Compound, Const, Term, Var, Wildcard, render_term, subst


class NonGroundAfterContext(Exception):
    """The formula kept unbound, non-query-bindable variables after its context."""


class UnresolvedPreference(Exception):
    """A preference construct referenced an unregistered cost evaluator."""


class TemporalOp(Enum):
    ALWAYS = "ALWAYS"
    EVENTUALLY = "EVENTUALLY"
    NEVER = "NEVER"


@dataclass(frozen=True)
class IntervalOp:
    op: TemporalOp
    m: Optional[int] = None
    n: Optional[int] = None
    k: Optional[int] = None

    def __post_init__(self) -> None:
        if self.m is not None and self.n is not None and self.m > self.n:
            raise ValueError(f"interval lower bound {self.m} above upper bound {self.n}")
        if self.k is not None and self.k < 1:
            raise ValueError("frequency must be at least 1")


def due(op: IntervalOp, enabled_at: int, now: int, default_k: int = 1) -> bool:
    """Is a check due at ``now`` for a constraint enabled at ``enabled_at``?"""
    if now < enabled_at:
        raise ValueError("now precedes enable time")
    k = op.k if op.k is not None else default_k
    return (now - enabled_at) % k == 0


@dataclass(frozen=True)
class ContextualFormula:
    op: IntervalOp
    phi: Conj
    chi: Conj = ()


def eval_once(
    f: ContextualFormula,
    kb: FactBase,
    history: Optional[History] = None,
    seed: Optional[Binding] = None,
) -> Tuple[Optional[bool], Binding]:
    """One check of the formula against the current snapshot.

    The context is evaluated first and commits to its first solution; the
    formula is then tested for a satisfying instance under that binding.
    Returns ``(satisfiable, binding)``, where the binding carries the
    witnessing instance when one exists.  When the context itself has no
    solution the check is not applicable: ``(None, seed)``.
    """
    base = dict(seed or {})
    if f.chi:
        ctx = next(kb.query(f.chi, seed=base, history=history), None)
        if ctx is None:
            return None, base
        base = ctx
    try:
        witness = next(kb.query(f.phi, seed=base, history=history), None)
    except UnboundBuiltinArg as exc:
        raise NonGroundAfterContext(str(exc)) from exc
    if witness is None:
        return False, base
    return True, witness


class CoreVerdict(Enum):
    HOLDS_SO_FAR = "holds_so_far"
    HOLDS_FINAL = "holds_final"
    VIOLATED_NOW = "violated_now"
    VACUOUS = "vacuous"


TERMINAL_VERDICTS = (CoreVerdict.HOLDS_FINAL, CoreVerdict.VIOLATED_NOW)


@dataclass
class CoreState:
    """Verdict machine for one enabled interval constraint."""

    lo: int
    hi: Optional[int]
    verdict: CoreVerdict = CoreVerdict.HOLDS_SO_FAR

    @classmethod
    def enable(cls, op: IntervalOp, enabled_at: int) -> "CoreState":
        lo = op.m if op.m is not None else enabled_at
        return cls(lo=lo, hi=op.n)

    @property
    def terminal(self) -> bool:
        return self.verdict in TERMINAL_VERDICTS

    def in_interval(self, now: int) -> bool:
        if now < self.lo:
            return False
        return self.hi is None or now <= self.hi


def step_core(state: CoreState, op: IntervalOp, holds_now: bool, now: int) -> CoreVerdict:
    """Advance the verdict machine with one due check.

    ``holds_now`` is the formula's satisfiability at this state.  For
    ALWAYS a false check violates immediately and surviving to the upper
    bound settles the constraint; for EVENTUALLY the first true check
    settles it and reaching the bound without one violates; NEVER mirrors
    ALWAYS with the polarity flipped.  Unbounded constraints never settle.
    """
    if state.terminal:
        return state.verdict
    if now < state.lo:
        return CoreVerdict.VACUOUS
    if state.hi is not None and now > state.hi:
        return close_core(state, op)
    at_bound = state.hi is not None and now >= state.hi
    kind = op.op
    if kind is TemporalOp.EVENTUALLY:
        if holds_now:
            state.verdict = CoreVerdict.HOLDS_FINAL
        elif at_bound:
            state.verdict = CoreVerdict.VIOLATED_NOW
        return state.verdict
    failed = holds_now if kind is TemporalOp.NEVER else not holds_now
    if failed:
        state.verdict = CoreVerdict.VIOLATED_NOW
    elif at_bound:
        state.verdict = CoreVerdict.HOLDS_FINAL
    return state.verdict


def close_core(state: CoreState, op: IntervalOp) -> CoreVerdict:
    """Settle a bounded constraint whose interval has elapsed unchecked."""
    if state.terminal:
        return state.verdict
    if op.op is TemporalOp.EVENTUALLY:
        state.verdict = CoreVerdict.VIOLATED_NOW
    else:
        state.verdict = CoreVerdict.HOLDS_FINAL
    return state.verdict


# -- reactions ----------------------------------------------------------

GROUND_PLACEHOLDER = Const("any")


@dataclass(frozen=True)
class ReactionAtom:
    payload: Term
    kind: EventKind = EventKind.ACTION
    precond: Conj = ()


@dataclass(frozen=True)
class Choice:
    """``X IN {options : cost}`` -- bind X to the cheapest option."""

    var: str
    options: Tuple[Term, ...]
    cost: str


ReactionElem = Union[ReactionAtom, Choice]
Reaction = Tuple[ReactionElem, ...]


@dataclass(frozen=True)
class ReactiveRule:
    """``OP(M,N;K) formula :: context DIV reaction`` -- react on violation."""

    monitor: ContextualFormula
    reaction: Reaction

    def __post_init__(self) -> None:
        if not self.reaction:
            raise ValueError("reactive rule needs a non-empty reaction")


def ground_for_emit(t: Term) -> Term:
    """Close residual variables: an unbound slot emits as the constant ``any``."""
    if isinstance(t, (Var, Wildcard)):
        return GROUND_PLACEHOLDER
    if isinstance(t, Compound):
        return Compound(t.functor, tuple(ground_for_emit(a) for a in t.args))
    return t


def fire_reaction(
    reaction: Reaction,
    kb: FactBase,
    binding: Binding,
    history: Optional[History] = None,
) -> List[Tuple[EventKind, Term]]:
    """Resolve a reaction into the ground events it emits.

    Preference constructs are binders and resolve first, choosing the
    option with the lowest registered cost (ties keep the listed order).
    Each emitting element then checks its precondition and is skipped when
    it fails; the surviving atoms are emitted in declaration order.
    """
    bound = dict(binding)
    for elem in reaction:
        if not isinstance(elem, Choice):
            continue
        evaluate = kb.cost_evaluator(elem.cost)
        if evaluate is None:
            raise UnresolvedPreference(f"no cost evaluator registered for '{elem.cost}'")
        best: Optional[Term] = None
        best_cost: Optional[int] = None
        for option in elem.options:
            candidate = subst(option, bound)
            cost = evaluate(candidate)
            if cost is None:
                continue
            if best_cost is None or cost < best_cost:
                best, best_cost = candidate, cost
        if best is None:
            raise UnresolvedPreference(
                f"cost evaluator '{elem.cost}' ranked none of "
                f"{{{', '.join(render_term(o) for o in elem.options)}}}"
            )
        bound[elem.var] = best
    emitted: List[Tuple[EventKind, Term]] = []
    for elem in reaction:
        if isinstance(elem, Choice):
            continue
        local = bound
        if elem.precond:
            solution = next(kb.query(elem.precond, seed=bound, history=history), None)
            if solution is None:
                continue
            local = solution
        emitted.append((elem.kind, ground_for_emit(subst(elem.payload, local))))
    return emitted
