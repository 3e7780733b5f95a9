"""Beta-eta reduction with a step budget, and the conversion check built on it.

The strategy is leftmost-outermost: at an application whose head is a lambda,
beta fires; at a lambda whose body applies something to exactly the bound
variable (unused elsewhere), eta fires; otherwise the leftmost-outermost
subterm is reduced. Normal-order reduction finds a normal form whenever one
exists, which is what makes a fuel-bounded equality check honest: "distinct"
is only ever reported for terms that genuinely reached distinct normal forms.

Conversion never guesses. If fuel runs out before both sides normalize, the
result is "undecided", and callers treat that as failure, not equality.
"""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import App, Bound, Lam, Term, Var, alpha_eq, free_term_vars, fresh, open_term, close_term

DEFAULT_FUEL = 10000

NORMAL = "normal"
FUEL_EXHAUSTED = "fuel-exhausted"

EQUAL = "equal"
DISTINCT = "distinct"
UNDECIDED = "undecided"


@dataclass(frozen=True)
class NormalizeResult:
    term: Term
    status: str  # NORMAL | FUEL_EXHAUSTED
    steps_used: int


def step(t: Term) -> Term | None:
    """One leftmost-outermost beta-eta step, or None if t is normal."""
    match t:
        case App(Lam(_, body), arg):
            return open_term(body, arg)
        case Lam(hint, _):
            x = fresh(hint or "x", free_term_vars(t))
            body = open_term(t.body, Var(x))
            if isinstance(body, App) and body.arg == Var(x) and x not in free_term_vars(body.fn):
                return body.fn
            inner = step(body)
            if inner is None:
                return None
            return Lam(hint, close_term(inner, x))
        case App(fn, arg):
            s = step(fn)
            if s is not None:
                return App(s, arg)
            s = step(arg)
            if s is not None:
                return App(fn, s)
            return None
        case Var(_) | Bound(_):
            return None
    raise TypeError(f"not a term: {t!r}")


def normalize(t: Term, fuel: int = DEFAULT_FUEL) -> NormalizeResult:
    """Reduce to normal form, spending at most `fuel` steps."""
    used = 0
    while used < fuel:
        nxt = step(t)
        if nxt is None:
            return NormalizeResult(t, NORMAL, used)
        t = nxt
        used += 1
    if step(t) is None:
        return NormalizeResult(t, NORMAL, used)
    return NormalizeResult(t, FUEL_EXHAUSTED, used)


def conv_check(t1: Term, t2: Term, fuel: int = DEFAULT_FUEL) -> str:
    """Decide beta-eta convertibility within a shared step budget.

    The budget covers both normalizations together: the second side gets
    whatever the first left over. "equal"/"distinct" are only reported when
    both sides reached normal form; otherwise "undecided".
    """
    r1 = normalize(t1, fuel)
    if r1.status != NORMAL:
        return UNDECIDED
    r2 = normalize(t2, fuel - r1.steps_used)
    if r2.status != NORMAL:
        return UNDECIDED
    return EQUAL if alpha_eq(r1.term, r2.term) else DISTINCT
