"""Independent lambda-calculus oracle used to pin expected values before the build.

This module deliberately shares no code or representation with the package: terms
are plain nested tuples with string-named variables, substitution is the textbook
capture-avoiding one with explicit renaming, and reduction is normal-order beta-eta.
The package uses a locally nameless representation, so agreement between the two is
meaningful evidence rather than an echo.

The arithmetic terms below are assembled by hand from the standard constructions
(identity/constant combinators, Church-style sums, the functorial map for 1+X, the
fold/in constructors, numerals, addition) and exist to answer one question up front:
what should a conversion check on `add n2 n2` vs `n4` return, and within what step
budget.
"""

from __future__ import annotations

import itertools

# Terms: ("var", name) | ("lam", name, body) | ("app", fn, arg)

_counter = itertools.count()


def V(name):
    return ("var", name)


def L(name, body):
    return ("lam", name, body)


def A(fn, *args):
    t = fn
    for a in args:
        t = ("app", t, a)
    return t


def free_vars(t):
    tag = t[0]
    if tag == "var":
        return {t[1]}
    if tag == "lam":
        return free_vars(t[2]) - {t[1]}
    return free_vars(t[1]) | free_vars(t[2])


def subst(t, name, repl):
    """Capture-avoiding [repl/name]t with on-the-fly renaming."""
    tag = t[0]
    if tag == "var":
        return repl if t[1] == name else t
    if tag == "app":
        return ("app", subst(t[1], name, repl), subst(t[2], name, repl))
    bound, body = t[1], t[2]
    if bound == name:
        return t
    if bound in free_vars(repl) and name in free_vars(body):
        fresh = f"{bound}%{next(_counter)}"
        body = subst(body, bound, V(fresh))
        bound = fresh
    return ("lam", bound, subst(body, name, repl))


def step(t):
    """One normal-order beta-eta step, or None if t is normal."""
    tag = t[0]
    if tag == "app" and t[1][0] == "lam":
        return subst(t[1][2], t[1][1], t[2])
    if tag == "lam":
        bound, body = t[1], t[2]
        if (
            body[0] == "app"
            and body[2] == ("var", bound)
            and bound not in free_vars(body[1])
        ):
            return body[1]
        inner = step(body)
        if inner is not None:
            return ("lam", bound, inner)
        return None
    if tag == "app":
        fn = step(t[1])
        if fn is not None:
            return ("app", fn, t[2])
        arg = step(t[2])
        if arg is not None:
            return ("app", t[1], arg)
        return None
    return None


def normalize(t, limit):
    """Returns (normal_form_or_last_term, steps_used, finished)."""
    for used in range(limit + 1):
        nxt = step(t)
        if nxt is None:
            return t, used, True
        t = nxt
    return t, limit, False


def canon(t, env=None, depth=0):
    """Rename bound variables by binding depth so == is alpha-equivalence."""
    env = env or {}
    tag = t[0]
    if tag == "var":
        return ("var", env.get(t[1], t[1]))
    if tag == "app":
        return ("app", canon(t[1], env, depth), canon(t[2], env, depth))
    new = dict(env)
    new[t[1]] = f"#{depth}"
    return ("lam", f"#{depth}", canon(t[2], new, depth + 1))


def alpha_eq(a, b):
    return canon(a) == canon(b)


# ---------------------------------------------------------------------------
# Hand-assembled arithmetic, following the printed equations clause by clause.
# ---------------------------------------------------------------------------

I = L("x", V("x"))
K = L("x", L("y", V("x")))


def compose(f, g):
    """t . t' = \\c. t (t' c)"""
    return L("c", A(f, A(g, V("c"))))


INL = L("a", L("n", L("m", A(V("n"), V("a")))))
INR = L("b", L("n", L("m", A(V("m"), V("b")))))
UNIT = I


def fmap_arrow(fdom, fcod):
    """fmap for A -> B: \\f.\\a. ((fmap_B f) . a) . (fmap_A f)"""
    return L(
        "f",
        L("a", compose(compose(A(fcod, V("f")), V("a")), A(fdom, V("f")))),
    )


# The sum functor, unfolded:  1+X  =  forall Z. (1 -> Z) -> ((X -> Z) -> Z)
FMAP_PARAM = I  # fmap at the parameter X itself
FMAP_OTHER = A(K, I)  # fmap at any other type variable (Z, W)
FMAP_W_TO_W = fmap_arrow(FMAP_OTHER, FMAP_OTHER)
FMAP_ONE = L("f", A(FMAP_W_TO_W, V("f")))  # 1 = forall W. W -> W
FMAP_X_TO_Z = fmap_arrow(FMAP_PARAM, FMAP_OTHER)
FMAP_ONE_TO_Z = fmap_arrow(FMAP_ONE, FMAP_OTHER)
FMAP_XZ_TO_Z = fmap_arrow(FMAP_X_TO_Z, FMAP_OTHER)
FMAP_SUM_BODY = fmap_arrow(FMAP_ONE_TO_Z, FMAP_XZ_TO_Z)
FMAP_SUM = L("f", A(FMAP_SUM_BODY, V("f")))  # forall-clause: \f. fmap_body f

FOLD = L("a", L("x", A(V("x"), V("a"))))
IN = L("x", L("a", A(V("a"), A(FMAP_SUM, A(FOLD, V("a")), V("x")))))

ZERO = A(IN, A(INL, UNIT))
SUCC = L("s", A(IN, A(INR, V("s"))))


def pair_branches(n, m):
    """<n, m> = \\c. c n m"""
    return L("c", A(V("c"), n, m))


# The unguarded form passes the base branch bare, so it is applied to the unit
# value; the corrected form guards it with K, giving it type 1 -> Nat so the
# base case reduces to m itself.
ADD_UNGUARDED = L("n", L("m", A(V("n"), pair_branches(V("m"), SUCC))))
ADD_FIXED = L("n", L("m", A(V("n"), pair_branches(A(K, V("m")), SUCC))))


def numeral(k):
    t = ZERO
    for _ in range(k):
        t = A(SUCC, t)
    return t
