"""Unit and property tests for the term and type representation."""

from __future__ import annotations

from hypothesis import given

from generators import term_strategy, type_strategy
from reltt.syntax import (
    App,
    Arrow,
    Comp,
    Conv,
    Judgment,
    Promote,
    TVar,
    Var,
    all_,
    alpha_eq,
    close_term,
    close_type,
    free_term_vars,
    free_type_vars,
    free_vars,
    fresh,
    lam,
    locally_closed_term,
    open_term,
    open_type,
    subst_term,
    subst_term_multi,
    subst_terms_in_type,
    subst_tvar,
    term_size,
)

I = lam("z", Var("z"))
K = lam("p", lam("q", Var("p")))


def test_alpha_equivalence_is_structural_equality():
    assert lam("x", Var("x")) == lam("y", Var("y"))
    assert all_("X", Arrow(TVar("X"), TVar("X"))) == all_("Y", Arrow(TVar("Y"), TVar("Y")))
    assert alpha_eq(lam("x", Var("x")), lam("y", Var("y")))


def test_free_variable_names_are_compared_literally():
    assert Var("x") != Var("y")
    assert TVar("X") != TVar("Y")
    assert lam("x", Var("f")) != lam("x", Var("g"))


@given(term_strategy())
def test_alpha_eq_reflexive(t):
    assert alpha_eq(t, t)


@given(term_strategy(), term_strategy())
def test_alpha_eq_symmetric(a, b):
    assert alpha_eq(a, b) == alpha_eq(b, a)


def test_fresh_appends_numeric_suffixes():
    assert fresh("x", set()) == "x"
    assert fresh("x", {"x", "x1"}) == "x2"


def test_free_vars_examples():
    assert free_vars(lam("x", App(Var("x"), Var("y")))) == ({"y"}, set())
    assert free_vars(all_("X", Arrow(TVar("X"), TVar("Y")))) == (set(), {"Y"})


def test_free_var_helpers_split_the_pair():
    r = Comp(Promote(Var("t")), TVar("S"))
    assert free_term_vars(r) == {"t"}
    assert free_type_vars(r) == {"S"}


@given(term_strategy(), term_strategy())
def test_subst_is_identity_when_var_absent(t, s):
    # "q0" is outside the generator pool, so it is never free in s.
    assert alpha_eq(subst_term(t, "q0", s), s)


@given(term_strategy(), term_strategy(), term_strategy())
def test_subst_is_compositional(t, tp, s0):
    # y = "q0" is outside the pool: y is not free in t and differs from x.
    x, y = "x", "q0"
    s = App(s0, Var(y))
    lhs = subst_term(t, x, subst_term(tp, y, s))
    rhs = subst_term(subst_term(t, x, tp), y, subst_term(t, x, s))
    assert alpha_eq(lhs, rhs)


@given(term_strategy(), term_strategy())
def test_free_vars_of_subst_are_bounded(t, s):
    x = "x"
    result = free_term_vars(subst_term(t, x, s))
    assert result <= (free_term_vars(s) - {x}) | free_term_vars(t)


def test_subst_term_multi_reaches_into_promotions():
    sigma = {"x": I}
    r = Promote(App(K, Var("x")))
    assert alpha_eq(subst_terms_in_type(sigma, r), Promote(App(K, I)))
    t = App(Var("x"), Var("y"))
    assert alpha_eq(subst_term_multi(sigma, t), App(I, Var("y")))


def test_subst_does_not_capture():
    # Substituting y under a binder named y must rename, not capture.
    target = lam("y", App(Var("x"), Var("y")))
    result = subst_term(Var("y"), "x", target)
    assert alpha_eq(result, lam("w", App(Var("y"), Var("w"))))
    assert not alpha_eq(result, lam("y", App(Var("y"), Var("y"))))


def test_subst_tvar_does_not_capture():
    target = all_("Y", Arrow(TVar("X"), TVar("Y")))
    result = subst_tvar(TVar("Y"), "X", target)
    assert alpha_eq(result, all_("Z", Arrow(TVar("Y"), TVar("Z"))))


@given(term_strategy())
def test_open_close_term_round_trip(t):
    assert locally_closed_term(t)
    body = close_term(t, "x")
    assert alpha_eq(open_term(body, Var("x")), t)


@given(type_strategy())
def test_open_close_type_round_trip(r):
    body = close_type(r, "X")
    assert alpha_eq(open_type(body, TVar("X")), r)


def test_shadowing_closes_only_the_nearest_binder():
    # \x. \x. x: the inner binder wins; the body's var belongs to it.
    t = lam("x", lam("x", Var("x")))
    inner = t.body
    assert alpha_eq(open_term(inner, Var("w")), lam("x", Var("x")))


def test_term_size_counts_constructors():
    assert term_size(Var("x")) == 1
    assert term_size(lam("x", Var("x"))) == 2
    assert term_size(App(Var("x"), Var("y"))) == 3


def test_judgments_compare_up_to_alpha():
    a = Judgment(lam("x", Var("x")), all_("X", TVar("X")), lam("y", Var("y")))
    b = Judgment(lam("z", Var("z")), all_("Y", TVar("Y")), lam("z", Var("z")))
    assert a == b


def test_conv_comp_promote_compare_structurally():
    assert Conv(TVar("R")) == Conv(TVar("R"))
    assert Conv(TVar("R")) != TVar("R")
    assert Comp(TVar("R"), TVar("S")) != Comp(TVar("S"), TVar("R"))
    assert Promote(lam("x", Var("x"))) == Promote(lam("y", Var("y")))
