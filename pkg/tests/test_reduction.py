"""Tests for fuel-bounded leftmost-outermost beta-eta reduction."""

from __future__ import annotations

from hypothesis import given

from generators import affine_terms, term_strategy
from reltt.reduction import (
    DISTINCT,
    EQUAL,
    FUEL_EXHAUSTED,
    NORMAL,
    UNDECIDED,
    conv_check,
    normalize,
    step,
)
from reltt.syntax import App, Var, alpha_eq, app, lam, term_size

I = lam("x", Var("x"))
OMEGA = App(lam("x", App(Var("x"), Var("x"))), lam("x", App(Var("x"), Var("x"))))


def identity_chain(k: int) -> App:
    """k nested applications of the identity; normalizes to x in exactly k steps."""
    t = Var("x")
    for _ in range(k):
        t = App(I, t)
    return t


def test_single_beta_step():
    assert step(App(lam("x", Var("x")), Var("y"))) == Var("y")
    r = normalize(App(lam("x", Var("x")), Var("y")))
    assert r.status == NORMAL and r.steps_used == 1 and r.term == Var("y")


def test_outermost_redex_fires_first():
    # The outer K-style redex discards the inner one in a single step.
    t = App(lam("x", Var("z")), App(I, Var("w")))
    assert step(t) == Var("z")


def test_eta_step():
    assert step(lam("x", App(Var("f"), Var("x")))) == Var("f")
    # No eta when the bound variable also occurs in the function part.
    stuck = lam("x", App(App(Var("f"), Var("x")), Var("x")))
    assert step(stuck) is None


def test_step_returns_none_on_normal_forms():
    assert step(Var("x")) is None
    assert step(lam("x", App(Var("x"), Var("y")))) is None


def test_fuel_exhaustion_is_reported():
    r = normalize(OMEGA, 50)
    assert r.status == FUEL_EXHAUSTED
    assert r.steps_used == 50


def test_normalize_is_deterministic():
    t = app(lam("f", lam("x", App(Var("f"), App(Var("f"), Var("x"))))), I, Var("y"))
    r1 = normalize(t, 100)
    r2 = normalize(t, 100)
    assert r1 == r2
    assert r1.status == NORMAL and alpha_eq(r1.term, Var("y"))


def test_conversion_shares_one_budget_across_both_sides():
    chain = identity_chain(6)
    assert conv_check(chain, Var("x"), 6) == EQUAL
    # 6 steps spent on the left leave nothing for the right-hand redex.
    assert conv_check(chain, identity_chain(1), 6) == UNDECIDED
    assert conv_check(chain, identity_chain(1), 7) == EQUAL


def test_conversion_quadruple():
    tt = lam("x", lam("y", Var("x")))
    ff = lam("x", lam("y", Var("y")))
    assert conv_check(app(tt, Var("x"), Var("y")), Var("x"), 5) == EQUAL
    assert conv_check(app(ff, Var("x1"), Var("y1")), Var("y1"), 5) == EQUAL
    assert conv_check(tt, ff, 100) == DISTINCT
    assert conv_check(OMEGA, I, 1000) == UNDECIDED


def test_no_alpha_shortcut_before_normalizing():
    # Even syntactically equal terms are normalized; an unnormalizable term
    # stays undecided against itself.
    assert conv_check(OMEGA, OMEGA, 100) == UNDECIDED


@given(term_strategy())
def test_normal_result_converts_to_its_source(t):
    r = normalize(t, 60)
    if r.status == NORMAL:
        assert conv_check(t, r.term, 61) == EQUAL


@given(affine_terms(), affine_terms())
def test_conv_check_symmetric_when_decided(t1, t2):
    fuel = 10 * (term_size(t1) + term_size(t2))
    verdict = conv_check(t1, t2, fuel)
    assert verdict in (EQUAL, DISTINCT)
    assert conv_check(t2, t1, fuel) == verdict


@given(affine_terms())
def test_affine_terms_normalize_within_their_size(t):
    r = normalize(t, term_size(t))
    assert r.status == NORMAL
    assert r.steps_used <= term_size(t)
    assert conv_check(t, t, 10 * term_size(t)) == EQUAL
