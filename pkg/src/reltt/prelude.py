"""Derived types, datatype generators, the checked standard library, and
proof-building combinators.

The derived forms are symbolic constructors (internalized typing, conjugation,
subset, implicit product, products, sums, booleans, naturals, parametric and
inductive datatypes, recursive types) with a total, capture-avoiding expansion
into core relational types.

The generators produce the functorial map, the fold/in/rebuild constructors,
and, separately, their System F derivations. Terms exist for every
functor-shaped parameter; derivations additionally need the parameter to occur
at the right polarity. One corner of the map lemma is genuinely underivable in
Curry-style F: a quantifier chain binding directly over the bare parameter
(e.g. forall Y. X), where the map would need type
(X+ -> X-) -> (forall Y. X+) -> (forall Y. X-) and no derivation of the
identity-shaped term exists at that type. The builder reports that corner
honestly instead of inventing a derivation; everywhere else the quantifier
prefix is discharged by instantiating the quantified argument at generic
variables inside the arrow case.

`stdlib()` assembles the combinator library: each entry carries a term, its
F type, an explicit validated derivation, and the relational self-judgment
obtained by embedding that derivation and re-checking it in the kernel.

`proof_builders()` returns combinators that assemble checked proofs for the
recurring composite shapes (promotion introduction, internalized typing,
subset and implicit-product introduction, conjugation, and the boolean
discrimination example). Builders whose target appears to require rewriting
against the promotion-elimination direction are available behind the
`experimental` flag and fail with an explanation.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .analysis import PLUS, flip, polarity_holds
from .kernel import (
    KernelError,
    PApp,
    PConv,
    PConvI,
    PIota,
    PLam,
    PPair,
    PTyApp,
    PVar,
    Proof,
    check,
)
from .reduction import DEFAULT_FUEL, normalize
from .syntax import (
    All,
    App,
    Arrow,
    Comp,
    Context,
    ContextEntry,
    Conv,
    Judgment,
    Promote,
    RelType,
    TBound,
    TVar,
    Term,
    Var,
    alpha_eq,
    all_,
    free_vars,
    fresh,
    lam,
    open_type,
)
from .systemf import (
    DAbs,
    DApp,
    DGen,
    DInst,
    DVar,
    FArrow,
    FDerivation,
    FTVar,
    FType,
    close_ftype,
    embed_f,
    fall,
    free_ftvars,
    identity_term,
    open_ftype,
    pair_term,
    project_type,
    rename_ftvars,
    validate_f,
)

I_TERM = identity_term()
K_TERM = lam("x", lam("y", Var("x")))


class PreludeError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message


MALFORMED_PARAMETER = "malformed-parameter"
POLARITY_VIOLATION = "polarity-violation"
UNDERIVABLE = "underivable"
NOT_DERIVABLE = "not-derivable"
BUILDER_MISMATCH = "builder-mismatch"


# ---------------------------------------------------------------------------
# Derived forms
# ---------------------------------------------------------------------------


class DerivedForm:
    __slots__ = ()


@dataclass(frozen=True)
class IntTypeL(DerivedForm):
    """[t]R: internalized typing on the left."""

    term: Term
    rel: RelType


@dataclass(frozen=True)
class IntTypeR(DerivedForm):
    """R[t]: internalized typing on the right."""

    rel: RelType
    term: Term


@dataclass(frozen=True)
class Conj(DerivedForm):
    """t.R.t': conjugation by promoted terms."""

    left: Term
    rel: RelType
    right: Term


@dataclass(frozen=True)
class DConj(DerivedForm):
    """t..R: self-conjugation."""

    term: Term
    rel: RelType


@dataclass(frozen=True)
class Subset(DerivedForm):
    dom: RelType
    cod: RelType


@dataclass(frozen=True)
class ImpProd(DerivedForm):
    """R => R': the implicit product."""

    dom: RelType
    cod: RelType


@dataclass(frozen=True)
class RelEq(DerivedForm):
    left: RelType
    right: RelType


@dataclass(frozen=True)
class Prod(DerivedForm):
    left: RelType
    right: RelType


@dataclass(frozen=True)
class Sum(DerivedForm):
    left: RelType
    right: RelType


@dataclass(frozen=True)
class UnitForm(DerivedForm):
    pass


@dataclass(frozen=True)
class BoolForm(DerivedForm):
    pass


@dataclass(frozen=True)
class NatForm(DerivedForm):
    pass


@dataclass(frozen=True)
class DParam(DerivedForm):
    tvar: str
    rel: RelType


@dataclass(frozen=True)
class DInd(DerivedForm):
    tvar: str
    rel: RelType


@dataclass(frozen=True)
class Rec(DerivedForm):
    tvar: str
    rel: RelType


def _require_f_shaped(r: RelType, who: str) -> None:
    match r:
        case TVar(_) | TBound(_):
            return
        case Arrow(d, c):
            _require_f_shaped(d, who)
            _require_f_shaped(c, who)
        case All(_, b):
            _require_f_shaped(b, who)
        case Conv(_) | Comp(_, _) | Promote(_):
            raise PreludeError(
                MALFORMED_PARAMETER,
                f"{who} needs a System F-shaped parameter (no converse, composition, or promotion)",
            )
        case _:
            raise TypeError(f"not a type: {r!r}")


def expand(form: DerivedForm) -> RelType:
    """Total, capture-avoiding expansion into the core type syntax."""
    match form:
        case IntTypeL(t, r):
            return Comp(Promote(App(K_TERM, t)), r)
        case IntTypeR(r, t):
            return Comp(r, Conv(Promote(App(K_TERM, t))))
        case Conj(t, r, tp):
            return Comp(Promote(t), Comp(r, Conv(Promote(tp))))
        case DConj(t, r):
            return expand(Conj(t, r, t))
        case Subset(dom, cod):
            return expand(DConj(App(K_TERM, I_TERM), Arrow(dom, cod)))
        case ImpProd(dom, cod):
            return expand(DConj(K_TERM, Arrow(dom, cod)))
        case RelEq(l, r):
            return Comp(expand(Subset(l, r)), expand(Subset(r, l)))
        case Prod(l, r):
            x = fresh("X", free_vars(l)[1] | free_vars(r)[1])
            return all_(x, Arrow(Arrow(l, Arrow(r, TVar(x))), TVar(x)))
        case Sum(l, r):
            y = fresh("Y", free_vars(l)[1] | free_vars(r)[1])
            return all_(
                y, Arrow(Arrow(l, TVar(y)), Arrow(Arrow(r, TVar(y)), TVar(y)))
            )
        case UnitForm():
            return all_("X", Arrow(TVar("X"), TVar("X")))
        case BoolForm():
            return all_("X", Arrow(TVar("X"), Arrow(TVar("X"), TVar("X"))))
        case NatForm():
            return expand(DParam("X", expand(Sum(expand(UnitForm()), TVar("X")))))
        case DParam(x, r):
            _require_f_shaped(r, "the parametric datatype")
            return all_(x, Arrow(Arrow(r, TVar(x)), TVar(x)))
        case DInd(x, r):
            _require_f_shaped(r, "the inductive datatype")
            t_in = normalize(gen_in(x, r), DEFAULT_FUEL).term
            shell = expand(IntTypeL(t_in, expand(IntTypeR(Arrow(r, TVar(x)), t_in))))
            return all_(x, expand(ImpProd(shell, TVar(x))))
        case Rec(x, r):
            return all_(x, expand(ImpProd(expand(Subset(r, TVar(x))), TVar(x))))
    raise TypeError(f"not a derived form: {form!r}")


# ---------------------------------------------------------------------------
# Datatype term generators
# ---------------------------------------------------------------------------


def compose_terms(t: Term, tp: Term) -> Term:
    """t . t' = \\x. t (t' x)"""
    return lam("x", App(t, App(tp, Var("x"))))


def gen_fmap(x: str, r: RelType) -> Term:
    """The functorial map term, one equation per type constructor."""
    _require_f_shaped(r, "the functorial map")
    match r:
        case TVar(n):
            return I_TERM if n == x else App(K_TERM, I_TERM)
        case Arrow(dom, cod):
            fm_dom = gen_fmap(x, dom)
            fm_cod = gen_fmap(x, cod)
            body = compose_terms(
                compose_terms(App(fm_cod, Var("f")), Var("a")), App(fm_dom, Var("f"))
            )
            return lam("f", lam("a", body))
        case All(h, b):
            y = fresh(h or "Y", {x} | free_vars(r)[1])
            inner = gen_fmap(x, open_type(b, TVar(y)))
            return lam("f", App(inner, Var("f")))
        case TBound(_):
            raise ValueError("gen_fmap expects a locally closed type")
    raise TypeError(f"not a type: {r!r}")


def gen_fold() -> Term:
    return lam("a", lam("x", App(Var("x"), Var("a"))))


def gen_in(x: str, r: RelType) -> Term:
    _require_f_shaped(r, "the datatype constructor")
    fm = gen_fmap(x, r)
    return lam(
        "x",
        lam("a", App(Var("a"), App(App(fm, App(gen_fold(), Var("a"))), Var("x")))),
    )


def gen_rebuild(x: str, r: RelType) -> Term:
    return App(gen_fold(), gen_in(x, r))


# ---------------------------------------------------------------------------
# Datatype derivation generators
# ---------------------------------------------------------------------------


def _subst_ftvar(replacement: FType, name: str, target: FType) -> FType:
    return open_ftype(close_ftype(target, name), replacement)


def gen_fmap_deriv(
    x: str,
    r: RelType,
    p: str,
    avoid: frozenset[str] = frozenset(),
    avoid_tvars: frozenset[str] = frozenset(),
) -> FDerivation:
    """Derivation of the functorial map at
    (X+ -> X-) -> [X@p / X]R -> [X@flip(p) / X]R.

    The fresh positive/negative stand-ins are named by suffixing the
    parameter with `p` and `m`. Optional avoid sets keep the derivation's
    binders clear of an enclosing scope so it can be spliced into larger
    derivations unchanged.
    """
    _require_f_shaped(r, "the functorial map")
    if not polarity_holds(x, p, r):
        raise PreludeError(
            POLARITY_VIOLATION,
            f"'{x}' does not occur only at polarity {p} in the parameter",
        )
    tv_taken = set(avoid_tvars) | free_vars(r)[1] | {x}
    xplus = fresh(x + "p", tv_taken)
    xminus = fresh(x + "m", tv_taken | {xplus})
    return _fmap_build(x, r, p, [], xplus, xminus, set(avoid), tv_taken | {xplus, xminus})


def _forall_wrap(names: list[str], t: FType) -> FType:
    for name in reversed(names):
        t = fall(name, t)
    return t


def _fmap_build(
    x: str,
    r: RelType,
    p: str,
    prefix: list[str],
    xplus: str,
    xminus: str,
    taken: set[str],
    ty_taken: set[str],
) -> FDerivation:
    src = xplus if p == PLUS else xminus
    dst = xminus if p == PLUS else xplus
    hom = FArrow(FTVar(xplus), FTVar(xminus))

    match r:
        case TVar(n) if n == x:
            if prefix:
                raise PreludeError(
                    UNDERIVABLE,
                    "a quantifier chain binds directly over the parameter; the map "
                    "at that instance has no Curry-style derivation",
                )
            z = fresh("z", taken)
            return DAbs(z, hom, DVar(z))
        case TVar(n):
            t = _forall_wrap(prefix, FTVar(n))
            a = fresh("a", taken)
            b = fresh("b", taken | {a})
            z = fresh("z", taken | {a, b})
            kept = DAbs(a, FArrow(t, t), DAbs(b, hom, DVar(a)))
            return DApp(kept, DAbs(z, t, DVar(z)))
        case Arrow(dom, cod):
            ft_dom = project_type(dom)
            ft_cod = project_type(cod)
            a1 = rename_ftvars(ft_dom, {x: src})
            a2 = rename_ftvars(ft_cod, {x: src})
            b1 = rename_ftvars(ft_dom, {x: dst})
            b2 = rename_ftvars(ft_cod, {x: dst})
            f = fresh("f", taken)
            a = fresh("a", taken | {f})
            xa = fresh("x", taken | {f, a})
            ya = fresh("y", taken | {f, a, xa})
            inner_taken = taken | {f, a, xa, ya}
            d_dom = _fmap_build(x, dom, flip(p), [], xplus, xminus, inner_taken, ty_taken)
            d_cod = _fmap_build(x, cod, p, [], xplus, xminus, inner_taken, ty_taken)
            arg_ty = _forall_wrap(prefix, FArrow(a1, a2))
            a_inst: FDerivation = DVar(a)
            for y in prefix:
                a_inst = DInst(FTVar(y), a_inst)
            through = DAbs(
                ya,
                a1,
                DApp(DApp(d_cod, DVar(f)), DApp(a_inst, DVar(ya))),
            )
            body = DAbs(
                xa,
                b1,
                DApp(through, DApp(DApp(d_dom, DVar(f)), DVar(xa))),
            )
            for y in reversed(prefix):
                body = DGen(y, body)
            return DAbs(f, hom, DAbs(a, arg_ty, body))
        case All(h, b):
            f = fresh("f", taken)
            y = fresh(h or "Y", ty_taken)
            inner = _fmap_build(
                x,
                open_type(b, TVar(y)),
                p,
                prefix + [y],
                xplus,
                xminus,
                taken | {f},
                ty_taken | {y},
            )
            return DAbs(f, hom, DApp(inner, DVar(f)))
    raise TypeError(f"not a type: {r!r}")


def dparam_ftype(x: str, r: RelType) -> FType:
    """The parametric datatype's F type: forall X. (R -> X) -> X."""
    _require_f_shaped(r, "the parametric datatype")
    fr = project_type(r)
    return fall(x, FArrow(FArrow(fr, FTVar(x)), FTVar(x)))


def gen_fold_deriv(
    x: str,
    r: RelType,
    avoid: frozenset[str] = frozenset(),
    avoid_tvars: frozenset[str] = frozenset(),
) -> FDerivation:
    """Derivation of fold at forall X. (R -> X) -> D -> X.

    The fold is parametric in the algebra's carrier, so unlike the datatype
    constructor it needs no positivity of the parameter.
    """
    _require_f_shaped(r, "the fold")
    fr = project_type(r)
    d = dparam_ftype(x, r)
    nb = fresh(x, set(avoid_tvars))
    fr_nb = rename_ftvars(fr, {x: nb})
    a = fresh("a", set(avoid))
    xv = fresh("x", set(avoid) | {a})
    body = DApp(DInst(FTVar(nb), DVar(xv)), DVar(a))
    return DGen(nb, DAbs(a, FArrow(fr_nb, FTVar(nb)), DAbs(xv, d, body)))


def gen_in_deriv(
    x: str,
    r: RelType,
    avoid: frozenset[str] = frozenset(),
    avoid_tvars: frozenset[str] = frozenset(),
) -> FDerivation:
    """Derivation of the constructor at [D / X]R -> D."""
    _require_f_shaped(r, "the datatype constructor")
    if not polarity_holds(x, PLUS, r):
        raise PreludeError(
            POLARITY_VIOLATION,
            f"'{x}' does not occur only positively in the parameter",
        )
    fr = project_type(r)
    d = dparam_ftype(x, r)
    d_sub = _subst_ftvar(d, x, fr)

    taken = set(avoid)
    xv = fresh("x", taken)
    a = fresh("a", taken | {xv})
    inner_taken = taken | {xv, a}
    ty_taken = set(avoid_tvars) | free_vars(r)[1] | {x}

    fold_d = gen_fold_deriv(x, r, frozenset(inner_taken), frozenset(ty_taken))
    fold_at = DApp(DInst(FTVar(x), fold_d), DVar(a))

    fmap_d = gen_fmap_deriv(x, r, PLUS, frozenset(inner_taken), frozenset(ty_taken))
    xplus = fresh(x + "p", ty_taken)
    xminus = fresh(x + "m", ty_taken | {xplus})
    fmap_at = DInst(
        FTVar(x), DGen(xminus, DInst(d, DGen(xplus, fmap_d)))
    )

    body = DApp(DVar(a), DApp(DApp(fmap_at, fold_at), DVar(xv)))
    return DAbs(xv, d_sub, DGen(x, DAbs(a, FArrow(fr, FTVar(x)), body)))


# ---------------------------------------------------------------------------
# The standard library
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StdlibEntry:
    name: str
    term: Term
    ftype: FType
    derivation: FDerivation
    proof: Proof
    judgment: Judgment


def _entry(name: str, term: Term, ftype: FType, deriv: FDerivation) -> StdlibEntry:
    subject, ty = validate_f((), deriv)
    if not (alpha_eq(subject, term) and alpha_eq(ty, ftype)):
        raise RuntimeError(f"stdlib entry '{name}' does not match its derivation")
    ctx, proof = embed_f((), deriv)
    judgment = check(ctx, proof)
    return StdlibEntry(name, term, ftype, deriv, proof, judgment)


UNIT_F = fall("X", FArrow(FTVar("X"), FTVar("X")))
BOOL_F = fall("X", FArrow(FTVar("X"), FArrow(FTVar("X"), FTVar("X"))))


def _sum_f(a: FType, b: FType) -> FType:
    y = fresh("Y", free_ftvars(a) | free_ftvars(b))
    return fall(
        y, FArrow(FArrow(a, FTVar(y)), FArrow(FArrow(b, FTVar(y)), FTVar(y)))
    )


def _prod_f(a: FType, b: FType) -> FType:
    x = fresh("X", free_ftvars(a) | free_ftvars(b))
    return fall(x, FArrow(FArrow(a, FArrow(b, FTVar(x))), FTVar(x)))


NAT_R = expand(NatForm())
NAT_F = project_type(NAT_R)
SUM_ONE_NAT_F = _sum_f(UNIT_F, NAT_F)

# The open functor 1 + X, shared by the numeric entries.
_ONE_PLUS_X = expand(Sum(expand(UnitForm()), TVar("X")))

# Internal binders of generated derivations stay clear of the handful of
# names the stdlib compositions bind around them.
_STDLIB_AVOID = frozenset({"n", "m", "c", "s", "p"})


def _tt_deriv() -> FDerivation:
    return DGen("X", DAbs("x", FTVar("X"), DAbs("y", FTVar("X"), DVar("x"))))


def _ff_deriv() -> FDerivation:
    return DGen("X", DAbs("x", FTVar("X"), DAbs("y", FTVar("X"), DVar("y"))))


def _unit_deriv() -> FDerivation:
    return DGen("X", DAbs("x", FTVar("X"), DVar("x")))


def _k_deriv() -> FDerivation:
    return DGen(
        "A", DGen("B", DAbs("x", FTVar("A"), DAbs("y", FTVar("B"), DVar("x"))))
    )


def _pair_deriv() -> FDerivation:
    a, b = FTVar("A"), FTVar("B")
    inner = DAbs(
        "x",
        a,
        DAbs(
            "y",
            b,
            DGen(
                "Z",
                DAbs(
                    "c",
                    FArrow(a, FArrow(b, FTVar("Z"))),
                    DApp(DApp(DVar("c"), DVar("x")), DVar("y")),
                ),
            ),
        ),
    )
    return DGen("A", DGen("B", inner))


def _fst_deriv() -> FDerivation:
    a, b = FTVar("A"), FTVar("B")
    keep = DAbs("x", a, DAbs("y", b, DVar("x")))
    return DGen(
        "A",
        DGen("B", DAbs("p", _prod_f(a, b), DApp(DInst(a, DVar("p")), keep))),
    )


def _snd_deriv() -> FDerivation:
    a, b = FTVar("A"), FTVar("B")
    keep = DAbs("x", a, DAbs("y", b, DVar("y")))
    return DGen(
        "A",
        DGen("B", DAbs("p", _prod_f(a, b), DApp(DInst(b, DVar("p")), keep))),
    )


def _inl_deriv() -> FDerivation:
    a, b = FTVar("A"), FTVar("B")
    inner = DAbs(
        "a",
        a,
        DGen(
            "Z",
            DAbs(
                "n",
                FArrow(a, FTVar("Z")),
                DAbs("m", FArrow(b, FTVar("Z")), DApp(DVar("n"), DVar("a"))),
            ),
        ),
    )
    return DGen("A", DGen("B", inner))


def _inr_deriv() -> FDerivation:
    a, b = FTVar("A"), FTVar("B")
    inner = DAbs(
        "b",
        b,
        DGen(
            "Z",
            DAbs(
                "n",
                FArrow(a, FTVar("Z")),
                DAbs("m", FArrow(b, FTVar("Z")), DApp(DVar("m"), DVar("b"))),
            ),
        ),
    )
    return DGen("A", DGen("B", inner))


def _branches_deriv() -> FDerivation:
    a, b, z = FTVar("A"), FTVar("B"), FTVar("Z")
    inner = DAbs(
        "n",
        FArrow(a, z),
        DAbs(
            "m",
            FArrow(b, z),
            DAbs(
                "c",
                _sum_f(a, b),
                DApp(DApp(DInst(z, DVar("c")), DVar("n")), DVar("m")),
            ),
        ),
    )
    return DGen("A", DGen("B", DGen("Z", inner)))


def _inj_splice(left: bool) -> FDerivation:
    """An injection derivation with internal binders clear of the stdlib
    composition scopes, for splicing under other binders."""
    a, b = FTVar("A"), FTVar("B")
    payload = "w"
    inner = DAbs(
        payload,
        a if left else b,
        DGen(
            "Z",
            DAbs(
                "j",
                FArrow(a, FTVar("Z")),
                DAbs(
                    "k",
                    FArrow(b, FTVar("Z")),
                    DApp(DVar("j" if left else "k"), DVar(payload)),
                ),
            ),
        ),
    )
    return DGen("A", DGen("B", inner))


def _inl_at(a: FType, b: FType) -> FDerivation:
    return DInst(b, DInst(a, _inj_splice(True)))


def _inr_at(a: FType, b: FType) -> FDerivation:
    return DInst(b, DInst(a, _inj_splice(False)))


def _in_nat_deriv() -> FDerivation:
    return gen_in_deriv("X", _ONE_PLUS_X, _STDLIB_AVOID)


def _fold_nat_deriv() -> FDerivation:
    return gen_fold_deriv("X", _ONE_PLUS_X, _STDLIB_AVOID)


def _rebuild_nat_deriv() -> FDerivation:
    return DApp(DInst(NAT_F, _fold_nat_deriv()), _in_nat_deriv())


def _zero_deriv() -> FDerivation:
    seed = DApp(_inl_at(UNIT_F, NAT_F), _unit_deriv())
    return DApp(_in_nat_deriv(), seed)


def _succ_deriv() -> FDerivation:
    return DAbs(
        "s",
        NAT_F,
        DApp(_in_nat_deriv(), DApp(_inr_at(UNIT_F, NAT_F), DVar("s"))),
    )


def _add_deriv() -> FDerivation:
    k_at = DInst(UNIT_F, DInst(NAT_F, _k_deriv()))
    base = DApp(k_at, DVar("m"))
    branch = DAbs(
        "c",
        SUM_ONE_NAT_F,
        DApp(DApp(DInst(NAT_F, DVar("c")), base), _succ_deriv()),
    )
    return DAbs(
        "n",
        NAT_F,
        DAbs("m", NAT_F, DApp(DInst(NAT_F, DVar("n")), branch)),
    )


def in_nat_term() -> Term:
    return gen_in("X", _ONE_PLUS_X)


def _stdlib_terms() -> dict[str, Term]:
    inl_t = lam("a", lam("n", lam("m", App(Var("n"), Var("a")))))
    inr_t = lam("b", lam("n", lam("m", App(Var("m"), Var("b")))))
    tt = lam("x", lam("y", Var("x")))
    ff = lam("x", lam("y", Var("y")))
    fst = lam("p", App(Var("p"), tt))
    snd = lam("p", App(Var("p"), ff))
    branches = lam(
        "n", lam("m", lam("c", App(App(Var("c"), Var("n")), Var("m"))))
    )
    in_nat = in_nat_term()
    fold = gen_fold()
    succ = lam("s", App(in_nat, App(inr_t, Var("s"))))
    zero = App(in_nat, App(inl_t, I_TERM))
    add = lam(
        "n",
        lam(
            "m",
            App(
                Var("n"),
                lam("c", App(App(Var("c"), App(K_TERM, Var("m"))), succ)),
            ),
        ),
    )
    return {
        "I": I_TERM,
        "K": K_TERM,
        "unit": I_TERM,
        "tt": tt,
        "ff": ff,
        "pair": pair_term(),
        "fst": fst,
        "snd": snd,
        "inl": inl_t,
        "inr": inr_t,
        "branches": branches,
        "fold_nat": fold,
        "in_nat": in_nat,
        "rebuild_nat": gen_rebuild("X", _ONE_PLUS_X),
        "zero": zero,
        "succ": succ,
        "add": add,
    }


@lru_cache(maxsize=1)
def stdlib() -> dict[str, StdlibEntry]:
    """The checked combinator library.

    Every entry's derivation is validated, embedded into the relational
    calculus, and re-checked by the kernel; the judgment relates the term to
    its dotted copy at the entry's type.
    """
    terms = _stdlib_terms()
    a, b, z = FTVar("A"), FTVar("B"), FTVar("Z")
    id_f = fall("A", FArrow(a, a))
    k_f = fall("A", fall("B", FArrow(a, FArrow(b, a))))
    pair_f = fall("A", fall("B", FArrow(a, FArrow(b, _prod_f(a, b)))))
    fst_f = fall("A", fall("B", FArrow(_prod_f(a, b), a)))
    snd_f = fall("A", fall("B", FArrow(_prod_f(a, b), b)))
    inl_f = fall("A", fall("B", FArrow(a, _sum_f(a, b))))
    inr_f = fall("A", fall("B", FArrow(b, _sum_f(a, b))))
    branches_f = fall(
        "A",
        fall(
            "B",
            fall(
                "Z",
                FArrow(
                    FArrow(a, z), FArrow(FArrow(b, z), FArrow(_sum_f(a, b), z))
                ),
            ),
        ),
    )
    fold_f = fall(
        "X",
        FArrow(
            FArrow(project_type(_ONE_PLUS_X), FTVar("X")),
            FArrow(NAT_F, FTVar("X")),
        ),
    )
    in_f = FArrow(_subst_ftvar(NAT_F, "X", project_type(_ONE_PLUS_X)), NAT_F)
    rebuild_f = FArrow(NAT_F, NAT_F)
    nat_op = [
        ("I", id_f, DGen("A", DAbs("x", a, DVar("x")))),
        ("K", k_f, _k_deriv()),
        ("unit", UNIT_F, _unit_deriv()),
        ("tt", BOOL_F, _tt_deriv()),
        ("ff", BOOL_F, _ff_deriv()),
        ("pair", pair_f, _pair_deriv()),
        ("fst", fst_f, _fst_deriv()),
        ("snd", snd_f, _snd_deriv()),
        ("inl", inl_f, _inl_deriv()),
        ("inr", inr_f, _inr_deriv()),
        ("branches", branches_f, _branches_deriv()),
        ("fold_nat", fold_f, _fold_nat_deriv()),
        ("in_nat", in_f, _in_nat_deriv()),
        ("rebuild_nat", rebuild_f, _rebuild_nat_deriv()),
        ("zero", NAT_F, _zero_deriv()),
        ("succ", FArrow(NAT_F, NAT_F), _succ_deriv()),
        ("add", FArrow(NAT_F, FArrow(NAT_F, NAT_F)), _add_deriv()),
    ]
    return {
        name: _entry(name, terms[name], ftype, deriv) for name, ftype, deriv in nat_op
    }


def numeral(k: int) -> Term:
    """The k-th numeral as iterated successor applications on zero."""
    if k < 0:
        raise ValueError(f"numeral index must be non-negative, got {k}")
    terms = _stdlib_terms()
    t = terms["zero"]
    for _ in range(k):
        t = App(terms["succ"], t)
    return t


# ---------------------------------------------------------------------------
# Proof builders
# ---------------------------------------------------------------------------


def _checked(ctx: Context, proof: Proof, fuel: int) -> Proof:
    try:
        check(ctx, proof, fuel)
    except KernelError as e:
        raise PreludeError(
            BUILDER_MISMATCH, f"constructed proof was rejected: {e}"
        ) from e
    return proof


def promote_intro(ctx: Context, t: Term, t1: Term, q: Proof, fuel: int = DEFAULT_FUEL) -> Proof:
    """From q : (t t1) [R] t2 conclude t1 [{t} . R] t2."""
    proof = PPair(PIota(t1, t), q, App(t, t1))
    return _checked(ctx, proof, fuel)


def int_typing_l(ctx: Context, t: Term, t1: Term, q: Proof, fuel: int = DEFAULT_FUEL) -> Proof:
    """From q : t [R] t2 conclude t1 [[t]R] t2 for any t1."""
    kt = App(K_TERM, t)
    left = PConv(t1, PIota(t1, kt), t)
    proof = PPair(left, q, t)
    return _checked(ctx, proof, fuel)


def _fresh_subject_names(ctx: Context, extra: set[str]) -> tuple[str, str, str]:
    taken = free_vars(ctx)[0] | {e.pvar for e in ctx} | extra
    xl = fresh("x", taken)
    xr = fresh("y", taken | {xl})
    u = fresh("u", taken | {xl, xr})
    return xl, xr, u


def subset_intro(
    ctx: Context,
    t1: Term,
    t2: Term,
    dom: RelType,
    cod: RelType,
    transform,
    fuel: int = DEFAULT_FUEL,
) -> Proof:
    """Conclude t1 [dom subset-of cod] t2.

    `transform(pvar)` receives the name of the assumption x [dom] y and must
    return a proof whose subjects are beta-eta equal to x and y at cod.
    """
    ki = App(K_TERM, I_TERM)
    extra = free_vars(t1)[0] | free_vars(t2)[0] | free_vars(dom)[0] | free_vars(cod)[0]
    xl, xr, u = _fresh_subject_names(ctx, extra)
    lam_proof = PLam(u, xl, dom, xr, transform(u))
    mid1 = App(ki, t1)
    mid2 = App(ki, t2)
    proof = PPair(
        PIota(t1, ki),
        PPair(PConv(mid1, lam_proof, mid2), PConvI(PIota(t2, ki)), mid2),
        mid1,
    )
    proof = _checked(ctx, proof, fuel)
    want = expand(Subset(dom, cod))
    got = check(ctx, proof, fuel)
    if not alpha_eq(got.rel, want):
        raise PreludeError(BUILDER_MISMATCH, "transformer changed the target type")
    return proof


def impprod_intro(
    ctx: Context,
    t1: Term,
    t2: Term,
    dom: RelType,
    cod: RelType,
    transform,
    fuel: int = DEFAULT_FUEL,
) -> Proof:
    """Conclude t1 [dom => cod] t2; the transformer's subjects must be
    beta-eta equal to t1 and t2 themselves."""
    extra = free_vars(t1)[0] | free_vars(t2)[0] | free_vars(dom)[0] | free_vars(cod)[0]
    xl, xr, u = _fresh_subject_names(ctx, extra)
    lam_proof = PLam(u, xl, dom, xr, transform(u))
    mid1 = App(K_TERM, t1)
    mid2 = App(K_TERM, t2)
    proof = PPair(
        PIota(t1, K_TERM),
        PPair(PConv(mid1, lam_proof, mid2), PConvI(PIota(t2, K_TERM)), mid2),
        mid1,
    )
    proof = _checked(ctx, proof, fuel)
    want = expand(ImpProd(dom, cod))
    got = check(ctx, proof, fuel)
    if not alpha_eq(got.rel, want):
        raise PreludeError(BUILDER_MISMATCH, "transformer changed the target type")
    return proof


def conj_intro(ctx: Context, t: Term, tp: Term, q: Proof, fuel: int = DEFAULT_FUEL) -> Proof:
    """From q : (t a) [R] (tp b), literally applied, conclude a [t.R.tp] b."""
    j = check(ctx, q, fuel)
    if not (isinstance(j.left, App) and alpha_eq(j.left.fn, t)):
        raise PreludeError(
            BUILDER_MISMATCH, "left subject is not an application of the conjugating term"
        )
    if not (isinstance(j.right, App) and alpha_eq(j.right.fn, tp)):
        raise PreludeError(
            BUILDER_MISMATCH, "right subject is not an application of the conjugating term"
        )
    a = j.left.arg
    b = j.right.arg
    proof = PPair(
        PIota(a, t),
        PPair(q, PConvI(PIota(b, tp)), App(tp, b)),
        App(t, a),
    )
    return _checked(ctx, proof, fuel)


def bool_discrimination(r: RelType, fuel: int = DEFAULT_FUEL) -> tuple[Context, Proof]:
    """The boolean-discrimination derivation, generic in the result type:
    from assumptions that tt and ff are related booleans and two pairs of
    related subjects, conclude that the first left is related to the second
    right."""
    tt = lam("x", lam("y", Var("x")))
    ff = lam("x", lam("y", Var("y")))
    bool_r = expand(BoolForm())
    ctx = (
        ContextEntry("u", tt, bool_r, ff),
        ContextEntry("v", Var("x"), r, Var("x'")),
        ContextEntry("w", Var("y"), r, Var("y'")),
    )
    proof = PConv(
        Var("x"),
        PApp(PApp(PTyApp(PVar("u"), r), PVar("v")), PVar("w")),
        Var("y'"),
    )
    return ctx, _checked(ctx, proof, fuel)


def _not_derivable(name: str, why: str):
    def attempt(*_args, **_kwargs):
        raise PreludeError(
            NOT_DERIVABLE,
            f"{name}: {why} The promotion-elimination rule rewrites an applied "
            "promotion into its reduct, never the reverse, so the required "
            "reassembly step has no derivation in the current rule set.",
        )

    return attempt


def proof_builders(experimental: bool = False) -> dict:
    """Checked proof-producing combinators, keyed by name."""
    builders = {
        "promote_intro": promote_intro,
        "int_typing_l": int_typing_l,
        "subset_intro": subset_intro,
        "impprod_intro": impprod_intro,
        "conj_intro": conj_intro,
        "bool_discrimination": bool_discrimination,
    }
    if experimental:
        builders["subset_elim"] = _not_derivable(
            "subset_elim",
            "eliminating a subset type requires turning the opaque middle "
            "subject produced by composition elimination back into an "
            "application of the related function.",
        )
        builders["deapplication_elim"] = _not_derivable(
            "deapplication_elim",
            "recovering the argument relation from a promoted application "
            "requires rewriting toward the promotion, not from it.",
        )
    return builders
