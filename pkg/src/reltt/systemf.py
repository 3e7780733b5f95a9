"""Bridge between the relational kernel and Curry-style System F.

Four jobs live here:

  * erasure of proof terms to plain lambda terms (proof variables survive,
    everything else vanishes or becomes a standard combinator);
  * projection of relational types, contexts, and accepted proofs down to
    System F (promotions collapse to the identity type, compositions to the
    Church product);
  * a validator for explicit System F derivations (Curry-style typability is
    undecidable, so derivations in this repo are always constructed and then
    validated, never inferred);
  * the constructive embedding of a validated F derivation back into the
    relational calculus, where each typed variable x : T becomes the
    assumption x [T] x_dot against a renamed copy of itself.

`self_witness` composes projection and embedding: from any accepted proof it
manufactures a new proof whose judgment relates the erasure to its dotted
copy at the projected type.

The dotted copy uses the reserved `_dot` name suffix. Surface scripts cannot
mention such names, which is what makes the renaming an injection into
untouched territory.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .kernel import (
    PApp,
    PConv,
    PConvE,
    PConvI,
    PIota,
    PLam,
    PPair,
    PPi,
    PRho,
    PTyApp,
    PTyLam,
    PVar,
    Proof,
    RelPfNode,
    check,
    to_relpf,
)
from .reduction import DEFAULT_FUEL
from .syntax import (
    All,
    App,
    Arrow,
    Comp,
    Context,
    ContextEntry,
    Conv,
    Judgment,
    Lam,
    Promote,
    RelType,
    TBound,
    TVar,
    Term,
    Var,
    alpha_eq,
    free_vars,
    fresh,
    lam,
    open_type,
)

DOT_SUFFIX = "_dot"


def dot_name(name: str) -> str:
    return name + DOT_SUFFIX


def is_dotted(name: str) -> bool:
    return name.endswith(DOT_SUFFIX)


# ---------------------------------------------------------------------------
# System F types
# ---------------------------------------------------------------------------


class FType:
    __slots__ = ()


@dataclass(frozen=True)
class FTVar(FType):
    name: str


@dataclass(frozen=True)
class FTBound(FType):
    index: int


@dataclass(frozen=True)
class FArrow(FType):
    dom: FType
    cod: FType


@dataclass(frozen=True)
class FAll(FType):
    hint: str = field(compare=False)
    body: FType


def fall(name: str, body: FType) -> FAll:
    return FAll(name, close_ftype(body, name))


def close_ftype(t: FType, name: str, depth: int = 0) -> FType:
    match t:
        case FTVar(n):
            return FTBound(depth) if n == name else t
        case FTBound(_):
            return t
        case FArrow(d, c):
            return FArrow(close_ftype(d, name, depth), close_ftype(c, name, depth))
        case FAll(h, b):
            return FAll(h, close_ftype(b, name, depth + 1))
    raise TypeError(f"not an F type: {t!r}")


def open_ftype(body: FType, repl: FType, depth: int = 0) -> FType:
    match body:
        case FTVar(_):
            return body
        case FTBound(i):
            return repl if i == depth else body
        case FArrow(d, c):
            return FArrow(open_ftype(d, repl, depth), open_ftype(c, repl, depth))
        case FAll(h, b):
            return FAll(h, open_ftype(b, repl, depth + 1))
    raise TypeError(f"not an F type: {body!r}")


def free_ftvars(t: FType) -> set[str]:
    match t:
        case FTVar(n):
            return {n}
        case FTBound(_):
            return set()
        case FArrow(d, c):
            return free_ftvars(d) | free_ftvars(c)
        case FAll(_, b):
            return free_ftvars(b)
    raise TypeError(f"not an F type: {t!r}")


def rename_ftvars(t: FType, mapping: dict[str, str]) -> FType:
    match t:
        case FTVar(n):
            return FTVar(mapping.get(n, n))
        case FTBound(_):
            return t
        case FArrow(d, c):
            return FArrow(rename_ftvars(d, mapping), rename_ftvars(c, mapping))
        case FAll(h, b):
            return FAll(h, rename_ftvars(b, mapping))
    raise TypeError(f"not an F type: {t!r}")


# ---------------------------------------------------------------------------
# System F derivations
# ---------------------------------------------------------------------------


class FDerivation:
    __slots__ = ()


@dataclass(frozen=True)
class DVar(FDerivation):
    name: str


@dataclass(frozen=True)
class DAbs(FDerivation):
    binder: str
    ann: FType
    body: FDerivation


@dataclass(frozen=True)
class DApp(FDerivation):
    fn: FDerivation
    arg: FDerivation


@dataclass(frozen=True)
class DGen(FDerivation):
    tvar: str
    body: FDerivation


@dataclass(frozen=True)
class DInst(FDerivation):
    arg: FType
    body: FDerivation


FContext = tuple[tuple[str, FType], ...]

RULE_MISMATCH = "rule-mismatch"
UNBOUND_VARIABLE = "unbound-variable"
F_FRESHNESS_VIOLATION = "freshness-violation"
SHADOWING_VIOLATION = "shadowing-violation"
DOTTED_COLLISION = "dotted-collision"


class FError(Exception):
    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message


def _fctx_lookup(delta: FContext, name: str) -> FType | None:
    for n, t in delta:
        if n == name:
            return t
    return None


def _fctx_ftvars(delta: FContext) -> set[str]:
    out: set[str] = set()
    for _, t in delta:
        out |= free_ftvars(t)
    return out


def validate_f(delta: FContext, d: FDerivation) -> tuple[Term, FType]:
    """Check an explicit derivation rule by rule; return (subject, type)."""
    names = [n for n, _ in delta]
    if len(set(names)) != len(names):
        raise FError(F_FRESHNESS_VIOLATION, "duplicate variable in context")
    return _validate(delta, d)


def _validate(delta: FContext, d: FDerivation) -> tuple[Term, FType]:
    match d:
        case DVar(name):
            t = _fctx_lookup(delta, name)
            if t is None:
                raise FError(UNBOUND_VARIABLE, f"'{name}' is not declared")
            return Var(name), t
        case DAbs(binder, ann, body):
            if _fctx_lookup(delta, binder) is not None:
                raise FError(
                    F_FRESHNESS_VIOLATION, f"binder '{binder}' shadows a declared variable"
                )
            t, ty = _validate(delta + ((binder, ann),), body)
            return lam(binder, t), FArrow(ann, ty)
        case DApp(fn, arg):
            tf, tyf = _validate(delta, fn)
            if not isinstance(tyf, FArrow):
                raise FError(RULE_MISMATCH, "application head is not an arrow")
            ta, tya = _validate(delta, arg)
            if tya != tyf.dom:
                raise FError(RULE_MISMATCH, "argument type differs from the arrow domain")
            return App(tf, ta), tyf.cod
        case DGen(tvar, body):
            if tvar in _fctx_ftvars(delta):
                raise FError(
                    F_FRESHNESS_VIOLATION,
                    f"generalized variable '{tvar}' occurs free in the context",
                )
            t, ty = _validate(delta, body)
            return t, fall(tvar, ty)
        case DInst(arg, body):
            t, ty = _validate(delta, body)
            if not isinstance(ty, FAll):
                raise FError(RULE_MISMATCH, "instantiation head is not universal")
            return t, open_ftype(ty.body, arg)
    raise TypeError(f"not an F derivation: {d!r}")


# ---------------------------------------------------------------------------
# Erasure
# ---------------------------------------------------------------------------

_IDENTITY = lam("x", Var("x"))
_PAIR = lam("x", lam("y", lam("c", App(App(Var("c"), Var("x")), Var("y")))))


def identity_term() -> Term:
    return _IDENTITY


def pair_term() -> Term:
    return _PAIR


def erase_proof(p: Proof) -> Term:
    """The underlying lambda term of a proof; only proof variables survive."""
    match p:
        case PVar(u):
            return Var(u)
        case PLam(u, _, _, _, body):
            return lam(u, erase_proof(body))
        case PApp(fn, arg):
            return App(erase_proof(fn), erase_proof(arg))
        case PTyApp(fn, _):
            return erase_proof(fn)
        case PTyLam(_, body):
            return erase_proof(body)
        case PConv(_, body, _):
            return erase_proof(body)
        case PConvI(body) | PConvE(body):
            return erase_proof(body)
        case PIota(_, _):
            return _IDENTITY
        case PRho(_, _, _, _, body):
            return erase_proof(body)
        case PPair(left, right, _):
            return App(App(_PAIR, erase_proof(left)), erase_proof(right))
        case PPi(scrutinee, _, u, v, body):
            return App(erase_proof(scrutinee), lam(u, lam(v, erase_proof(body))))
    raise TypeError(f"not a proof: {p!r}")


# ---------------------------------------------------------------------------
# Projection
# ---------------------------------------------------------------------------


def project_type(r: RelType) -> FType:
    """Relational type down to System F: converses vanish, promotions become
    the identity type, compositions become the Church product."""
    match r:
        case TVar(n):
            return FTVar(n)
        case TBound(_):
            raise ValueError("project_type expects a locally closed type")
        case Arrow(d, c):
            return FArrow(project_type(d), project_type(c))
        case All(h, b):
            x = fresh(h or "X", free_vars(r)[1])
            inner = project_type(open_type(b, TVar(x)))
            return FAll(h, close_ftype(inner, x))
        case Conv(inner):
            return project_type(inner)
        case Comp(l, rr):
            a = project_type(l)
            b = project_type(rr)
            z = fresh("Z", free_ftvars(a) | free_ftvars(b))
            return FAll(
                "Z",
                close_ftype(FArrow(FArrow(a, FArrow(b, FTVar(z))), FTVar(z)), z),
            )
        case Promote(_):
            return fall("X", FArrow(FTVar("X"), FTVar("X")))
    raise TypeError(f"not a type: {r!r}")


def project_ctx(ctx: Context) -> FContext:
    return tuple((e.pvar, project_type(e.rel)) for e in ctx)


def rel_of_ftype(t: FType) -> RelType:
    """Inject a System F type into the relational syntax (structure-parallel,
    so indices carry over unchanged)."""
    match t:
        case FTVar(n):
            return TVar(n)
        case FTBound(i):
            return TBound(i)
        case FArrow(d, c):
            return Arrow(rel_of_ftype(d), rel_of_ftype(c))
        case FAll(h, b):
            return All(h, rel_of_ftype(b))
    raise TypeError(f"not an F type: {t!r}")


def project_derivation(
    ctx: Context, p: Proof, result: Judgment | None = None, fuel: int = DEFAULT_FUEL
) -> FDerivation:
    """Translate an accepted proof into an explicit System F derivation of
    its erasure at its projected type, one rule at a time over the
    derivation tree."""
    node = to_relpf(ctx, p, fuel)
    if result is not None and not alpha_eq(node.judgment, result):
        raise ValueError("supplied kernel result does not match the proof")
    return _project_node(project_ctx(ctx), node)


def _project_node(delta: FContext, node: RelPfNode) -> FDerivation:
    p = node.proof
    match p:
        case PVar(u):
            return DVar(u)
        case PLam(u, _, rel, _, _):
            body = _project_node(delta + ((u, project_type(rel)),), node.children[0])
            return DAbs(u, project_type(rel), body)
        case PApp(_, _):
            return DApp(
                _project_node(delta, node.children[0]),
                _project_node(delta, node.children[1]),
            )
        case PTyApp(_, rel):
            return DInst(project_type(rel), _project_node(delta, node.children[0]))
        case PTyLam(x, _):
            return DGen(x, _project_node(delta, node.children[0]))
        case PConv(_, _, _) | PConvI(_) | PConvE(_):
            return _project_node(delta, node.children[0])
        case PRho(_, _, _, _, _):
            # The rewrite's type and erasure both come from the second premise.
            return _project_node(delta, node.children[1])
        case PIota(_, _):
            return _identity_derivation(delta)
        case PPair(_, _, _):
            left, right = node.children
            a = project_type(left.judgment.rel)
            b = project_type(right.judgment.rel)
            pair_d = _pair_derivation(delta, a, b)
            return DApp(
                DApp(pair_d, _project_node(delta, left)),
                _project_node(delta, right),
            )
        case PPi(_, _, u, v, _):
            scrut, body = node.children
            comp = scrut.judgment.rel
            a = project_type(comp.left)
            b = project_type(comp.right)
            res = project_type(node.judgment.rel)
            inner_delta = delta + ((u, a), (v, b))
            return DApp(
                DInst(res, _project_node(delta, scrut)),
                DAbs(u, a, DAbs(v, b, _project_node(inner_delta, body))),
            )
    raise TypeError(f"not a proof: {p!r}")


def _identity_derivation(delta: FContext) -> FDerivation:
    """gen X. abs x:X. x, concluding the identity at its universal type."""
    x_ty = fresh("X", _fctx_ftvars(delta))
    x_tm = fresh("x", {n for n, _ in delta})
    return DGen(x_ty, DAbs(x_tm, FTVar(x_ty), DVar(x_tm)))


def _pair_derivation(delta: FContext, a: FType, b: FType) -> FDerivation:
    """The Church pair constructor typed at A -> B -> (A x B)."""
    names = {n for n, _ in delta}
    x = fresh("x", names)
    y = fresh("y", names | {x})
    c = fresh("c", names | {x, y})
    z = fresh("Z", _fctx_ftvars(delta) | free_ftvars(a) | free_ftvars(b))
    return DAbs(
        x,
        a,
        DAbs(
            y,
            b,
            DGen(
                z,
                DAbs(
                    c,
                    FArrow(a, FArrow(b, FTVar(z))),
                    DApp(DApp(DVar(c), DVar(x)), DVar(y)),
                ),
            ),
        ),
    )


# ---------------------------------------------------------------------------
# Dotted renaming and embedding
# ---------------------------------------------------------------------------


def dot_rename(t: Term) -> Term:
    """Rename every variable, free and bound, through the dotted injection."""
    _require_undotted_term(t)
    return _dot_term(t)


def _require_undotted_term(t: Term) -> None:
    match t:
        case Var(n):
            if is_dotted(n):
                raise FError(DOTTED_COLLISION, f"variable '{n}' is already dotted")
        case Lam(h, b):
            if is_dotted(h):
                raise FError(DOTTED_COLLISION, f"binder '{h}' is already dotted")
            _require_undotted_term(b)
        case App(f, a):
            _require_undotted_term(f)
            _require_undotted_term(a)
        case _:
            pass


def _dot_term(t: Term) -> Term:
    match t:
        case Var(n):
            return Var(dot_name(n))
        case Lam(h, b):
            return Lam(dot_name(h), _dot_term(b))
        case App(f, a):
            return App(_dot_term(f), _dot_term(a))
        case _:
            return t


def embed_f(delta: FContext, d: FDerivation) -> tuple[Context, Proof]:
    """Lift a validated F derivation of t : T to a relational proof of
    t [T] t_dot under the context that assumes each variable related to its
    dotted copy."""
    for name, _ in delta:
        if is_dotted(name):
            raise FError(DOTTED_COLLISION, f"context variable '{name}' is already dotted")
    _require_undotted_deriv(d)
    validate_f(delta, d)
    ctx = tuple(
        ContextEntry(name, Var(name), rel_of_ftype(ty), Var(dot_name(name)))
        for name, ty in delta
    )
    env = {name: name for name, _ in delta}
    avoid = set(env) | {dot_name(n) for n in env}
    proof = _embed(d, env, avoid)
    return ctx, proof


def _require_undotted_deriv(d: FDerivation) -> None:
    match d:
        case DVar(n):
            if is_dotted(n):
                raise FError(DOTTED_COLLISION, f"variable '{n}' is already dotted")
        case DAbs(binder, _, body):
            if is_dotted(binder):
                raise FError(DOTTED_COLLISION, f"binder '{binder}' is already dotted")
            _require_undotted_deriv(body)
        case DApp(fn, arg):
            _require_undotted_deriv(fn)
            _require_undotted_deriv(arg)
        case DGen(_, body) | DInst(_, body):
            _require_undotted_deriv(body)


def _embed(d: FDerivation, env: dict[str, str], avoid: set[str]) -> Proof:
    match d:
        case DVar(name):
            return PVar(env[name])
        case DAbs(binder, ann, body):
            u = fresh("u", avoid | {binder, dot_name(binder)})
            inner_env = dict(env)
            inner_env[binder] = u
            inner_avoid = avoid | {u, binder, dot_name(binder)}
            return PLam(
                u,
                binder,
                rel_of_ftype(ann),
                dot_name(binder),
                _embed(body, inner_env, inner_avoid),
            )
        case DApp(fn, arg):
            return PApp(_embed(fn, env, avoid), _embed(arg, env, avoid))
        case DGen(tvar, body):
            return PTyLam(tvar, _embed(body, env, avoid))
        case DInst(arg, body):
            return PTyApp(_embed(body, env, avoid), rel_of_ftype(arg))
    raise TypeError(f"not an F derivation: {d!r}")


# ---------------------------------------------------------------------------
# Weakening
# ---------------------------------------------------------------------------


def weaken_f(
    d: FDerivation, insert: tuple[str, FType], at: int, delta: FContext = ()
) -> FDerivation:
    """Re-derive under delta widened with `insert` at position `at`.

    Internal binders that would clash with the inserted name (or generalize a
    type variable the inserted type mentions) are renamed first, then the
    result is validated in the widened context.
    """
    name, ftype = insert
    if _fctx_lookup(delta, name) is not None:
        raise FError(SHADOWING_VIOLATION, f"'{name}' is already declared")
    widened = delta[:at] + (insert,) + delta[at:]
    taken = {n for n, _ in widened} | _collect_binders(d)
    renamed = _rename_clashes(d, {}, {}, {name}, free_ftvars(ftype), taken)
    validate_f(widened, renamed)
    return renamed


def _collect_binders(d: FDerivation) -> set[str]:
    match d:
        case DVar(_):
            return set()
        case DAbs(binder, _, body):
            return {binder} | _collect_binders(body)
        case DApp(fn, arg):
            return _collect_binders(fn) | _collect_binders(arg)
        case DGen(_, body) | DInst(_, body):
            return _collect_binders(body)
    raise TypeError(f"not an F derivation: {d!r}")


def _rename_clashes(
    d: FDerivation,
    term_map: dict[str, str],
    ty_map: dict[str, str],
    bad_names: set[str],
    bad_tvars: set[str],
    taken: set[str],
) -> FDerivation:
    match d:
        case DVar(name):
            return DVar(term_map.get(name, name))
        case DAbs(binder, ann, body):
            new = binder
            if binder in bad_names:
                new = fresh(binder, taken | bad_names)
                taken.add(new)
            inner = dict(term_map)
            inner[binder] = new
            return DAbs(
                new,
                rename_ftvars(ann, ty_map),
                _rename_clashes(body, inner, ty_map, bad_names, bad_tvars, taken),
            )
        case DApp(fn, arg):
            return DApp(
                _rename_clashes(fn, term_map, ty_map, bad_names, bad_tvars, taken),
                _rename_clashes(arg, term_map, ty_map, bad_names, bad_tvars, taken),
            )
        case DGen(tvar, body):
            new = tvar
            inner = dict(ty_map)
            if tvar in bad_tvars:
                new = fresh(tvar, taken | bad_tvars)
                taken.add(new)
            inner[tvar] = new
            return DGen(new, _rename_clashes(body, term_map, inner, bad_names, bad_tvars, taken))
        case DInst(arg, body):
            return DInst(
                rename_ftvars(arg, ty_map),
                _rename_clashes(body, term_map, ty_map, bad_names, bad_tvars, taken),
            )
    raise TypeError(f"not an F derivation: {d!r}")


# ---------------------------------------------------------------------------
# The self-witness composition
# ---------------------------------------------------------------------------


def self_witness(
    ctx: Context, p: Proof, fuel: int = DEFAULT_FUEL
) -> tuple[Context, Proof, Judgment]:
    """From an accepted proof, produce a proof that its erasure is related to
    the dotted copy of itself at the projected type."""
    deriv = project_derivation(ctx, p, fuel=fuel)
    delta = project_ctx(ctx)
    ctx2, q = embed_f(delta, deriv)
    judgment = check(ctx2, q, fuel)
    return ctx2, q, judgment
