"""Test-side transformations over proof terms.

`map_free_terms` pushes a term substitution through every embedded term and
type while respecting the binders proofs introduce. `rename_binders` produces
a systematic alpha-variant of a proof by suffixing every binder it introduces.
Both exist to probe kernel determinism; the package itself never rewrites
proofs this way.
"""

from __future__ import annotations

from reltt.kernel import (
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
)
from reltt.syntax import (
    RelType,
    Term,
    TVar,
    Var,
    subst_term_multi,
    subst_terms_in_type,
    subst_tvar,
)


def _drop(sigma: dict[str, Term], names: tuple[str, ...]) -> dict[str, Term]:
    if not any(n in sigma for n in names):
        return sigma
    return {k: v for k, v in sigma.items() if k not in names}


def map_free_terms(p: Proof, sigma: dict[str, Term]) -> Proof:
    """Apply a free-variable term substitution throughout a proof."""
    t = lambda term: subst_term_multi(sigma, term)
    r = lambda rel: subst_terms_in_type(sigma, rel)
    match p:
        case PVar(_):
            return p
        case PLam(pv, sl, rel, sr, body):
            inner = _drop(sigma, (sl, sr))
            return PLam(pv, sl, r(rel), sr, map_free_terms(body, inner))
        case PApp(fn, arg):
            return PApp(map_free_terms(fn, sigma), map_free_terms(arg, sigma))
        case PTyApp(fn, rel):
            return PTyApp(map_free_terms(fn, sigma), r(rel))
        case PTyLam(tv, body):
            return PTyLam(tv, map_free_terms(body, sigma))
        case PConv(left, body, right):
            return PConv(t(left), map_free_terms(body, sigma), t(right))
        case PConvI(body):
            return PConvI(map_free_terms(body, sigma))
        case PConvE(body):
            return PConvE(map_free_terms(body, sigma))
        case PIota(left, promoted):
            return PIota(t(left), t(promoted))
        case PRho(gv, gl, gr, eq, body):
            guard = _drop(sigma, (gv,))
            return PRho(
                gv,
                subst_term_multi(guard, gl),
                subst_term_multi(guard, gr),
                map_free_terms(eq, sigma),
                map_free_terms(body, sigma),
            )
        case PPair(left, right, mid):
            return PPair(map_free_terms(left, sigma), map_free_terms(right, sigma), t(mid))
        case PPi(scrut, mid, pl, pr, body):
            return PPi(
                map_free_terms(scrut, sigma),
                mid,
                pl,
                pr,
                map_free_terms(body, _drop(sigma, (mid,))),
            )
    raise TypeError(f"not a proof: {p!r}")


def rename_binders(p: Proof, suffix: str) -> Proof:
    """Suffix every binder the proof introduces, renaming occurrences in scope."""
    return _rename(p, suffix, {}, {}, {})


def _apply_types(rel: RelType, terms: dict[str, Term], types: dict[str, RelType]) -> RelType:
    rel = subst_terms_in_type(terms, rel)
    for name, repl in types.items():
        rel = subst_tvar(repl, name, rel)
    return rel


def _rename(
    p: Proof,
    sfx: str,
    pvars: dict[str, str],
    terms: dict[str, Term],
    types: dict[str, RelType],
) -> Proof:
    t = lambda term: subst_term_multi(terms, term)
    r = lambda rel: _apply_types(rel, terms, types)
    match p:
        case PVar(u):
            return PVar(pvars.get(u, u))
        case PLam(pv, sl, rel, sr, body):
            pv2, sl2, sr2 = pv + sfx, sl + sfx, sr + sfx
            inner_p = {**pvars, pv: pv2}
            inner_t = {**terms, sl: Var(sl2), sr: Var(sr2)}
            return PLam(pv2, sl2, r(rel), sr2, _rename(body, sfx, inner_p, inner_t, types))
        case PApp(fn, arg):
            return PApp(_rename(fn, sfx, pvars, terms, types), _rename(arg, sfx, pvars, terms, types))
        case PTyApp(fn, rel):
            return PTyApp(_rename(fn, sfx, pvars, terms, types), r(rel))
        case PTyLam(tv, body):
            tv2 = tv + sfx
            inner = {**types, tv: TVar(tv2)}
            return PTyLam(tv2, _rename(body, sfx, pvars, terms, inner))
        case PConv(left, body, right):
            return PConv(t(left), _rename(body, sfx, pvars, terms, types), t(right))
        case PConvI(body):
            return PConvI(_rename(body, sfx, pvars, terms, types))
        case PConvE(body):
            return PConvE(_rename(body, sfx, pvars, terms, types))
        case PIota(left, promoted):
            return PIota(t(left), t(promoted))
        case PRho(gv, gl, gr, eq, body):
            gv2 = gv + sfx
            guide = {**terms, gv: Var(gv2)}
            return PRho(
                gv2,
                subst_term_multi(guide, gl),
                subst_term_multi(guide, gr),
                _rename(eq, sfx, pvars, terms, types),
                _rename(body, sfx, pvars, terms, types),
            )
        case PPair(left, right, mid):
            return PPair(
                _rename(left, sfx, pvars, terms, types),
                _rename(right, sfx, pvars, terms, types),
                t(mid),
            )
        case PPi(scrut, mid, pl, pr, body):
            mid2, pl2, pr2 = mid + sfx, pl + sfx, pr + sfx
            inner_p = {**pvars, pl: pl2, pr: pr2}
            inner_t = {**terms, mid: Var(mid2)}
            return PPi(
                _rename(scrut, sfx, pvars, terms, types),
                mid2,
                pl2,
                pr2,
                _rename(body, sfx, inner_p, inner_t, types),
            )
    raise TypeError(f"not a proof: {p!r}")
