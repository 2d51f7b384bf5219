"""Kernel behavior: reduction, conversion, typing, rewrite rules, and holes.

Every test builds its own scratch signature through the kernel API, so
nothing here depends on the prelude.
"""

from __future__ import annotations

import pytest

from telic.errors import (
    CannotInfer,
    DuplicateName,
    FuelExhausted,
    InvalidRewrite,
    NotAFunction,
    NotAPair,
    RewriteHeadIsDefinition,
    RewriteTypeMismatch,
    TypeMismatch,
    UnboundVariable,
    UniverseMismatch,
    UnknownConstant,
    UnsolvedMeta,
)
from telic.kernel import Kernel, PPair, PRigid, PVar, PWild, PRIMITIVE
from telic.terms import (
    App,
    Const,
    EMPTY_CONTEXT,
    Fst,
    Lambda,
    Meta,
    NatLit,
    Pair,
    Pi,
    Sigma,
    Snd,
    Universe,
    Var,
    shift,
)

NAT = Const("Nat")


def nat_kernel() -> Kernel:
    """A kernel that can talk about natural numbers and a few helpers."""
    k = Kernel()
    k.declare_axiom("Nat", Universe(0), kind=PRIMITIVE)
    k.declare_axiom("plus", Pi(NAT, Pi(NAT, NAT)), kind=PRIMITIVE)
    k.declare_axiom("g", Pi(NAT, NAT))
    k.declare_axiom("k0", NAT)
    k.declare_axiom("sp", Sigma(NAT, NAT))
    return k


# --- weak head reduction --------------------------------------------------------


def test_whnf_beta():
    k = Kernel()
    assert k.whnf(App(Lambda(Var(0)), NatLit(2))) == NatLit(2)


def test_whnf_projections():
    k = Kernel()
    p = Pair(NatLit(1), NatLit(2))
    assert k.whnf(Fst(p)) == NatLit(1)
    assert k.whnf(Snd(p)) == NatLit(2)


def test_whnf_collects_apps_onto_constants():
    k = nat_kernel()
    t = App(App(Const("plus"), NatLit(1)), Const("k0"))
    assert k.whnf(t) == Const("plus", (NatLit(1), Const("k0")))


def test_whnf_primitive_addition():
    k = Kernel()
    assert k.whnf(Const("plus", (NatLit(2), NatLit(3)))) == NatLit(5)
    nested = Const("plus", (Const("plus", (NatLit(1), NatLit(1))), NatLit(2)))
    assert k.whnf(nested) == NatLit(4)


def test_whnf_addition_stuck_on_neutral():
    k = nat_kernel()
    t = Const("plus", (Const("k0"), NatLit(1)))
    out = k.whnf(t)
    assert isinstance(out, Const) and out.name == "plus"


def test_whnf_boundedness_eliminator():
    k = Kernel()
    c, cb, cu = Const("C"), Const("cb"), Const("cu")
    assert k.whnf(Const("BdElim", (c, cb, cu, Const("B")))) == cb
    assert k.whnf(Const("BdElim", (c, cb, cu, Const("U")))) == cu
    applied = Const("BdElim", (c, cb, cu, Const("B"), NatLit(9)))
    assert k.whnf(applied) == Const("cb", (NatLit(9),))


def test_whnf_identity_eliminator():
    k = Kernel()
    args = (Const("A"), Const("a"), Const("motive"), Const("base"), Const("a"),
            Const("refl", (Const("A"), Const("a"))))
    assert k.whnf(Const("J", args)) == Const("base")


def test_whnf_unfolds_definitions_only_when_asked():
    k = nat_kernel()
    k.declare_definition("three", NAT, NatLit(3))
    assert k.whnf(Const("three")) == NatLit(3)
    assert k.whnf(Const("three"), unfold=False) == Const("three")


def test_normalize_keeps_definitions_folded_under_neutral_heads():
    k = nat_kernel()
    k.declare_definition("three", NAT, NatLit(3))
    assert k.normalize(Const("three")) == NatLit(3)
    # Below a stuck head the folded name is the better display form.
    assert k.normalize(Const("g", (Const("three"),))) == Const("g", (Const("three"),))


def test_fuel_exhaustion():
    k = Kernel(fuel=40)
    k.declare_axiom("Nat", Universe(0), kind=PRIMITIVE)
    k.declare_axiom("loop", Pi(NAT, NAT))
    k.declare_rewrite((("n", NAT),), Const("loop", (Var(0),)), Const("loop", (Var(0),)))
    k.reset_fuel()
    with pytest.raises(FuelExhausted):
        k.whnf(Const("loop", (NatLit(0),)))


# --- rewrite rules ---------------------------------------------------------------


def test_rewrite_fires_and_substitutes():
    k = nat_kernel()
    k.declare_axiom("f", Pi(NAT, NAT))
    k.declare_rewrite(
        (("n", NAT),),
        Const("f", (Var(0),)),
        Const("plus", (Var(0), NatLit(1))),
    )
    assert k.whnf(Const("f", (NatLit(4),))) == NatLit(5)


def test_rewrite_earlier_rule_wins():
    k = nat_kernel()
    k.declare_axiom("f", Pi(NAT, NAT))
    k.declare_rewrite((("n", NAT),), Const("f", (Var(0),)), NatLit(1))
    k.declare_rewrite((("n", NAT),), Const("f", (Var(0),)), NatLit(2))
    assert k.whnf(Const("f", (NatLit(0),))) == NatLit(1)


def test_rewrite_literal_pattern():
    k = nat_kernel()
    k.declare_axiom("f", Pi(NAT, NAT))
    k.declare_rewrite((), Const("f", (NatLit(0),)), NatLit(9))
    assert k.whnf(Const("f", (NatLit(0),))) == NatLit(9)
    out = k.whnf(Const("f", (NatLit(1),)))
    assert out == Const("f", (NatLit(1),))


def test_rewrite_pair_pattern_matches_literal_pairs_only():
    k = nat_kernel()
    k.declare_axiom("f", Pi(Sigma(NAT, NAT), NAT))
    rule = k.declare_rewrite(
        (("a", NAT), ("b", NAT)),
        Const("f", (Pair(Var(1), Var(0)),)),
        Const("plus", (Var(1), Var(0))),
    )
    # Slots index the telescope outermost-first: Var(1) is "a" (slot 0).
    assert rule.patterns == (PPair(PVar(0), PVar(1)),)
    assert k.whnf(Const("f", (Pair(NatLit(2), NatLit(3)),))) == NatLit(5)
    stuck = k.whnf(Const("f", (Const("sp"),)))
    assert stuck == Const("f", (Const("sp"),))


def test_rewrite_repeated_variable_compiles_to_forced_match():
    # The surface language rejects nonlinear rules; at the kernel level a
    # repeat is a forced position that matches anything.
    k = nat_kernel()
    k.declare_axiom("f", Pi(NAT, Pi(NAT, NAT)))
    rule = k.declare_rewrite(
        (("n", NAT),),
        Const("f", (Var(0), Var(0))),
        Var(0),
    )
    assert rule.patterns == (PVar(0), PWild())
    assert k.whnf(Const("f", (NatLit(1), NatLit(2)))) == NatLit(1)


def test_rewrite_rigid_subpattern():
    k = nat_kernel()
    k.declare_axiom("wrap", Pi(NAT, NAT))
    k.declare_axiom("f", Pi(NAT, NAT))
    rule = k.declare_rewrite(
        (("n", NAT),),
        Const("f", (Const("wrap", (Var(0),)),)),
        Var(0),
    )
    assert rule.patterns == (PRigid("wrap", (PVar(0),)),)
    assert k.whnf(Const("f", (Const("wrap", (NatLit(7),)),))) == NatLit(7)
    # The argument is reduced before matching against a rigid pattern.
    redex = App(Lambda(Const("wrap", (Var(0),))), NatLit(8))
    assert k.whnf(Const("f", (redex,))) == NatLit(8)


def test_rewrite_unbound_slot_rejected():
    k = nat_kernel()
    k.declare_axiom("f", Pi(NAT, NAT))
    with pytest.raises(InvalidRewrite):
        k.declare_rewrite(
            (("n", NAT), ("m", NAT)),
            Const("f", (Var(0),)),
            Var(0),
        )


def test_rewrite_head_must_be_constant_application():
    k = nat_kernel()
    with pytest.raises(InvalidRewrite):
        k.declare_rewrite((("n", NAT),), Var(0), Var(0))
    with pytest.raises(InvalidRewrite):
        k.declare_rewrite((), Const("g"), NatLit(0))


def test_rewrite_head_must_exist():
    k = nat_kernel()
    with pytest.raises(UnknownConstant):
        k.declare_rewrite((), Const("nope", (NatLit(0),)), NatLit(0))


def test_rewrite_head_cannot_be_definition():
    k = nat_kernel()
    k.declare_definition("d", Pi(NAT, NAT), Lambda(Var(0)))
    with pytest.raises(RewriteHeadIsDefinition):
        k.declare_rewrite((("n", NAT),), Const("d", (Var(0),)), Var(0))


def test_rewrite_rhs_must_preserve_type():
    k = nat_kernel()
    k.declare_axiom("f", Pi(NAT, NAT))
    with pytest.raises(RewriteTypeMismatch):
        k.declare_rewrite((("n", NAT),), Const("f", (Var(0),)), Universe(0))


def test_rewrite_lambda_pattern_rejected():
    k = nat_kernel()
    k.declare_axiom("f", Pi(Pi(NAT, NAT), NAT))
    with pytest.raises(InvalidRewrite):
        k.declare_rewrite((), Const("f", (Lambda(Var(0)),)), NatLit(0))


# --- eta and conversion ----------------------------------------------------------


def test_eta_for_functions():
    k = nat_kernel()
    expanded = Lambda(Const("g", (Var(0),)))
    assert k.convertible(Const("g"), expanded)
    assert k.convertible(expanded, Const("g"))
    constant_body = Lambda(Const("g", (NatLit(0),)))
    assert not k.convertible(Const("g"), constant_body)


def test_eta_for_pairs():
    k = nat_kernel()
    split = Pair(Fst(Const("sp")), Snd(Const("sp")))
    assert k.convertible(Const("sp"), split)
    assert k.convertible(split, Const("sp"))
    assert not k.convertible(Const("sp"), Pair(Fst(Const("sp")), NatLit(0)))


def test_conversion_through_reduction():
    k = nat_kernel()
    assert k.convertible(
        Const("plus", (NatLit(2), NatLit(2))),
        App(Lambda(Var(0)), NatLit(4)),
    )
    assert not k.convertible(NatLit(4), NatLit(5))


# --- universes --------------------------------------------------------------------


def test_universe_ordering():
    k = Kernel()
    assert k.infer(EMPTY_CONTEXT, Universe(0)) == Universe(1)
    with pytest.raises(UniverseMismatch):
        k.infer(EMPTY_CONTEXT, Universe(1))


def test_function_space_levels():
    k = nat_kernel()
    assert k.check_is_type(EMPTY_CONTEXT, Pi(NAT, NAT)) == 0
    assert k.check_is_type(EMPTY_CONTEXT, Pi(Universe(0), Var(0))) == 1
    assert k.check_is_type(EMPTY_CONTEXT, Sigma(Universe(0), Universe(0))) == 1


def test_no_cumulativity():
    k = nat_kernel()
    with pytest.raises(TypeMismatch):
        k.check(EMPTY_CONTEXT, NAT, Universe(1))


# --- inference and checking --------------------------------------------------------


def test_infer_constant_application():
    k = nat_kernel()
    assert k.infer(EMPTY_CONTEXT, Const("g", (NatLit(1),))) == NAT
    with pytest.raises(NotAFunction):
        k.infer(EMPTY_CONTEXT, Const("k0", (NatLit(1),)))


def test_infer_reduces_redex_heads():
    k = nat_kernel()
    assert k.infer(EMPTY_CONTEXT, App(Lambda(Var(0)), NatLit(2))) == NAT
    assert k.infer(EMPTY_CONTEXT, Fst(Pair(NatLit(1), Const("k0")))) == NAT
    assert k.infer(EMPTY_CONTEXT, Snd(Pair(Const("k0"), NatLit(1)))) == NAT


def test_infer_projections_of_neutral_pairs():
    k = nat_kernel()
    assert k.infer(EMPTY_CONTEXT, Fst(Const("sp"))) == NAT
    assert k.infer(EMPTY_CONTEXT, Snd(Const("sp"))) == NAT
    with pytest.raises(NotAPair):
        k.infer(EMPTY_CONTEXT, Fst(Const("k0")))


def test_bare_binders_cannot_be_inferred():
    k = nat_kernel()
    with pytest.raises(CannotInfer):
        k.infer(EMPTY_CONTEXT, Lambda(Var(0)))
    with pytest.raises(CannotInfer):
        k.infer(EMPTY_CONTEXT, Pair(NatLit(1), NatLit(2)))


def test_check_lambda_and_pair():
    k = nat_kernel()
    k.check(EMPTY_CONTEXT, Lambda(Var(0)), Pi(NAT, NAT))
    k.check(EMPTY_CONTEXT, Pair(NatLit(1), NatLit(2)), Sigma(NAT, NAT))
    with pytest.raises(TypeMismatch):
        k.check(EMPTY_CONTEXT, Lambda(Var(0)), NAT)
    with pytest.raises(TypeMismatch):
        k.check(EMPTY_CONTEXT, Pair(NatLit(1), NatLit(2)), NAT)


def test_literals_require_a_nat_entry():
    k = Kernel()
    with pytest.raises(UnknownConstant):
        k.infer(EMPTY_CONTEXT, NatLit(3))
    with pytest.raises(UnknownConstant):
        k.infer(EMPTY_CONTEXT, Const("nowhere"))


def test_subject_reduction_sample():
    k = nat_kernel()
    t = App(Lambda(Const("g", (Var(0),))), NatLit(3))
    assert k.convertible(k.infer(EMPTY_CONTEXT, t), k.infer(EMPTY_CONTEXT, k.whnf(t)))


def test_duplicate_names_rejected():
    k = nat_kernel()
    with pytest.raises(DuplicateName):
        k.declare_axiom("g", NAT)


def test_assert_closed():
    k = Kernel()
    with pytest.raises(UnsolvedMeta):
        k.assert_closed(k.metas.fresh(0))
    with pytest.raises(UnboundVariable):
        k.assert_closed(Var(0))
    assert k.assert_closed(NatLit(1)) == NatLit(1)


# --- metavariables ------------------------------------------------------------------


def test_meta_solves_by_unification():
    k = nat_kernel()
    m = k.metas.fresh(0)
    assert k._unify(m, NatLit(3))
    assert k.zonk(m) == NatLit(3)
    k.require_solved()


def test_meta_occurs_check():
    k = nat_kernel()
    m = k.metas.fresh(0)
    with pytest.raises(UnsolvedMeta):
        k._unify(m, Const("g", (m,)))


def test_meta_scope_check():
    k = nat_kernel()
    m = k.metas.fresh(0)
    with pytest.raises(UnsolvedMeta):
        k._unify(m, Var(0))


def test_meta_spine_inversion():
    k = nat_kernel()
    m = k.metas.fresh(2)
    assert m == Meta(0, (Var(1), Var(0)))
    assert k._unify(m, Const("pairup", (Var(0), Var(1))))
    out = k.zonk(Meta(0, (NatLit(1), NatLit(2))))
    assert out == Const("pairup", (NatLit(2), NatLit(1)))


def test_meta_repeated_spine_rejected():
    k = nat_kernel()
    k.metas.fresh(2)
    bad = Meta(0, (Var(0), Var(0)))
    with pytest.raises(UnsolvedMeta):
        k._unify(bad, NatLit(1))


def test_meta_applied_to_variable_solves_as_function():
    k = nat_kernel()
    m = k.metas.fresh(0)
    assert k._unify(App(m, Var(0)), Const("g", (Var(0),)))
    applied = k.whnf(k.zonk(App(m, NatLit(7))))
    assert applied == Const("g", (NatLit(7),))


def test_meta_applied_to_non_variable_does_not_solve():
    k = nat_kernel()
    m = k.metas.fresh(0)
    assert not k._unify(App(m, NatLit(1)), Const("g", (NatLit(1),)))


def test_require_solved_reports_pending_holes():
    k = nat_kernel()
    k.metas.fresh(0)
    with pytest.raises(UnsolvedMeta, match="1 unsolved hole"):
        k.require_solved()
