"""Core term language: de Bruijn terms and the basic syntactic operations.

Terms are immutable. Binders (Pi, Lambda, Sigma) bind exactly one variable in
their last field and carry an optional name hint that is ignored by equality,
so ``==`` on terms is alpha-equivalence. Constants are kept in head-spine form:
``Const(name, args)`` rather than nested App nodes, which makes rewrite
matching a first-order walk over ``(name, args)``. App nodes only ever have a
non-constant head once a term has been through whnf.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True, slots=True)
class Term:
    pass


@dataclass(frozen=True, slots=True)
class Var(Term):
    index: int


@dataclass(frozen=True, slots=True)
class Const(Term):
    name: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True, slots=True)
class Universe(Term):
    level: int  # 0 or 1; Universe(0) : Universe(1), no cumulativity


@dataclass(frozen=True, slots=True)
class Pi(Term):
    domain: Term
    codomain: Term  # binds one variable
    hint: str | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class Lambda(Term):
    body: Term  # binds one variable; domain comes from the checking type
    hint: str | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class App(Term):
    fn: Term
    arg: Term


@dataclass(frozen=True, slots=True)
class Sigma(Term):
    first: Term
    second: Term  # binds one variable
    hint: str | None = field(default=None, compare=False)


@dataclass(frozen=True, slots=True)
class Pair(Term):
    first: Term
    second: Term


@dataclass(frozen=True, slots=True)
class Fst(Term):
    pair: Term


@dataclass(frozen=True, slots=True)
class Snd(Term):
    pair: Term


@dataclass(frozen=True, slots=True)
class NatLit(Term):
    value: int


@dataclass(frozen=True, slots=True)
class Meta(Term):
    """Metavariable occurrence.

    The spine lists the ambient variables the hole may mention, outermost
    first; a stored solution is a term over that telescope.
    """

    id: int
    spine: tuple[Term, ...] = ()


# --- contexts ---------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class ContextEntry:
    hint: str
    type: Term


Context = tuple[ContextEntry, ...]

EMPTY_CONTEXT: Context = ()


def ctx_extend(ctx: Context, hint: str, ty: Term) -> Context:
    return ctx + (ContextEntry(hint, ty),)


def ctx_lookup(ctx: Context, index: int) -> Term:
    """Type of Var(index), shifted into the full context."""
    entry = ctx[len(ctx) - 1 - index]
    return shift(entry.type, index + 1)


# --- de Bruijn operations ----------------------------------------------------

def shift(t: Term, by: int, cutoff: int = 0) -> Term:
    """Add ``by`` to every variable index >= cutoff."""
    if by == 0:
        return t
    match t:
        case Var(index=i):
            return Var(i + by) if i >= cutoff else t
        case Const(name=n, args=args):
            return Const(n, tuple(shift(a, by, cutoff) for a in args))
        case Universe() | NatLit():
            return t
        case Pi(domain=d, codomain=c, hint=h):
            return Pi(shift(d, by, cutoff), shift(c, by, cutoff + 1), h)
        case Lambda(body=b, hint=h):
            return Lambda(shift(b, by, cutoff + 1), h)
        case App(fn=f, arg=a):
            return App(shift(f, by, cutoff), shift(a, by, cutoff))
        case Sigma(first=a, second=b, hint=h):
            return Sigma(shift(a, by, cutoff), shift(b, by, cutoff + 1), h)
        case Pair(first=a, second=b):
            return Pair(shift(a, by, cutoff), shift(b, by, cutoff))
        case Fst(pair=p):
            return Fst(shift(p, by, cutoff))
        case Snd(pair=p):
            return Snd(shift(p, by, cutoff))
        case Meta(id=m, spine=sp):
            return Meta(m, tuple(shift(s, by, cutoff) for s in sp))
    raise AssertionError(f"shift: unhandled term {t!r}")


def subst(t: Term, replacement: Term, index: int = 0) -> Term:
    """Substitute ``replacement`` for Var(index); higher indices drop by one."""
    match t:
        case Var(index=i):
            if i == index:
                return shift(replacement, index)
            return Var(i - 1) if i > index else t
        case Const(name=n, args=args):
            return Const(n, tuple(subst(a, replacement, index) for a in args))
        case Universe() | NatLit():
            return t
        case Pi(domain=d, codomain=c, hint=h):
            return Pi(subst(d, replacement, index), subst(c, replacement, index + 1), h)
        case Lambda(body=b, hint=h):
            return Lambda(subst(b, replacement, index + 1), h)
        case App(fn=f, arg=a):
            return App(subst(f, replacement, index), subst(a, replacement, index))
        case Sigma(first=a, second=b, hint=h):
            return Sigma(subst(a, replacement, index), subst(b, replacement, index + 1), h)
        case Pair(first=a, second=b):
            return Pair(subst(a, replacement, index), subst(b, replacement, index))
        case Fst(pair=p):
            return Fst(subst(p, replacement, index))
        case Snd(pair=p):
            return Snd(subst(p, replacement, index))
        case Meta(id=m, spine=sp):
            return Meta(m, tuple(subst(s, replacement, index) for s in sp))
    raise AssertionError(f"subst: unhandled term {t!r}")


def subst_many(t: Term, env: list[Term] | tuple[Term, ...], depth: int = 0) -> Term:
    """Simultaneously substitute env[j] for Var(depth + j).

    Variables above the substituted block drop by len(env). Used to
    instantiate rewrite right-hand sides and metavariable solutions, whose
    free variables are exactly 0..len(env)-1 at depth 0.
    """
    n = len(env)
    match t:
        case Var(index=i):
            if i < depth:
                return t
            if i < depth + n:
                return shift(env[i - depth], depth)
            return Var(i - n)
        case Const(name=nm, args=args):
            return Const(nm, tuple(subst_many(a, env, depth) for a in args))
        case Universe() | NatLit():
            return t
        case Pi(domain=d, codomain=c, hint=h):
            return Pi(subst_many(d, env, depth), subst_many(c, env, depth + 1), h)
        case Lambda(body=b, hint=h):
            return Lambda(subst_many(b, env, depth + 1), h)
        case App(fn=f, arg=a):
            return App(subst_many(f, env, depth), subst_many(a, env, depth))
        case Sigma(first=a, second=b, hint=h):
            return Sigma(subst_many(a, env, depth), subst_many(b, env, depth + 1), h)
        case Pair(first=a, second=b):
            return Pair(subst_many(a, env, depth), subst_many(b, env, depth))
        case Fst(pair=p):
            return Fst(subst_many(p, env, depth))
        case Snd(pair=p):
            return Snd(subst_many(p, env, depth))
        case Meta(id=m, spine=sp):
            return Meta(m, tuple(subst_many(s, env, depth) for s in sp))
    raise AssertionError(f"subst_many: unhandled term {t!r}")


def alpha_eq(t1: Term, t2: Term) -> bool:
    """Alpha-equivalence: structural equality, name hints excluded."""
    return t1 == t2


def scope_ok(t: Term, depth: int = 0) -> bool:
    """True when every free variable index is below ``depth``."""
    match t:
        case Var(index=i):
            return i < depth
        case Const(args=args):
            return all(scope_ok(a, depth) for a in args)
        case Universe() | NatLit():
            return True
        case Pi(domain=d, codomain=c):
            return scope_ok(d, depth) and scope_ok(c, depth + 1)
        case Lambda(body=b):
            return scope_ok(b, depth + 1)
        case App(fn=f, arg=a):
            return scope_ok(f, depth) and scope_ok(a, depth)
        case Sigma(first=a, second=b):
            return scope_ok(a, depth) and scope_ok(b, depth + 1)
        case Pair(first=a, second=b):
            return scope_ok(a, depth) and scope_ok(b, depth)
        case Fst(pair=p) | Snd(pair=p):
            return scope_ok(p, depth)
        case Meta(spine=sp):
            return all(scope_ok(s, depth) for s in sp)
    raise AssertionError(f"scope_ok: unhandled term {t!r}")


def free_meta_ids(t: Term, acc: set[int] | None = None) -> set[int]:
    """Collect ids of metavariable occurrences."""
    if acc is None:
        acc = set()
    match t:
        case Meta(id=m, spine=sp):
            acc.add(m)
            for s in sp:
                free_meta_ids(s, acc)
        case Var() | Universe() | NatLit():
            pass
        case Const(args=args):
            for a in args:
                free_meta_ids(a, acc)
        case Pi(domain=d, codomain=c):
            free_meta_ids(d, acc)
            free_meta_ids(c, acc)
        case Lambda(body=b):
            free_meta_ids(b, acc)
        case App(fn=f, arg=a):
            free_meta_ids(f, acc)
            free_meta_ids(a, acc)
        case Sigma(first=a, second=b):
            free_meta_ids(a, acc)
            free_meta_ids(b, acc)
        case Pair(first=a, second=b):
            free_meta_ids(a, acc)
            free_meta_ids(b, acc)
        case Fst(pair=p) | Snd(pair=p):
            free_meta_ids(p, acc)
    return acc


def const_names(t: Term, acc: set[str] | None = None) -> set[str]:
    """Collect every constant name occurring in a term."""
    if acc is None:
        acc = set()
    match t:
        case Const(name=n, args=args):
            acc.add(n)
            for a in args:
                const_names(a, acc)
        case Var() | Universe() | NatLit():
            pass
        case Pi(domain=d, codomain=c):
            const_names(d, acc)
            const_names(c, acc)
        case Lambda(body=b):
            const_names(b, acc)
        case App(fn=f, arg=a):
            const_names(f, acc)
            const_names(a, acc)
        case Sigma(first=a, second=b):
            const_names(a, acc)
            const_names(b, acc)
        case Pair(first=a, second=b):
            const_names(a, acc)
            const_names(b, acc)
        case Fst(pair=p) | Snd(pair=p):
            const_names(p, acc)
        case Meta(spine=sp):
            for s in sp:
                const_names(s, acc)
    return acc
