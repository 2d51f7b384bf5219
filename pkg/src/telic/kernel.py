"""Type-checking kernel.

Bidirectional checker over two predicative universes (Type : Type1, no
cumulativity) with Pi, Sigma, built-in Nat literals, and definitional
equality generated by beta, projections, eta (for Pi and Sigma), definition
unfolding, and user-declared rewrite rules.

Rewrite rules are directed, type-checked equations. Left-hand sides compile
to first-order patterns over a constant head: the first occurrence of each
pattern variable binds, later (elaboration-forced) occurrences match anything.
Matching weak-head-normalizes exactly the subterms it needs to inspect, so
rules fire through definitions. Rules for one head are tried in declaration
order.

Primitive computation (Bd elimination on B/U, J on refl, literal addition) is
built into whnf rather than stored as rules.

Metavariables: holes inserted by the elaborator, solved by first-order
pattern unification only; anything harder raises UnsolvedMeta. A fresh
MetaStore is installed per declaration and every meta must be solved before
the declaration's results are stored, so the signature never contains metas.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import (
    CannotInfer,
    DuplicateName,
    FuelExhausted,
    InvalidRewrite,
    NotAFunction,
    NotAPair,
    NonlinearPattern,
    RewriteHeadIsDefinition,
    RewriteTypeMismatch,
    Span,
    TypeMismatch,
    UnboundVariable,
    UniverseMismatch,
    UnknownConstant,
    UnsolvedMeta,
)
from .pretty import pretty
from .terms import (
    App,
    Const,
    Context,
    ContextEntry,
    EMPTY_CONTEXT,
    Fst,
    Lambda,
    Meta,
    NatLit,
    Pair,
    Pi,
    Sigma,
    Snd,
    Term,
    Universe,
    Var,
    alpha_eq,
    ctx_extend,
    ctx_lookup,
    free_meta_ids,
    scope_ok,
    shift,
    subst,
    subst_many,
)

DEFAULT_FUEL = 100_000

POSTULATE = "postulate"
DEFINITION = "definition"
PRIMITIVE = "primitive"

# heads the kernel computes directly
_PRIM_HEADS = frozenset({"plus", "BdElim", "J"})


# --- signature ---------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class SignatureEntry:
    name: str
    kind: str  # POSTULATE | DEFINITION | PRIMITIVE
    type: Term  # closed, checks against a universe
    body: Term | None = None  # definitions only
    implicit_mask: tuple[bool, ...] = ()
    span: Span | None = None


# --- rewrite patterns --------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Pattern:
    pass


@dataclass(frozen=True, slots=True)
class PVar(Pattern):
    slot: int


@dataclass(frozen=True, slots=True)
class PWild(Pattern):
    """Forced position: a repeat of an already-bound variable; matches anything."""


@dataclass(frozen=True, slots=True)
class PRigid(Pattern):
    name: str
    args: tuple[Pattern, ...]


@dataclass(frozen=True, slots=True)
class PPair(Pattern):
    first: Pattern
    second: Pattern


@dataclass(frozen=True, slots=True)
class PLit(Pattern):
    value: int


@dataclass(frozen=True, slots=True)
class RewriteRule:
    head: str
    patterns: tuple[Pattern, ...]
    rhs: Term  # over the telescope: Var(0) is the innermost slot
    telescope: tuple[tuple[str, Term], ...]  # (hint, type), outermost first
    lhs: Term | None = None  # the elaborated left-hand side, kept for display
    span: Span | None = None

    @property
    def nslots(self) -> int:
        return len(self.telescope)


class Signature:
    def __init__(self) -> None:
        self.entries: dict[str, SignatureEntry] = {}
        self.rules_by_head: dict[str, list[RewriteRule]] = {}

    def rule_count(self) -> int:
        return sum(len(rs) for rs in self.rules_by_head.values())

    def snapshot(self):
        return (
            list(self.entries.keys()),
            {head: len(rs) for head, rs in self.rules_by_head.items()},
        )

    def restore(self, snap) -> None:
        names, rule_lens = snap
        keep = set(names)
        for name in [n for n in self.entries if n not in keep]:
            del self.entries[name]
        for head in list(self.rules_by_head):
            n = rule_lens.get(head, 0)
            if n == 0:
                del self.rules_by_head[head]
            else:
                del self.rules_by_head[head][n:]


# --- metavariables -----------------------------------------------------------

@dataclass
class MetaEntry:
    id: int
    spine_len: int
    span: Span | None = None
    type: Term | None = None  # in creation-context coordinates
    ctx: Context | None = None
    solution: Term | None = None  # over the creation context


class MetaStore:
    def __init__(self) -> None:
        self._entries: list[MetaEntry] = []

    def fresh(self, depth: int, span: Span | None = None) -> Meta:
        mid = len(self._entries)
        self._entries.append(MetaEntry(mid, depth, span))
        return Meta(mid, tuple(Var(depth - 1 - k) for k in range(depth)))

    def entry(self, mid: int) -> MetaEntry:
        return self._entries[mid]

    def solution(self, mid: int) -> Term | None:
        if mid >= len(self._entries):
            return None
        return self._entries[mid].solution

    def unsolved(self) -> list[MetaEntry]:
        return [e for e in self._entries if e.solution is None]

    def __len__(self) -> int:
        return len(self._entries)


def _inst_solution(sol: Term, spine: tuple[Term, ...]) -> Term:
    n = len(spine)
    return subst_many(sol, [spine[n - 1 - j] for j in range(n)])


def _rename_into(t: Term, rename: dict[int, int], depth: int, hole_id: int) -> Term:
    """Transport a candidate solution from the ambient context into the hole's
    creation context, inverting the spine. Ambient variables outside the spine
    have no preimage and abort the solve."""
    match t:
        case Var(index=i):
            if i < depth:
                return t
            j = i - depth
            if j not in rename:
                raise UnsolvedMeta(
                    f"solution for hole ?{hole_id} mentions a variable the hole "
                    f"cannot see"
                )
            return Var(depth + rename[j])
        case Universe() | NatLit():
            return t
        case Const(name=n, args=args):
            return Const(n, tuple(_rename_into(a, rename, depth, hole_id) for a in args))
        case Pi(domain=d, codomain=c, hint=h):
            return Pi(
                _rename_into(d, rename, depth, hole_id),
                _rename_into(c, rename, depth + 1, hole_id),
                h,
            )
        case Lambda(body=b, hint=h):
            return Lambda(_rename_into(b, rename, depth + 1, hole_id), h)
        case App(fn=f, arg=a):
            return App(
                _rename_into(f, rename, depth, hole_id),
                _rename_into(a, rename, depth, hole_id),
            )
        case Sigma(first=a, second=b, hint=h):
            return Sigma(
                _rename_into(a, rename, depth, hole_id),
                _rename_into(b, rename, depth + 1, hole_id),
                h,
            )
        case Pair(first=a, second=b):
            return Pair(
                _rename_into(a, rename, depth, hole_id),
                _rename_into(b, rename, depth, hole_id),
            )
        case Fst(pair=p):
            return Fst(_rename_into(p, rename, depth, hole_id))
        case Snd(pair=p):
            return Snd(_rename_into(p, rename, depth, hole_id))
        case Meta(id=m, spine=sp):
            return Meta(m, tuple(_rename_into(s, rename, depth, hole_id) for s in sp))
    raise AssertionError(f"rename: unhandled term {t!r}")


def _apply_args(t: Term, args) -> Term:
    for a in args:
        if isinstance(t, Const):
            t = Const(t.name, t.args + (a,))
        else:
            t = App(t, a)
    return t


def _app_spine(t: Term) -> tuple[Term, tuple[Term, ...]]:
    """Unwind application nodes: ``f a b`` becomes ``(f, (a, b))``."""
    extras: list[Term] = []
    while isinstance(t, App):
        extras.append(t.arg)
        t = t.fn
    return t, tuple(reversed(extras))


# --- the kernel --------------------------------------------------------------

class Kernel:
    def __init__(self, fuel: int = DEFAULT_FUEL):
        self.sig = Signature()
        self.fuel_limit = fuel
        self.metas = MetaStore()
        self._steps = 0

    # - fuel -

    def reset_fuel(self) -> None:
        self._steps = 0

    def _tick(self) -> None:
        self._steps += 1
        if self._steps > self.fuel_limit:
            raise FuelExhausted(
                f"step budget of {self.fuel_limit} exhausted; a rewrite rule may "
                f"not terminate (raise --fuel to override)"
            )

    # - reduction -

    def whnf(self, t: Term, unfold: bool = True) -> Term:
        """Reduce until the head is rigid.

        Performs beta, projections of pairs, primitive computation, rewrite
        firing, and (when ``unfold``) unfolding of head definitions. Matching
        always unfolds, regardless of ``unfold``.
        """
        while True:
            self._tick()
            match t:
                case App(fn=f, arg=a):
                    f2 = self.whnf(f, unfold)
                    if isinstance(f2, Lambda):
                        t = subst(f2.body, a)
                        continue
                    if isinstance(f2, Const):
                        t = Const(f2.name, f2.args + (a,))
                        continue
                    return App(f2, a)
                case Fst(pair=p):
                    p2 = self.whnf(p, unfold)
                    if isinstance(p2, Pair):
                        t = p2.first
                        continue
                    return Fst(p2)
                case Snd(pair=p):
                    p2 = self.whnf(p, unfold)
                    if isinstance(p2, Pair):
                        t = p2.second
                        continue
                    return Snd(p2)
                case Meta(id=m, spine=sp):
                    sol = self.metas.solution(m)
                    if sol is None:
                        return t
                    t = _inst_solution(sol, sp)
                    continue
                case Const(name=n, args=args):
                    stepped = self._prim_step(n, args)
                    if stepped is not None:
                        t = stepped
                        continue
                    fired = self._try_rules(n, args)
                    if fired is not None:
                        t = fired
                        continue
                    entry = self.sig.entries.get(n)
                    if entry is not None and entry.kind == DEFINITION and unfold:
                        t = _apply_args(entry.body, args)
                        continue
                    return t
                case _:
                    return t

    def _prim_step(self, name: str, args: tuple[Term, ...]) -> Term | None:
        if name == "plus" and len(args) >= 2:
            a = self.whnf(args[0])
            b = self.whnf(args[1])
            if isinstance(a, NatLit) and isinstance(b, NatLit):
                return _apply_args(NatLit(a.value + b.value), args[2:])
        elif name == "BdElim" and len(args) >= 4:
            scrutinee = self.whnf(args[3])
            if isinstance(scrutinee, Const) and not scrutinee.args:
                if scrutinee.name == "B":
                    return _apply_args(args[1], args[4:])
                if scrutinee.name == "U":
                    return _apply_args(args[2], args[4:])
        elif name == "J" and len(args) >= 6:
            scrutinee = self.whnf(args[5])
            if isinstance(scrutinee, Const) and scrutinee.name == "refl":
                return _apply_args(args[3], args[6:])
        return None

    def _try_rules(self, head: str, args: tuple[Term, ...]) -> Term | None:
        rules = self.sig.rules_by_head.get(head)
        if not rules:
            return None
        for rule in rules:
            n = len(rule.patterns)
            if len(args) < n:
                continue
            bind: list[Term | None] = [None] * rule.nslots
            if all(self._match(p, a, bind) for p, a in zip(rule.patterns, args[:n])):
                env = [bind[rule.nslots - 1 - j] for j in range(rule.nslots)]
                return _apply_args(subst_many(rule.rhs, env), args[n:])
        return None

    def _match(self, pat: Pattern, target: Term, bind: list[Term | None]) -> bool:
        match pat:
            case PVar(slot=s):
                bind[s] = target
                return True
            case PWild():
                return True
            case PRigid(name=n, args=pargs):
                w = self.whnf(target)
                return (
                    isinstance(w, Const)
                    and w.name == n
                    and len(w.args) == len(pargs)
                    and all(self._match(p, a, bind) for p, a in zip(pargs, w.args))
                )
            case PPair(first=p1, second=p2):
                w = self.whnf(target)
                return (
                    isinstance(w, Pair)
                    and self._match(p1, w.first, bind)
                    and self._match(p2, w.second, bind)
                )
            case PLit(value=v):
                w = self.whnf(target)
                return isinstance(w, NatLit) and w.value == v
        raise AssertionError(f"unhandled pattern {pat!r}")

    def normalize(self, t: Term) -> Term:
        """Full normal form: no beta redex, pair projection, or rule lhs remains.

        Definition heads unfold down to the first argument of a neutral spine
        and stay folded below that point; rewrite matching sees through them
        either way. This keeps normal forms and error messages close to what
        the user wrote.
        """
        return self._nf(t, structural=True)

    def _nf(self, t: Term, structural: bool) -> Term:
        h = self.whnf(t, unfold=structural)
        match h:
            case Const(name=n, args=args):
                return Const(n, tuple(self._nf(a, False) for a in args))
            case Pi(domain=d, codomain=c, hint=hint):
                return Pi(self._nf(d, structural), self._nf(c, structural), hint)
            case Sigma(first=a, second=b, hint=hint):
                return Sigma(self._nf(a, structural), self._nf(b, structural), hint)
            case Lambda(body=b, hint=hint):
                return Lambda(self._nf(b, structural), hint)
            case Pair(first=a, second=b):
                return Pair(self._nf(a, structural), self._nf(b, structural))
            case App(fn=f, arg=a):
                return App(self._nf(f, False), self._nf(a, False))
            case Fst(pair=p):
                return Fst(self._nf(p, False))
            case Snd(pair=p):
                return Snd(self._nf(p, False))
            case Meta(id=m, spine=sp):
                return Meta(m, tuple(self._nf(s, False) for s in sp))
            case _:
                return h

    # - conversion / unification -

    def convertible(self, t1: Term, t2: Term, at_type: Term | None = None) -> bool:
        """Definitional equality; ``at_type`` is informational (eta is checked
        structurally, which coincides with type-directed eta here)."""
        return self._unify(t1, t2)

    def _unify(self, t1: Term, t2: Term) -> bool:
        w1 = self.whnf(t1)
        w2 = self.whnf(t2)
        if isinstance(w1, Meta) and isinstance(w2, Meta) and w1.id == w2.id:
            if len(w1.spine) == len(w2.spine) and all(
                self._unify(a, b) for a, b in zip(w1.spine, w2.spine)
            ):
                return True
            raise UnsolvedMeta(
                f"cannot reconcile two uses of hole ?{w1.id}; the solution is "
                f"not first-order"
            )
        if isinstance(w1, Meta):
            z2 = self.zonk(t2)
            return self._solve(w1, w2, preferred=z2 if isinstance(z2, Const) else None)
        if isinstance(w2, Meta):
            z1 = self.zonk(t1)
            return self._solve(w2, w1, preferred=z1 if isinstance(z1, Const) else None)
        h1, extras1 = _app_spine(w1)
        if extras1 and isinstance(h1, Meta):
            try:
                return self._solve_spine(h1, extras1, w2)
            except UnsolvedMeta:
                pass
        h2, extras2 = _app_spine(w2)
        if extras2 and isinstance(h2, Meta):
            try:
                return self._solve_spine(h2, extras2, w1)
            except UnsolvedMeta:
                pass
        match (w1, w2):
            case (Var(index=i), Var(index=j)):
                return i == j
            case (Universe(level=l1), Universe(level=l2)):
                return l1 == l2
            case (NatLit(value=v1), NatLit(value=v2)):
                return v1 == v2
            case (Const(name=n1, args=a1), Const(name=n2, args=a2)):
                return (
                    n1 == n2
                    and len(a1) == len(a2)
                    and all(self._unify(x, y) for x, y in zip(a1, a2))
                )
            case (Pi(domain=d1, codomain=c1), Pi(domain=d2, codomain=c2)):
                return self._unify(d1, d2) and self._unify(c1, c2)
            case (Sigma(first=f1, second=s1), Sigma(first=f2, second=s2)):
                return self._unify(f1, f2) and self._unify(s1, s2)
            case (Lambda(body=b1), Lambda(body=b2)):
                return self._unify(b1, b2)
            case (Lambda(body=b1), _):
                return self._unify(b1, App(shift(w2, 1), Var(0)))
            case (_, Lambda(body=b2)):
                return self._unify(App(shift(w1, 1), Var(0)), b2)
            case (Pair(first=f1, second=s1), Pair(first=f2, second=s2)):
                return self._unify(f1, f2) and self._unify(s1, s2)
            case (Pair(first=f1, second=s1), _):
                return self._unify(f1, Fst(w2)) and self._unify(s1, Snd(w2))
            case (_, Pair(first=f2, second=s2)):
                return self._unify(Fst(w1), f2) and self._unify(Snd(w1), s2)
            case (App(fn=f1, arg=a1), App(fn=f2, arg=a2)):
                return self._unify(f1, f2) and self._unify(a1, a2)
            case (Fst(pair=p1), Fst(pair=p2)):
                return self._unify(p1, p2)
            case (Snd(pair=p1), Snd(pair=p2)):
                return self._unify(p1, p2)
            case _:
                return False

    def _solve_spine(self, hole: Meta, extras: tuple[Term, ...], rhs: Term) -> bool:
        """Solve ``hole e1 .. ek = rhs`` by storing a ``k``-fold lambda.

        ``extras`` are the application arguments left of ``rhs``; together
        with the hole's own spine they must form distinct variables for the
        solution to be unique.
        """
        entry = self.metas.entry(hole.id)
        length = len(hole.spine)
        k = len(extras)
        rename: dict[int, int] = {}
        for j, s in enumerate(hole.spine):
            sw = self.whnf(s)
            if not isinstance(sw, Var) or sw.index in rename:
                raise UnsolvedMeta(
                    f"hole ?{hole.id} is applied to a non-variable spine; the "
                    f"solution is not first-order"
                )
            rename[sw.index] = k + (length - 1 - j)
        for i, e in enumerate(extras):
            ew = self.whnf(e)
            if not isinstance(ew, Var) or ew.index in rename:
                raise UnsolvedMeta(
                    f"hole ?{hole.id} is applied to repeated or non-variable "
                    f"arguments; the solution is not unique"
                )
            rename[ew.index] = k - 1 - i
        rhs = self.zonk(rhs)
        if hole.id in free_meta_ids(rhs):
            raise UnsolvedMeta(f"hole ?{hole.id} occurs in its own candidate solution")
        sol = _rename_into(rhs, rename, 0, hole.id)
        for _ in range(k):
            sol = Lambda(sol, None)
        entry.solution = sol
        return True

    def _solve(self, hole: Meta, rhs: Term, preferred: Term | None = None) -> bool:
        """Record ``rhs`` as the solution of ``hole``.

        ``preferred`` is the same term before head reduction, supplied only
        when it is a constant application; it is tried first so that
        solutions keep the folded, user-facing spelling when both spellings
        are in scope of the hole.
        """
        entry = self.metas.entry(hole.id)
        length = len(hole.spine)
        rename: dict[int, int] = {}
        for k, s in enumerate(hole.spine):
            sw = self.whnf(s)
            if not isinstance(sw, Var) or sw.index in rename:
                raise UnsolvedMeta(
                    f"hole ?{hole.id} is applied to a non-variable spine; the "
                    f"solution is not first-order"
                )
            rename[sw.index] = length - 1 - k
        candidates = [rhs] if preferred is None else [preferred, rhs]
        failure: UnsolvedMeta | None = None
        for candidate in candidates:
            candidate = self.zonk(candidate)
            if hole.id in free_meta_ids(candidate):
                failure = UnsolvedMeta(
                    f"hole ?{hole.id} occurs in its own candidate solution"
                )
                continue
            try:
                sol = _rename_into(candidate, rename, 0, hole.id)
            except UnsolvedMeta as err:
                failure = err
                continue
            entry.solution = sol
            return True
        assert failure is not None
        raise failure

    def zonk(self, t: Term) -> Term:
        """Replace solved metavariables by their solutions, recursively."""
        match t:
            case Meta(id=m, spine=sp):
                sol = self.metas.solution(m)
                zsp = tuple(self.zonk(s) for s in sp)
                if sol is None:
                    return Meta(m, zsp)
                return self.zonk(_inst_solution(sol, zsp))
            case Var() | Universe() | NatLit():
                return t
            case Const(name=n, args=args):
                return Const(n, tuple(self.zonk(a) for a in args))
            case Pi(domain=d, codomain=c, hint=h):
                return Pi(self.zonk(d), self.zonk(c), h)
            case Lambda(body=b, hint=h):
                return Lambda(self.zonk(b), h)
            case App(fn=f, arg=a):
                return App(self.zonk(f), self.zonk(a))
            case Sigma(first=a, second=b, hint=h):
                return Sigma(self.zonk(a), self.zonk(b), h)
            case Pair(first=a, second=b):
                return Pair(self.zonk(a), self.zonk(b))
            case Fst(pair=p):
                return Fst(self.zonk(p))
            case Snd(pair=p):
                return Snd(self.zonk(p))
        raise AssertionError(f"zonk: unhandled term {t!r}")

    def require_solved(self, span: Span | None = None) -> None:
        pending = self.metas.unsolved()
        if pending:
            e = pending[0]
            what = f"?{e.id}"
            if e.type is not None:
                names = [c.hint for c in (e.ctx or ())]
                what += f" : {pretty(self.zonk(e.type), self.sig, names)}"
            raise UnsolvedMeta(
                f"{len(pending)} unsolved hole(s) remain; first is {what}",
                span=e.span or span,
            )

    # - typing -

    def infer(self, ctx: Context, t: Term) -> Term:
        match t:
            case Var(index=i):
                if i < 0 or i >= len(ctx):
                    raise UnboundVariable(f"variable index {i} exceeds context depth {len(ctx)}")
                return ctx_lookup(ctx, i)
            case Const(name=n, args=args):
                entry = self.sig.entries.get(n)
                if entry is None:
                    raise UnknownConstant(f"unknown constant `{n}`")
                ty: Term = entry.type
                for a in args:
                    tw = self.whnf(ty)
                    if not isinstance(tw, Pi):
                        raise NotAFunction(
                            f"`{n}` is over-applied: `{self._show(ctx, tw)}` is not a function type"
                        )
                    self.check(ctx, a, tw.domain)
                    ty = subst(tw.codomain, a)
                return ty
            case Universe(level=0):
                return Universe(1)
            case Universe():
                raise UniverseMismatch("Type1 itself has no type")
            case Pi(domain=d, codomain=c, hint=h):
                l1 = self._type_level(ctx, d)
                l2 = self._type_level(ctx_extend(ctx, h or "x", d), c)
                return Universe(max(l1, l2))
            case Sigma(first=a, second=b, hint=h):
                l1 = self._type_level(ctx, a)
                l2 = self._type_level(ctx_extend(ctx, h or "p", a), b)
                return Universe(max(l1, l2))
            case Lambda():
                raise CannotInfer("cannot infer the type of an unannotated function")
            case App(fn=f, arg=a):
                # Reducible heads appear when a rewrite right-hand side or an
                # unfolded definition lands inside a type, so step them first.
                fw = self.whnf(f)
                if isinstance(fw, Lambda):
                    return self.infer(ctx, subst(fw.body, a))
                if isinstance(fw, Const):
                    return self.infer(ctx, Const(fw.name, fw.args + (a,)))
                tf = self.whnf(self.infer(ctx, fw))
                if not isinstance(tf, Pi):
                    raise NotAFunction(
                        f"applied term has non-function type `{self._show(ctx, tf)}`"
                    )
                self.check(ctx, a, tf.domain)
                return subst(tf.codomain, a)
            case Pair():
                raise CannotInfer("cannot infer the type of a bare pair")
            case Fst(pair=p):
                pw = self.whnf(p)
                if isinstance(pw, Pair):
                    return self.infer(ctx, pw.first)
                tp = self.whnf(self.infer(ctx, pw))
                if not isinstance(tp, Sigma):
                    raise NotAPair(
                        f"fst applied to a term of non-pair type `{self._show(ctx, tp)}`"
                    )
                return tp.first
            case Snd(pair=p):
                pw = self.whnf(p)
                if isinstance(pw, Pair):
                    return self.infer(ctx, pw.second)
                tp = self.whnf(self.infer(ctx, pw))
                if not isinstance(tp, Sigma):
                    raise NotAPair(
                        f"snd applied to a term of non-pair type `{self._show(ctx, tp)}`"
                    )
                return subst(tp.second, Fst(pw))
            case NatLit():
                if "Nat" not in self.sig.entries:
                    raise UnknownConstant("numeric literals need `Nat` declared")
                return Const("Nat")
            case Meta(id=m, spine=sp):
                entry = self.metas.entry(m)
                if entry.solution is not None:
                    return self.infer(ctx, _inst_solution(entry.solution, sp))
                if entry.type is not None:
                    return _inst_solution(entry.type, sp)
                raise CannotInfer("cannot infer the type of an unconstrained hole")
        raise AssertionError(f"infer: unhandled term {t!r}")

    def check(self, ctx: Context, t: Term, expected: Term) -> None:
        match t:
            case Lambda(body=b, hint=h):
                ew = self.whnf(expected)
                if isinstance(ew, Pi):
                    inner = ctx_extend(ctx, h or ew.hint or "x", ew.domain)
                    self.check(inner, b, ew.codomain)
                    return
                if isinstance(ew, Meta):
                    raise UnsolvedMeta(
                        "checking a function against an unsolved hole; annotate the type"
                    )
                raise TypeMismatch(
                    f"a function cannot have type `{self._show(ctx, ew)}`"
                )
            case Pair(first=a, second=b):
                ew = self.whnf(expected)
                if isinstance(ew, Sigma):
                    self.check(ctx, a, ew.first)
                    self.check(ctx, b, subst(ew.second, a))
                    return
                if isinstance(ew, Meta):
                    raise UnsolvedMeta(
                        "checking a pair against an unsolved hole; annotate the type"
                    )
                raise TypeMismatch(f"a pair cannot have type `{self._show(ctx, ew)}`")
            case Meta(id=m, spine=sp):
                entry = self.metas.entry(m)
                if entry.solution is not None:
                    self.check(ctx, _inst_solution(entry.solution, sp), expected)
                    return
                if entry.type is None:
                    entry.type = expected
                    entry.ctx = ctx
                    return
                if not self._unify(_inst_solution(entry.type, sp), expected):
                    raise TypeMismatch(
                        f"hole expects type `{self._show(ctx, entry.type)}` but "
                        f"`{self._show(ctx, expected)}` is required"
                    )
                return
            case _:
                actual = self.infer(ctx, t)
                if not self._unify(actual, expected):
                    raise TypeMismatch(
                        f"term has type `{self._show(ctx, actual)}` but "
                        f"`{self._show(ctx, expected)}` was expected"
                    )

    def check_is_type(self, ctx: Context, t: Term) -> int:
        return self._type_level(ctx, t)

    def _type_level(self, ctx: Context, t: Term) -> int:
        tw = self.whnf(t)
        if isinstance(tw, Meta) and self.metas.entry(tw.id).type is None:
            # a hole standing where a type is needed defaults to Type
            self.check(ctx, tw, Universe(0))
            return 0
        ty = self.whnf(self.infer(ctx, tw))
        if isinstance(ty, Universe):
            return ty.level
        if isinstance(ty, Meta) and self._unify(ty, Universe(0)):
            return 0
        raise UniverseMismatch(
            f"expected a type, found a term of type `{self._show(ctx, ty)}`"
        )

    def _show(self, ctx: Context, t: Term) -> str:
        names = [e.hint for e in ctx]
        try:
            return pretty(self.normalize(self.zonk(t)), self.sig, names)
        except FuelExhausted:
            return pretty(self.zonk(t), self.sig, names)

    # - declarations -

    def _require_fresh(self, name: str) -> None:
        if name in self.sig.entries:
            raise DuplicateName(f"`{name}` is already declared")

    def declare_axiom(
        self,
        name: str,
        ty: Term,
        mask: tuple[bool, ...] = (),
        kind: str = POSTULATE,
        span: Span | None = None,
    ) -> None:
        self._require_fresh(name)
        self.check_is_type(EMPTY_CONTEXT, ty)
        self.sig.entries[name] = SignatureEntry(name, kind, ty, None, mask, span)

    def declare_definition(
        self,
        name: str,
        ty: Term,
        body: Term,
        mask: tuple[bool, ...] = (),
        span: Span | None = None,
    ) -> None:
        self._require_fresh(name)
        self.check_is_type(EMPTY_CONTEXT, ty)
        self.check(EMPTY_CONTEXT, body, ty)
        self.sig.entries[name] = SignatureEntry(name, DEFINITION, ty, body, mask, span)

    def declare_rewrite(
        self,
        telescope: tuple[tuple[str, Term], ...],
        lhs: Term,
        rhs: Term,
        span: Span | None = None,
    ) -> RewriteRule:
        """Add a directed equation. The caller has already elaborated both
        sides under the telescope and checked surface linearity."""
        lw = lhs if isinstance(lhs, Const) else None
        if lw is None or not lw.args:
            raise InvalidRewrite(
                "rewrite left-hand side must be a constant applied to patterns"
            )
        entry = self.sig.entries.get(lw.name)
        if entry is None:
            raise UnknownConstant(f"unknown constant `{lw.name}`")
        if entry.kind == DEFINITION:
            raise RewriteHeadIsDefinition(
                f"rewrite head `{lw.name}` is a definition; unfold it instead"
            )
        ctx: Context = EMPTY_CONTEXT
        for hint, ty in telescope:
            self.check_is_type(ctx, ty)
            ctx = ctx_extend(ctx, hint, ty)
        lhs_ty = self.infer(ctx, lhs)
        try:
            self.check(ctx, rhs, lhs_ty)
        except TypeMismatch as e:
            raise RewriteTypeMismatch(
                f"right-hand side does not preserve the left-hand side's type: "
                f"{e.message}",
                span=e.span,
            ) from None
        nslots = len(telescope)
        bound: set[int] = set()
        patterns = tuple(self._compile_pattern(a, bound, nslots) for a in lw.args)
        missing = [telescope[s][0] for s in range(nslots) if s not in bound]
        if missing:
            raise InvalidRewrite(
                f"pattern variable(s) {', '.join(missing)} never occur on the "
                f"left-hand side"
            )
        rule = RewriteRule(lw.name, patterns, rhs, telescope, lhs, span)
        self.sig.rules_by_head.setdefault(lw.name, []).append(rule)
        return rule

    def _compile_pattern(self, t: Term, bound: set[int], nslots: int) -> Pattern:
        match t:
            case Var(index=i):
                slot = nslots - 1 - i
                if slot < 0 or slot >= nslots:
                    raise InvalidRewrite("left-hand side mentions a foreign variable")
                if slot in bound:
                    return PWild()
                bound.add(slot)
                return PVar(slot)
            case Const(name=n, args=args):
                return PRigid(n, tuple(self._compile_pattern(a, bound, nslots) for a in args))
            case Pair(first=a, second=b):
                return PPair(
                    self._compile_pattern(a, bound, nslots),
                    self._compile_pattern(b, bound, nslots),
                )
            case NatLit(value=v):
                return PLit(v)
            case _:
                raise InvalidRewrite(
                    "left-hand side patterns may only contain constants, pattern "
                    "variables, pairs, and numeric literals"
                )

    def assert_closed(self, t: Term) -> Term:
        metas = free_meta_ids(t)
        if metas:
            raise UnsolvedMeta(f"internal: holes {sorted(metas)} escaped solving")
        if not scope_ok(t, 0):
            raise UnboundVariable("internal: unbound variable escaped elaboration")
        return t
