"""Elaboration and declaration processing.

Elaboration turns surface expressions into kernel terms: it resolves names
against local binders and the signature, inserts a fresh hole for every
implicit argument the user did not supply in braces, and desugars bare
`fst`/`snd` into functions. The kernel then solves the holes while checking.

Implicitness is a surface convention, not a kernel feature: every constant
remembers which of its leading arguments were declared in braces, and those
positions are filled with holes (or with braced arguments) at use sites.

Declaration processing turns each declaration into a Report. Failed bindings
(postulate, primitive, def, entail, import) stop the rest of the file, since
everything after them is likely poisoned; failed queries (check, norm, fail,
rewrite) are reported and processing continues.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    NonlinearPattern,
    ParseError,
    RewriteTypeMismatch,
    Span,
    TelicError,
    TypeMismatch,
    UnboundVariable,
)
from .kernel import Kernel, MetaStore, POSTULATE, PRIMITIVE
from .pretty import pretty
from .surface import (
    DAxiom,
    DCheck,
    DDef,
    DEntail,
    DFail,
    DImport,
    DNorm,
    DRewrite,
    Declaration,
    ParsedFile,
    SApp,
    SExpr,
    SHole,
    SLambda,
    SName,
    SNat,
    SPair,
    SPi,
    SProj,
    SSigma,
    SUniverse,
    parse_expr,
    parse_file,
)
from .terms import (
    EMPTY_CONTEXT,
    App,
    Const,
    Context,
    Fst,
    Lambda,
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
    shift,
)


# --- reports -------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Report:
    file: str
    line: int
    col: int
    kind: str  # postulate | primitive | def | rewrite | check | fail | norm | entail | import | parse
    name: str | None
    status: str  # "ok" | "error"
    code: str | None = None  # error code when status == "error"
    message: str | None = None
    normal_form: str | None = None

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_data(self) -> dict[str, object]:
        payload: dict[str, object] = {
            "file": self.file,
            "line": self.line,
            "col": self.col,
            "kind": self.kind,
            "name": self.name,
            "status": self.status,
        }
        if self.code is not None:
            payload["code"] = self.code
        if self.message is not None:
            payload["message"] = self.message
        if self.normal_form is not None:
            payload["normal_form"] = self.normal_form
        return payload

    def to_json(self) -> str:
        return json.dumps(self.to_data(), ensure_ascii=False, sort_keys=True)

    def render(self) -> str:
        head = f"{self.file}:{self.line}:{self.col}: {self.status}: {self.kind}"
        if self.name:
            head += f" {self.name}"
        if self.status == "error":
            head += f" [{self.code}]"
        if self.message:
            head += f": {self.message}"
        if self.normal_form is not None:
            head += f" = {self.normal_form}"
        return head


# --- elaboration of expressions ------------------------------------------------

class Elaborator:
    """Surface expression to kernel term, inserting implicit-argument holes."""

    def __init__(self, kernel: Kernel):
        self.kernel = kernel

    def elab(self, e: SExpr, env: list[str]) -> Term:
        match e:
            case SApp():
                head, args = self._spine(e)
                return self._application(head, args, env)
            case SName():
                return self._application(e, [], env)
            case SProj():
                return self._application(e, [], env)
            case SHole(span=sp):
                return self.kernel.metas.fresh(len(env), sp)
            case SNat(value=v):
                return NatLit(v)
            case SUniverse(level=l):
                return Universe(l)
            case SLambda(binder=b, body=body):
                return Lambda(self.elab(body, env + [b]), b)
            case SPi(binder=None, domain=d, codomain=c):
                return Pi(self.elab(d, env), shift(self.elab(c, env), 1), None)
            case SPi(binder=b, domain=d, codomain=c):
                return Pi(self.elab(d, env), self.elab(c, env + [b]), b)
            case SSigma(binder=b, first=a, second=s):
                return Sigma(self.elab(a, env), self.elab(s, env + [b]), b)
            case SPair(first=a, second=s):
                return Pair(self.elab(a, env), self.elab(s, env))
        raise AssertionError(f"elab: unhandled surface form {e!r}")

    def _spine(self, e: SExpr) -> tuple[SExpr, list[SApp]]:
        args: list[SApp] = []
        while isinstance(e, SApp):
            args.append(e)
            e = e.fn
        args.reverse()
        return e, args

    def _application(self, head: SExpr, args: list[SApp], env: list[str]) -> Term:
        match head:
            case SProj(which=w, span=sp):
                wrap = Fst if w == "fst" else Snd
                if not args:
                    return Lambda(wrap(Var(0)), "p")
                if args[0].implicit:
                    raise TypeMismatch(
                        f"`{w}` takes its argument explicitly", span=args[0].arg.span
                    )
                out: Term = wrap(self.elab(args[0].arg, env))
                return self._apply_rest(out, args[1:], env)
            case SName(name=n, span=sp):
                for depth, binder in enumerate(reversed(env)):
                    if binder == n:
                        return self._apply_rest(Var(depth), args, env)
                entry = self.kernel.sig.entries.get(n)
                if entry is None:
                    raise UnboundVariable(f"`{n}` is not in scope", span=sp)
                return self._const_application(n, entry.implicit_mask, args, env, sp)
            case _:
                return self._apply_rest(self.elab(head, env), args, env)

    def _const_application(
        self,
        name: str,
        mask: tuple[bool, ...],
        args: list[SApp],
        env: list[str],
        span: Span,
    ) -> Term:
        out_args: list[Term] = []
        i = 0
        for implicit_pos in mask:
            if implicit_pos:
                if i < len(args) and args[i].implicit:
                    out_args.append(self.elab(args[i].arg, env))
                    i += 1
                else:
                    out_args.append(self.kernel.metas.fresh(len(env), span))
            else:
                if i >= len(args):
                    break
                if args[i].implicit:
                    raise TypeMismatch(
                        f"`{name}` expects an explicit argument here, not a "
                        f"braced one",
                        span=args[i].arg.span,
                    )
                out_args.append(self.elab(args[i].arg, env))
                i += 1
        for a in args[i:]:
            if a.implicit:
                raise TypeMismatch(
                    f"`{name}` has no implicit argument left to fill",
                    span=a.arg.span,
                )
            out_args.append(self.elab(a.arg, env))
        return Const(name, tuple(out_args))

    def _apply_rest(self, fn: Term, args: list[SApp], env: list[str]) -> Term:
        for a in args:
            if a.implicit:
                raise TypeMismatch(
                    "only declared constants take braced arguments", span=a.arg.span
                )
            arg = self.elab(a.arg, env)
            if isinstance(fn, Const):
                fn = Const(fn.name, fn.args + (arg,))
            else:
                fn = App(fn, arg)
        return fn


def implicit_mask_of(ty: SExpr) -> tuple[bool, ...]:
    """Which leading function arguments of a declared type were written in
    braces. Only the outermost arrow spine counts."""
    mask: list[bool] = []
    while isinstance(ty, SPi):
        mask.append(ty.implicit)
        ty = ty.codomain
    return tuple(mask)


def _count_names(e: SExpr, counts: dict[str, int], shadowed: frozenset[str]) -> None:
    match e:
        case SName(name=n):
            if n in counts and n not in shadowed:
                counts[n] += 1
        case SApp(fn=f, arg=a):
            _count_names(f, counts, shadowed)
            _count_names(a, counts, shadowed)
        case SLambda(binder=b, body=body):
            _count_names(body, counts, shadowed | {b})
        case SPi(binder=b, domain=d, codomain=c):
            _count_names(d, counts, shadowed)
            _count_names(c, counts, shadowed | ({b} if b else frozenset()))
        case SSigma(binder=b, first=a, second=s):
            _count_names(a, counts, shadowed)
            _count_names(s, counts, shadowed | {b})
        case SPair(first=a, second=s):
            _count_names(a, counts, shadowed)
            _count_names(s, counts, shadowed)
        case _:
            pass


# --- declaration processing ------------------------------------------------------

class Processor:
    """Runs declarations against a kernel and collects reports."""

    def __init__(self, kernel: Kernel | None = None):
        self.kernel = kernel if kernel is not None else Kernel()
        self.elab = Elaborator(self.kernel)
        self._loaded: set[str] = set()

    # - entry points -

    def process_path(self, path: str | Path) -> list[Report]:
        reports: list[Report] = []
        self._load_file(Path(path), reports, via=None)
        return reports

    def process_text(
        self, text: str, filename: str = "<input>", base: Path | None = None
    ) -> list[Report]:
        reports: list[Report] = []
        parsed = parse_file(text, filename)
        self._run_parsed(parsed, reports, base or Path.cwd())
        return reports

    def normalize_expression(self, text: str, filename: str = "<expr>") -> tuple[str, str]:
        """Elaborate a closed expression and return it normalized with its type.

        Both halves come back pretty-printed; the type is shown as inferred
        rather than normalized, so signature heads stay folded.
        """
        sexpr = parse_expr(text, filename)
        self.kernel.metas = MetaStore()
        self.kernel.reset_fuel()
        t = self.elab.elab(sexpr, [])
        ty = self.kernel.infer(EMPTY_CONTEXT, t)
        self.kernel.require_solved(sexpr.span)
        t = self.kernel.assert_closed(self.kernel.zonk(t))
        ty = self.kernel.assert_closed(self.kernel.zonk(ty))
        sig = self.kernel.sig
        return pretty(self.kernel.normalize(t), sig), pretty(ty, sig)

    def _load_file(self, path: Path, reports: list[Report], via: Span | None) -> bool:
        """Parse and process one file. Returns False when the file failed in a
        way that poisons whatever imported it."""
        try:
            resolved = path.resolve()
            text = resolved.read_text(encoding="utf-8")
        except OSError as e:
            sp = via or Span(str(path), 1, 1, 1, 1)
            reports.append(
                Report(
                    sp.file,
                    sp.line,
                    sp.col,
                    "import",
                    str(path),
                    "error",
                    "ParseError",
                    f"cannot read {path}: {e.strerror or e}",
                )
            )
            return False
        if str(resolved) in self._loaded:
            return True
        self._loaded.add(str(resolved))
        parsed = parse_file(text, str(path))
        return self._run_parsed(parsed, reports, resolved.parent)

    def _run_parsed(
        self, parsed: ParsedFile, reports: list[Report], base: Path
    ) -> bool:
        ok = True
        for err in parsed.errors:
            sp = err.span or Span(parsed.filename, 1, 1, 1, 1)
            reports.append(
                Report(
                    sp.file, sp.line, sp.col, "parse", None, "error", err.code, err.message
                )
            )
            ok = False
        for decl in parsed.declarations:
            report, halt = self.run_declaration(decl, reports, base)
            reports.append(report)
            if not report.ok:
                ok = False
            if halt:
                return False
        return ok

    # - single declarations -

    _BINDING = (DAxiom, DDef, DEntail, DImport)

    def run_declaration(
        self, decl: Declaration, reports: list[Report], base: Path
    ) -> tuple[Report, bool]:
        """Returns the report plus whether the rest of the file must stop."""
        self.kernel.metas = MetaStore()
        self.kernel.reset_fuel()
        try:
            report = self._dispatch(decl, reports, base)
            return report, False
        except TelicError as e:
            e.with_span(decl.span)
            sp = e.span or decl.span
            kind, name = _describe(decl)
            report = Report(
                sp.file, sp.line, sp.col, kind, name, "error", e.code, e.message
            )
            return report, isinstance(decl, self._BINDING)

    def _dispatch(self, decl: Declaration, reports: list[Report], base: Path) -> Report:
        kind, name = _describe(decl)
        sp = decl.span
        match decl:
            case DAxiom(name=n, type=ty, primitive=prim):
                mask = implicit_mask_of(ty)
                ty_t = self.elab.elab(ty, [])
                self.kernel.check_is_type(EMPTY_CONTEXT, ty_t)
                self.kernel.require_solved(sp)
                ty_t = self.kernel.assert_closed(self.kernel.zonk(ty_t))
                self.kernel.declare_axiom(
                    n, ty_t, mask, PRIMITIVE if prim else POSTULATE, decl.name_span
                )
            case DDef(name=n, type=ty, body=body):
                mask = implicit_mask_of(ty)
                ty_t = self.elab.elab(ty, [])
                self.kernel.check_is_type(EMPTY_CONTEXT, ty_t)
                body_t = self.elab.elab(body, [])
                self.kernel.check(EMPTY_CONTEXT, body_t, ty_t)
                self.kernel.require_solved(sp)
                ty_t = self.kernel.assert_closed(self.kernel.zonk(ty_t))
                body_t = self.kernel.assert_closed(self.kernel.zonk(body_t))
                self.kernel.declare_definition(n, ty_t, body_t, mask, decl.name_span)
            case DEntail(name=n, hypothesis=hyp, conclusion=concl, witness=wit):
                hyp_t = self.elab.elab(hyp, [])
                self.kernel.check_is_type(EMPTY_CONTEXT, hyp_t)
                concl_t = self.elab.elab(concl, [])
                self.kernel.check_is_type(EMPTY_CONTEXT, concl_t)
                ty_t = Pi(hyp_t, shift(concl_t, 1), None)
                wit_t = self.elab.elab(wit, [])
                self.kernel.check(EMPTY_CONTEXT, wit_t, ty_t)
                self.kernel.require_solved(sp)
                ty_t = self.kernel.assert_closed(self.kernel.zonk(ty_t))
                wit_t = self.kernel.assert_closed(self.kernel.zonk(wit_t))
                self.kernel.declare_definition(n, ty_t, wit_t, (), decl.name_span)
            case DCheck(term=tm, type=ty):
                ty_t = self.elab.elab(ty, [])
                self.kernel.check_is_type(EMPTY_CONTEXT, ty_t)
                tm_t = self.elab.elab(tm, [])
                self.kernel.check(EMPTY_CONTEXT, tm_t, ty_t)
                self.kernel.require_solved(sp)
            case DNorm(lhs=lhs, rhs=rhs):
                got, want = self._run_norm(lhs, rhs, sp)
                if not alpha_eq(got, want):
                    raise TypeMismatch(
                        f"normal form is `{pretty(got, self.kernel.sig)}` but the "
                        f"declaration claims `{pretty(want, self.kernel.sig)}`",
                        span=sp,
                    )
                return Report(
                    sp.file,
                    sp.line,
                    sp.col,
                    kind,
                    name,
                    "ok",
                    normal_form=pretty(got, self.kernel.sig),
                )
            case DRewrite(telescope=tele, lhs=lhs, rhs=rhs):
                self._run_rewrite(tele, lhs, rhs, sp)
            case DFail(code=code, inner=inner):
                return self._run_fail(code, inner, sp, reports, base)
            case DImport(path=rel):
                ok = self._load_file(base / rel, reports, sp)
                if not ok:
                    raise ParseError(f"import of {rel} failed", span=sp)
            case _:
                raise AssertionError(f"unhandled declaration {decl!r}")
        return Report(sp.file, sp.line, sp.col, kind, name, "ok")

    def _run_norm(self, lhs: SExpr, rhs: SExpr, sp: Span) -> tuple[Term, Term]:
        lhs_t = self.elab.elab(lhs, [])
        lhs_ty = self.kernel.infer(EMPTY_CONTEXT, lhs_t)
        rhs_t = self.elab.elab(rhs, [])
        self.kernel.check(EMPTY_CONTEXT, rhs_t, lhs_ty)
        self.kernel.require_solved(sp)
        lhs_t = self.kernel.assert_closed(self.kernel.zonk(lhs_t))
        rhs_t = self.kernel.assert_closed(self.kernel.zonk(rhs_t))
        return self.kernel.normalize(lhs_t), rhs_t

    def _run_rewrite(
        self,
        tele: tuple[tuple[str, SExpr, Span], ...],
        lhs: SExpr,
        rhs: SExpr,
        sp: Span,
    ) -> None:
        counts = {nm: 0 for nm, _, _ in tele}
        _count_names(lhs, counts, frozenset())
        repeated = [nm for nm, c in counts.items() if c > 1]
        if repeated:
            raise NonlinearPattern(
                f"pattern variable `{repeated[0]}` occurs {counts[repeated[0]]} "
                f"times on the left-hand side; patterns must be linear",
                span=lhs.span,
            )
        env: list[str] = []
        tele_terms: list[tuple[str, Term]] = []
        ctx: Context = EMPTY_CONTEXT
        for nm, ty, nm_span in tele:
            ty_t = self.elab.elab(ty, env)
            self.kernel.check_is_type(ctx, ty_t)
            tele_terms.append((nm, ty_t))
            ctx = ctx_extend(ctx, nm, ty_t)
            env.append(nm)
        lhs_t = self.elab.elab(lhs, env)
        lhs_ty = self.kernel.infer(ctx, lhs_t)
        rhs_t = self.elab.elab(rhs, env)
        try:
            self.kernel.check(ctx, rhs_t, lhs_ty)
        except TypeMismatch as e:
            raise RewriteTypeMismatch(
                f"right-hand side does not preserve the left-hand side's type: "
                f"{e.message}",
                span=e.span,
            ) from None
        self.kernel.require_solved(sp)
        zonked_tele = tuple(
            (nm, self.kernel.zonk(ty_t)) for nm, ty_t in tele_terms
        )
        self.kernel.declare_rewrite(
            zonked_tele, self.kernel.zonk(lhs_t), self.kernel.zonk(rhs_t), sp
        )

    def _run_fail(
        self,
        code: str,
        inner: Declaration,
        sp: Span,
        reports: list[Report],
        base: Path,
    ) -> Report:
        snap = self.kernel.sig.snapshot()
        loaded_snap = set(self._loaded)
        inner_kind, inner_name = _describe(inner)
        label = inner_kind + (f" {inner_name}" if inner_name else "")
        scratch: list[Report] = []
        try:
            self._dispatch(inner, scratch, base)
        except TelicError as e:
            self.kernel.sig.restore(snap)
            self._loaded = loaded_snap
            if e.code == code:
                return Report(
                    sp.file,
                    sp.line,
                    sp.col,
                    "fail",
                    inner_name,
                    "ok",
                    message=f"{label} rejected with {code} as expected",
                )
            raise TypeMismatch(
                f"expected {code} but {label} was rejected with {e.code}: {e.message}",
                span=e.span or sp,
            ) from None
        self.kernel.sig.restore(snap)
        self._loaded = loaded_snap
        raise TypeMismatch(
            f"expected {code} but {label} was accepted", span=sp
        )


def _describe(decl: Declaration) -> tuple[str, str | None]:
    match decl:
        case DAxiom(name=n, primitive=prim):
            return ("primitive" if prim else "postulate", n)
        case DDef(name=n):
            return ("def", n)
        case DEntail(name=n):
            return ("entail", n)
        case DCheck():
            return ("check", None)
        case DNorm():
            return ("norm", None)
        case DRewrite():
            return ("rewrite", None)
        case DFail():
            return ("fail", None)
        case DImport(path=p):
            return ("import", p)
    return ("declaration", None)


def render_reports(reports: list[Report], fmt: str = "plain") -> str:
    if fmt == "structured":
        return "\n".join(r.to_json() for r in reports)
    return "\n".join(r.render() for r in reports)
