"""Loading and auditing the built-in signature.

The distributed signature lives in ``data/prelude.tel`` and is processed
like any other source file. ``prelude_self_check`` re-verifies the loaded
signature from the kernel side: every entry must still be well typed, and
every rewrite rule must fire on a synthetic instance of its left-hand side
and produce something convertible with its right-hand side.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .elaborate import Processor, Report
from .errors import TelicError
from .kernel import DEFINITION, Kernel, MetaStore, POSTULATE, RewriteRule
from .terms import EMPTY_CONTEXT, Const, Term, alpha_eq, subst_many

ENV_PRELUDE = "TELIC_PRELUDE"


def prelude_path() -> Path:
    """The prelude file about to be loaded.

    Set the ``TELIC_PRELUDE`` environment variable to substitute a
    different signature (or an empty file for a bare kernel).
    """
    override = os.environ.get(ENV_PRELUDE)
    if override:
        return Path(override)
    return Path(str(resources.files("telic").joinpath("data/prelude.tel")))


def load_prelude(processor: Processor | None = None) -> tuple[Processor, list[Report]]:
    """Process the prelude into ``processor`` (a fresh one by default)."""
    proc = processor if processor is not None else Processor()
    reports = proc.process_path(str(prelude_path()))
    return proc, reports


@dataclass(frozen=True)
class CheckResult:
    label: str
    ok: bool
    detail: str = ""

    def render(self) -> str:
        mark = "ok" if self.ok else "FAIL"
        tail = f": {self.detail}" if self.detail else ""
        return f"{mark:4} {self.label}{tail}"


def _close_over(temps: list[str], t: Term) -> Term:
    """Instantiate telescope variables with scratch constants.

    ``temps`` lists the scratch names outermost first; ``Var(0)`` refers to
    the innermost slot, so the substitution environment is reversed.
    """
    env = tuple(Const(n, ()) for n in reversed(temps))
    return subst_many(t, env, 0)


def _check_rule(kernel: Kernel, rule: RewriteRule, index: int) -> CheckResult:
    label = f"rule {rule.head} #{index}"
    if rule.lhs is None:
        return CheckResult(label, False, "rule carries no left-hand side")
    snap = kernel.sig.snapshot()
    try:
        temps: list[str] = []
        for k, (hint, ty) in enumerate(rule.telescope):
            name = f"_probe_{hint}_{k}"
            kernel.declare_axiom(name, _close_over(temps, ty), kind=POSTULATE)
            temps.append(name)
        lhs = _close_over(temps, rule.lhs)
        rhs = _close_over(temps, rule.rhs)
        fired = kernel.whnf(lhs)
        if alpha_eq(fired, lhs):
            return CheckResult(label, False, "rule does not fire on a fresh instance")
        if not kernel.convertible(lhs, rhs):
            return CheckResult(label, False, "fired instance differs from right-hand side")
        return CheckResult(label, True)
    except TelicError as err:
        return CheckResult(label, False, f"[{err.code}] {err.message}")
    finally:
        kernel.sig.restore(snap)


def prelude_self_check() -> list[CheckResult]:
    """Audit the prelude, one result per entry and per rewrite rule.

    Always returns the full list; a broken entry is reported in place
    rather than aborting the audit.
    """
    proc = Processor()
    reports = proc.process_path(str(prelude_path()))
    results: list[CheckResult] = []
    for r in reports:
        if r.status != "ok":
            results.append(CheckResult(f"load {r.name or r.kind}", False, r.message))
    if results:
        return results
    kernel = proc.kernel
    for name, entry in kernel.sig.entries.items():
        kernel.metas = MetaStore()
        kernel.reset_fuel()
        try:
            kernel.check_is_type(EMPTY_CONTEXT, entry.type)
            if entry.kind == DEFINITION:
                if entry.body is None:
                    raise TelicError("definition has no body")
                kernel.check(EMPTY_CONTEXT, entry.body, entry.type)
            results.append(CheckResult(f"entry {name}", True))
        except TelicError as err:
            results.append(CheckResult(f"entry {name}", False, f"[{err.code}] {err.message}"))
    for head, rules in kernel.sig.rules_by_head.items():
        for i, rule in enumerate(rules):
            kernel.metas = MetaStore()
            kernel.reset_fuel()
            results.append(_check_rule(kernel, rule, i))
    return results
