"""Declaration processing: reports, failure isolation, imports, holes."""

from __future__ import annotations

import json

import pytest

from telic.elaborate import Processor, Report, render_reports
from telic.errors import CannotInfer, TelicError, UnsolvedMeta

BASE = """
primitive Nat : Type
primitive plus : Nat -> Nat -> Nat
postulate A : Type
postulate a0 : A
"""


def run(proc: Processor, text: str) -> list[Report]:
    return proc.process_text(BASE + text, "test.tel")


def statuses(reports: list[Report]) -> list[str]:
    return [r.status for r in reports]


# --- basics ---------------------------------------------------------------------


def test_ok_reports_for_each_declaration(bare_processor):
    reports = run(bare_processor, "def one : Nat = 1\ncheck plus one 1 : Nat")
    assert statuses(reports) == ["ok"] * 6
    assert [r.kind for r in reports] == [
        "primitive", "primitive", "postulate", "postulate", "def", "check",
    ]
    assert reports[4].name == "one"


def test_norm_report_carries_normal_form(bare_processor):
    reports = run(bare_processor, "norm plus 2 3 = 5")
    assert reports[-1].ok
    assert reports[-1].normal_form == "5"


def test_norm_mismatch_is_an_error(bare_processor):
    reports = run(bare_processor, "norm plus 2 3 = 4")
    last = reports[-1]
    assert last.status == "error" and last.code == "TypeMismatch"
    assert "normal form is `5`" in last.message


def test_norm_claim_side_is_taken_as_written(bare_processor):
    # The right-hand side is not normalized, so a reducible claim about a
    # normal left-hand side must be rejected rather than silently reduced.
    reports = run(bare_processor, "norm 5 = plus 2 3")
    assert reports[-1].status == "error"


def test_literals_without_nat_primitive(tmp_path):
    proc = Processor()
    reports = proc.process_text("norm 3 = 3", "bare.tel")
    assert reports[-1].status == "error"
    assert reports[-1].code == "UnknownConstant"


def test_unbound_name_mentions_the_name(bare_processor):
    reports = run(bare_processor, "check missing : A")
    assert reports[-1].code == "UnboundVariable"
    assert "`missing`" in reports[-1].message


def test_holes_must_be_solved(bare_processor):
    reports = run(bare_processor, "def h : Nat = _")
    assert reports[-1].code == "UnsolvedMeta"


# --- failure isolation -------------------------------------------------------------


def test_binding_failure_halts_rest_of_file(bare_processor):
    reports = run(bare_processor, "def bad : Nat = A\npostulate never : Type")
    assert reports[-1].status == "error" and reports[-1].kind == "def"
    assert all(r.name != "never" for r in reports)


def test_query_failure_continues(bare_processor):
    reports = run(bare_processor, "check a0 : Nat\npostulate later : Type")
    kinds = [(r.kind, r.status) for r in reports]
    assert ("check", "error") in kinds
    assert ("postulate", "ok") in kinds
    assert reports[-1].name == "later"


def test_expected_failure_is_ok(bare_processor):
    reports = run(bare_processor, "fail TypeMismatch check a0 : Nat")
    last = reports[-1]
    assert last.ok and last.kind == "fail"
    assert "rejected with TypeMismatch as expected" in last.message


def test_expected_failure_with_wrong_code(bare_processor):
    reports = run(bare_processor, "fail UnboundVariable check a0 : Nat")
    last = reports[-1]
    assert last.status == "error"
    assert "rejected with TypeMismatch" in last.message


def test_expected_failure_that_succeeds(bare_processor):
    reports = run(bare_processor, "fail TypeMismatch check a0 : A")
    last = reports[-1]
    assert last.status == "error"
    assert "was accepted" in last.message


def test_fail_restores_the_signature(bare_processor):
    text = """
fail TypeMismatch def ghost : A = 1
postulate ghost : A -> A
"""
    reports = run(bare_processor, text)
    assert all(r.ok for r in reports)
    assert "ghost" in bare_processor.kernel.sig.entries


def test_fail_wrapping_a_succeeding_binding_rolls_it_back(bare_processor):
    text = """
fail UnboundVariable postulate ghost : A
postulate ghost : A
"""
    reports = run(bare_processor, text)
    fail_report = reports[-2]
    assert fail_report.status == "error" and "was accepted" in fail_report.message
    # The inner postulate must not have leaked into the signature.
    assert reports[-1].ok


# --- imports -------------------------------------------------------------------------


def test_import_processes_the_target(tmp_path):
    (tmp_path / "lib.tel").write_text("primitive Nat : Type\npostulate n0 : Nat\n")
    (tmp_path / "main.tel").write_text('import "lib.tel"\ncheck n0 : Nat\n')
    proc = Processor()
    reports = proc.process_path(tmp_path / "main.tel")
    assert [r.kind for r in reports] == ["primitive", "postulate", "import", "check"]
    assert all(r.ok for r in reports)


def test_import_is_idempotent(tmp_path):
    (tmp_path / "lib.tel").write_text("primitive Nat : Type\n")
    (tmp_path / "main.tel").write_text('import "lib.tel"\nimport "lib.tel"\n')
    proc = Processor()
    reports = proc.process_path(tmp_path / "main.tel")
    assert all(r.ok for r in reports)
    assert [r.kind for r in reports].count("primitive") == 1


def test_import_missing_file(tmp_path):
    (tmp_path / "main.tel").write_text('import "gone.tel"\n')
    proc = Processor()
    reports = proc.process_path(tmp_path / "main.tel")
    assert reports[0].status == "error" and reports[0].code == "ParseError"
    assert "cannot read" in reports[0].message
    # The import declaration itself also reports the failure and halts.
    assert reports[-1].kind == "import" and reports[-1].status == "error"


def test_import_of_broken_file_halts_importer(tmp_path):
    (tmp_path / "lib.tel").write_text("postulate x : missing\n")
    (tmp_path / "main.tel").write_text('import "lib.tel"\npostulate tail : Type\n')
    proc = Processor()
    reports = proc.process_path(tmp_path / "main.tel")
    assert any(r.status == "error" for r in reports)
    assert all(r.name != "tail" for r in reports)


# --- standalone expressions -----------------------------------------------------------


def test_normalize_expression(bare_processor):
    run(bare_processor, "")
    normal, ty = bare_processor.normalize_expression("plus 2 3")
    assert (normal, ty) == ("5", "Nat")


def test_normalize_expression_of_a_universe(bare_processor):
    assert bare_processor.normalize_expression("Type") == ("Type", "Type1")


def test_normalize_expression_rejects_open_holes(bare_processor):
    run(bare_processor, "")
    # A constrained but unsolved hole surfaces as UnsolvedMeta; a bare
    # hole has nothing to infer from at all.
    with pytest.raises(UnsolvedMeta):
        bare_processor.normalize_expression("plus _ 1")
    with pytest.raises(CannotInfer):
        bare_processor.normalize_expression("_")


def test_normalize_expression_parse_errors_propagate(bare_processor):
    with pytest.raises(TelicError):
        bare_processor.normalize_expression("plus 1 )")


# --- report rendering ------------------------------------------------------------------


def test_report_render_and_json(bare_processor):
    reports = run(bare_processor, "norm plus 1 1 = 2\ncheck a0 : Nat")
    ok_norm = reports[-2]
    rendered = ok_norm.render()
    assert rendered.startswith("test.tel:")
    assert rendered.endswith("= 2")
    err = reports[-1]
    assert "[TypeMismatch]" in err.render()

    data = json.loads(ok_norm.to_json())
    assert data["normal_form"] == "2"
    assert set(data) >= {"file", "line", "col", "kind", "status"}
    assert "code" not in data


def test_render_reports_formats(bare_processor):
    reports = run(bare_processor, "check a0 : A")
    plain = render_reports(reports, "plain")
    assert plain.count("\n") == len(reports) - 1
    structured = render_reports(reports, "structured")
    for line in structured.splitlines():
        json.loads(line)
