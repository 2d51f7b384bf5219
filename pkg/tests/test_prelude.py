"""The built-in signature: catalog integrity and the self-check audit."""

from __future__ import annotations

from telic.elaborate import Processor
from telic.kernel import DEFINITION, POSTULATE, PRIMITIVE
from telic.prelude import load_prelude, prelude_path, prelude_self_check

# The full catalog, frozen. Adding, removing, or renaming an entry is a
# deliberate act and must update this list.
CATALOG = (
    "Act", "AmountOf", "Atel", "AtelFull", "Atel_A", "Atel_Und", "B", "Bd",
    "BdElim", "Cul", "CulFull", "CulOrAtel", "Cul_A", "Cul_Und", "Degree",
    "El_Evt", "El_EvtA", "El_EvtUnd", "El_IA", "El_NP", "El_NPfull",
    "El_State", "El_isA", "Entity", "Evt", "EvtAmtIsNP", "EvtEntIsNP",
    "EvtFull", "Evt_A", "Evt_Und", "IANPIsNP", "IARespectsIsA", "Id",
    "IntAdj", "J", "Lift_NP", "NP", "NPIsOneNP", "NPfull", "Nat", "Occ",
    "OneNPIsNP", "Prf", "Prop", "Result", "SigmaEvt", "SigmaIsCount",
    "SigmaNP", "State", "Tel", "TelFull", "Tel_A", "Tel_Und", "U", "Und",
    "UndFull", "Units", "act_Entity", "act_NP", "act_star", "funext", "irr",
    "isA", "isArefl", "isAtrans", "isCount", "isCul", "nu", "oplus",
    "oplusPreservesIA", "plus", "quantity", "refl", "several", "und_Entity",
    "und_NP", "und_star",
)

RULE_HEADS = {"El_NP": 2, "Prf": 1, "El_Evt": 1, "CulOrAtel": 2}


def test_prelude_loads_cleanly():
    proc, reports = load_prelude()
    assert all(r.ok for r in reports), [r.render() for r in reports if not r.ok]
    assert len(reports) == 83


def test_catalog_is_exactly_as_frozen(loaded_processor):
    assert tuple(sorted(loaded_processor.kernel.sig.entries)) == CATALOG


def test_rewrite_rules_by_head(loaded_processor):
    rules = loaded_processor.kernel.sig.rules_by_head
    assert {h: len(rs) for h, rs in rules.items()} == RULE_HEADS


def test_entry_kind_counts(loaded_processor):
    kinds = [e.kind for e in loaded_processor.kernel.sig.entries.values()]
    assert kinds.count(PRIMITIVE) == 9
    assert kinds.count(POSTULATE) == 45
    assert kinds.count(DEFINITION) == 23


def test_self_check_audits_every_entry_and_rule():
    results = prelude_self_check()
    assert len(results) == len(CATALOG) + sum(RULE_HEADS.values())
    bad = [c.render() for c in results if not c.ok]
    assert not bad, bad


def test_loading_twice_is_deterministic():
    _, first = load_prelude()
    _, second = load_prelude()
    assert [r.render() for r in first] == [r.render() for r in second]


def test_prelude_path_override(tmp_path, monkeypatch):
    alt = tmp_path / "tiny.tel"
    alt.write_text("primitive Nat : Type\n")
    monkeypatch.setenv("TELIC_PRELUDE", str(alt))
    assert prelude_path() == alt
    proc, reports = load_prelude()
    assert [r.ok for r in reports] == [True]
    assert set(proc.kernel.sig.entries) == {"Nat"}


def test_prelude_loads_into_supplied_processor():
    proc = Processor()
    out, reports = load_prelude(proc)
    assert out is proc
    assert all(r.ok for r in reports)
    assert "oplus" in proc.kernel.sig.entries
