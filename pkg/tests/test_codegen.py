import pytest

from conftest import CORPUS
from eropc.codegen import (
    ConfigError,
    DEFAULT_LOOKUP,
    LookupKeyError,
    LookupTable,
    bo_global_name,
    constraint_expr,
    emit_declarations,
    emit_rule,
    load_lookup,
    render_file,
    rop_var_name,
    split_conditional_rule,
    translate,
)
from eropc.ir import (
    AddOrRemAction,
    EventMatchCondition,
    HistoricalConstraint,
    IfStatement,
    IrRule,
    NegatedConjunction,
    OutcomeConstraint,
    OutcomeSet,
    ResetAction,
    RopConstraint,
    TimeDirectComparison,
    TimePartialComparison,
)
from eropc.sema import SymbolTable

EVENT = EventMatchCondition("BUYREQ", "buyer", "store", "success")

CASE_TABLE = SymbolTable(
    role_players=["buyer", "seller", "store"],
    business_ops=["BuyRequest", "Payment", "BuyConfirm", "BuyReject", "Cancellation"],
    comp_obligs={"ReactToBuyRequest": ["BuyConfirm", "BuyReject"]},
)


@pytest.mark.parametrize(
    "name,expected",
    [("BuyRequest", "buyRequest"), ("Payment", "payment"), ("X", "x")],
)
def test_bo_global_name(name, expected):
    assert bo_global_name(name) == expected


@pytest.mark.parametrize(
    "player,expected",
    [("buyer", "ropBuyer"), ("seller", "ropSeller"), ("a", "ropA")],
)
def test_rop_var_name(player, expected):
    assert rop_var_name(player) == expected


def test_load_lookup_override():
    table = load_lookup("rop.remove.right = removeRight\n")
    assert table.resolve("rop.remove.right") == "removeRight"
    table = load_lookup("rop.matches.rights = matchesRights")
    assert table.resolve("rop.matches.rights") == "matchesRights"


def test_load_lookup_empty_keeps_defaults():
    table = load_lookup("")
    assert table.entries == DEFAULT_LOOKUP


def test_load_lookup_comments_and_blanks():
    table = load_lookup("# comment\n\nreset = wipe  # trailing\n")
    assert table.resolve("reset") == "wipe"
    assert table.resolve("bizfail.get") == "getBusinessFailure"


def test_load_lookup_malformed_line():
    with pytest.raises(ConfigError):
        load_lookup("reset wipe\n")


def test_load_lookup_duplicate_key():
    with pytest.raises(ConfigError):
        load_lookup("reset = wipe\nreset = clear\n")


def test_missing_lookup_key_is_reported():
    table = LookupTable(entries={})
    rule = IrRule("R", EVENT, (RopConstraint("buyer", "rights", "BuyRequest"),), ())
    with pytest.raises(LookupKeyError) as exc:
        emit_rule(rule, table, CASE_TABLE)
    assert exc.value.key == "rop.matches.rights"


# --- conditional splitting ---


def conditional_rule(else_actions):
    body = IfStatement(
        cond=(OutcomeConstraint("BuyRequest", False),),
        then_actions=(OutcomeSet("BuyRequest", True),),
        else_actions=else_actions,
    )
    return IrRule(
        name="BuyRequestBnessFailure",
        event=EventMatchCondition("BUYREQ", "buyer", "store", "tecFail"),
        constraints=(RopConstraint("buyer", "rights", "BuyRequest"),),
        actions=(body,),
    )


def test_split_if_else_makes_two_rules():
    out = split_conditional_rule(conditional_rule((ResetAction("buyer"), ResetAction("seller"))))
    assert [r.name for r in out] == ["BuyRequestBnessFailureIfThen", "BuyRequestBnessFailureIfElse"]
    then_rule, else_rule = out
    # if-condition first, the rule's own constraints after it
    assert then_rule.constraints == (
        OutcomeConstraint("BuyRequest", False),
        RopConstraint("buyer", "rights", "BuyRequest"),
    )
    assert then_rule.actions == (OutcomeSet("BuyRequest", True),)
    assert else_rule.constraints == (
        NegatedConjunction((OutcomeConstraint("BuyRequest", False),)),
        RopConstraint("buyer", "rights", "BuyRequest"),
    )
    assert else_rule.actions == (ResetAction("buyer"), ResetAction("seller"))


def test_split_if_without_else_makes_one_rule():
    out = split_conditional_rule(conditional_rule(None))
    assert [r.name for r in out] == ["BuyRequestBnessFailureIfThen"]


def test_split_without_conditional_is_identity():
    rule = IrRule("R", EVENT, (), (ResetAction("buyer"),))
    assert split_conditional_rule(rule) == [rule]


# --- declarations ---


def test_case_study_declarations():
    assert emit_declarations(CASE_TABLE, "BuyerStoreContractEx") == """\
package BuyerStoreContractEx

import uk.ac.ncl.erop.*;
import uk.ac.ncl.logging.CCCLogger;

global RelevanceEngine engine;
global EventLogger logger;
global RolePlayer buyer;
global ROPSet ropBuyer;
global RolePlayer seller;
global ROPSet ropSeller;
global RolePlayer store;
global ROPSet ropStore;
global BusinessOperation buyRequest;
global BusinessOperation payment;
global BusinessOperation buyConfirm;
global BusinessOperation buyReject;
global BusinessOperation cancellation;
"""


def test_declarations_one_player_no_ops():
    text = emit_declarations(SymbolTable(role_players=["alice"]), "P")
    lines = [line for line in text.splitlines() if line.startswith("global")]
    assert lines == [
        "global RelevanceEngine engine;",
        "global EventLogger logger;",
        "global RolePlayer alice;",
        "global ROPSet ropAlice;",
    ]


def test_declarations_interleave_players_and_rop_sets():
    text = emit_declarations(SymbolTable(role_players=["a", "b", "c"]), "P")
    names = [line.split()[-1].rstrip(";") for line in text.splitlines() if "RolePlayer" in line or "ROPSet" in line]
    assert names == ["a", "ropA", "b", "ropB", "c", "ropC"]


# --- rule emission ---


def test_emit_first_case_study_rule():
    rule = IrRule(
        name="BuyRequestReceived",
        event=EVENT,
        constraints=(RopConstraint("buyer", "rights", "BuyRequest"),),
        actions=(
            AddOrRemAction("buyer", "rights", "remove", "BuyRequest", "seller"),
            AddOrRemAction(
                "seller", "obligs", "add", "ReactToBuyRequest", "buyer", "01-01-2016 12:00:00"
            ),
        ),
    )
    out = emit_rule(rule, LookupTable(), CASE_TABLE)
    assert out.when_lines == [
        '$e: Event(type=="BUYREQ", originator=="buyer", responder=="store", status=="success")',
        "eval(ropBuyer.matchesRights(buyRequest))",
    ]
    assert out.then_lines == [
        "ropBuyer.removeRight(buyRequest, seller);",
        "BusinessOperation[] bos = {buyConfirm, buyReject};",
        'ropSeller.addObligation("ReactToBuyRequest", bos, buyer, "01-01-2016 12:00:00");',
    ]


def test_emit_reset_actions():
    rule = IrRule("R", EVENT, (), (ResetAction("buyer"), ResetAction("seller")))
    out = emit_rule(rule, LookupTable(), CASE_TABLE)
    assert out.then_lines == ["ropBuyer.reset();", "ropSeller.reset();"]


def test_emit_rule_without_constraints_has_only_event_pattern():
    rule = IrRule("R", EVENT, (), (ResetAction("buyer"),))
    out = emit_rule(rule, LookupTable(), CASE_TABLE)
    assert out.when_lines == [
        '$e: Event(type=="BUYREQ", originator=="buyer", responder=="store", status=="success")'
    ]


def test_compoblig_removal_travels_by_name():
    rule = IrRule(
        "R", EVENT, (),
        (AddOrRemAction("seller", "obligs", "remove", "ReactToBuyRequest", "buyer"),),
    )
    out = emit_rule(rule, LookupTable(), CASE_TABLE)
    assert out.then_lines == ['ropSeller.removeObligation("ReactToBuyRequest", buyer);']


def test_second_compoblig_array_gets_numbered():
    rule = IrRule(
        "R", EVENT, (),
        (
            AddOrRemAction("seller", "obligs", "add", "ReactToBuyRequest", "buyer"),
            AddOrRemAction("buyer", "obligs", "add", "ReactToBuyRequest", "seller"),
        ),
    )
    out = emit_rule(rule, LookupTable(), CASE_TABLE)
    assert out.then_lines[0].startswith("BusinessOperation[] bos = ")
    assert out.then_lines[2].startswith("BusinessOperation[] bos2 = ")


def test_compoblig_removal_does_not_consume_an_array_name():
    rule = IrRule(
        "R", EVENT, (),
        (
            AddOrRemAction("seller", "obligs", "remove", "ReactToBuyRequest", "buyer"),
            AddOrRemAction("buyer", "obligs", "add", "ReactToBuyRequest", "seller"),
        ),
    )
    out = emit_rule(rule, LookupTable(), CASE_TABLE)
    assert out.then_lines[1].startswith("BusinessOperation[] bos = ")


def test_plain_op_with_deadline():
    rule = IrRule(
        "R", EVENT, (),
        (AddOrRemAction("buyer", "rights", "add", "Cancellation", "seller", "02-02-2016 09:00:00"),),
    )
    out = emit_rule(rule, LookupTable(), CASE_TABLE)
    assert out.then_lines == ['ropBuyer.addRight(cancellation, seller, "02-02-2016 09:00:00");']


def test_constraint_expressions():
    lookup = LookupTable()
    assert constraint_expr(RopConstraint("buyer", "obligs", "Payment"), lookup) == (
        "ropBuyer.matchesObligations(payment)"
    )
    assert constraint_expr(RopConstraint("buyer", "prohibs", "Payment"), lookup) == (
        "ropBuyer.matchesProhibitions(payment)"
    )
    assert constraint_expr(OutcomeConstraint("BuyRequest", True), lookup) == (
        "buyRequest.getBusinessFailure() == true"
    )
    assert constraint_expr(TimeDirectComparison("<", "02-01-2016 00:00:00"), lookup) == (
        '$e.getTimestamp() < "02-01-2016 00:00:00"'
    )
    assert constraint_expr(TimePartialComparison("hour", 9, 17), lookup) == (
        "$e.getHour() >= 9 && $e.getHour() <= 17"
    )
    happened = HistoricalConstraint(True, (("botype", "BUYREQ"), ("originator", "buyer")))
    assert constraint_expr(happened, lookup) == 'engine.eventHappened("BUYREQ", "buyer")'
    not_happened = HistoricalConstraint(False, (("botype", "BUYPAY"),))
    assert constraint_expr(not_happened, lookup) == '!engine.eventHappened("BUYPAY")'
    negated = NegatedConjunction(
        (OutcomeConstraint("BuyRequest", False), RopConstraint("buyer", "rights", "BuyRequest"))
    )
    assert constraint_expr(negated, lookup) == (
        "!(buyRequest.getBusinessFailure() == false && ropBuyer.matchesRights(buyRequest))"
    )


# --- full translation ---


def test_translate_case_study_matches_golden(case_study_source, golden_drl):
    text, diags = translate(case_study_source, "BuyerStoreContractEx")
    assert diags == []
    assert text == golden_drl


def test_translate_counts_fifteen_rules(case_study_source):
    text, _ = translate(case_study_source, "BuyerStoreContractEx")
    assert sum(line.startswith('rule "') for line in text.splitlines()) == 15


def test_translate_is_deterministic(case_study_source):
    first = translate(case_study_source, "BuyerStoreContractEx")
    second = translate(case_study_source, "BuyerStoreContractEx")
    assert first == second


def test_translate_empty_source_reports_parse_error():
    text, diags = translate("", "P")
    assert text is None
    assert [d.code for d in diags] == ["E-PARSE"]


def test_translate_reports_lex_error():
    text, diags = translate("roleplayer €;", "P")
    assert text is None
    assert [d.code for d in diags] == ["E-LEX"]


def test_translate_stops_on_sema_errors():
    source = (CORPUS / "bad" / "e003.erop").read_text(encoding="utf-8")
    text, diags = translate(source, "P")
    assert text is None
    assert any(d.code == "E003" for d in diags)


def test_lookup_rename_changes_only_call_sites(case_study_source):
    base, _ = translate(case_study_source, "BuyerStoreContractEx")
    renamed, _ = translate(
        case_study_source, "BuyerStoreContractEx",
        load_lookup("rop.remove.right = revokeRight"),
    )
    base_lines = base.splitlines()
    renamed_lines = renamed.splitlines()
    assert len(base_lines) == len(renamed_lines)
    changed = [
        (a, b) for a, b in zip(base_lines, renamed_lines) if a != b
    ]
    assert changed and all(
        a.replace("removeRight", "revokeRight") == b and "removeRight" in a for a, b in changed
    )


def test_output_uses_lf_and_four_space_indent(golden_drl):
    assert "\r" not in golden_drl
    body_lines = [l for l in golden_drl.splitlines() if l.startswith(" ")]
    assert body_lines and all(l.startswith("    ") and not l.startswith("     ") for l in body_lines)
