"""Code generation: IR to Augmented Drools text.

Covers the declaration block, conditional-rule splitting, the configurable
keyword-to-method lookup, and deterministic rendering (LF newlines, 4-space
indent inside rules).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .ir import (
    AddOrRemAction,
    HistoricalConstraint,
    IfStatement,
    IrConstraint,
    IrContract,
    IrRule,
    NegatedConjunction,
    OutcomeConstraint,
    OutcomeSet,
    ResetAction,
    RopConstraint,
    TimeDirectComparison,
    TimePartialComparison,
    lower_contract,
)
from .lexer import LexError, SourcePos, tokenize
from .sema import (
    Diagnostic,
    SymbolTable,
    build_symbol_table,
    check_contract,
    sort_diagnostics,
)
from .syntax import ParseError, parse_contract

IMPORT_LINES = (
    "import uk.ac.ncl.erop.*;",
    "import uk.ac.ncl.logging.CCCLogger;",
)

# Mapping keys resolvable by the lookup table.  A deployment can rename any
# target method by overriding the value in a lookup file; the key set itself
# is fixed.
DEFAULT_LOOKUP = {
    "rop.matches.rights": "matchesRights",
    "rop.matches.obligs": "matchesObligations",
    "rop.matches.prohibs": "matchesProhibitions",
    "rop.add.right": "addRight",
    "rop.remove.right": "removeRight",
    "rop.add.oblig": "addObligation",
    "rop.remove.oblig": "removeObligation",
    "rop.add.prohib": "addProhibition",
    "rop.remove.prohib": "removeProhibition",
    "bizfail.get": "getBusinessFailure",
    "bizfail.set": "setBusinessFailure",
    "reset": "reset",
    "historical.happened": "eventHappened",
    "time.stamp": "getTimestamp",
    "time.hour": "getHour",
    "time.minute": "getMinute",
    "time.day": "getDay",
    "time.month": "getMonth",
    "time.year": "getYear",
}

_SET_SINGULAR = {"rights": "right", "obligs": "oblig", "prohibs": "prohib"}


class ConfigError(Exception):
    """Malformed lookup file."""


class LookupKeyError(Exception):
    """A mapping key was queried that the lookup table does not define (E011)."""

    def __init__(self, key: str) -> None:
        super().__init__(f"unknown lookup key '{key}'")
        self.key = key


@dataclass
class LookupTable:
    entries: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_LOOKUP))

    def resolve(self, key: str) -> str:
        try:
            return self.entries[key]
        except KeyError:
            raise LookupKeyError(key) from None


def load_lookup(text: str) -> LookupTable:
    """Parse a ``key = value`` mapping file and merge it over the defaults.

    ``#`` starts a comment, blank lines are ignored.  A line without ``=``
    or a key repeated within the file raises ConfigError.
    """
    entries = dict(DEFAULT_LOOKUP)
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got '{raw.strip()}'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: expected 'key = value', got '{raw.strip()}'")
        if key in seen:
            raise ConfigError(f"line {lineno}: duplicate key '{key}'")
        seen.add(key)
        entries[key] = value
    return LookupTable(entries)


def bo_global_name(name: str) -> str:
    """Business-operation global variable: first character lower-cased."""
    return name[0].lower() + name[1:]


def rop_var_name(player: str) -> str:
    """ROP-set global for a role player, e.g. buyer -> ropBuyer."""
    return "rop" + player[0].upper() + player[1:]


@dataclass
class ADRule:
    name: str
    when_lines: list[str]
    then_lines: list[str]


@dataclass
class ADFile:
    package_name: str
    imports: list[str]
    globals: list[str]
    rules: list[ADRule]


def split_conditional_rule(rule: IrRule) -> list[IrRule]:
    """Break a rule holding an if/else into its target-language counterparts.

    The target has no conditional actions, so the if-condition joins the
    when-block of a first rule carrying the then-actions; an else branch
    yields a second rule guarded by the negated condition.  A rule without
    a conditional passes through unchanged.
    """
    conditional = next((a for a in rule.actions if isinstance(a, IfStatement)), None)
    if conditional is None:
        return [rule]
    then_rule = IrRule(
        name=rule.name + "IfThen",
        event=rule.event,
        constraints=conditional.cond + rule.constraints,
        actions=conditional.then_actions,
    )
    if conditional.else_actions is None:
        return [then_rule]
    else_rule = IrRule(
        name=rule.name + "IfElse",
        event=rule.event,
        constraints=(NegatedConjunction(conditional.cond),) + rule.constraints,
        actions=conditional.else_actions,
    )
    return [then_rule, else_rule]


def emit_declarations(tab: SymbolTable, package_name: str) -> str:
    """The package/import/global header block, ready to prepend to the rules."""
    return _header_text(package_name, list(IMPORT_LINES), global_lines(tab))


def global_lines(tab: SymbolTable) -> list[str]:
    lines = ["global RelevanceEngine engine;", "global EventLogger logger;"]
    for player in tab.role_players:
        lines.append(f"global RolePlayer {player};")
        lines.append(f"global ROPSet {rop_var_name(player)};")
    for bo in tab.business_ops:
        lines.append(f"global BusinessOperation {bo_global_name(bo)};")
    return lines


def emit_rule(rule: IrRule, lookup: LookupTable, tab: SymbolTable) -> ADRule:
    """Render one post-split rule (no IfStatement may remain)."""
    ev = rule.event
    when_lines = [
        f'$e: Event(type=="{ev.botype}", originator=="{ev.originator}", '
        f'responder=="{ev.responder}", status=="{ev.outcome}")'
    ]
    for constraint in rule.constraints:
        when_lines.append(f"eval({constraint_expr(constraint, lookup)})")

    then_lines: list[str] = []
    arrays = 0
    for action in rule.actions:
        if isinstance(action, AddOrRemAction):
            if action.bo in tab.comp_obligs:
                if action.op == "add":
                    arrays += 1
                then_lines.extend(_compoblig_lines(action, lookup, tab, arrays))
            else:
                then_lines.append(_plain_manip_line(action, lookup))
        elif isinstance(action, OutcomeSet):
            setter = lookup.resolve("bizfail.set")
            then_lines.append(f"{bo_global_name(action.bo)}.{setter}({_bool(action.value)});")
        elif isinstance(action, ResetAction):
            then_lines.append(f"{rop_var_name(action.player)}.{lookup.resolve('reset')}();")
        else:
            raise AssertionError("IfStatement must be split before emission")
    return ADRule(name=rule.name, when_lines=when_lines, then_lines=then_lines)


def constraint_expr(constraint: IrConstraint, lookup: LookupTable) -> str:
    """The parenthesis-free boolean expression a constraint evaluates."""
    if isinstance(constraint, RopConstraint):
        method = lookup.resolve(f"rop.matches.{constraint.rop_set}")
        return f"{rop_var_name(constraint.player)}.{method}({bo_global_name(constraint.bo)})"
    if isinstance(constraint, OutcomeConstraint):
        getter = lookup.resolve("bizfail.get")
        return f"{bo_global_name(constraint.bo)}.{getter}() == {_bool(constraint.expected)}"
    if isinstance(constraint, TimeDirectComparison):
        accessor = lookup.resolve("time.stamp")
        return f'$e.{accessor}() {constraint.op} "{constraint.timestamp}"'
    if isinstance(constraint, TimePartialComparison):
        accessor = lookup.resolve(f"time.{constraint.unit}")
        return (
            f"$e.{accessor}() >= {constraint.lo} && $e.{accessor}() <= {constraint.hi}"
        )
    if isinstance(constraint, HistoricalConstraint):
        method = lookup.resolve("historical.happened")
        args = ", ".join(f'"{value}"' for _, value in constraint.fields)
        call = f"engine.{method}({args})"
        return call if constraint.happened else f"!{call}"
    assert isinstance(constraint, NegatedConjunction)
    inner = " && ".join(constraint_expr(item, lookup) for item in constraint.items)
    return f"!({inner})"


def _plain_manip_line(action: AddOrRemAction, lookup: LookupTable) -> str:
    method = lookup.resolve(f"rop.{action.op}.{_SET_SINGULAR[action.rop_set]}")
    args = [bo_global_name(action.bo), action.beneficiary]
    if action.deadline is not None:
        args.append(f'"{action.deadline}"')
    return f"{rop_var_name(action.player)}.{method}({', '.join(args)});"


def _compoblig_lines(
    action: AddOrRemAction, lookup: LookupTable, tab: SymbolTable, index: int
) -> list[str]:
    # Composite obligations travel by name and always go through the
    # obligation methods; adding one also needs the member operations packed
    # into a temporary array.
    method = lookup.resolve(f"rop.{action.op}.oblig")
    rop_var = rop_var_name(action.player)
    if action.op == "remove":
        return [f'{rop_var}.{method}("{action.bo}", {action.beneficiary});']
    members = ", ".join(bo_global_name(m) for m in tab.comp_obligs[action.bo])
    array = "bos" if index == 1 else f"bos{index}"
    args = [f'"{action.bo}"', array, action.beneficiary]
    if action.deadline is not None:
        args.append(f'"{action.deadline}"')
    return [
        f"BusinessOperation[] {array} = {{{members}}};",
        f"{rop_var}.{method}({', '.join(args)});",
    ]


def _bool(value: bool) -> str:
    return "true" if value else "false"


def build_ad_file(contract: IrContract, lookup: LookupTable) -> ADFile:
    """Split every rule and render the whole contract into an ADFile."""
    rules = [
        emit_rule(piece, lookup, contract.symbols)
        for rule in contract.rules
        for piece in split_conditional_rule(rule)
    ]
    return ADFile(
        package_name=contract.package_name,
        imports=list(IMPORT_LINES),
        globals=global_lines(contract.symbols),
        rules=rules,
    )


def render_rule(rule: ADRule) -> str:
    lines = [f'rule "{rule.name}"', "when"]
    lines.extend(f"    {line}" for line in rule.when_lines)
    lines.append("then")
    lines.extend(f"    {line}" for line in rule.then_lines)
    lines.append("end")
    return "\n".join(lines) + "\n"


def render_file(ad_file: ADFile) -> str:
    parts = [_header_text(ad_file.package_name, ad_file.imports, ad_file.globals)]
    parts.extend(render_rule(rule) for rule in ad_file.rules)
    return "\n".join(parts)


def _header_text(package_name: str, imports: list[str], globals_: list[str]) -> str:
    lines = [f"package {package_name}", ""]
    lines.extend(imports)
    lines.append("")
    lines.extend(globals_)
    return "\n".join(lines) + "\n"


def translate(
    source: str, package_name: str, lookup: LookupTable | None = None
) -> tuple[str | None, list[Diagnostic]]:
    """Full pipeline: tokenize, parse, check, lower, split and emit.

    Returns ``(text, diagnostics)``; ``text`` is None when any error
    diagnostic was produced, in which case nothing was rendered.
    """
    try:
        tokens = tokenize(source)
    except LexError as err:
        return None, [Diagnostic("error", "E-LEX", err.message, err.pos)]
    try:
        ast = parse_contract(tokens)
    except ParseError as err:
        return None, [Diagnostic("error", "E-PARSE", err.message, err.pos)]

    tab, diags = build_symbol_table(ast)
    diags = sort_diagnostics(diags + check_contract(ast, tab))
    if any(d.is_error for d in diags):
        return None, diags

    contract = lower_contract(ast, tab, package_name)
    try:
        ad_file = build_ad_file(contract, lookup or LookupTable())
    except LookupKeyError as err:
        return None, diags + [Diagnostic("error", "E011", str(err), SourcePos(1, 1, 0))]
    return render_file(ad_file), diags
