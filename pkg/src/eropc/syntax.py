"""Syntax analysis: recursive-descent parsing of the token stream into an AST.

Grammar for ``.erop`` files (normative for this compiler):

    contract        := decl+ rule+
    decl            := "roleplayer" identList ";"
                     | "businessoperation" identList ";"
                     | "compoblig" IDENT "(" identList ")" [";"]
    identList       := IDENT ("," IDENT)*
    rule            := "rule" STRING "when" eventMatch constraint* "then" action+ "end"
    eventMatch      := IDENT "matches" "(" field ("," field)* ")"
    field           := IDENT "==" IDENT
    constraint      := ropMembership | outcomeCheck | timeDirect | timePartial | historical
    ropMembership   := IDENT "in" IDENT "." ropset
    ropset          := "rights" | "obligs" | "prohibs"
    outcomeCheck    := IDENT "." "BizFail" "==" bool
    timeDirect      := IDENT "." "timestamp" ("==" | "<" | ">") STRING
    timePartial     := IDENT "." timeUnit "in" "[" INT "," INT "]"
    timeUnit        := "hour" | "minute" | "day" | "month" | "year"
    historical      := ["not"] "happened" "(" field ("," field)* ")"
    action          := ropManip | outcomeSet | resetStmt | ifStmt
    ropManip        := IDENT "." ropset ("+=" | "-=") IDENT "(" actualList ")"
    actualList      := actual ("," actual)*
    actual          := IDENT | STRING
    outcomeSet      := IDENT "." "BizFail" "==" bool
    resetStmt       := "reset" IDENT | IDENT "reset"
    ifStmt          := "if" "(" constraint ("," constraint)* ")" "then" action+ ["else" action+] "endif"
    bool            := IDENT    -- must be "true" or "false" (checked in sema)

Field names such as ``botype`` or ``BizFail``, ROP-set names, and time units
are contextual identifiers recognised positionally, not reserved words.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .lexer import SourcePos, Token, TokenKind, string_value

ROP_SETS = ("rights", "obligs", "prohibs")
TIME_UNITS = ("hour", "minute", "day", "month", "year")
EVENT_FIELDS = ("botype", "originator", "responder", "outcome")


@dataclass(frozen=True)
class Ident:
    """An identifier occurrence together with its source position."""

    name: str
    pos: SourcePos


@dataclass(frozen=True)
class EventField:
    name: Ident
    value: Ident


# --- declarations ---


@dataclass
class RolePlayersDecl:
    names: list[Ident]


@dataclass
class BusinessOpsDecl:
    names: list[Ident]


@dataclass
class CompObligDecl:
    name: Ident
    members: list[Ident]


DeclAst = RolePlayersDecl | BusinessOpsDecl | CompObligDecl


# --- constraints ---


@dataclass
class RopMembership:
    """``BO in player.rights`` (membership of a ROP set)."""

    bo: Ident
    player: Ident
    rop_set: str
    pos: SourcePos


@dataclass
class OutcomeCheck:
    """``BO.BizFail == true|false`` in a left-hand side."""

    bo: Ident
    value: Ident


@dataclass
class TimeDirect:
    event_var: Ident
    op: str  # "==", "<" or ">"
    timestamp: str
    pos: SourcePos


@dataclass
class TimePartial:
    event_var: Ident
    unit: str
    lo: int
    hi: int
    pos: SourcePos


@dataclass
class Historical:
    happened: bool
    fields: list[EventField]
    pos: SourcePos


ConstraintAst = RopMembership | OutcomeCheck | TimeDirect | TimePartial | Historical


# --- actions ---


@dataclass(frozen=True)
class StringActual:
    value: str
    pos: SourcePos


@dataclass
class RopManip:
    """``player.rights += BO(args...)`` or the ``-=`` form."""

    player: Ident
    rop_set: str
    op: str  # "add" or "remove"
    bo: Ident
    args: list[Ident]
    deadlines: list[StringActual] = field(default_factory=list)

    @property
    def deadline(self) -> str | None:
        return self.deadlines[0].value if self.deadlines else None


@dataclass
class OutcomeSetAct:
    """``BO.BizFail == true|false`` in a right-hand side (a setter)."""

    bo: Ident
    value: Ident


@dataclass
class ResetAct:
    player: Ident
    pos: SourcePos


@dataclass
class IfAct:
    cond: list[ConstraintAst]
    then_actions: list["ActionAst"]
    else_actions: list["ActionAst"] | None
    pos: SourcePos


ActionAst = RopManip | OutcomeSetAct | ResetAct | IfAct


@dataclass
class RuleAst:
    name: str
    name_pos: SourcePos
    event_var: Ident
    event_fields: list[EventField]
    constraints: list[ConstraintAst]
    actions: list[ActionAst]


@dataclass
class ContractAst:
    decls: list[DeclAst]
    rules: list[RuleAst]


class ParseError(Exception):
    """Syntax error naming the expected construct and the offending token."""

    def __init__(self, message: str, pos: SourcePos) -> None:
        super().__init__(message)
        self.message = message
        self.pos = pos


_DECL_KEYWORDS = (TokenKind.ROLEPLAYER, TokenKind.BUSINESSOPERATION, TokenKind.COMPOBLIG)


def parse_contract(tokens: list[Token]) -> ContractAst:
    """Parse a full contract (declarations followed by rules)."""
    return _Parser(tokens).contract()


class _Parser:
    def __init__(self, tokens: list[Token]) -> None:
        self.tokens = tokens
        self.i = 0

    # token bookkeeping

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.i + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def at(self, kind: TokenKind) -> bool:
        return self.peek().kind == kind

    def at_ident(self, name: str, ahead: int = 0) -> bool:
        tok = self.peek(ahead)
        return tok.kind == TokenKind.IDENT and tok.lexeme == name

    def advance(self) -> Token:
        tok = self.tokens[self.i]
        if tok.kind is not TokenKind.EOF:
            self.i += 1
        return tok

    def expect(self, kind: TokenKind, what: str) -> Token:
        tok = self.peek()
        if tok.kind is not kind:
            raise ParseError(f"expected {what} but found {self._show(tok)}", tok.pos)
        return self.advance()

    def ident(self, what: str = "an identifier") -> Ident:
        tok = self.expect(TokenKind.IDENT, what)
        return Ident(tok.lexeme, tok.pos)

    @staticmethod
    def _show(tok: Token) -> str:
        if tok.kind is TokenKind.EOF:
            return "end of input"
        return f"'{tok.lexeme}'"

    def fail(self, message: str) -> ParseError:
        tok = self.peek()
        return ParseError(f"{message} but found {self._show(tok)}", tok.pos)

    # grammar productions

    def contract(self) -> ContractAst:
        decls: list[DeclAst] = []
        while self.peek().kind in _DECL_KEYWORDS:
            decls.append(self.decl())
        if not decls:
            raise self.fail("expected a declaration (roleplayer, businessoperation or compoblig)")

        rules: list[RuleAst] = []
        while self.at(TokenKind.RULE):
            rules.append(self.rule())
        if not rules:
            raise self.fail("expected 'rule'")
        if self.peek().kind in _DECL_KEYWORDS:
            raise ParseError("declarations must precede the first rule", self.peek().pos)
        self.expect(TokenKind.EOF, "'rule' or end of input")
        return ContractAst(decls, rules)

    def decl(self) -> DeclAst:
        tok = self.advance()
        if tok.kind is TokenKind.ROLEPLAYER:
            names = self.ident_list("a role player name")
            self.expect(TokenKind.SEMI, "';'")
            return RolePlayersDecl(names)
        if tok.kind is TokenKind.BUSINESSOPERATION:
            names = self.ident_list("a business operation name")
            self.expect(TokenKind.SEMI, "';'")
            return BusinessOpsDecl(names)
        name = self.ident("a composite obligation name")
        self.expect(TokenKind.LPAREN, "'('")
        members = self.ident_list("a member business operation")
        self.expect(TokenKind.RPAREN, "')'")
        if self.at(TokenKind.SEMI):  # trailing ';' is optional here
            self.advance()
        return CompObligDecl(name, members)

    def ident_list(self, what: str) -> list[Ident]:
        names = [self.ident(what)]
        while self.at(TokenKind.COMMA):
            self.advance()
            names.append(self.ident(what))
        return names

    def rule(self) -> RuleAst:
        self.expect(TokenKind.RULE, "'rule'")
        name_tok = self.expect(TokenKind.STRING, "a rule name string")
        self.expect(TokenKind.WHEN, "'when'")
        event_var = self.ident("an event variable")
        self.expect(TokenKind.MATCHES, "'matches'")
        self.expect(TokenKind.LPAREN, "'('")
        fields = [self.event_field()]
        while self.at(TokenKind.COMMA):
            self.advance()
            fields.append(self.event_field())
        self.expect(TokenKind.RPAREN, "')'")

        constraints: list[ConstraintAst] = []
        while not self.at(TokenKind.THEN):
            if self.peek().kind is not TokenKind.IDENT:
                raise self.fail("expected a constraint or 'then'")
            constraints.append(self.constraint())
        self.expect(TokenKind.THEN, "'then'")

        actions = self.action_block((TokenKind.END,), inside_if=False)
        self.expect(TokenKind.END, "'end'")
        return RuleAst(
            name=string_value(name_tok),
            name_pos=name_tok.pos,
            event_var=event_var,
            event_fields=fields,
            constraints=constraints,
            actions=actions,
        )

    def event_field(self) -> EventField:
        name = self.ident("an event field name")
        self.expect(TokenKind.EQ, "'=='")
        value = self.ident("an event field value")
        return EventField(name, value)

    def constraint(self) -> ConstraintAst:
        tok = self.peek()
        if tok.kind is not TokenKind.IDENT:
            raise self.fail("expected a constraint")

        if self.at_ident("not") and self.at_ident("happened", 1):
            self.advance()
            self.advance()
            return self.historical_tail(happened=False, pos=tok.pos)
        if self.at_ident("happened") and self.peek(1).kind is TokenKind.LPAREN:
            self.advance()
            return self.historical_tail(happened=True, pos=tok.pos)

        subject = self.ident()
        if self.at(TokenKind.IN):
            self.advance()
            player = self.ident("a role player name")
            self.expect(TokenKind.DOT, "'.'")
            rop_set = self.ropset()
            return RopMembership(bo=subject, player=player, rop_set=rop_set, pos=subject.pos)

        self.expect(TokenKind.DOT, "'in' or '.'")
        selector = self.ident("'BizFail', 'timestamp' or a time unit")
        if selector.name == "BizFail":
            self.expect(TokenKind.EQ, "'=='")
            value = self.ident("'true' or 'false'")
            return OutcomeCheck(bo=subject, value=value)
        if selector.name == "timestamp":
            op_tok = self.peek()
            if op_tok.kind not in (TokenKind.EQ, TokenKind.LT, TokenKind.GT):
                raise self.fail("expected '==', '<' or '>'")
            self.advance()
            ts = self.expect(TokenKind.STRING, "a timestamp string")
            return TimeDirect(subject, op_tok.lexeme, string_value(ts), subject.pos)
        if selector.name in TIME_UNITS:
            self.expect(TokenKind.IN, "'in'")
            self.expect(TokenKind.LBRACKET, "'['")
            lo = self.expect(TokenKind.INT, "an integer")
            self.expect(TokenKind.COMMA, "','")
            hi = self.expect(TokenKind.INT, "an integer")
            self.expect(TokenKind.RBRACKET, "']'")
            return TimePartial(subject, selector.name, int(lo.lexeme), int(hi.lexeme), subject.pos)
        raise ParseError(
            f"expected 'BizFail', 'timestamp' or a time unit after '.' but found '{selector.name}'",
            selector.pos,
        )

    def historical_tail(self, happened: bool, pos: SourcePos) -> Historical:
        self.expect(TokenKind.LPAREN, "'('")
        fields = [self.event_field()]
        while self.at(TokenKind.COMMA):
            self.advance()
            fields.append(self.event_field())
        self.expect(TokenKind.RPAREN, "')'")
        return Historical(happened=happened, fields=fields, pos=pos)

    def ropset(self) -> str:
        tok = self.peek()
        if tok.kind is TokenKind.IDENT and tok.lexeme in ROP_SETS:
            self.advance()
            return tok.lexeme
        raise self.fail("expected 'rights', 'obligs' or 'prohibs'")

    def action_block(self, stop: tuple[TokenKind, ...], inside_if: bool) -> list[ActionAst]:
        actions = [self.action(inside_if)]
        while self.peek().kind not in stop and not self.at(TokenKind.EOF):
            actions.append(self.action(inside_if))
        return actions

    def action(self, inside_if: bool) -> ActionAst:
        tok = self.peek()
        if tok.kind is TokenKind.RESET:
            self.advance()
            player = self.ident("a role player name")
            return ResetAct(player, tok.pos)
        if tok.kind is TokenKind.IF:
            if inside_if:
                raise ParseError("nested 'if' actions are not supported", tok.pos)
            return self.if_action()
        if tok.kind is not TokenKind.IDENT:
            raise self.fail("expected an action")

        subject = self.ident()
        if self.at(TokenKind.RESET):
            reset_tok = self.advance()
            return ResetAct(subject, reset_tok.pos)

        self.expect(TokenKind.DOT, "'.'")
        selector = self.ident("a ROP set or 'BizFail'")
        if selector.name == "BizFail":
            self.expect(TokenKind.EQ, "'=='")
            value = self.ident("'true' or 'false'")
            return OutcomeSetAct(bo=subject, value=value)
        if selector.name not in ROP_SETS:
            raise ParseError(
                f"expected 'rights', 'obligs', 'prohibs' or 'BizFail' but found '{selector.name}'",
                selector.pos,
            )
        op_tok = self.peek()
        if op_tok.kind is TokenKind.PLUSEQ:
            op = "add"
        elif op_tok.kind is TokenKind.MINUSEQ:
            op = "remove"
        else:
            raise self.fail("expected '+=' or '-='")
        self.advance()
        bo = self.ident("a business operation name")
        self.expect(TokenKind.LPAREN, "'('")
        args: list[Ident] = []
        deadlines: list[StringActual] = []
        self.actual(args, deadlines)
        while self.at(TokenKind.COMMA):
            self.advance()
            self.actual(args, deadlines)
        self.expect(TokenKind.RPAREN, "')'")
        return RopManip(
            player=subject, rop_set=selector.name, op=op, bo=bo, args=args, deadlines=deadlines
        )

    def actual(self, args: list[Ident], deadlines: list[StringActual]) -> None:
        tok = self.peek()
        if tok.kind is TokenKind.IDENT:
            args.append(self.ident())
        elif tok.kind is TokenKind.STRING:
            self.advance()
            deadlines.append(StringActual(string_value(tok), tok.pos))
        else:
            raise self.fail("expected an argument (identifier or string)")

    def if_action(self) -> IfAct:
        if_tok = self.expect(TokenKind.IF, "'if'")
        self.expect(TokenKind.LPAREN, "'('")
        cond = [self.constraint()]
        while not self.at(TokenKind.RPAREN):
            if self.at(TokenKind.COMMA):  # separators are optional between conditions
                self.advance()
            cond.append(self.constraint())
        self.expect(TokenKind.RPAREN, "')'")
        self.expect(TokenKind.THEN, "'then'")
        then_actions = self.action_block((TokenKind.ELSE, TokenKind.ENDIF), inside_if=True)
        else_actions = None
        if self.at(TokenKind.ELSE):
            self.advance()
            else_actions = self.action_block((TokenKind.ENDIF,), inside_if=True)
        self.expect(TokenKind.ENDIF, "'endif'")
        return IfAct(cond, then_actions, else_actions, if_tok.pos)
