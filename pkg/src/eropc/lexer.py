"""Lexical analysis: turn EROP source text into a token stream."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class TokenKind(enum.Enum):
    # keywords
    ROLEPLAYER = "roleplayer"
    BUSINESSOPERATION = "businessoperation"
    COMPOBLIG = "compoblig"
    RULE = "rule"
    WHEN = "when"
    MATCHES = "matches"
    THEN = "then"
    ELSE = "else"
    END = "end"
    IF = "if"
    ENDIF = "endif"
    IN = "in"
    RESET = "reset"
    # punctuation and operators
    COMMA = ","
    SEMI = ";"
    DOT = "."
    LPAREN = "("
    RPAREN = ")"
    LBRACKET = "["
    RBRACKET = "]"
    EQ = "=="
    PLUSEQ = "+="
    MINUSEQ = "-="
    BANG = "!"
    LT = "<"
    GT = ">"
    LE = "<="
    GE = ">="
    # literals and names
    STRING = "STRING"
    INT = "INT"
    IDENT = "IDENT"
    EOF = "EOF"


KEYWORDS = {
    kind.value: kind
    for kind in (
        TokenKind.ROLEPLAYER,
        TokenKind.BUSINESSOPERATION,
        TokenKind.COMPOBLIG,
        TokenKind.RULE,
        TokenKind.WHEN,
        TokenKind.MATCHES,
        TokenKind.THEN,
        TokenKind.ELSE,
        TokenKind.END,
        TokenKind.IF,
        TokenKind.ENDIF,
        TokenKind.IN,
        TokenKind.RESET,
    )
}

# Two-character operators must be tried before their one-character prefixes.
_PUNCT = (
    ("==", TokenKind.EQ),
    ("+=", TokenKind.PLUSEQ),
    ("-=", TokenKind.MINUSEQ),
    ("<=", TokenKind.LE),
    (">=", TokenKind.GE),
    (",", TokenKind.COMMA),
    (";", TokenKind.SEMI),
    (".", TokenKind.DOT),
    ("(", TokenKind.LPAREN),
    (")", TokenKind.RPAREN),
    ("[", TokenKind.LBRACKET),
    ("]", TokenKind.RBRACKET),
    ("!", TokenKind.BANG),
    ("<", TokenKind.LT),
    (">", TokenKind.GT),
)


@dataclass(frozen=True)
class SourcePos:
    """1-based line/column plus 0-based character offset."""

    line: int
    col: int
    offset: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    lexeme: str
    pos: SourcePos

    def __repr__(self) -> str:
        return f"Token({self.kind.name}, {self.lexeme!r}, {self.pos})"


class LexError(Exception):
    """Lexical error with the position of the offending character."""

    def __init__(self, message: str, pos: SourcePos) -> None:
        super().__init__(message)
        self.message = message
        self.pos = pos


def _is_ident_start(ch: str) -> bool:
    return ch.isascii() and ch.isalpha()


def _is_ident_char(ch: str) -> bool:
    return ch.isascii() and (ch.isalnum() or ch == "_")


class _Scanner:
    """Cursor over the source with line/column bookkeeping.

    Any of \\n, \\r\\n, or \\r counts as a single line break.
    """

    def __init__(self, source: str) -> None:
        self.source = source
        self.offset = 0
        self.line = 1
        self.col = 1

    def eof(self) -> bool:
        return self.offset >= len(self.source)

    def peek(self, ahead: int = 0) -> str:
        i = self.offset + ahead
        return self.source[i] if i < len(self.source) else ""

    def pos(self) -> SourcePos:
        return SourcePos(self.line, self.col, self.offset)

    def advance(self) -> str:
        ch = self.source[self.offset]
        self.offset += 1
        if ch == "\r":
            if self.peek() == "\n":
                self.offset += 1
            self.line += 1
            self.col = 1
        elif ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch


def tokenize(source: str) -> list[Token]:
    """Tokenize EROP source, returning a token list terminated by EOF.

    Whitespace, ``//`` line comments and ``/* */`` block comments are
    skipped.  Raises LexError for an unterminated string literal, an
    unterminated block comment, or an illegal character.
    """
    sc = _Scanner(source)
    tokens: list[Token] = []
    while True:
        _skip_trivia(sc)
        if sc.eof():
            tokens.append(Token(TokenKind.EOF, "", sc.pos()))
            return tokens
        tokens.append(_next_token(sc))


def _skip_trivia(sc: _Scanner) -> None:
    while not sc.eof():
        ch = sc.peek()
        if ch in " \t\r\n":
            sc.advance()
        elif ch == "/" and sc.peek(1) == "/":
            while not sc.eof() and sc.peek() not in "\r\n":
                sc.advance()
        elif ch == "/" and sc.peek(1) == "*":
            start = sc.pos()
            sc.advance()
            sc.advance()
            while True:
                if sc.eof():
                    raise LexError("unterminated block comment", start)
                if sc.peek() == "*" and sc.peek(1) == "/":
                    sc.advance()
                    sc.advance()
                    break
                sc.advance()
        else:
            return


def _next_token(sc: _Scanner) -> Token:
    start = sc.pos()
    ch = sc.peek()

    if _is_ident_start(ch):
        while not sc.eof() and _is_ident_char(sc.peek()):
            sc.advance()
        lexeme = sc.source[start.offset : sc.offset]
        kind = KEYWORDS.get(lexeme, TokenKind.IDENT)
        return Token(kind, lexeme, start)

    if ch.isdigit():
        while not sc.eof() and sc.peek().isdigit():
            sc.advance()
        return Token(TokenKind.INT, sc.source[start.offset : sc.offset], start)

    if ch == '"':
        sc.advance()
        while True:
            if sc.eof() or sc.peek() in "\r\n":
                raise LexError("unterminated string literal", start)
            if sc.peek() == '"':
                sc.advance()
                return Token(TokenKind.STRING, sc.source[start.offset : sc.offset], start)
            sc.advance()

    for text, kind in _PUNCT:
        if sc.source.startswith(text, sc.offset):
            for _ in text:
                sc.advance()
            return Token(kind, text, start)

    raise LexError(f"illegal character {ch!r}", start)


def string_value(token: Token) -> str:
    """Contents of a STRING token without the surrounding quotes."""
    return token.lexeme[1:-1]
