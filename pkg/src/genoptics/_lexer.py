"""Tokenizer shared by the schema, type-expression and value parsers."""
from __future__ import annotations

from dataclasses import dataclass


class ParseError(Exception):
    """Raised for malformed schema, type or value text.

    ``line`` and ``column`` are 1-based.
    """

    def __init__(self, line: int, column: int, expectation: str):
        self.line = line
        self.column = column
        self.expectation = expectation
        super().__init__(f"{line}:{column}: {expectation}")


@dataclass(frozen=True)
class Token:
    kind: str  # upper, lower, int, float, string, char, punct, eof
    text: str
    line: int
    column: int
    value: object = None


_PUNCT = "()[],:|.=>-"


def _unescape(text: str, quote: str, line: int, col: int) -> tuple[str, int]:
    """Scan a quoted literal starting just after the opening quote.

    Returns the decoded body and the index just past the closing quote.
    """
    out = []
    i = 0
    while True:
        if i >= len(text):
            raise ParseError(line, col, f"closing {quote}")
        c = text[i]
        if c == "\\":
            if i + 1 >= len(text) or text[i + 1] not in (quote, "\\"):
                raise ParseError(line, col + i, f"escape \\{quote} or \\\\")
            out.append(text[i + 1])
            i += 2
        elif c == quote:
            return "".join(out), i + 1
        else:
            out.append(c)
            i += 1


def tokenize(source: str, *, line_offset: int = 0) -> list[Token]:
    tokens: list[Token] = []
    line = 1 + line_offset
    line_start = 0
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        col = i - line_start + 1
        if c == "\n":
            i += 1
            line += 1
            line_start = i
            continue
        if c.isspace():
            i += 1
            continue
        if c == "#":
            while i < n and source[i] != "\n":
                i += 1
            continue
        if c == '"' or c == "'":
            # strings and chars may span lines; keep line/col of the opening quote
            body, used = _unescape(source[i + 1:], c, line, col)
            raw = source[i:i + 1 + used]
            if c == "'":
                if len(body) != 1:
                    raise ParseError(line, col, "a single character between quotes")
                tokens.append(Token("char", raw, line, col, body))
            else:
                tokens.append(Token("string", raw, line, col, body))
            newlines = raw.count("\n")
            if newlines:
                line += newlines
                line_start = i + raw.rfind("\n") + 1
            i += len(raw)
            continue
        if c.isdigit() or (c == "-" and i + 1 < n and source[i + 1].isdigit()):
            j = i + 1
            while j < n and source[j].isdigit():
                j += 1
            is_float = False
            if j + 1 < n and source[j] == "." and source[j + 1].isdigit():
                is_float = True
                j += 1
                while j < n and source[j].isdigit():
                    j += 1
            if j < n and source[j] in "eE":
                k = j + 1
                if k < n and source[k] in "+-":
                    k += 1
                if k < n and source[k].isdigit():
                    is_float = True
                    j = k
                    while j < n and source[j].isdigit():
                        j += 1
            raw = source[i:j]
            if is_float:
                tokens.append(Token("float", raw, line, col, float(raw)))
            else:
                tokens.append(Token("int", raw, line, col, int(raw)))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i + 1
            while j < n and (source[j].isalnum() or source[j] in "_'"):
                j += 1
            raw = source[i:j]
            # leading underscore counts as a constructor-like name (_Ctor, _Typed)
            head = raw.lstrip("_")[:1]
            kind = "upper" if head.isupper() else "lower"
            tokens.append(Token(kind, raw, line, col))
            i = j
            continue
        if c in _PUNCT:
            if c == "-" and source[i:i + 2] == "->":
                tokens.append(Token("punct", "->", line, col))
                i += 2
                continue
            tokens.append(Token("punct", c, line, col))
            i += 1
            continue
        if c == "×":
            tokens.append(Token("punct", c, line, col))
            i += 1
            continue
        raise ParseError(line, col, f"a token, found {c!r}")
    tokens.append(Token("eof", "", line, i - line_start + 1))
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    def peek(self, offset: int = 0) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "punct" and tok.text == text

    def expect_punct(self, text: str) -> Token:
        tok = self.peek()
        if tok.kind != "punct" or tok.text != text:
            self.fail(f"'{text}'")
        return self.next()

    def expect_kind(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            self.fail(what)
        return self.next()

    def fail(self, expectation: str):
        tok = self.peek()
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(tok.line, tok.column, f"expected {expectation}, found {found}")

    def expect_eof(self):
        if self.peek().kind != "eof":
            self.fail("end of input")
