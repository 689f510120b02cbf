"""Tokenizer for .lps programs and .evs/.arb scripts."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import LPSSyntaxError

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>[%\#][^\n]*)
  | (?P<int>\d+)
  | (?P<name>[a-z][A-Za-z0-9_]*(?:-[A-Za-z0-9_]+)*)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<op><-|->|=<|>=|\\=|!=|\.\.|[{}()\[\],.:&|~<>=+\-@])
""", re.VERBOSE)


@dataclass(frozen=True, slots=True)
class Token:
    kind: str  # 'int' | 'name' | 'var' | 'op' | 'eof'
    text: str
    line: int
    col: int

    def __str__(self) -> str:
        return self.text or self.kind


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise LPSSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            out.append(Token(kind, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rfind("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class Cursor:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "name") and t.text == text

    def take(self) -> Token:
        t = self.tok
        if t.kind != "eof":
            self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"expected '{text}' but found '{self.tok}'")
        return self.take()

    def expect_kind(self, kind: str) -> Token:
        if self.tok.kind != kind:
            self.fail(f"expected {kind} but found '{self.tok}'")
        return self.take()

    def fail(self, msg: str, tok: Token | None = None):
        t = tok or self.tok
        raise LPSSyntaxError(msg, t.line, t.col)
