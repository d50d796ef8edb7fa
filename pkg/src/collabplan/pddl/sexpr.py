"""Positioned s-expression reader for the PDDL subset."""

from __future__ import annotations

import re
from dataclasses import dataclass

MAX_DEPTH = 200

_SYMBOL_CHARS = frozenset("abcdefghijklmnopqrstuvwxyz0123456789-_?:.=<>+*/!@$%^&~")
_NUMBER_RE = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?\Z")


class ParseError(ValueError):
    """Syntax or consistency error with a 1-based ``line:col`` position."""

    def __init__(self, message: str, line: int = 0, col: int = 0, token: str | None = None):
        self.message = message
        self.line = line
        self.col = col
        self.token = token
        where = f"{line}:{col}: " if line else ""
        near = f" (near {token!r})" if token is not None else ""
        super().__init__(f"{where}{message}{near}")


@dataclass(frozen=True, slots=True)
class Sym:
    text: str
    line: int
    col: int

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True, slots=True)
class SList:
    items: tuple
    line: int
    col: int

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def head(self) -> str | None:
        if self.items and isinstance(self.items[0], Sym):
            return self.items[0].text
        return None


def is_number(text: str) -> bool:
    return _NUMBER_RE.match(text) is not None


def decode(data: str | bytes) -> str:
    if isinstance(data, str):
        return data
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        prefix = data[: exc.start].decode("utf-8", "replace")
        line = prefix.count("\n") + 1
        col = len(prefix) - (prefix.rfind("\n") + 1) + 1
        raise ParseError("invalid utf-8 byte", line, col) from None


def read_all(data: str | bytes) -> list:
    """Read every top-level expression. Symbols are lower-cased."""
    text = decode(data)
    stack: list[tuple[list, int, int]] = []
    top: list = []
    i, n = 0, len(text)
    line, col = 1, 1
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col, i = line + 1, 1, i + 1
            continue
        if ch in " \t\r\f\v":
            i, col = i + 1, col + 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            if len(stack) >= MAX_DEPTH:
                raise ParseError("nesting too deep", line, col, "(")
            stack.append(([], line, col))
            i, col = i + 1, col + 1
            continue
        if ch == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col, ")")
            items, l0, c0 = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][0] if stack else top).append(node)
            i, col = i + 1, col + 1
            continue
        low = ch.lower()
        if low not in _SYMBOL_CHARS:
            raise ParseError("unexpected character", line, col, ch)
        j = i
        while j < n and text[j].lower() in _SYMBOL_CHARS:
            j += 1
        sym = Sym(text[i:j].lower(), line, col)
        (stack[-1][0] if stack else top).append(sym)
        col += j - i
        i = j
    if stack:
        raise ParseError("unexpected end of input", line, col)
    return top
