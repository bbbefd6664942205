"""Minimal s-expression reader shared by the derivation, base and trace formats."""

from __future__ import annotations

import re
from typing import Union

_TOK = re.compile(r"\s*(?:(;[^\n]*)|(\()|(\))|([^\s()]+))")


class SexprError(ValueError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)


class Symbol(str):
    """A bare token, tagged with its source position."""

    line = 0
    col = 0


class SList(list):
    line = 0
    col = 0


Sexpr = Union[Symbol, SList]


def _position(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def read_all(text: str) -> list[Sexpr]:
    stack: list[SList] = [SList()]
    pos = 0
    while pos < len(text):
        m = _TOK.match(text, pos)
        if not m or m.end() == pos:
            break
        pos = m.end()
        if m.group(1):
            continue
        if m.group(2):
            lst = SList()
            lst.line, lst.col = _position(text, m.start(2))
            stack.append(lst)
        elif m.group(3):
            if len(stack) == 1:
                raise SexprError("unbalanced ')'", *_position(text, m.start(3)))
            done = stack.pop()
            stack[-1].append(done)
        else:
            sym = Symbol(m.group(4))
            sym.line, sym.col = _position(text, m.start(4))
            stack[-1].append(sym)
    if len(stack) > 1:
        lst = stack[-1]
        raise SexprError("unclosed '('", lst.line, lst.col)
    return list(stack[0])


def read_one(text: str) -> SList:
    items = read_all(text)
    if len(items) != 1 or not isinstance(items[0], SList):
        raise SexprError("expected exactly one parenthesised expression")
    return items[0]


def flatten(items) -> str:
    """Rebuild source text from symbols and nested lists."""
    parts = []
    for it in items:
        if isinstance(it, list):
            parts.append("(" + flatten(it) + ")")
        else:
            parts.append(str(it))
    return " ".join(parts)


def where(item) -> tuple[int, int]:
    return getattr(item, "line", 0), getattr(item, "col", 0)
