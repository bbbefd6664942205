"""Formulas: representation, parsing, printing, degree and subformula closure."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

RESERVED = frozenset({"top", "bot"})
_IDENT = re.compile(r"[a-z][a-z0-9_]*\Z")


class Sign(enum.Enum):
    PLUS = "+"
    MINUS = "-"

    # members are singletons, so identity hashing agrees with equality and is much cheaper
    __hash__ = object.__hash__

    def __str__(self) -> str:
        return self.value

    def flip(self) -> "Sign":
        return Sign.MINUS if self is Sign.PLUS else Sign.PLUS

    @classmethod
    def parse(cls, text: str) -> "Sign":
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"bad sign {text!r}, expected + or -") from None


PLUS = Sign.PLUS
MINUS = Sign.MINUS
SIGNS = (PLUS, MINUS)


class Formula:
    """Base class of formula nodes. Nodes are immutable and hash-consed by value."""

    __slots__ = ()

    def __str__(self) -> str:
        return print_formula(self)

    def children(self) -> tuple["Formula", ...]:
        return ()

    @property
    def is_atomic(self) -> bool:
        return not isinstance(self, Binary)


@dataclass(frozen=True, eq=True)
class Atom(Formula):
    name: str

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not _IDENT.match(self.name):
            raise ValueError(f"invalid atom name {self.name!r}")
        if self.name in RESERVED:
            raise ValueError(f"{self.name!r} is reserved; use Top()/Bot()")

    def __hash__(self) -> int:
        return hash(("atom", self.name))

    def __repr__(self) -> str:
        return f"Atom({self.name!r})"


@dataclass(frozen=True, eq=True)
class Top(Formula):
    def __hash__(self) -> int:
        return 0x70F

    def __repr__(self) -> str:
        return "Top()"


@dataclass(frozen=True, eq=True)
class Bot(Formula):
    def __hash__(self) -> int:
        return 0xB07

    def __repr__(self) -> str:
        return "Bot()"


TOP = Top()
BOT = Bot()


@dataclass(frozen=True, eq=True)
class Binary(Formula):
    left: Formula
    right: Formula
    _hash: int = field(init=False, repr=False, compare=False)
    _degree: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_hash", hash((type(self).__name__, self.left, self.right)))
        object.__setattr__(self, "_degree", degree(self.left) + degree(self.right) + 1)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other: object) -> bool:
        if self is other:
            return True
        if type(self) is not type(other) or self._hash != other._hash:  # type: ignore[attr-defined]
            return False
        return self.left == other.left and self.right == other.right  # type: ignore[attr-defined]

    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.left!r}, {self.right!r})"


class And(Binary):
    pass


class Or(Binary):
    pass


class Imp(Binary):
    pass


class CoImp(Binary):
    """Co-implication; CoImp(a, b) is written a <- b."""


@dataclass(frozen=True, eq=True)
class StrongNeg(Formula):
    """Surface node for `~`. Only produced by parse_formula(..., expand=False)."""

    arg: Formula

    def __hash__(self) -> int:
        return hash(("~", self.arg))

    def children(self) -> tuple[Formula, ...]:
        return (self.arg,)


def degree(f: Formula) -> int:
    if isinstance(f, Binary):
        return f._degree
    if isinstance(f, StrongNeg):
        return degree(expand_strong_negation(f))
    return 0


def is_basic(f: Formula) -> bool:
    """Atoms and units; the base engine treats all of them as atoms."""
    return isinstance(f, (Atom, Top, Bot))


def atom_name(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Bot):
        return "bot"
    raise ValueError(f"{print_formula(f)} is not a basic sentence")


def basic(name: str) -> Formula:
    if name == "top":
        return TOP
    if name == "bot":
        return BOT
    return Atom(name)


def atoms_of(f: Formula) -> set[str]:
    out: set[str] = set()
    for g in subformulas(f):
        if isinstance(g, Atom):
            out.add(g.name)
    return out


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(g.children())


def subformula_closure(fs: Iterable[Formula]) -> frozenset[Formula]:
    out: set[Formula] = set()
    stack = list(fs)
    while stack:
        g = stack.pop()
        if g in out:
            continue
        out.add(g)
        stack.extend(g.children())
    return frozenset(out)


def strong_negation(f: Formula) -> Formula:
    """(f & (f -> (f <- f))) | ((f -> f) <- f)"""
    return Or(And(f, Imp(f, CoImp(f, f))), CoImp(Imp(f, f), f))


def expand_strong_negation(f: Formula) -> Formula:
    if isinstance(f, StrongNeg):
        return strong_negation(expand_strong_negation(f.arg))
    if isinstance(f, Binary):
        left = expand_strong_negation(f.left)
        right = expand_strong_negation(f.right)
        if left is f.left and right is f.right:
            return f
        return type(f)(left, right)
    return f


# -- parsing -----------------------------------------------------------------

class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        self.text = text
        self.pos = pos
        self.message = message
        super().__init__(f"{message} at column {pos + 1}: {text!r}")


_TOKEN = re.compile(r"\s*(?:(->|<-|[&|~()])|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, int]]:
    toks = []
    pos = 0
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        if m.group(3):
            raise ParseError(f"unexpected character {m.group(3)!r}", text, m.start(3))
        if m.group(1):
            toks.append((m.group(1), m.start(1)))
        else:
            word = m.group(2)
            if not _IDENT.match(word):
                raise ParseError(f"bad identifier {word!r}", text, m.start(2))
            toks.append((word, m.start(2)))
        pos = m.end()
    toks.append(("", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0]

    def take(self) -> tuple[str, int]:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg: str) -> ParseError:
        tok, pos = self.toks[self.i]
        return ParseError(msg if tok else msg + " (end of input)", self.text, pos)

    def formula(self) -> Formula:
        parts = [self.disj()]
        op = None
        while self.peek() in ("->", "<-"):
            tok, pos = self.take()
            if op is not None and tok != op:
                raise ParseError("cannot mix -> and <- without parentheses", self.text, pos)
            op = tok
            parts.append(self.disj())
        if op == "->":
            f = parts[-1]
            for g in reversed(parts[:-1]):
                f = Imp(g, f)
            return f
        if op == "<-":
            f = parts[0]
            for g in parts[1:]:
                f = CoImp(f, g)
            return f
        return parts[0]

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek() == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.coatom()
        while self.peek() == "&":
            self.take()
            f = And(f, self.coatom())
        return f

    def coatom(self) -> Formula:
        if self.peek() == "~":
            self.take()
            return StrongNeg(self.coatom())
        return self.atomic()

    def atomic(self) -> Formula:
        tok = self.peek()
        if tok == "(":
            self.take()
            f = self.formula()
            if self.peek() != ")":
                raise self.fail("expected ')'")
            self.take()
            return f
        if tok == "top":
            self.take()
            return TOP
        if tok == "bot":
            self.take()
            return BOT
        if tok and _IDENT.match(tok):
            self.take()
            return Atom(tok)
        raise self.fail("expected a formula")


def parse_formula(text: str, expand: bool = True) -> Formula:
    p = _Parser(text)
    f = p.formula()
    if p.peek() != "":
        raise p.fail("unexpected token")
    return expand_strong_negation(f) if expand else f


# -- printing ----------------------------------------------------------------

_OP = {And: "&", Or: "|", Imp: "->", CoImp: "<-"}


def _prec(f: Formula) -> int:
    if isinstance(f, (Imp, CoImp)):
        return 1
    if isinstance(f, Or):
        return 2
    if isinstance(f, And):
        return 3
    return 4


def print_formula(f: Formula) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Top):
        return "top"
    if isinstance(f, Bot):
        return "bot"
    if isinstance(f, StrongNeg):
        inner = print_formula(f.arg)
        return "~" + (inner if _prec(f.arg) == 4 else f"({inner})")
    assert isinstance(f, Binary)
    left, right = print_formula(f.left), print_formula(f.right)
    if isinstance(f, (And, Or)):
        p = _prec(f)
        wrap_l = _prec(f.left) < p
        wrap_r = _prec(f.right) <= p
    elif isinstance(f, Imp):
        wrap_l = _prec(f.left) <= 1
        wrap_r = isinstance(f.right, CoImp)
    else:
        wrap_l = isinstance(f.left, Imp)
        wrap_r = _prec(f.right) <= 1
    if wrap_l:
        left = f"({left})"
    if wrap_r:
        right = f"({right})"
    return f"{left} {_OP[type(f)]} {right}"


def formula_set_str(fs: Iterable[Formula]) -> str:
    items = sorted(print_formula(f) for f in fs)
    if not items:
        return "∅"
    return "{" + ", ".join(items) + "}"
