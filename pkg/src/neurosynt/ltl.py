"""LTL abstract syntax, parsing, serialization and lasso-trace semantics.

Formulas are immutable trees of frozen dataclasses.  Two textual notations
are supported: fully parenthesized infix (the format used by the
assume-guarantee JSON input files) and whitespace-separated Polish prefix.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator


class Notation(Enum):
    INFIX = "infix"
    PREFIX = "prefix"


class Semantics(Enum):
    MEALY = "mealy"
    MOORE = "moore"


@dataclass(frozen=True)
class LtlFormula:
    pass


@dataclass(frozen=True)
class ConstTrue(LtlFormula):
    pass


@dataclass(frozen=True)
class ConstFalse(LtlFormula):
    pass


@dataclass(frozen=True)
class Atom(LtlFormula):
    name: str


@dataclass(frozen=True)
class Not(LtlFormula):
    operand: LtlFormula


@dataclass(frozen=True)
class Next(LtlFormula):
    operand: LtlFormula


@dataclass(frozen=True)
class Eventually(LtlFormula):
    operand: LtlFormula


@dataclass(frozen=True)
class Globally(LtlFormula):
    operand: LtlFormula


@dataclass(frozen=True)
class And(LtlFormula):
    left: LtlFormula
    right: LtlFormula


@dataclass(frozen=True)
class Or(LtlFormula):
    left: LtlFormula
    right: LtlFormula


@dataclass(frozen=True)
class Implies(LtlFormula):
    left: LtlFormula
    right: LtlFormula


@dataclass(frozen=True)
class Equiv(LtlFormula):
    left: LtlFormula
    right: LtlFormula


@dataclass(frozen=True)
class Until(LtlFormula):
    left: LtlFormula
    right: LtlFormula


@dataclass(frozen=True)
class Release(LtlFormula):
    left: LtlFormula
    right: LtlFormula


UNARY_OPS = {"!": Not, "X": Next, "F": Eventually, "G": Globally}
BINARY_OPS = {
    "&": And,
    "|": Or,
    "->": Implies,
    "<->": Equiv,
    "U": Until,
    "R": Release,
}
_OP_TOKEN = {v: k for k, v in UNARY_OPS.items()} | {v: k for k, v in BINARY_OPS.items()}

_IDENT_RE = re.compile(r"[a-zA-Z_][a-zA-Z0-9_]*")
_RESERVED = {"X", "F", "G", "U", "R", "true", "false"}


class LtlSyntaxError(ValueError):
    """Raised on malformed formula text; carries the byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownTokenError(LtlSyntaxError):
    pass


def _tokenize(text: str) -> Iterator[tuple[str, int]]:
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c in "()!&|":
            yield c, i
            i += 1
        elif text.startswith("<->", i):
            yield "<->", i
            i += 3
        elif text.startswith("->", i):
            yield "->", i
            i += 2
        else:
            m = _IDENT_RE.match(text, i)
            if not m:
                raise UnknownTokenError(f"unknown token {c!r}", i)
            yield m.group(), i
            i = m.end()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = list(_tokenize(text))
        self.pos = 0

    def peek(self) -> str | None:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def next(self) -> tuple[str, int]:
        if self.pos >= len(self.tokens):
            raise LtlSyntaxError("unexpected end of input", len(self.text))
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, tok: str) -> None:
        got, off = self.next()
        if got != tok:
            raise LtlSyntaxError(f"expected {tok!r}, got {got!r}", off)

    # Precedence, loosest first: <->, ->, |, &, U/R, unary.
    def parse(self) -> LtlFormula:
        f = self.equiv()
        if self.pos < len(self.tokens):
            tok, off = self.tokens[self.pos]
            raise LtlSyntaxError(f"trailing input {tok!r}", off)
        return f

    def equiv(self) -> LtlFormula:
        left = self.impl()
        if self.peek() == "<->":
            self.next()
            return Equiv(left, self.equiv())
        return left

    def impl(self) -> LtlFormula:
        left = self.disj()
        if self.peek() == "->":
            self.next()
            return Implies(left, self.impl())
        return left

    def disj(self) -> LtlFormula:
        left = self.conj()
        if self.peek() == "|":
            self.next()
            return Or(left, self.disj())
        return left

    def conj(self) -> LtlFormula:
        left = self.until_release()
        if self.peek() == "&":
            self.next()
            return And(left, self.conj())
        return left

    def until_release(self) -> LtlFormula:
        left = self.unary()
        if self.peek() == "U":
            self.next()
            return Until(left, self.until_release())
        if self.peek() == "R":
            self.next()
            return Release(left, self.until_release())
        return left

    def unary(self) -> LtlFormula:
        tok, off = self.next()
        if tok in UNARY_OPS:
            return UNARY_OPS[tok](self.unary())
        if tok == "(":
            f = self.equiv()
            self.expect(")")
            return f
        if tok == "true":
            return ConstTrue()
        if tok == "false":
            return ConstFalse()
        if _IDENT_RE.fullmatch(tok) and tok not in _RESERVED:
            return Atom(tok)
        raise LtlSyntaxError(f"unexpected token {tok!r}", off)


def _parse_prefix(tokens: list[tuple[str, int]], text_len: int) -> tuple[LtlFormula, int]:
    def rec(i: int) -> tuple[LtlFormula, int]:
        if i >= len(tokens):
            raise LtlSyntaxError("unexpected end of input", text_len)
        tok, off = tokens[i]
        if tok in UNARY_OPS:
            sub, j = rec(i + 1)
            return UNARY_OPS[tok](sub), j
        if tok in BINARY_OPS:
            left, j = rec(i + 1)
            right, k = rec(j)
            return BINARY_OPS[tok](left, right), k
        if tok == "true":
            return ConstTrue(), i + 1
        if tok == "false":
            return ConstFalse(), i + 1
        if _IDENT_RE.fullmatch(tok) and tok not in _RESERVED:
            return Atom(tok), i + 1
        raise LtlSyntaxError(f"unexpected token {tok!r}", off)

    return rec(0)


def parse_ltl(text: str, notation: Notation = Notation.INFIX) -> LtlFormula:
    if not text.strip():
        raise LtlSyntaxError("empty formula", 0)
    if notation is Notation.INFIX:
        return _Parser(text).parse()
    tokens = list(_tokenize(text))
    formula, end = _parse_prefix(tokens, len(text))
    if end != len(tokens):
        tok, off = tokens[end]
        raise LtlSyntaxError(f"trailing input {tok!r}", off)
    return formula


def serialize_ltl(f: LtlFormula, notation: Notation = Notation.INFIX) -> str:
    if notation is Notation.INFIX:
        return _infix(f)
    return " ".join(_prefix_tokens(f))


def _infix(f: LtlFormula) -> str:
    # Fully parenthesized, matching the assume-guarantee input file style.
    if isinstance(f, ConstTrue):
        return "(true)"
    if isinstance(f, ConstFalse):
        return "(false)"
    if isinstance(f, Atom):
        return f"({f.name})"
    if isinstance(f, (Not, Next, Eventually, Globally)):
        return f"({_OP_TOKEN[type(f)]} {_infix(f.operand)})"
    return f"({_infix(f.left)} {_OP_TOKEN[type(f)]} {_infix(f.right)})"


def _prefix_tokens(f: LtlFormula) -> list[str]:
    if isinstance(f, ConstTrue):
        return ["true"]
    if isinstance(f, ConstFalse):
        return ["false"]
    if isinstance(f, Atom):
        return [f.name]
    if isinstance(f, (Not, Next, Eventually, Globally)):
        return [_OP_TOKEN[type(f)]] + _prefix_tokens(f.operand)
    return [_OP_TOKEN[type(f)]] + _prefix_tokens(f.left) + _prefix_tokens(f.right)


def ast_size(f: LtlFormula) -> int:
    if isinstance(f, (ConstTrue, ConstFalse, Atom)):
        return 1
    if isinstance(f, (Not, Next, Eventually, Globally)):
        return 1 + ast_size(f.operand)
    return 1 + ast_size(f.left) + ast_size(f.right)


def atoms(f: LtlFormula) -> frozenset[str]:
    if isinstance(f, Atom):
        return frozenset({f.name})
    if isinstance(f, (ConstTrue, ConstFalse)):
        return frozenset()
    if isinstance(f, (Not, Next, Eventually, Globally)):
        return atoms(f.operand)
    return atoms(f.left) | atoms(f.right)


@dataclass(frozen=True)
class DecompSpec:
    """Decomposed specification: inputs, outputs, assumptions, guarantees."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    assumptions: tuple[LtlFormula, ...] = ()
    guarantees: tuple[LtlFormula, ...] = ()
    semantics: Semantics = Semantics.MEALY

    def __post_init__(self):
        overlap = set(self.inputs) & set(self.outputs)
        if overlap:
            raise ValueError(f"inputs and outputs overlap: {sorted(overlap)}")
        declared = set(self.inputs) | set(self.outputs)
        for f in self.assumptions + self.guarantees:
            undeclared = atoms(f) - declared
            if undeclared:
                raise ValueError(f"undeclared atoms: {sorted(undeclared)}")

    @property
    def properties(self) -> tuple[LtlFormula, ...]:
        return self.assumptions + self.guarantees

    @classmethod
    def from_dict(cls, d: dict) -> "DecompSpec":
        return cls(
            inputs=tuple(d["inputs"]),
            outputs=tuple(d["outputs"]),
            assumptions=tuple(parse_ltl(a) for a in d.get("assumptions", [])),
            guarantees=tuple(parse_ltl(g) for g in d.get("guarantees", [])),
            semantics=Semantics(d.get("semantics", "mealy").lower()),
        )

    def to_dict(self) -> dict:
        return {
            "semantics": self.semantics.value,
            "inputs": list(self.inputs),
            "outputs": list(self.outputs),
            "assumptions": [serialize_ltl(a) for a in self.assumptions],
            "guarantees": [serialize_ltl(g) for g in self.guarantees],
        }


def conjoin(fs: tuple[LtlFormula, ...]) -> LtlFormula:
    if not fs:
        return ConstTrue()
    result = fs[-1]
    for f in reversed(fs[:-1]):
        result = And(f, result)
    return result


def spec_to_formula(s: DecompSpec) -> LtlFormula:
    guarantee = conjoin(s.guarantees)
    if not s.assumptions:
        return guarantee
    return Implies(conjoin(s.assumptions), guarantee)


@dataclass(frozen=True)
class LassoTrace:
    """Ultimately periodic word prefix . cycle^omega over sets of atoms."""

    prefix: tuple[frozenset[str], ...]
    cycle: tuple[frozenset[str], ...]

    def __post_init__(self):
        if len(self.cycle) < 1:
            raise ValueError("cycle must be non-empty")

    @classmethod
    def of(cls, prefix, cycle) -> "LassoTrace":
        return cls(
            tuple(frozenset(a) for a in prefix),
            tuple(frozenset(a) for a in cycle),
        )

    def to_dict(self) -> dict:
        return {
            "prefix": [sorted(a) for a in self.prefix],
            "cycle": [sorted(a) for a in self.cycle],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LassoTrace":
        return cls.of(d.get("prefix", []), d["cycle"])


def eval_lasso(f: LtlFormula, t: LassoTrace) -> bool:
    """Exact satisfaction of f on the ultimately periodic word of t.

    Until/Release values on the cycle are computed as least/greatest
    fixpoints over the finitely many distinct positions.
    """
    steps = t.prefix + t.cycle
    n = len(steps)
    loop = len(t.prefix)

    def succ(i: int) -> int:
        return i + 1 if i + 1 < n else loop

    cache: dict[LtlFormula, list[bool]] = {}

    def vals(g: LtlFormula) -> list[bool]:
        if g in cache:
            return cache[g]
        if isinstance(g, ConstTrue):
            v = [True] * n
        elif isinstance(g, ConstFalse):
            v = [False] * n
        elif isinstance(g, Atom):
            v = [g.name in steps[i] for i in range(n)]
        elif isinstance(g, Not):
            v = [not x for x in vals(g.operand)]
        elif isinstance(g, And):
            lv, rv = vals(g.left), vals(g.right)
            v = [a and b for a, b in zip(lv, rv)]
        elif isinstance(g, Or):
            lv, rv = vals(g.left), vals(g.right)
            v = [a or b for a, b in zip(lv, rv)]
        elif isinstance(g, Implies):
            lv, rv = vals(g.left), vals(g.right)
            v = [(not a) or b for a, b in zip(lv, rv)]
        elif isinstance(g, Equiv):
            lv, rv = vals(g.left), vals(g.right)
            v = [a == b for a, b in zip(lv, rv)]
        elif isinstance(g, Next):
            sv = vals(g.operand)
            v = [sv[succ(i)] for i in range(n)]
        elif isinstance(g, Until):
            v = _lfp(vals(g.left), vals(g.right), succ, n)
        elif isinstance(g, Eventually):
            v = _lfp([True] * n, vals(g.operand), succ, n)
        elif isinstance(g, Release):
            v = _gfp(vals(g.left), vals(g.right), succ, n)
        elif isinstance(g, Globally):
            v = _gfp([False] * n, vals(g.operand), succ, n)
        else:  # pragma: no cover
            raise TypeError(f"unknown node {g!r}")
        cache[g] = v
        return v

    return vals(f)[0]


def _lfp(a: list[bool], b: list[bool], succ, n: int) -> list[bool]:
    # a U b: least fixpoint of v[i] = b[i] | (a[i] & v[succ(i)]).
    v = list(b)
    for _ in range(n):
        new = [b[i] or (a[i] and v[succ(i)]) for i in range(n)]
        if new == v:
            break
        v = new
    return v


def _gfp(a: list[bool], b: list[bool], succ, n: int) -> list[bool]:
    # a R b: greatest fixpoint of v[i] = b[i] & (a[i] | v[succ(i)]).
    v = [True] * n
    for _ in range(n + 1):
        new = [b[i] and (a[i] or v[succ(i)]) for i in range(n)]
        if new == v:
            break
        v = new
    return v
