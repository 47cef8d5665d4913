"""Tokenization of LTL formulas for the encoder.

Parses the wire format's infix strings into prefix token sequences with
tree positions (the path of child indices from the root), which feed the
tree positional encoding.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class LtlParseError(ValueError):
    pass


UNARY = {"!", "X", "F", "G"}
BINARY_LEVELS = [["<->"], ["->"], ["|"], ["&"], ["U", "R"]]
ALL_BINARY = {op for level in BINARY_LEVELS for op in level}

_TOKEN_RE = re.compile(r"<->|->|[!&|()URXFG](?![A-Za-z0-9_])|[!&|()]"
                       r"|[A-Za-z_][A-Za-z0-9_]*")


@dataclass(frozen=True)
class Node:
    label: str
    children: tuple = ()


def _tokenize(text: str) -> list[str]:
    out = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise LtlParseError(f"bad character {text[pos]!r} at {pos}")
        out.append(m.group())
        pos = m.end()
    return out


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise LtlParseError("unexpected end of formula")
        self.pos += 1
        return tok

    def parse(self) -> Node:
        node = self.binary(0)
        if self.peek() is not None:
            raise LtlParseError(f"trailing token {self.peek()!r}")
        return node

    def binary(self, level: int) -> Node:
        if level == len(BINARY_LEVELS):
            return self.unary()
        left = self.binary(level + 1)
        op = self.peek()
        if op in BINARY_LEVELS[level]:
            self.take()
            right = self.binary(level)  # right-associative
            return Node(op, (left, right))
        return left

    def unary(self) -> Node:
        tok = self.peek()
        if tok in UNARY:
            self.take()
            return Node(tok, (self.unary(),))
        if tok == "(":
            self.take()
            inner = self.binary(0)
            if self.take() != ")":
                raise LtlParseError("expected ')'")
            return inner
        tok = self.take()
        if tok in ALL_BINARY or tok in {")", "("}:
            raise LtlParseError(f"unexpected {tok!r}")
        return Node(tok)


def parse_infix(text: str) -> Node:
    return _Parser(_tokenize(text)).parse()


def prefix_tokens(node: Node) -> list[str]:
    out = [node.label]
    for child in node.children:
        out.extend(prefix_tokens(child))
    return out


def tree_positions(node: Node) -> list[tuple[int, ...]]:
    """Paths of child indices in prefix order; the root path is ()."""
    out: list[tuple[int, ...]] = []

    def walk(n: Node, path: tuple[int, ...]):
        out.append(path)
        for k, child in enumerate(n.children):
            walk(child, path + (k,))

    walk(node, ())
    return out


def ast_size(node: Node) -> int:
    return 1 + sum(ast_size(c) for c in node.children)
