"""Reader for prefix-notation LTL token streams."""

from __future__ import annotations

from .ltl_tokens import ALL_BINARY, UNARY, LtlParseError, Node, _tokenize


def parse_prefix(text: str) -> Node:
    tokens = _tokenize(text)

    def read(pos: int) -> tuple[Node, int]:
        if pos >= len(tokens):
            raise LtlParseError("unexpected end of formula")
        tok = tokens[pos]
        if tok in UNARY:
            child, pos = read(pos + 1)
            return Node(tok, (child,)), pos
        if tok in ALL_BINARY:
            left, pos = read(pos + 1)
            right, pos = read(pos)
            return Node(tok, (left, right)), pos
        if tok in {"(", ")"}:
            raise LtlParseError("parentheses not allowed in prefix notation")
        return Node(tok), pos + 1

    node, end = read(0)
    if end != len(tokens):
        raise LtlParseError(f"trailing token {tokens[end]!r}")
    return node
