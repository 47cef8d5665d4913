"""Shared test utilities: random ASTs, lasso enumeration, and an
independent brute-force semantics oracle based on positional scanning of
the unrolled word (never on the fixpoint evaluator under test)."""

from __future__ import annotations

import itertools
import random

from neurosynt.ltl import (And, Atom, ConstFalse, ConstTrue, Equiv,
                           Eventually, Globally, Implies, LassoTrace,
                           LtlFormula, Next, Not, Or, Release, Until)

LEAVES = [ConstTrue(), ConstFalse()]
UNARY = [Not, Next, Eventually, Globally]
BINARY = [And, Or, Implies, Equiv, Until, Release]


def random_formula(rng: random.Random, depth: int, atom_names=("a", "b")) -> LtlFormula:
    if depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.2:
            return rng.choice(LEAVES)
        return Atom(rng.choice(atom_names))
    if rng.random() < 0.45:
        return rng.choice(UNARY)(random_formula(rng, depth - 1, atom_names))
    op = rng.choice(BINARY)
    return op(random_formula(rng, depth - 1, atom_names),
              random_formula(rng, depth - 1, atom_names))


def random_lasso(rng: random.Random, atom_names=("a", "b"),
                 max_prefix=3, max_cycle=3) -> LassoTrace:
    def assignment():
        return frozenset(a for a in atom_names if rng.random() < 0.5)

    prefix = tuple(assignment() for _ in range(rng.randrange(max_prefix + 1)))
    cycle = tuple(assignment() for _ in range(1, rng.randrange(1, max_cycle + 1) + 1))
    return LassoTrace(prefix, cycle[: max_cycle])


def all_lassos(atom_names=("a", "b"), max_prefix=1, max_cycle=2):
    """Exhaustive enumeration of small lassos."""
    assignments = [frozenset(s) for n in range(len(atom_names) + 1)
                   for s in itertools.combinations(atom_names, n)]
    for plen in range(max_prefix + 1):
        for clen in range(1, max_cycle + 1):
            for prefix in itertools.product(assignments, repeat=plen):
                for cycle in itertools.product(assignments, repeat=clen):
                    yield LassoTrace(tuple(prefix), tuple(cycle))


def enumerate_formulas(max_nodes: int, atom_names=("a", "b")):
    """All ASTs with at most max_nodes nodes (exact for small sizes)."""
    by_size: dict[int, list[LtlFormula]] = {1: [ConstTrue(), ConstFalse()]
                                            + [Atom(a) for a in atom_names]}
    for n in range(2, max_nodes + 1):
        formulas: list[LtlFormula] = []
        for sub in by_size[n - 1]:
            formulas.extend(op(sub) for op in UNARY)
        for i in range(1, n - 1):
            for left in by_size[i]:
                for right in by_size[n - 1 - i]:
                    formulas.extend(op(left, right) for op in BINARY)
        by_size[n] = formulas
    return [f for fs in by_size.values() for f in fs]


def brute_eval(f: LtlFormula, t: LassoTrace) -> bool:
    """Positional-scan semantics on the unrolled word; the horizon
    3 * (|prefix| + |cycle|) covers a full period from any position."""
    p, c = len(t.prefix), len(t.cycle)
    horizon = 3 * (p + c)
    word = list(t.prefix) + list(t.cycle)

    def at(i: int) -> frozenset[str]:
        return word[i] if i < p else word[p + (i - p) % c]

    def ev(g: LtlFormula, i: int) -> bool:
        if isinstance(g, ConstTrue):
            return True
        if isinstance(g, ConstFalse):
            return False
        if isinstance(g, Atom):
            return g.name in at(i)
        if isinstance(g, Not):
            return not ev(g.operand, i)
        if isinstance(g, And):
            return ev(g.left, i) and ev(g.right, i)
        if isinstance(g, Or):
            return ev(g.left, i) or ev(g.right, i)
        if isinstance(g, Implies):
            return (not ev(g.left, i)) or ev(g.right, i)
        if isinstance(g, Equiv):
            return ev(g.left, i) == ev(g.right, i)
        if isinstance(g, Next):
            return ev(g.operand, i + 1)
        if isinstance(g, Eventually):
            return any(ev(g.operand, j) for j in range(i, i + horizon + 1))
        if isinstance(g, Globally):
            return all(ev(g.operand, j) for j in range(i, i + horizon + 1))
        if isinstance(g, Until):
            for j in range(i, i + horizon + 1):
                if ev(g.right, j):
                    return True
                if not ev(g.left, j):
                    return False
            return False
        if isinstance(g, Release):
            for j in range(i, i + horizon + 1):
                if not ev(g.right, j):
                    return False
                if ev(g.left, j):
                    return True
            return True
        raise TypeError(g)

    return ev(f, 0)


ARBITER_AAG = """aag 3 2 1 2 0
2
4
6 7
7
6
i0 r_0
i1 r_1
l0 l0
o0 g_0
o1 g_1
"""

ARBITER_SPEC_JSON = {
    "semantics": "mealy",
    "inputs": ["r_0", "r_1"],
    "outputs": ["g_0", "g_1"],
    "assumptions": [],
    "guarantees": ["(G ((! (g_0)) | (! (g_1))))",
                   "(G ((r_0) -> (F (g_0))))",
                   "(G ((r_1) -> (F (g_1))))"],
}
