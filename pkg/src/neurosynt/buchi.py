"""LTL to Buchi automaton via the classic tableau (node-splitting)
construction, with counter-based degeneralization to a single
acceptance set.

Transitions are labeled with conjunctions of literals, represented as
frozensets of (atom, polarity) pairs; a label is satisfied by an
assignment (set of atoms true now) when every literal holds.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .ltl import (And, Atom, ConstFalse, ConstTrue, Equiv, Eventually,
                  Globally, Implies, LassoTrace, LtlFormula, Next, Not, Or,
                  Release, Until, atoms)

Label = frozenset[tuple[str, bool]]


def label_satisfied(label: Label, assignment: frozenset[str]) -> bool:
    return all((name in assignment) == pol for name, pol in label)


@dataclass(frozen=True)
class BuchiAutomaton:
    states: tuple[int, ...]
    initial: frozenset[int]
    accepting: frozenset[int]
    # state -> tuple of (label, successor)
    transitions: dict = field(compare=True, hash=False)
    alphabet: frozenset[str] = frozenset()

    def successors(self, state: int, assignment: frozenset[str]):
        for label, dest in self.transitions[state]:
            if label_satisfied(label, assignment):
                yield dest


def nnf(f: LtlFormula, negate: bool = False) -> LtlFormula:
    """Negation normal form over the core True/False/literal/And/Or/X/U/R."""
    if isinstance(f, ConstTrue):
        return ConstFalse() if negate else f
    if isinstance(f, ConstFalse):
        return ConstTrue() if negate else f
    if isinstance(f, Atom):
        return Not(f) if negate else f
    if isinstance(f, Not):
        return nnf(f.operand, not negate)
    if isinstance(f, And):
        cls = Or if negate else And
        return cls(nnf(f.left, negate), nnf(f.right, negate))
    if isinstance(f, Or):
        cls = And if negate else Or
        return cls(nnf(f.left, negate), nnf(f.right, negate))
    if isinstance(f, Implies):
        return nnf(Or(Not(f.left), f.right), negate)
    if isinstance(f, Equiv):
        expanded = Or(And(f.left, f.right), And(Not(f.left), Not(f.right)))
        return nnf(expanded, negate)
    if isinstance(f, Next):
        return Next(nnf(f.operand, negate))
    if isinstance(f, Eventually):
        return nnf(Until(ConstTrue(), f.operand), negate)
    if isinstance(f, Globally):
        return nnf(Release(ConstFalse(), f.operand), negate)
    if isinstance(f, Until):
        cls = Release if negate else Until
        return cls(nnf(f.left, negate), nnf(f.right, negate))
    if isinstance(f, Release):
        cls = Until if negate else Release
        return cls(nnf(f.left, negate), nnf(f.right, negate))
    raise TypeError(f"unknown node {f!r}")


@dataclass
class _Node:
    incoming: set[int]
    new: set[LtlFormula]
    old: set[LtlFormula]
    nxt: set[LtlFormula]


_INIT = 0


def _expand(node: _Node, nodes: dict[int, _Node], counter: itertools.count) -> None:
    if not node.new:
        key = (frozenset(node.old), frozenset(node.nxt))
        for nid, other in nodes.items():
            if (frozenset(other.old), frozenset(other.nxt)) == key:
                other.incoming |= node.incoming
                return
        nid = next(counter)
        nodes[nid] = node
        succ = _Node(incoming={nid}, new=set(node.nxt), old=set(), nxt=set())
        _expand(succ, nodes, counter)
        return

    eta = min(node.new, key=repr)  # deterministic pick
    node.new.discard(eta)

    if isinstance(eta, (ConstTrue, ConstFalse, Atom, Not)):
        if isinstance(eta, ConstFalse):
            return
        negation = _negate_literal(eta)
        if negation in node.old:
            return
        node.old.add(eta)
        _expand(node, nodes, counter)
        return
    if isinstance(eta, And):
        node.old.add(eta)
        node.new |= {eta.left, eta.right} - node.old
        _expand(node, nodes, counter)
        return
    if isinstance(eta, Next):
        node.old.add(eta)
        node.nxt.add(eta.operand)
        _expand(node, nodes, counter)
        return
    if isinstance(eta, (Or, Until, Release)):
        if isinstance(eta, Or):
            new1, next1 = {eta.left}, set()
            new2, next2 = {eta.right}, set()
        elif isinstance(eta, Until):
            new1, next1 = {eta.left}, {eta}
            new2, next2 = {eta.right}, set()
        else:  # Release: psi and (mu or X(mu R psi))
            new1, next1 = {eta.right, eta.left}, set()
            new2, next2 = {eta.right}, {eta}
        node1 = _Node(incoming=set(node.incoming), new=node.new | (new1 - node.old),
                      old=node.old | {eta}, nxt=node.nxt | next1)
        node2 = _Node(incoming=set(node.incoming), new=set(node.new) | (new2 - node.old),
                      old=set(node.old) | {eta}, nxt=set(node.nxt) | next2)
        _expand(node1, nodes, counter)
        _expand(node2, nodes, counter)
        return
    raise TypeError(f"formula not in NNF core: {eta!r}")


def _negate_literal(lit: LtlFormula) -> LtlFormula:
    if isinstance(lit, Not):
        return lit.operand
    if isinstance(lit, ConstTrue):
        return ConstFalse()
    if isinstance(lit, ConstFalse):
        return ConstTrue()
    return Not(lit)


def _node_label(node: _Node) -> Label | None:
    literals = []
    for f in node.old:
        if isinstance(f, Atom):
            literals.append((f.name, True))
        elif isinstance(f, Not) and isinstance(f.operand, Atom):
            literals.append((f.operand.name, False))
    label = frozenset(literals)
    names = [n for n, _ in label]
    if len(names) != len(set(names)):
        return None  # contradictory
    return label


def ltl_to_buchi(f: LtlFormula) -> BuchiAutomaton:
    """Automaton accepting exactly the words satisfying f."""
    core = nnf(f)
    nodes: dict[int, _Node] = {}
    counter = itertools.count(1)
    _expand(_Node(incoming={_INIT}, new={core}, old=set(), nxt=set()),
            nodes, counter)

    untils = sorted(_until_subformulas(core), key=repr)
    # Generalized acceptance: one set per Until subformula.
    gen_sets = []
    for u in untils:
        gen_sets.append(frozenset(
            nid for nid, n in nodes.items()
            if u not in n.old or u.right in n.old))
    if not gen_sets:
        gen_sets = [frozenset(nodes)]
    m = len(gen_sets)

    labels = {nid: _node_label(n) for nid, n in nodes.items()}

    # Degeneralize with a counter: leave an accepting state of set j -> j+1.
    states: list[int] = []
    transitions: dict[tuple[int, int], list] = {}
    index: dict[tuple[int, int], int] = {}

    def sid(nid: int, j: int) -> int:
        if (nid, j) not in index:
            index[(nid, j)] = len(index)
            states.append(index[(nid, j)])
        return index[(nid, j)]

    # Node labels constrain the letter read when entering the node, so a
    # dedicated initial state carries the edges into the tableau nodes.
    init_state = sid(-1, -1)
    edges: dict[int, list] = {}
    init_edges = []
    work = []
    seen = set()
    for nid, n in nodes.items():
        if labels[nid] is None:
            continue
        if _INIT in n.incoming:
            init_edges.append((labels[nid], sid(nid, 0)))
            if (nid, 0) not in seen:
                seen.add((nid, 0))
                work.append((nid, 0))
    edges[init_state] = init_edges
    while work:
        nid, j = work.pop()
        src = sid(nid, j)
        jj = (j + 1) % m if nid in gen_sets[j] else j
        outs = []
        for did, dn in nodes.items():
            if labels[did] is None or nid not in dn.incoming:
                continue
            outs.append((labels[did], sid(did, jj)))
            if (did, jj) not in seen:
                seen.add((did, jj))
                work.append((did, jj))
        edges[src] = outs
    for s in states:
        edges.setdefault(s, [])

    # A run is accepting iff it visits (F_0, counter 0) infinitely often:
    # each such visit forces the counter through every remaining set.
    accepting = frozenset(index[(nid, 0)] for nid in gen_sets[0]
                          if (nid, 0) in index)
    return BuchiAutomaton(
        states=tuple(sorted(edges)),
        initial=frozenset({init_state}),
        accepting=accepting,
        transitions=edges,
        alphabet=atoms(f),
    )


def _until_subformulas(f: LtlFormula) -> set[LtlFormula]:
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Until):
            out.add(g)
        if isinstance(g, (Not, Next, Eventually, Globally)):
            stack.append(g.operand)
        elif isinstance(g, (And, Or, Implies, Equiv, Until, Release)):
            stack.extend([g.left, g.right])
    return out


def accepts_lasso(a: BuchiAutomaton, t: LassoTrace) -> bool:
    """Exact membership of the lasso word in the automaton language."""
    steps = t.prefix + t.cycle
    n = len(steps)
    loop = len(t.prefix)

    def succ_pos(i: int) -> int:
        return i + 1 if i + 1 < n else loop

    # Nodes (state, position); search for a reachable accepting cycle.
    reachable: set[tuple[int, int]] = set()
    work = [(q, 0) for q in a.initial]
    graph: dict[tuple[int, int], list[tuple[int, int]]] = {}
    while work:
        node = work.pop()
        if node in reachable:
            continue
        reachable.add(node)
        q, i = node
        outs = [(d, succ_pos(i)) for d in a.successors(q, steps[i])]
        graph[node] = outs
        work.extend(outs)

    cycle_nodes = {nd for nd in reachable if nd[0] in a.accepting and nd[1] >= loop}
    for start in cycle_nodes:
        seen = set()
        stack = list(graph.get(start, []))
        while stack:
            nd = stack.pop()
            if nd == start:
                return True
            if nd in seen or nd not in reachable:
                continue
            seen.add(nd)
            stack.extend(graph.get(nd, []))
    return False
