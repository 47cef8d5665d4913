"""Model checking of AIGER circuits against decomposed LTL specifications.

A realizable claim checks that every run of the system circuit (under all
input sequences) satisfies the specification formula, as emptiness of the
product with the Buchi automaton of the negated formula, searched with a
nested depth-first search in fixed declaration order.

An unrealizable claim checks an environment circuit: it reads the
specification outputs with a one-step delay (Moore-style counter-strategy)
and drives the inputs; every run must then satisfy the negated formula.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional

from . import aiger
from .aiger import AigerCircuit, CircuitState
from .buchi import BuchiAutomaton, ltl_to_buchi
from .ltl import (DecompSpec, LassoTrace, LtlFormula, Not, eval_lasso,
                  spec_to_formula)


class McStatus(Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    ERROR = "error"
    TIMEOUT = "timeout"
    INVALID = "invalid"


@dataclass(frozen=True)
class McSolution:
    status: McStatus
    counterexample: Optional[LassoTrace] = None
    time: float = 0.0
    detail: str = ""

    def __post_init__(self):
        if (self.counterexample is not None) != (self.status is McStatus.VIOLATED):
            raise ValueError("counterexample present iff status is violated")


class _Deadline:
    def __init__(self, budget_s: float):
        self.end = time.monotonic() + budget_s
        self.ticks = 0

    def poll(self) -> None:
        self.ticks += 1
        if self.ticks % 256 == 0 and time.monotonic() > self.end:
            raise _TimeoutSignal()

    def expired(self) -> bool:
        return time.monotonic() > self.end


class _TimeoutSignal(Exception):
    pass


@lru_cache(maxsize=256)
def _negated_automaton(f: LtlFormula) -> BuchiAutomaton:
    return ltl_to_buchi(Not(f))


def _match(circuit_names: list[str], wanted: tuple[str, ...]) -> Optional[list[int]]:
    """Map each wanted name to a circuit index: by symbol, else positional."""
    if len(circuit_names) != len(wanted):
        return None
    if set(circuit_names) >= set(wanted):
        return [circuit_names.index(name) for name in wanted]
    return list(range(len(wanted)))


class _SystemStepper:
    """Mealy system: reads spec inputs, drives spec outputs."""

    def __init__(self, c: AigerCircuit, spec: DecompSpec):
        self.c = c
        self.in_map = _match(c.input_names(), spec.inputs)
        self.out_map = _match(c.output_names(), spec.outputs)
        self.ok = self.in_map is not None and self.out_map is not None
        self.spec = spec

    def initial(self):
        return CircuitState.initial(self.c)

    def step(self, state, universal_bits: tuple[bool, ...]):
        """universal_bits are the spec-input values; returns (assignment, state')."""
        circuit_in = [False] * self.c.num_inputs
        for k, bit in zip(self.in_map, universal_bits):
            circuit_in[k] = bit
        out_bits, nxt = aiger.step(self.c, state, tuple(circuit_in))
        assignment = frozenset(
            [n for n, b in zip(self.spec.inputs, universal_bits) if b]
            + [self.spec.outputs[j] for j, k in enumerate(self.out_map)
               if out_bits[k]]
        )
        return assignment, nxt


class _EnvironmentStepper:
    """Environment counter-strategy: reads spec outputs delayed by one
    step, drives spec inputs; the universal choices are the outputs."""

    def __init__(self, c: AigerCircuit, spec: DecompSpec):
        self.c = c
        self.in_map = _match(c.input_names(), spec.outputs)
        self.out_map = _match(c.output_names(), spec.inputs)
        self.ok = self.in_map is not None and self.out_map is not None
        self.spec = spec

    def initial(self):
        return (CircuitState.initial(self.c), (False,) * len(self.spec.outputs))

    def step(self, state, universal_bits: tuple[bool, ...]):
        """universal_bits are the spec-output values chosen this step."""
        latch_state, prev_out = state
        circuit_in = [False] * self.c.num_inputs
        for k, bit in zip(self.in_map, prev_out):
            circuit_in[k] = bit
        out_bits, nxt = aiger.step(self.c, latch_state, tuple(circuit_in))
        assignment = frozenset(
            [self.spec.inputs[j] for j, k in enumerate(self.out_map)
             if out_bits[k]]
            + [n for n, b in zip(self.spec.outputs, universal_bits) if b]
        )
        return assignment, (nxt, universal_bits)


def _universal_choices(n: int) -> list[tuple[bool, ...]]:
    return [tuple(bool(m >> k & 1) for k in range(n)) for m in range(1 << n)]


def check(c: AigerCircuit, spec: DecompSpec, realizable_claim: bool,
          budget: float = 10.0) -> McSolution:
    """Decide whether the circuit witnesses the claimed (un)realizability."""
    start = time.monotonic()
    if budget <= 0:
        return McSolution(McStatus.TIMEOUT, time=0.0, detail="zero budget")
    formula = spec_to_formula(spec)
    try:
        if realizable_claim:
            stepper = _SystemStepper(c, spec)
            target = formula
            universal = spec.inputs
        else:
            stepper = _EnvironmentStepper(c, spec)
            target = Not(formula)
            universal = spec.outputs
        if not stepper.ok:
            return McSolution(McStatus.INVALID, time=time.monotonic() - start,
                              detail="circuit interface does not match specification")
        automaton = _negated_automaton(target)
        deadline = _Deadline(budget)
        lasso = _find_accepting_lasso(stepper, automaton, len(universal), deadline)
    except _TimeoutSignal:
        return McSolution(McStatus.TIMEOUT, time=time.monotonic() - start)
    except Exception as e:  # pragma: no cover - internal failure path
        return McSolution(McStatus.ERROR, time=time.monotonic() - start,
                          detail=repr(e))
    elapsed = time.monotonic() - start
    if lasso is None:
        return McSolution(McStatus.SATISFIED, time=elapsed)
    prefix, cycle = lasso
    return McSolution(McStatus.VIOLATED,
                      counterexample=LassoTrace(tuple(prefix), tuple(cycle)),
                      time=elapsed)


def _find_accepting_lasso(stepper, automaton: BuchiAutomaton, n_universal: int,
                          deadline: _Deadline):
    """Nested DFS for an accepting cycle in the circuit x automaton product.

    Returns (prefix, cycle) as lists of assignments, or None if the
    product language is empty.  Visitation follows declaration order of
    universal assignments and automaton states, so results are
    deterministic.
    """
    choices = _universal_choices(n_universal)
    succ_cache: dict = {}

    def successors(node):
        if node in succ_cache:
            return succ_cache[node]
        cstate, q = node
        outs = []
        for u in choices:
            assignment, nxt = stepper.step(cstate, u)
            for dest in automaton.successors(q, assignment):
                outs.append((assignment, (nxt, dest)))
        succ_cache[node] = outs
        return outs

    sys.setrecursionlimit(max(sys.getrecursionlimit(), 200000))
    blue: set = set()
    red: set = set()
    cyan: set = set()
    result: list = []

    def dfs_red(node, path):
        deadline.poll()
        for label, t in successors(node):
            if t in cyan:
                result.append((t, path + [label]))
                return True
            if t not in red:
                red.add(t)
                if dfs_red(t, path + [label]):
                    return True
        return False

    def dfs_blue(node, path):
        deadline.poll()
        cyan.add(node)
        for label, t in successors(node):
            if t not in blue and t not in cyan:
                found = dfs_blue(t, path + [(label, t)])
                if found:
                    return found
        if node[1] in automaton.accepting:
            red.clear()
            if dfs_red(node, []):
                # The red path runs node -> hit with hit on the blue stack;
                # the cycle starts at hit, runs down the stack to node, then
                # follows the red path back to hit.
                hit, red_labels = result.pop()
                stack_nodes = [p[1] for p in path]
                prefix_labels = [p[0] for p in path]
                if hit == node:
                    return prefix_labels, red_labels
                if hit in stack_nodes:
                    i = stack_nodes.index(hit)
                    return prefix_labels[: i + 1], prefix_labels[i + 1:] + red_labels
                # hit is the initial node itself
                return [], prefix_labels + red_labels
        cyan.discard(node)
        blue.add(node)
        return None

    initial_cstate = stepper.initial()
    for q in sorted(automaton.initial):
        node = (initial_cstate, q)
        if node in blue:
            continue
        found = dfs_blue(node, [])
        if found:
            prefix, cycle = found
            if not cycle:  # degenerate; should not happen
                continue
            return list(prefix), list(cycle)
    return None


def check_trace(spec: DecompSpec, t: LassoTrace) -> bool:
    return eval_lasso(spec_to_formula(spec), t)
