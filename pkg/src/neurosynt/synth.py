"""Bounded synthesis by enumeration of Mealy machines.

Candidates are searched by filling the transition table cell by cell;
counterexample input words collected from failed model-checking runs
prune partial tables long before they are complete.  Unrealizability is
proved the same way by synthesizing an environment counter-strategy on
the dualized problem (the environment observes outputs with a one-step
delay and drives the inputs).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from . import mc
from .aiger import AigerCircuit
from .ltl import DecompSpec, LassoTrace, LtlFormula, Not, eval_lasso, spec_to_formula
from .mc import McStatus


class SynStatus(Enum):
    REALIZABLE = "realizable"
    UNREALIZABLE = "unrealizable"
    ERROR = "error"
    TIMEOUT = "timeout"
    NONSUCCESS = "nonsuccess"


@dataclass(frozen=True)
class MealyMachine:
    """Deterministic transducer; transition[s][input_mask] = (output_mask, next)."""

    n_states: int
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    transition: tuple[tuple[tuple[int, int], ...], ...]
    initial: int = 0

    def step(self, state: int, input_mask: int) -> tuple[int, int]:
        return self.transition[state][input_mask]


@dataclass(frozen=True)
class SynthesisResult:
    status: SynStatus
    circuit: Optional[AigerCircuit] = None
    machine: Optional[MealyMachine] = None
    detail: str = ""
    time: float = 0.0

    @property
    def realizable(self) -> Optional[bool]:
        if self.status is SynStatus.REALIZABLE:
            return True
        if self.status is SynStatus.UNREALIZABLE:
            return False
        return None


def _mask_to_assignment(mask: int, names: tuple[str, ...]) -> frozenset[str]:
    return frozenset(n for k, n in enumerate(names) if mask >> k & 1)


def _assignment_to_mask(assignment: frozenset[str], names: tuple[str, ...]) -> int:
    return sum(1 << k for k, n in enumerate(names) if n in assignment)


class _CellSearch:
    """DFS over partially defined transition tables.

    `observe_names` are the atoms the machine reads (its input alphabet),
    `drive_names` the atoms it emits.  For the environment role the
    observation is delayed by one step.  Cached counterexample words over
    the observed... driven complement prune partial tables whose induced
    trace already has the wrong verdict.
    """

    def __init__(self, n_states: int, observe_names: tuple[str, ...],
                 drive_names: tuple[str, ...], formula: LtlFormula,
                 want_formula: bool, env_role: bool, deadline: float):
        self.n = n_states
        self.observe_names = observe_names
        self.drive_names = drive_names
        self.n_obs = 1 << len(observe_names)
        self.n_drive = 1 << len(drive_names)
        self.formula = formula
        self.want = want_formula  # trace must satisfy formula (True) or violate it
        self.env_role = env_role
        self.deadline = deadline
        self.counterexamples: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
        self.table: dict[tuple[int, int], tuple[int, int]] = {}

    # -- simulation of (possibly partial) tables ------------------------

    def _trace_of(self, word: tuple[tuple[int, ...], tuple[int, ...]]):
        """Run the adversarial word; returns a LassoTrace, or the first
        undefined cell, using the role's timing convention."""
        prefix_masks, cycle_masks = word
        if self.env_role:
            state = (0, 0)  # (machine state, previously observed mask)
        else:
            state = 0
        assignments = []

        def advance(state, adv_mask):
            if self.env_role:
                mstate, delayed = state
                cell = (mstate, delayed)
                if cell not in self.table:
                    return cell, None, None
                drive_mask, nxt = self.table[cell]
                assignment = (_mask_to_assignment(drive_mask, self.drive_names)
                              | _mask_to_assignment(adv_mask, self.observe_names))
                return None, assignment, (nxt, adv_mask)
            cell = (state, adv_mask)
            if cell not in self.table:
                return cell, None, None
            drive_mask, nxt = self.table[cell]
            assignment = (_mask_to_assignment(drive_mask, self.drive_names)
                          | _mask_to_assignment(adv_mask, self.observe_names))
            return None, assignment, nxt

        for m in prefix_masks:
            missing, assignment, state = advance(state, m)
            if missing:
                return missing, None
            assignments.append(assignment)

        seen: dict = {}
        chunks = []
        while state not in seen:
            seen[state] = len(chunks)
            chunk = []
            for m in cycle_masks:
                missing, assignment, state = advance(state, m)
                if missing:
                    return missing, None
                chunk.append(assignment)
            chunks.append(chunk)
        start = seen[state]
        prefix = assignments + [a for ch in chunks[:start] for a in ch]
        cycle = [a for ch in chunks[start:] for a in ch]
        return None, LassoTrace(tuple(prefix), tuple(cycle))

    def _partial_ok(self):
        """None if some cached counterexample already refutes the partial
        table, else the first cell an undetermined counterexample needs."""
        wanted_cell = None
        for word in self.counterexamples:
            missing, trace = self._trace_of(word)
            if missing is not None:
                if wanted_cell is None:
                    wanted_cell = missing
                continue
            if eval_lasso(self.formula, trace) != self.want:
                return False, None
        return True, wanted_cell

    # -- search ---------------------------------------------------------

    def run(self, verify) -> Optional[MealyMachine]:
        """verify(machine) -> (ok, counterexample_word or None)."""
        return self._dfs(verify)

    def _dfs(self, verify) -> Optional[MealyMachine]:
        if time.monotonic() > self.deadline:
            raise TimeoutError
        ok, wanted = self._partial_ok()
        if not ok:
            return None
        cell = wanted if wanted is not None else self._first_undefined()
        if cell is None:
            machine = self._to_machine()
            good, cex = verify(machine)
            if good:
                return machine
            if cex is not None:
                self.counterexamples.append(cex)
            return None
        max_used = max((max(s, t[1]) for (s, _), t in self.table.items()),
                       default=0)
        for drive in range(self.n_drive):
            for nxt in range(min(self.n, max_used + 2)):
                self.table[cell] = (drive, nxt)
                found = self._dfs(verify)
                if found is not None:
                    return found
                del self.table[cell]
        return None

    def _first_undefined(self):
        for s in range(self.n):
            for m in range(self.n_obs):
                if (s, m) not in self.table:
                    return (s, m)
        return None

    def _to_machine(self) -> MealyMachine:
        rows = tuple(
            tuple(self.table[(s, m)] for m in range(self.n_obs))
            for s in range(self.n))
        return MealyMachine(self.n, self.observe_names, self.drive_names, rows)


def _schedule(max_states: int):
    """System bounds 1,2,... with one environment level per two system
    levels (most desk-scale specifications are realizable)."""
    env_k = 1
    for k in range(1, max_states + 1):
        yield ("system", k)
        if k % 2 == 0:
            yield ("environment", env_k)
            env_k += 1
    while env_k <= max_states:
        yield ("environment", env_k)
        env_k += 1


def synthesize(spec: DecompSpec, max_states: int = 4,
               budget: float = 60.0) -> SynthesisResult:
    start = time.monotonic()
    deadline = start + budget
    if budget <= 0:
        return SynthesisResult(SynStatus.TIMEOUT, detail="zero budget")
    formula = spec_to_formula(spec)

    sys_cex: list = []
    env_cex: list = []
    try:
        for side, k in _schedule(max_states):
            if side == "system":
                machine = _search_side(
                    spec, formula, k, env_role=False, deadline=deadline,
                    cex_cache=sys_cex)
                if machine is not None:
                    circuit = mealy_to_aiger(machine, spec.inputs, spec.outputs)
                    return SynthesisResult(
                        SynStatus.REALIZABLE, circuit=circuit, machine=machine,
                        detail=f"system strategy with {k} states",
                        time=time.monotonic() - start)
            else:
                machine = _search_side(
                    spec, formula, k, env_role=True, deadline=deadline,
                    cex_cache=env_cex)
                if machine is not None:
                    circuit = mealy_to_aiger(machine, spec.outputs, spec.inputs)
                    return SynthesisResult(
                        SynStatus.UNREALIZABLE, circuit=circuit, machine=machine,
                        detail=f"environment counter-strategy with {k} states",
                        time=time.monotonic() - start)
    except TimeoutError:
        return SynthesisResult(SynStatus.TIMEOUT,
                               detail="budget exceeded",
                               time=time.monotonic() - start)
    return SynthesisResult(SynStatus.NONSUCCESS,
                           detail=f"no strategy within {max_states} states",
                           time=time.monotonic() - start)


def _search_side(spec: DecompSpec, formula: LtlFormula, k: int, env_role: bool,
                 deadline: float, cex_cache: list) -> Optional[MealyMachine]:
    if env_role:
        observe, drive = spec.outputs, spec.inputs
        want = False  # every run of the closed loop must violate the formula
    else:
        observe, drive = spec.inputs, spec.outputs
        want = True

    search = _CellSearch(k, observe, drive, formula, want_formula=want,
                         env_role=env_role, deadline=deadline)
    search.counterexamples = cex_cache

    def verify(machine: MealyMachine):
        if env_role:
            circuit = mealy_to_aiger(machine, spec.outputs, spec.inputs)
            sol = mc.check(circuit, spec, realizable_claim=False,
                           budget=max(deadline - time.monotonic(), 0.0))
        else:
            circuit = mealy_to_aiger(machine, spec.inputs, spec.outputs)
            sol = mc.check(circuit, spec, realizable_claim=True,
                           budget=max(deadline - time.monotonic(), 0.0))
        if sol.status is McStatus.SATISFIED:
            return True, None
        if sol.status is McStatus.TIMEOUT:
            raise TimeoutError
        if sol.status is not McStatus.VIOLATED:
            return False, None
        trace = sol.counterexample
        adversarial = spec.outputs if env_role else spec.inputs
        word = (tuple(_assignment_to_mask(a, adversarial) for a in trace.prefix),
                tuple(_assignment_to_mask(a, adversarial) for a in trace.cycle))
        return False, word

    return search.run(verify)


# -- Mealy machine to AIGER circuit -------------------------------------


class _AndBuilder:
    def __init__(self, n_vars: int):
        self.next_var = n_vars + 1
        self.gates: list[tuple[int, int, int]] = []
        self.cache: dict[tuple[int, int], int] = {}

    def and_(self, a: int, b: int) -> int:
        if a > b:
            a, b = b, a
        if a == 0:
            return 0
        if a == 1:
            return b
        if a == b:
            return a
        if a ^ b == 1:
            return 0
        key = (a, b)
        if key not in self.cache:
            lhs = 2 * self.next_var
            self.next_var += 1
            self.gates.append((lhs, a, b))
            self.cache[key] = lhs
        return self.cache[key]

    def or_(self, a: int, b: int) -> int:
        return self.and_(a ^ 1, b ^ 1) ^ 1

    def conj(self, lits: list[int]) -> int:
        out = 1
        for lit in lits:
            out = self.and_(out, lit)
        return out

    def disj(self, lits: list[int]) -> int:
        out = 0
        for lit in lits:
            out = self.or_(out, lit)
        return out


def mealy_to_aiger(m: MealyMachine, inputs: tuple[str, ...],
                   outputs: tuple[str, ...]) -> AigerCircuit:
    """Encode the machine as a circuit with one latch per state bit.

    `inputs`/`outputs` name the circuit interface in order; they must
    match the machine's observed and driven atoms respectively.
    """
    n_in = len(inputs)
    n_bits = max(0, math.ceil(math.log2(m.n_states))) if m.n_states > 1 else 0
    input_lits = [2 * (k + 1) for k in range(n_in)]
    latch_lits = [2 * (n_in + j + 1) for j in range(n_bits)]
    builder = _AndBuilder(n_in + n_bits)

    def minterm(state: int, in_mask: int) -> int:
        lits = []
        for j in range(n_bits):
            lits.append(latch_lits[j] if state >> j & 1 else latch_lits[j] ^ 1)
        for k in range(n_in):
            lits.append(input_lits[k] if in_mask >> k & 1 else input_lits[k] ^ 1)
        return builder.conj(lits)

    out_fns = []
    for bit in range(len(outputs)):
        terms = [minterm(s, im)
                 for s in range(m.n_states) for im in range(1 << n_in)
                 if m.transition[s][im][0] >> bit & 1]
        out_fns.append(builder.disj(terms))
    next_fns = []
    for j in range(n_bits):
        terms = [minterm(s, im)
                 for s in range(m.n_states) for im in range(1 << n_in)
                 if m.transition[s][im][1] >> j & 1]
        next_fns.append(builder.disj(terms))

    symbols = {("i", k): name for k, name in enumerate(inputs)}
    symbols.update({("l", j): f"l{j}" for j in range(n_bits)})
    symbols.update({("o", k): name for k, name in enumerate(outputs)})
    return AigerCircuit(
        max_var=builder.next_var - 1,
        inputs=tuple(input_lits),
        latches=tuple((latch_lits[j], next_fns[j]) for j in range(n_bits)),
        outputs=tuple(out_fns),
        ands=tuple(builder.gates),
        symbols=symbols,
    )
