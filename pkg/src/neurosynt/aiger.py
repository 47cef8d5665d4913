"""ASCII AIGER (`aag`) parsing, validation, serialization, and simulation.

Literal encoding: 0 is constant false, 1 constant true, literal 2k refers
to variable k, odd literals are the negation of their even counterpart.
"""

from __future__ import annotations

from dataclasses import dataclass, field


class AigerFormatError(ValueError):
    pass


class HeaderMismatch(AigerFormatError):
    pass


class OddDefinitionLiteral(AigerFormatError):
    pass


class DuplicateVariable(AigerFormatError):
    pass


class VariableOutOfRange(AigerFormatError):
    pass


@dataclass(frozen=True)
class AigerCircuit:
    max_var: int
    inputs: tuple[int, ...]
    latches: tuple[tuple[int, int], ...]
    outputs: tuple[int, ...]
    ands: tuple[tuple[int, int, int], ...]
    # (kind, index) -> name with kind in {"i", "l", "o"}; insertion ordered.
    symbols: dict = field(default_factory=dict, compare=True, hash=False)
    comments: tuple[str, ...] = ()

    @property
    def num_inputs(self) -> int:
        return len(self.inputs)

    @property
    def num_latches(self) -> int:
        return len(self.latches)

    @property
    def num_outputs(self) -> int:
        return len(self.outputs)

    @property
    def num_ands(self) -> int:
        return len(self.ands)

    def input_names(self) -> list[str]:
        return [self.symbols.get(("i", k), f"i{k}") for k in range(self.num_inputs)]

    def output_names(self) -> list[str]:
        return [self.symbols.get(("o", k), f"o{k}") for k in range(self.num_outputs)]


def validate(c: AigerCircuit) -> None:
    seen: set[int] = set()

    def define(lit: int, what: str) -> None:
        if lit % 2 != 0:
            raise OddDefinitionLiteral(f"{what} defined by odd literal {lit}")
        var = lit // 2
        if var == 0 or var > c.max_var:
            raise VariableOutOfRange(f"{what} variable {var} out of range")
        if var in seen:
            raise DuplicateVariable(f"variable {var} defined twice")
        seen.add(var)

    def use(lit: int, what: str) -> None:
        if lit // 2 > c.max_var:
            raise VariableOutOfRange(f"{what} refers to variable {lit // 2} > max_var")

    for lit in c.inputs:
        define(lit, "input")
    for state, nxt in c.latches:
        define(state, "latch")
        use(nxt, "latch next-state")
    for lit in c.outputs:
        use(lit, "output")
    for lhs, r0, r1 in c.ands:
        define(lhs, "AND gate")
        use(r0, "AND operand")
        use(r1, "AND operand")
    _topo_order(c)


def _topo_order(c: AigerCircuit) -> list[tuple[int, int, int]]:
    """AND gates in dependency order; raises if definitions are cyclic."""
    defs = {lhs // 2: (lhs, r0, r1) for lhs, r0, r1 in c.ands}
    order: list[tuple[int, int, int]] = []
    state: dict[int, int] = {}  # 0 visiting, 1 done

    def visit(var: int) -> None:
        if var not in defs or state.get(var) == 1:
            return
        if state.get(var) == 0:
            raise AigerFormatError(f"cyclic AND definition at variable {var}")
        state[var] = 0
        _, r0, r1 = defs[var]
        visit(r0 // 2)
        visit(r1 // 2)
        state[var] = 1
        order.append(defs[var])

    for var in defs:
        visit(var)
    return order


def parse_aag(text: str) -> AigerCircuit:
    lines = text.splitlines()
    if not lines or not lines[0].startswith("aag "):
        raise HeaderMismatch("missing 'aag' header line")
    parts = lines[0].split()
    if len(parts) != 6:
        raise HeaderMismatch(f"bad header {lines[0]!r}")
    try:
        max_var, ni, nl, no, na = (int(p) for p in parts[1:])
    except ValueError as e:
        raise HeaderMismatch(f"non-numeric header field in {lines[0]!r}") from e

    body = lines[1:]
    need = ni + nl + no + na
    if len(body) < need:
        raise HeaderMismatch(f"expected {need} definition lines, found {len(body)}")

    def ints(line: str, n: int, what: str) -> list[int]:
        fields = line.split()
        if len(fields) != n:
            raise HeaderMismatch(f"{what} line {line!r} should have {n} fields")
        try:
            return [int(f) for f in fields]
        except ValueError as e:
            raise HeaderMismatch(f"non-numeric field in {what} line {line!r}") from e

    pos = 0
    inputs = tuple(ints(body[pos + k], 1, "input")[0] for k in range(ni))
    pos += ni
    latches = []
    for k in range(nl):
        fields = body[pos + k].split()
        if len(fields) == 3:
            raise AigerFormatError("latch reset values are not supported")
        state, nxt = ints(body[pos + k], 2, "latch")
        latches.append((state, nxt))
    pos += nl
    outputs = tuple(ints(body[pos + k], 1, "output")[0] for k in range(no))
    pos += no
    ands = tuple(tuple(ints(body[pos + k], 3, "AND")) for k in range(na))
    pos += na

    symbols: dict = {}
    comments: list[str] = []
    in_comments = False
    for line in body[pos:]:
        if in_comments:
            comments.append(line)
        elif line == "c":
            in_comments = True
        elif line and line[0] in "ilo":
            head, _, name = line.partition(" ")
            kind, idx = head[0], head[1:]
            if not idx.isdigit() or not name:
                raise HeaderMismatch(f"bad symbol line {line!r}")
            key = (kind, int(idx))
            if key in symbols:
                raise HeaderMismatch(f"duplicate symbol {head}")
            symbols[key] = name
        elif not line.strip():
            continue
        else:
            raise HeaderMismatch(f"unexpected line {line!r}")

    circuit = AigerCircuit(max_var, inputs, tuple(latches), outputs, ands,
                           symbols, tuple(comments))
    validate(circuit)
    return circuit


def serialize_aag(c: AigerCircuit) -> str:
    out = [f"aag {c.max_var} {c.num_inputs} {c.num_latches} {c.num_outputs} {c.num_ands}"]
    out.extend(str(lit) for lit in c.inputs)
    out.extend(f"{state} {nxt}" for state, nxt in c.latches)
    out.extend(str(lit) for lit in c.outputs)
    out.extend(f"{lhs} {r0} {r1}" for lhs, r0, r1 in c.ands)
    out.extend(f"{kind}{idx} {name}" for (kind, idx), name in c.symbols.items())
    if c.comments:
        out.append("c")
        out.extend(c.comments)
    return "\n".join(out) + "\n"


@dataclass(frozen=True)
class CircuitState:
    latch_values: tuple[bool, ...]

    @classmethod
    def initial(cls, c: AigerCircuit) -> "CircuitState":
        return cls((False,) * c.num_latches)


def step(c: AigerCircuit, s: CircuitState, in_bits: tuple[bool, ...]
         ) -> tuple[tuple[bool, ...], CircuitState]:
    """One synchronous step: returns output bits and the successor state."""
    if len(in_bits) != c.num_inputs:
        raise ValueError(f"expected {c.num_inputs} input bits, got {len(in_bits)}")
    val: dict[int, bool] = {0: False}
    for lit, bit in zip(c.inputs, in_bits):
        val[lit // 2] = bit
    for (state_lit, _), bit in zip(c.latches, s.latch_values):
        val[state_lit // 2] = bit

    def lit_val(lit: int) -> bool:
        return val[lit // 2] ^ bool(lit & 1)

    for lhs, r0, r1 in _topo_order(c):
        val[lhs // 2] = lit_val(r0) and lit_val(r1)

    out_bits = tuple(lit_val(lit) for lit in c.outputs)
    next_state = CircuitState(tuple(lit_val(nxt) for _, nxt in c.latches))
    return out_bits, next_state


def stats(c: AigerCircuit) -> dict[str, int]:
    return {
        "num_latches": c.num_latches,
        "num_ands": c.num_ands,
        "max_var": c.max_var,
        "num_inputs": c.num_inputs,
        "num_outputs": c.num_outputs,
    }
