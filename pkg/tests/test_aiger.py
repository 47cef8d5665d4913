import random

import pytest

from neurosynt.aiger import (AigerCircuit, AigerFormatError, CircuitState,
                             DuplicateVariable, HeaderMismatch,
                             OddDefinitionLiteral, VariableOutOfRange,
                             parse_aag, serialize_aag, stats, step, validate)

from helpers import ARBITER_AAG


def random_circuit(rng: random.Random, max_vars: int = 8) -> AigerCircuit:
    n_vars = rng.randrange(0, max_vars + 1)
    variables = list(range(1, n_vars + 1))
    rng.shuffle(variables)
    ni = rng.randrange(0, len(variables) + 1)
    inputs = tuple(2 * v for v in variables[:ni])
    rest = variables[ni:]
    nl = rng.randrange(0, len(rest) + 1)
    latch_vars = rest[:nl]
    and_vars = sorted(rest[nl:])

    def known_lit(upto: list[int]) -> int:
        choices = [0, 1] + [2 * v for v in upto] + [2 * v + 1 for v in upto]
        return rng.choice(choices)

    ands = []
    definable = [v for v in variables[:ni]] + latch_vars
    for v in and_vars:
        ands.append((2 * v, known_lit(definable), known_lit(definable)))
        definable.append(v)
    latches = tuple((2 * v, known_lit(variables)) for v in latch_vars)
    outputs = tuple(known_lit(variables)
                    for _ in range(rng.randrange(0, 4)))
    symbols = {}
    if rng.random() < 0.5:
        for k in range(ni):
            symbols[("i", k)] = f"in_{k}"
    c = AigerCircuit(n_vars, inputs, latches, outputs, tuple(ands), symbols)
    validate(c)
    return c


class TestParse:
    def test_appendix_arbiter(self):
        c = parse_aag(ARBITER_AAG)
        assert c.max_var == 3
        assert c.inputs == (2, 4)
        assert c.latches == ((6, 7),)
        assert c.outputs == (7, 6)
        assert c.ands == ()
        assert c.symbols == {("i", 0): "r_0", ("i", 1): "r_1",
                             ("l", 0): "l0", ("o", 0): "g_0", ("o", 1): "g_1"}

    def test_constant_true_output(self):
        c = parse_aag("aag 0 0 0 1 0\n1")
        assert c.outputs == (1,)
        out, _ = step(c, CircuitState.initial(c), ())
        assert out == (True,)

    def test_inverter(self):
        c = parse_aag("aag 1 1 0 1 0\n2\n3")
        out, _ = step(c, CircuitState.initial(c), (True,))
        assert out == (False,)
        out, _ = step(c, CircuitState.initial(c), (False,))
        assert out == (True,)

    def test_header_count_mismatch(self):
        with pytest.raises(HeaderMismatch):
            parse_aag("aag 1 1 0 1 0\n2")
        with pytest.raises(HeaderMismatch):
            parse_aag("nope")

    def test_odd_definition_literal(self):
        with pytest.raises(OddDefinitionLiteral):
            parse_aag("aag 1 1 0 0 0\n3")

    def test_duplicate_variable(self):
        with pytest.raises(DuplicateVariable):
            parse_aag("aag 1 2 0 0 0\n2\n2")

    def test_variable_out_of_range(self):
        with pytest.raises(VariableOutOfRange):
            parse_aag("aag 1 1 0 1 0\n4\n4")

    def test_latch_reset_rejected(self):
        with pytest.raises(AigerFormatError):
            parse_aag("aag 1 0 1 0 0\n2 3 1")

    def test_cyclic_ands_rejected(self):
        with pytest.raises(AigerFormatError):
            parse_aag("aag 2 0 0 0 2\n2 4 4\n4 2 2")


class TestSerialize:
    def test_arbiter_byte_identity(self):
        assert serialize_aag(parse_aag(ARBITER_AAG)) == ARBITER_AAG

    def test_empty_circuit(self):
        assert serialize_aag(parse_aag("aag 0 0 0 0 0")) == "aag 0 0 0 0 0\n"

    @pytest.mark.parametrize("seed", range(50))
    def test_round_trip_random(self, seed):
        c = random_circuit(random.Random(seed))
        text = serialize_aag(c)
        assert parse_aag(text) == c
        assert serialize_aag(parse_aag(text)) == text


class TestStep:
    def test_arbiter_alternates(self):
        c = parse_aag(ARBITER_AAG)
        s = CircuitState.initial(c)
        out, s = step(c, s, (True, True))
        assert out == (True, False)
        assert s.latch_values == (True,)
        out, s = step(c, s, (False, False))
        assert out == (False, True)
        assert s.latch_values == (False,)

    def test_determinism(self):
        c = parse_aag(ARBITER_AAG)
        s = CircuitState.initial(c)
        assert step(c, s, (True, False)) == step(c, s, (True, False))

    def test_input_arity_checked(self):
        c = parse_aag(ARBITER_AAG)
        with pytest.raises(ValueError):
            step(c, CircuitState.initial(c), (True,))


class TestStats:
    def test_arbiter(self):
        assert stats(parse_aag(ARBITER_AAG)) == {
            "num_latches": 1, "num_ands": 0, "max_var": 3,
            "num_inputs": 2, "num_outputs": 2}

    def test_empty(self):
        assert stats(parse_aag("aag 0 0 0 0 0")) == {
            "num_latches": 0, "num_ands": 0, "max_var": 0,
            "num_inputs": 0, "num_outputs": 0}

    @pytest.mark.parametrize("seed", range(20))
    def test_recount(self, seed):
        c = random_circuit(random.Random(100 + seed))
        text = serialize_aag(c)
        lines = text.splitlines()
        header = lines[0].split()
        s = stats(c)
        assert s["max_var"] == int(header[1])
        assert s["num_inputs"] == int(header[2])
        assert s["num_latches"] == int(header[3])
        assert s["num_outputs"] == int(header[4])
        assert s["num_ands"] == int(header[5])
