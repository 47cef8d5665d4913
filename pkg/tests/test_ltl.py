import random

import pytest

from neurosynt.ltl import (And, Atom, ConstTrue, DecompSpec, Equiv,
                           Eventually, Globally, Implies, LassoTrace,
                           LtlSyntaxError, Next, Not, Notation, Or, Release,
                           Until, ast_size, atoms, eval_lasso, parse_ltl,
                           serialize_ltl, spec_to_formula)

from helpers import (ARBITER_SPEC_JSON, all_lassos, brute_eval,
                     enumerate_formulas, random_formula, random_lasso)


class TestParseInfix:
    def test_arbiter_guarantee(self):
        f = parse_ltl("(G ((! (g_0)) | (! (g_1))))")
        assert f == Globally(Or(Not(Atom("g_0")), Not(Atom("g_1"))))

    def test_single_atom(self):
        assert parse_ltl("a") == Atom("a")

    def test_precedence(self):
        assert parse_ltl("a & b | c") == Or(And(Atom("a"), Atom("b")), Atom("c"))
        assert parse_ltl("a -> b -> c") == Implies(
            Atom("a"), Implies(Atom("b"), Atom("c")))
        assert parse_ltl("a U b U c") == Until(
            Atom("a"), Until(Atom("b"), Atom("c")))
        assert parse_ltl("G a -> b") == Implies(Globally(Atom("a")), Atom("b"))
        assert parse_ltl("a <-> b & c") == Equiv(Atom("a"), And(Atom("b"), Atom("c")))
        assert parse_ltl("a U b & c") == And(Until(Atom("a"), Atom("b")), Atom("c"))

    def test_constants(self):
        assert parse_ltl("true") == ConstTrue()
        assert parse_ltl("X false") == Next(parse_ltl("false"))

    def test_release(self):
        assert parse_ltl("(r_0) R (! (g_0))") == Release(
            Atom("r_0"), Not(Atom("g_0")))

    def test_errors_carry_offset(self):
        with pytest.raises(LtlSyntaxError) as e:
            parse_ltl("(a & ")
        assert e.value.offset == 5
        with pytest.raises(LtlSyntaxError):
            parse_ltl("")
        with pytest.raises(LtlSyntaxError):
            parse_ltl("a ## b")
        with pytest.raises(LtlSyntaxError):
            parse_ltl("a b")


class TestParsePrefix:
    def test_response(self):
        f = parse_ltl("G -> r_0 F g_0", Notation.PREFIX)
        assert f == Globally(Implies(Atom("r_0"), Eventually(Atom("g_0"))))

    def test_round_trip_from_infix(self):
        f = parse_ltl("G (r_0 -> F g_0)")
        text = serialize_ltl(f, Notation.PREFIX)
        assert parse_ltl(text, Notation.PREFIX) == f

    def test_trailing_tokens_rejected(self):
        with pytest.raises(LtlSyntaxError):
            parse_ltl("G a b", Notation.PREFIX)


class TestSerialize:
    def test_atom_style(self):
        assert serialize_ltl(Atom("a")) == "(a)"

    def test_globally_prefix(self):
        assert serialize_ltl(Globally(Atom("a")), Notation.PREFIX) == "G a"

    def test_arbiter_guarantee_fixed_point(self):
        text = "(G ((! (g_0)) | (! (g_1))))"
        assert serialize_ltl(parse_ltl(text)) == text

    @pytest.mark.parametrize("seed", range(30))
    def test_round_trip_random(self, seed):
        rng = random.Random(seed)
        f = random_formula(rng, depth=8)
        for notation in Notation:
            assert parse_ltl(serialize_ltl(f, notation), notation) == f


class TestAstSize:
    def test_atom(self):
        assert ast_size(Atom("a")) == 1

    def test_response_pattern(self):
        f = Globally(Implies(Atom("r_0"), Eventually(Atom("g_0"))))
        assert ast_size(f) == 5

    def test_conjunction(self):
        assert ast_size(And(Atom("a"), Atom("b"))) == 3


class TestDecompSpec:
    def test_overlapping_io_rejected(self):
        with pytest.raises(ValueError):
            DecompSpec(inputs=("a",), outputs=("a",))

    def test_undeclared_atom_rejected(self):
        with pytest.raises(ValueError):
            DecompSpec(inputs=("a",), outputs=(), guarantees=(Atom("b"),))

    def test_from_dict_arbiter(self):
        spec = DecompSpec.from_dict(ARBITER_SPEC_JSON)
        assert spec.inputs == ("r_0", "r_1")
        assert len(spec.guarantees) == 3
        assert atoms(spec.guarantees[1]) == {"r_0", "g_0"}


class TestSpecToFormula:
    def test_single_guarantee_unwrapped(self):
        g = Globally(Atom("a"))
        spec = DecompSpec(inputs=(), outputs=("a",), guarantees=(g,))
        assert spec_to_formula(spec) == g

    def test_assumption_implies_guarantees(self):
        a1, g1, g2 = Atom("i"), Atom("o"), Next(Atom("o"))
        spec = DecompSpec(inputs=("i",), outputs=("o",),
                          assumptions=(a1,), guarantees=(g1, g2))
        assert spec_to_formula(spec) == Implies(a1, And(g1, g2))

    def test_arbiter(self):
        spec = DecompSpec.from_dict(ARBITER_SPEC_JSON)
        f = spec_to_formula(spec)
        assert f == And(spec.guarantees[0],
                        And(spec.guarantees[1], spec.guarantees[2]))


class TestEvalLasso:
    def test_globally_on_cycle(self):
        t = LassoTrace.of([], [{"a"}])
        assert eval_lasso(Globally(Atom("a")), t)

    def test_eventually_false(self):
        t = LassoTrace.of([{"r_0"}], [set()])
        assert not eval_lasso(Eventually(Atom("g_0")), t)

    def test_until_in_prefix(self):
        t = LassoTrace.of([{"a"}, {"a", "b"}], [set()])
        assert eval_lasso(Until(Atom("a"), Atom("b")), t)

    @pytest.mark.parametrize("seed", range(40))
    def test_desugaring_laws(self, seed):
        rng = random.Random(1000 + seed)
        f = random_formula(rng, depth=4)
        t = random_lasso(rng)
        assert eval_lasso(Eventually(f), t) == eval_lasso(
            Until(ConstTrue(), f), t)
        assert eval_lasso(Globally(f), t) == eval_lasso(
            Not(Eventually(Not(f))), t)

    def test_agrees_with_brute_force_exhaustive_small(self):
        lassos = list(all_lassos(max_prefix=1, max_cycle=2))
        for f in enumerate_formulas(3):
            for t in lassos:
                assert eval_lasso(f, t) == brute_eval(f, t), (f, t)

    @pytest.mark.parametrize("seed", range(60))
    def test_agrees_with_brute_force_random(self, seed):
        rng = random.Random(2000 + seed)
        for _ in range(40):
            f = random_formula(rng, depth=3)
            if ast_size(f) > 7:
                continue
            t = random_lasso(rng)
            assert eval_lasso(f, t) == brute_eval(f, t), (f, t)
