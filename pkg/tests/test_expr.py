import math

import numpy as np
import pytest

from chebgibbs import expr
from chebgibbs.expr import (
    BinOp,
    Const,
    DomainError,
    Func,
    Neg,
    ParseError,
    UnknownIdentifierError,
    Var,
    as_callable,
    differentiate,
    evaluate,
    parse,
    to_source,
)


class TestParse:
    def test_variable(self):
        assert parse("x") == Var()

    def test_structure(self):
        assert parse("1/(2+x)") == BinOp("/", Const(1.0), BinOp("+", Const(2.0), Var()))

    def test_arithmetic_identity(self):
        assert evaluate(parse("0.5*x - (1 - 0.5)"), 1.0) == 0.0

    def test_precedence(self):
        # ^ tightest and right-associative, then unary minus, then * /, then + -
        assert evaluate(parse("2^3^2"), 0.0) == 512.0
        assert evaluate(parse("-2^2"), 0.0) == -4.0
        assert evaluate(parse("2+3*4"), 0.0) == 14.0
        assert evaluate(parse("-x^2"), 3.0) == -9.0
        assert evaluate(parse("2^-2"), 0.0) == 0.25

    def test_named_constants(self):
        assert evaluate(parse("pi"), 0.0) == math.pi
        assert evaluate(parse("e"), 0.0) == math.e

    def test_functions(self):
        assert evaluate(parse("exp(0)"), 12.0) == 1.0
        assert evaluate(parse("atan(1)"), 0.0) == pytest.approx(math.pi / 4, abs=1e-15)
        assert evaluate(parse("abs(-3)"), 0.0) == 3.0

    def test_scientific_notation(self):
        assert evaluate(parse("1e-3 + 2.5E2"), 0.0) == pytest.approx(250.001)

    def test_syntax_error_offset(self):
        with pytest.raises(ParseError) as err:
            parse("1 + * 2")
        assert err.value.offset == 4
        assert "expected" in str(err.value)

    def test_unknown_identifier(self):
        with pytest.raises(UnknownIdentifierError):
            parse("y + 1")
        with pytest.raises(UnknownIdentifierError):
            parse("foo(x)")

    def test_unbalanced_parens(self):
        with pytest.raises(ParseError):
            parse("(1 + x")
        with pytest.raises(ParseError):
            parse("sin x")

    def test_empty(self):
        with pytest.raises(ParseError):
            parse("")
        with pytest.raises(ParseError):
            parse("   ")

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse("1 + 2 x")

    def test_ast_immutable(self):
        node = parse("x + 1")
        with pytest.raises(AttributeError):
            node.op = "-"


class TestPrintRoundTrip:
    @pytest.mark.parametrize(
        "source",
        [
            "x",
            "1/(2+x)",
            "0.5*x - (1 - 0.5)",
            "-x^2",
            "x^-2",
            "2^3^2",
            "(x^2)^3",
            "-(x*2)",
            "x - (1 - x)",
            "x/(2*x)/2",
            "exp(log(2+x))*sin(cos(x))",
            "sqrt(abs(x))+atan(x)",
            "-2.5*x + x*-2.5",
            "2/(3 + (x + 1)/2) - 1",
            "-2*log(3 + (x+1)/2)",
        ],
    )
    def test_parse_print_parse(self, source):
        tree = parse(source)
        assert parse(to_source(tree)) == tree

    def test_random_trees_round_trip(self):
        # parse o print o parse == parse, over randomly generated sources
        rng = np.random.default_rng(2024)
        for _ in range(200):
            source = to_source(_random_expr(rng, depth=4))
            tree = parse(source)
            assert parse(to_source(tree)) == tree


class TestEvaluate:
    def test_examples(self):
        assert evaluate(parse("exp(0)"), 0.7) == 1.0
        assert evaluate(parse("1/(2+x)"), 0.0) == 0.5

    def test_log_domain(self):
        with pytest.raises(DomainError):
            evaluate(parse("log(x)"), -1.0)
        with pytest.raises(DomainError):
            evaluate(parse("log(x)"), 0.0)

    def test_division_by_zero(self):
        with pytest.raises(DomainError):
            evaluate(parse("1/x"), 0.0)

    def test_sqrt_domain(self):
        with pytest.raises(DomainError):
            evaluate(parse("sqrt(x)"), -0.5)

    def test_pow_domain(self):
        with pytest.raises(DomainError):
            evaluate(parse("x^0.5"), -1.0)  # non-integer exponent needs x > 0
        with pytest.raises(DomainError):
            evaluate(parse("x^-1"), 0.0)  # 0^negative
        assert evaluate(parse("x^3"), -2.0) == -8.0
        assert evaluate(parse("x^0"), 0.0) == 1.0

    def test_array_evaluation(self):
        xs = np.linspace(-1, 1, 11)
        out = evaluate(parse("x^2 + 1"), xs)
        np.testing.assert_allclose(out, xs**2 + 1, rtol=0, atol=0)

    def test_array_domain_error(self):
        xs = np.array([0.5, -0.5])
        with pytest.raises(DomainError):
            evaluate(parse("log(x)"), xs)

    def test_complex_evaluation(self):
        z = 0.3 + 0.4j
        assert evaluate(parse("x^2"), z) == pytest.approx(z**2)
        # complex log of a negative real is fine (principal branch)
        out = evaluate(parse("log(x)"), -1.0 + 0j)
        assert out == pytest.approx(1j * math.pi)

    def test_compiled_matches_evaluate(self):
        rng = np.random.default_rng(7)
        xs = rng.uniform(-1, 1, 50)
        for src in ["x^2 - 0.25*x", "exp(x)*sin(3*x)", "1/(2+x)", "atan(x)+abs(x)"]:
            tree = parse(src)
            fn = as_callable(tree)
            np.testing.assert_array_equal(fn(xs), evaluate(tree, xs))


class TestDifferentiate:
    def test_power_rule(self):
        d = differentiate(parse("x^2"))
        assert evaluate(d, 3.0) == 6.0

    def test_quotient(self):
        d = differentiate(parse("1/(2+x)"))
        assert evaluate(d, 0.0) == -0.25

    def test_constant(self):
        assert differentiate(parse("3.5")) == Const(0.0)
        assert differentiate(parse("pi*e")) == Const(0.0)

    def test_abs_kink(self):
        d = differentiate(parse("abs(x)"))
        assert evaluate(d, 2.0) == 1.0
        assert evaluate(d, -2.0) == -1.0
        with pytest.raises(DomainError):
            evaluate(d, 0.0)

    def test_general_power(self):
        # x^x has derivative x^x (log x + 1)
        d = differentiate(parse("x^x"))
        x = 1.7
        expected = x**x * (math.log(x) + 1.0)
        assert evaluate(d, x) == pytest.approx(expected, rel=1e-14)

    def test_constant_folding(self):
        d = differentiate(parse("2*x + exp(1)"))
        assert d == Const(2.0)

    def test_finite_difference_property(self):
        rng = np.random.default_rng(99)
        step = 1e-6
        checked = 0
        for _ in range(100):
            tree = _random_expr(rng, depth=3)
            deriv = differentiate(tree)
            for x in rng.uniform(-1.0, 1.0, 100):
                try:
                    exact = float(evaluate(deriv, float(x)))
                    stencil = [float(evaluate(tree, float(x) + s))
                               for s in (-step, -0.5 * step, 0.5 * step, step)]
                except DomainError:
                    continue
                fd = (stencil[3] - stencil[0]) / (2 * step)
                fd_half = (stencil[2] - stencil[1]) / step
                if not all(math.isfinite(v) for v in (exact, fd, fd_half)):
                    continue
                if abs(exact) > 1e4 or abs(fd - fd_half) > 5e-7 * (1.0 + abs(exact)):
                    continue  # curvature too wild for the stencil to be meaningful
                assert abs(exact - fd) <= 1e-6 * (1.0 + abs(exact)), to_source(tree)
                checked += 1
        assert checked > 5000


def _random_expr(rng, depth):
    """Random expression tree over the full grammar, bounded depth."""
    if depth == 0 or rng.random() < 0.25:
        kind = rng.integers(0, 3)
        if kind == 0:
            return Var()
        if kind == 1:
            return Const(round(float(rng.uniform(-2.5, 2.5)), 3))
        return Const(float(rng.integers(1, 4)))
    roll = rng.random()
    if roll < 0.55:
        op = str(rng.choice(["+", "-", "*", "/"]))
        return BinOp(op, _random_expr(rng, depth - 1), _random_expr(rng, depth - 1))
    if roll < 0.65:
        return BinOp("^", _random_expr(rng, depth - 1), Const(float(rng.integers(1, 4))))
    if roll < 0.75:
        return Neg(_random_expr(rng, depth - 1))
    name = str(rng.choice(["exp", "sin", "cos", "atan", "abs", "sqrt", "log"]))
    arg = _random_expr(rng, depth - 1)
    if name in ("sqrt", "log"):
        arg = BinOp("+", Const(float(rng.integers(2, 5))), Func("abs", arg))
    return Func(name, arg)
