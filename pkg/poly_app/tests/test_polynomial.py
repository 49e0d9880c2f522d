import math

import numpy as np
import pytest

from core.exceptions import DimensionMismatchError, InvalidDirectionError, PreconditionError
from measure_app.random_streams import stream
from poly_app.parser import parse
from poly_app.polynomial import (
    Direction,
    Polynomial,
    add,
    compose_affine,
    directional_derivative,
    evaluate,
    evaluate_many,
    format_polynomial,
    gradient,
    monomials,
    multiply,
    power,
    random_polynomial,
    scale,
    subtract,
)


def central_difference(function, x, e, h=1e-5):
    x = np.asarray(x, dtype=float)
    e = np.asarray(e, dtype=float)
    return (function(x + h * e) - function(x - h * e)) / (2 * h)


class TestEvaluate:

    def test_substitution(self):
        assert evaluate(parse("x1^2*x2", 2), (2, 3)) == 12.0

    def test_zero_polynomial_is_zero_everywhere(self):
        assert evaluate(Polynomial.zero(3), (1.5, -2.0, 7.0)) == 0.0

    def test_square_of_sum(self):
        assert evaluate(parse("(x1+x2)^2", 2), (1, 1)) == 4.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            evaluate(parse("x1 + x2", 2), (1.0, 2.0, 3.0))

    def test_evaluate_many_matches_pointwise(self):
        rng = stream(3, 'evaluate-many')
        p = random_polynomial(3, 4, 1.0, rng)
        points = rng.uniform(-2, 2, size=(50, 3))
        expected = [evaluate(p, row) for row in points]
        np.testing.assert_allclose(evaluate_many(p, points), expected, rtol=1e-12, atol=1e-12)

    def test_evaluate_many_rejects_wrong_width(self):
        with pytest.raises(DimensionMismatchError):
            evaluate_many(parse("x1", 2), np.zeros((4, 3)))

    def test_evaluation_is_linear_in_the_polynomial(self):
        rng = stream(11, 'linearity')
        for _ in range(20):
            p = random_polynomial(2, 3, 1.0, rng)
            q = random_polynomial(2, 3, 1.0, rng)
            a, b = rng.uniform(-3, 3, size=2)
            x = rng.uniform(-2, 2, size=2)
            combined = add(scale(p, a), scale(q, b))
            expected = a * evaluate(p, x) + b * evaluate(q, x)
            assert evaluate(combined, x) == pytest.approx(expected, rel=1e-12, abs=1e-12)


class TestArithmetic:

    def test_subtract_self_is_zero(self):
        p = parse("x1^3 - 2*x1*x2 + 5", 2)
        assert subtract(p, p).is_zero

    def test_scale_by_zero_is_zero(self):
        assert scale(parse("x1 + 1", 1), 0).is_zero

    def test_multiply_coordinates(self):
        product = multiply(parse("x1", 2), parse("x2", 2))
        assert product == parse("x1*x2", 2)
        assert product.degree == 2

    def test_degrees_add_under_multiplication(self):
        rng = stream(5, 'degrees')
        p = random_polynomial(2, 3, 1.0, rng)
        q = random_polynomial(2, 2, 1.0, rng)
        assert multiply(p, q).degree == 5

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            add(parse("x1", 1), parse("x1", 2))

    def test_power_matches_repeated_multiplication(self):
        p = parse("x1 - 2*x2 + 0.5", 2)
        assert power(p, 3) == multiply(p, multiply(p, p))
        assert power(p, 0) == Polynomial.constant(2, 1.0)

    def test_power_rejects_negative_exponent(self):
        with pytest.raises(PreconditionError):
            power(parse("x1", 1), -1)

    def test_operators(self):
        x1 = Polynomial.variable(2, 1)
        x2 = Polynomial.variable(2, 2)
        assert (x1 + x2) ** 2 == parse("x1^2 + 2*x1*x2 + x2^2", 2)
        assert 3 - x1 == parse("3 - x1", 2)
        assert -x1 * 2 == parse("-2*x1", 2)

    def test_zero_coefficients_are_dropped(self):
        p = Polynomial(2, {(1, 0): 0.0, (0, 1): 2.0})
        assert list(p.terms) == [(0, 1)]
        assert p.degree == 1

    def test_non_finite_coefficient_rejected(self):
        with pytest.raises(PreconditionError):
            Polynomial(1, {(1,): math.nan})

    def test_compose_affine(self):
        p = parse("x1*x2", 2)
        q = compose_affine(p, [[1.0, 1.0], [0.0, 2.0]], [1.0, 0.0])
        assert q == parse("(x1 + x2 + 1)*(2*x2)", 2)


class TestDerivatives:

    def test_coordinate_derivative(self):
        p = parse("x1^2*x2", 2)
        assert directional_derivative(p, Direction.axis(2, 1)) == parse("2*x1*x2", 2)

    def test_constant_has_zero_derivative(self):
        e = Direction.from_vector([1.0, -2.0])
        assert directional_derivative(Polynomial.constant(2, 4.0), e).is_zero

    def test_diagonal_direction_matches_finite_differences(self):
        p = parse("x1^2", 2)
        e = Direction(2, (1 / math.sqrt(2), 1 / math.sqrt(2)))
        derivative = directional_derivative(p, e)
        rng = stream(7, 'diagonal')
        for x in rng.uniform(-3, 3, size=(5, 2)):
            expected = central_difference(p, x, e.as_array())
            assert evaluate(derivative, x) == pytest.approx(expected, rel=1e-6, abs=1e-9)
            assert evaluate(derivative, x) == pytest.approx(math.sqrt(2) * x[0], rel=1e-12)

    def test_random_polynomials_match_finite_differences(self):
        rng = stream(13, 'finite-differences')
        for _ in range(25):
            p = random_polynomial(3, 3, 1.0, rng)
            e = Direction.from_vector(rng.standard_normal(3))
            x = rng.uniform(-1, 1, size=3)
            x *= rng.uniform(0, 10) / max(np.linalg.norm(x), 1e-12)
            expected = central_difference(p, x, e.as_array())
            got = evaluate(directional_derivative(p, e), x)
            assert got == pytest.approx(expected, rel=1e-6, abs=1e-6)

    def test_linear_in_direction(self):
        rng = stream(17, 'direction-linearity')
        p = random_polynomial(2, 3, 1.0, rng)
        e1 = Direction.axis(2, 1)
        e2 = Direction.axis(2, 2)
        e = Direction(2, (0.6, 0.8))
        combined = add(scale(directional_derivative(p, e1), 0.6),
                       scale(directional_derivative(p, e2), 0.8))
        x = rng.uniform(-2, 2, size=2)
        assert evaluate(directional_derivative(p, e), x) == pytest.approx(evaluate(combined, x), rel=1e-12, abs=1e-12)

    def test_gradient_examples(self):
        one = Polynomial.constant(2, 1.0)
        assert gradient(parse("x1 + x2", 2)) == (one, one)
        assert all(part.is_zero for part in gradient(Polynomial.constant(3, 2.5)))
        assert gradient(parse("x1*x2", 2)) == (parse("x2", 2), parse("x1", 2))

    def test_direction_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            directional_derivative(parse("x1", 1), Direction.axis(2, 1))

    def test_lifted_chain_rule_identity(self):
        """d_e g (phi(f) - phi(g)) = d_e(Phi(f) - Phi(g)) - (d_e f - d_e g) phi(f)."""
        rng = stream(19, 'chain-rule')
        f = random_polynomial(2, 2, 1.0, rng)
        g = random_polynomial(2, 2, 1.0, rng)
        e = Direction.from_vector(rng.standard_normal(2))
        df = directional_derivative(f, e)
        dg = directional_derivative(g, e)

        def log_cosh(value):
            return np.logaddexp(value, -value) - math.log(2.0)

        def composite(x):
            return log_cosh(evaluate(f, x)) - log_cosh(evaluate(g, x))

        for x in rng.uniform(-1, 1, size=(1000, 2)):
            fx, gx = evaluate(f, x), evaluate(g, x)
            lhs = evaluate(dg, x) * (math.tanh(fx) - math.tanh(gx))
            rhs = (central_difference(composite, x, e.as_array())
                   - (evaluate(df, x) - evaluate(dg, x)) * math.tanh(fx))
            assert abs(lhs - rhs) <= 1e-9


class TestDirection:

    def test_rejects_non_unit_vector(self):
        with pytest.raises(InvalidDirectionError):
            Direction(2, (1.0, 1.0))

    def test_rejects_zero_vector(self):
        with pytest.raises(InvalidDirectionError):
            Direction.from_vector([0.0, 0.0])

    def test_from_vector_normalizes(self):
        e = Direction.from_vector([3.0, 4.0])
        assert e.components == pytest.approx((0.6, 0.8))


class TestRandomPolynomial:

    def test_shape(self):
        p = random_polynomial(2, 2, 1, stream(7))
        assert p.dim == 2
        assert p.degree == 2
        assert set(p.terms) <= set(monomials(2, 2))
        assert len(monomials(2, 2)) == 6
        assert all(abs(c) <= 1 for c in p.terms.values())

    def test_degree_zero_is_constant(self):
        assert random_polynomial(1, 0, 1, stream(1)).is_constant

    def test_same_seed_same_polynomial(self):
        assert random_polynomial(3, 3, 2.0, stream(42)) == random_polynomial(3, 3, 2.0, stream(42))

    def test_rejects_non_positive_scale(self):
        with pytest.raises(PreconditionError):
            random_polynomial(2, 2, 0.0, stream(1))


class TestFormat:

    def test_canonical_text(self):
        assert format_polynomial(parse("3 - x2 + x1^2*x2", 2)) == "x1^2*x2 - x2 + 3"

    def test_zero(self):
        assert format_polynomial(Polynomial.zero(2)) == "0"

    def test_leading_negative_term_keeps_its_coefficient(self):
        p = parse("-1*x1^2 + x2", 2)
        assert format_polynomial(p) == "-1*x1^2 + x2"
        assert parse(format_polynomial(p), 2) == p
