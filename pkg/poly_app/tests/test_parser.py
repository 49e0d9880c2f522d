import pytest
from rest_framework.exceptions import ValidationError

from core.exceptions import PolynomialSyntaxError, VariableIndexError
from measure_app.random_streams import stream
from poly_app.api.serializers import PolynomialSerializer
from poly_app.parser import parse, tokenize
from poly_app.polynomial import Polynomial, format_polynomial


def generated_expression(rng, dim, depth=0):
    """Builds a random grammar-valid expression string."""
    choice = rng.integers(0, 6 if depth < 3 else 2)
    if choice == 0:
        literal = rng.choice(['2', '0.5', '3.25', '1e-3', '.75', '10', '0'])
        return str(literal)
    if choice == 1:
        return f"x{rng.integers(1, dim + 1)}"
    if choice == 2:
        op = rng.choice([' + ', ' - ', '+', '-'])
        return generated_expression(rng, dim, depth + 1) + str(op) + generated_expression(rng, dim, depth + 1)
    if choice == 3:
        return generated_expression(rng, dim, depth + 1) + '*' + generated_expression(rng, dim, depth + 1)
    if choice == 4:
        return f"({generated_expression(rng, dim, depth + 1)})^{rng.integers(0, 3)}"
    return '-' + generated_expression(rng, dim, depth + 1)


class TestParse:

    def test_monomial_minus_constant(self):
        p = parse("x1^2*x2 - 3", 2)
        assert dict(p.terms) == {(2, 1): 1.0, (0, 0): -3.0}
        assert p.degree == 3

    def test_zero(self):
        p = parse("0", 3)
        assert p.is_zero
        assert p.degree == 0

    def test_binomial_expansion(self):
        assert dict(parse("(x1+x2)^2", 2).terms) == {(2, 0): 1.0, (1, 1): 2.0, (0, 2): 1.0}

    def test_unary_minus_binds_tighter_than_power(self):
        assert parse("-x1^2", 1) == parse("x1^2", 1)
        assert parse("-(x1^2)", 1) == -parse("x1^2", 1)

    def test_decimal_literals(self):
        assert parse("1.5e2*x1 + .25", 1) == Polynomial(1, {(1,): 150.0, (0,): 0.25})

    def test_whitespace_is_ignored(self):
        assert parse("  x1 *  x2\t+ 1 ", 2) == parse("x1*x2+1", 2)

    @pytest.mark.parametrize("text, position", [
        ("x1 +", 4),
        ("x1 ** 2", 4),
        ("(x1 + 1", 7),
        ("x1 / 2", 3),
        ("x1^2.5", 3),
        ("x1^-1", 3),
        ("2 x1", 2),
        ("", 0),
    ])
    def test_syntax_errors_carry_position(self, text, position):
        with pytest.raises(PolynomialSyntaxError) as excinfo:
            parse(text, 2)
        assert excinfo.value.position == position

    def test_variable_index_out_of_range(self):
        with pytest.raises(VariableIndexError) as excinfo:
            parse("x1 + x3", 2)
        assert excinfo.value.index == 3
        assert excinfo.value.position == 5

    def test_variable_index_zero(self):
        with pytest.raises(VariableIndexError):
            parse("x0", 2)

    def test_tokenize_positions(self):
        tokens = tokenize("x12 + 3")
        assert [(t.kind, t.text, t.position) for t in tokens] == [
            ('variable', 'x12', 0), ('op', '+', 4), ('number', '3', 6), ('end', '', 7),
        ]


def test_format_round_trip_on_generated_expressions():
    rng = stream(2024, 'parser-round-trip')
    for _ in range(10_000):
        dim = int(rng.integers(1, 4))
        text = generated_expression(rng, dim)
        p = parse(text, dim)
        assert parse(format_polynomial(p), dim) == p, text


class TestPolynomialSerializer:

    def test_valid_payload(self):
        serializer = PolynomialSerializer(data={'dim': 2, 'text': 'x1*x2 - 1'})
        assert serializer.is_valid(), serializer.errors
        assert serializer.save() == parse('x1*x2 - 1', 2)

    def test_syntax_error_reported_on_text(self):
        serializer = PolynomialSerializer(data={'dim': 1, 'text': 'x1 +'})
        assert not serializer.is_valid()
        assert 'text' in serializer.errors

    def test_index_error_reported_on_text(self):
        serializer = PolynomialSerializer(data={'dim': 1, 'text': 'x2'})
        with pytest.raises(ValidationError):
            serializer.is_valid(raise_exception=True)
