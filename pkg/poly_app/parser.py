"""
Recursive-descent parser for polynomial expressions.

Grammar:
    expr   := term (("+" | "-") term)*
    term   := factor ("*" factor)*
    factor := atom ("^" nonneg_int)?
    atom   := number | variable | "(" expr ")" | "-" atom
    variable := "x" positive_int
"""
import re
from dataclasses import dataclass

from core.exceptions import PolynomialSyntaxError, VariableIndexError

from .polynomial import Polynomial, add, multiply, power, scale, subtract

TOKEN_RE = re.compile(r"""
    (?P<space>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<variable>x(?P<index>\d+))
  | (?P<op>[-+*^()])
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    position: int


def tokenize(text):
    """Splits text into tokens; whitespace is dropped."""
    tokens = []
    position = 0
    while position < len(text):
        match = TOKEN_RE.match(text, position)
        if match is None:
            raise PolynomialSyntaxError(f"unexpected character {text[position]!r}", position)
        kind = match.lastgroup if match.lastgroup != 'index' else 'variable'
        if kind != 'space':
            tokens.append(Token(kind, match.group(kind), position))
        position = match.end()
    tokens.append(Token('end', '', len(text)))
    return tokens


class _Parser:
    def __init__(self, text, dim):
        self.dim = dim
        self.tokens = tokenize(text)
        self.index = 0

    @property
    def current(self):
        return self.tokens[self.index]

    def advance(self):
        token = self.current
        self.index += 1
        return token

    def expect_op(self, op):
        token = self.current
        if token.kind != 'op' or token.text != op:
            found = token.text or 'end of input'
            raise PolynomialSyntaxError(f"expected {op!r}, found {found!r}", token.position)
        return self.advance()

    def parse(self):
        result = self.expr()
        if self.current.kind != 'end':
            raise PolynomialSyntaxError(f"unexpected token {self.current.text!r}",
                                        self.current.position)
        return result

    def expr(self):
        result = self.term()
        while self.current.kind == 'op' and self.current.text in '+-':
            op = self.advance().text
            right = self.term()
            result = add(result, right) if op == '+' else subtract(result, right)
        return result

    def term(self):
        result = self.factor()
        while self.current.kind == 'op' and self.current.text == '*':
            self.advance()
            result = multiply(result, self.factor())
        return result

    def factor(self):
        base = self.atom()
        if self.current.kind == 'op' and self.current.text == '^':
            self.advance()
            token = self.current
            if token.kind != 'number' or not token.text.isdigit():
                raise PolynomialSyntaxError("exponent must be a non-negative integer",
                                            token.position)
            self.advance()
            return power(base, int(token.text))
        return base

    def atom(self):
        token = self.current
        if token.kind == 'number':
            self.advance()
            return Polynomial.constant(self.dim, float(token.text))
        if token.kind == 'variable':
            self.advance()
            index = int(token.text[1:])
            if not 1 <= index <= self.dim:
                raise VariableIndexError(index, self.dim, token.position)
            return Polynomial.variable(self.dim, index)
        if token.kind == 'op' and token.text == '(':
            self.advance()
            inner = self.expr()
            self.expect_op(')')
            return inner
        if token.kind == 'op' and token.text == '-':
            self.advance()
            return scale(self.atom(), -1.0)
        found = token.text or 'end of input'
        raise PolynomialSyntaxError(f"unexpected token {found!r}", token.position)


def parse(text, dim):
    """
    Parses a polynomial expression in the variables x1..x<dim>.

    Args:
        text (str): The expression, e.g. "x1^2*x2 - 3".
        dim (int): Number of variables of the resulting polynomial.

    Returns:
        Polynomial: The canonical polynomial denoted by the text.

    Raises:
        PolynomialSyntaxError: The text violates the grammar.
        VariableIndexError: A variable index exceeds dim.
    """
    return _Parser(text, dim).parse()
