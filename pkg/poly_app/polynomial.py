"""
Sparse multivariate polynomials of bounded degree.

A Polynomial is an immutable map from exponent vectors to non-zero real
coefficients. Terms are kept in graded-lexicographic order (higher total
degree first, then lexicographically descending exponents), which fixes
both the text formatting and the summation order of evaluations.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from types import MappingProxyType

import numpy as np

from core.exceptions import (
    DimensionMismatchError,
    InvalidDirectionError,
    PreconditionError,
)

UNIT_LENGTH_TOL = 1e-12


def graded_lex_key(exponent):
    """Sort key placing higher total degree first, then lex-descending exponents."""
    return (-sum(exponent), tuple(-e for e in exponent))


def monomials(dim, degree):
    """
    Lists every exponent vector of total degree <= degree in graded-lex order.

    Args:
        dim (int): Number of variables.
        degree (int): Maximal total degree.

    Returns:
        list[tuple[int, ...]]: The exponent vectors, highest degree first.
    """
    exponents = (
        exp for exp in itertools.product(range(degree + 1), repeat=dim)
        if sum(exp) <= degree
    )
    return sorted(exponents, key=graded_lex_key)


class Polynomial:
    """
    A polynomial in the variables x1..x<dim> with real coefficients.

    Instances are immutable and canonical: zero coefficients are never
    stored, so two polynomials are equal exactly when their term maps are.
    """
    __slots__ = ('_dim', '_terms', '_degree')

    def __init__(self, dim, terms=None):
        if isinstance(dim, bool) or not isinstance(dim, (int, np.integer)) or dim < 1:
            raise PreconditionError(f"dim must be a positive integer, got {dim!r}")
        dim = int(dim)
        canonical = {}
        for exponent, coefficient in (terms or {}).items():
            exponent = tuple(int(e) for e in exponent)
            if len(exponent) != dim:
                raise DimensionMismatchError(dim, len(exponent), what='exponent vector')
            if any(e < 0 for e in exponent):
                raise PreconditionError(f"negative exponent in {exponent}")
            coefficient = float(coefficient)
            if not math.isfinite(coefficient):
                raise PreconditionError(f"non-finite coefficient {coefficient} for {exponent}")
            if coefficient != 0.0:
                canonical[exponent] = coefficient
        ordered = dict(sorted(canonical.items(), key=lambda item: graded_lex_key(item[0])))
        self._dim = dim
        self._terms = MappingProxyType(ordered)
        self._degree = max((sum(exp) for exp in ordered), default=0)

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, dim):
        return cls(dim)

    @classmethod
    def constant(cls, dim, value):
        return cls(dim, {(0,) * dim: value})

    @classmethod
    def variable(cls, dim, index):
        """The coordinate polynomial x<index> (1-based)."""
        if not 1 <= index <= dim:
            raise PreconditionError(f"variable index {index} outside 1..{dim}")
        exponent = tuple(1 if j == index - 1 else 0 for j in range(dim))
        return cls(dim, {exponent: 1.0})

    # -- accessors ----------------------------------------------------------

    @property
    def dim(self):
        return self._dim

    @property
    def terms(self):
        """Read-only exponent -> coefficient map in graded-lex order."""
        return self._terms

    @property
    def degree(self):
        """Maximal total degree of a stored term; 0 for the zero polynomial."""
        return self._degree

    @property
    def is_zero(self):
        return not self._terms

    @property
    def is_constant(self):
        return self._degree == 0

    @property
    def constant_term(self):
        return self._terms.get((0,) * self._dim, 0.0)

    @property
    def text(self):
        return format_polynomial(self)

    # -- evaluation ---------------------------------------------------------

    def __call__(self, x):
        return evaluate(self, x)

    def evaluate_many(self, points):
        return evaluate_many(self, points)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Polynomial):
            return add(self, other)
        return add(self, Polynomial.constant(self._dim, other))

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Polynomial):
            return subtract(self, other)
        return subtract(self, Polynomial.constant(self._dim, other))

    def __rsub__(self, other):
        return subtract(Polynomial.constant(self._dim, other), self)

    def __neg__(self):
        return scale(self, -1.0)

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            return multiply(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def __pow__(self, exponent):
        return power(self, exponent)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self._dim == other._dim and dict(self._terms) == dict(other._terms)

    def __hash__(self):
        return hash((self._dim, tuple(self._terms.items())))

    def __repr__(self):
        return f"Polynomial(dim={self._dim}, {format_polynomial(self)!r})"

    def __str__(self):
        return format_polynomial(self)


@dataclass(frozen=True)
class Direction:
    """A unit vector e in R^dim, as used for directional derivatives."""
    dim: int
    components: tuple

    def __post_init__(self):
        components = tuple(float(c) for c in self.components)
        if len(components) != self.dim:
            raise DimensionMismatchError(self.dim, len(components), what='direction')
        if not all(math.isfinite(c) for c in components):
            raise InvalidDirectionError("direction has non-finite components")
        norm = math.sqrt(math.fsum(c * c for c in components))
        if abs(norm - 1.0) > UNIT_LENGTH_TOL:
            raise InvalidDirectionError(f"direction has length {norm!r}, expected 1")
        object.__setattr__(self, 'components', components)

    @classmethod
    def from_vector(cls, vector):
        """Normalizes a non-zero vector into a Direction."""
        array = np.asarray(vector, dtype=float).ravel()
        norm = float(np.linalg.norm(array))
        if norm == 0.0 or not math.isfinite(norm):
            raise InvalidDirectionError("cannot normalize a zero or non-finite vector")
        return cls(array.size, tuple(array / norm))

    @classmethod
    def axis(cls, dim, index):
        """The coordinate direction e<index> (1-based)."""
        if not 1 <= index <= dim:
            raise InvalidDirectionError(f"axis {index} outside 1..{dim}")
        return cls(dim, tuple(1.0 if j == index - 1 else 0.0 for j in range(dim)))

    def as_array(self):
        return np.array(self.components, dtype=float)

    def __neg__(self):
        return Direction(self.dim, tuple(-c for c in self.components))


def _check_same_dim(p, q):
    if p.dim != q.dim:
        raise DimensionMismatchError(p.dim, q.dim, what='polynomial')


def evaluate(p, x):
    """
    Evaluates p at a single point.

    Args:
        p (Polynomial): The polynomial.
        x (sequence[float]): A point of length p.dim.

    Returns:
        float: sum of c_alpha * x^alpha.
    """
    point = [float(v) for v in np.asarray(x, dtype=float).ravel()]
    if len(point) != p.dim:
        raise DimensionMismatchError(p.dim, len(point))
    total = 0.0
    for exponent, coefficient in p.terms.items():
        total += coefficient * math.prod(v ** e for v, e in zip(point, exponent) if e)
    return total


def evaluate_many(p, points):
    """
    Evaluates p at every row of an N x dim matrix.

    Terms are accumulated in canonical order, so the result is bit-exact
    reproducible for identical inputs.
    """
    points = np.asarray(points, dtype=float)
    if points.ndim != 2 or points.shape[1] != p.dim:
        actual = points.shape[1] if points.ndim == 2 else points.ndim
        raise DimensionMismatchError(p.dim, actual, what='point matrix')
    values = np.zeros(points.shape[0])
    powers = {}
    for exponent, coefficient in p.terms.items():
        monomial = np.full(points.shape[0], coefficient)
        for j, e in enumerate(exponent):
            if e:
                if (j, e) not in powers:
                    powers[(j, e)] = points[:, j] ** e
                monomial = monomial * powers[(j, e)]
        values = values + monomial
    return values


def add(p, q):
    _check_same_dim(p, q)
    terms = dict(p.terms)
    for exponent, coefficient in q.terms.items():
        terms[exponent] = terms.get(exponent, 0.0) + coefficient
    return Polynomial(p.dim, terms)


def subtract(p, q):
    _check_same_dim(p, q)
    terms = dict(p.terms)
    for exponent, coefficient in q.terms.items():
        terms[exponent] = terms.get(exponent, 0.0) - coefficient
    return Polynomial(p.dim, terms)


def scale(p, factor):
    factor = float(factor)
    return Polynomial(p.dim, {exp: factor * c for exp, c in p.terms.items()})


def multiply(p, q):
    _check_same_dim(p, q)
    terms = {}
    for exp_p, c_p in p.terms.items():
        for exp_q, c_q in q.terms.items():
            exponent = tuple(a + b for a, b in zip(exp_p, exp_q))
            terms[exponent] = terms.get(exponent, 0.0) + c_p * c_q
    return Polynomial(p.dim, terms)


def power(p, exponent):
    """Raises p to a non-negative integer power by repeated squaring."""
    if isinstance(exponent, bool) or not isinstance(exponent, (int, np.integer)) or exponent < 0:
        raise PreconditionError(f"exponent must be a non-negative integer, got {exponent!r}")
    result = Polynomial.constant(p.dim, 1.0)
    base = p
    k = int(exponent)
    while k:
        if k & 1:
            result = multiply(result, base)
        k >>= 1
        if k:
            base = multiply(base, base)
    return result


def partial_derivative(p, index):
    """The partial derivative with respect to x<index+1> (0-based index)."""
    terms = {}
    for exponent, coefficient in p.terms.items():
        e = exponent[index]
        if e:
            lowered = exponent[:index] + (e - 1,) + exponent[index + 1:]
            terms[lowered] = terms.get(lowered, 0.0) + coefficient * e
    return Polynomial(p.dim, terms)


def gradient(p):
    """Returns the tuple of partial derivatives (dp/dx1, ..., dp/dxn)."""
    return tuple(partial_derivative(p, i) for i in range(p.dim))


def directional_derivative(p, e):
    """
    Returns sum_i e_i * dp/dx_i.

    Args:
        p (Polynomial): The polynomial.
        e (Direction): A unit vector of the same dimension.

    Returns:
        Polynomial: The derivative of p along e.
    """
    if e.dim != p.dim:
        raise DimensionMismatchError(p.dim, e.dim, what='direction')
    terms = {}
    for i, weight in enumerate(e.components):
        if weight == 0.0:
            continue
        for exponent, coefficient in partial_derivative(p, i).terms.items():
            terms[exponent] = terms.get(exponent, 0.0) + weight * coefficient
    return Polynomial(p.dim, terms)


def compose_affine(p, matrix, shift):
    """
    Substitutes x = A y + b into p.

    Args:
        p (Polynomial): Polynomial in x.
        matrix (array_like): The dim x dim matrix A.
        shift (array_like): The vector b.

    Returns:
        Polynomial: q(y) = p(A y + b).
    """
    matrix = np.asarray(matrix, dtype=float)
    shift = np.asarray(shift, dtype=float).ravel()
    if matrix.shape != (p.dim, p.dim):
        raise DimensionMismatchError(p.dim, matrix.shape[0], what='affine matrix')
    if shift.size != p.dim:
        raise DimensionMismatchError(p.dim, shift.size, what='affine shift')
    linear_forms = []
    for i in range(p.dim):
        form = {(0,) * p.dim: shift[i]}
        for j in range(p.dim):
            exponent = tuple(1 if k == j else 0 for k in range(p.dim))
            form[exponent] = matrix[i, j]
        linear_forms.append(Polynomial(p.dim, form))

    powers = {}
    result = Polynomial.zero(p.dim)
    for exponent, coefficient in p.terms.items():
        term = Polynomial.constant(p.dim, coefficient)
        for i, e in enumerate(exponent):
            if e:
                if (i, e) not in powers:
                    powers[(i, e)] = power(linear_forms[i], e)
                term = multiply(term, powers[(i, e)])
        result = add(result, term)
    return result


def random_polynomial(dim, degree, coefficient_scale, rng):
    """
    Draws a polynomial with i.i.d. uniform coefficients on every monomial.

    Args:
        dim (int): Number of variables (>= 1).
        degree (int): Exact total degree of the result (>= 0).
        coefficient_scale (float): Coefficients are uniform on [-scale, scale].
        rng (numpy.random.Generator): Source of randomness.

    Returns:
        Polynomial: A polynomial whose total degree is exactly `degree`.
    """
    if dim < 1 or degree < 0:
        raise PreconditionError(f"need dim >= 1 and degree >= 0, got {dim}, {degree}")
    if not coefficient_scale > 0:
        raise PreconditionError("coefficient_scale must be positive")
    exponents = monomials(dim, degree)
    coefficients = rng.uniform(-coefficient_scale, coefficient_scale, size=len(exponents))
    top = [k for k, exp in enumerate(exponents) if sum(exp) == degree]
    while not np.any(coefficients[top]):
        coefficients[top] = rng.uniform(-coefficient_scale, coefficient_scale, size=len(top))
    return Polynomial(dim, dict(zip(exponents, coefficients)))


def _format_monomial(exponent):
    return '*'.join(
        f"x{j + 1}" + (f"^{e}" if e > 1 else '')
        for j, e in enumerate(exponent) if e
    )


def format_polynomial(p):
    """
    Canonical text: graded-lex order, explicit '*', 17 significant digits.

    A leading negative term always carries a numeric coefficient, because
    the grammar's unary minus binds tighter than '^'.
    """
    if p.is_zero:
        return '0'
    parts = []
    for k, (exponent, coefficient) in enumerate(p.terms.items()):
        magnitude = abs(coefficient)
        negative = coefficient < 0
        monomial = _format_monomial(exponent)
        number = format(magnitude, '.17g')
        if not monomial:
            body = number
        elif magnitude == 1.0 and not (k == 0 and negative):
            body = monomial
        else:
            body = f"{number}*{monomial}"
        if k == 0:
            parts.append(f"-{body}" if negative else body)
        else:
            parts.append(f" - {body}" if negative else f" + {body}")
    return ''.join(parts)
