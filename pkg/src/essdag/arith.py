"""Exact arithmetic: binomials, multinomials, polynomials and interpolation.

Numbers are Python ``int`` or ``fractions.Fraction``; nothing here rounds.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from itertools import product
from typing import Iterable, Iterator, Mapping, Sequence

Number = int | Fraction

_fact_lock = threading.Lock()
_factorials: list[int] = [1]


def factorial(n: int) -> int:
    """n! from a shared table that grows on demand."""
    if n < 0:
        raise ValueError("factorial of a negative number")
    table = _factorials
    if n < len(table):
        return table[n]
    with _fact_lock:
        while len(_factorials) <= n:
            _factorials.append(_factorials[-1] * len(_factorials))
        return _factorials[n]


def binomial(n: int, m: int) -> int:
    """C(n, m); zero outside 0 <= m <= n."""
    if m < 0 or n < 0 or m > n:
        return 0
    return factorial(n) // (factorial(m) * factorial(n - m))


def multinomial(k: Iterable[int]) -> int:
    """|k|! / prod k_i!."""
    k = list(k)
    out = factorial(sum(k))
    for ki in k:
        out //= factorial(ki)
    return out


def as_exact(value) -> Number:
    """Coerce ints, Fractions and strings like ``"3/4"`` to an exact number."""
    if isinstance(value, bool):
        raise TypeError("booleans are not weights")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        return as_exact(Fraction(value.strip()))
    if isinstance(value, float):
        raise TypeError("floating point values are not accepted; use a rational string")
    raise TypeError(f"cannot interpret {value!r} as an exact number")


def format_number(value: Number) -> str:
    """Decimal integer string or ``p/q``."""
    return str(Fraction(value))


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """All vectors of ``parts`` non-negative integers summing to ``total``, lexicographically."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def bounded_vectors(bound: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """All vectors componentwise <= ``bound``, lexicographically."""
    return product(*(range(b + 1) for b in bound))


class Polynomial:
    """Univariate polynomial with exact coefficients, index = degree."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable = ()):
        cs = [as_exact(c) if not isinstance(c, int) else c for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x) -> Number:
        acc: Number = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def coefficient(self, i: int) -> Number:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Polynomial([other]).coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __add__(self, other):
        other = _poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(self.coefficient(i) + other.coefficient(i) for i in range(n))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-c for c in self.coeffs)

    def __sub__(self, other):
        return self + (-_poly(other))

    def __mul__(self, other):
        other = _poly(other)
        if not self.coeffs or not other.coeffs:
            return Polynomial()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"


def _poly(value) -> Polynomial:
    return value if isinstance(value, Polynomial) else Polynomial([value])


def interpolate(points: Sequence[tuple]) -> Polynomial:
    """The unique polynomial of degree < len(points) through ``points``."""
    xs = [as_exact(x) for x, _ in points]
    ys = [as_exact(y) for _, y in points]
    if len(set(xs)) != len(xs):
        raise ValueError("duplicate abscissa in interpolation points")
    # Newton divided differences, then expand to monomial coefficients
    coef = [Fraction(y) for y in ys]
    n = len(xs)
    for level in range(1, n):
        for i in range(n - 1, level - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (xs[i] - xs[i - level])
    result = Polynomial()
    for i in range(n - 1, -1, -1):
        result = result * Polynomial([-xs[i], 1]) + coef[i]
    return Polynomial(as_exact(c) for c in result.coeffs)


def interpolate_grid(axes: Sequence[Sequence], values: Mapping[tuple, Number]) -> dict[tuple, Number]:
    """Tensor-product interpolation on a full grid.

    ``values`` maps each grid point (one abscissa per axis) to a value; the
    result maps exponent tuples to the nonzero coefficients of the unique
    polynomial with per-variable degree < len(axis).
    """
    table: dict[tuple, Number] = dict(values)
    for dim, axis in enumerate(axes):
        grouped: dict[tuple, dict] = {}
        for key, val in table.items():
            rest = key[:dim] + key[dim + 1:]
            grouped.setdefault(rest, {})[key[dim]] = val
        new: dict[tuple, Number] = {}
        for rest, line in grouped.items():
            poly = interpolate([(x, line.get(x, 0)) for x in axis])
            for e in range(len(axis)):
                c = poly.coefficient(e)
                if c:
                    new[rest[:dim] + (e,) + rest[dim:]] = c
        table = new
    return table
