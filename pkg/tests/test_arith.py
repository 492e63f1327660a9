import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from essdag.arith import (Polynomial, as_exact, binomial, bounded_vectors, compositions, factorial,
                          format_number, interpolate, interpolate_grid, multinomial)


@pytest.mark.parametrize("n,m,expected", [(5, 2, 10), (3, 0, 1), (2, 5, 0), (0, 0, 1)])
def test_binomial(n, m, expected):
    assert binomial(n, m) == expected


@pytest.mark.parametrize("k,expected", [((1, 1, 1), 6), ((3,), 1), ((2, 2), 6), ((), 1)])
def test_multinomial(k, expected):
    assert multinomial(k) == expected


def test_factorial_and_errors():
    assert factorial(20) == 2432902008176640000
    with pytest.raises(ValueError):
        factorial(-1)
    assert binomial(-1, 0) == 0 and binomial(3, -1) == 0


@given(st.integers(0, 40), st.integers(0, 40))
def test_pascal(n, m):
    assert binomial(n + 1, m + 1) == binomial(n, m) + binomial(n, m + 1)


def test_interpolate_quadratic():
    assert interpolate([(0, 1), (1, 2), (2, 5)]) == Polynomial([1, 0, 1])


def test_interpolate_constant():
    assert interpolate([(0, 7)]) == Polynomial([7])


def test_interpolate_duplicate_abscissa():
    with pytest.raises(ValueError):
        interpolate([(1, 2), (1, 3)])


def test_interpolate_random_cubic():
    rng = random.Random(5)
    coeffs = [rng.randint(-50, 50) for _ in range(4)]
    p = Polynomial(coeffs)
    q = interpolate([(x, p(x)) for x in range(1, 5)])
    assert [q.coefficient(i) for i in range(4)] == coeffs


def test_interpolate_grid_two_axes():
    axes = [[1, 2, 3], [1, 2]]
    f = {(a, b): 3 + 2 * a * b + a * a for a in axes[0] for b in axes[1]}
    coeffs = interpolate_grid(axes, f)
    assert coeffs == {(0, 0): 3, (1, 1): 2, (2, 0): 1}


def test_polynomial_ops():
    p, q = Polynomial([1, 1]), Polynomial([-1, 1])
    assert p * q == Polynomial([-1, 0, 1])
    assert (p - p).degree == -1 or (p - p) == Polynomial([])
    assert (p + q)(3) == 6


def test_exact_values():
    assert as_exact("3/6") == Fraction(1, 2)
    assert as_exact(4) == 4
    with pytest.raises((TypeError, ValueError)):
        as_exact(0.5)
    assert format_number(Fraction(3, 1)) == "3"
    assert format_number(Fraction(-2, 4)) == "-1/2"


def test_compositions_order():
    assert list(compositions(2, 2)) == [(0, 2), (1, 1), (2, 0)]
    assert len(list(compositions(5, 3))) == binomial(7, 2)
    assert list(bounded_vectors((1, 1))) == [(0, 0), (0, 1), (1, 0), (1, 1)]
