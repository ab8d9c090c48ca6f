from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specind import MultiAffinePolynomial, ValidationError

F = Fraction


def P(d):
    return MultiAffinePolynomial.from_dict(d)


def test_construction_and_normalization():
    p = P({frozenset(): 1, frozenset([2]): 0, frozenset([0, 1]): F(3, 2)})
    d = p.as_dict()
    assert frozenset([2]) not in d  # zero terms dropped
    assert d[frozenset()] == 1
    assert p.variables == frozenset([0, 1])


def test_evaluate_requires_all_variables():
    p = P({frozenset([0, 1]): 2})
    assert p.evaluate({0: 3, 1: 5}) == 30
    with pytest.raises(ValidationError):
        p.evaluate({0: 3})


def test_add_and_scalar_multiply():
    p = P({frozenset([0]): 1})
    q = P({frozenset([0]): -1, frozenset(): 4})
    s = p + q
    assert s.as_dict() == {frozenset(): 4}
    assert (p * 3).as_dict() == {frozenset([0]): 3}


def test_multiply_by_variable_is_squarefree_guard():
    p = P({frozenset([0]): 1, frozenset(): 1})
    q = p.multiply_by_variable(1)
    assert q.as_dict() == {frozenset([0, 1]): 1, frozenset([1]): 1}
    with pytest.raises(ValidationError):
        p.multiply_by_variable(0)  # would square variable 0


def test_specialize_zero_drops_terms():
    p = P({frozenset([0, 1]): 2, frozenset([1]): 3, frozenset(): 5})
    assert p.specialize_zero(0).as_dict() == {frozenset([1]): 3, frozenset(): 5}


def test_derivative_keeps_only_terms_with_variable():
    p = P({frozenset([0, 1]): 2, frozenset([1]): 3})
    assert p.derivative(0).as_dict() == {frozenset([1]): 2}
    assert p.derivative(2).is_zero()


coeffs = st.integers(-4, 4).map(F)
monos = st.frozensets(st.integers(0, 4), max_size=4)
polys = st.dictionaries(monos, coeffs, max_size=8).map(P)


@given(polys, st.integers(0, 4))
@settings(max_examples=60, deadline=None)
def test_derivative_equals_inversion_then_specialize(p, v):
    lhs = p.derivative(v)
    rhs = p.inversion(v).specialize_zero(v)
    assert lhs.as_dict() == rhs.as_dict()


@given(polys, st.integers(0, 4))
@settings(max_examples=60, deadline=None)
def test_inversion_is_an_involution(p, v):
    assert p.inversion(v).inversion(v).as_dict() == p.as_dict()


@given(polys)
@settings(max_examples=40, deadline=None)
def test_evaluate_matches_termwise_sum(p):
    point = {v: F(2) for v in range(5)}
    expected = sum(
        (c * F(2) ** len(mono) for mono, c in p.as_dict().items()), F(0)
    )
    assert p.evaluate(point) == expected
