import cmath
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from weilzeta.exact import (
    Cyclotomic, FormalSeries, ScaledMatrix, embed_complex, jacobi_symbol, polynomial_series, root_of_unity,
    sqrt_rational_int,
)

small = st.integers(-6, 6)
conductors = st.sampled_from([1, 3, 4, 5, 8, 12, 15])


@st.composite
def cyclo(draw, M=None):
    M = M or draw(conductors)
    return Cyclotomic(M, [draw(small) for _ in range(M)], draw(st.integers(1, 5)))


def test_root_of_unity_relations():
    z = root_of_unity(1, 12)
    assert z ** 12 == Cyclotomic.one(12)
    assert z ** 6 == -Cyclotomic.one(12)
    # sum of primitive 5th roots is -1
    assert sum((root_of_unity(k, 5) for k in range(1, 5)), Cyclotomic.zero(5)) == Cyclotomic.rational(-1, 5)


def test_equality_across_conductors():
    assert root_of_unity(1, 4) == root_of_unity(3, 12)
    assert hash(root_of_unity(1, 4)) == hash(root_of_unity(3, 12))
    assert Cyclotomic.rational(Fraction(2, 3), 1) == Cyclotomic.rational(Fraction(2, 3), 7)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_field_axioms(data):
    M = data.draw(conductors)
    a, b, c = (data.draw(cyclo(M)) for _ in range(3))
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    if not a.is_zero():
        assert a * a.inverse() == Cyclotomic.one(M)


@settings(max_examples=40, deadline=None)
@given(cyclo())
def test_embedding_is_a_homomorphism(a):
    b = a * a + a
    assert abs(embed_complex(b) - (embed_complex(a) ** 2 + embed_complex(a))) < 1e-9


@pytest.mark.parametrize("d", [2, 3, 5, 7, 12, 15, 21, 45])
def test_sqrt_rational_int(d):
    r = sqrt_rational_int(d)
    assert r * r == Cyclotomic.rational(d)
    assert abs(embed_complex(r) - d ** 0.5) < 1e-12


def test_jacobi_symbol():
    assert [jacobi_symbol(a, 7) for a in range(7)] == [0, 1, 1, -1, 1, -1, -1]
    with pytest.raises(ValueError):
        jacobi_symbol(1, 4)


def test_scaled_matrix_parity_equality():
    # sqrt(3)^-1 * [[sqrt 3]] equals the plain identity
    s3 = sqrt_rational_int(3)
    a = ScaledMatrix([[s3]], 3, 1)
    b = ScaledMatrix([[1]], 3, 0)
    assert a == b
    assert hash(a) == hash(b)
    assert (a + b) == ScaledMatrix([[2]], 3, 0)


def test_scaled_matrix_product():
    z = root_of_unity(1, 3)
    a = ScaledMatrix([[z, 0], [0, 1]], 3, 1)
    assert (a @ a) == ScaledMatrix([[z * z, 0], [0, 1]], 3, 2)


def test_formal_series_inverse_and_geometric():
    geo = polynomial_series([1, -1], 8).inverse()
    assert geo == FormalSeries([1] * 9)
    s = FormalSeries([Fraction(2), 3, 0, 1])
    assert s * s.inverse() == FormalSeries([1, 0, 0, 0])
    with pytest.raises(ValueError):
        FormalSeries([1, 2]) * FormalSeries([1, 2, 3])
    with pytest.raises(ZeroDivisionError):
        FormalSeries([0, 1]).inverse()


def test_complex_embedding_of_eighth_root():
    assert cmath.isclose(embed_complex(root_of_unity(1, 8)), cmath.exp(1j * cmath.pi / 4))
