import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from conftest import A2
from weilzeta.fqm import build_fqm
from weilzeta.heckelocal import (
    _mul, cartan_decompose, classical_coset_count, convolve, coset_count_bruteforce, generator, generator_Tk,
    generator_Tkl, in_lambda, lambda_plus, left_coset_reps, random_kp_element, vp,
)
from weilzeta.weil import LocalSpace


@pytest.fixture(scope="module")
def a2_3():
    return LocalSpace(build_fqm(A2), 3)


def test_lambda_plus():
    assert lambda_plus(4) == [(0, 0), (0, 2), (1, 1), (0, 4), (1, 3), (2, 2)]
    assert in_lambda(1, 3) and not in_lambda(0, 1) and not in_lambda(2, 0, ordered=True)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.lists(st.integers(-40, 40), min_size=4, max_size=4),
       st.lists(st.sampled_from([1, 2, 3, 5, 7, 9, 25]), min_size=4, max_size=4))
def test_cartan_round_trip(p, nums, dens):
    m = [F(a, b) for a, b in zip(nums, dens)]
    det = m[0] * m[3] - m[1] * m[2]
    if det == 0 or vp(det, p) % 2:
        return
    try:
        cf = cartan_decompose(m, p)
    except ValueError:
        return   # unit part of det not a square in Q_p
    assert cf.k <= cf.l
    assert cf.reconstruct() == tuple(m)
    assert cf.k1.det() == 1


def test_cartan_examples():
    assert cartan_decompose([[3, 1], [0, 3]], 3).index == (0, 2)
    assert cartan_decompose([[1, 0], [0, 9]], 3).index == (0, 2)
    with pytest.raises(ValueError):
        cartan_decompose([[1, 0], [0, 3]], 3)


@pytest.mark.parametrize("p", [3, 5])
def test_coset_counts(p):
    for k, l in lambda_plus(4):
        n = len(left_coset_reps(p, k, l))
        assert n == coset_count_bruteforce(p, k, l) == classical_coset_count(p, k, l)


def test_convolution_identities(a2_3):
    S = a2_3
    T1, T2 = generator_Tk(S, 1), generator_Tk(S, 2)
    T02 = generator_Tkl(S, 0, 2)
    assert convolve(T1, T1) == T2
    assert convolve(T02, T1) == convolve(T1, T02)
    assert convolve(generator_Tk(S, 0), T02) == T02


def test_bi_equivariance(a2_3):
    S = a2_3
    T = generator_Tkl(S, 0, 2)
    rng = random.Random(4)
    for _ in range(10):
        k1, k2 = random_kp_element(rng, 3, 4), random_kp_element(rng, 3, 4)
        g = (F(1), F(rng.randrange(9)), F(0), F(9))
        gg = _mul(_mul(k1.matrix, g), k2.matrix)
        root = F(3) * k1.witness * k2.witness
        assert T.evaluate(gg, root) == S.omega_eval(k1) @ T.evaluate(g, F(3)) @ S.omega_eval(k2)


def test_tkl_requires_anisotropy():
    S = LocalSpace(build_fqm([[0, 5], [5, 0]]), 5)
    with pytest.raises(ValueError):
        generator(S, 0, 2)
