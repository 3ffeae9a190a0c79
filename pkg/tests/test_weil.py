import random

import pytest

from conftest import A2, CORPUS
from weilzeta.fqm import build_fqm
from weilzeta.heckelocal import random_kp_element
from weilzeta.weil import KpElement, LocalSpace, sqrt_mod_prime_power


def space(name, p):
    return LocalSpace(build_fqm(CORPUS[name]), p)


def test_sqrt_mod_prime_power():
    for u in (u for u in range(1, 27) if u % 3):
        r = sqrt_mod_prime_power(u, 3, 3)
        if r is not None:
            assert (r * r - u) % 27 == 0
    assert sqrt_mod_prime_power(2, 3, 2) is None


def test_relation_w_n_cubed():
    S = space("A2", 3)
    wn = S.omega_w() @ S.omega_n(1)
    assert wn @ wn @ wn == S.identity()


def test_w_inverse():
    S = space("det7", 7)
    assert S.omega_w() @ S.omega_w_inverse() == S.identity()


@pytest.mark.parametrize("name,p", [("A2", 3), ("det7", 7), ("det15", 5), ("A2+A2", 3), ("A2", 5)])
def test_multiplicativity(name, p):
    S = space(name, p)
    rng = random.Random(11)
    prec = S.a + 3
    for _ in range(25):
        k1, k2 = random_kp_element(rng, p, prec), random_kp_element(rng, p, prec)
        assert S.omega_eval(k1) @ S.omega_eval(k2) == S.omega_eval(k1 * k2)


def test_isotropic_multiplicativity():
    S = LocalSpace(build_fqm([[0, 5], [5, 0]]), 5)
    assert not S.anisotropic
    rng = random.Random(2)
    for _ in range(5):
        k1, k2 = random_kp_element(rng, 5, S.a + 3), random_kp_element(rng, 5, S.a + 3)
        assert S.omega_eval(k1) @ S.omega_eval(k2) == S.omega_eval(k1 * k2)


def test_witness_sign_matters_only_by_character():
    S = space("A2", 3)
    k = KpElement([2, 0, 0, 2], 3, 2, 4)
    kk = KpElement([2, 0, 0, 2], 3, -2, 4)
    assert S.omega_eval(k) != S.omega_eval(kk)


def test_invalid_elements():
    with pytest.raises(ValueError):
        KpElement([3, 0, 0, 3], 3)
    with pytest.raises(ValueError):
        KpElement([1, 0, 0, 2], 3)  # 2 is not a square mod 3
    with pytest.raises(ValueError):
        LocalSpace(build_fqm(A2), 2)
