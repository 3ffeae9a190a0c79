import cmath
from math import gcd

import pytest

from conftest import CORPUS
from weilzeta.exact import embed_complex
from weilzeta.fqm import build_fqm, signature
from weilzeta.gauss import chi_D, gauss_quotient_rhs, gauss_sum, milgram_phase


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_milgram(name):
    g = CORPUS[name]
    D = build_fqm(g)
    val = embed_complex(gauss_sum(D).value) / D.order ** 0.5
    assert abs(val - cmath.exp(2j * cmath.pi * signature(g) / 8)) < 1e-10
    assert milgram_phase(D) == signature(g) % 8


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_gauss_quotient(name):
    D = build_fqm(CORPUS[name])
    g1 = gauss_sum(D).value
    for d in range(1, 3 * D.level):
        if gcd(d, D.order) == 1:
            assert gauss_sum(D, d).value / g1 == gauss_quotient_rhs(D, d)


def test_chi_a2_is_legendre_mod_3():
    D = build_fqm(CORPUS["A2"])
    assert [chi_D(D, n).to_fraction() for n in (1, 2, 4, 5)] == [1, -1, 1, -1]
    with pytest.raises(ValueError):
        chi_D(D, 3)
