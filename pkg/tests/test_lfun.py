import cmath
import json
import random
from fractions import Fraction as F

import mpmath
import pytest

from conftest import A2, CORPUS, DET19
from weilzeta.fqm import LatticeError, UnsupportedLattice, build_fqm
from weilzeta.lfun import (
    CONVENTIONS, DivergenceError, EigenvalueTable, LocalLFactor, PoleError, adapter_lambda_F, calZp_factorized,
    calZp_series, chi_complement, dirichlet_L, global_L, hurwitz_zeta, satake_parameters, scalar_hecke_eigrel,
    synthetic_table, zeta_formula,
)

LEGENDRE3 = (3, [F(0), F(1), F(-1)])


def test_dirichlet_known_value():
    assert abs(dirichlet_L(LEGENDRE3, 2) - 0.7813024128964864) < 1e-10
    assert abs(dirichlet_L(build_fqm(A2), 2) - 0.7813024128964864) < 1e-10
    # L(0, chi_{-3}) = 1/3
    assert abs(dirichlet_L(LEGENDRE3, 0) - 1 / 3) < 1e-12


def test_hurwitz_against_mpmath():
    for s in [2, 0.5 + 3j, -1.5 - 7j]:
        assert abs(complex(hurwitz_zeta(s, F(1, 3))) - complex(mpmath.zeta(s, mpmath.mpf(1) / 3))) < 1e-10


def test_principal_pole():
    with pytest.raises(PoleError):
        dirichlet_L((1, [F(1)]), 1)
    # A2 + A2 gives the principal character mod 3
    with pytest.raises(PoleError):
        dirichlet_L(build_fqm(CORPUS["A2+A2"]), 1)


def test_table_validation():
    with pytest.raises(LatticeError):
        EigenvalueTable(4, A2, {5: [2, 1]})
    t = EigenvalueTable.from_json(json.dumps({"kappa": 4, "gram": A2, "primes": {"5": [1, "1/2", [0.5, 1.0]]}}))
    assert t.lam(5, 1) == F(1, 2) and t.lam(5, 2) == 0.5 + 1j
    with pytest.raises(LatticeError):
        EigenvalueTable.from_json({"kappa": 4, "gram": A2, "primes": {"4": [1]}})
    with pytest.raises(UnsupportedLattice):
        EigenvalueTable(4, [[2, 1], [1, 14]], {}).require_squarefree()


def test_scalar_hecke_eigrel():
    D = build_fqm(CORPUS["A4"])   # |D| = 5
    r = scalar_hecke_eigrel(3, 27, 4, D)
    assert r["m(l,k)"] == 9 * chi_complement(D, 3)
    assert r["m(1/k,1/l)"] == 27 ** 2 * chi_complement(D, 3) ** 3
    with pytest.raises(ValueError):
        scalar_hecke_eigrel(2, 6, 4, D)


def test_trivial_data():
    t = EigenvalueTable(4, A2, {5: [1, 0, 0]})
    z = calZp_series(t, 5, 4)
    # chi(5) = -1 for the Legendre symbol mod 3; displayed multiplier p^(-l(kappa-2))
    assert z.coeffs == [1, 0, F(-1, 25), 0, F(1, 625)]


@pytest.mark.parametrize("conv", CONVENTIONS)
@pytest.mark.parametrize("p,kappa", [(3, 4), (5, 6), (7, 4)])
def test_factorization(conv, p, kappa):
    rng = random.Random(p * kappa)
    seq = [F(1)] + [F(rng.randint(-30, 30), rng.randint(1, 7)) for _ in range(5)]
    t = EigenvalueTable(kappa, A2, {p: seq})
    assert calZp_series(t, p, 10, conv) == calZp_factorized(t, p, 10, conv)


def test_adapter_round_trip():
    rng = random.Random(1)
    tab, params = synthetic_table(A2, 4, {5: cmath.exp(1j * rng.random()), 3: cmath.exp(2j)}, 4)
    for p in (3, 5):
        x, orbit = satake_parameters(tab, p)
        assert min(abs(complex(o.x1) - params[p][0]) + abs(complex(o.x2) - params[p][1]) for o in orbit) < 1e-9
        assert abs(adapter_lambda_F(tab, p, (0, 0))) == 1


def test_local_factor():
    f = LocalLFactor(5, F(1, 2), F(1, 3))
    ser = f.series(6)
    x = 5 ** -2.0
    assert abs(f.evaluate(2) - complex(ser.evaluate(x))) < 1e-9
    assert f.denominator == (1, 0, -F(13, 36), 0, F(1, 36))


def test_global_L_coprime_agreement():
    rng = random.Random(7)
    tab, _ = synthetic_table(DET19, 4, {p: cmath.exp(2j * cmath.pi * rng.random()) for p in (3, 5, 7)}, 10)
    r = global_L(tab, 4, 7)
    assert r["residual"] < 1e-9


def test_global_L_divergence():
    tab, _ = synthetic_table(A2, 4, {5: 1j}, 6)
    with pytest.raises(DivergenceError):
        global_L(tab, 0.1, 5)


def test_continuation_smoke():
    t = EigenvalueTable(4, A2, {5: [1, 0, 0]})
    v = zeta_formula(t, F(-3, 4))   # 2s + kappa - 2 = 1/2
    assert cmath.isfinite(v)
