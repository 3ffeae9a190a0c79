import random
from fractions import Fraction as F

import pytest

from conftest import A2, CORPUS
from weilzeta.exact import polynomial_series
from weilzeta.fqm import build_fqm
from weilzeta.heckelocal import convolve, generator
from weilzeta.satake import (
    DegenerateEigenvalues, InconsistentSystem, UnramifiedCharacterPair, b_series, b_series_raw, cell_bruteforce,
    evaluate_table, generator_table, kappa_p, lambda_sum_identity_check, rational_expansion, satake_transform,
    solve_satake,
)
from weilzeta.weil import LocalSpace


def sp(name, p):
    return LocalSpace(build_fqm(CORPUS[name]), p)


def test_coprime_tables():
    S = sp("A2", 5)
    assert generator_table(S, 1, 1) == {(1, 1): 1}
    assert generator_table(S, 0, 2) == {(0, 2): 5, (1, 1): 4, (2, 0): 5}


@pytest.mark.parametrize("name,p", [("A2", 3), ("det7", 7)])
def test_bad_prime_tables(name, p):
    S = sp(name, p)
    assert generator_table(S, 1, 1) == {(1, 1): 1}
    assert generator_table(S, 0, 2) == {(0, 2): p, (2, 0): p}
    assert generator_table(S, 1, 3) == {(1, 3): p, (3, 1): p}


def test_grouped_sum_matches_bruteforce():
    S = sp("A2", 3)
    for kl in [(0, 2), (1, 3)]:
        T = generator(S, *kl)
        tab = satake_transform(T)
        n = sum(kl)
        for r in range(n + 1):
            bf = cell_bruteforce(T, r, n - r, n + abs(2 * r - n) + 1) * F(3) ** ((n - 2 * r) // 2)
            assert bf == tab.get((r, n - r), 0)


@pytest.mark.parametrize("name,p", [("A2", 5), ("A2", 3), ("A2+A2", 3)])
def test_homomorphism(name, p):
    S = sp(name, p)
    chi = (F(2, 3), F(-5, 7))
    for a, b in [((1, 1), (0, 2)), ((0, 2), (0, 2))]:
        AB = convolve(generator(S, *a), generator(S, *b))
        assert evaluate_table(satake_transform(AB), chi) == \
            evaluate_table(generator_table(S, *a), chi) * evaluate_table(generator_table(S, *b), chi)


def test_rational_expression_coprime():
    S = sp("A2", 5)
    rng = random.Random(0)
    for _ in range(5):
        chi = (F(rng.randint(1, 9), rng.randint(1, 9)), F(-rng.randint(1, 9), rng.randint(1, 9)))
        assert b_series(chi, S, 12) == rational_expansion(chi, 12)
    assert b_series((1, 1), S, 4).coeffs[4] == 5


def test_bad_prime_closed_form():
    # at a bad prime with |D_p| = p the raw series is
    # (1 - p^2 P^2 X^4) / ((1 - P X^2)(1 - p x1^2 X^2)(1 - p x2^2 X^2)), P = x1 x2
    S, p = sp("A2", 3), 3
    x1, x2 = F(2, 3), F(-5, 7)
    P = x1 * x2
    num = polynomial_series([1, 0, 0, 0, -p * p * P * P], 10)
    den = polynomial_series([1, 0, -P], 10) * polynomial_series([1, 0, -p * x1 * x1], 10) * \
        polynomial_series([1, 0, -p * x2 * x2], 10)
    assert b_series_raw((x1, x2), S, 10) == num * den.inverse()
    assert b_series((x1, x2), S, 10) != rational_expansion((x1, x2), 10)


def test_lambda_sum_identity():
    assert lambda_sum_identity_check((F(3, 4), F(-2, 5)), 12)


def test_solve_satake_round_trip():
    for name, p in [("A2", 5), ("A2", 3)]:
        S = sp(name, p)
        chi = (F(3, 2), F(-1, 4))
        evs = {"T1": evaluate_table(generator_table(S, 1, 1), chi),
               "T02": evaluate_table(generator_table(S, 0, 2), chi)}
        orbit = solve_satake(evs, S)
        assert len(orbit) == 4
        assert any(o.as_tuple() == chi for o in orbit)
        assert abs(complex(orbit[0].x1)) >= abs(complex(orbit[0].x2))


def test_solve_satake_errors():
    S = sp("A2", 5)
    with pytest.raises(DegenerateEigenvalues):
        solve_satake({"T1": 0, "T02": 1}, S)
    with pytest.raises(KeyError):
        solve_satake({"T1": 1}, S)


def test_character_pair():
    chi = UnramifiedCharacterPair(F(2), F(3))
    assert chi(9, 3, 3) == 4 * 3
    assert chi.swap().as_tuple() == (3, 2)
    with pytest.raises(ValueError):
        UnramifiedCharacterPair(0, 1)


def test_kappa_p_a2():
    assert kappa_p(sp("A2", 3)) == -2
    assert kappa_p(sp("A4", 5)) == F(13, 3)
    with pytest.raises(ValueError):
        kappa_p(sp("A2", 5))
