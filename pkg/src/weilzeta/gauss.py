"""Gauss sums of finite quadratic modules and the characters they define."""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from math import gcd

from .exact import Cyclotomic, ScaledMatrix, embed_complex, jacobi_symbol, root_of_unity
from .fqm import FiniteQuadraticModule, p_part

MAX_ORDER = 10 ** 5


def _lcm(a, b):
    return a // gcd(a, b) * b


@dataclass(frozen=True)
class GaussSumValue:
    """Exact value of g_d(D); ``radicand`` is |D| for the normalized view."""

    value: Cyclotomic
    radicand: int

    def as_scaled(self):
        """The value as a 1x1 ScaledMatrix."""
        return ScaledMatrix([[self.value]], self.radicand, 0)

    def normalized(self):
        """g_d(D) / sqrt|D| as a 1x1 ScaledMatrix with half_power 1."""
        return ScaledMatrix([[self.value]], self.radicand, 1)

    def __complex__(self):
        return embed_complex(self.value)


def gauss_sum(D, d=1, conductor=None):
    """g_d(D) = sum over D of e(d q(x)), summed exactly."""
    if D.order > MAX_ORDER:
        raise ValueError(f"|D| = {D.order} exceeds the enumeration bound {MAX_ORDER}")
    M = conductor or D.level
    counts = [0] * M
    for x in D.elements():
        t = d * D.q(x)
        counts[(t.numerator * (M // t.denominator)) % M] += 1
    return GaussSumValue(Cyclotomic(M, counts), D.order)


def chi_D(D, n):
    """g_n(D) / g(D) for n coprime to the level."""
    if gcd(n, D.level) != 1:
        raise ValueError(f"n = {n} is not coprime to the level {D.level}")
    return gauss_sum(D, n).value / gauss_sum(D, 1).value


def eighth_root_index(value, radicand):
    """t mod 8 with value = sqrt(radicand) * e(t/8), for a value of that shape."""
    M = _lcm(value.M, 8)
    v = value.lift(M)
    sq = v * v
    for t in range(8):
        if sq == root_of_unity(t * M // 4, M) * radicand:
            break
    else:
        raise ValueError("value is not sqrt(radicand) times an 8th root of unity")
    # t is determined mod 4; the embedding fixes the sign
    z = embed_complex(v) / radicand ** 0.5
    for cand in (t % 4, t % 4 + 4):
        if abs(z - cmath.exp(2j * cmath.pi * cand / 8)) < 1e-6:
            return cand
    raise ValueError("embedding inconsistent with an 8th root of unity")


def oddity(D):
    """Oddity residue mod 8; zero whenever |D| is odd."""
    if D.order % 2:
        return 0
    D2 = p_part(D, 2)
    return eighth_root_index(gauss_sum(D2).value, D2.order)


def milgram_phase(D):
    """t mod 8 with g(D) = sqrt|D| e(t/8); equals sig(L) for the lattice of D."""
    return eighth_root_index(gauss_sum(D).value, D.order)


def gauss_quotient_rhs(D, d):
    """(d/|D|) e((d-1) oddity(D)/8) for d coprime to |D| (odd |D| uses the Jacobi symbol)."""
    if gcd(d, D.order) != 1:
        raise ValueError("d must be coprime to |D|")
    if D.order % 2:
        sym = jacobi_symbol(d, D.order)
    else:
        sym = _kronecker(d, D.order)
    phase = ((d - 1) * oddity(D)) % 8
    return root_of_unity(phase, 8) * sym


def _kronecker(a, n):
    result = 1
    while n % 2 == 0:
        n //= 2
        if a % 2 == 0:
            return 0
        if a % 8 in (3, 5):
            result = -result
    return result * (jacobi_symbol(a, n) if n > 1 else 1)
