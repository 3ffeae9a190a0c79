"""Satake transforms, unramified characters and the B-series.

The transform of T is tabulated as S(T)(r, s) = <S(T)(m(p^r, p^s)) phi0, phi0>,
including the factor delta^(1/2)(m(p^r, p^s)) = p^((s-r)/2).  A character
chi = (x1, x2) then acts by chi_hat(T) = sum S(T)(r, s) x1^r x2^s.
"""

from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass
from fractions import Fraction

from .exact import Cyclotomic, FormalSeries, polynomial_series
from .heckelocal import generator, in_lambda, vp
from .weil import LocalSpace

log = logging.getLogger(__name__)


class DegenerateEigenvalues(ValueError):
    """lambda(T_1) = 0: the product x1 x2 cannot be recovered."""


class InconsistentSystem(ValueError):
    """No character reproduces the given eigenvalues within tolerance."""


@dataclass(frozen=True)
class UnramifiedCharacterPair:
    """chi(m(t1, t2)) = x1^v(t1) x2^v(t2)."""

    x1: object
    x2: object

    def __post_init__(self):
        if self.x1 == 0 or self.x2 == 0:
            raise ValueError("character values must be nonzero")

    def __call__(self, t1, t2, p):
        return self.x1 ** vp(t1, p) * self.x2 ** vp(t2, p)

    def swap(self):
        return UnramifiedCharacterPair(self.x2, self.x1)

    def negate(self):
        return UnramifiedCharacterPair(-self.x1, -self.x2)

    def as_tuple(self):
        return (self.x1, self.x2)


def _simplify(x):
    if isinstance(x, Cyclotomic) and x.is_rational():
        return x.to_fraction()
    return x


# ---------------------------------------------------------------------------
# Satake transform


def _j_bound(n, r, s):
    return n + abs(r - s) + 1


def _cell(T, kl, r, s, j_max):
    """sum over b in N(Q_p)/N(Z_p), b = c/p^j with j <= j_max, of <T(m n(b)) phi0, phi0>."""
    S = T.space
    p = S.p
    k, l = kl
    n = k + l
    root = Fraction(p) ** (n // 2)
    pr, ps = Fraction(p) ** r, Fraction(p) ** s
    total = Cyclotomic.zero(S.M)
    val = T.support[kl]
    coprime = S.dim == 1
    scalar = val.to_even().entries[0][0] if coprime else None
    # b = 0
    if min(r, s) == k:
        if coprime:
            total = total + scalar
        else:
            total = total + T.coefficient((pr, Fraction(0), Fraction(0), ps), root)
    for j in range(1, j_max + 1):
        # [[p^r, p^(r-j) c], [0, p^s]] with c a unit has elementary divisor exponent min(s, r - j)
        if min(s, r - j) != k:
            continue
        if coprime:
            total = total + scalar * (p ** j - p ** (j - 1))
            continue
        # the coefficient only depends on c modulo p^a
        e = min(j, S.a)
        weight = p ** (j - e)
        sub = Cyclotomic.zero(S.M)
        for c in range(1, p ** e):
            if c % p == 0:
                continue
            g = (pr, pr * Fraction(c, p ** j), Fraction(0), ps)
            sub = sub + T.coefficient(g, root)
        total = total + sub * weight
    return total


def cell_bruteforce(T, r, s, j_max):
    """<S(T)(m(p^r, p^s)) phi0, phi0> / delta^(1/2), summing every unit c modulo p^j.

    No grouping and no type filtering; used to validate :func:`satake_transform`.
    """
    S = T.space
    p = S.p
    root = Fraction(p) ** ((r + s) // 2)
    pr, ps = Fraction(p) ** r, Fraction(p) ** s
    total = Cyclotomic.zero(S.M)
    for j in range(0, j_max + 1):
        for c in ([0] if j == 0 else [c for c in range(1, p ** j) if c % p]):
            total = total + T.coefficient((pr, pr * Fraction(c, p ** j), Fraction(0), ps), root)
    return total


def satake_transform(T, check=True):
    """SatakeTable {(r, s): value} of a Hecke element (values Fraction when rational)."""
    S = T.space
    p = S.p
    if S.dim > 1 and not S.anisotropic:
        raise ValueError("Satake transform needs an anisotropic p-part")
    table = {}
    for kl in T.support:
        n = kl[0] + kl[1]
        for r in range(0, n + 1):
            s = n - r
            jm = _j_bound(n, r, s)
            if check:
                # enlarging the range by two must not contribute
                for j in (jm + 1, jm + 2):
                    if min(s, r - j) == kl[0]:
                        raise RuntimeError(f"j-bound {jm} too small for {kl} at {(r, s)}")
            v = _cell(T, kl, r, s, jm)
            if v.is_zero():
                continue
            v = v * Fraction(p) ** ((s - r) // 2)
            table[(r, s)] = table[(r, s)] + v if (r, s) in table else v
    return {rs: _simplify(v) for rs, v in sorted(table.items()) if not (v == 0)}


_TABLE_CACHE = {}


def generator_table(space, k, l):
    """Cached Satake table of the standard generator for (k, l)."""
    key = (id(space), k, l)
    if key not in _TABLE_CACHE:
        _TABLE_CACHE[key] = (space, satake_transform(generator(space, k, l)))
    return _TABLE_CACHE[key][1]


def evaluate_table(table, chi):
    x1, x2 = chi.as_tuple() if isinstance(chi, UnramifiedCharacterPair) else chi
    acc = 0
    for (r, s), v in table.items():
        acc = acc + v * x1 ** r * x2 ** s
    return acc


def char_hat(chi, T):
    """chi_hat(T) = sum_(r,s) S(T)(r, s) x1^r x2^s."""
    return evaluate_table(satake_transform(T), chi)


# ---------------------------------------------------------------------------
# B-series and the rational expression


def b_series(chi, space, n_max=12):
    """B(chi, X) = sum over Lambda_+ of chi_hat(T_{k,l}) X^(k+l), in the variable X = p^-s.

    Taken literally with the delta^(1/2)-normalized transform, the degree-n
    coefficient carries an extra factor p^(n/2); it is divided out here so
    that B(chi, X) is a series in X = p^-s matching the rational expression.
    See :func:`b_series_raw` for the unnormalized sum.
    """
    raw = b_series_raw(chi, space, n_max)
    p = space.p
    return FormalSeries([c / Fraction(p) ** (n // 2) if n % 2 == 0 else c
                         for n, c in enumerate(raw.coeffs)])


def b_series_raw(chi, space, n_max=12):
    coeffs = [0] * (n_max + 1)
    for n in range(0, n_max + 1, 2):
        acc = 0
        for k in range(0, n // 2 + 1):
            acc = acc + evaluate_table(generator_table(space, k, n - k), chi)
        coeffs[n] = acc
    return FormalSeries(coeffs)


def rational_expansion(chi, n_max=12):
    """Taylor expansion of (1 + x1 x2 X^2) / ((1 - x1^2 X^2)(1 - x2^2 X^2))."""
    x1, x2 = chi.as_tuple() if isinstance(chi, UnramifiedCharacterPair) else chi
    if x1 == 0 or x2 == 0:
        raise ValueError("character values must be nonzero")
    num = polynomial_series([1, 0, x1 * x2], n_max)
    d1 = polynomial_series([1, 0, -x1 * x1], n_max)
    d2 = polynomial_series([1, 0, -x2 * x2], n_max)
    return num * (d1 * d2).inverse()


def lambda_sum(chi, n_max=12):
    """sum over (k, l) in Lambda (unordered) of x1^k x2^l X^(k+l)."""
    x1, x2 = chi.as_tuple() if isinstance(chi, UnramifiedCharacterPair) else chi
    coeffs = [0] * (n_max + 1)
    for n in range(0, n_max + 1, 2):
        coeffs[n] = sum((x1 ** k * x2 ** (n - k) for k in range(n + 1) if in_lambda(k, n - k)), 0)
    return FormalSeries(coeffs)


def lambda_sum_identity_check(chi, n_max=12):
    return lambda_sum(chi, n_max) == rational_expansion(chi, n_max)


def kappa_p(space):
    """(|D_p| p / gamma^2 + 1) mu(K_0(p)) with mu(K_0(p)) = 1/(p+1)."""
    if not isinstance(space, LocalSpace) or space.dim == 1:
        raise ValueError("kappa_p needs p dividing |D|")
    p = space.p
    g2 = space.gamma * space.gamma
    if not g2.is_rational():
        raise ValueError("gamma^2 is not rational")
    return (Fraction(space.order * p) / g2.to_fraction() + 1) / (p + 1)


# ---------------------------------------------------------------------------
# recovering characters from eigenvalues


def _sqrt(z):
    if isinstance(z, Fraction) and z >= 0:
        n, d = z.numerator, z.denominator
        rn, rd = _isqrt_exact(n), _isqrt_exact(d)
        if rn is not None and rd is not None:
            return Fraction(rn, rd)
    return cmath.sqrt(complex(z))


def _isqrt_exact(n):
    from math import isqrt
    r = isqrt(n)
    return r if r * r == n else None


def _canonical_key(pair):
    x1, x2 = (complex(v) for v in pair)
    return (-round(abs(x1), 12), round(cmath.phase(x1), 12), -round(abs(x2), 12), round(cmath.phase(x2), 12))


def canonical_order(pairs):
    """Order a Weyl orbit: |x1| >= |x2| first, then by argument."""
    return sorted(pairs, key=_canonical_key)


def solve_satake(evs, space, tol=1e-9):
    """Characters chi with chi_hat(T_1) = lam1 and chi_hat(T_{0,2}) = lam2.

    ``evs`` maps "T1" and "T02" (or (1, 1) and (0, 2)) to eigenvalues.  The
    system is read off the Satake tables of the generators.  Returns the
    orbit under x1 <-> x2 and (x1, x2) -> (-x1, -x2), canonically ordered.
    """
    lam1 = evs.get("T1", evs.get((1, 1)))
    lam2 = evs.get("T02", evs.get((0, 2)))
    if lam1 is None or lam2 is None:
        raise KeyError("need eigenvalues of T_1 and T_{0,2}")
    if lam1 == 0:
        raise DegenerateEigenvalues("lambda(T_1) = 0")
    t1 = generator_table(space, 1, 1)
    t2 = generator_table(space, 0, 2)
    c1 = t1.get((1, 1), 0)
    if set(t1) != {(1, 1)} or c1 == 0:
        raise RuntimeError(f"unexpected Satake table for T_1: {t1}")
    A, A2, B = t2.get((2, 0), 0), t2.get((0, 2), 0), t2.get((1, 1), 0)
    if A != A2 or A == 0 or set(t2) - {(2, 0), (1, 1), (0, 2)}:
        raise RuntimeError(f"unexpected Satake table for T_(0,2): {t2}")
    exact = all(isinstance(v, (int, Fraction)) for v in (lam1, lam2))
    if exact:
        lam1, lam2 = Fraction(lam1), Fraction(lam2)
    P = lam1 / c1
    S2 = (lam2 - B * P) / A
    disc = S2 * S2 - 4 * P * P
    root = _sqrt(disc)
    z1 = (S2 + root) / 2
    z2 = (S2 - root) / 2
    x1 = _sqrt(z1)
    if x1 == 0:
        raise DegenerateEigenvalues("vanishing Satake parameter")
    x2 = P / x1
    sols = {(x1, x2), (x2, x1), (-x1, -x2), (-x2, -x1)}
    for a, b in sols:
        r1 = abs(complex(evaluate_table(t1, (a, b)) - lam1))
        r2 = abs(complex(evaluate_table(t2, (a, b)) - lam2))
        scale = max(1.0, abs(complex(lam1)), abs(complex(lam2)))
        if not max(r1, r2) <= tol * scale:   # also catches nan
            raise InconsistentSystem(f"residual {max(r1, r2):.3g} exceeds tolerance")
    return [UnramifiedCharacterPair(a, b) for a, b in canonical_order(sols)]


def residual(chi, evs, space):
    t1 = generator_table(space, 1, 1)
    t2 = generator_table(space, 0, 2)
    lam1 = evs.get("T1", evs.get((1, 1)))
    lam2 = evs.get("T02", evs.get((0, 2)))
    return max(abs(complex(evaluate_table(t1, chi) - lam1)), abs(complex(evaluate_table(t2, chi) - lam2)))
