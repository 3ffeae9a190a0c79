"""Exact arithmetic: cyclotomic numbers, scaled matrices and truncated series.

Elements of Q(zeta_M) are stored in the power basis 1, z, ..., z^(phi(M)-1)
reduced modulo the M-th cyclotomic polynomial, as an integer numerator
vector over a positive common denominator.  That form is canonical, so
equality and hashing are structural.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from functools import lru_cache
from math import gcd
from numbers import Rational

import mpmath


def _lcm(a, b):
    return a // gcd(a, b) * b


@lru_cache(maxsize=None)
def cyclotomic_polynomial(M):
    """Integer coefficients (low degree first) of the M-th cyclotomic polynomial."""
    # x^M - 1 divided by Phi_d for every proper divisor d of M
    num = [-1] + [0] * (M - 1) + [1]
    for d in range(1, M):
        if M % d == 0:
            num = _exact_divide(num, cyclotomic_polynomial(d))
    return tuple(num)


def _exact_divide(a, b):
    a = list(a)
    out = [0] * (len(a) - len(b) + 1)
    for i in range(len(out) - 1, -1, -1):
        c = a[i + len(b) - 1]  # b is monic
        out[i] = c
        if c:
            for j, bj in enumerate(b):
                a[i + j] -= c * bj
    assert not any(a), "non-exact polynomial division"
    return out


@lru_cache(maxsize=None)
def _phi(M):
    return len(cyclotomic_polynomial(M)) - 1


def _reduce(vec, M):
    """Reduce an integer vector (any length) modulo Phi_M, in place; returns phi(M) entries."""
    poly = cyclotomic_polynomial(M)
    n = len(poly) - 1
    for i in range(len(vec) - 1, n - 1, -1):
        c = vec[i]
        if c:
            base = i - n
            for j in range(n):
                pj = poly[j]
                if pj:
                    vec[base + j] -= c * pj
            vec[i] = 0
    if len(vec) < n:
        vec.extend([0] * (n - len(vec)))
    return vec[:n]


def _mobius(n):
    result, d = 1, 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            result = -result
        d += 1
    return -result if n > 1 else result


@lru_cache(maxsize=None)
def _ramanujan_sum(M, k):
    # trace of zeta_M^k from Q(zeta_M) to Q
    g = gcd(M, k)
    total = 0
    for d in range(1, g + 1):
        if g % d == 0:
            total += _mobius(M // d) * d
    return total


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    raise TypeError(f"not a rational: {x!r}")


class Cyclotomic:
    """Exact element of the cyclotomic field Q(zeta_M)."""

    __slots__ = ("M", "num", "den", "_hash")

    def __init__(self, M, num, den=1, _canonical=False):
        if M < 1:
            raise ValueError("conductor must be positive")
        self.M = M
        if _canonical:
            self.num = num
            self.den = den
        else:
            if den == 0:
                raise ZeroDivisionError("zero denominator")
            vec = _reduce(list(num), M)
            if den < 0:
                den = -den
                vec = [-c for c in vec]
            g = den
            for c in vec:
                if c:
                    g = gcd(g, c)
                    if g == 1:
                        break
            if not any(vec):
                den, g = 1, 1
            self.num = tuple(c // g for c in vec)
            self.den = den // g
        self._hash = None

    # constructors --------------------------------------------------------
    @classmethod
    def rational(cls, x, M=1):
        x = _as_fraction(x)
        n = _phi(M)
        return cls(M, (x.numerator,) + (0,) * (n - 1), x.denominator, _canonical=True)

    @classmethod
    def zero(cls, M=1):
        return cls(M, (0,) * _phi(M), 1, _canonical=True)

    @classmethod
    def one(cls, M=1):
        return cls.rational(1, M)

    @classmethod
    def from_exponents(cls, M, coeffs):
        """Build sum c_k zeta_M^k from a mapping exponent -> rational."""
        den = 1
        for c in coeffs.values():
            den = _lcm(den, _as_fraction(c).denominator)
        vec = [0] * M
        for k, c in coeffs.items():
            c = _as_fraction(c)
            vec[k % M] += c.numerator * (den // c.denominator)
        return cls(M, vec, den)

    # structure -----------------------------------------------------------
    def lift(self, L):
        """The same number viewed in Q(zeta_L); requires M | L."""
        if L == self.M:
            return self
        if L % self.M:
            raise ValueError(f"conductor {self.M} does not divide {L}")
        step = L // self.M
        vec = [0] * L
        for k, c in enumerate(self.num):
            vec[k * step] = c
        return Cyclotomic(L, vec, self.den)

    def _common(self, other):
        if isinstance(other, Cyclotomic):
            if other.M == self.M:
                return self, other
            L = _lcm(self.M, other.M)
            return self.lift(L), other.lift(L)
        return self, Cyclotomic.rational(other, self.M)

    def is_zero(self):
        return not any(self.num)

    def is_rational(self):
        return not any(self.num[1:])

    def to_fraction(self):
        if not self.is_rational():
            raise ValueError("not a rational number")
        return Fraction(self.num[0], self.den)

    def mean_trace(self):
        """Trace to Q divided by phi(M); unchanged by lifting to a larger conductor."""
        M = self.M
        total = Fraction(0)
        for k, c in enumerate(self.num):
            if c:
                total += c * _ramanujan_sum(M, k)
        return total / (self.den * _phi(M))

    def coefficients(self):
        """Mapping exponent -> rational coefficient of the canonical form."""
        return {k: Fraction(c, self.den) for k, c in enumerate(self.num) if c}

    # arithmetic ----------------------------------------------------------
    def __add__(self, other):
        try:
            a, b = self._common(other)
        except TypeError:
            return NotImplemented
        if a.den == b.den:
            return Cyclotomic(a.M, [x + y for x, y in zip(a.num, b.num)], a.den)
        return Cyclotomic(a.M, [x * b.den + y * a.den for x, y in zip(a.num, b.num)], a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.M, tuple(-c for c in self.num), self.den, _canonical=True)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Cyclotomic):
            try:
                x = _as_fraction(other)
            except TypeError:
                return NotImplemented
            return Cyclotomic(self.M, [c * x.numerator for c in self.num], self.den * x.denominator)
        a, b = self._common(other)
        an = [(i, c) for i, c in enumerate(a.num) if c]
        bn = [(j, c) for j, c in enumerate(b.num) if c]
        if not an or not bn:
            return Cyclotomic.zero(a.M)
        vec = [0] * (2 * len(a.num))
        for i, x in an:
            for j, y in bn:
                vec[i + j] += x * y
        return Cyclotomic(a.M, vec, a.den * b.den)

    __rmul__ = __mul__

    def galois(self, u):
        """Apply the automorphism zeta -> zeta^u, gcd(u, M) = 1."""
        M = self.M
        if gcd(u, M) != 1:
            raise ValueError("exponent must be a unit")
        vec = [0] * M
        for k, c in enumerate(self.num):
            if c:
                vec[(k * u) % M] += c
        return Cyclotomic(M, vec, self.den)

    def conjugate(self):
        return self.galois(-1)

    def norm(self):
        """Field norm to Q."""
        prod = self
        for u in range(2, self.M):
            if gcd(u, self.M) == 1:
                prod = prod * self.galois(u)
        return prod.to_fraction()

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        if self.is_rational():
            return Cyclotomic.rational(1 / self.to_fraction(), self.M)
        rest = Cyclotomic.one(self.M)
        for u in range(2, self.M):
            if gcd(u, self.M) == 1:
                rest = rest * self.galois(u)
        n = (self * rest).to_fraction()
        return rest * (1 / n)

    def __truediv__(self, other):
        if isinstance(other, Cyclotomic):
            return self * other.inverse()
        try:
            x = _as_fraction(other)
        except TypeError:
            return NotImplemented
        return self * (1 / x)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        result = Cyclotomic.one(self.M)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Cyclotomic):
            if other.M != self.M:
                a, b = self._common(other)
                return a.num == b.num and a.den == b.den
            return self.num == other.num and self.den == other.den
        try:
            return self.is_rational() and self.to_fraction() == _as_fraction(other)
        except TypeError:
            return NotImplemented

    def __hash__(self):
        if self._hash is None:
            # normalized trace is conductor independent, so equal values hash equally
            self._hash = hash(self.mean_trace())
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def __complex__(self):
        return embed_complex(self)

    def __repr__(self):
        if self.is_rational():
            return f"Cyclotomic({self.to_fraction()})"
        terms = " + ".join(f"({c})*z{self.M}^{k}" for k, c in self.coefficients().items())
        return f"Cyclotomic({terms})"


def root_of_unity(a, M):
    """e(a/M) as an element of Q(zeta_M)."""
    if M < 1:
        raise ValueError("M must be positive")
    vec = [0] * M
    vec[a % M] = 1
    return Cyclotomic(M, vec)


@lru_cache(maxsize=None)
def sqrt_rational_int(d):
    """sqrt(d) for a positive integer d as an element of a cyclotomic field."""
    if d < 1:
        raise ValueError("need a positive integer")
    square, free = 1, 1
    n, q = d, 2
    while q * q <= n:
        while n % (q * q) == 0:
            n //= q * q
            square *= q
        if n % q == 0:
            n //= q
            free *= q
        q += 1
    free *= n
    result = Cyclotomic.rational(square)
    for q in _prime_list(free):
        if q == 2:
            z = root_of_unity(1, 8)
            r = z + z.conjugate()
        else:
            # quadratic Gauss sum: sqrt(q) or i sqrt(q)
            g = Cyclotomic(q, [jacobi_symbol(x, q) for x in range(q)])
            r = g if q % 4 == 1 else g * root_of_unity(3, 4)
        result = result * r
    return result


def _prime_list(n):
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            n //= q
        q += 1
    if n > 1:
        out.append(n)
    return out


def embed_complex(x, precision_bits=53):
    """Complex value of x under zeta_M -> exp(2 pi i / M).

    Returns a Python complex for the default precision, otherwise an
    ``mpmath.mpc`` carrying ``precision_bits`` of working precision.
    """
    if precision_bits < 53:
        raise ValueError("precision_bits must be >= 53")
    if not isinstance(x, Cyclotomic):
        return complex(x)
    if x.is_zero():
        return 0j if precision_bits == 53 else mpmath.mpc(0)
    with mpmath.workprec(precision_bits + 16):
        M = x.M
        total = mpmath.mpc(0)
        for k, c in enumerate(x.num):
            if c:
                total += c * mpmath.expjpi(mpmath.mpf(2 * k) / M)
        total /= x.den
        if precision_bits == 53:
            return complex(total)
        return +total


def jacobi_symbol(a, n):
    """Jacobi symbol (a/n) for odd positive n."""
    if n <= 0 or n % 2 == 0:
        raise ValueError("n must be odd and positive")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


# ---------------------------------------------------------------------------
# Scaled matrices


class ScaledMatrix:
    """Square matrix over Q(zeta_M) carrying an extra factor radicand^(-half_power/2).

    ``entries[i][j]`` is the coefficient of basis vector i in the image of
    basis vector j (column convention).
    """

    __slots__ = ("entries", "radicand", "half_power", "M")

    def __init__(self, entries, radicand=1, half_power=0, M=None):
        if radicand < 1:
            raise ValueError("radicand must be positive")
        if M is None:
            M = 1
            for row in entries:
                for e in row:
                    if isinstance(e, Cyclotomic):
                        M = _lcm(M, e.M)
        rows = []
        for row in entries:
            rows.append(tuple(e.lift(M) if isinstance(e, Cyclotomic) else Cyclotomic.rational(e, M)
                              for e in row))
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("matrix must be square")
        self.entries = tuple(rows)
        self.radicand = radicand
        self.half_power = half_power
        self.M = M

    @property
    def size(self):
        return len(self.entries)

    @classmethod
    def identity(cls, n, M=1, radicand=1):
        one, zero = Cyclotomic.one(M), Cyclotomic.zero(M)
        return cls([[one if i == j else zero for j in range(n)] for i in range(n)], radicand, 0, M)

    @classmethod
    def zeros(cls, n, M=1, radicand=1):
        zero = Cyclotomic.zero(M)
        return cls([[zero] * n for _ in range(n)], radicand, 0, M)

    def normalized(self):
        """Equivalent matrix with half_power in {0, 1}."""
        e = self.half_power
        if e in (0, 1):
            return self
        d = self.radicand
        shift = (e - (e % 2)) // 2  # number of whole radicand factors to pull out
        factor = Fraction(1, d ** shift) if shift > 0 else Fraction(d ** (-shift))
        rows = [[x * factor for x in row] for row in self.entries]
        return ScaledMatrix(rows, d, e % 2, self.M)

    def rescaled(self, half_power):
        """Same represented matrix written with the given half_power (same parity)."""
        if (half_power - self.half_power) % 2:
            raise ValueError("half_power parity must match")
        k = (half_power - self.half_power) // 2
        factor = Fraction(self.radicand) ** k
        rows = [[x * factor for x in row] for row in self.entries]
        return ScaledMatrix(rows, self.radicand, half_power, self.M)

    def to_even(self):
        """Equivalent matrix with half_power 0, absorbing sqrt(radicand) into the entries."""
        m = self.normalized()
        if not m.half_power:
            return m
        r = sqrt_rational_int(m.radicand) / m.radicand
        M = _lcm(m.M, r.M)
        rows = [[x.lift(M) * r for x in row] for row in m.entries]
        return ScaledMatrix(rows, m.radicand, 0, M)

    def to_plain(self):
        """Entries as plain Cyclotomic values; needs an even half_power."""
        m = self.normalized()
        if m.half_power:
            raise ValueError("odd half_power: entries involve a square root")
        return [list(r) for r in m.entries]

    def _check(self, other):
        if not isinstance(other, ScaledMatrix):
            raise TypeError("expected ScaledMatrix")
        if other.size != self.size:
            raise ValueError("size mismatch")
        if other.radicand != self.radicand and self.half_power % 2 and other.half_power % 2:
            raise ValueError("radicand mismatch")

    def __matmul__(self, other):
        self._check(other)
        n = self.size
        M = _lcm(self.M, other.M)
        A = self if self.M == M else ScaledMatrix(self.entries, self.radicand, self.half_power, M)
        B = other if other.M == M else ScaledMatrix(other.entries, other.radicand, other.half_power, M)
        zero = Cyclotomic.zero(M)
        bcols = [[(k, B.entries[k][j]) for k in range(n) if B.entries[k][j]] for j in range(n)]
        rows = []
        for i in range(n):
            arow = A.entries[i]
            row = []
            for j in range(n):
                acc = zero
                for k, b in bcols[j]:
                    a = arow[k]
                    if a:
                        acc = acc + a * b
                row.append(acc)
            rows.append(row)
        radicand = self.radicand if self.half_power else other.radicand
        return ScaledMatrix(rows, radicand, self.half_power + other.half_power, M).normalized()

    def apply(self, vec):
        """Matrix times a column vector of Cyclotomic values; returns (vector, half_power)."""
        n = self.size
        out = []
        for i in range(n):
            acc = Cyclotomic.zero(self.M)
            for k in range(n):
                a = self.entries[i][k]
                if a and vec[k]:
                    acc = acc + a * vec[k]
            out.append(acc)
        return out

    def scale(self, c):
        return ScaledMatrix([[x * c for x in row] for row in self.entries],
                            self.radicand, self.half_power)

    def __add__(self, other):
        self._check(other)
        a, b = self.normalized(), other.normalized()
        if a.half_power != b.half_power or (a.half_power and a.radicand != b.radicand):
            # mixed parity: absorb the square roots into the entries
            a, b = a.to_even(), b.to_even()
        M = _lcm(a.M, b.M)
        rows = [[x.lift(M) + y.lift(M) for x, y in zip(r, s)] for r, s in zip(a.entries, b.entries)]
        radicand = a.radicand if a.half_power else b.radicand
        return ScaledMatrix(rows, radicand, a.half_power, M)

    def conjugate_transpose(self):
        n = self.size
        rows = [[self.entries[j][i].conjugate() for j in range(n)] for i in range(n)]
        return ScaledMatrix(rows, self.radicand, self.half_power, self.M)

    def is_zero(self):
        return all(x.is_zero() for row in self.entries for x in row)

    def __eq__(self, other):
        if not isinstance(other, ScaledMatrix):
            return NotImplemented
        if self.size != other.size:
            return False
        a, b = self.normalized(), other.normalized()
        if a.is_zero() and b.is_zero():
            return True
        if a.half_power != b.half_power or (a.half_power and a.radicand != b.radicand):
            a, b = a.to_even(), b.to_even()
        return a.entries == b.entries

    def __hash__(self):
        return hash(self.to_even().entries)

    def to_complex(self):
        """Nested list of complex entries including the scale factor."""
        s = self.radicand ** (-self.half_power / 2)
        return [[embed_complex(x) * s for x in row] for row in self.entries]

    def entry(self, i, j):
        """(value, half_power) of one entry."""
        return self.entries[i][j], self.half_power

    def __repr__(self):
        return f"ScaledMatrix(size={self.size}, radicand={self.radicand}, half_power={self.half_power})"


# ---------------------------------------------------------------------------
# Truncated formal power series


class FormalSeries:
    """Power series truncated after X^n_max; coefficients may be any ring elements."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, n_max=None):
        coeffs = list(coeffs)
        if n_max is None:
            n_max = len(coeffs) - 1
        if n_max < 0:
            raise ValueError("n_max must be non-negative")
        coeffs = coeffs[: n_max + 1] + [0] * (n_max + 1 - len(coeffs))
        self.coeffs = coeffs

    @property
    def n_max(self):
        return len(self.coeffs) - 1

    def __getitem__(self, k):
        return self.coeffs[k] if 0 <= k <= self.n_max else 0

    def __len__(self):
        return len(self.coeffs)

    def _same(self, other):
        if not isinstance(other, FormalSeries):
            raise TypeError("expected FormalSeries")
        if other.n_max != self.n_max:
            raise ValueError(f"truncation mismatch: {self.n_max} vs {other.n_max}")

    def __add__(self, other):
        if not isinstance(other, FormalSeries):
            c = list(self.coeffs)
            c[0] = c[0] + other
            return FormalSeries(c)
        self._same(other)
        return FormalSeries([a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return FormalSeries([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, FormalSeries):
            return FormalSeries([a * other for a in self.coeffs])
        return series_mul(self, other)

    __rmul__ = __mul__

    def inverse(self):
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("constant term is zero")
        inv0 = 1 / c0 if not isinstance(c0, int) else Fraction(1, c0)
        out = [inv0]
        for k in range(1, self.n_max + 1):
            acc = 0
            for j in range(1, k + 1):
                a = self.coeffs[j]
                if a != 0:
                    acc = acc + a * out[k - j]
            out.append(-acc * inv0)
        return FormalSeries(out)

    def __truediv__(self, other):
        if isinstance(other, FormalSeries):
            return self * other.inverse()
        return FormalSeries([a / other for a in self.coeffs])

    def __eq__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return self.n_max == other.n_max and all(a == b for a, b in zip(self.coeffs, other.coeffs))

    def evaluate(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def map(self, fn):
        return FormalSeries([fn(c) for c in self.coeffs])

    def __repr__(self):
        return f"FormalSeries({self.coeffs!r})"


def series_mul(a, b):
    """Cauchy product truncated at the common n_max."""
    if not isinstance(a, FormalSeries) or not isinstance(b, FormalSeries):
        raise TypeError("expected FormalSeries operands")
    if a.n_max != b.n_max:
        raise ValueError(f"truncation mismatch: {a.n_max} vs {b.n_max}")
    n = a.n_max
    out = []
    for k in range(n + 1):
        acc = 0
        for i in range(k + 1):
            x = a.coeffs[i]
            if x != 0:
                y = b.coeffs[k - i]
                if y != 0:
                    acc = acc + x * y
        out.append(acc)
    return FormalSeries(out)


def polynomial_series(coeffs, n_max):
    """A polynomial given by low-first coefficients, as a series truncated at n_max."""
    return FormalSeries(list(coeffs)[: n_max + 1], n_max)


def complex_close(a, b, tol):
    return cmath.isclose(complex(a), complex(b), rel_tol=0, abs_tol=tol)
