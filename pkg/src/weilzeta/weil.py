"""The local Weil representation on the Schwartz space of D_p, for odd p.

Operators are ScaledMatrix values over Q(zeta_M) with radicand |D_p|.
Group elements carry a square root of their determinant: the formula for
the diagonal torus depends on that root, and with roots multiplied along
the matrices the assignment k -> omega(k) is an honest homomorphism.
Changing the root of one factor multiplies the operator by the parity map
phi^(mu) -> phi^(-mu), which fixes phi^(0) and commutes with every value of
the representation.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from math import gcd

from .exact import Cyclotomic, ScaledMatrix, jacobi_symbol, root_of_unity
from .fqm import FiniteQuadraticModule, is_anisotropic, p_part, valuation
from .gauss import chi_D, eighth_root_index, gauss_sum

log = logging.getLogger(__name__)

PRECISION_BUFFER = 3


def _lcm(a, b):
    return a // gcd(a, b) * b


def to_padic_int(x, modulus):
    """Residue of a p-integral rational modulo ``modulus``."""
    x = Fraction(x)
    try:
        inv = pow(x.denominator, -1, modulus)
    except ValueError:
        raise ValueError(f"{x} is not integral at the modulus {modulus}") from None
    return (x.numerator * inv) % modulus


def sqrt_mod_prime_power(u, p, e):
    """A square root of the unit u modulo p^e, or None when u is a non-residue."""
    u %= p ** e
    if u % p == 0:
        raise ValueError("not a unit")
    if pow(u, (p - 1) // 2, p) != 1:
        return None
    r = next(x for x in range(1, p) if (x * x - u) % p == 0)
    mod = p
    for _ in range(1, e):
        mod *= p
        # Newton step r <- r - (r^2 - u) / (2 r)
        r = (r - (r * r - u) * pow(2 * r, -1, mod)) % mod
    return r


class KpElement:
    """Element of K_p: a p-integral 2x2 matrix with unit-square determinant and a chosen root.

    ``matrix`` holds exact rationals (a, b, c, d); ``witness`` is an integer
    t modulo p^prec with t^2 = det.
    """

    __slots__ = ("p", "prec", "matrix", "witness")

    def __init__(self, matrix, p, witness=None, prec=None):
        if prec is None:
            prec = 1 + PRECISION_BUFFER
        a, b, c, d = (Fraction(x) for x in _flat(matrix))
        mod = p ** prec
        det = a * d - b * c
        for x in (a, b, c, d):
            if x.denominator % p == 0:
                raise ValueError("matrix entries must be p-integral")
        if det == 0 or det.numerator % p == 0:
            raise ValueError("determinant must be a p-adic unit")
        dm = to_padic_int(det, mod)
        if witness is None:
            witness = sqrt_mod_prime_power(dm, p, prec)
            if witness is None:
                raise ValueError("determinant is not a square unit")
            witness = min(witness, mod - witness)
        else:
            witness = to_padic_int(witness, mod)
            if (witness * witness - dm) % mod:
                raise ValueError("witness does not square to the determinant")
        self.p, self.prec = p, prec
        self.matrix = (a, b, c, d)
        self.witness = witness

    @classmethod
    def identity(cls, p, prec=None):
        return cls((1, 0, 0, 1), p, 1, prec)

    def __mul__(self, other):
        a, b, c, d = self.matrix
        e, f, g, h = other.matrix
        prec = min(self.prec, other.prec)
        return KpElement((a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h), self.p,
                         self.witness * other.witness, prec)

    def inverse(self):
        a, b, c, d = self.matrix
        det = a * d - b * c
        mod = self.p ** self.prec
        return KpElement((d / det, -b / det, -c / det, a / det), self.p,
                         pow(self.witness, -1, mod), self.prec)

    def det(self):
        a, b, c, d = self.matrix
        return a * d - b * c

    def residues(self, modulus):
        return tuple(to_padic_int(x, modulus) for x in self.matrix) + (self.witness % modulus,)

    def __eq__(self, other):
        return (isinstance(other, KpElement) and self.matrix == other.matrix
                and self.witness % self.p ** min(self.prec, other.prec)
                == other.witness % self.p ** min(self.prec, other.prec))

    def __hash__(self):
        return hash(self.matrix)

    def __repr__(self):
        return f"KpElement({[str(x) for x in self.matrix]}, witness={self.witness})"


def _flat(m):
    if len(m) == 2 and not isinstance(m[0], (int, Fraction)):
        return (m[0][0], m[0][1], m[1][0], m[1][1])
    return tuple(m)


class LocalSpace:
    """S_{L_p}: the span of phi^(mu), mu in D_p, with the operators of omega_p."""

    def __init__(self, D, p):
        if p == 2:
            raise ValueError("the local theory is implemented for odd p only")
        if D.order % p:
            Dp = FiniteQuadraticModule([], [])
        else:
            Dp = p_part(D, p)
        self.p = p
        self.D = Dp
        self.order = Dp.order
        self.a = valuation(Dp.level, p) if Dp.level > 1 else 0
        self.modulus = p ** self.a
        self.basis = list(Dp.elements())
        self.index = {mu: i for i, mu in enumerate(self.basis)}
        self.dim = len(self.basis)
        g = gauss_sum(Dp, 1)
        t = eighth_root_index(g.value, Dp.order) if Dp.order > 1 else 0
        self.M = _lcm(8 if t % 2 else 4, max(self.modulus, 1))
        self._q_exp = [self._exponent(Dp.q(mu)) for mu in self.basis]
        self.convention = "standard"
        self.gamma = root_of_unity(t * self.M // 8, self.M)
        self._cache = {}
        if not self._relation_holds():
            self.gamma = self.gamma.conjugate()
            self.convention = "conjugate"
            self._cache.clear()
            log.info("Weil index: conjugate convention selected for p=%d", p)
        if not self._relation_holds():
            raise RuntimeError("no Weil index convention satisfies (w n(1))^3 = 1")

    def _exponent(self, x):
        """Exponent k with e(x) = zeta_M^k for x with denominator dividing p^a."""
        x = Fraction(x) % 1
        return (x.numerator * (self.M // x.denominator)) % self.M

    def _relation_holds(self):
        if self.dim == 1:
            return True
        # w = [[0, 1], [-1, 0]] gives (w n(1))^3 = 1 in SL_2
        wn = self.omega_w() @ self.omega_n(1)
        return wn @ wn @ wn == self.identity()

    @property
    def anisotropic(self):
        return is_anisotropic(self.D)

    def zeta(self, k):
        return root_of_unity(k, self.M)

    def identity(self):
        return ScaledMatrix.identity(self.dim, self.M, self.order)

    def zero_operator(self):
        return ScaledMatrix.zeros(self.dim, self.M, self.order)

    def unit_vector(self, mu=None):
        i = 0 if mu is None else self.index[self.D.reduce(mu)]
        return [Cyclotomic.one(self.M) if j == i else Cyclotomic.zero(self.M) for j in range(self.dim)]

    # generators ------------------------------------------------------------
    def omega_n(self, b):
        """omega(n(b)): phi^(mu) -> psi_p(b q(mu)) phi^(mu)."""
        bb = to_padic_int(b, self.modulus) if self.modulus > 1 else 0
        key = ("n", bb)
        if key not in self._cache:
            n = self.dim
            zero = Cyclotomic.zero(self.M)
            rows = [[zero] * n for _ in range(n)]
            for i, k in enumerate(self._q_exp):
                rows[i][i] = self.zeta(bb * k)
            self._cache[key] = ScaledMatrix(rows, self.order, 0, self.M)
        return self._cache[key]

    def omega_w(self):
        """omega(w): gamma |D_p|^(-1/2) sum_nu psi_p((mu, nu)) phi^(nu)."""
        key = ("w",)
        if key not in self._cache:
            if self.dim == 1:
                self._cache[key] = self.identity()
            else:
                Dp = self.D
                rows = [[self.gamma * self.zeta(self._exponent(Dp.b(mu, nu))) for mu in self.basis]
                        for nu in self.basis]
                self._cache[key] = ScaledMatrix(rows, self.order, 1, self.M)
        return self._cache[key]

    def omega_w_inverse(self):
        key = ("winv",)
        if key not in self._cache:
            self._cache[key] = self.omega_w().conjugate_transpose()
        return self._cache[key]

    def omega_m(self, t1, t2, t=None):
        """omega(m(t1, t2)) with t^2 = t1 t2: phi^(mu) -> (t1/|D_p|) phi^(t^-1 t2 mu)."""
        p = self.p
        mod = p ** (self.a + PRECISION_BUFFER)
        u1, u2 = to_padic_int(t1, mod), to_padic_int(t2, mod)
        if u1 % p == 0 or u2 % p == 0:
            raise ValueError("m(t1, t2) needs p-adic units")
        if t is None:
            t = sqrt_mod_prime_power(u1 * u2, p, self.a + PRECISION_BUFFER)
            if t is None:
                raise ValueError("t1 t2 is not a square unit")
            t = min(t, mod - t)
        else:
            t = to_padic_int(t, mod)
            if (t * t - u1 * u2) % mod:
                raise ValueError("witness does not square to t1 t2")
        m = max(self.modulus, 1)
        key = ("m", u1 % p, (pow(t, -1, mod) * u2) % m)
        if key not in self._cache:
            sign = jacobi_symbol(u1, self.order) if self.order > 1 else 1
            mult = key[2]
            n = self.dim
            zero = Cyclotomic.zero(self.M)
            rows = [[zero] * n for _ in range(n)]
            val = Cyclotomic.rational(sign, self.M)
            for j, mu in enumerate(self.basis):
                rows[self.index[self.D.scale(mult, mu)]][j] = val
            self._cache[key] = ScaledMatrix(rows, self.order, 0, self.M)
        return self._cache[key]

    def omega_n_lower(self, c):
        """omega(n_(c)) defined as omega(w) omega(n(-c)) omega(w)^-1."""
        cc = to_padic_int(c, self.modulus) if self.modulus > 1 else 0
        key = ("nl", cc)
        if key not in self._cache:
            self._cache[key] = self.omega_w() @ self.omega_n(-cc) @ self.omega_w_inverse()
        return self._cache[key]

    def weil_index(self):
        return self.gamma

    # arbitrary elements ----------------------------------------------------
    def omega_eval(self, k):
        """omega_p(k) for a KpElement, through K_0(p) and the coset representatives T^j w^-1."""
        if k.p != self.p:
            raise ValueError("element belongs to a different prime")
        if self.dim == 1:
            return self.identity()
        mod = self.modulus
        a, b, c, d, t = k.residues(mod)
        key = ("k", a, b, c, d, t)
        if key in self._cache:
            return self._cache[key]
        p = self.p
        if c % p == 0:
            if a % p == 0:
                raise ValueError("upper-left and lower-left entries are both non-units")
            op = self._omega_k0(a, b, c, d, t)
        else:
            j = (a * pow(c, -1, p)) % p
            # k = (n(j) w^-1) k' with k' = w n(-j) k in K_0(p)
            a2, b2, c2, d2 = c, d, (-a + j * c) % mod, (-b + j * d) % mod
            op = self.omega_n(j) @ self.omega_w_inverse() @ self._omega_k0(a2, b2, c2, d2, t)
        self._cache[key] = op
        return op

    def _omega_k0(self, a, b, c, d, t):
        # k = n_(c/a) m(a, det/a) n(b/a), valid for c in pZ_p
        mod = self.modulus
        p = self.p
        ainv = pow(a, -1, mod)
        det = (a * d - b * c) % mod
        # only residues mod p^a matter here, so omega_m's precision check is skipped
        t1 = a
        t2 = (ainv * det) % mod
        sign = jacobi_symbol(t1, self.order)
        mult = (pow(t, -1, mod) * t2) % mod
        key = ("m", t1 % p, mult)
        if key not in self._cache:
            n = self.dim
            zero = Cyclotomic.zero(self.M)
            rows = [[zero] * n for _ in range(n)]
            val = Cyclotomic.rational(sign, self.M)
            for j, mu in enumerate(self.basis):
                rows[self.index[self.D.scale(mult, mu)]][j] = val
            self._cache[key] = ScaledMatrix(rows, self.order, 0, self.M)
        m_op = self._cache[key]
        return self.omega_n_lower((c * ainv) % mod) @ m_op @ self.omega_n((b * ainv) % mod)

    def chi(self, a):
        """chi_{D_p}(a) = g_a(D_p) / g(D_p)."""
        return chi_D(self.D, a) if self.order > 1 else Cyclotomic.one()


def omega_w(space):
    return space.omega_w()


def omega_n(space, b):
    return space.omega_n(b)


def omega_m(space, t1, t2, t=None):
    return space.omega_m(t1, t2, t)


def weil_index(space):
    return space.weil_index()


def omega_eval(space, k):
    return space.omega_eval(k)
