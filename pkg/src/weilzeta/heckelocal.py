"""The spherical Hecke algebra H+(Q_p//K_p, omega_p).

Elements of Q_p are handled as exact rational 2x2 matrices together with a
p-adic square root of the determinant (``root``).  The root is what lets the
bi-equivariance F(k1 g k2) = omega(k1) F(g) omega(k2) be stated exactly; any
scalar of the form <F(g) phi0, phi0> is independent of it.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from .exact import Cyclotomic, ScaledMatrix
from .weil import PRECISION_BUFFER, KpElement, LocalSpace, sqrt_mod_prime_power, to_padic_int

log = logging.getLogger(__name__)

MAX_DEGREE = 12


@dataclass(frozen=True, order=True)
class LambdaIndex:
    """A pair (k, l) with k, l >= 0 and k + l even."""

    k: int
    l: int

    def __post_init__(self):
        if self.k < 0 or self.l < 0 or (self.k + self.l) % 2:
            raise ValueError(f"({self.k}, {self.l}) is not in Lambda")

    @property
    def ordered(self):
        return self.k <= self.l

    @property
    def degree(self):
        return self.k + self.l


def in_lambda(k, l, ordered=False):
    return k >= 0 and l >= 0 and (k + l) % 2 == 0 and (not ordered or k <= l)


def lambda_plus(n_max):
    """All (k, l) in Lambda_+ with k + l <= n_max."""
    return [(k, n - k) for n in range(0, n_max + 1, 2) for k in range(0, n // 2 + 1)]


# ---------------------------------------------------------------------------
# p-adic helpers


def vp(x, p):
    """p-adic valuation of a rational (infinity for 0)."""
    x = Fraction(x)
    if x == 0:
        return float("inf")
    v, n, d = 0, x.numerator, x.denominator
    while n % p == 0:
        n //= p
        v += 1
    while d % p == 0:
        d //= p
        v -= 1
    return v


def _mul(A, B):
    a, b, c, d = A
    e, f, g, h = B
    return (a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)


def _inv(A):
    a, b, c, d = A
    det = a * d - b * c
    return (d / det, -b / det, -c / det, a / det)


W = (Fraction(0), Fraction(1), Fraction(-1), Fraction(0))
W_INV = (Fraction(0), Fraction(-1), Fraction(1), Fraction(0))


def _n(b):
    return (Fraction(1), Fraction(b), Fraction(0), Fraction(1))


def _nl(c):
    return (Fraction(1), Fraction(0), Fraction(c), Fraction(1))


def default_root(det, p, prec):
    """Canonical square root of det in Q_p: p^(v/2) times the smaller Hensel root of the unit part."""
    det = Fraction(det)
    v = vp(det, p)
    if v % 2:
        raise ValueError("determinant has odd valuation")
    unit = det / Fraction(p) ** v
    mod = p ** prec
    r = sqrt_mod_prime_power(to_padic_int(unit, mod), p, prec)
    if r is None:
        raise ValueError("unit part of the determinant is not a square")
    r = min(r, mod - r)
    return Fraction(p) ** (v // 2) * r


@dataclass(frozen=True)
class CartanForm:
    """g = k1 m(p^k, p^l) k2 with k <= l."""

    k1: KpElement
    k: int
    l: int
    k2: KpElement

    @property
    def index(self):
        return (self.k, self.l)

    def reconstruct(self):
        p = self.k1.p
        m = (Fraction(p) ** self.k, Fraction(0), Fraction(0), Fraction(p) ** self.l)
        return _mul(_mul(self.k1.matrix, m), self.k2.matrix)


def cartan_decompose(g, p, root=None, prec=None):
    """Cartan decomposition of g in Q_p (entries exact rationals).

    ``root`` is a square root of det(g) in Q_p (rational, correct modulo the
    working precision); it fixes the root carried by k2.  k1 always has
    determinant 1 and root 1.
    """
    if prec is None:
        prec = 1 + PRECISION_BUFFER
    A = tuple(Fraction(x) for x in (g if len(g) == 4 else (g[0][0], g[0][1], g[1][0], g[1][1])))
    det = A[0] * A[3] - A[1] * A[2]
    if det == 0:
        raise ValueError("singular matrix")
    vdet = vp(det, p)
    if vdet % 2:
        raise ValueError("determinant has odd valuation; not in Q_p")
    if root is None:
        root = default_root(det, p, prec)
    else:
        root = Fraction(root)
        mod = p ** prec
        unit = det / Fraction(p) ** vdet
        rr = root / Fraction(p) ** (vdet // 2)
        if vp(root, p) != vdet // 2 or (to_padic_int(rr, mod) ** 2 - to_padic_int(unit, mod)) % mod:
            raise ValueError("root does not square to the determinant")
    left = (Fraction(1), Fraction(0), Fraction(0), Fraction(1))   # accumulated L with L g R = diag
    right = left
    vals = [vp(x, p) for x in A]
    i = min(range(4), key=lambda t: vals[t])
    # bring the minimal-valuation entry to position (0, 0) with w (determinant 1)
    if i in (2, 3):
        A = _mul(W, A)
        left = _mul(W, left)
    if i in (1, 3):
        A = _mul(A, W_INV)
        right = _mul(right, W_INV)
    a, b, c, d = A
    x = -c / a
    y = -b / a
    A = _mul(_mul(_nl(x), A), _n(y))
    left = _mul(_nl(x), left)
    right = _mul(right, _n(y))
    a, _, _, d = A
    k, l = vp(a, p), vp(d, p)
    u1 = a / Fraction(p) ** k
    u2 = d / Fraction(p) ** l
    # g = L^-1 diag(u1, u2) m(p^k, p^l) R^-1
    k1 = KpElement(_inv(left), p, 1, prec)
    k2m = _mul((u1, Fraction(0), Fraction(0), u2), _inv(right))
    witness = root / Fraction(p) ** ((k + l) // 2)
    k2 = KpElement(k2m, p, witness, prec)
    return CartanForm(k1, k, l, k2)


# ---------------------------------------------------------------------------
# Hecke elements


class HeckeElement:
    """Finite support (k, l) -> value of F at m(p^k, p^l) (a ScaledMatrix)."""

    def __init__(self, space, support):
        self.space = space
        self.support = {}
        for kl, v in support.items():
            k, l = kl
            if not in_lambda(k, l, ordered=True):
                raise ValueError(f"support index {kl} is not in Lambda_+")
            if not v.is_zero():
                self.support[(k, l)] = v
        self._prec = space.a + PRECISION_BUFFER

    @property
    def p(self):
        return self.space.p

    def degree(self):
        return max((k + l for k, l in self.support), default=0)

    def evaluate(self, g, root=None):
        """F(g) for a rational matrix g, via Cartan decomposition and bi-equivariance."""
        cf = cartan_decompose(g, self.p, root, self._prec)
        return self.evaluate_cartan(cf)

    def evaluate_cartan(self, cf):
        v = self.support.get(cf.index)
        if v is None:
            return self.space.zero_operator()
        S = self.space
        return S.omega_eval(cf.k1) @ v @ S.omega_eval(cf.k2)

    def coefficient(self, g, root=None):
        """<F(g) phi0, phi0> as an exact Cyclotomic."""
        cf = cartan_decompose(g, self.p, root, self._prec)
        v = self.support.get(cf.index)
        if v is None:
            return Cyclotomic.zero(self.space.M)
        S = self.space
        col = S.omega_eval(cf.k2)
        row = S.omega_eval(cf.k1)
        vec = v.apply([col.entries[i][0] for i in range(S.dim)])
        acc = Cyclotomic.zero(S.M)
        for j, x in enumerate(vec):
            r = row.entries[0][j]
            if x and r:
                acc = acc + r * x
        hp = row.half_power + v.half_power + col.half_power
        return ScaledMatrix([[acc]], S.order, hp, S.M).to_even().entries[0][0]

    def __add__(self, other):
        sup = dict(self.support)
        for kl, v in other.support.items():
            sup[kl] = sup[kl] + v if kl in sup else v
        return HeckeElement(self.space, sup)

    def scale(self, c):
        return HeckeElement(self.space, {kl: v.scale(c) for kl, v in self.support.items()})

    def __eq__(self, other):
        if not isinstance(other, HeckeElement):
            return NotImplemented
        keys = set(self.support) | set(other.support)
        z = self.space.zero_operator()
        return all(self.support.get(kl, z) == other.support.get(kl, z) for kl in keys)

    def __repr__(self):
        return f"HeckeElement(p={self.p}, support={sorted(self.support)})"


def unit_element(space):
    return generator_Tk(space, 0)


def generator_Tk(space, k):
    """T_k: supported on K m(p^k, p^k) K with value the identity."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return HeckeElement(space, {(k, k): space.identity()})


def generator_Tkl(space, k, l):
    """T_{k,l} (k < l): value phi^(mu) -> phi^(p^((l-k)/2) mu) at m(p^k, p^l)."""
    if not (in_lambda(k, l, ordered=True) and k < l):
        raise ValueError("need (k, l) in Lambda_+ with k < l")
    if space.dim > 1 and not space.anisotropic:
        raise ValueError("T_{k,l} needs an anisotropic p-part")
    D = space.D
    mult = space.p ** ((l - k) // 2)
    n = space.dim
    zero, one = Cyclotomic.zero(space.M), Cyclotomic.one(space.M)
    rows = [[zero] * n for _ in range(n)]
    for j, mu in enumerate(space.basis):
        rows[space.index[D.scale(mult, mu)]][j] = one
    if space.a == 1 and n > 1:
        # exponent p: the image is phi^(0) for every mu
        assert all(rows[0][j] == one for j in range(n))
    return HeckeElement(space, {(k, l): ScaledMatrix(rows, space.order, 0, space.M)})


def generator_coprime(space, k, l):
    """Characteristic function of K m(p^k, p^l) K (identity value) when p does not divide |D|."""
    if space.dim != 1:
        raise ValueError("coprime generators need p not dividing |D|")
    if not in_lambda(k, l, ordered=True):
        raise ValueError("need (k, l) in Lambda_+")
    return HeckeElement(space, {(k, l): space.identity()})


def generator(space, k, l):
    """The standard generator attached to (k, l) in Lambda_+."""
    if space.dim == 1:
        return generator_coprime(space, k, l)
    if k == l:
        return generator_Tk(space, k)
    return generator_Tkl(space, k, l)


# ---------------------------------------------------------------------------
# cosets and convolution


def elementary_type(i, j, n, p):
    """(k, l) of [[p^i, j], [0, p^(n-i)]]."""
    k = min(i, n - i, vp(j, p) if j else n)
    return (k, n - k)


def left_coset_reps(p, k, l):
    """Representatives x of the left cosets x K_p inside K_p m(p^k, p^l) K_p."""
    n = k + l
    reps = []
    for i in range(n + 1):
        for j in range(p ** i):
            if elementary_type(i, j, n, p) == (k, l):
                reps.append((Fraction(p ** i), Fraction(j), Fraction(0), Fraction(p ** (n - i))))
    return reps


def coset_count_bruteforce(p, k, l):
    """Number of left cosets in K m(p^k,p^l) K, by an orbit search on subgroups of (Z/p^n)^2.

    The cosets x K correspond to lattices x Z_p^2; all contain p^n Z_p^2, so
    they are determined by their image in (Z/p^n)^2.  The orbit of the
    image of m(p^k,p^l) Z_p^2 under generators of SL_2(Z/p^n) is enumerated.
    """
    n = k + l
    if n == 0:
        return 1
    mod = p ** n

    def span(vectors):
        elems = {(0, 0)}
        frontier = [(0, 0)]
        while frontier:
            new = []
            for e in frontier:
                for v in vectors:
                    s = ((e[0] + v[0]) % mod, (e[1] + v[1]) % mod)
                    if s not in elems:
                        elems.add(s)
                        new.append(s)
            frontier = new
        return frozenset(elems)

    gens = [(1, 1, 0, 1), (1, 0, 1, 1)]
    start = span([(p ** k % mod, 0), (0, p ** l % mod)])
    seen = {start}
    queue = [start]
    while queue:
        nxt = []
        for S in queue:
            for a, b, c, d in gens:
                T = frozenset(((a * x + b * y) % mod, (c * x + d * y) % mod) for x, y in S)
                if T not in seen:
                    seen.add(T)
                    nxt.append(T)
        queue = nxt
    return len(seen)


def classical_coset_count(p, k, l):
    """Index formula: p^(l-k) (1 + 1/p) for k < l, and 1 for k = l."""
    if k == l:
        return 1
    e = l - k
    return p ** e + p ** (e - 1)


def convolve(A, B):
    """(A * B)(g) = sum over x in supp(A)/K of A(x) B(x^-1 g), stored at the representatives m(p^r, p^s)."""
    if A.space is not B.space:
        raise ValueError("elements live on different spaces")
    S = A.space
    p = S.p
    out = {}
    for (ka, la), va in A.support.items():
        na = ka + la
        reps = left_coset_reps(p, ka, la)
        xroot = Fraction(p) ** (na // 2)
        for (kb, lb), vb in B.support.items():
            n = na + (kb + lb)
            for r in range(0, n // 2 + 1):
                s = n - r
                D = (Fraction(p) ** r, Fraction(0), Fraction(0), Fraction(p) ** s)
                droot = Fraction(p) ** (n // 2)
                acc = out.get((r, s))
                for x in reps:
                    y = _mul(_inv(x), D)
                    cf = cartan_decompose(y, p, droot / xroot, A._prec)
                    if cf.index != (kb, lb):
                        continue
                    ax = A.evaluate_cartan(cartan_decompose(x, p, xroot, A._prec))
                    term = ax @ B.evaluate_cartan(cf)
                    acc = term if acc is None else acc + term
                if acc is not None:
                    out[(r, s)] = acc
    return HeckeElement(S, out)


@dataclass(frozen=True)
class NuValue:
    """nu_s at m(p^k, p^l): X^exponent times an operator (X = p^-s)."""

    exponent: int
    value: ScaledMatrix


def nu_s(space, k, l):
    """nu_s(m(p^k, p^l)) = X^(k+l) T_{k,l}(m(p^k, p^l)), zero off Lambda_+."""
    if not in_lambda(k, l, ordered=True):
        return NuValue(0, space.zero_operator())
    T = generator(space, k, l)
    return NuValue(k + l, T.support[(k, l)])


def random_kp_element(rng, p, prec, bound=50):
    """A random element of K_p with an explicit root of its determinant."""
    mod = p ** prec
    while True:
        m = [rng.randrange(-bound, bound + 1) for _ in range(4)]
        det = m[0] * m[3] - m[1] * m[2]
        if det % p == 0:
            continue
        r = sqrt_mod_prime_power(det % mod, p, prec)
        if r is None:
            continue
        if rng.random() < 0.5:
            r = mod - r
        return KpElement(m, p, r, prec)


def all_units(p, e):
    return [c for c in range(p ** e) if c % p]

