"""Finite quadratic modules (discriminant forms) of even lattices."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, prod


class LatticeError(ValueError):
    """Malformed Gram matrix or lattice file."""


class UnsupportedLattice(LatticeError):
    """Well-formed input outside the supported class (odd rank, etc.)."""


def _lcm(a, b):
    return a // gcd(a, b) * b


def prime_factors(n):
    n = abs(n)
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def valuation(n, p):
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


# ---------------------------------------------------------------------------
# Gram matrices


@dataclass(frozen=True)
class GramMatrix:
    entries: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", rows)
        m = len(rows)
        if m == 0 or any(len(r) != m for r in rows):
            raise LatticeError("Gram matrix must be square and non-empty")
        for i in range(m):
            if rows[i][i] % 2:
                raise LatticeError("Gram matrix must have even diagonal")
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise LatticeError("Gram matrix must be symmetric")
        if determinant(rows) == 0:
            raise LatticeError("Gram matrix is singular")
        if m % 2:
            raise UnsupportedLattice("lattice rank must be even")

    @property
    def rank(self):
        return len(self.entries)

    @property
    def determinant(self):
        return determinant(self.entries)

    def direct_sum(self, other):
        a, b = self.rank, other.rank
        rows = [list(r) + [0] * b for r in self.entries]
        rows += [[0] * a + list(r) for r in other.entries]
        return GramMatrix(rows)

    def to_json(self):
        return {"gram": [list(r) for r in self.entries]}


def determinant(rows):
    """Exact determinant by fraction-free elimination (Bareiss)."""
    a = [list(r) for r in rows]
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def load_gram(source):
    """Parse ``{"gram": [[...]]}`` from a JSON string, dict or file path."""
    if isinstance(source, dict):
        data = source
    else:
        text = source
        if not str(source).lstrip().startswith("{"):
            try:
                with open(source) as fh:
                    text = fh.read()
            except OSError as exc:
                raise LatticeError(f"cannot read lattice file: {exc}") from exc
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise LatticeError(f"invalid JSON: {exc}") from exc
    gram = data.get("gram") if isinstance(data, dict) else None
    if not isinstance(gram, list) or not all(isinstance(r, list) for r in gram):
        raise LatticeError('expected an object {"gram": [[...], ...]}')
    for row in gram:
        for x in row:
            if not isinstance(x, int) or isinstance(x, bool):
                raise LatticeError("Gram entries must be integers")
    return GramMatrix(gram)


def signature(g):
    """b+ - b- of a nondegenerate symmetric matrix, reduced mod 8 (Sylvester's law)."""
    rows = g.entries if isinstance(g, GramMatrix) else g
    a = [[Fraction(x) for x in r] for r in rows]
    n = len(a)
    pos = neg = 0
    while a:
        n = len(a)
        piv = next((i for i in range(n) if a[i][i] != 0), None)
        if piv is None:
            j = next((j for j in range(1, n) if a[0][j] != 0), None)
            if j is None:
                raise ValueError("singular matrix has no signature")
            # congruence e0 -> e0 + ej makes the (0,0) entry 2 a[0][j]
            for k in range(n):
                a[0][k] += a[j][k]
            for k in range(n):
                a[k][0] += a[k][j]
            piv = 0
        if piv:
            a[0], a[piv] = a[piv], a[0]
            for r in a:
                r[0], r[piv] = r[piv], r[0]
        d = a[0][0]
        if d > 0:
            pos += 1
        else:
            neg += 1
        a = [[a[i][j] - a[i][0] * a[0][j] / d for j in range(1, n)] for i in range(1, n)]
    return (pos - neg) % 8


# ---------------------------------------------------------------------------
# Smith normal form


def smith_normal_form(A):
    """Return (S, U, V) with U A V = S diagonal, U, V unimodular, d_i | d_{i+1}."""
    n, m = len(A), len(A[0])
    S = [list(r) for r in A]
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(m)] for i in range(m)]

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in S:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, c):
        S[dst] = [x + c * y for x, y in zip(S[dst], S[src])]
        U[dst] = [x + c * y for x, y in zip(U[dst], U[src])]

    def add_col(src, dst, c):
        for r in S:
            r[dst] += c * r[src]
        for r in V:
            r[dst] += c * r[src]

    for t in range(min(n, m)):
        while True:
            nz = [(abs(S[i][j]), i, j) for i in range(t, n) for j in range(t, m) if S[i][j]]
            if not nz:
                break
            _, i, j = min(nz)
            swap_rows(t, i)
            swap_cols(t, j)
            done = True
            for i in range(t + 1, n):
                q = S[i][t] // S[t][t]
                if q:
                    add_row(t, i, -q)
                if S[i][t]:
                    done = False
            for j in range(t + 1, m):
                q = S[t][j] // S[t][t]
                if q:
                    add_col(t, j, -q)
                if S[t][j]:
                    done = False
            if not done:
                continue
            # divisibility condition
            bad = next(((i, j) for i in range(t + 1, n) for j in range(t + 1, m)
                        if S[i][j] % S[t][t]), None)
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return S, U, V


# ---------------------------------------------------------------------------
# Finite quadratic modules


class FiniteQuadraticModule:
    """Abelian group (Z/d_1 x ... x Z/d_r) with a Q/Z-valued quadratic form.

    ``gram`` holds the rational matrix of generator products: the diagonal
    entries are (g_i, g_i) mod 2 and off-diagonal entries (g_i, g_j) mod 1,
    so that q(x) = 1/2 x^T gram x is well defined mod 1.
    """

    def __init__(self, orders, gram):
        orders = tuple(int(d) for d in orders)
        r = len(orders)
        if any(d < 1 for d in orders):
            raise ValueError("orders must be positive")
        gram = [[Fraction(gram[i][j]) for j in range(r)] for i in range(r)]
        for i in range(r):
            for j in range(r):
                if gram[i][j] != gram[j][i]:
                    raise ValueError("generator Gram matrix must be symmetric")
        keep = [i for i, d in enumerate(orders) if d > 1]
        self.orders = tuple(orders[i] for i in keep)
        self.gram = tuple(
            tuple((gram[i][j] % 2) if i == j else (gram[i][j] % 1) for j in keep) for i in keep
        )
        self.order = prod(self.orders)
        lvl = 1
        for i in range(len(keep)):
            lvl = _lcm(lvl, (self.gram[i][i] / 2).denominator)
            for j in range(i):
                lvl = _lcm(lvl, self.gram[i][j].denominator)
        self.level = lvl
        self._elements = None

    # elements ------------------------------------------------------------
    def elements(self):
        if self._elements is None:
            self._elements = tuple(itertools.product(*[range(d) for d in self.orders]))
        return self._elements

    def zero(self):
        return (0,) * len(self.orders)

    def reduce(self, x):
        return tuple(int(a) % d for a, d in zip(x, self.orders))

    def add(self, x, y):
        return tuple((a + b) % d for a, b, d in zip(x, y, self.orders))

    def scale(self, c, x):
        return tuple((c * a) % d for a, d in zip(x, self.orders))

    def q(self, x):
        """Quadratic form value in [0, 1)."""
        g = self.gram
        total = Fraction(0)
        for i, a in enumerate(x):
            if a:
                total += g[i][i] * a * a / 2
                for j in range(i):
                    if x[j]:
                        total += g[i][j] * a * x[j]
        return total % 1

    def b(self, x, y):
        """Bilinear form b(x, y) = q(x+y) - q(x) - q(y) mod 1."""
        g = self.gram
        total = Fraction(0)
        for i, a in enumerate(x):
            if a:
                for j, c in enumerate(y):
                    if c:
                        total += g[i][j] * a * c
        return total % 1

    # structure -----------------------------------------------------------
    def direct_sum(self, other):
        r, s = len(self.orders), len(other.orders)
        gram = [list(row) + [0] * s for row in self.gram]
        gram += [[0] * r + list(row) for row in other.gram]
        return FiniteQuadraticModule(self.orders + other.orders, gram)

    def sub_module(self, multipliers, orders):
        """Subgroup generated by multipliers[i] * g_i (of order orders[i]) with restricted q."""
        r = len(self.orders)
        gram = [[self.gram[i][j] * multipliers[i] * multipliers[j] for j in range(r)] for i in range(r)]
        return FiniteQuadraticModule(orders, gram)

    def primary_part(self, primes):
        """Sum of the p-parts for p in ``primes``."""
        primes = set(primes)
        mults, orders = [], []
        for d in self.orders:
            keep = 1
            for p in prime_factors(d):
                if p in primes:
                    keep *= p ** valuation(d, p)
            mults.append(d // keep)
            orders.append(keep)
        return self.sub_module(mults, orders)

    def prime_divisors(self):
        return prime_factors(self.order)

    def is_trivial(self):
        return self.order == 1

    def __repr__(self):
        return f"FiniteQuadraticModule(orders={self.orders}, level={self.level})"


def build_fqm(g):
    """Discriminant form L'/L of the even lattice with Gram matrix g."""
    if not isinstance(g, GramMatrix):
        g = GramMatrix(g)
    G = [list(r) for r in g.entries]
    S, U, V = smith_normal_form(G)
    m = len(G)
    diag = [S[i][i] for i in range(m)]
    # generators of L' in L-coordinates: columns of V scaled by 1/d_i
    gens = [[Fraction(V[k][i], diag[i]) for k in range(m)] for i in range(m)]
    gram = []
    for i in range(m):
        row = []
        for j in range(m):
            val = sum(gens[i][a] * G[a][bb] * gens[j][bb] for a in range(m) for bb in range(m))
            row.append(val)
        gram.append(row)
    return FiniteQuadraticModule(diag, gram)


def p_part(D, p):
    """Sylow p-subgroup of D with the restricted quadratic form."""
    if D.order % p:
        raise ValueError(f"{p} does not divide |D| = {D.order}")
    return D.primary_part([p])


def complement_part(D, k):
    """D(k): orthogonal complement of the p-parts for primes p dividing gcd(k, N)."""
    bad = set(prime_factors(gcd(k, D.level))) if k else set(prime_factors(D.level))
    return D.primary_part([p for p in D.prime_divisors() if p not in bad])


def is_anisotropic(D):
    zero = D.zero()
    return all(D.q(x) != 0 for x in D.elements() if x != zero)


def lattice_signature(g):
    return signature(g)
