"""Standard zeta functions, Dirichlet L-values and the standard L-function L(s, F).

Eigenvalue data is an :class:`EigenvalueTable` holding lambda_f(m(p^(2n), 1))
per prime.  Two conventions for the multiplier in the local zeta function
are supported:

* ``displayed``: chi_{D(p)}(p^l) p^(-l(kappa-2))  (default)
* ``corollary``: chi_{D(p)}(p^l) p^(+l(kappa-2))

Local L-factors use the Satake parameters recovered from the eigenvalues.
"""

from __future__ import annotations

import cmath
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from .exact import Cyclotomic, FormalSeries, polynomial_series
from .fqm import GramMatrix, LatticeError, UnsupportedLattice, build_fqm, complement_part, prime_factors
from .gauss import chi_D, gauss_sum
from .satake import evaluate_table, generator_table, solve_satake
from .weil import LocalSpace

log = logging.getLogger(__name__)

CONVENTIONS = ("displayed", "corollary")

# L(s, F) = calZ(s - kappa/2 + SHIFT) at primes where the rational expression holds
LITERAL_SHIFT = Fraction(1)
CORRECTED_SHIFT = Fraction(3, 2)


class DivergenceError(ValueError):
    """Evaluation point outside the region of convergence."""


class PoleError(ZeroDivisionError):
    """Evaluation at a pole."""


def _exact(x):
    if isinstance(x, Cyclotomic) and x.is_rational():
        return x.to_fraction()
    return x


def _sign(convention):
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")
    return -1 if convention == "displayed" else 1


def is_squarefree(n):
    n = abs(n)
    return all(n % (q * q) for q in prime_factors(n))


# ---------------------------------------------------------------------------
# eigenvalue tables


@dataclass
class EigenvalueTable:
    """lambda_f(m(p^(2n), 1)) for n = 0..n_max, per prime."""

    kappa: int
    gram: GramMatrix
    primes: dict = field(default_factory=dict)

    def __post_init__(self):
        if not isinstance(self.gram, GramMatrix):
            self.gram = GramMatrix(self.gram)
        clean = {}
        for p, seq in self.primes.items():
            p = int(p)
            seq = list(seq)
            if not seq or seq[0] != 1:
                raise LatticeError(f"lambda at n=0 must be 1 (prime {p})")
            clean[p] = seq
        self.primes = dict(sorted(clean.items()))
        sig = self.D_signature()
        if (2 * self.kappa - sig) % 2:
            log.warning("weight parity: 2 kappa = %d is not congruent to sig(L) = %d mod 2", 2 * self.kappa, sig)

    def D_signature(self):
        from .fqm import signature
        return signature(self.gram)

    @property
    def D(self):
        return build_fqm(self.gram)

    @property
    def level(self):
        return self.D.level

    def require_squarefree(self):
        if not is_squarefree(self.level):
            raise UnsupportedLattice(f"level {self.level} is not squarefree")

    def lam(self, p, n):
        seq = self.primes.get(p)
        if seq is None:
            raise KeyError(f"no data for prime {p}")
        if n < 0 or n >= len(seq):
            raise IndexError(f"n = {n} outside the data range 0..{len(seq) - 1} at p = {p}")
        return seq[n]

    def n_max(self, p):
        return len(self.primes[p]) - 1

    @classmethod
    def from_json(cls, source):
        if isinstance(source, dict):
            data = source
        else:
            text = source
            if not str(source).lstrip().startswith("{"):
                try:
                    with open(source) as fh:
                        text = fh.read()
                except OSError as exc:
                    raise LatticeError(f"cannot read eigenvalue file: {exc}") from exc
            try:
                data = json.loads(text)
            except json.JSONDecodeError as exc:
                raise LatticeError(f"invalid JSON: {exc}") from exc
        if not isinstance(data, dict) or not {"kappa", "gram", "primes"} <= set(data):
            raise LatticeError('expected {"kappa": int, "gram": [[...]], "primes": {...}}')
        kappa = data["kappa"]
        if not isinstance(kappa, int) or isinstance(kappa, bool):
            raise LatticeError("kappa must be an integer")
        primes = {}
        if not isinstance(data["primes"], dict):
            raise LatticeError("primes must be an object")
        for key, seq in data["primes"].items():
            try:
                p = int(key)
            except ValueError:
                raise LatticeError(f"bad prime key {key!r}") from None
            if p < 3 or len(prime_factors(p)) != 1 or prime_factors(p)[0] != p:
                raise LatticeError(f"{key} is not an odd prime")
            if not isinstance(seq, list):
                raise LatticeError("eigenvalue sequences must be lists")
            primes[p] = [_parse_scalar(x) for x in seq]
        from .fqm import load_gram
        return cls(kappa, load_gram({"gram": data["gram"]}), primes)

    def to_json(self):
        def enc(x):
            if isinstance(x, complex):
                return [x.real, x.imag]
            if isinstance(x, Fraction):
                return str(x) if x.denominator != 1 else x.numerator
            return x
        return {"kappa": self.kappa, "gram": [list(r) for r in self.gram.entries],
                "primes": {str(p): [enc(x) for x in seq] for p, seq in self.primes.items()}}


def _parse_scalar(x):
    if isinstance(x, bool):
        raise LatticeError("eigenvalues must be numbers")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        return x
    if isinstance(x, str):
        try:
            return Fraction(x)
        except ValueError:
            try:
                return complex(x.replace(" ", ""))
            except ValueError:
                raise LatticeError(f"bad eigenvalue {x!r}") from None
    if isinstance(x, list) and len(x) == 2 and all(isinstance(t, (int, float)) for t in x):
        return complex(x[0], x[1])
    if isinstance(x, dict) and set(x) == {"re", "im"}:
        return complex(x["re"], x["im"])
    raise LatticeError(f"bad eigenvalue {x!r}")


# ---------------------------------------------------------------------------
# eigenvalue relations


def chi_complement(D, p):
    """chi_{D(p)}(p) = g_p(D(p)) / g(D(p)), exact (1 when D(p) is trivial)."""
    Dp = complement_part(D, p)
    if Dp.order == 1:
        return Fraction(1)
    return _exact(chi_D(Dp, p))


def scalar_hecke_eigrel(k, l, kappa, D):
    """Multipliers relating lambda(m(l, k)) and lambda(m(1/k, 1/l)) to lambda(m(l/k, 1)).

    Returns a dict with keys "m(l,k)" -> k^(kappa-2) g_k(D(k))/g(D(k)) and
    "m(1/k,1/l)" -> l^(kappa-2) g(D(l))/g_l(D(l)).
    """
    if k <= 0 or l % k:
        raise ValueError("need k | l")
    r = math.isqrt(l // k)
    if r * r != l // k:
        raise ValueError("l/k must be a perfect square")
    Dk, Dl = complement_part(D, k), complement_part(D, l)
    qk = _exact(gauss_sum(Dk, k).value / gauss_sum(Dk, 1).value) if Dk.order > 1 else Fraction(1)
    ql = _exact(gauss_sum(Dl, 1).value / gauss_sum(Dl, l).value) if Dl.order > 1 else Fraction(1)
    return {"m(l,k)": Fraction(k) ** (kappa - 2) * qk, "m(1/k,1/l)": Fraction(l) ** (kappa - 2) * ql}


def zeta_multiplier(D, p, l, kappa, convention="displayed"):
    """chi_{D(p)}(p^l) p^(+-l(kappa-2)) per the convention."""
    eps = _sign(convention)
    return chi_complement(D, p) ** l * Fraction(p) ** (eps * l * (kappa - 2))


def adapter_lambda_F(table, p, kl, convention="displayed"):
    """lambda_{F,p}(T_{k,l}) = p^((k+l)(kappa/2-1)) * multiplier * lambda_f(m(p^(l-k), 1))."""
    k, l = kl
    if k > l or (k + l) % 2 or k < 0:
        raise ValueError("need (k, l) in Lambda_+")
    n = (l - k) // 2
    lam = table.lam(p, n)
    e = (k + l) * (table.kappa - 2) // 2
    return Fraction(p) ** e * zeta_multiplier(table.D, p, l, table.kappa, convention) * lam


def invert_adapter(D, kappa, p, n, lam_F, convention="displayed"):
    """lambda_f(m(p^(2n), 1)) from lambda_{F,p}(T_{0,2n})."""
    e = n * (kappa - 2)
    return lam_F / (Fraction(p) ** e * zeta_multiplier(D, p, 2 * n, kappa, convention))


# ---------------------------------------------------------------------------
# local zeta functions


def Zp_series(table, p, n_max=None):
    """Z_p as a series in Y = p^(-2s): coefficient n is lambda_f(m(p^(2n), 1))."""
    if n_max is None:
        n_max = table.n_max(p)
    seq = table.primes[p]
    return FormalSeries([seq[n] if n < len(seq) else 0 for n in range(n_max + 1)])


def calZp_series(table, p, n_max, convention="displayed"):
    """calZ_p as a series in X = p^(-s), truncated at X^n_max."""
    D = table.D
    coeffs = [0] * (n_max + 1)
    for n in range(0, n_max + 1, 2):
        acc = 0
        for k in range(0, n // 2 + 1):
            l = n - k
            m = (l - k) // 2
            if m >= len(table.primes[p]):
                raise IndexError(f"data at p = {p} too short for X^{n}")
            acc = acc + zeta_multiplier(D, p, l, table.kappa, convention) * table.primes[p][m]
        coeffs[n] = acc
    return FormalSeries(coeffs)


def calZp_factorized(table, p, n_max, convention="displayed"):
    """Z_p(s + e(kappa-2)) L_p(chi_{D(p)}, 2s + e(kappa-2)) as a series in X, e = -1 for corollary."""
    eps = -_sign(convention)  # displayed: shift +(kappa-2)
    c = eps * (table.kappa - 2)
    seq = table.primes[p]
    z = [0] * (n_max + 1)
    for n in range(0, n_max // 2 + 1):
        if n >= len(seq):
            raise IndexError(f"data at p = {p} too short for X^{2 * n}")
        z[2 * n] = seq[n] * Fraction(p) ** (-2 * n * c)
    chi = chi_complement(table.D, p)
    lp = polynomial_series([1, 0, -chi * Fraction(p) ** (-c)], n_max).inverse()
    return FormalSeries(z) * lp


# ---------------------------------------------------------------------------
# Dirichlet L-functions


_BERNOULLI = None


def _bernoulli_terms(order):
    global _BERNOULLI
    if _BERNOULLI is None or len(_BERNOULLI) < order:
        _BERNOULLI = [mpmath.bernoulli(2 * k) / mpmath.factorial(2 * k) for k in range(1, order + 1)]
    return _BERNOULLI[:order]


def hurwitz_zeta(s, a, order=8, dps=30):
    """zeta(s, a) by Euler-Maclaurin summation with an |s|-adaptive shift; s != 1."""
    with mpmath.workdps(dps):
        s = mpmath.mpc(s)
        a = mpmath.mpf(a.numerator) / a.denominator if isinstance(a, Fraction) else mpmath.mpf(a)
        if s == 1:
            raise PoleError("Hurwitz zeta has a pole at s = 1")
        N = int(2 * abs(s) + 20)
        total = mpmath.mpc(0)
        for n in range(N):
            total += mpmath.power(n + a, -s)
        x = N + a
        total += mpmath.power(x, 1 - s) / (s - 1) + mpmath.power(x, -s) / 2
        rising = s            # s (s+1) ... (s+2k-2)
        xp = mpmath.power(x, -s - 1)
        for k, b in enumerate(_bernoulli_terms(order), start=1):
            total += b * rising * xp
            rising *= (s + 2 * k - 1) * (s + 2 * k)
            xp /= x * x
        return total


def character_values(D):
    """(N, [chi_D(r) for r in 0..N-1]) with zeros at non-units."""
    N = D.level
    if N == 1:
        return 1, [Fraction(1)]
    vals = []
    for r in range(N):
        if math.gcd(r, N) != 1:
            vals.append(Fraction(0))
        else:
            vals.append(_exact(chi_D(D, r)))
    return N, vals


def dirichlet_L(D, s, order=8):
    """L(s, chi_D) for chi_D as a character modulo the level of D, continued via Hurwitz zeta."""
    if isinstance(D, tuple):
        N, vals = D
    else:
        N, vals = character_values(D)
    principal = all(v == 1 for r, v in enumerate(vals) if math.gcd(r, N) == 1)
    if principal and complex(s) == 1:
        raise PoleError("L(s, chi) has a pole at s = 1 for the principal character")
    with mpmath.workdps(30):
        acc = mpmath.mpc(0)
        for r in range(1, N + 1):
            v = vals[r % N]
            if v:
                acc += mpmath.mpf(v.numerator) / v.denominator * hurwitz_zeta(s, mpmath.mpf(r) / N, order)
        val = mpmath.power(N, -mpmath.mpc(s)) * acc
        return complex(val)


# ---------------------------------------------------------------------------
# local and global L-functions


@dataclass(frozen=True)
class LocalLFactor:
    """(1 + x1 x2 X^2) / ((1 - x1^2 X^2)(1 - x2^2 X^2)) in X = p^-s."""

    p: int
    x1: object
    x2: object

    def __post_init__(self):
        if self.x1 == 0 or self.x2 == 0:
            raise ValueError("Satake parameters must be nonzero")

    @property
    def numerator(self):
        return (1, 0, self.x1 * self.x2)

    @property
    def denominator(self):
        a, b = self.x1 * self.x1, self.x2 * self.x2
        return (1, 0, -(a + b), 0, a * b)

    def evaluate(self, s):
        y = cmath.exp(-2 * complex(s) * math.log(self.p))   # p^(-2s)
        num = 1 + complex(self.x1 * self.x2) * y
        a, b = complex(self.x1) ** 2, complex(self.x2) ** 2
        den = (1 - a * y) * (1 - b * y)
        if den == 0:
            raise PoleError(f"pole of L_{self.p} at s = {s}")
        return num / den

    def series(self, n_max):
        return polynomial_series(list(self.numerator), n_max) * polynomial_series(list(self.denominator), n_max).inverse()

    def abscissa(self):
        """Real part beyond which the factor's series converges."""
        m = max(abs(complex(self.x1)), abs(complex(self.x2)))
        return math.log(m) / math.log(self.p) if m > 0 else -math.inf


def local_L_factor(x1, x2, p):
    return LocalLFactor(p, x1, x2)


def local_space(D, p):
    return LocalSpace(D, p)


def hecke_eigenvalues(table, p, convention="displayed"):
    """lambda_{F,p}(T_1), lambda_{F,p}(T_{0,2}) from the table via the adapter."""
    return {"T1": adapter_lambda_F(table, p, (1, 1), convention),
            "T02": adapter_lambda_F(table, p, (0, 2), convention)}


def satake_parameters(table, p, convention="displayed", tol=1e-9):
    """Canonical representative of the Weyl orbit of Satake parameters at p."""
    S = LocalSpace(table.D, p)
    evs = hecke_eigenvalues(table, p, convention)
    orbit = solve_satake(evs, S, tol)
    return orbit[0], orbit


def synthetic_table(gram, kappa, characters, n_max, convention="displayed"):
    """Eigenvalue table whose Hecke eigenvalues are chi_hat(T_{k,l}) for given characters.

    ``characters`` maps p -> x1; x2 is forced by lambda_f(1) = 1 through the
    T_1 relation.  Returns (table, {p: (x1, x2)}).
    """
    if not isinstance(gram, GramMatrix):
        gram = GramMatrix(gram)
    D = build_fqm(gram)
    primes, params = {}, {}
    for p, x1 in sorted(characters.items()):
        S = LocalSpace(D, p)
        c1 = generator_table(S, 1, 1)[(1, 1)]
        forced = Fraction(p) ** (kappa - 2) * zeta_multiplier(D, p, 1, kappa, convention) / c1
        forced = _exact(forced)
        x2 = forced / x1
        seq = []
        for n in range(n_max + 1):
            lam_F = evaluate_table(generator_table(S, 0, 2 * n), (x1, x2)) if n else 1
            seq.append(invert_adapter(D, kappa, p, n, lam_F, convention) if n else Fraction(1))
        primes[p] = seq
        params[p] = (x1, x2)
    return EigenvalueTable(kappa, gram, primes), params


def euler_product(params, s):
    """prod_p L_p(s) over the given {p: (x1, x2)}, ascending p."""
    acc = 1 + 0j
    for p in sorted(params):
        x1, x2 = params[p]
        acc *= LocalLFactor(p, x1, x2).evaluate(s)
    return acc


def calZ_partial(table, s, convention="displayed", primes=None, tol=1e-13):
    """prod over primes of calZ_p(s), summing each local series until its terms drop below tol."""
    acc = 1 + 0j
    for p in sorted(primes or table.primes):
        nm = 2 * table.n_max(p)
        ser = calZp_series(table, p, nm, convention)
        x = cmath.exp(-complex(s) * math.log(p))
        total = 0j
        last = 0.0
        for n, c in enumerate(ser.coeffs):
            term = complex(c) * x ** n
            total += term
            if n % 2 == 0 and n > 0:
                last = abs(term)
        if last > tol * max(1.0, abs(total)):
            raise DivergenceError(f"calZ_{p} series not converged at s = {s} (last term {last:.3g})")
        acc *= total
    return acc


def tail_bound(params, s, p_max):
    """Crude bound for |log prod_{p > p_max} L_p(s)| assuming |x_i| <= max over known primes."""
    if not params:
        return 0.0
    m = max(max(abs(complex(a)), abs(complex(b))) for a, b in params.values())
    sigma = complex(s).real
    e = 2 * sigma - 2 * math.log(max(m, 1e-300)) / math.log(p_max + 1)
    if e <= 1:
        return math.inf
    return 3 * (p_max ** (1 - e)) / (e - 1)


def global_L(table, s, p_max, convention="displayed", shift=CORRECTED_SHIFT, tol=1e-9, warn_missing=True):
    """L(s, F) as a partial Euler product over odd p <= p_max, with the calZ cross-check.

    Returns a dict with the Euler-product value, the value of calZ(s - kappa/2 + shift)
    over the same primes, their difference, the per-prime Satake parameters and a tail bound.
    """
    primes = [p for p in table.primes if p <= p_max]
    missing = [p for p in prime_factors_upto(p_max) if p not in table.primes]
    if missing and warn_missing:
        log.warning("no eigenvalue data for primes %s; excluded from the product", missing)
    params, orbits = {}, {}
    for p in primes:
        (x, orbit) = satake_parameters(table, p, convention)
        params[p] = x.as_tuple()
        orbits[p] = orbit
    for p, (x1, x2) in params.items():
        ab = LocalLFactor(p, x1, x2).abscissa()
        if complex(s).real <= ab:
            raise DivergenceError(f"Re(s) = {complex(s).real} not beyond the abscissa {ab:.3f} at p = {p}")
    value = euler_product(params, s)
    s2 = complex(s) - table.kappa / 2 + float(shift)
    zval = calZ_partial(table, s2, convention, primes)
    per_prime = {}
    for p in primes:
        lp = LocalLFactor(p, *params[p]).evaluate(s)
        zp = calZ_partial(table, s2, convention, [p])
        per_prime[p] = abs(lp - zp) / max(1.0, abs(lp))
    return {"s": complex(s), "euler": value, "zeta_path": zval,
            "residual": abs(value - zval) / max(1.0, abs(value)),
            "per_prime_residual": per_prime, "params": params, "orbits": orbits,
            "tail_bound": tail_bound(params, s, p_max)}


def prime_factors_upto(n):
    return [p for p in range(3, n + 1) if all(p % q for q in range(2, int(p ** 0.5) + 1))]


def zeta_formula(table, s, convention="displayed"):
    """prod_{p | |D|} L_p(2s+c, chi_{D(p)}) L(2s+c, chi_D) prod_{p in data} Z_p(s+c), c = +-(kappa-2).

    The Dirichlet factor is continued analytically; the Z part is the finite
    Euler product over the primes with data and must converge there.
    """
    table.require_squarefree()
    D = table.D
    c = -_sign(convention) * (table.kappa - 2)
    w = 2 * complex(s) + c
    acc = 1 + 0j
    for p in D.prime_divisors():
        if p == 2:
            continue
        chi = complex(chi_complement(D, p))
        den = 1 - chi * cmath.exp(-w * math.log(p))
        if abs(den) < 1e-15:
            raise PoleError(f"pole of the local factor at p = {p}")
        acc /= den
    acc *= dirichlet_L(D, w)
    for p in table.primes:
        y = cmath.exp(-2 * (complex(s) + c) * math.log(p))
        total, last = 0j, 0.0
        for n, lam in enumerate(table.primes[p]):
            term = complex(lam) * y ** n
            total += term
            last = abs(term)
        if len(table.primes[p]) > 1 and last > 1e-12 * max(1.0, abs(total)):
            raise DivergenceError(f"Z_{p}(s + {c}) not converged")
        acc *= total
    return acc
