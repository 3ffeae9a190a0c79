"""Command-line front end: ``weilzeta fqm-info | verify | lfunction``.

Exit codes: 0 ok, 1 property failure, 2 parse error, 3 unsupported input,
4 degenerate data.  WEILZETA_THREADS sets the number of worker threads for
per-prime work (default 1); results are merged in ascending prime order.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import json
import logging
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import __version__
from .exact import Cyclotomic, embed_complex
from .fqm import LatticeError, UnsupportedLattice, build_fqm, is_anisotropic, load_gram, p_part, prime_factors, signature
from .gauss import gauss_sum, milgram_phase, oddity
from .heckelocal import convolve, generator, lambda_plus, random_kp_element
from .lfun import (
    CONVENTIONS, CORRECTED_SHIFT, LITERAL_SHIFT, DivergenceError, EigenvalueTable, LocalLFactor, calZp_factorized,
    calZp_series, global_L,
)
from .satake import DegenerateEigenvalues, InconsistentSystem, b_series, evaluate_table, generator_table, rational_expansion, satake_transform
from .weil import KpElement, LocalSpace

log = logging.getLogger("weilzeta")

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_UNSUPPORTED, EXIT_DEGENERATE = 0, 1, 2, 3, 4
SUITES = ("weil-mult", "satake-hom", "theorem-5-7", "zeta-factor")


@dataclass
class RunConfig:
    command: str
    inputs: tuple = ()
    p_max: int = 13
    n_max: int = 12
    precision_bits: int = 53
    zeta_sign: str = "displayed"
    fmt: str = "json"
    seed: int = 0

    def __post_init__(self):
        if min(self.p_max, self.n_max, self.precision_bits) <= 0:
            raise ValueError("bounds must be positive")
        if self.zeta_sign not in CONVENTIONS:
            raise ValueError(f"zeta sign must be one of {CONVENTIONS}")


def threads():
    try:
        return max(1, int(os.environ.get("WEILZETA_THREADS", "1")))
    except ValueError:
        return 1


def per_prime(fn, primes):
    """Apply fn to each prime; results come back in ascending prime order."""
    primes = sorted(primes)
    n = threads()
    if n == 1 or len(primes) < 2:
        return [fn(p) for p in primes]
    with ThreadPoolExecutor(max_workers=n) as ex:
        return list(ex.map(fn, primes))


# ---------------------------------------------------------------------------
# serialization


def jsonable(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    if isinstance(x, Cyclotomic):
        if x.is_rational():
            return jsonable(x.to_fraction())
        x = embed_complex(x)
    if isinstance(x, complex):
        scale = max(abs(x.real), abs(x.imag), 1.0)
        re = 0.0 if abs(x.real) < 1e-15 * scale else x.real
        im = 0.0 if abs(x.imag) < 1e-15 * scale else x.imag
        return {"re": re, "im": im}
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


def dump(obj, out):
    out.write(json.dumps(jsonable(obj), sort_keys=True, indent=2))
    out.write("\n")


# ---------------------------------------------------------------------------
# fqm-info


def fqm_report(gram):
    D = build_fqm(gram)
    odd = [p for p in prime_factors(D.order) if p != 2]
    report = {
        "order": D.order,
        "elementary_divisors": list(D.orders),
        "level": D.level,
        "signature_mod_8": signature(gram) % 8,
        "anisotropic": {str(p): is_anisotropic(p_part(D, p)) for p in odd},
        "oddity": oddity(D) if D.order > 1 else 0,
    }
    g = gauss_sum(D).value
    report["gauss_sum"] = complex(embed_complex(g))
    report["milgram_phase"] = milgram_phase(D) if D.order > 1 else 0
    return report


# ---------------------------------------------------------------------------
# verification suites


def _rand_char(rng):
    return (Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9)),
            Fraction(rng.choice([-1, 1]) * rng.randint(1, 9), rng.randint(1, 9)))


def corrupt_q(space):
    """Test hook: perturb the stored q-value of one nonzero element."""
    if space.dim > 1:
        space._q_exp[1] = (space._q_exp[1] + space.M // space.p) % space.M
        space._cache.clear()
    return space


def _coprime_prime(D):
    p = 3
    while D.order % p == 0:
        p += 2
    return p


def suite_weil_mult(D, rng, pairs=200, chi_samples=100, corrupt=False):
    results = []
    for p in [q for q in prime_factors(D.order) if q != 2]:
        S = LocalSpace(D, p)
        if corrupt:
            corrupt_q(S)
        prec = S.a + 3
        bad = None
        for _ in range(pairs):
            k1, k2 = random_kp_element(rng, p, prec), random_kp_element(rng, p, prec)
            if S.omega_eval(k1) @ S.omega_eval(k2) != S.omega_eval(k1 * k2):
                bad = {"k1": list(k1.matrix), "k2": list(k2.matrix), "t1": k1.witness, "t2": k2.witness}
                break
        results.append({"check": "multiplicativity", "prime": p, "passed": bad is None, "counterexample": bad})
        mm = KpElement([-1, 0, 0, -1], p, 1, prec)
        ok = S.omega_w() @ S.omega_w() == S.omega_eval(mm)
        results.append({"check": "w_squared", "prime": p, "passed": ok, "counterexample": None if ok else "omega(w)^2"})
        bad = None
        P0 = _projector0(S)
        for _ in range(chi_samples):
            k = _random_k0(rng, p, prec)
            a = to_int(k.matrix[0])
            if S.omega_eval(k) @ P0 != P0.scale(S.chi(a)):
                bad = {"k": list(k.matrix), "t": k.witness}
                break
        results.append({"check": "k0_character", "prime": p, "passed": bad is None, "counterexample": bad})
    return results


def to_int(x):
    x = Fraction(x)
    if x.denominator != 1:
        raise ValueError("expected an integer entry")
    return x.numerator


def _projector0(S):
    from .exact import ScaledMatrix
    one, zero = Cyclotomic.one(S.M), Cyclotomic.zero(S.M)
    rows = [[one if i == j == 0 else zero for j in range(S.dim)] for i in range(S.dim)]
    return ScaledMatrix(rows, S.order, 0, S.M)


def _random_k0(rng, p, prec, bound=50):
    """Random element of K_0(p) (lower-left entry divisible by p) with a root of its determinant."""
    from .weil import sqrt_mod_prime_power
    mod = p ** prec
    while True:
        a, b, d = (rng.randrange(-bound, bound + 1) for _ in range(3))
        c = p * rng.randrange(-bound, bound + 1)
        det = a * d - b * c
        if det % p == 0:
            continue
        r = sqrt_mod_prime_power(det % mod, p, prec)
        if r is None:
            continue
        return KpElement([a, b, c, d], p, r if rng.random() < 0.5 else mod - r, prec)


def suite_satake_hom(D, rng, max_deg=4, n_chars=5):
    results = []
    primes = sorted({_coprime_prime(D)} | {q for q in prime_factors(D.order) if q != 2})
    chis = [_rand_char(rng) for _ in range(n_chars)]
    for p in primes:
        S = LocalSpace(D, p)
        if S.dim > 1 and not S.anisotropic:
            results.append({"check": "homomorphism", "prime": p, "passed": True, "skipped": "isotropic"})
            continue
        keys = [kl for kl in lambda_plus(max_deg) if kl != (0, 0)]
        gens = {kl: generator(S, *kl) for kl in keys}
        bad = None
        for i, a in enumerate(keys):
            for b in keys[i:]:
                tab = satake_transform(convolve(gens[a], gens[b]))
                for chi in chis:
                    lhs = evaluate_table(tab, chi)
                    rhs = evaluate_table(generator_table(S, *a), chi) * evaluate_table(generator_table(S, *b), chi)
                    if lhs != rhs:
                        bad = {"A": a, "B": b, "chi": chi, "lhs": lhs, "rhs": rhs}
                        break
                if bad:
                    break
            if bad:
                break
        results.append({"check": "homomorphism", "prime": p, "passed": bad is None, "counterexample": bad})
    return results


def suite_theorem_57(D, rng, n_chars=20, n_max=12):
    results = []
    bad_primes = [q for q in prime_factors(D.order) if q != 2 and is_anisotropic(p_part(D, q))]
    for p in [_coprime_prime(D)] + bad_primes:
        S = LocalSpace(D, p)
        bad = None
        for _ in range(n_chars):
            chi = _rand_char(rng)
            lhs, rhs = b_series(chi, S, n_max), rational_expansion(chi, n_max)
            if lhs != rhs:
                n = next(i for i, (a, b) in enumerate(zip(lhs.coeffs, rhs.coeffs)) if a != b)
                bad = {"chi": chi, "degree": n, "b_series": lhs.coeffs[n], "rational": rhs.coeffs[n]}
                break
        results.append({"check": "rational_expression", "prime": p, "coprime": D.order % p != 0,
                        "passed": bad is None, "counterexample": bad})
    return results


def suite_zeta_factor(D, rng, gram, order=10):
    results = []
    for p in (3, 5, 7):
        for kappa in (4, 6):
            for conv in CONVENTIONS:
                seq = [Fraction(1)] + [Fraction(rng.randint(-50, 50), rng.randint(1, 9)) for _ in range(order // 2)]
                tab = EigenvalueTable(kappa, gram, {p: seq})
                lhs, rhs = calZp_series(tab, p, order, conv), calZp_factorized(tab, p, order, conv)
                results.append({"check": "factorization", "prime": p, "kappa": kappa, "convention": conv,
                                "passed": lhs == rhs, "counterexample": None if lhs == rhs else seq})
    return results


def run_suite(name, gram, seed, corrupt=False):
    D = build_fqm(gram)
    rng = random.Random(seed)
    if name == "weil-mult":
        return suite_weil_mult(D, rng, corrupt=corrupt)
    if name == "satake-hom":
        return suite_satake_hom(D, rng)
    if name == "theorem-5-7":
        return suite_theorem_57(D, rng)
    if name == "zeta-factor":
        return suite_zeta_factor(D, rng, gram)
    raise KeyError(name)


# ---------------------------------------------------------------------------
# lfunction


def parse_s_list(text):
    out = []
    for tok in text.split(","):
        tok = tok.strip().replace(" ", "")
        if not tok:
            continue
        try:
            out.append(complex(tok.replace("i", "j")))
        except ValueError:
            raise ValueError(f"bad value of s: {tok!r}") from None
    if not out:
        raise ValueError("empty s list")
    return out


def lfunction_report(table, s_values, p_max, convention):
    table.require_squarefree()
    primes = [p for p in table.primes if p <= p_max]
    avail = set(table.primes)
    missing = [p for p in range(3, p_max + 1) if all(p % q for q in range(2, int(p ** 0.5) + 1)) and p not in avail]
    warnings = [f"no eigenvalue data for prime {p}; excluded from the product" for p in missing]
    for w in warnings:
        log.warning(w)

    def local(p):
        try:
            from .lfun import satake_parameters
            x, orbit = satake_parameters(table, p, convention)
        except (DegenerateEigenvalues, InconsistentSystem) as exc:
            return p, None, str(exc)
        f = LocalLFactor(p, *x.as_tuple())
        return p, {"x1": x.x1, "x2": x.x2, "orbit": [o.as_tuple() for o in orbit],
                   "numerator": list(f.numerator), "denominator": list(f.denominator)}, None

    locs = per_prime(local, primes)
    errors = {p: err for p, _, err in locs if err}
    if errors:
        return {"degenerate": errors}, EXIT_DEGENERATE
    values = []
    for s in s_values:
        try:
            r = global_L(table, s, p_max, convention, CORRECTED_SHIFT, warn_missing=False)
            lit = global_L(table, s, p_max, convention, LITERAL_SHIFT, warn_missing=False)
        except DivergenceError as exc:
            values.append({"s": s, "error": str(exc)})
            continue
        values.append({"s": s, "L": r["euler"], "zeta_path": r["zeta_path"], "residual": r["residual"],
                       "per_prime_residual": r["per_prime_residual"], "literal_shift_residual": lit["residual"],
                       "tail_bound": r["tail_bound"]})
    report = {"kappa": table.kappa, "convention": convention, "p_max": p_max,
              "primes": {str(p): loc for p, loc, _ in locs}, "values": values, "warnings": warnings}
    return report, EXIT_OK


def _csv(report):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["s_re", "s_im", "L_re", "L_im", "zeta_re", "zeta_im", "residual", "literal_shift_residual"])
    for v in report["values"]:
        s = v["s"]
        if "error" in v:
            w.writerow([s.real, s.imag, "", "", "", "", "", v["error"]])
            continue
        w.writerow([s.real, s.imag, v["L"].real, v["L"].imag, v["zeta_path"].real, v["zeta_path"].imag,
                    repr(v["residual"]), repr(v["literal_shift_residual"])])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_PARSE)


def build_parser():
    ap = _Parser(prog="weilzeta", description="Hecke theory and standard L-functions for the Weil representation.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    f = sub.add_parser("fqm-info", help="discriminant form invariants of a lattice")
    f.add_argument("file")

    v = sub.add_parser("verify", help="run an invariant suite")
    v.add_argument("file")
    v.add_argument("--suite", required=True)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--corrupt-q", action="store_true", help=argparse.SUPPRESS)

    lf = sub.add_parser("lfunction", help="standard L-function from eigenvalue data")
    lf.add_argument("file")
    lf.add_argument("--s", required=True, help='comma-separated values, e.g. "4,6,8+2i"')
    lf.add_argument("--pmax", type=int, default=13)
    lf.add_argument("--zeta-sign", choices=CONVENTIONS, default="displayed")
    lf.add_argument("--format", choices=("json", "csv"), default="json")
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        if args.command == "fqm-info":
            dump(fqm_report(load_gram(args.file)), out)
            return EXIT_OK
        if args.command == "verify":
            names = SUITES if args.suite == "all" else (args.suite,)
            if any(n not in SUITES for n in names):
                sys.stderr.write(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES + ('all',))}\n")
                return EXIT_PARSE
            gram = load_gram(args.file)
            results = {n: run_suite(n, gram, args.seed, args.corrupt_q) for n in names}
            passed = all(r["passed"] for rs in results.values() for r in rs)
            dump({"seed": args.seed, "suites": results, "passed": passed}, out)
            return EXIT_OK if passed else EXIT_FAIL
        if args.command == "lfunction":
            try:
                s_values = parse_s_list(args.s)
            except ValueError as exc:
                sys.stderr.write(f"{exc}\n")
                return EXIT_PARSE
            if args.pmax < 3:
                sys.stderr.write("--pmax must be at least 3\n")
                return EXIT_PARSE
            table = EigenvalueTable.from_json(args.file)
            report, code = lfunction_report(table, s_values, args.pmax, args.zeta_sign)
            if args.format == "csv" and code == EXIT_OK:
                out.write(_csv(report))
            else:
                dump(report, out)
            return code
    except UnsupportedLattice as exc:
        sys.stderr.write(f"unsupported input: {exc}\n")
        return EXIT_UNSUPPORTED
    except LatticeError as exc:
        sys.stderr.write(f"parse error: {exc}\n")
        return EXIT_PARSE
    return EXIT_PARSE


def main_exit():
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
