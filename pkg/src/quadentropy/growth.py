"""Rational generating functions, entropy, closed forms and isotropy."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

import numpy as np
import sympy

DEFAULT_TOL = 1e-9
MAX_OFFSET = 2
MIN_HOLDOUT = 3


class NoRationalFit(ValueError):
    pass


class Unavailable(ValueError):
    pass


class RootFindingError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# fitting

def berlekamp_massey(seq: list) -> list[Fraction]:
    """Shortest connection polynomial ``C`` (ascending, ``C[0] = 1``) over Q.

    ``sum_j C[j] * seq[k - j] = 0`` for every ``k >= len(C) - 1``.
    """
    s = [Fraction(x) for x in seq]
    C = [Fraction(1)]
    B = [Fraction(1)]
    L, m, b = 0, 1, Fraction(1)
    for n in range(len(s)):
        d = s[n]
        for i in range(1, L + 1):
            d += C[i] * s[n - i]
        if d == 0:
            m += 1
            continue
        coef = d / b
        T = list(C)
        need = len(B) + m
        if len(C) < need:
            C = C + [Fraction(0)] * (need - len(C))
        for i, bi in enumerate(B):
            C[i + m] -= coef * bi
        if 2 * L <= n:
            L, B, b, m = n + 1 - L, T, d, 1
        else:
            m += 1
    C = C[:L + 1] + [Fraction(0)] * max(0, L + 1 - len(C))
    return C


def _trim(p: list) -> list:
    p = list(p)
    while len(p) > 1 and p[-1] == 0:
        p.pop()
    return p


def _series(P: list, Q: list, n: int) -> list:
    """First ``n`` Taylor coefficients of P/Q with ``Q[0] = 1``."""
    out = []
    for k in range(n):
        v = P[k] if k < len(P) else 0
        for j in range(1, min(k, len(Q) - 1) + 1):
            v -= Q[j] * out[k - j]
        out.append(v)
    return out


@dataclass
class GeneratingFunctionFit:
    P: list[int]          # ascending coefficients
    Q: list[int]          # ascending, Q[0] = 1
    window: int           # number of leading terms used to build the recurrence
    holdout: int          # held-out terms, all predicted exactly
    offset: int = 0       # recurrence valid from this index on

    def series(self, n: int) -> list[int]:
        return [int(v) for v in _series(self.P, self.Q, n)]

    @property
    def order(self) -> int:
        return len(self.Q) - 1

    def to_dict(self) -> dict:
        return {"P": list(self.P), "Q": list(self.Q), "window": self.window,
                "holdout": self.holdout, "offset": self.offset}

    @classmethod
    def from_dict(cls, d: dict) -> "GeneratingFunctionFit":
        return cls(list(d["P"]), list(d["Q"]), d["window"], d["holdout"], d.get("offset", 0))

    def __str__(self) -> str:
        return f"({format_poly(self.P)})/({format_poly(self.Q)})"


def _poly_gcd_reduce(P: list[Fraction], Q: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    s = sympy.Symbol("s")
    p = sympy.Poly(list(reversed(P)), s, domain="QQ")
    q = sympy.Poly(list(reversed(Q)), s, domain="QQ")
    g = p.gcd(q)
    if g.degree() > 0:
        p = p.exquo(g)
        q = q.exquo(g)
    q0 = q.eval(0)
    p, q = p * (1 / q0), q * (1 / q0)
    asc = lambda poly: [Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())]
    return asc(p), asc(q)


def _as_int(coeffs: list[Fraction]) -> list[int]:
    if any(c.denominator != 1 for c in coeffs):
        raise NoRationalFit("fitted generating function has non-integer coefficients")
    return [int(c) for c in coeffs]


def fit_generating_function(seq) -> GeneratingFunctionFit:
    """Minimal constant-coefficient recurrence on the first two thirds, checked on the rest."""
    seq = [int(x) for x in seq]
    n = len(seq)
    if n < 8:
        raise NoRationalFit(f"need at least 8 terms, got {n}")
    window = min(math.ceil(2 * n / 3), n - MIN_HOLDOUT)
    max_order = n // 3
    for k0 in range(MAX_OFFSET + 1):
        part = seq[k0:window]
        C = berlekamp_massey(part)
        L = len(C) - 1
        if L > max_order or 2 * L > len(part):
            continue
        ok = all(sum(C[j] * seq[k - j] for j in range(L + 1)) == 0 for k in range(k0 + L, n))
        if not ok:
            continue
        # g * C is a polynomial of degree < k0 + L
        full = [Fraction(x) for x in seq]
        prod = [sum(C[j] * full[k - j] for j in range(min(k, L) + 1)) for k in range(k0 + L)]
        P, Q = _poly_gcd_reduce(_trim(prod) if prod else [Fraction(0)], C)
        fit = GeneratingFunctionFit(_as_int(_trim(P)), _as_int(_trim(Q)), window, n - window, k0)
        if fit.series(n) != seq:
            continue
        return fit
    raise NoRationalFit(f"no recurrence of order <= {max_order} predicts the last {n - window} terms")


# ---------------------------------------------------------------------------
# entropy and growth class

def _cyclotomic_index(f: sympy.Poly) -> int | None:
    d = f.degree()
    s = f.gens[0]
    for n in range(1, 4 * d * d + 3):
        if sympy.totient(n) != d:
            continue
        c = sympy.Poly(sympy.cyclotomic_poly(n, s), s)
        if f == c or f == -c:
            return n
    return None


def cyclotomic_factorization(Q: list[int]) -> dict[int, int] | None:
    """``{n: multiplicity}`` if Q is a product of cyclotomic polynomials, else None."""
    s = sympy.Symbol("s")
    q = sympy.Poly(list(reversed(Q)), s, domain="ZZ")
    if q.degree() == 0:
        return {}
    content, factors = q.factor_list()
    if abs(content) != 1:
        return None
    out: dict[int, int] = {}
    for f, e in factors:
        n = _cyclotomic_index(f)
        if n is None:
            return None
        out[n] = out.get(n, 0) + e
    return out


def unit_circle_product(cyc: dict[int, int]) -> tuple[int, list[int]] | None:
    """Write prod Phi_n^e as ``(1-s)^b0 * prod (1-s^b_i)``; returns ``(b0, [b_i])``."""
    left = dict(cyc)
    blocks = []
    while any(n > 1 and e > 0 for n, e in left.items()):
        top = max(n for n, e in left.items() if e > 0 and n > 1)
        for d in sympy.divisors(top):
            if left.get(d, 0) <= 0:
                return None
            left[d] -= 1
        blocks.append(top)
    return left.get(1, 0), blocks


def _growth_name(degree: int) -> str:
    names = {0: "bounded", 1: "linear", 2: "quadratic", 3: "cubic"}
    return names.get(degree, f"polynomial degree {degree}")


@dataclass
class EntropyResult:
    S: float
    exact_zero: bool
    growth: str
    beta: int | None = None           # d_k ~ k^(beta - 1) when S = 0
    rho: float | None = None          # radius of convergence
    cyclotomic: dict[int, int] | None = None
    factorization: tuple[int, list[int]] | None = None

    @property
    def polynomial_degree(self) -> int | None:
        return None if self.beta is None else max(self.beta - 1, 0)

    def to_dict(self) -> dict:
        d = {"S": self.S, "exact_zero": self.exact_zero, "growth": self.growth}
        if self.beta is not None:
            d["beta"] = self.beta
        if self.rho is not None:
            d["rho"] = self.rho
        if self.cyclotomic is not None:
            d["cyclotomic"] = {str(k): v for k, v in sorted(self.cyclotomic.items())}
        return d


def _min_modulus_root(Q: list[int], tol: float) -> complex:
    desc = np.array(list(reversed(Q)), dtype=float)
    roots = np.roots(desc)
    if len(roots) == 0:
        raise RootFindingError("denominator has no roots")
    r = complex(roots[np.argmin(np.abs(roots))])
    dq = np.polyder(desc)
    for _ in range(50):
        f = np.polyval(desc, r)
        fp = np.polyval(dq, r)
        if fp == 0:
            break
        step = f / fp
        r -= step
        if abs(step) <= tol * max(1.0, abs(r)):
            return r
    if abs(np.polyval(desc, r)) > math.sqrt(tol):
        lo = float(np.min(np.abs(roots)))
        raise RootFindingError(f"no convergence near |s| in [{lo * (1 - 1e-3)}, {lo * (1 + 1e-3)}]")
    return r


def entropy_from_fit(fit: GeneratingFunctionFit, tol: float = DEFAULT_TOL) -> EntropyResult:
    cyc = cyclotomic_factorization(fit.Q)
    if cyc is not None:
        prod = unit_circle_product(cyc)
        if prod is not None:
            b0, blocks = prod
            beta = b0 + len(blocks)
        else:
            # unit-circle poles not of the (1-s)^b0 prod(1-s^b) shape
            beta = max(cyc.values(), default=0)
        return EntropyResult(0.0, True, _growth_name(max(beta - 1, 0)), beta,
                             1.0 if cyc else None, cyc, prod)
    r = _min_modulus_root(fit.Q, tol)
    rho = abs(r)
    S = -math.log(rho)
    if S > tol:
        return EntropyResult(S, False, "exponential", None, rho)
    # poles on or outside the unit circle without cyclotomic structure
    return EntropyResult(max(S, 0.0), False, "polynomial", None, rho)


def growth_class(seq, tol: float = DEFAULT_TOL) -> tuple[GeneratingFunctionFit, EntropyResult]:
    fit = fit_generating_function(seq)
    return fit, entropy_from_fit(fit, tol)


# ---------------------------------------------------------------------------
# closed forms

@dataclass
class QuasiPolynomial:
    """``d_k = coeffs[k % period](k)`` for ``k >= start``; earlier terms listed in ``initial``."""

    period: int
    coeffs: list[list[Fraction]]   # per residue, ascending powers of k
    start: int = 0
    initial: list[int] = field(default_factory=list)

    def __call__(self, k: int) -> Fraction:
        if k < self.start:
            return Fraction(self.initial[k])
        c = self.coeffs[k % self.period]
        return sum((ci * k ** i for i, ci in enumerate(c)), Fraction(0))

    def values(self, n: int) -> list[Fraction]:
        return [self(k) for k in range(n)]

    @property
    def is_polynomial(self) -> bool:
        return self.period == 1

    def mean_and_oscillation(self) -> tuple[list[Fraction], list[list[Fraction]]]:
        """Average polynomial over residues and the periodic correction per residue."""
        width = max(len(c) for c in self.coeffs)
        padded = [c + [Fraction(0)] * (width - len(c)) for c in self.coeffs]
        mean = [sum(col, Fraction(0)) / self.period for col in zip(*padded)]
        osc = [[a - m for a, m in zip(c, mean)] for c in padded]
        return _trim(mean), [_trim(o) for o in osc]

    def to_dict(self) -> dict:
        return {"period": self.period, "start": self.start, "initial": self.initial,
                "coeffs": [[str(c) for c in r] for r in self.coeffs]}

    def __str__(self) -> str:
        if self.is_polynomial:
            return "d_k = " + format_poly(self.coeffs[0], var="k")
        parts = [f"k = {r} mod {self.period}: {format_poly(c, var='k')}"
                 for r, c in enumerate(self.coeffs)]
        return "d_k = " + "; ".join(parts)


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    n = len(rows[0])
    M = sympy.Matrix([[sympy.Rational(x.numerator, x.denominator) for x in r] for r in rows])
    b = sympy.Matrix([sympy.Rational(x.numerator, x.denominator) for x in rhs])
    sol = M[:n, :].LUsolve(b[:n, :])
    out = [Fraction(int(v.p), int(v.q)) for v in sol]
    return out


def closed_form(fit: GeneratingFunctionFit) -> QuasiPolynomial:
    cyc = cyclotomic_factorization(fit.Q)
    if cyc is None:
        raise Unavailable("denominator has poles off the unit circle")
    period = math.lcm(*cyc) if cyc else 1
    deg = max(cyc.values(), default=1) - 1 if cyc else 0
    start = max(0, len(fit.P) - len(fit.Q) + 1)
    need = deg + 1
    n = start + period * (need + 1)
    vals = fit.series(n)
    coeffs = []
    for r in range(period):
        ks = [k for k in range(start, n) if k % period == r][:need]
        rows = [[Fraction(k) ** i for i in range(need)] for k in ks]
        coeffs.append(_trim(_solve_exact(rows, [Fraction(vals[k]) for k in ks])))
    if all(c == coeffs[0] for c in coeffs):
        period, coeffs = 1, [coeffs[0]]
    qp = QuasiPolynomial(period, coeffs, start, [int(v) for v in vals[:start]])
    check = max(n, fit.window + fit.holdout) + 2 * period
    if [int(v) if v.denominator == 1 else None for v in qp.values(check)] != fit.series(check):
        raise Unavailable("quasi-polynomial does not regenerate the sequence")
    # shrink the exceptional prefix where the formula already holds
    while qp.start > 0:
        k = qp.start - 1
        c = qp.coeffs[k % qp.period]
        if sum((ci * k ** i for i, ci in enumerate(c)), Fraction(0)) != qp.initial[k]:
            break
        qp.start -= 1
        qp.initial = qp.initial[:qp.start]
    return qp


# ---------------------------------------------------------------------------
# isotropy

@dataclass
class IsotropyResult:
    cls: str
    sigma: dict | None = None   # (dir_a, dir_b) -> {field: field}

    def __str__(self) -> str:
        return self.cls


def _agree(a: list, b: list) -> bool:
    n = min(len(a), len(b))
    return a[:n] == b[:n]


def classify_isotropy(seqs: dict, fields: list[str] | None = None) -> IsotropyResult:
    """``seqs`` maps direction -> field -> degree sequence (admissible directions only)."""
    dirs = sorted(seqs, key=str)
    if len(dirs) < 2:
        return IsotropyResult("not-applicable")
    fields = fields or list(seqs[dirs[0]])
    all_seqs = [seqs[d][f] for d in dirs for f in fields]
    if all(_agree(all_seqs[0], s) for s in all_seqs):
        return IsotropyResult("strongly isotropic")
    if all(all(_agree(seqs[dirs[0]][f], seqs[d][f]) for f in fields) for d in dirs):
        return IsotropyResult("isotropic")
    sigmas = {}
    for i, a in enumerate(dirs):
        for b in dirs[i + 1:]:
            found = None
            for perm in permutations(fields):
                if all(_agree(seqs[a][f], seqs[b][g]) for f, g in zip(fields, perm)):
                    found = dict(zip(fields, perm))
                    break
            if found is None:
                return IsotropyResult("anisotropic")
            sigmas[(str(a), str(b))] = found
    return IsotropyResult("permutationally isotropic", sigmas)


def swap_sigma(result: IsotropyResult) -> dict[str, str] | None:
    """The first non-identity permutation found, if any."""
    if not result.sigma:
        return None
    for s in result.sigma.values():
        if any(k != v for k, v in s.items()):
            return s
    return None


# ---------------------------------------------------------------------------

def format_poly(coeffs, var: str = "s") -> str:
    terms = []
    for i, c in enumerate(coeffs):
        c = Fraction(c)
        if c == 0:
            continue
        mag = abs(c)
        mono = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    out = ("-" if terms[0][0] == "-" else "") + terms[0][1]
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out
