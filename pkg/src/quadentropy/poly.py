"""Degree evolution along a projective line of initial data.

Initial values are placed on a line ``x = (a t0 + b t1) / (a0 t0 + b0 t1)``
(one shared denominator per component), so every iterate is a ratio of two
homogeneous polynomials in ``[t0 : t1]`` of equal degree.  Arithmetic is done
over GF(p); a homogeneous polynomial of degree ``d`` is stored dehomogenized,
``F(t0, t1) = t1^d f(t0 / t1)``, with ``f`` a univariate polynomial of degree
at most ``d``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

import flint
import sympy

from .expr import FuncRef, Param, QuadSystemSpec, field_symbol, leaf_symbol
from .lattice import Range, StaircaseSpec, build_range, schedule
from .solve import DEFAULT_PRIME, Direction, UpdateMap

MAX_ATTEMPTS = 5


class DegenerateRun(ArithmeticError):
    """A denominator vanished identically for this random specialization."""


class HomogPoly:
    __slots__ = ("deg", "f")

    def __init__(self, deg: int, f: flint.nmod_poly):
        if f != 0 and f.degree() > deg:
            raise ValueError("dehomogenized degree exceeds homogeneous degree")
        self.deg = deg
        self.f = f

    @classmethod
    def from_coeffs(cls, coeffs: list[int], p: int) -> "HomogPoly":
        """``coeffs[j]`` multiplies ``t0^j t1^(d-j)``, ``d = len(coeffs) - 1``."""
        return cls(len(coeffs) - 1, flint.nmod_poly([c % p for c in coeffs], p))

    @classmethod
    def constant(cls, c: int, p: int) -> "HomogPoly":
        return cls(0, flint.nmod_poly([c % p], p))

    @property
    def modulus(self) -> int:
        return self.f.modulus()

    def is_zero(self) -> bool:
        return self.f == 0

    def coeffs(self) -> list[int]:
        c = [int(x) for x in self.f.coeffs()]
        return c + [0] * (self.deg + 1 - len(c))

    def t1_valuation(self) -> int:
        return self.deg - self.f.degree()

    def __mul__(self, other: "HomogPoly") -> "HomogPoly":
        return HomogPoly(self.deg + other.deg, self.f * other.f)

    def __add__(self, other: "HomogPoly") -> "HomogPoly":
        if self.deg != other.deg:
            raise ValueError("adding homogeneous polynomials of different degree")
        return HomogPoly(self.deg, self.f + other.f)

    def __sub__(self, other: "HomogPoly") -> "HomogPoly":
        if self.deg != other.deg:
            raise ValueError("subtracting homogeneous polynomials of different degree")
        return HomogPoly(self.deg, self.f - other.f)

    def __neg__(self) -> "HomogPoly":
        return HomogPoly(self.deg, -self.f)

    def scale(self, c: int) -> "HomogPoly":
        return HomogPoly(self.deg, self.f * (c % self.modulus))

    def __pow__(self, e: int) -> "HomogPoly":
        return HomogPoly(self.deg * e, self.f ** e)

    def __eq__(self, other) -> bool:
        return isinstance(other, HomogPoly) and self.deg == other.deg and self.f == other.f

    def __repr__(self) -> str:
        return f"HomogPoly({self.deg}, {self.coeffs()})"


def homog_gcd(a: HomogPoly, b: HomogPoly) -> HomogPoly:
    """Monic gcd: common power of ``t1`` times the gcd of the dehomogenized parts."""
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    v = min(a.t1_valuation(), b.t1_valuation())
    g = a.f.gcd(b.f)
    return HomogPoly(v + g.degree(), g)


def homog_exquo(a: HomogPoly, g: HomogPoly) -> HomogPoly:
    q, r = divmod(a.f, g.f)
    if r != 0:
        raise ArithmeticError("inexact division")
    return HomogPoly(a.deg - g.deg, q)


class RationalPair:
    """Ratio of two homogeneous polynomials of the same degree."""

    __slots__ = ("num", "den")

    def __init__(self, num: HomogPoly, den: HomogPoly):
        if num.deg != den.deg:
            raise ValueError("numerator and denominator must have equal degree")
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        self.num = num
        self.den = den

    @property
    def degree(self) -> int:
        return self.num.deg

    def __add__(self, o: "RationalPair") -> "RationalPair":
        return RationalPair(self.num * o.den + o.num * self.den, self.den * o.den)

    def __sub__(self, o: "RationalPair") -> "RationalPair":
        return RationalPair(self.num * o.den - o.num * self.den, self.den * o.den)

    def __mul__(self, o: "RationalPair") -> "RationalPair":
        return RationalPair(self.num * o.num, self.den * o.den)

    def __truediv__(self, o: "RationalPair") -> "RationalPair":
        if o.num.is_zero():
            raise ZeroDivisionError("division by the zero function")
        return RationalPair(self.num * o.den, self.den * o.num)

    def reduce(self) -> "RationalPair":
        g = homog_gcd(self.num, self.den)
        if g.deg == 0:
            return self
        return RationalPair(homog_exquo(self.num, g), homog_exquo(self.den, g))

    def is_reduced(self) -> bool:
        return homog_gcd(self.num, self.den).deg == 0

    def __repr__(self) -> str:
        return f"RationalPair({self.num.coeffs()}, {self.den.coeffs()})"


def pair_arith(a: RationalPair, b: RationalPair, op: str) -> RationalPair:
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op in ("*", "×"):
        return a * b
    if op in ("/", "÷"):
        return a / b
    raise ValueError(f"unknown operation {op!r}")


# ---------------------------------------------------------------------------
# random specialization shared by the GF(p) engine and the exact oracle

@dataclass
class Specialization:
    """Random integer data for one run: initial line, parameters, function values."""

    seed: int
    prime: int
    line_den: dict[str, tuple[int, int]]                    # field -> (a0, b0)
    line_num: dict[tuple[tuple[int, int], str], tuple[int, int]]  # (point, field) -> (a, b)
    params: dict[str, int]
    funcs: dict[str, dict[int, int]]                        # name -> index -> value

    def coefficient(self, sym_kind, base: tuple[int, int]) -> Fraction:
        """Value of a parameter or function reference at the quad with this base."""
        if isinstance(sym_kind, Param):
            return Fraction(self.params[sym_kind.name])
        ref: FuncRef = sym_kind
        idx = base[0] if ref.index == "l" else base[1]
        v = Fraction(self.funcs[ref.name][idx])
        if ref.parity is not None:
            par = base[0] if ref.parity == "l" else base[1]
            if par % 2:
                v = 1 / v
        return v


def draw_specialization(spec: QuadSystemSpec, rng_: Range, seed: int,
                        prime: int = DEFAULT_PRIME) -> Specialization:
    rng = random.Random(seed)

    def draw() -> int:
        return rng.randrange(1, prime)

    line_den = {f: (draw(), draw()) for f in spec.fields}
    line_num = {(pt, f): (draw(), draw()) for pt in rng_.initial for f in spec.fields}
    params: dict[str, int] = {}
    used: set[int] = set()
    for name in spec.params:
        v = draw()
        while v in used:
            v = draw()
        used.add(v)
        params[name] = v
    pts = rng_.initial + rng_.points
    lo = min(min(p) for p in pts) - 1
    hi = max(max(p) for p in pts) + 1
    funcs = {name: {k: draw() for k in range(lo, hi + 1)} for name in spec.funcs}
    return Specialization(seed, prime, line_den, line_num, params, funcs)


# ---------------------------------------------------------------------------
# compiled update map over GF(p)

class _CompiledComponent:
    def __init__(self, num: sympy.Poly, den: sympy.Poly, field_syms: list, coef_syms: list):
        self.field_syms = field_syms
        gens = list(num.gens)
        fidx = [gens.index(s) for s in field_syms]
        cidx = [gens.index(s) for s in coef_syms]
        self.num_terms = self._split(num, fidx, cidx)
        self.den_terms = self._split(den, fidx, cidx)
        self.F = [0] * len(field_syms)
        for terms in (self.num_terms, self.den_terms):
            for fm in terms:
                self.F = [max(a, b) for a, b in zip(self.F, fm)]

    @staticmethod
    def _split(poly: sympy.Poly, fidx, cidx):
        out: dict[tuple, list] = {}
        for monom, c in poly.terms():
            fm = tuple(monom[i] for i in fidx)
            cm = tuple(monom[i] for i in cidx)
            out.setdefault(fm, []).append((Fraction(int(c.p), int(c.q)), cm))
        return out


def _mod(x: Fraction, p: int) -> int:
    d = x.denominator % p
    if d == 0:
        raise DegenerateRun("coefficient denominator divisible by the prime")
    return x.numerator * pow(d, -1, p) % p


class CompiledUpdate:
    """Update map prepared for repeated evaluation on :class:`RationalPair` inputs."""

    def __init__(self, update: UpdateMap):
        spec = update.spec
        self.update = update
        d = update.direction
        self.field_keys = [(c, f) for f in spec.fields for c in d.known]
        field_syms = [field_symbol(f, *c) for c, f in self.field_keys]
        coef_leaves = [Param(p) for p in spec.params] + spec.func_refs()
        self.coef_leaves = coef_leaves
        coef_syms = [leaf_symbol(leaf) for leaf in self.coef_leaves]
        self.components = [_CompiledComponent(n, dd, field_syms, coef_syms)
                           for n, dd in update.components]

    def coefficient_values(self, sp: Specialization, base) -> list[Fraction]:
        return [sp.coefficient(leaf, base) for leaf in self.coef_leaves]

    @staticmethod
    def _coef(terms, cvals, p: int | None):
        out = {}
        for fm, lst in terms.items():
            total = Fraction(0)
            for c, cm in lst:
                v = c
                for x, e in zip(cvals, cm):
                    if e:
                        v *= x ** e
                total += v
            out[fm] = total if p is None else _mod(total, p)
        return out

    def apply(self, inputs: list[RationalPair], sp: Specialization, base) -> list[RationalPair]:
        """Evaluate on GF(p) pairs; ``inputs`` follow ``field_keys`` order."""
        p = sp.prime
        cvals = self.coefficient_values(sp, base)
        out = []
        for comp in self.components:
            pw_n: dict = {}
            pw_d: dict = {}

            def power(cache, poly, i, e):
                key = (i, e)
                if key not in cache:
                    cache[key] = poly ** e
                return cache[key]

            sides = []
            for terms in (comp.num_terms, comp.den_terms):
                coefs = self._coef(terms, cvals, p)
                deg = sum(F * inputs[i].degree for i, F in enumerate(comp.F))
                acc = HomogPoly(deg, flint.nmod_poly([0], p))
                for fm, c in coefs.items():
                    if c == 0:
                        continue
                    term = HomogPoly.constant(c, p)
                    for i, (e, F) in enumerate(zip(fm, comp.F)):
                        if F == 0:
                            continue
                        if e:
                            term = term * power(pw_n, inputs[i].num, i, e)
                        if F - e:
                            term = term * power(pw_d, inputs[i].den, i, F - e)
                    acc = acc + term
                sides.append(acc)
            if sides[1].is_zero():
                raise DegenerateRun("update denominator vanished identically")
            out.append(RationalPair(sides[0], sides[1]).reduce())
        return out


# ---------------------------------------------------------------------------

@dataclass
class DegreeGrid:
    direction: Direction
    fields: list[str]
    staircase: StaircaseSpec
    prime: int
    seed: int
    trial: int
    degrees: dict[tuple[int, int], tuple[int, ...]]   # (l, m) -> degree per field
    points: dict[tuple[int, int], tuple[int, int]] = field(default_factory=dict)  # (l, m) -> lattice point

    def layers(self) -> int:
        return max((l for l, _ in self.degrees), default=0)

    def to_csv(self) -> str:
        rows = ["l,m,component,degree"]
        for (l, m) in sorted(self.degrees):
            for f, d in zip(self.fields, self.degrees[(l, m)]):
                rows.append(f"{l},{m},{f},{d}")
        return "\n".join(rows) + "\n"


def _initial_pair(sp: Specialization, pt, f) -> RationalPair:
    p = sp.prime
    a, b = sp.line_num[(pt, f)]
    a0, b0 = sp.line_den[f]
    # coefficient lists are [t1-coefficient, t0-coefficient]
    return RationalPair(HomogPoly.from_coeffs([b, a], p), HomogPoly.from_coeffs([b0, a0], p))


def evolve_once(update: UpdateMap, stair: StaircaseSpec, seed: int, prime: int = DEFAULT_PRIME,
                trial: int = 0, check_reduced: bool = False, keep_values: bool = False):
    spec = update.spec
    rng_ = build_range(stair, update.direction)
    sp = draw_specialization(spec, rng_, seed, prime)
    comp = CompiledUpdate(update)
    values: dict = {}
    for pt in rng_.initial:
        for f in spec.fields:
            values[(pt, f)] = _initial_pair(sp, pt, f)
    index = rng_.index()
    degrees, points = {}, {}
    known = update.direction.known
    ui, uj = update.direction.unknown
    for step in schedule(rng_):
        base = step.base
        inputs = []
        for (c, f) in comp.field_keys:
            src = (base[0] + c[0], base[1] + c[1])
            inputs.append(values[(src, f)])
        outs = comp.apply(inputs, sp, base)
        for f, v in zip(spec.fields, outs):
            if check_reduced and not v.is_reduced():
                raise AssertionError(f"cell {step.target} not reduced")
            values[(step.target, f)] = v
        lm = index[step.target]
        degrees[lm] = tuple(v.degree for v in outs)
        points[lm] = step.target
    grid = DegreeGrid(update.direction, list(spec.fields), stair, prime, seed, trial, degrees, points)
    return (grid, values) if keep_values else grid


def evolve_degrees(update: UpdateMap, stair: StaircaseSpec | None = None,
                   direction: Direction | None = None, steps: int = 16, seed: int = 0,
                   prime: int = DEFAULT_PRIME, trial: int = 0) -> DegreeGrid:
    """Evolve random line data over the range of ``stair``; retries degenerate draws."""
    direction = direction or update.direction
    if direction != update.direction:
        raise ValueError("update map belongs to a different direction")
    if stair is None:
        stair = StaircaseSpec.fundamental(direction, steps)
    if stair.N < 1:
        raise ValueError("need at least one step")
    last = None
    for attempt in range(MAX_ATTEMPTS):
        try:
            return evolve_once(update, stair, seed + 7919 * attempt, prime, trial)
        except (DegenerateRun, ZeroDivisionError) as exc:
            last = exc
    raise DegenerateRun(f"{MAX_ATTEMPTS} degenerate draws in a row: {last}")


# ---------------------------------------------------------------------------

@dataclass
class SequenceSet:
    sequences: dict[str, list[int]]          # field -> 1, d_1, d_2, ...
    shift_equivalent: bool
    per_m: dict[int, dict[str, list[int]]]   # m -> field -> sequence
    classes: list[dict[str, list[int]]]      # distinct per-m sequences when not equivalent


def extract_sequences(grid: DegreeGrid) -> SequenceSet:
    if not grid.degrees:
        raise ValueError("empty degree grid")
    fields = grid.fields
    ms = sorted({m for _, m in grid.degrees})
    per_m = {}
    for m in ms:
        seqs = {f: [1] for f in fields}
        l = 1
        while (l, m) in grid.degrees:
            for f, d in zip(fields, grid.degrees[(l, m)]):
                seqs[f].append(d)
            l += 1
        per_m[m] = seqs
    longest = per_m[ms[0]]
    for m in ms:
        if len(per_m[m][fields[0]]) > len(longest[fields[0]]):
            longest = per_m[m]
    equivalent = all(
        all(longest[f][:len(s[f])] == s[f] for f in fields) for s in per_m.values())
    classes: list[dict[str, list[int]]] = []
    if not equivalent:
        for s in per_m.values():
            if not any(all(c[f][:len(s[f])] == s[f] or s[f][:len(c[f])] == c[f] for f in fields)
                       for c in classes):
                classes.append(s)
    else:
        classes = [longest]
    return SequenceSet({f: list(longest[f]) for f in fields}, equivalent, per_m, classes)


# ---------------------------------------------------------------------------
# exact rational oracle (independent arithmetic path, small N only)

def evolve_degrees_exact(update: UpdateMap, stair: StaircaseSpec, seed: int,
                         prime: int = DEFAULT_PRIME) -> dict[tuple[int, int], tuple[int, ...]]:
    """Same pipeline over Q with sympy rational functions in ``t = t0 / t1``.

    Uses the same random integers as the GF(p) run; the degree of a reduced
    rational function is ``max(deg num, deg den)``.
    """
    spec = update.spec
    rng_ = build_range(stair, update.direction)
    sp = draw_specialization(spec, rng_, seed, prime)
    t = sympy.Symbol("t")
    vals: dict = {}
    for pt in rng_.initial:
        for f in spec.fields:
            a, b = sp.line_num[(pt, f)]
            a0, b0 = sp.line_den[f]
            vals[(pt, f)] = (a * t + b) / (a0 * t + b0)
    index = rng_.index()
    known = update.direction.known
    coef_leaves = [Param(p) for p in spec.params] + spec.func_refs()
    out = {}
    exprs = update.expressions()
    for step in schedule(rng_):
        base = step.base
        subs = {}
        for leaf in coef_leaves:
            v = sp.coefficient(leaf, base)
            subs[leaf_symbol(leaf)] = sympy.Rational(v.numerator, v.denominator)
        for c in known:
            src = (base[0] + c[0], base[1] + c[1])
            for f in spec.fields:
                subs[field_symbol(f, *c)] = vals[(src, f)]
        degs = []
        for f, e in zip(spec.fields, exprs):
            r = sympy.cancel(sympy.together(e.xreplace(subs)))
            n, d = sympy.fraction(r)
            if d == 0:
                raise DegenerateRun("exact run hit a zero denominator")
            vals[(step.target, f)] = r
            degs.append(max(sympy.degree(n, t), sympy.degree(d, t)))
        out[index[step.target]] = tuple(degs)
    return out
