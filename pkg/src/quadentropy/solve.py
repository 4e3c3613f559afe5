"""Admissible directions: rank test and rational elimination for the unknown corner."""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field

import sympy

from .expr import (CORNERS, Expr, FieldRef, QuadSystemSpec, eval_mod, field_symbol,
                   leaf_symbol, leaves, poly_eval_mod, to_poly_form, to_sympy)

DEFAULT_PRIME = 2_147_483_647
MAX_FIELDS = 8


class Direction(enum.Enum):
    """Evolution direction, named after the sign pattern of its staircase.

    The staircase ``[s1, s2]`` moves horizontally by ``s1`` first, then
    vertically by ``s2``; the evolved half-plane fixes which corner of each
    quad is unknown::

        ++  unknown (0,1)      --  unknown (1,0)
        +-  unknown (0,0)      -+  unknown (1,1)
    """

    PP = "++"
    PM = "+-"
    MP = "-+"
    MM = "--"

    @property
    def signs(self) -> tuple[int, int]:
        return tuple(1 if c == "+" else -1 for c in self.value)

    @property
    def unknown(self) -> tuple[int, int]:
        return _UNKNOWN[self]

    @property
    def known(self) -> tuple[tuple[int, int], ...]:
        return tuple(c for c in CORNERS if c != self.unknown)

    @classmethod
    def parse(cls, text: str) -> "Direction":
        t = text.strip().replace("(", "").replace(")", "").replace(",", "")
        for d in cls:
            if d.value == t:
                return d
        raise ValueError(f"unknown direction {text!r}; use ++, +-, -+ or --")

    @classmethod
    def from_signs(cls, s1: int, s2: int) -> "Direction":
        return cls.parse(("+" if s1 > 0 else "-") + ("+" if s2 > 0 else "-"))

    def __str__(self) -> str:
        return f"({self.value[0]},{self.value[1]})"


_UNKNOWN = {
    Direction.PP: (0, 1),
    Direction.MM: (1, 0),
    Direction.PM: (0, 0),
    Direction.MP: (1, 1),
}

ALL_DIRECTIONS = (Direction.PP, Direction.PM, Direction.MP, Direction.MM)


class NotAdmissible(Exception):
    def __init__(self, direction: Direction, reason: str):
        self.direction = direction
        self.reason = reason
        super().__init__(f"direction {direction} not admissible: {reason}")


class IllPosedSpec(ValueError):
    pass


@dataclass
class UpdateMap:
    """Rational formula for each component of the unknown corner.

    ``components[k] = (num, den)`` are polynomials in the known field symbols
    and the coefficient symbols (parameters, arbitrary-function references).
    """

    direction: Direction
    spec: QuadSystemSpec
    components: list[tuple[sympy.Poly, sympy.Poly]]
    order: list[tuple[int, str]]  # (equation index, field) in elimination order

    @property
    def unknown_symbols(self) -> list[sympy.Symbol]:
        i, j = self.direction.unknown
        return [field_symbol(f, i, j) for f in self.spec.fields]

    def expressions(self) -> list[sympy.Expr]:
        return [n.as_expr() / d.as_expr() for n, d in self.components]

    def eval_mod(self, env: dict[sympy.Symbol, int], p: int) -> list[int]:
        out = []
        for num, den in self.components:
            d = poly_eval_mod(den, env, p)
            if d == 0:
                raise ZeroDivisionError("update map denominator vanishes")
            out.append(poly_eval_mod(num, env, p) * pow(d, -1, p) % p)
        return out


@dataclass
class DirectionResult:
    direction: Direction
    rank: int
    status: str  # "admissible" | "rank-deficient" | "no-linear-elimination-found"
    update: UpdateMap | None = None

    @property
    def admissible(self) -> bool:
        return self.status == "admissible"


@dataclass
class AdmissibilityReport:
    spec: QuadSystemSpec
    results: dict[Direction, DirectionResult] = field(default_factory=dict)

    @property
    def admissible(self) -> list[Direction]:
        return [d for d in ALL_DIRECTIONS if d in self.results and self.results[d].admissible]

    def to_dict(self) -> dict:
        out = {}
        for d, r in self.results.items():
            entry = {"status": r.status, "rank": r.rank, "unknown_corner": list(d.unknown)}
            if r.update is not None:
                entry["update_map"] = {
                    f: {"num": str(n.as_expr()), "den": str(dd.as_expr())}
                    for f, (n, dd) in zip(self.spec.fields, r.update.components)}
                entry["elimination_order"] = [[k, f] for k, f in r.update.order]
            out[d.value] = entry
        return out


# ---------------------------------------------------------------------------

def _random_env(spec: QuadSystemSpec, rng: random.Random, p: int) -> dict:
    return {leaf: rng.randrange(1, p) for leaf in leaves(spec)}


def _rank_mod(rows: list[list[int]], p: int) -> int:
    m = [r[:] for r in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] % p), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], -1, p)
        for r in range(len(m)):
            if r != rank and m[r][c] % p:
                f = m[r][c] * inv % p
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def _cleared(spec: QuadSystemSpec) -> tuple[list, list[sympy.Symbol]]:
    gens = [leaf_symbol(x) for x in leaves(spec)]
    return [to_poly_form(eq, gens) for eq in spec.equations], gens


def jacobian_rank(spec: QuadSystemSpec, direction: Direction, trials: int = 4, *,
                  prime: int = DEFAULT_PRIME, seed: int = 0) -> int:
    """Max rank of d(cleared equations)/d(unknown corner) over random points."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    forms, gens = _cleared(spec)
    i, j = direction.unknown
    unknowns = [field_symbol(f, i, j) for f in spec.fields]
    jac = [[f.numerator.diff(u) for u in unknowns] for f in forms]
    rng = random.Random(seed)
    best, good = 0, 0
    for _ in range(trials):
        point = {g: rng.randrange(1, prime) for g in gens}
        if any(poly_eval_mod(f.denominator, point, prime) == 0 for f in forms):
            continue
        good += 1
        rows = [[poly_eval_mod(c, point, prime) for c in row] for row in jac]
        best = max(best, _rank_mod(rows, prime))
    if good == 0:
        raise IllPosedSpec("every specialization hits a vanishing denominator")
    return best


# ---------------------------------------------------------------------------
# elimination search

class _Search:
    def __init__(self, spec: QuadSystemSpec, direction: Direction, prime: int, seed: int,
                 zero_trials: int = 8, verify_points: int = 20):
        self.spec = spec
        self.direction = direction
        self.prime = prime
        self.rng = random.Random(seed)
        self.zero_trials = zero_trials
        self.verify_points = verify_points
        i, j = direction.unknown
        self.unknowns = [field_symbol(f, i, j) for f in spec.fields]
        self.gens = [leaf_symbol(x) for x in leaves(spec)]
        self.known = [g for g in self.gens if g not in self.unknowns]
        self.seen: set = set()

    def nonzero(self, poly: sympy.Poly) -> bool:
        for _ in range(self.zero_trials):
            point = {g: self.rng.randrange(1, self.prime) for g in poly.gens}
            if poly_eval_mod(poly, point, self.prime):
                return True
        return False

    def run(self, eqs: list[sympy.Expr], solved: list[tuple[int, sympy.Symbol, sympy.Expr]]):
        remaining = [u for u in self.unknowns if u not in {s for _, s, _ in solved}]
        if not remaining:
            return solved
        key = (tuple(sympy.srepr(e) for e in eqs), tuple(str(u) for u in remaining))
        if key in self.seen:
            return None
        self.seen.add(key)
        # equations with no unknowns left must vanish; otherwise this branch is inconsistent
        live = []
        for k, e in eqs:
            if not (e.free_symbols & set(remaining)):
                if e != 0 and self.nonzero(sympy.Poly(e, *self.gens)):
                    return None
                continue
            live.append((k, e))
        if len(live) < len(remaining):
            return None
        for pos, (k, e) in enumerate(live):
            for u in remaining:
                poly_u = sympy.Poly(e, u)
                if poly_u.degree() != 1:
                    continue
                a, b = poly_u.all_coeffs()
                if not self.nonzero(sympy.Poly(a, *self.gens)):
                    continue
                sol = sympy.cancel(-b / a)
                rest = []
                for k2, e2 in live[:pos] + live[pos + 1:]:
                    num = sympy.expand(sympy.numer(sympy.together(e2.subs(u, sol))))
                    if num != 0:
                        rest.append((k2, num))
                res = self.run(rest, solved + [(k, u, sol)])
                if res is not None and self.verify(res):
                    return res
        return None

    def back_substitute(self, solved) -> dict[sympy.Symbol, sympy.Expr]:
        values: dict[sympy.Symbol, sympy.Expr] = {}
        for _, u, sol in reversed(solved):
            values[u] = sympy.cancel(sol.subs(values))
        return values

    def verify(self, solved) -> bool:
        values = self.back_substitute(solved)
        polys = []
        for u in self.unknowns:
            num, den = sympy.fraction(sympy.cancel(values[u]))
            polys.append((sympy.Poly(num, *self.known, domain="QQ"),
                          sympy.Poly(den, *self.known, domain="QQ")))
        checked = 0
        p = self.prime
        for _ in range(self.verify_points * 5):
            env = _random_env(self.spec, self.rng, p)
            point = {leaf_symbol(k): v for k, v in env.items()}
            try:
                vals = []
                for num, den in polys:
                    d = poly_eval_mod(den, point, p)
                    if d == 0:
                        raise ZeroDivisionError
                    vals.append(poly_eval_mod(num, point, p) * pow(d, -1, p) % p)
                i, j = self.direction.unknown
                for f, v in zip(self.spec.fields, vals):
                    env[FieldRef(f, i, j)] = v
                if any(eval_mod(eq, env, p) for eq in self.spec.equations):
                    return False
            except ZeroDivisionError:
                continue
            checked += 1
            if checked >= self.verify_points:
                return True
        return False

    def update_map(self, solved) -> UpdateMap:
        values = self.back_substitute(solved)
        comps = []
        for u in self.unknowns:
            num, den = sympy.fraction(sympy.cancel(values[u]))
            comps.append((sympy.Poly(num, *self.known, domain="QQ"),
                          sympy.Poly(den, *self.known, domain="QQ")))
        by_sym = {u: f for u, f in zip(self.unknowns, self.spec.fields)}
        return UpdateMap(self.direction, self.spec, comps,
                         [(k, by_sym[u]) for k, u, _ in solved])


def solve_direction(spec: QuadSystemSpec, direction: Direction, *, prime: int = DEFAULT_PRIME,
                    seed: int = 0, rank_trials: int = 4) -> UpdateMap:
    """Rational update map for ``direction`` or raise :class:`NotAdmissible`.

    Equations are eliminated one unknown at a time: an equation of degree
    exactly one in some unresolved component is solved for it and the result
    substituted into the others.  All choice orders are tried, equations in
    declaration order and components in field order.  A component that only
    appears quadratically (even if the quadratic splits) is not eliminated:
    two rational roots give a correspondence, not an evolution map.
    """
    if spec.M > MAX_FIELDS:
        raise ValueError(f"at most {MAX_FIELDS} field components supported")
    rank = jacobian_rank(spec, direction, rank_trials, prime=prime, seed=seed)
    if rank < spec.M:
        raise NotAdmissible(direction, "rank-deficient")
    search = _Search(spec, direction, prime, seed)
    eqs = []
    for k, eq in enumerate(spec.equations):
        num = sympy.expand(sympy.numer(sympy.together(to_sympy(eq))))
        eqs.append((k, num))
    res = search.run(eqs, [])
    if res is None:
        raise NotAdmissible(direction, "no-linear-elimination-found")
    return search.update_map(res)


def analyze_direction(spec: QuadSystemSpec, direction: Direction, *, prime: int = DEFAULT_PRIME,
                      seed: int = 0) -> DirectionResult:
    rank = jacobian_rank(spec, direction, prime=prime, seed=seed)
    if rank < spec.M:
        return DirectionResult(direction, rank, "rank-deficient")
    try:
        upd = solve_direction(spec, direction, prime=prime, seed=seed)
    except NotAdmissible as exc:
        return DirectionResult(direction, rank, exc.reason)
    return DirectionResult(direction, rank, "admissible", upd)


def admissibility_report(spec: QuadSystemSpec, *, prime: int = DEFAULT_PRIME,
                         seed: int = 0) -> AdmissibilityReport:
    rep = AdmissibilityReport(spec)
    for d in ALL_DIRECTIONS:
        rep.results[d] = analyze_direction(spec, d, prime=prime, seed=seed)
    return rep
