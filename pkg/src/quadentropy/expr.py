"""Expression trees and the text format used to describe systems of quad equations.

A system file looks like::

    # coupled lattice potential KdV
    fields x y
    params a b
    (x[0,0]-x[1,1])*(y[1,0]-y[0,1]) - a + b = 0;
    (y[0,0]-y[1,1])*(x[1,0]-x[0,1]) - a + b = 0;

Field references ``x[i,j]`` denote the value of component ``x`` at the
vertex ``(l+i, m+j)`` of the elementary quad, with ``i, j`` in ``{0, 1}``.
Arbitrary one-index functions are declared as ``funcs lam(l)`` and may carry
an alternating exponent, ``funcs lam3(l)^((-1)^m)``.  When a file contains no
declarations at all, names are inferred from usage.
"""
from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from typing import Iterator

import sympy

__all__ = [
    "Expr", "Const", "Param", "FuncRef", "FieldRef", "BinOp", "Neg", "Pow",
    "QuadSystemSpec", "PolyForm", "DSLError", "parse_system", "parse_expr",
    "pretty", "to_sympy", "to_poly_form", "eval_mod", "poly_eval_mod",
    "field_symbol", "func_symbol", "CORNERS",
]

CORNERS = ((0, 0), (1, 0), (0, 1), (1, 1))


class DSLError(ValueError):
    """Syntax or semantic error in a system description."""

    def __init__(self, msg: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + msg)


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

class Expr:
    __slots__ = ()

    def __str__(self) -> str:
        return pretty(self)


@dataclass(frozen=True)
class Const(Expr):
    value: int


@dataclass(frozen=True)
class Param(Expr):
    name: str


@dataclass(frozen=True)
class FuncRef(Expr):
    """Arbitrary function ``name(index)``, optionally raised to ``(-1)^parity``."""

    name: str
    index: str
    parity: str | None = None


@dataclass(frozen=True)
class FieldRef(Expr):
    name: str
    i: int
    j: int


@dataclass(frozen=True)
class BinOp(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Neg(Expr):
    operand: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exp: int


@dataclass
class QuadSystemSpec:
    fields: list[str]
    equations: list[Expr]
    params: list[str] = field(default_factory=list)
    # name -> (index variable, default parity or None)
    funcs: dict[str, tuple[str, str | None]] = field(default_factory=dict)
    source: str = ""

    @property
    def M(self) -> int:
        return len(self.fields)

    def func_refs(self) -> list[FuncRef]:
        seen: dict[FuncRef, None] = {}
        for eq in self.equations:
            for node in _walk(eq):
                if isinstance(node, FuncRef):
                    seen[node] = None
        return list(seen)


def _walk(e: Expr) -> Iterator[Expr]:
    yield e
    if isinstance(e, BinOp):
        yield from _walk(e.left)
        yield from _walk(e.right)
    elif isinstance(e, (Neg, Pow)):
        yield from _walk(e.base if isinstance(e, Pow) else e.operand)


def vertices(e: Expr) -> set[tuple[int, int]]:
    return {(n.i, n.j) for n in _walk(e) if isinstance(n, FieldRef)}


# ---------------------------------------------------------------------------
# Tokenizer / parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t\r]+)|(?P<comment>#[^\n]*)|(?P<nl>\n)|(?P<int>\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()\[\],;=])"
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DSLError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            toks.append(_Tok("nl", "\n", line, pos - line_start + 1))
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


_DECL_WORDS = ("fields", "params", "funcs")


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0
        self.fields: list[str] = []
        self.params: list[str] = []
        self.funcs: dict[str, tuple[str, str | None]] = {}
        self.declared = any(
            t.kind == "name" and t.text in _DECL_WORDS for t in self.toks)

    # helpers
    def peek(self, skip_nl: bool = True) -> _Tok:
        i = self.pos
        while skip_nl and self.toks[i].kind == "nl":
            i += 1
        return self.toks[i]

    def next(self, skip_nl: bool = True) -> _Tok:
        while skip_nl and self.toks[self.pos].kind == "nl":
            self.pos += 1
        tok = self.toks[self.pos]
        if tok.kind != "eof":
            self.pos += 1
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.next()
        if tok.text != text:
            got = tok.text or "end of input"
            raise DSLError(f"expected {text!r}, got {got!r}", tok.line, tok.col)
        return tok

    def error(self, msg: str, tok: _Tok) -> DSLError:
        return DSLError(msg, tok.line, tok.col)

    # grammar
    def parse(self) -> QuadSystemSpec:
        equations: list[Expr] = []
        while self.peek().kind != "eof":
            tok = self.peek()
            if tok.kind == "name" and tok.text in _DECL_WORDS:
                self.declaration()
                continue
            if tok.text == ";":
                self.next()
                continue
            equations.append(self.equation())
        if not equations:
            raise DSLError("no equations given")
        return QuadSystemSpec(list(self.fields), equations, list(self.params), dict(self.funcs))

    def declaration(self) -> None:
        kw = self.next().text
        while True:
            tok = self.peek(skip_nl=False)
            if tok.kind in ("nl", "eof") or tok.text == ";":
                break
            name_tok = self.next(skip_nl=False)
            if name_tok.kind != "name":
                raise self.error(f"expected a name in {kw} declaration", name_tok)
            name = name_tok.text
            if name in self.fields or name in self.params or name in self.funcs:
                raise self.error(f"{name!r} declared twice", name_tok)
            if kw == "fields":
                self.fields.append(name)
            elif kw == "params":
                self.params.append(name)
            else:
                self.expect("(")
                idx = self.next()
                if idx.text not in ("l", "m"):
                    raise self.error("function index must be 'l' or 'm'", idx)
                self.expect(")")
                parity = None
                if self.peek(skip_nl=False).text == "^":
                    self.next()
                    parity = self.parity()
                self.funcs[name] = (idx.text, parity)
            if self.peek(skip_nl=False).text == ",":
                self.next(skip_nl=False)

    def parity(self) -> str:
        # after '^': ((-1)^l) or ((-1)^m)
        self.expect("(")
        self.expect("(")
        self.expect("-")
        one = self.next()
        if one.text != "1":
            raise self.error("parity exponent must be (-1)^l or (-1)^m", one)
        self.expect(")")
        self.expect("^")
        var = self.next()
        if var.text not in ("l", "m"):
            raise self.error("parity exponent must be (-1)^l or (-1)^m", var)
        self.expect(")")
        return var.text

    def equation(self) -> Expr:
        lhs = self.expr()
        self.expect("=")
        rhs = self.expr()
        tok = self.peek()
        if tok.text == ";":
            self.next()
        elif tok.kind != "eof":
            raise self.error(f"expected ';' after equation, got {tok.text!r}", tok)
        if isinstance(rhs, Const) and rhs.value == 0:
            return lhs
        return BinOp("-", lhs, rhs)

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek().text in ("*", "/"):
            op = self.next().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.peek().text == "-":
            self.next()
            return Neg(self.unary())
        if self.peek().text == "+":
            self.next()
            return self.unary()
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek().text != "^":
            return base
        caret = self.next()
        if isinstance(base, FuncRef) and self._looks_like_parity():
            parity = self.parity()
            if base.parity is not None and base.parity != parity:
                raise self.error("parity exponent conflicts with the declaration", caret)
            return FuncRef(base.name, base.index, parity)
        return Pow(base, self.int_exponent())

    def _looks_like_parity(self) -> bool:
        texts = [t.text for t in self.toks[self.pos:self.pos + 3]]
        return texts == ["(", "(", "-"]

    def int_exponent(self) -> int:
        tok = self.next()
        if tok.kind == "int":
            return int(tok.text)
        if tok.text == "(":
            sign = 1
            if self.peek().text == "-":
                self.next()
                sign = -1
            num = self.next()
            if num.kind != "int":
                raise self.error("exponents must be integers", num)
            self.expect(")")
            return sign * int(num.text)
        raise self.error("exponents must be integers", tok)

    def atom(self) -> Expr:
        tok = self.next()
        if tok.kind == "int":
            return Const(int(tok.text))
        if tok.text == "(":
            node = self.expr()
            self.expect(")")
            return node
        if tok.kind != "name":
            raise self.error(f"unexpected {tok.text or 'end of input'!r}", tok)
        name = tok.text
        nxt = self.peek()
        if nxt.text == "[":
            self.next()
            i = self.shift_index()
            self.expect(",")
            j = self.shift_index()
            self.expect("]")
            if name not in self.fields:
                if self.declared:
                    raise self.error(f"undeclared field {name!r}", tok)
                self.fields.append(name)
            return FieldRef(name, i, j)
        if nxt.text == "(":
            self.next()
            idx = self.next()
            if idx.text not in ("l", "m"):
                raise self.error("function index must be 'l' or 'm'", idx)
            self.expect(")")
            if name not in self.funcs:
                if self.declared:
                    raise self.error(f"undeclared function {name!r}", tok)
                self.funcs[name] = (idx.text, None)
            decl_idx, parity = self.funcs[name]
            if decl_idx != idx.text:
                raise self.error(f"function {name!r} is declared with index {decl_idx!r}", idx)
            return FuncRef(name, idx.text, parity)
        if name in self.fields or name in self.funcs:
            raise self.error(f"{name!r} used without shift or index", tok)
        if name not in self.params:
            if self.declared:
                raise self.error(f"undeclared identifier {name!r}", tok)
            self.params.append(name)
        return Param(name)

    def shift_index(self) -> int:
        tok = self.next()
        if tok.kind != "int" or tok.text not in ("0", "1"):
            raise self.error(f"shift {tok.text!r} outside the unit quad {{0,1}}", tok)
        return int(tok.text)


def parse_system(text: str) -> QuadSystemSpec:
    """Parse a system description; raises :class:`DSLError` on bad input."""
    spec = _Parser(text).parse()
    spec.source = text
    if len(spec.equations) != spec.M:
        raise DSLError(f"{len(spec.equations)} equations for {spec.M} fields; systems must be square")
    for k, eq in enumerate(spec.equations):
        if len(vertices(eq)) < 2:
            raise DSLError(f"equation {k + 1} involves fewer than two vertices of the quad")
    return spec


def parse_expr(text: str) -> Expr:
    """Parse a single expression (names are inferred)."""
    p = _Parser(text)
    node = p.expr()
    tok = p.peek()
    if tok.kind != "eof":
        raise p.error(f"trailing input {tok.text!r}", tok)
    return node


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------

def pretty(e: Expr) -> str:
    """Fully parenthesized rendering that parses back to the same tree."""
    if isinstance(e, Const):
        return str(e.value)
    if isinstance(e, Param):
        return e.name
    if isinstance(e, FieldRef):
        return f"{e.name}[{e.i},{e.j}]"
    if isinstance(e, FuncRef):
        s = f"{e.name}({e.index})"
        return s + f"^((-1)^{e.parity})" if e.parity else s
    if isinstance(e, Neg):
        return f"(-{pretty(e.operand)})"
    if isinstance(e, Pow):
        exp = str(e.exp) if e.exp >= 0 else f"(-{-e.exp})"
        return f"({pretty(e.base)})^{exp}"
    if isinstance(e, BinOp):
        return f"({pretty(e.left)} {e.op} {pretty(e.right)})"
    raise TypeError(f"not an expression node: {e!r}")


def format_system(spec: QuadSystemSpec) -> str:
    lines = ["fields " + " ".join(spec.fields)]
    if spec.params:
        lines.append("params " + " ".join(spec.params))
    for name, (idx, parity) in spec.funcs.items():
        lines.append(f"funcs {name}({idx})" + (f"^((-1)^{parity})" if parity else ""))
    lines += [pretty(eq) + " = 0;" for eq in spec.equations]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Symbolic forms
# ---------------------------------------------------------------------------

def field_symbol(name: str, i: int, j: int) -> sympy.Symbol:
    return sympy.Symbol(f"{name}[{i},{j}]")


def func_symbol(ref: FuncRef) -> sympy.Symbol:
    s = f"{ref.name}({ref.index})"
    return sympy.Symbol(s + f"^((-1)^{ref.parity})" if ref.parity else s)


def to_sympy(e: Expr) -> sympy.Expr:
    if isinstance(e, Const):
        return sympy.Integer(e.value)
    if isinstance(e, Param):
        return sympy.Symbol(e.name)
    if isinstance(e, FieldRef):
        return field_symbol(e.name, e.i, e.j)
    if isinstance(e, FuncRef):
        return func_symbol(e)
    if isinstance(e, Neg):
        return -to_sympy(e.operand)
    if isinstance(e, Pow):
        return to_sympy(e.base) ** e.exp
    a, b = to_sympy(e.left), to_sympy(e.right)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    return a / b


@dataclass
class PolyForm:
    """Cleared form of an equation: ``expr == numerator / denominator``."""

    numerator: sympy.Poly
    denominator: sympy.Poly
    degrees: dict[sympy.Symbol, int]

    @property
    def gens(self) -> tuple[sympy.Symbol, ...]:
        return self.numerator.gens


def spec_symbols(spec: QuadSystemSpec) -> list[sympy.Symbol]:
    """Field symbols (corner-major within each component) then coefficient symbols."""
    syms = [field_symbol(f, i, j) for f in spec.fields for (i, j) in CORNERS]
    syms += [sympy.Symbol(p) for p in spec.params]
    syms += [func_symbol(r) for r in spec.func_refs()]
    return syms


def to_poly_form(eq: Expr, gens: list[sympy.Symbol] | None = None, *,
                 prime: int = 2_147_483_647, trials: int = 8,
                 rng: random.Random | None = None) -> PolyForm:
    """Combine ``eq`` into a single fraction and return its polynomial numerator.

    Raises :class:`ZeroDivisionError` when the cleared denominator vanishes at
    ``trials`` random points over GF(prime), i.e. is (almost surely) zero.
    """
    rng = rng or random.Random(0)
    s = to_sympy(eq)
    if s.has(sympy.zoo, sympy.nan):
        raise ZeroDivisionError("division by an identically zero expression")
    if gens is None:
        gens = sorted(s.free_symbols, key=str)
    num, den = sympy.fraction(sympy.together(s))
    num_p = sympy.Poly(sympy.expand(num), *gens, domain="QQ")
    den_p = sympy.Poly(sympy.expand(den), *gens, domain="QQ")
    for _ in range(trials):
        point = {g: rng.randrange(1, prime) for g in gens}
        if poly_eval_mod(den_p, point, prime) != 0:
            break
    else:
        raise ZeroDivisionError("denominator vanishes identically")
    degrees = {g: num_p.degree(g) for g in gens if num_p.degree(g) > 0}
    return PolyForm(num_p, den_p, degrees)


# ---------------------------------------------------------------------------
# Evaluation over GF(p)
# ---------------------------------------------------------------------------

def _mod_rational(c, p: int) -> int:
    c = sympy.Rational(c)
    den = int(c.q) % p
    if den == 0:
        raise ZeroDivisionError("coefficient denominator divisible by the prime")
    return int(c.p) * pow(den, -1, p) % p


def poly_eval_mod(poly: sympy.Poly, point: dict, p: int) -> int:
    vals = [point[g] % p for g in poly.gens]
    total = 0
    for monom, coeff in poly.terms():
        term = _mod_rational(coeff, p)
        for v, e in zip(vals, monom):
            if e:
                term = term * pow(v, e, p) % p
        total += term
    return total % p


def eval_mod(e: Expr, env: dict[Expr, int], p: int) -> int:
    """Evaluate an expression tree over GF(p); leaves are looked up in ``env``.

    Division by zero raises :class:`ZeroDivisionError`.
    """
    if isinstance(e, Const):
        return e.value % p
    if isinstance(e, (Param, FieldRef, FuncRef)):
        return env[e] % p
    if isinstance(e, Neg):
        return -eval_mod(e.operand, env, p) % p
    if isinstance(e, Pow):
        b = eval_mod(e.base, env, p)
        if e.exp < 0 and b == 0:
            raise ZeroDivisionError("negative power of zero")
        return pow(b, e.exp, p)
    a = eval_mod(e.left, env, p)
    b = eval_mod(e.right, env, p)
    if e.op == "+":
        return (a + b) % p
    if e.op == "-":
        return (a - b) % p
    if e.op == "*":
        return a * b % p
    if b == 0:
        raise ZeroDivisionError("division by zero")
    return a * pow(b, -1, p) % p


def leaves(spec: QuadSystemSpec) -> list[Expr]:
    """All distinct leaf nodes (fields, params, function refs) of a system."""
    out: dict[Expr, None] = {}
    for f in spec.fields:
        for (i, j) in CORNERS:
            out[FieldRef(f, i, j)] = None
    for p in spec.params:
        out[Param(p)] = None
    for r in spec.func_refs():
        out[r] = None
    return list(out)


def leaf_symbol(leaf: Expr) -> sympy.Symbol:
    return to_sympy(leaf)
