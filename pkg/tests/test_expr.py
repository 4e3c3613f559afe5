import random

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from quadentropy import catalog
from quadentropy.expr import (BinOp, Const, DSLError, FieldRef, FuncRef, Neg, Param, Pow,
                              eval_mod, format_system, leaf_symbol, leaves, parse_expr,
                              parse_system, poly_eval_mod, pretty, to_poly_form)

P = 2_147_483_647


def test_parse_coupled_system():
    spec = parse_system(catalog.get("coupled-lpkdv").source)
    assert spec.fields == ["x", "y"]
    assert spec.params == ["a", "b"]
    assert spec.M == 2
    assert len(spec.equations) == 2


def test_parse_inferred_names():
    spec = parse_system("x[1,1] - x[0,0] = 0")
    assert spec.fields == ["x"]
    assert spec.M == 1
    assert spec.equations[0] == BinOp("-", FieldRef("x", 1, 1), FieldRef("x", 0, 0))


def test_parse_funcs_with_parity():
    spec = parse_system(catalog.get("lsg2").source)
    assert spec.funcs["lam3"] == ("l", "m")
    assert spec.funcs["mu1"] == ("m", None)
    refs = set(spec.func_refs())
    assert FuncRef("lam3", "l", "m") in refs


def test_comments_and_equals_form():
    src = "# a comment\nfields u\nu[1,0] = u[0,1] # trailing\n"
    spec = parse_system(src)
    assert spec.equations[0] == BinOp("-", FieldRef("u", 1, 0), FieldRef("u", 0, 1))


def test_format_system_reparses():
    for name in ("coupled-lpkdv", "lsg2", "boussinesq"):
        spec = parse_system(catalog.get(name).source)
        again = parse_system(format_system(spec))
        assert again.fields == spec.fields
        assert again.equations == spec.equations


@pytest.mark.parametrize("src, line, col", [
    ("fields x\nx[2,0] - x[0,0] = 0", 2, 3),
    ("fields x\nx[1,1] - x[0,0] +* 3 = 0", 2, 18),
])
def test_error_positions(src, line, col):
    with pytest.raises(DSLError) as ei:
        parse_system(src)
    assert ei.value.line == line
    assert ei.value.col == col


@pytest.mark.parametrize("src", [
    "fields x\nparams a\nx[1,1] - b*x[0,0] = 0",     # undeclared param
    "fields x\nx[1,1] - y[0,0] = 0",                 # undeclared field
    "fields x y\nx[1,1] - x[0,0] = 0",               # too few equations
    "fields x\nx[1,1] - 3 = 0",                      # single vertex
    "fields x\nx[1,-1] - x[0,0] = 0",                # shift outside the quad
    "fields x\nx[1,1] - x[0,0",                      # unbalanced
])
def test_rejects(src):
    with pytest.raises(DSLError):
        parse_system(src)


def test_error_message_has_location():
    with pytest.raises(DSLError, match=r"line 2, column \d+"):
        parse_system("fields x\nx[1,1] $ x[0,0] = 0")


# --- pretty printing round trip -------------------------------------------

_leaf = st.one_of(
    st.integers(0, 50).map(Const),
    st.sampled_from(["a", "b", "p"]).map(Param),
    st.tuples(st.sampled_from(["x", "y"]), st.integers(0, 1), st.integers(0, 1)).map(
        lambda t: FieldRef(*t)),
    st.sampled_from([FuncRef("f", "l"), FuncRef("g", "m", "l")]),
)


def _extend(children):
    return st.one_of(
        st.tuples(st.sampled_from("+-*/"), children, children).map(lambda t: BinOp(*t)),
        children.map(Neg),
        st.tuples(children, st.integers(-3, 4)).map(lambda t: Pow(*t)),
    )


exprs = st.recursive(_leaf, _extend, max_leaves=12)


@given(exprs)
@settings(max_examples=200, deadline=None)
def test_pretty_round_trip(e):
    assert parse_expr(pretty(e)) == e


# --- polynomial form --------------------------------------------------------

def _env(spec, rng):
    return {leaf: rng.randrange(1, P) for leaf in leaves(spec)}


@pytest.mark.parametrize("name", sorted(catalog.ENTRIES))
def test_poly_form_agrees_with_tree(name):
    spec = parse_system(catalog.get(name).source)
    rng = random.Random(11)
    for eq in spec.equations:
        pf = to_poly_form(eq)
        hits = 0
        for _ in range(100):
            env = _env(spec, rng)
            point = {leaf_symbol(k): v for k, v in env.items()}
            den = poly_eval_mod(pf.denominator, point, P)
            try:
                direct = eval_mod(eq, env, P)
            except ZeroDivisionError:
                continue
            assert den != 0
            assert poly_eval_mod(pf.numerator, point, P) == direct * den % P
            hits += 1
        assert hits >= 95


def _degree_by_differences(values, p):
    """Degree of a polynomial from its values at 0..n-1 via finite differences."""
    d = list(values)
    for k in range(len(values)):
        if all(v % p == 0 for v in d):
            return k - 1
        d = [(d[i + 1] - d[i]) % p for i in range(len(d) - 1)]
    return None


@pytest.mark.parametrize("name", ["coupled-lpkdv", "lattice-nls", "boussinesq", "toy-algebraic"])
def test_poly_form_degrees(name):
    spec = parse_system(catalog.get(name).source)
    rng = random.Random(5)
    for eq in spec.equations:
        pf = to_poly_form(eq)
        for sym, deg in pf.degrees.items():
            leaf = next(k for k in leaves(spec) if leaf_symbol(k) == sym)
            env = _env(spec, rng)
            point = {leaf_symbol(k): v for k, v in env.items()}
            vals = []
            for t in range(deg + 4):
                point[sym] = t
                vals.append(poly_eval_mod(pf.numerator, point, P))
            assert _degree_by_differences(vals, P) == deg, (leaf, deg)


def test_poly_form_simple_quotient():
    pf = to_poly_form(parse_expr("A*x[0,1]/x[0,0] - B"))
    syms = {str(s): s for s in pf.numerator.gens}
    num = pf.numerator.as_expr()
    den = pf.denominator.as_expr()
    assert sympy.simplify(num / den - (syms["A"] * leaf_symbol(FieldRef("x", 0, 1))
                                       / leaf_symbol(FieldRef("x", 0, 0)) - syms["B"])) == 0
    assert pf.numerator.total_degree() == 2
    assert set(pf.degrees.values()) == {1}


def test_poly_form_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        to_poly_form(parse_expr("x[0,0]/(x[1,1]-x[1,1]+p-p)"))
