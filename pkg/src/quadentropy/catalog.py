"""Built-in systems with their published degree data."""
from __future__ import annotations

from dataclasses import dataclass, field

from .expr import QuadSystemSpec, parse_system


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    source: str
    description: str
    admissible: tuple[str, ...] | None = None
    # direction -> field -> published sequence prefix
    sequences: dict = field(default_factory=dict)
    # direction -> field -> (P, Q) integer coefficients, ascending, Q(0) = 1
    fits: dict = field(default_factory=dict)
    # direction -> field -> closed-form polynomial coefficients (ascending, as strings)
    closed_forms: dict = field(default_factory=dict)
    isotropy: str | None = None
    growth: dict = field(default_factory=dict)  # direction -> growth class name
    steps: int = 16
    # (lhs system or None for self, lhs field, rhs field, direction, k_min, k_max):
    # d_k(lhs) < d_k(rhs of this system) for k_min <= k <= k_max
    comparisons: tuple = ()

    def spec(self) -> QuadSystemSpec:
        return parse_system(self.source)


_CUBIC = [1, -3, 3, -1]                      # (1-s)^3
_CUBIC_TIMES_1PS = [1, -2, 0, 2, -1]         # (1-s)^3 (1+s)
_BOUSQ_DEN = [1, -1, 0, -2, 2, 0, 1, -1]     # (1-s)^3 (1+s+s^2)^2

_LPKDV = [1, 2, 4, 7, 11, 16, 22, 29, 37]
_NLS = [1, 3, 7, 13, 21, 31, 43, 57, 73]
_LSG2 = [1, 4, 10, 19, 31, 46, 64, 85, 109]
_LMKDV2_X = [1, 4, 8, 15, 23, 34, 46, 61, 77]
_LMKDV2_Y = [1, 2, 6, 11, 19, 28, 40, 53, 69]
_SCHW_X = [1, 4, 8, 12, 23, 34, 43, 62, 80, 94, 121, 146, 165, 200, 232, 256]
_SCHW_Y = [1, 2, 7, 12, 19, 32, 43, 56, 77, 94, 113, 142, 165, 190, 227, 256]

ENTRIES: dict[str, CatalogEntry] = {}

# The commonly printed form has "-" where the integrable system has "+" in
# the second equation; with "-" the degrees grow like 2^k - 1.
_NLS_SRC = """\
fields x y
params a b
x[1,0] - x[0,1] - (a-b)/(1+x[0,0]*y[1,1])*x[0,0] = 0;
y[1,0] - y[0,1] SIGN (a-b)/(1+x[0,0]*y[1,1])*y[1,1] = 0;
"""


def _add(e: CatalogEntry) -> None:
    ENTRIES[e.name] = e


_add(CatalogEntry(
    name="coupled-lpkdv",
    description="Coupled lattice potential KdV system",
    source="""\
fields x y
params a b
(x[0,0]-x[1,1])*(y[1,0]-y[0,1]) - a + b = 0;
(y[0,0]-y[1,1])*(x[1,0]-x[0,1]) - a + b = 0;
""",
    admissible=("++", "+-", "-+", "--"),
    sequences={d: {"x": _LPKDV, "y": _LPKDV} for d in ("++", "+-", "-+", "--")},
    fits={d: {"x": ([1, -1, 1], _CUBIC), "y": ([1, -1, 1], _CUBIC)}
          for d in ("++", "+-", "-+", "--")},
    closed_forms={d: {"x": ["1", "1/2", "1/2"], "y": ["1", "1/2", "1/2"]}
                  for d in ("++", "+-", "-+", "--")},
    isotropy="strongly isotropic",
    growth={d: "quadratic" for d in ("++", "+-", "-+", "--")},
))

_add(CatalogEntry(
    name="lattice-nls",
    description="Lattice NLS system",
    source=_NLS_SRC.replace("SIGN", "+"),
    admissible=("++", "--"),
    sequences={d: {"x": _NLS, "y": _NLS} for d in ("++", "--")},
    fits={d: {"x": ([1, 0, 1], _CUBIC), "y": ([1, 0, 1], _CUBIC)} for d in ("++", "--")},
    closed_forms={d: {"x": ["1", "1", "1"], "y": ["1", "1", "1"]} for d in ("++", "--")},
    isotropy="strongly isotropic",
    growth={d: "quadratic" for d in ("++", "--")},
))

_add(CatalogEntry(
    name="lattice-nls-printed",
    description="Lattice NLS with the sign of the second equation flipped (non-integrable)",
    source=_NLS_SRC.replace("SIGN", "-"),
    admissible=("++", "--"),
    growth={d: "exponential" for d in ("++", "--")},
    steps=10,
))

_LSG2_SRC = """\
fields x y
funcs lam1(l) lam2(l) mu1(m) mu2(m)
funcs lam3(l)^((-1)^m)
funcs mu3(m)^((-1)^l)
lam3(l)/mu3(m)*x[0,1]/x[0,0] + lam1(l)*mu1(m)*x[1,1]*y[0,1]
    = mu3(m)/lam3(l)*x[1,1]/x[1,0] + lam2(l)*mu2(m)/(x[0,0]*y[1,0]);
mu3(m)/lam3(l)*y[1,1]/y[0,1] + lam2(l)*mu2(m)/(x[0,1]*y[0,0])
    = lam3(l)/mu3(m)*y[1,0]/y[0,0] + lam1(l)*mu1(m)*x[1,0]*y[1,1];
"""

_add(CatalogEntry(
    name="lsg2",
    description="lSG2 system (non-autonomous, arbitrary functions)",
    source=_LSG2_SRC,
    admissible=("+-", "-+"),
    sequences={d: {"x": _LSG2, "y": _LSG2} for d in ("+-", "-+")},
    fits={d: {"x": ([1, 1, 1], _CUBIC), "y": ([1, 1, 1], _CUBIC)} for d in ("+-", "-+")},
    closed_forms={d: {"x": ["1", "3/2", "3/2"], "y": ["1", "3/2", "3/2"]} for d in ("+-", "-+")},
    isotropy="strongly isotropic",
    growth={d: "quadratic" for d in ("+-", "-+")},
    comparisons=(("scalar-lsg", "x", "x", "-+", 1, 12), ("scalar-lsg", "x", "y", "-+", 1, 12)),
))

_LMKDV2_SRC = """\
fields x y
funcs lam1(l) lam2(l) mu1(m) mu2(m)
funcs lam3(l)^((-1)^m)
funcs mu3(m)^((-1)^l)
lam1(l)/mu3(m)*x[1,1]/x[0,1] + mu2(m)/lam3(l)*y[0,0]/y[0,1]
    = lam2(l)*mu3(m)*y[0,0]/y[1,0] + lam3(l)*mu1(m)*x[1,1]/x[1,0];
lam3(l)*mu1(m)*x[0,1]*y[1,1] + lam2(l)*mu3(m)*x[0,0]*y[0,1]
    = mu2(m)/lam3(l)*x[0,0]*y[1,0] + lam1(l)/mu3(m)*x[1,0]*y[1,1];
"""

_add(CatalogEntry(
    name="lmkdv2",
    description="lmKdV2 system (non-autonomous, arbitrary functions)",
    source=_LMKDV2_SRC,
    admissible=("+-", "-+"),
    sequences={"-+": {"x": _LMKDV2_X, "y": _LMKDV2_Y}, "+-": {"x": _LMKDV2_Y, "y": _LMKDV2_X}},
    fits={"-+": {"x": ([1, 2, 0, 1], _CUBIC_TIMES_1PS), "y": ([1, 0, 2, 1], _CUBIC_TIMES_1PS)},
          "+-": {"x": ([1, 0, 2, 1], _CUBIC_TIMES_1PS), "y": ([1, 2, 0, 1], _CUBIC_TIMES_1PS)}},
    isotropy="permutationally isotropic",
    growth={d: "quadratic" for d in ("+-", "-+")},
    comparisons=(("scalar-lmkdv", "x", "y", "-+", 2, 12), (None, "y", "x", "-+", 2, 12)),
))

_add(CatalogEntry(
    name="boussinesq",
    description="Boussinesq system (two edge equations and one quad equation)",
    source="""\
fields x y z
params p q
z[1,0] - x[0,0]*x[1,0] + y[0,0] = 0;
z[0,1] - x[0,0]*x[0,1] + y[0,0] = 0;
(x[0,1]-x[1,0])*(z[0,0]-x[0,0]*x[1,1]+y[1,1]) - p + q = 0;
""",
    admissible=("+-",),
    sequences={"+-": {
        "x": [1, 2, 4, 7, 14, 21, 30, 43, 55, 70, 89, 106, 127, 152, 174, 201, 232],
        "y": [1, 2, 4, 9, 14, 21, 32, 43, 55, 72, 89, 106, 129, 152, 174, 203, 232],
        "z": [1, 3, 5, 8, 15, 22, 32, 44, 56, 73, 90, 107, 131, 153, 175, 206, 233]}},
    fits={"+-": {
        "x": ([1, 1, 2, 1, 5, 3, 4], _BOUSQ_DEN),
        "y": ([1, 1, 2, 3, 3, 3, 2, 2], _BOUSQ_DEN),
        "z": ([1, 2, 2, 1, 3, 3, 5], _BOUSQ_DEN)}},
    isotropy="not-applicable",
    growth={"+-": "quadratic"},
    steps=28,
))

_SCHW_C = "x[0,0]*y[1,1]*(y[1,0]-y[0,1]) = y[0,0]*(p*x[1,0]*y[0,1]-q*x[0,1]*y[1,0]);"

_add(CatalogEntry(
    name="schwarzian-boussinesq",
    description="Schwarzian Boussinesq system",
    source=f"""\
fields x y z
params p q
x[1,0]*y[0,0] = z[1,0] - z[0,0];
x[0,1]*y[0,0] = z[0,1] - z[0,0];
{_SCHW_C}
""",
    admissible=("+-",),
    sequences={"+-": {"x": _SCHW_X, "y": _SCHW_Y, "z": _SCHW_Y}},
    fits={"+-": {
        "x": ([1, 3, 4, 2, 5, 3, 2], _BOUSQ_DEN),
        "y": ([1, 1, 5, 3, 5, 3, 2], _BOUSQ_DEN),
        "z": ([1, 1, 5, 3, 5, 3, 2], _BOUSQ_DEN)}},
    isotropy="not-applicable",
    growth={"+-": "quadratic"},
    steps=28,
))

# In the second equation the y shifts must be crossed with the x shifts;
# pairing x[0,1] with y[0,1] gives exponential growth in two directions and
# breaks the other two.
_MBSQ_SRC = """\
fields x y
params p q
x[1,1]*(p*y[1,0]-q*y[0,1]) = y[0,0]*(p*x[0,1]-q*x[1,0]);
x[0,0]*y[1,1]*(p*y[1,0]-q*y[0,1]) = y[0,0]*({rhs});
"""

_add(CatalogEntry(
    name="mod-boussinesq",
    description="Modified Boussinesq system",
    source=_MBSQ_SRC.format(rhs="p*x[0,1]*y[1,0]-q*x[1,0]*y[0,1]"),
    admissible=("++", "+-", "-+", "--"),
    sequences={"+-": {"x": _SCHW_X, "y": _SCHW_Y}},
    fits={"+-": {
        # (s^2+1)(s^4+2s^3+3s^2+s+1) and s^6+2s^5+4s^4+2s^3+4s^2+2s+1
        "x": ([1, 1, 4, 3, 4, 2, 1], _BOUSQ_DEN),
        "y": ([1, 2, 4, 2, 4, 2, 1], _BOUSQ_DEN)}},
    isotropy="permutationally isotropic",
    growth={d: "quadratic" for d in ("++", "+-", "-+", "--")},
    steps=28,
))

_add(CatalogEntry(
    name="mod-boussinesq-printed",
    description="Modified Boussinesq as commonly printed (y shifts paired with x shifts)",
    source=_MBSQ_SRC.format(rhs="p*x[0,1]*y[0,1]-q*x[1,0]*y[1,0]"),
    admissible=("+-", "-+"),
    steps=8,
))

_add(CatalogEntry(
    name="aug-schwarzian-boussinesq",
    description="Augmented Schwarzian Boussinesq system",
    source=f"""\
fields x y z
params p q
x[1,1]*y[0,1] = z[1,1] - z[0,1];
x[1,1]*y[1,0] = z[1,1] - z[1,0];
{_SCHW_C}
""",
    admissible=("++", "-+", "--"),
    growth={"-+": "quadratic", "++": "linear", "--": "linear"},
    steps=28,
))

_add(CatalogEntry(
    name="toy-algebraic",
    description="Two-component multilinear system with one rational and one algebraic branch",
    source="""\
fields x y
x[0,0]*y[0,0]*y[0,1]*x[1,1] - x[0,1]*y[1,1]*y[1,0]*x[1,0] = 0;
x[0,0]*y[0,1] + y[1,1]*x[1,0] + y[0,0]*x[0,1] + x[1,1]*y[1,0] = 0;
""",
    steps=7,
))

_add(CatalogEntry(
    name="scalar-h1",
    description="Lattice potential KdV (H1) equation",
    source="""\
fields x
params a b
(x[0,0]-x[1,1])*(x[1,0]-x[0,1]) - a + b = 0;
""",
    admissible=("++", "+-", "-+", "--"),
    sequences={d: {"x": _LPKDV} for d in ("++", "+-", "-+", "--")},
    isotropy="strongly isotropic",
))

_add(CatalogEntry(
    name="scalar-lsg",
    description="Lattice sine-Gordon equation",
    source="""\
fields x
params p r
x[0,0]*x[1,0]*x[0,1]*x[1,1] = p*(x[0,0]*x[1,1] - x[1,0]*x[0,1]) + r;
""",
    admissible=("++", "+-", "-+", "--"),
    sequences={d: {"x": _NLS} for d in ("++", "+-", "-+", "--")},
    isotropy="strongly isotropic",
))

_add(CatalogEntry(
    name="scalar-lmkdv",
    description="Lattice modified KdV equation",
    source="""\
fields x
params p r
x[1,1]*(p*x[0,1] - r*x[1,0]) = x[0,0]*(p*x[1,0] - r*x[0,1]);
""",
    admissible=("++", "+-", "-+", "--"),
    sequences={d: {"x": _LPKDV} for d in ("++", "+-", "-+", "--")},
    isotropy="strongly isotropic",
))


def get(name: str) -> CatalogEntry:
    try:
        return ENTRIES[name]
    except KeyError:
        raise KeyError(f"unknown catalog system {name!r}; known: {', '.join(ENTRIES)}") from None
