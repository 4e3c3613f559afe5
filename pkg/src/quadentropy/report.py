"""End-to-end analysis and the serializable report."""
from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

from . import catalog
from .expr import QuadSystemSpec, parse_system
from .growth import (DEFAULT_TOL, NoRationalFit, Unavailable, classify_isotropy, closed_form,
                     entropy_from_fit, fit_generating_function)
from .lattice import StaircaseSpec
from .poly import evolve_degrees, extract_sequences
from .solve import ALL_DIRECTIONS, DEFAULT_PRIME, Direction, admissibility_report, analyze_direction

SCHEMA = 1
TRIAL_STRIDE = 1_000_003


@dataclass
class Report:
    system: dict
    run: dict
    admissibility: dict
    directions: dict = field(default_factory=dict)
    isotropy: dict = field(default_factory=dict)
    compare: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    schema: int = SCHEMA

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "Report":
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls(**{k: d[k] for k in ("system", "run", "admissibility", "directions",
                                        "isotropy", "compare", "checks", "schema")})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "Report":
        return cls.from_dict(json.loads(text))

    @property
    def admissible(self) -> list[str]:
        return [d for d, r in self.admissibility.items() if r["status"] == "admissible"]

    @property
    def failed_checks(self) -> list[dict]:
        return [c for c in self.checks if not c["ok"]]


# ---------------------------------------------------------------------------

def _sequences_for(source: str, direction: str, steps: int, stair: tuple | None,
                   prime: int, seed: int, trials: int) -> list[dict]:
    """Per-trial extraction for one direction; top level so worker processes can run it."""
    spec = parse_system(source)
    d = Direction.parse(direction)
    res = analyze_direction(spec, d, prime=prime, seed=seed)
    if not res.admissible:
        raise ValueError(f"direction {d} is not admissible")
    st = StaircaseSpec(*stair) if stair else StaircaseSpec.fundamental(d, steps)
    out = []
    for t in range(trials):
        grid = evolve_degrees(res.update, st, direction=d, seed=seed + TRIAL_STRIDE * t,
                              prime=prime, trial=t)
        ss = extract_sequences(grid)
        out.append({"sequences": ss.sequences, "shift_equivalent": ss.shift_equivalent,
                    "classes": ss.classes})
    return out


def _growth_for(seq: list[int], tol: float) -> dict:
    out: dict = {}
    try:
        fit = fit_generating_function(seq)
    except NoRationalFit as exc:
        out["fit_error"] = str(exc)
        return out
    out["fit"] = fit.to_dict()
    out["fit_text"] = str(fit)
    ent = entropy_from_fit(fit, tol)
    out["entropy"] = ent.to_dict()
    try:
        qp = closed_form(fit)
        out["closed_form"] = qp.to_dict()
        out["closed_form_text"] = str(qp)
    except Unavailable as exc:
        out["closed_form_error"] = str(exc)
    return out


def system_identity(name: str | None, source: str, spec: QuadSystemSpec) -> dict:
    return {"name": name, "source": source,
            "hash": hashlib.sha256(source.encode()).hexdigest(),
            "fields": list(spec.fields), "params": list(spec.params),
            "funcs": sorted(spec.funcs), "M": spec.M}


def analyze(source: str, *, name: str | None = None, directions: list[Direction] | None = None,
            steps: int | None = None, staircase: StaircaseSpec | None = None,
            prime: int = DEFAULT_PRIME, seed: int = 0, trials: int = 3,
            tol: float = DEFAULT_TOL, jobs: int = 1) -> Report:
    """Parse, decide admissibility, evolve, fit, classify.  Raises DSLError on bad input."""
    spec = parse_system(source)
    entry = catalog.ENTRIES.get(name) if name else None
    if steps is None:
        steps = entry.steps if entry else 16
    adm = admissibility_report(spec, prime=prime, seed=seed)
    run = {"prime": prime, "seed": seed, "trials": trials, "steps": steps, "tol": tol,
           "staircase": [staircase.l1, staircase.l2, staircase.N] if staircase else None}
    report = Report(system_identity(name, source, spec), run,
                    {str(d): {"status": r.status, "rank": r.rank,
                              "unknown": list(d.unknown)} for d, r in adm.results.items()})
    admissible = [d for d in ALL_DIRECTIONS if adm.results[d].admissible]
    if staircase is not None:
        directions = [staircase.direction]
    todo = [d for d in (directions or admissible) if d in admissible]
    stair = (staircase.l1, staircase.l2, staircase.N) if staircase else None
    args = [(source, d.value, steps, stair, prime, seed, trials) for d in todo]
    if jobs > 1 and len(args) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_sequences_for, *zip(*args)))
    else:
        results = [_sequences_for(*a) for a in args]
    seqs = {}
    for d, per_trial in zip(todo, results):
        first = per_trial[0]
        agree = all(t["sequences"] == first["sequences"] for t in per_trial)
        block = {"sequences": first["sequences"], "shift_equivalent": first["shift_equivalent"],
                 "trials_agree": agree, "growth": {}}
        if not first["shift_equivalent"]:
            block["classes"] = first["classes"]
        for f, seq in first["sequences"].items():
            block["growth"][f] = _growth_for(seq, tol)
        report.directions[str(d)] = block
        seqs[str(d)] = first["sequences"]
    if todo:
        iso = classify_isotropy(seqs, list(spec.fields))
        report.isotropy = {"class": iso.cls, "sigma": (
            {f"{a}|{b}": s for (a, b), s in iso.sigma.items()} if iso.sigma else None)}
    if entry is not None:
        report.compare = _comparisons(entry, report, prime, seed)
        report.checks = check_expectations(entry, report)
    return report


def _comparisons(entry: catalog.CatalogEntry, report: Report, prime: int, seed: int) -> list:
    out = []
    for other, lf, rf, dtext, kmin, kmax in entry.comparisons:
        d = Direction.parse(dtext)
        if str(d) not in report.directions:
            continue
        rhs = report.directions[str(d)]["sequences"][rf]
        if other is None:
            lhs = report.directions[str(d)]["sequences"][lf]
            lname = entry.name
        else:
            oe = catalog.get(other)
            lhs = _sequences_for(oe.source, d.value, max(kmax, 1), None, prime, seed, 1)[0]["sequences"][lf]
            lname = other
        n = min(len(lhs), len(rhs))
        ks = [k for k in range(kmin, kmax + 1) if k < n]
        holds = len(ks) == kmax - kmin + 1 and all(lhs[k] < rhs[k] for k in ks)
        out.append({"lhs": f"{lname}:{lf}", "rhs": f"{entry.name}:{rf}", "direction": str(d),
                    "k_range": [kmin, kmax], "lhs_values": lhs[kmin:kmax + 1],
                    "rhs_values": rhs[kmin:kmax + 1], "holds": holds})
    return out


def _check(name: str, expected, observed) -> dict:
    return {"name": name, "expected": expected, "observed": observed, "ok": expected == observed}


def check_expectations(entry: catalog.CatalogEntry, report: Report) -> list[dict]:
    """Compare a report against the published data embedded in the catalog."""
    checks = []
    if entry.admissible is not None:
        exp = sorted(str(Direction.parse(d)) for d in entry.admissible)
        checks.append(_check("admissible", exp, sorted(report.admissible)))
    for dtext, per_field in entry.sequences.items():
        d = str(Direction.parse(dtext))
        block = report.directions.get(d)
        for f, exp in per_field.items():
            obs = block["sequences"][f][:len(exp)] if block else None
            checks.append(_check(f"sequence {d} {f}", list(exp), obs))
    for dtext, per_field in entry.fits.items():
        d = str(Direction.parse(dtext))
        block = report.directions.get(d)
        for f, (P, Q) in per_field.items():
            g = block["growth"][f] if block else {}
            obs = [g["fit"]["P"], g["fit"]["Q"]] if "fit" in g else None
            checks.append(_check(f"fit {d} {f}", [list(P), list(Q)], obs))
    for dtext, per_field in entry.closed_forms.items():
        d = str(Direction.parse(dtext))
        block = report.directions.get(d)
        for f, coeffs in per_field.items():
            g = block["growth"][f] if block else {}
            cf = g.get("closed_form")
            obs = cf["coeffs"][0] if cf and cf["period"] == 1 else (cf and cf["coeffs"])
            checks.append(_check(f"closed form {d} {f}", list(coeffs), obs))
    for dtext, cls in entry.growth.items():
        d = str(Direction.parse(dtext))
        block = report.directions.get(d)
        obs = None
        if block:
            names = {g.get("entropy", {}).get("growth") for g in block["growth"].values()}
            obs = names.pop() if len(names) == 1 else sorted(n or "" for n in names)
        checks.append(_check(f"growth {d}", cls, obs))
    if entry.isotropy is not None:
        checks.append(_check("isotropy", entry.isotropy, report.isotropy.get("class")))
    for c in report.compare:
        checks.append(_check(f"compare {c['lhs']} < {c['rhs']} {c['direction']}", True, c["holds"]))
    return checks


# ---------------------------------------------------------------------------

def format_text(report: Report) -> str:
    lines = []
    sysd = report.system
    lines.append(f"system: {sysd['name'] or '<file>'}  M={sysd['M']}  fields={' '.join(sysd['fields'])}")
    lines.append(f"sha256: {sysd['hash']}")
    run = report.run
    lines.append(f"prime={run['prime']} seed={run['seed']} trials={run['trials']} steps={run['steps']}")
    lines.append("admissibility:")
    for d, r in report.admissibility.items():
        lines.append(f"  {d} unknown x[{r['unknown'][0]},{r['unknown'][1]}]: {r['status']} (rank {r['rank']})")
    for d, block in report.directions.items():
        lines.append(f"direction {d}:" + ("" if block["trials_agree"] else "  (trials disagree)"))
        for f, seq in block["sequences"].items():
            lines.append(f"  {f}: {', '.join(map(str, seq))}")
            g = block["growth"][f]
            if "fit" in g:
                e = g["entropy"]
                lines.append(f"     g(s) = {g['fit_text']}   S = {e['S']:.6g}   growth: {e['growth']}")
                if "closed_form_text" in g:
                    lines.append(f"     {g['closed_form_text']}")
            else:
                lines.append(f"     no rational fit: {g['fit_error']}")
        if not block["shift_equivalent"]:
            lines.append(f"  {len(block.get('classes', []))} non-shift-equivalent m-sequence classes")
    if report.isotropy:
        iso = report.isotropy
        sig = ""
        if iso.get("sigma"):
            sig = "  " + "; ".join(f"{k}: " + ",".join(f"{a}->{b}" for a, b in v.items())
                                  for k, v in iso["sigma"].items())
        lines.append(f"isotropy: {iso['class']}{sig}")
    for c in report.compare:
        lines.append(f"compare {c['lhs']} < {c['rhs']} in {c['direction']} for k in "
                     f"[{c['k_range'][0]},{c['k_range'][1]}]: {'holds' if c['holds'] else 'FAILS'}")
    if report.checks:
        bad = report.failed_checks
        lines.append(f"published data: {len(report.checks) - len(bad)}/{len(report.checks)} checks agree")
        for c in bad:
            lines.append(f"  mismatch {c['name']}: expected {c['expected']} observed {c['observed']}")
    return "\n".join(lines) + "\n"


def format_csv(report: Report) -> str:
    rows = ["direction,component,k,degree"]
    for d, block in report.directions.items():
        for f, seq in block["sequences"].items():
            sign = Direction.parse(d).value
            rows.extend(f"{sign},{f},{k},{v}" for k, v in enumerate(seq))
    return "\n".join(rows) + "\n"
