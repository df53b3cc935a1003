"""Scenario loading and the four report-producing runners.

A scenario is a JSON object with a `kind` selecting one of the built-in
setups (sphere, plane rotation, a one-dimensional toy, the complex
two-torus operator, or the matrix-model suites).  Runners turn a loaded
scenario into a report: an ordered list of check records plus totals.
Records carry a wall-clock runtime for console display, but it is
stripped from the serialized report so that identical scenarios produce
byte-identical JSON, up to the single timestamp field.
"""
from __future__ import annotations

import hashlib
import json
import math
import random
import time
from datetime import datetime, timezone
from fractions import Fraction
from typing import Callable, Mapping, Optional

from . import scalars as sc
from .actions import ActionSpec, check_sigma_parallel, kahler_Q, tautological_Q, verify_brst
from .adhm import (
    adhm_Q_full,
    adhm_Q_unconstrained,
    adhm_action_spec,
    adhm_constraint_scalars,
    adhm_fixed_points,
    adhm_lifted_field,
    adhm_super_chart,
    cartan_params,
    multiplier_completion,
)
from .errors import (
    AssumptionViolated,
    NotQClosed,
    OddDimension,
    SchemaError,
)
from .geometry import (
    PLANE_ROTATION,
    annulus_domain,
    closed_polynomial,
    flat_box_domain,
    gaussian_oracle_patch,
    gaussian_rotation_form,
    height_exponential,
    plane_fixed_point,
    sphere_atlas,
    sphere_fixed_points,
    sphere_oracle_patch,
)
from .grassmann import (
    SuperChart,
    SuperFunction,
    add_fields,
    field_is_zero,
    graded_commutator,
    parse_super,
    scale_field,
)
from .linalg import identity
from .localize import classical_localize, find_fixed_points, super_localize
from .oracle import OraclePatch, global_berezin, super_stokes_check


KINDS = ("sphere", "plane_rotation", "line_dilation", "kahler_torus", "adhm")

_CATALOG = {
    "sphere": {
        "localize": ("super_localize", "classical_localize"),
        "oracle": ("global_berezin",),
        "compare": ("compare", "super_vs_reference", "oracle_vs_reference"),
        "brst-check": ("verify_brst", "sigma_parallel"),
    },
    "plane_rotation": {
        "localize": ("super_localize", "classical_localize"),
        "oracle": ("global_berezin", "super_stokes"),
        "compare": ("compare", "super_vs_reference", "oracle_vs_reference"),
        "brst-check": ("verify_brst", "sigma_parallel"),
    },
    "line_dilation": {
        "localize": ("super_localize",),
        "oracle": (),
        "compare": (),
        "brst-check": (),
    },
    "kahler_torus": {
        "localize": (),
        "oracle": (),
        "compare": (),
        "brst-check": ("verify_brst",),
    },
    "adhm": {
        "localize": (),
        "oracle": (),
        "compare": (),
        "brst-check": (
            "closure_unconstrained",
            "closure_full",
            "verify_brst_unconstrained",
            "sigma_identity",
            "multiplier_real_sector",
            "multiplier_complex_sector",
            "fixed_points",
        ),
    },
}

_REFERENCES: Mapping[str, Callable[[float], float]] = {
    "height_closed_form": lambda t: 2 * math.pi * (math.exp(t) - math.exp(-t)) / t,
    "gaussian_closed_form": lambda t: -2 * math.pi / t,
}

_STOKES_DOMAINS = {"flat_box": flat_box_domain, "annulus": annulus_domain}


# ---------------------------------------------------------------------------
# scenario loading


def load_scenario(path) -> dict:
    """Read, validate, and annotate a scenario file.

    The returned dict carries the parsed content plus `_hash`, the hex
    digest of the raw bytes, used to tie reports to their inputs.
    """
    try:
        if hasattr(path, "read_bytes"):
            raw = path.read_bytes()
        else:
            with open(path, "rb") as fh:
                raw = fh.read()
    except OSError as exc:
        raise SchemaError("cannot read scenario: %s" % (exc,))
    try:
        scenario = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError("scenario is not valid JSON: %s" % (exc,))
    if not isinstance(scenario, dict):
        raise SchemaError("scenario must be a JSON object")
    _validate(scenario)
    scenario["_hash"] = hashlib.sha256(raw).hexdigest()
    return scenario


def _require(scenario: dict, key: str, types) -> object:
    if key not in scenario:
        raise SchemaError("scenario lacks required key %r" % (key,))
    value = scenario[key]
    if not isinstance(value, types):
        raise SchemaError("scenario key %r has the wrong type" % (key,))
    return value


def _validate(scenario: dict) -> None:
    _require(scenario, "name", str)
    kind = _require(scenario, "kind", str)
    if kind not in KINDS:
        raise SchemaError("unknown scenario kind %r" % (kind,))
    if "tol" in scenario and not isinstance(scenario["tol"], (int, float)):
        raise SchemaError("tol must be a number")
    checks = scenario.get("checks")
    if checks is not None:
        if not isinstance(checks, list) or not all(isinstance(c, str) for c in checks):
            raise SchemaError("checks must be a list of names")
        allowed = set()
        for names in _CATALOG[kind].values():
            allowed |= set(names)
        for c in checks:
            if c not in allowed:
                raise SchemaError("check %r is not available for kind %r" % (c, kind))
    if kind in ("sphere", "plane_rotation", "line_dilation"):
        form = _require(scenario, "form", dict)
        ftype = form.get("type")
        if kind == "sphere" and ftype not in ("height_exponential", "closed_polynomial"):
            raise SchemaError("unsupported sphere form %r" % (ftype,))
        if ftype == "closed_polynomial":
            coeffs = form.get("coeffs")
            if not isinstance(coeffs, list) or not coeffs:
                raise SchemaError("closed_polynomial needs a coefficient list")
            for c in coeffs:
                _as_fraction(c)
        if kind == "plane_rotation" and ftype != "gaussian_rotation":
            raise SchemaError("unsupported plane form %r" % (ftype,))
        if kind == "line_dilation":
            if ftype != "expression" or not isinstance(form.get("text"), str):
                raise SchemaError("line scenarios need an expression form")
        values = _require(scenario, "values", list)
        if not values:
            raise SchemaError("values must be non-empty")
        for v in values:
            _as_fraction(v)
        if "reference" in scenario and scenario["reference"] not in _REFERENCES:
            raise SchemaError("unknown reference %r" % (scenario["reference"],))
        for entry in scenario.get("stokes", []):
            if not isinstance(entry, dict):
                raise SchemaError("stokes entries must be objects")
            domain = entry.get("domain")
            if domain not in _STOKES_DOMAINS:
                raise SchemaError("unknown boundary domain %r" % (domain,))
            text = entry.get("form")
            if not isinstance(text, str):
                raise SchemaError("stokes entry lacks a form text")
            try:
                parse_super(_STOKES_DOMAINS[domain]().chart, text)
            except Exception as exc:
                raise SchemaError("stokes form does not parse: %s" % (exc,))
    if kind == "adhm":
        k = _require(scenario, "k", int)
        N = _require(scenario, "N", int)
        if k < 1 or N < 2:
            raise SchemaError("need k >= 1 and N >= 2")
        mode = scenario.get("mode", "symbolic" if k == 1 else "numeric")
        if mode not in ("symbolic", "numeric"):
            raise SchemaError("mode must be symbolic or numeric")
        scenario["mode"] = mode


def _as_fraction(text) -> Fraction:
    try:
        return Fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise SchemaError("bad exact number %r: %s" % (text, exc))


# ---------------------------------------------------------------------------
# report plumbing


def _record(name, status, lhs=None, rhs=None, abs_error=None, rel_error=None,
            detail=None, runtime=0.0) -> dict:
    rec = {
        "name": name,
        "status": status,
        "lhs": lhs,
        "rhs": rhs,
        "abs_error": abs_error,
        "rel_error": rel_error,
    }
    if detail is not None:
        rec["detail"] = detail
    rec["runtime"] = runtime
    return rec


def _wanted(scenario: dict, base: str) -> bool:
    checks = scenario.get("checks")
    return checks is None or base in checks


def _report(scenario: dict, command: str, tol: float, checks: list) -> dict:
    totals = {"pass": 0, "fail": 0, "skipped": 0}
    for rec in checks:
        if rec["status"] == "pass":
            totals["pass"] += 1
        elif rec["status"] == "fail":
            totals["fail"] += 1
        else:
            totals["skipped"] += 1
    return {
        "scenario": scenario["name"],
        "command": command,
        "scenario_hash": scenario["_hash"],
        "tol": tol,
        "checks": checks,
        "totals": totals,
    }


def report_exit_code(report: dict) -> int:
    return 0 if report["totals"]["fail"] == 0 else 1


def serialize_report(report: dict, timestamp: Optional[str] = None) -> str:
    """Stable JSON text; runtimes are dropped, the timestamp comes last."""
    clean = dict(report)
    clean["checks"] = [
        {k: v for k, v in rec.items() if k != "runtime"} for rec in report["checks"]
    ]
    clean["timestamp"] = timestamp or datetime.now(timezone.utc).isoformat()
    return json.dumps(clean, indent=2) + "\n"


# ---------------------------------------------------------------------------
# geometry cases


class _GeometryCase:
    """Everything a runner needs: fields, fixed points, oracle patches."""

    def __init__(self, fields, fps, Q, patches, classical, reference):
        self.fields = fields
        self.fps = fps
        self.Q = Q
        self.patches = patches
        self.classical = classical
        self.reference = reference


def _sphere_case(scenario: dict) -> _GeometryCase:
    atlas = sphere_atlas()
    form = scenario["form"]
    if form["type"] == "height_exponential":
        fields = {p.name: height_exponential(p) for p in atlas}
        patches = [sphere_oracle_patch()]
    else:
        coeffs = [_as_fraction(c) for c in form["coeffs"]]
        fields = {p.name: closed_polynomial(p, coeffs) for p in atlas}
        patches = [_sphere_polynomial_patch(coeffs)]
    Q = {p.name: tautological_Q(p.spec) for p in atlas}
    reference = _REFERENCES.get(scenario.get("reference", ""), None)
    return _GeometryCase(fields, sphere_fixed_points(), Q, patches, True, reference)


def _sphere_polynomial_patch(coeffs) -> OraclePatch:
    u, t = sc.sym("u"), sc.sym("t")
    height = sc.ZERO - t * sc.cos(u)
    integrand = sc.ZERO
    for k, c in enumerate(coeffs):
        if k == 0:
            continue
        e = sc.rational(c.numerator * k, c.denominator)
        integrand = integrand + e * height ** (k - 1) * sc.sin(u)
    return OraclePatch(
        ("u", "v"),
        ((0.0, math.pi), (0.0, 2 * math.pi)),
        sc.normalize(integrand),
    )


def _plane_case(scenario: dict) -> _GeometryCase:
    reference = _REFERENCES.get(scenario.get("reference", ""), None)
    return _GeometryCase(
        gaussian_rotation_form(),
        plane_fixed_point(),
        tautological_Q(PLANE_ROTATION),
        [gaussian_oracle_patch()],
        True,
        reference,
    )


def _line_case(scenario: dict) -> _GeometryCase:
    chart = SuperChart(("x",), 1)
    spec = ActionSpec(("t",), chart, ((sc.sym("x"),),))
    fps = find_fixed_points(
        spec, declared=[(0,)], h=((sc.ONE,),), chart_id="line"
    )
    field = parse_super(chart, scenario["form"]["text"])
    return _GeometryCase(field, fps, None, [], False, None)


_CASES = {
    "sphere": _sphere_case,
    "plane_rotation": _plane_case,
    "line_dilation": _line_case,
}


def _values(scenario: dict):
    for text in scenario["values"]:
        yield str(text), _as_fraction(text)


# ---------------------------------------------------------------------------
# runners


def run_localize(scenario: dict, tol: Optional[float] = None) -> dict:
    tol = float(tol if tol is not None else scenario.get("tol", 1e-6))
    checks = []
    if scenario["kind"] in _CASES:
        case = _CASES[scenario["kind"]](scenario)
        for label, value in _values(scenario):
            binding = {"t": value}
            if _wanted(scenario, "super_localize"):
                t0 = time.perf_counter()
                name = "super_localize[t=%s]" % label
                try:
                    result = super_localize(
                        case.fields, case.fps, binding=binding, Q=case.Q
                    )
                    checks.append(
                        _record(
                            name,
                            "pass",
                            lhs=result["value"],
                            detail={
                                "coefficient": str(result["coefficient"]),
                                "pi_power": result["pi_power"],
                                "points": [
                                    {"chart": t["chart"], "contribution": t["contribution"]}
                                    for t in result["terms"]
                                ],
                            },
                            runtime=time.perf_counter() - t0,
                        )
                    )
                except OddDimension as exc:
                    checks.append(
                        _record(
                            name,
                            "skipped(OddDimension)",
                            detail={"reason": str(exc)},
                            runtime=time.perf_counter() - t0,
                        )
                    )
                except NotQClosed as exc:
                    checks.append(
                        _record(
                            name,
                            "fail",
                            detail={"reason": str(exc)},
                            runtime=time.perf_counter() - t0,
                        )
                    )
            if case.classical and _wanted(scenario, "classical_localize"):
                t0 = time.perf_counter()
                result = classical_localize(case.fields, case.fps, binding=binding)
                checks.append(
                    _record(
                        "classical_localize[t=%s]" % label,
                        "pass",
                        lhs=result["value"],
                        detail={
                            "coefficient": str(result["coefficient"]),
                            "pi_power": result["pi_power"],
                        },
                        runtime=time.perf_counter() - t0,
                    )
                )
    return _report(scenario, "localize", tol, checks)


def _oracle_values(scenario: dict, case: _GeometryCase, tol: float):
    out = {}
    for label, value in _values(scenario):
        out[label] = global_berezin(
            case.patches, binding={"t": value}, tol=min(tol * 1e-2, 1e-8)
        )
    return out


def run_oracle(scenario: dict, tol: Optional[float] = None) -> dict:
    tol = float(tol if tol is not None else scenario.get("tol", 1e-6))
    checks = []
    if scenario["kind"] in _CASES:
        case = _CASES[scenario["kind"]](scenario)
        if case.patches and _wanted(scenario, "global_berezin"):
            for label, value in _values(scenario):
                t0 = time.perf_counter()
                val = global_berezin(
                    case.patches, binding={"t": value}, tol=min(tol * 1e-2, 1e-8)
                )
                checks.append(
                    _record(
                        "global_berezin[t=%s]" % label,
                        "pass",
                        lhs=val,
                        runtime=time.perf_counter() - t0,
                    )
                )
        for entry in scenario.get("stokes", []):
            if not _wanted(scenario, "super_stokes"):
                continue
            t0 = time.perf_counter()
            name = "super_stokes[%s]" % entry["domain"]
            domain = _STOKES_DOMAINS[entry["domain"]]()
            nu = parse_super(domain.chart, entry["form"])
            q = tautological_Q(domain.spec)
            sigma = identity(domain.chart.m)
            stokes_tol = float(entry.get("tol", 1e-7))
            try:
                result = super_stokes_check(
                    nu,
                    q,
                    sigma,
                    domain.h,
                    domain.h,
                    domain.box,
                    faces=domain.faces,
                    tol=stokes_tol,
                )
                checks.append(
                    _record(
                        name,
                        result["status"],
                        lhs=result["bulk"],
                        rhs=result["boundary"],
                        abs_error=abs(result["difference"]),
                        runtime=time.perf_counter() - t0,
                    )
                )
            except AssumptionViolated as exc:
                checks.append(
                    _record(
                        name,
                        "skipped(AssumptionViolated)",
                        detail={"reason": str(exc)},
                        runtime=time.perf_counter() - t0,
                    )
                )
    return _report(scenario, "oracle", tol, checks)


def run_compare(scenario: dict, tol: Optional[float] = None) -> dict:
    tol = float(tol if tol is not None else scenario.get("tol", 1e-6))
    checks = []
    if scenario["kind"] in _CASES:
        case = _CASES[scenario["kind"]](scenario)
        if case.patches:
            for label, value in _values(scenario):
                t0 = time.perf_counter()
                local = super_localize(
                    case.fields, case.fps, binding={"t": value}, Q=case.Q
                )["value"]
                oracle = global_berezin(
                    case.patches, binding={"t": value}, tol=min(tol * 1e-2, 1e-8)
                )
                runtime = time.perf_counter() - t0
                if _wanted(scenario, "compare"):
                    rel = abs(local - oracle) / max(1.0, abs(oracle))
                    checks.append(
                        _record(
                            "compare[t=%s]" % label,
                            "pass" if rel < tol else "fail",
                            lhs=local,
                            rhs=oracle,
                            abs_error=abs(local - oracle),
                            rel_error=rel,
                            runtime=runtime,
                        )
                    )
                if case.reference is not None:
                    ref = case.reference(float(value))
                    for base, got in (
                        ("super_vs_reference", local),
                        ("oracle_vs_reference", oracle),
                    ):
                        if not _wanted(scenario, base):
                            continue
                        rel = abs(got - ref) / max(1.0, abs(ref))
                        checks.append(
                            _record(
                                "%s[t=%s]" % (base, label),
                                "pass" if rel < tol else "fail",
                                lhs=got,
                                rhs=ref,
                                abs_error=abs(got - ref),
                                rel_error=rel,
                            )
                        )
    return _report(scenario, "compare", tol, checks)


# ---------------------------------------------------------------------------
# structure checks


def _verify_record(name: str, report: dict, runtime: float) -> dict:
    return _record(
        name,
        "pass" if report["passed"] else "fail",
        detail={
            "conditions": [
                {"name": c["name"], "status": c["status"]} for c in report["conditions"]
            ]
        },
        runtime=runtime,
    )


def _geometry_brst(scenario: dict, checks: list) -> None:
    if scenario["kind"] == "sphere":
        patches = [(p.name, p.spec, p.h) for p in sphere_atlas()]
    else:
        patches = [("plane", PLANE_ROTATION, identity(2))]
    for name, spec, h in patches:
        if _wanted(scenario, "verify_brst"):
            t0 = time.perf_counter()
            report = verify_brst(tautological_Q(spec), spec)
            checks.append(
                _verify_record(
                    "verify_brst[%s]" % name, report, time.perf_counter() - t0
                )
            )
        if _wanted(scenario, "sigma_parallel"):
            t0 = time.perf_counter()
            result = check_sigma_parallel(
                identity(spec.chart.m), h, spec.chart, H=h
            )
            checks.append(
                _record(
                    "sigma_parallel[%s]" % name,
                    result["status"],
                    abs_error=result["max_residual"],
                    detail={"symbolic": result["symbolic"]},
                    runtime=time.perf_counter() - t0,
                )
            )


_TORUS_CHART = SuperChart(("x1", "y1", "x2", "y2"), 2)
_TORUS_SPEC = ActionSpec(
    ("e1", "e2"),
    _TORUS_CHART,
    (
        (sc.ZERO - sc.sym("y1"), sc.sym("x1"), sc.ZERO, sc.ZERO),
        (sc.ZERO, sc.ZERO, sc.ZERO - sc.sym("y2"), sc.sym("x2")),
    ),
)


def _adhm_closure_records(scenario: dict, tol: float, checks: list) -> None:
    k, N = scenario["k"], scenario["N"]
    lay = adhm_super_chart(k, N)
    lay_full = adhm_super_chart(k, N, full=True)
    pairs = (
        ("closure_unconstrained", lay, adhm_Q_unconstrained),
        ("closure_full", lay_full, adhm_Q_full),
    )
    for base, layout, builder in pairs:
        if not _wanted(scenario, base):
            continue
        t0 = time.perf_counter()
        params = cartan_params(layout)
        Q = builder(layout, *params)
        lift = adhm_lifted_field(layout, *params)
        if scenario["mode"] == "symbolic":
            residual = add_fields(
                scale_field(graded_commutator(Q, Q), Fraction(1, 2)),
                scale_field(lift, Fraction(-1)),
            )
            ok = field_is_zero(residual)
            checks.append(
                _record(
                    base,
                    "pass" if ok else "fail",
                    lhs="[Q,Q]/2",
                    rhs="lifted field",
                    abs_error=0.0 if ok else None,
                    runtime=time.perf_counter() - t0,
                )
            )
        else:
            worst = _numeric_closure(layout, Q, lift, scenario.get("seed", 2024))
            checks.append(
                _record(
                    base,
                    "pass" if worst < tol else "fail",
                    lhs="[Q,Q]/2",
                    rhs="lifted field",
                    abs_error=worst,
                    runtime=time.perf_counter() - t0,
                )
            )


def _numeric_closure(layout, Q, lift, seed: int) -> float:
    rng = random.Random(seed)
    chart = layout.chart
    names = list(chart.coords) + list(layout.params)
    binding = {n: Fraction(rng.randint(-7, 7), rng.randint(1, 3)) for n in names}

    def residual(f) -> float:
        d = Q.apply(Q.apply(f)) - lift.apply(f)
        worst = 0.0
        for coeff in d.terms.values():
            worst = max(worst, abs(float(sc.evaluate(coeff, binding))))
        return worst

    worst = 0.0
    for idx in range(chart.m):
        f = SuperFunction.from_scalar(chart, sc.sym(chart.coords[idx]))
        worst = max(worst, residual(f))
    for idx in range(1, chart.n + 1):
        worst = max(worst, residual(SuperFunction.generator(chart, idx)))
    for _ in range(20):
        terms = {}
        for _ in range(3):
            roll = rng.random()
            if roll < 0.4:
                key = ()
            elif roll < 0.8:
                key = (rng.randint(1, chart.n),)
            else:
                A = rng.randint(1, chart.n - 1)
                key = (A, rng.randint(A + 1, chart.n))
            e = sc.rational(rng.randint(-3, 3)) * sc.sym(
                chart.coords[rng.randint(0, chart.m - 1)]
            )
            terms[key] = terms.get(key, sc.ZERO) + e
        worst = max(worst, residual(SuperFunction(chart, terms)))
    return worst


def _adhm_multiplier_records(scenario: dict, checks: list) -> None:
    k, N = scenario["k"], scenario["N"]
    lay = adhm_super_chart(k, N, full=True)
    field = adhm_lifted_field(lay, *cartan_params(lay))
    bodies = [c.terms.get((), sc.ZERO) for c in field.a]
    coords = lay.chart.coords
    T = {coords[i]: bodies[i] for i in range(lay.offset("HR"))}
    V = adhm_constraint_scalars(lay)
    nreal = 2 * k * k
    for base, sector, block, need_invertible in (
        ("multiplier_real_sector", "HR", V[:nreal], False),
        ("multiplier_complex_sector", "HC", V[nreal:], True),
    ):
        if not _wanted(scenario, base):
            continue
        t0 = time.perf_counter()
        H_names = list(lay.sector_coords(sector))
        Ttilde = [bodies[coords.index(nm)] for nm in H_names]
        _, rep = multiplier_completion(block, T, Ttilde, H_names)
        ok = rep["pairing_residual_zero"] and (
            rep["invertible"] if need_invertible else True
        )
        checks.append(
            _record(
                base,
                "pass" if ok else "fail",
                abs_error=rep["pairing_residual_max"],
                detail={"invertible": rep["invertible"], "size": rep["size"]},
                runtime=time.perf_counter() - t0,
            )
        )


def run_brst_check(scenario: dict, tol: Optional[float] = None) -> dict:
    tol = float(tol if tol is not None else scenario.get("tol", 1e-12))
    checks = []
    kind = scenario["kind"]
    if kind in ("sphere", "plane_rotation"):
        _geometry_brst(scenario, checks)
    elif kind == "kahler_torus":
        if _wanted(scenario, "verify_brst"):
            t0 = time.perf_counter()
            report = verify_brst(kahler_Q(_TORUS_SPEC), _TORUS_SPEC)
            checks.append(
                _verify_record("verify_brst", report, time.perf_counter() - t0)
            )
    elif kind == "adhm":
        k, N = scenario["k"], scenario["N"]
        _adhm_closure_records(scenario, tol, checks)
        if _wanted(scenario, "verify_brst_unconstrained"):
            t0 = time.perf_counter()
            lay = adhm_super_chart(k, N)
            report = verify_brst(
                adhm_Q_unconstrained(lay, *cartan_params(lay)), adhm_action_spec(lay)
            )
            checks.append(
                _verify_record(
                    "verify_brst_unconstrained", report, time.perf_counter() - t0
                )
            )
        if _wanted(scenario, "sigma_identity"):
            t0 = time.perf_counter()
            lay = adhm_super_chart(k, N)
            Q = adhm_Q_unconstrained(lay, *cartan_params(lay))
            ok = all(
                comp.terms == {(idx + 1,): sc.ONE} for idx, comp in enumerate(Q.a)
            )
            checks.append(
                _record(
                    "sigma_identity",
                    "pass" if ok else "fail",
                    runtime=time.perf_counter() - t0,
                )
            )
        _adhm_multiplier_records(scenario, checks)
        if _wanted(scenario, "fixed_points"):
            t0 = time.perf_counter()
            name = "fixed_points"
            if k == 1:
                points = adhm_fixed_points(k, N)
                checks.append(
                    _record(
                        name,
                        "pass" if len(points) == N else "fail",
                        lhs=len(points),
                        rhs=N,
                        detail={
                            "weights": [
                                [sc.to_text(w) for w in fp.weights] for fp in points
                            ]
                        },
                        runtime=time.perf_counter() - t0,
                    )
                )
            else:
                checks.append(
                    _record(
                        name,
                        "skipped(OnlyRankOne)",
                        runtime=time.perf_counter() - t0,
                    )
                )
    return _report(scenario, "brst-check", tol, checks)


RUNNERS = {
    "localize": run_localize,
    "oracle": run_oracle,
    "compare": run_compare,
    "brst-check": run_brst_check,
}
