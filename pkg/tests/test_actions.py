"""Action specs, the equivariant differential, and BRST verification."""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np
import pytest

from superloc import scalars as sc
from superloc.actions import (
    ActionSpec,
    MetricData,
    check_sigma_parallel,
    christoffel,
    closure_check,
    equivariant_differential,
    fundamental_field,
    induced_fiber_metric,
    kahler_Q,
    kahler_lift,
    lie_derivative,
    lifted_field,
    metric_invariance_report,
    positive_definite_report,
    sigma_from_Q,
    tautological_Q,
    tautological_lift,
    verify_brst,
)
from superloc.cgrass import c_field_scale, c_field_sub, c_graded_commutator
from superloc.errors import (
    DimensionMismatch,
    NotInjective,
    NotLinearInTheta,
    NotTautological,
    OddComplexDimension,
    ShapeMismatch,
)
from superloc.grassmann import (
    SuperChart,
    SuperFunction,
    SuperVectorField,
    add_fields,
    field_is_zero,
    graded_commutator,
    parse_super,
    scale_field,
)

X = sc.sym("x")
Y = sc.sym("y")
T = sc.sym("t")

CHART = SuperChart(("x", "y"), 2)

ROTATION = ActionSpec(("t",), CHART, ((sc.ZERO - Y, X),))
DILATION = ActionSpec(("t",), CHART, ((X, Y),))

CHART4 = SuperChart(("x1", "y1", "x2", "y2"), 2)
TORUS = ActionSpec(
    ("e1", "e2"),
    CHART4,
    (
        (sc.ZERO - sc.sym("y1"), sc.sym("x1"), sc.ZERO, sc.ZERO),
        (sc.ZERO, sc.ZERO, sc.ZERO - sc.sym("y2"), sc.sym("x2")),
    ),
)

TAUT4 = SuperChart(("x1", "y1", "x2", "y2"), 4)
TORUS_TAUT = ActionSpec(
    ("e1", "e2"),
    TAUT4,
    (
        (sc.ZERO - sc.sym("y1"), sc.sym("x1"), sc.ZERO, sc.ZERO),
        (sc.ZERO, sc.ZERO, sc.ZERO - sc.sym("y2"), sc.sym("x2")),
    ),
)


def _exterior_d(f: SuperFunction) -> SuperFunction:
    chart = f.chart
    a = tuple(SuperFunction.generator(chart, i + 1) for i in range(chart.m))
    b = tuple(SuperFunction.zero(chart) for _ in range(chart.n))
    return SuperVectorField(chart, 1, a, b).apply(f)


def _contract(f: SuperFunction, spec: ActionSpec) -> SuperFunction:
    chart = spec.chart
    a = tuple(SuperFunction.zero(chart) for _ in range(chart.m))
    b = []
    for A in range(chart.n):
        comp = sc.ZERO
        for alpha, name in enumerate(spec.params):
            comp = comp + sc.sym(name) * spec.T[alpha][A]
        b.append(SuperFunction.from_scalar(chart, comp))
    return SuperVectorField(chart, 1, a, tuple(b)).apply(f)


def _cartan_lie(f: SuperFunction, spec: ActionSpec) -> SuperFunction:
    return _exterior_d(_contract(f, spec)) + _contract(_exterior_d(f), spec)


def _random_forms(chart, count, seed):
    rng = random.Random(seed)
    coords = chart.coords
    out = []
    indices = [()]
    for k in range(1, chart.n + 1):
        indices += _tuples(chart.n, k)
    for _ in range(count):
        terms = {}
        for idx in indices:
            if rng.random() < 0.4:
                continue
            coeff = sc.rational(rng.randint(-3, 3))
            for c in coords:
                if rng.random() < 0.5:
                    coeff = coeff * sc.sym(c) ** rng.randint(1, 2)
            terms[idx] = coeff
        out.append(SuperFunction(chart, terms))
    return out


def _tuples(n, k):
    if k == 0:
        return [()]
    out = []

    def rec(start, chosen):
        if len(chosen) == k:
            out.append(tuple(chosen))
            return
        for i in range(start, n + 1):
            rec(i + 1, chosen + [i])

    rec(1, [])
    return out


def test_fundamental_field_rotation():
    field = fundamental_field(ROTATION)
    assert field.a[0] == SuperFunction.from_scalar(CHART, sc.ZERO - T * Y)
    assert field.a[1] == SuperFunction.from_scalar(CHART, T * X)
    assert all(comp.is_zero() for comp in field.b)
    assert field.parity_violations() == []


def test_lifted_field_annihilates_invariants():
    spec = tautological_lift(ROTATION)
    field = lifted_field(spec)
    r2 = parse_super(CHART, "x^2 + y^2")
    vol = parse_super(CHART, "th1*th2")
    ang = parse_super(CHART, "x*th2 - y*th1")
    for inv in (r2, vol, ang):
        assert field.apply(inv).is_zero()


def test_tautological_lift_requires_square_chart():
    with pytest.raises(NotTautological):
        tautological_lift(TORUS)
    with pytest.raises(NotTautological):
        tautological_Q(TORUS)


def test_equivariant_differential_on_angular_form():
    alpha = parse_super(CHART, "x*th2 - y*th1")
    out = equivariant_differential(alpha, ROTATION)
    expected = parse_super(CHART, "2*th1*th2 + t*(x^2 + y^2)")
    assert (out - expected).is_zero()


def test_differential_extends_exterior_plus_contraction():
    # on a translated 1-form the operator is d plus contraction
    for f in _random_forms(CHART, 12, seed=401):
        lhs = equivariant_differential(f, ROTATION)
        rhs = _exterior_d(f) + _contract(f, ROTATION)
        assert (lhs - rhs).is_zero()


def test_square_is_lie_derivative():
    for spec in (ROTATION, DILATION):
        for f in _random_forms(spec.chart, 10, seed=402):
            twice = equivariant_differential(
                equivariant_differential(f, spec), spec
            )
            assert (twice - _cartan_lie(f, spec)).is_zero()
            assert (lie_derivative(f, spec) - _cartan_lie(f, spec)).is_zero()


def test_square_as_fields():
    Q = tautological_Q(ROTATION)
    half_sq = scale_field(graded_commutator(Q, Q), Fraction(1, 2))
    lift = lifted_field(tautological_lift(ROTATION))
    assert field_is_zero(add_fields(half_sq, scale_field(lift, Fraction(-1))))


def test_verify_brst_rotation_passes():
    Q = tautological_Q(ROTATION)
    report = verify_brst(Q, ROTATION)
    assert report["passed"]
    by_name = {c["name"]: c["status"] for c in report["conditions"]}
    assert by_name["square_equals_lift"] == "pass"
    assert by_name["equivariance_infinitesimal"] == "pass"
    assert by_name["equivariance_finite"] == "pass"
    assert by_name["sigma_injective"] == "pass"


def test_verify_brst_torus_tautological_passes():
    Q = tautological_Q(TORUS_TAUT)
    report = verify_brst(Q, TORUS_TAUT)
    assert report["passed"]
    assert all(
        c["status"] == "pass" for c in report["conditions"]
    ), report["conditions"]


def test_verify_brst_flags_wrong_sign():
    good = tautological_Q(ROTATION)
    flipped = SuperVectorField(
        CHART, 1, good.a, tuple(-comp for comp in good.b)
    )
    report = verify_brst(flipped, ROTATION)
    assert not report["passed"]
    assert report["conditions"][0]["status"] == "fail"
    assert report["conditions"][0]["residual"]


def test_verify_brst_flags_broken_symbol():
    good = tautological_Q(ROTATION)
    th1 = SuperFunction.generator(CHART, 1)
    degenerate = SuperVectorField(CHART, 1, (th1, 2 * th1), good.b)
    report = verify_brst(degenerate, ROTATION)
    by_name = {c["name"]: c["status"] for c in report["conditions"]}
    assert by_name["sigma_injective"] == "fail"
    assert not report["passed"]


def test_sigma_from_Q_tautological():
    sigma = sigma_from_Q(tautological_Q(ROTATION))
    assert all(
        sc.is_zero(sigma[i][A] - (sc.ONE if i == A else sc.ZERO))
        for i in range(2)
        for A in range(2)
    )


def test_sigma_from_Q_reads_coefficients():
    th1 = SuperFunction.generator(CHART, 1)
    th2 = SuperFunction.generator(CHART, 2)
    Q = SuperVectorField(
        CHART,
        1,
        (th1 + X * th2, th2),
        (SuperFunction.zero(CHART), SuperFunction.zero(CHART)),
    )
    sigma = sigma_from_Q(Q)
    assert sc.is_zero(sigma[0][1] - X)
    assert sc.is_zero(sigma[1][0])


def test_sigma_from_Q_guards():
    th1 = SuperFunction.generator(CHART, 1)
    th2 = SuperFunction.generator(CHART, 2)
    zero = SuperFunction.zero(CHART)
    with pytest.raises(NotLinearInTheta):
        sigma_from_Q(SuperVectorField(CHART, 1, (th1 * th2, th2), (zero, zero)))
    with pytest.raises(NotInjective):
        sigma_from_Q(SuperVectorField(CHART, 1, (th1, 2 * th1), (zero, zero)))


def test_kahler_Q_components():
    Q = kahler_Q(TORUS)
    th1 = SuperFunction.generator(CHART4, 1)
    half = Fraction(1, 2)
    assert (Q.a[0].re - half * th1).is_zero() and Q.a[0].im.is_zero()
    assert Q.a[1].re.is_zero() and (Q.a[1].im + half * th1).is_zero()
    e1 = sc.sym("e1")
    y1 = sc.sym("y1")
    x1 = sc.sym("x1")
    assert (Q.b[0].re - SuperFunction.from_scalar(CHART4, sc.ZERO - e1 * y1)).is_zero()
    assert (Q.b[0].im - SuperFunction.from_scalar(CHART4, e1 * x1)).is_zero()


def test_kahler_lift_rotation_weights():
    lift = kahler_lift(TORUS)
    e1 = sc.sym("e1")
    th1 = SuperFunction.generator(CHART4, 1)
    # odd part rotates with the same weight as z1
    assert lift.b[0].re.is_zero()
    assert (lift.b[0].im - SuperFunction.from_scalar(CHART4, e1) * th1).is_zero()
    half = Fraction(1, 2)
    x1 = SuperFunction.from_scalar(CHART4, sc.sym("x1"))
    y1 = SuperFunction.from_scalar(CHART4, sc.sym("y1"))
    e1s = SuperFunction.from_scalar(CHART4, e1)
    assert (lift.a[0].re + half * e1s * y1).is_zero()
    assert (lift.a[0].im - half * e1s * x1).is_zero()
    assert (lift.a[1].re - half * e1s * x1).is_zero()
    assert (lift.a[1].im - half * e1s * y1).is_zero()


def test_kahler_square_closes():
    Q = kahler_Q(TORUS)
    residual = c_field_sub(
        c_field_scale(c_graded_commutator(Q, Q), Fraction(1, 2)),
        kahler_lift(TORUS),
    )
    assert residual.is_zero()


def test_verify_brst_kahler():
    report = verify_brst(kahler_Q(TORUS), TORUS)
    assert report["passed"]
    by_name = {c["name"]: c["status"] for c in report["conditions"]}
    assert by_name["square_equals_lift"] == "pass"
    assert by_name["equivariance_infinitesimal"] == "pass"
    assert by_name["equivariance_finite"].startswith("skipped")


def test_kahler_guards():
    two = SuperChart(("x1", "y1"), 1)
    spec = ActionSpec(("t",), two, ((sc.ZERO - sc.sym("y1"), sc.sym("x1")),))
    with pytest.raises(OddComplexDimension):
        kahler_Q(spec)
    odd_m = SuperChart(("x1", "y1", "x2"), 1)
    spec3 = ActionSpec(("t",), odd_m, ((sc.ZERO, sc.ZERO, sc.ZERO),))
    with pytest.raises(ShapeMismatch):
        kahler_Q(spec3)
    wrong_n = SuperChart(("x1", "y1", "x2", "y2"), 3)
    spec_n = ActionSpec(("t",), wrong_n, ((sc.ZERO, sc.ZERO, sc.ZERO, sc.ZERO),))
    with pytest.raises(DimensionMismatch):
        kahler_Q(spec_n)


def test_metric_invariance():
    euclid = ((sc.ONE, sc.ZERO), (sc.ZERO, sc.ONE))
    report = metric_invariance_report(euclid, ROTATION)
    assert report["status"] == "pass" and report["symbolic"]
    stretched = ((sc.ONE, sc.ZERO), (sc.ZERO, sc.rational(2)))
    assert metric_invariance_report(stretched, ROTATION)["status"] == "fail"


def test_positive_definite_report():
    good = ((sc.ONE, sc.ZERO), (sc.ZERO, sc.rational(2)))
    bad = ((sc.ONE, sc.ZERO), (sc.ZERO, sc.rational(-1)))
    assert positive_definite_report(good, [{}])["status"] == "pass"
    assert positive_definite_report(bad, [{}])["status"] == "fail"


def test_induced_fiber_metric_shear():
    h = ((sc.ONE, sc.ZERO), (sc.ZERO, sc.ONE))
    sigma = ((sc.ONE, X), (sc.ZERO, sc.ONE))
    H = induced_fiber_metric(h, sigma)
    assert sc.is_zero(H[0][0] - sc.ONE)
    assert sc.is_zero(H[0][1] - X)
    assert sc.is_zero(H[1][0] - X)
    assert sc.is_zero(H[1][1] - (sc.ONE + X * X))


def test_metric_data_checks_symmetry():
    with pytest.raises(ShapeMismatch):
        MetricData(CHART, ((sc.ONE, X), (sc.ZERO, sc.ONE)))
    md = MetricData(CHART, ((sc.ONE, sc.ZERO), (sc.ZERO, sc.ONE)))
    H = md.fiber_metric()
    assert sc.is_zero(H[0][0] - sc.ONE) and sc.is_zero(H[0][1])


def test_christoffel_against_finite_differences():
    h = (
        (sc.ONE + X * X, X * Y),
        (X * Y, sc.ONE + Y * Y),
    )
    gamma = christoffel(h, ("x", "y"))
    point = {"x": 0.3, "y": -0.2}
    eps = 1e-6

    def h_num(px, py):
        binding = {"x": px, "y": py}
        return [[float(sc.evaluate(e, binding)) for e in row] for row in h]

    h0 = np.array(h_num(point["x"], point["y"]))
    hinv = np.linalg.inv(h0)
    dh = np.zeros((2, 2, 2))
    for k, name in enumerate(("x", "y")):
        up = dict(point)
        dn = dict(point)
        up[name] += eps
        dn[name] -= eps
        dh[k] = (np.array(h_num(up["x"], up["y"])) - np.array(h_num(dn["x"], dn["y"]))) / (
            2 * eps
        )
    for i in range(2):
        for k in range(2):
            for j in range(2):
                fd = 0.0
                for l in range(2):
                    fd += 0.5 * hinv[i, l] * (dh[k][l, j] + dh[j][l, k] - dh[l][k, j])
                sym = float(sc.evaluate(gamma[i][k][j], point))
                assert abs(sym - fd) < 1e-6


def test_sigma_parallel_tautological():
    h = ((sc.ONE + X * X, sc.ZERO), (sc.ZERO, sc.ONE))
    sigma = ((sc.ONE, sc.ZERO), (sc.ZERO, sc.ONE))
    report = check_sigma_parallel(sigma, h, CHART)
    assert report["status"] == "pass"
    assert report["connection"] == "levi-civita"
    assert report["symbolic"]


def test_sigma_parallel_shear_fails():
    h = ((sc.ONE, sc.ZERO), (sc.ZERO, sc.ONE))
    sigma = ((sc.ONE, X), (sc.ZERO, sc.ONE))
    report = check_sigma_parallel(sigma, h, CHART)
    assert report["status"] == "fail"
    assert report["max_residual"] > 1e-3


def test_closure_check():
    assert closure_check(ROTATION)["status"] == "pass"
    torus = closure_check(TORUS)
    assert torus["status"] == "pass" and torus["pairs"] == 1
    bad = ActionSpec(
        ("s", "t"),
        CHART,
        ((sc.ONE, sc.ZERO), (sc.ZERO, X)),
    )
    assert closure_check(bad)["status"] == "fail"
