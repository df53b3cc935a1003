"""Group actions, equivariant differential, and BRST operators.

An action is stored through its infinitesimal generators: base components
T[alpha][i] and optional fiber components U[alpha][B][A], where
U[alpha][B][A] is the coefficient of theta^B in the d/dtheta^A part of the
lifted field of generator alpha.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import numpy as np

from . import linalg
from . import scalars as sc
from .cgrass import CField, CSuper, c_field_scale, c_field_sub, c_graded_commutator
from .errors import (
    DimensionMismatch,
    NotInjective,
    NotLinearInTheta,
    NotTautological,
    OddComplexDimension,
    ShapeMismatch,
)
from .grassmann import (
    SuperChart,
    SuperFunction,
    SuperVectorField,
    add_fields,
    field_is_zero,
    graded_commutator,
    scale_field,
    to_super_text,
)
from .scalars import ScalarExpr, normalize


def _as_expr(value) -> ScalarExpr:
    if isinstance(value, ScalarExpr):
        return value
    f = Fraction(value)
    return sc.rational(f.numerator, f.denominator)


@dataclass(frozen=True)
class ActionSpec:
    """Infinitesimal generators of a group action on an (m, n) chart."""

    params: Tuple[str, ...]
    chart: SuperChart
    T: tuple
    U: Optional[tuple] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "params", tuple(self.params))
        T = tuple(tuple(_as_expr(e) for e in row) for row in self.T)
        if len(T) != len(self.params) or any(len(row) != self.chart.m for row in T):
            raise ShapeMismatch(
                "T must be %d x %d" % (len(self.params), self.chart.m)
            )
        object.__setattr__(self, "T", T)
        if self.U is not None:
            U = tuple(
                tuple(tuple(_as_expr(e) for e in row) for row in block) for block in self.U
            )
            n = self.chart.n
            if len(U) != len(self.params) or any(
                len(block) != n or any(len(row) != n for row in block) for block in U
            ):
                raise ShapeMismatch(
                    "U must be %d x %d x %d" % (len(self.params), n, n)
                )
            object.__setattr__(self, "U", U)

    @property
    def dim_g(self) -> int:
        return len(self.params)


def _xi_coeffs(spec: ActionSpec, xi=None) -> tuple:
    """Per-generator coefficients; unbound parameters stay symbolic."""
    if xi is None:
        xi = {}
    out = []
    for name in spec.params:
        if name in xi:
            out.append(_as_expr(xi[name]))
        else:
            out.append(sc.sym(name))
    return tuple(out)


def fundamental_field(spec: ActionSpec, xi=None) -> SuperVectorField:
    """Even field xi^alpha T_alpha^i d/dx^i with no odd components."""
    coeffs = _xi_coeffs(spec, xi)
    a = []
    for i in range(spec.chart.m):
        comp = sc.ZERO
        for alpha in range(spec.dim_g):
            comp = comp + coeffs[alpha] * spec.T[alpha][i]
        a.append(SuperFunction.from_scalar(spec.chart, comp))
    zero = SuperFunction.zero(spec.chart)
    return SuperVectorField(spec.chart, 0, tuple(a), tuple(zero for _ in range(spec.chart.n)))


def lifted_field(spec: ActionSpec, xi=None) -> SuperVectorField:
    """Even field with the fiber rotation theta^B U[alpha][B][A] d/dtheta^A added."""
    base = fundamental_field(spec, xi)
    if spec.U is None:
        return base
    coeffs = _xi_coeffs(spec, xi)
    b = []
    for A in range(spec.chart.n):
        terms = {}
        for B in range(spec.chart.n):
            comp = sc.ZERO
            for alpha in range(spec.dim_g):
                comp = comp + coeffs[alpha] * spec.U[alpha][B][A]
            if not sc.is_zero(comp):
                terms[(B + 1,)] = comp
        b.append(SuperFunction(spec.chart, terms))
    return SuperVectorField(spec.chart, 0, base.a, tuple(b))


def tautological_lift(spec: ActionSpec) -> ActionSpec:
    """Spec with U[alpha][B][A] = dT[alpha][A]/dx^B, the action on 1-forms."""
    if spec.chart.n != spec.chart.m:
        raise NotTautological("tautological lift needs n = m")
    coords = spec.chart.coords
    U = tuple(
        tuple(
            tuple(sc.differentiate(spec.T[alpha][A], coords[B]) for A in range(spec.chart.n))
            for B in range(spec.chart.n)
        )
        for alpha in range(spec.dim_g)
    )
    return ActionSpec(spec.params, spec.chart, spec.T, U)


def tautological_Q(spec: ActionSpec, xi=None) -> SuperVectorField:
    """Odd field Q(x^i) = theta^i, Q(theta^A) = xi^alpha T_alpha^A."""
    if spec.chart.n != spec.chart.m:
        raise NotTautological("tautological operator needs n = m")
    coeffs = _xi_coeffs(spec, xi)
    a = tuple(SuperFunction.generator(spec.chart, i + 1) for i in range(spec.chart.m))
    b = []
    for A in range(spec.chart.n):
        comp = sc.ZERO
        for alpha in range(spec.dim_g):
            comp = comp + coeffs[alpha] * spec.T[alpha][A]
        b.append(SuperFunction.from_scalar(spec.chart, comp))
    return SuperVectorField(spec.chart, 1, a, tuple(b))


def equivariant_differential_field(spec: ActionSpec, xi=None) -> SuperVectorField:
    """The operator d + contraction with the fundamental field, on the
    tautological chart where theta^i stands for dx^i."""
    return tautological_Q(spec, xi)


def equivariant_differential(alpha: SuperFunction, spec: ActionSpec, xi=None) -> SuperFunction:
    return equivariant_differential_field(spec, xi).apply(alpha)


def lie_derivative(alpha: SuperFunction, spec: ActionSpec, xi=None) -> SuperFunction:
    """Lie derivative along the fundamental field, acting on translated forms."""
    return lifted_field(tautological_lift(spec), xi).apply(alpha)


# ---------------------------------------------------------------------------
# Complex-structure operator.
# ---------------------------------------------------------------------------


def _complex_pairs(chart: SuperChart, pairs=None) -> tuple:
    if chart.m % 2:
        raise ShapeMismatch("complex pairing needs an even number of coordinates")
    mc = chart.m // 2
    if chart.n != mc:
        raise DimensionMismatch(
            "need one odd generator per complex direction (%d), got %d" % (mc, chart.n)
        )
    if mc % 2:
        raise OddComplexDimension("complex dimension %d is odd" % (mc,))
    if pairs is None:
        pairs = tuple((2 * j + 1, 2 * j + 2) for j in range(mc))
    if len(pairs) != mc or sorted(i for p in pairs for i in p) != list(range(1, chart.m + 1)):
        raise ShapeMismatch("pairs must partition the coordinate indices")
    return tuple(tuple(p) for p in pairs)


def kahler_Q(spec: ActionSpec, xi=None, pairs=None) -> CField:
    """Holomorphic-side BRST operator on a complex-paired chart.

    Coordinates pair into z_j = x_j + i y_j; the j-th odd generator is the
    partner of dz_j. Components: Q(x_j) = theta^j/2, Q(y_j) = -i theta^j/2,
    Q(theta^j) = xi*(z_j).
    """
    pairs = _complex_pairs(spec.chart, pairs)
    coeffs = _xi_coeffs(spec, xi)
    chart = spec.chart
    half = Fraction(1, 2)
    a = [CSuper.zero(chart) for _ in range(chart.m)]
    b = []
    for j, (ix, iy) in enumerate(pairs, start=1):
        th = SuperFunction.generator(chart, j)
        a[ix - 1] = CSuper(half * th, SuperFunction.zero(chart))
        a[iy - 1] = CSuper(SuperFunction.zero(chart), -half * th)
        vx = sc.ZERO
        vy = sc.ZERO
        for alpha in range(spec.dim_g):
            vx = vx + coeffs[alpha] * spec.T[alpha][ix - 1]
            vy = vy + coeffs[alpha] * spec.T[alpha][iy - 1]
        b.append(
            CSuper(
                SuperFunction.from_scalar(chart, vx),
                SuperFunction.from_scalar(chart, vy),
            )
        )
    return CField(chart, 1, tuple(a), tuple(b))


def kahler_lift(spec: ActionSpec, xi=None, pairs=None) -> CField:
    """Holomorphic part of the lifted action on the complex-paired chart."""
    pairs = _complex_pairs(spec.chart, pairs)
    coeffs = _xi_coeffs(spec, xi)
    chart = spec.chart
    coords = chart.coords
    half = Fraction(1, 2)
    comp_x = []
    comp_y = []
    for ix, iy in pairs:
        vx = sc.ZERO
        vy = sc.ZERO
        for alpha in range(spec.dim_g):
            vx = vx + coeffs[alpha] * spec.T[alpha][ix - 1]
            vy = vy + coeffs[alpha] * spec.T[alpha][iy - 1]
        comp_x.append(vx)
        comp_y.append(vy)
    a = [CSuper.zero(chart) for _ in range(chart.m)]
    for j, (ix, iy) in enumerate(pairs):
        # (1,0) part: half*Z_j on d/dx, -i*half*Z_j on d/dy with Z_j = vx + i vy
        a[ix - 1] = CSuper(
            SuperFunction.from_scalar(chart, half * comp_x[j]),
            SuperFunction.from_scalar(chart, half * comp_y[j]),
        )
        a[iy - 1] = CSuper(
            SuperFunction.from_scalar(chart, half * comp_y[j]),
            SuperFunction.from_scalar(chart, -half * comp_x[j]),
        )
    b = []
    for j in range(len(pairs)):
        re_terms = {}
        im_terms = {}
        for k, (kx, ky) in enumerate(pairs):
            # dZ_j/dz_k with d/dz = (d/dx - i d/dy)/2
            re_part = half * (
                sc.differentiate(comp_x[j], coords[kx - 1])
                + sc.differentiate(comp_y[j], coords[ky - 1])
            )
            im_part = half * (
                sc.differentiate(comp_y[j], coords[kx - 1])
                - sc.differentiate(comp_x[j], coords[ky - 1])
            )
            if not sc.is_zero(re_part):
                re_terms[(k + 1,)] = re_part
            if not sc.is_zero(im_part):
                im_terms[(k + 1,)] = im_part
        b.append(CSuper(SuperFunction(chart, re_terms), SuperFunction(chart, im_terms)))
    return CField(chart, 0, tuple(a), tuple(b))


# ---------------------------------------------------------------------------
# The symbol morphism sigma.
# ---------------------------------------------------------------------------


def _default_samples(symbols, count=5, seed=802):
    rng = random.Random(seed)
    out = []
    names = sorted(symbols)
    for _ in range(count):
        out.append(
            {name: Fraction(rng.randint(-7, 7), rng.randint(1, 3)) for name in names}
        )
    return out


def _numeric_rank(rows, samples) -> int:
    best = 0
    for binding in samples:
        try:
            mat = np.array(
                [[complex(_eval_c(e, binding)) for e in row] for row in rows],
                dtype=complex,
            )
        except ZeroDivisionError:
            continue
        best = max(best, int(np.linalg.matrix_rank(mat, tol=1e-9)))
    return best


def _eval_c(entry, binding):
    if isinstance(entry, tuple):
        return complex(float(sc.evaluate(entry[0], binding)), float(sc.evaluate(entry[1], binding)))
    return complex(float(sc.evaluate(entry, binding)))


def sigma_from_Q(Q, samples=None):
    """Extract sigma^i_A from a^i = sigma^i_A theta^A.

    Real fields give a matrix of scalars; complex fields give (re, im)
    pairs. Injectivity is certified by numeric rank at sample points.
    """
    chart = Q.chart
    rows = []
    if isinstance(Q, CField):
        for comp in Q.a:
            for part in (comp.re, comp.im):
                if any(len(k) != 1 for k in part.terms):
                    raise NotLinearInTheta("even component is not linear in theta")
            rows.append(
                [
                    (comp.re.coefficient((A,)), comp.im.coefficient((A,)))
                    for A in range(1, chart.n + 1)
                ]
            )
    else:
        for comp in Q.a:
            if any(len(k) != 1 for k in comp.terms):
                raise NotLinearInTheta("even component is not linear in theta")
            rows.append([comp.coefficient((A,)) for A in range(1, chart.n + 1)])
    symbols = set()
    for row in rows:
        for e in row:
            if isinstance(e, tuple):
                symbols |= sc.free_symbols(e[0]) | sc.free_symbols(e[1])
            else:
                symbols |= sc.free_symbols(e)
    if samples is None:
        samples = _default_samples(symbols)
    if _numeric_rank(rows, samples) < chart.n:
        raise NotInjective("sigma has rank below %d at all sample points" % (chart.n,))
    return rows


def induced_fiber_metric(h, sigma, samples=None):
    """H = sigma^T h sigma, the fiber metric pulled through the symbol map."""
    m = len(sigma)
    if len(h) != m or any(len(row) != m for row in h):
        raise ShapeMismatch("h must be %d x %d" % (m, m))
    n = len(sigma[0])
    symbols = set()
    for row in sigma:
        for e in row:
            symbols |= sc.free_symbols(e)
    for row in h:
        for e in row:
            symbols |= sc.free_symbols(_as_expr(e))
    if samples is None:
        samples = _default_samples(symbols)
    if _numeric_rank(sigma, samples) < n:
        raise NotInjective("sigma has rank below %d at all sample points" % (n,))
    H = []
    for A in range(n):
        row = []
        for B in range(n):
            acc = sc.ZERO
            for i in range(m):
                for j in range(m):
                    acc = acc + sigma[i][A] * _as_expr(h[i][j]) * sigma[j][B]
            row.append(normalize(acc))
        H.append(row)
    return H


# ---------------------------------------------------------------------------
# Metric data and connection checks.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricData:
    """Invariant base metric, optionally with the symbol map attached."""

    chart: SuperChart
    h: tuple
    sigma: Optional[tuple] = None

    def __post_init__(self) -> None:
        h = tuple(tuple(_as_expr(e) for e in row) for row in self.h)
        m = self.chart.m
        if len(h) != m or any(len(row) != m for row in h):
            raise ShapeMismatch("h must be %d x %d" % (m, m))
        for i in range(m):
            for j in range(m):
                if not sc.is_zero(h[i][j] - h[j][i]):
                    raise ShapeMismatch("metric is not symmetric at (%d, %d)" % (i, j))
        object.__setattr__(self, "h", h)
        if self.sigma is not None:
            object.__setattr__(
                self, "sigma", tuple(tuple(_as_expr(e) for e in row) for row in self.sigma)
            )

    def fiber_metric(self):
        sigma = self.sigma
        if sigma is None:
            sigma = tuple(
                tuple(sc.ONE if i == j else sc.ZERO for j in range(self.chart.n))
                for i in range(self.chart.m)
            )
        return induced_fiber_metric(self.h, sigma)


def metric_invariance_report(h, spec: ActionSpec, xi=None, samples=None, tol=1e-8):
    """Killing-equation residual of h along the fundamental field, sampled."""
    chart = spec.chart
    coords = chart.coords
    m = chart.m
    field = fundamental_field(spec, xi)
    comp = [field.a[i].body() for i in range(m)]
    residuals = []
    for i in range(m):
        for j in range(m):
            r = sc.ZERO
            for k in range(m):
                r = r + comp[k] * sc.differentiate(_as_expr(h[i][j]), coords[k])
                r = r + _as_expr(h[k][j]) * sc.differentiate(comp[k], coords[i])
                r = r + _as_expr(h[i][k]) * sc.differentiate(comp[k], coords[j])
            residuals.append(normalize(r))
    if all(sc.is_zero(r) for r in residuals):
        return {"status": "pass", "max_residual": 0.0, "symbolic": True}
    symbols = set()
    for r in residuals:
        symbols |= sc.free_symbols(r)
    if samples is None:
        samples = _default_samples(symbols)
    worst = 0.0
    for binding in samples:
        for r in residuals:
            worst = max(worst, abs(float(sc.evaluate(r, binding))))
    return {
        "status": "pass" if worst < tol else "fail",
        "max_residual": worst,
        "symbolic": False,
    }


def positive_definite_report(h, samples, tol=1e-12):
    worst = float("inf")
    for binding in samples:
        mat = np.array(
            [[float(sc.evaluate(_as_expr(e), binding)) for e in row] for row in h]
        )
        worst = min(worst, float(np.linalg.eigvalsh(mat).min()))
    return {"status": "pass" if worst > tol else "fail", "min_eigenvalue": worst}


def christoffel(h, coords) -> list:
    """Levi-Civita symbols Gamma[i][k][j] for the metric h in these coordinates."""
    m = len(coords)
    hinv = linalg.inverse_symbolic([[_as_expr(e) for e in row] for row in h])
    out = []
    for i in range(m):
        plane = []
        for k in range(m):
            row = []
            for j in range(m):
                acc = sc.ZERO
                for l in range(m):
                    term = (
                        sc.differentiate(_as_expr(h[l][j]), coords[k])
                        + sc.differentiate(_as_expr(h[l][k]), coords[j])
                        - sc.differentiate(_as_expr(h[k][j]), coords[l])
                    )
                    acc = acc + hinv[i][l] * term
                row.append(normalize(Fraction(1, 2) * acc))
            plane.append(row)
        out.append(plane)
    return out


def check_sigma_parallel(sigma, h, chart: SuperChart, H=None, samples=None, tol=1e-8):
    """Covariant constancy of sigma: coordinate derivative plus base
    Christoffel action minus the fiber connection action, sampled."""
    coords = chart.coords
    m, n = chart.m, chart.n
    sigma = [[_as_expr(e) for e in row] for row in sigma]
    if H is None:
        H = induced_fiber_metric(h, sigma, samples=samples)
    gamma_h = christoffel(h, coords)
    if n == m:
        omega = christoffel(H, coords)
        connection = "levi-civita"
    else:
        Hinv = linalg.inverse_symbolic([[_as_expr(e) for e in row] for row in H])
        omega = []
        for B in range(n):
            plane = []
            for k in range(m):
                row = []
                for A in range(n):
                    acc = sc.ZERO
                    for C in range(n):
                        acc = acc + Hinv[B][C] * sc.differentiate(_as_expr(H[C][A]), coords[k])
                    row.append(normalize(Fraction(1, 2) * acc))
                plane.append(row)
            omega.append(plane)
        connection = "metric-gauge"
    residuals = []
    for i in range(m):
        for k in range(m):
            for A in range(n):
                r = sc.differentiate(sigma[i][A], coords[k])
                for j in range(m):
                    r = r + gamma_h[i][k][j] * sigma[j][A]
                for B in range(n):
                    r = r - sigma[i][B] * omega[B][k][A]
                residuals.append(normalize(r))
    if all(sc.is_zero(r) for r in residuals):
        return {"status": "pass", "max_residual": 0.0, "connection": connection, "symbolic": True}
    symbols = set()
    for r in residuals:
        symbols |= sc.free_symbols(r)
    if samples is None:
        samples = _default_samples(symbols)
    worst = 0.0
    for binding in samples:
        for r in residuals:
            try:
                worst = max(worst, abs(float(sc.evaluate(r, binding))))
            except ZeroDivisionError:
                continue
    return {
        "status": "pass" if worst < tol else "fail",
        "max_residual": worst,
        "connection": connection,
        "symbolic": False,
    }


def closure_check(spec: ActionSpec, samples=None, tol=1e-8):
    """Sampled check that brackets of basis generators stay in their span."""
    chart = spec.chart
    coords = chart.coords
    m = chart.m
    dim_g = spec.dim_g
    brackets = []
    for alpha in range(dim_g):
        for beta in range(alpha + 1, dim_g):
            comp = []
            for i in range(m):
                acc = sc.ZERO
                for k in range(m):
                    acc = acc + spec.T[alpha][k] * sc.differentiate(spec.T[beta][i], coords[k])
                    acc = acc - spec.T[beta][k] * sc.differentiate(spec.T[alpha][i], coords[k])
                comp.append(normalize(acc))
            brackets.append(((alpha, beta), comp))
    if not brackets:
        return {"status": "pass", "max_residual": 0.0, "pairs": 0}
    symbols = set()
    for _, comp in brackets:
        for e in comp:
            symbols |= sc.free_symbols(e)
    for row in spec.T:
        for e in row:
            symbols |= sc.free_symbols(e)
    if samples is None:
        samples = _default_samples(symbols, count=max(6, 2 * dim_g))
    worst = 0.0
    for _, comp in brackets:
        rows = []
        rhs = []
        for binding in samples:
            for i in range(m):
                rows.append([float(sc.evaluate(spec.T[g][i], binding)) for g in range(dim_g)])
                rhs.append(float(sc.evaluate(comp[i], binding)))
        sol, *_ = np.linalg.lstsq(np.array(rows), np.array(rhs), rcond=None)
        resid = np.array(rows) @ sol - np.array(rhs)
        worst = max(worst, float(np.max(np.abs(resid))) if len(resid) else 0.0)
    return {
        "status": "pass" if worst < tol else "fail",
        "max_residual": worst,
        "pairs": len(brackets),
    }


# ---------------------------------------------------------------------------
# BRST verification.
# ---------------------------------------------------------------------------


def _field_residual_text(X) -> list:
    out = []
    if isinstance(X, CField):
        for i, comp in enumerate(X.a, start=1):
            if not comp.is_zero():
                out.append(
                    "a[%d] = (%s) + i(%s)"
                    % (i, to_super_text(comp.re), to_super_text(comp.im))
                )
        for A, comp in enumerate(X.b, start=1):
            if not comp.is_zero():
                out.append(
                    "b[%d] = (%s) + i(%s)"
                    % (A, to_super_text(comp.re), to_super_text(comp.im))
                )
        return out
    for i, comp in enumerate(X.a, start=1):
        if not comp.is_zero():
            out.append("a[%d] = %s" % (i, to_super_text(comp)))
    for A, comp in enumerate(X.b, start=1):
        if not comp.is_zero():
            out.append("b[%d] = %s" % (A, to_super_text(comp)))
    return out


def _real_to_cfield(X: SuperVectorField) -> CField:
    return CField(
        X.chart,
        X.parity,
        tuple(CSuper.real(c) for c in X.a),
        tuple(CSuper.real(c) for c in X.b),
    )


def _expm(A: np.ndarray) -> np.ndarray:
    norm = float(np.max(np.abs(A))) if A.size else 0.0
    k = 0
    while norm > 0.5:
        norm /= 2.0
        k += 1
    B = A / (2**k)
    out = np.eye(A.shape[0])
    term = np.eye(A.shape[0])
    for j in range(1, 19):
        term = term @ B / j
        out = out + term
    for _ in range(k):
        out = out @ out
    return out


def _rk4(fun, y0: np.ndarray, s: float, steps: int = 240) -> np.ndarray:
    h = s / steps
    y = np.array(y0, dtype=float)
    for _ in range(steps):
        k1 = fun(y)
        k2 = fun(y + 0.5 * h * k1)
        k3 = fun(y + 0.5 * h * k2)
        k4 = fun(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def _is_affine(expr: ScalarExpr, coords) -> bool:
    for c1 in coords:
        d = sc.differentiate(expr, c1)
        for c2 in coords:
            if not sc.is_zero(sc.differentiate(d, c2)):
                return False
    return True


def _finite_equivariance(Q: SuperVectorField, spec: ActionSpec, samples, tol):
    """Flow-transported comparison of Q along sampled one-parameter subgroups.

    Needs an affine base action and coordinate-independent fiber generators;
    anything else is reported as skipped. Symbolic weights in the generators
    are bound from the sample points.
    """
    chart = spec.chart
    coords = chart.coords
    m, n = chart.m, chart.n
    for row in spec.T:
        for e in row:
            if not _is_affine(e, coords):
                return {"status": "skipped(nonlinear base action)", "max_error": None}
    if spec.U is not None:
        for block in spec.U:
            for row in block:
                for e in row:
                    if any(not sc.is_zero(sc.differentiate(e, c)) for c in coords):
                        return {
                            "status": "skipped(coordinate-dependent fiber action)",
                            "max_error": None,
                        }
    try:
        sigma = sigma_from_Q(Q, samples=samples)
    except (NotLinearInTheta, NotInjective):
        return {"status": "skipped(no linear symbol available)", "max_error": None}
    if any(comp.grades() not in ((), (0,)) for comp in Q.b):
        return {"status": "skipped(odd components not of grade zero)", "max_error": None}

    worst = 0.0
    directions = [
        tuple(1 if g == alpha else 0 for g in range(spec.dim_g)) for alpha in range(spec.dim_g)
    ]
    if spec.dim_g > 1:
        directions.append(tuple(1 for _ in range(spec.dim_g)))
    for direction in directions:
        comps = []
        for i in range(m):
            comp = sc.ZERO
            for alpha, w in enumerate(direction):
                if w:
                    comp = comp + w * spec.T[alpha][i]
            comps.append(normalize(comp))
        wexpr = [[sc.ZERO] * n for _ in range(n)]
        if spec.U is not None:
            for Arow in range(n):
                for B in range(n):
                    vv = sc.ZERO
                    for alpha, w in enumerate(direction):
                        if w:
                            vv = vv + w * spec.U[alpha][B][Arow]
                    wexpr[Arow][B] = normalize(vv)
        for binding in samples[:3]:
            origin = dict(binding)
            for c in coords:
                origin[c] = 0
            A = np.array(
                [
                    [
                        float(sc.evaluate(sc.differentiate(comps[i], coords[j]), origin))
                        for j in range(m)
                    ]
                    for i in range(m)
                ]
            )
            cvec = np.array([float(sc.evaluate(comps[i], origin)) for i in range(m)])
            W = np.array(
                [[float(sc.evaluate(wexpr[i][j], origin)) for j in range(n)] for i in range(n)]
            )
            p = np.array([float(Fraction(binding[c])) for c in coords])
            for s in (0.3, 0.7):
                M = _expm(s * A)
                R = _expm(s * W)
                flowed = _rk4(lambda y: A @ y + cvec, p, s)
                moved = dict(binding)
                for c, v in zip(coords, flowed):
                    moved[c] = float(v)
                sig_p = np.array(
                    [[float(sc.evaluate(e, binding)) for e in row] for row in sigma]
                )
                sig_gp = np.array(
                    [[float(sc.evaluate(e, moved)) for e in row] for row in sigma]
                )
                worst = max(worst, float(np.max(np.abs(sig_gp @ R - M @ sig_p))))
                b_p = np.array([float(sc.evaluate(comp.body(), binding)) for comp in Q.b])
                b_gp = np.array([float(sc.evaluate(comp.body(), moved)) for comp in Q.b])
                worst = max(worst, float(np.max(np.abs(b_gp - R @ b_p))))
    return {"status": "pass" if worst < tol else "fail", "max_error": worst}


def verify_brst(Q, spec: ActionSpec, xi=None, samples=None, lift=None, tol=1e-8):
    """Check the three defining conditions of a BRST operator.

    Returns a report dict; failures are entries, not exceptions.
    """
    is_complex = isinstance(Q, CField)
    lift_spec = spec
    if spec.U is None and spec.chart.n == spec.chart.m:
        lift_spec = tautological_lift(spec)
    if lift is None:
        if is_complex:
            lift = kahler_lift(spec, xi)
        elif lift_spec.U is not None:
            lift = lifted_field(lift_spec, xi)
        else:
            lift = fundamental_field(spec, xi)

    conditions = []

    if is_complex:
        half_sq = c_field_scale(c_graded_commutator(Q, Q), Fraction(1, 2))
        residual = c_field_sub(half_sq, lift)
        ok = residual.is_zero()
    else:
        half_sq = scale_field(graded_commutator(Q, Q), Fraction(1, 2))
        residual = add_fields(half_sq, scale_field(lift, Fraction(-1)))
        ok = field_is_zero(residual)
    conditions.append(
        {
            "name": "square_equals_lift",
            "status": "pass" if ok else "fail",
            "residual": None if ok else _field_residual_text(residual),
        }
    )

    inf_fail = []
    for alpha, name in enumerate(spec.params):
        unit = {p: (1 if p == name else 0) for p in spec.params}
        if is_complex:
            gen = kahler_lift(spec, unit)
            comm = c_graded_commutator(gen, Q)
            good = comm.is_zero()
        else:
            if lift_spec.U is not None:
                gen = lifted_field(lift_spec, unit)
            else:
                gen = fundamental_field(spec, unit)
            comm = graded_commutator(gen, Q)
            good = field_is_zero(comm)
        if not good:
            inf_fail.append(name)
    conditions.append(
        {
            "name": "equivariance_infinitesimal",
            "status": "pass" if not inf_fail else "fail",
            "residual": inf_fail or None,
        }
    )

    symbols = set()
    for comp in list(Q.a) + list(Q.b):
        parts = (comp.re, comp.im) if is_complex else (comp,)
        for part in parts:
            for c in part.terms.values():
                symbols |= sc.free_symbols(c)
    symbols |= set(spec.chart.coords)
    if samples is None:
        samples = _default_samples(symbols)
    if is_complex:
        conditions.append(
            {
                "name": "equivariance_finite",
                "status": "skipped(complex field: infinitesimal check only)",
                "max_error": None,
            }
        )
    else:
        fin = _finite_equivariance(Q, lift_spec, samples, tol)
        fin["name"] = "equivariance_finite"
        conditions.append(fin)

    try:
        sigma_from_Q(Q, samples=samples)
        conditions.append({"name": "sigma_injective", "status": "pass", "residual": None})
    except (NotLinearInTheta, NotInjective) as exc:
        conditions.append(
            {"name": "sigma_injective", "status": "fail", "residual": str(exc)}
        )

    passed = all(
        c["status"] == "pass" or c["status"].startswith("skipped") for c in conditions
    )
    return {"passed": passed, "conditions": conditions}
