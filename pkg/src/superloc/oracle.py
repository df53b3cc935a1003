"""Independent numeric oracle: adaptive quadrature and boundary checks.

Everything here deliberately avoids the localization machinery; integrals
are computed from plain densities so the two paths can be compared.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Callable, Mapping, Optional, Sequence, Tuple

import numpy as np

from . import linalg
from . import scalars as sc
from .actions import check_sigma_parallel
from .errors import AssumptionViolated, NoConvergence, WrongGrade
from .grassmann import SuperFunction, SuperVectorField
from .scalars import ScalarExpr

_GL_CACHE: dict = {}


def _as_expr(value) -> ScalarExpr:
    if isinstance(value, ScalarExpr):
        return value
    f = Fraction(value)
    return sc.rational(f.numerator, f.denominator)


def _compile(value) -> Callable[[Mapping], float]:
    return sc.compile_numeric(sc.normalize(_as_expr(value)))


def _gl_nodes(order: int):
    if order not in _GL_CACHE:
        x, w = np.polynomial.legendre.leggauss(order)
        _GL_CACHE[order] = (tuple(float(v) for v in x), tuple(float(v) for v in w))
    return _GL_CACHE[order]


def thread_count() -> int:
    """Worker cap taken from SUPERLOC_THREADS; defaults to serial."""
    raw = os.environ.get("SUPERLOC_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _cell_integral(f, lo, hi, order: int) -> float:
    nodes, weights = _gl_nodes(order)
    d = len(lo)
    mids = [(lo[k] + hi[k]) / 2.0 for k in range(d)]
    halves = [(hi[k] - lo[k]) / 2.0 for k in range(d)]
    scale = 1.0
    for h in halves:
        scale *= h
    total = 0.0
    for combo in product(range(order), repeat=d):
        w = 1.0
        for k in combo:
            w *= weights[k]
        point = tuple(mids[k] + halves[k] * nodes[combo[k]] for k in range(d))
        total += w * f(point)
    return total * scale


def _split(lo, hi):
    d = len(lo)
    mids = [(lo[k] + hi[k]) / 2.0 for k in range(d)]
    cells = []
    for corner in product(range(2), repeat=d):
        clo = tuple(lo[k] if corner[k] == 0 else mids[k] for k in range(d))
        chi = tuple(mids[k] if corner[k] == 0 else hi[k] for k in range(d))
        cells.append((clo, chi))
    return cells


def _adaptive(f, lo, hi, tol, order, depth, max_depth) -> float:
    coarse = _cell_integral(f, lo, hi, order)
    children = _split(lo, hi)
    fine = sum(_cell_integral(f, clo, chi, order) for clo, chi in children)
    if abs(fine - coarse) <= max(tol, 1e-15 * (1.0 + abs(fine))):
        return fine
    if depth >= max_depth:
        raise NoConvergence(
            "quadrature cell at depth %d did not converge" % (depth,)
        )
    child_tol = tol / len(children)
    return sum(
        _adaptive(f, clo, chi, child_tol, order, depth + 1, max_depth)
        for clo, chi in children
    )


def quadrature(
    f: Callable[[tuple], float],
    box: Sequence[Tuple[float, float]],
    tol: float = 1e-9,
    order: int = 12,
    max_depth: int = 12,
) -> float:
    """Adaptive tensor-product Gauss-Legendre integral over a box.

    Cells are refined dyadically with a fixed traversal order and summed in
    that order, so results are bit-for-bit reproducible for a given
    tolerance no matter how many workers SUPERLOC_THREADS grants.
    """
    lo = tuple(float(a) for a, _ in box)
    hi = tuple(float(b) for _, b in box)
    cells = _split(lo, hi)
    child_tol = tol / len(cells)

    def run(cell):
        clo, chi = cell
        return _adaptive(f, clo, chi, child_tol, order, 1, max_depth)

    workers = thread_count()
    if workers <= 1 or len(cells) == 1:
        parts = [run(cell) for cell in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, cells))
    return math.fsum(parts)


@dataclass(frozen=True)
class OraclePatch:
    """One coordinate box with a fully reduced scalar density to integrate."""

    coords: Tuple[str, ...]
    box: tuple
    integrand: ScalarExpr


def global_berezin(patches: Sequence[OraclePatch], binding=None, tol: float = 1e-8):
    """Sum of patch integrals of explicit densities; the oracle side of
    every comparison."""
    binding = dict(binding or {})
    total = 0.0
    share = tol / max(1, len(patches))
    for patch in patches:
        fn = sc.compile_numeric(patch.integrand)

        def f(point, fn=fn, names=patch.coords):
            local = dict(binding)
            local.update(zip(names, point))
            return fn(local)

        total += quadrature(f, patch.box, tol=share)
    return total


def berezin_density(F: SuperFunction, h, H) -> Callable[[Mapping], float]:
    """Numeric density: top theta-coefficient times det(h)^1/2 / det(H)^1/2."""
    top = _compile(F.top_component())
    det_h = _compile(linalg.det([list(r) for r in h]))
    det_H = _compile(linalg.det([list(r) for r in H]))

    def density(binding) -> float:
        return top(binding) * math.sqrt(det_h(binding)) / math.sqrt(det_H(binding))

    return density


# ---------------------------------------------------------------------------
# Hodge duals and the boundary form of the divergence identity.
# ---------------------------------------------------------------------------


def hodge_dual_H(nu: SuperFunction, H) -> Callable[[Mapping], np.ndarray]:
    """Dual of a grade n-1 superfunction along the odd directions.

    Returns an evaluator for the n components indexed by the missing
    generator, with the 1/det(H)^{1/2} density included.
    """
    n = nu.chart.n
    if any(len(idx) != n - 1 for idx in nu.terms):
        raise WrongGrade("dual needs a homogeneous superfunction of grade n-1")
    det_H = _compile(linalg.det([list(r) for r in H]))
    fact = math.factorial(n - 1)
    comps = []
    for A in range(1, n + 1):
        comp = tuple(B for B in range(1, n + 1) if B != A)
        coeff = nu.terms.get(comp)
        if coeff is None:
            comps.append(None)
            continue
        sign = _eps_sign((A,) + comp)
        comps.append((sign, _compile(coeff)))

    def evaluate(binding) -> np.ndarray:
        scale = 1.0 / (fact * math.sqrt(det_H(binding)))
        out = np.zeros(n)
        for k, entry in enumerate(comps):
            if entry is not None:
                sign, fn = entry
                out[k] = sign * fn(binding) * scale
        return out

    return evaluate


def _eps_sign(perm: tuple) -> int:
    sign = 1
    items = list(perm)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


def hodge_dual_h(alpha, h, coords: Tuple[str, ...]) -> Callable[[Mapping], np.ndarray]:
    """Metric dual of a base 1-form, as the flux coefficients of the
    induced top-minus-one form.

    Slot k holds the coefficient of the wedge of all dx except dx^k,
    already carrying the (-1)^(k-1) reordering sign, so summing slot k
    over the faces normal to axis k integrates the form over a boundary.
    """
    m = len(coords)
    alpha_fns = [_compile(e) for e in alpha]
    h_fns = [[_compile(e) for e in row] for row in h]

    def evaluate(binding) -> np.ndarray:
        hm = np.array([[f(binding) for f in row] for row in h_fns])
        av = np.array([f(binding) for f in alpha_fns])
        w = np.linalg.solve(hm, av)
        root = math.sqrt(np.linalg.det(hm))
        return np.array([(-1) ** k * root * w[k] for k in range(m)])

    return evaluate


def boundary_flux(
    w: Callable[[Mapping], np.ndarray],
    h,
    coords: Tuple[str, ...],
    box,
    faces: Optional[Sequence[Tuple[int, int]]] = None,
    tol: float = 1e-8,
    binding=None,
) -> float:
    """Outward flux of a vector field through selected box faces.

    The integrand on the face normal to axis k is det(h)^{1/2} w^k; faces
    default to all of them, and are dropped for periodic axes by passing an
    explicit list of (axis, side) pairs with side = +1 or -1.
    """
    binding = dict(binding or {})
    m = len(coords)
    det_h = _compile(linalg.det([list(r) for r in h]))
    if faces is None:
        faces = [(k, s) for k in range(m) for s in (1, -1)]
    total = 0.0
    share = tol / max(1, len(faces))
    for axis, side in faces:
        value = box[axis][1] if side > 0 else box[axis][0]
        rest = [box[k] for k in range(m) if k != axis]
        names = [coords[k] for k in range(m) if k != axis]

        def f(point, axis=axis, value=value, names=names):
            local = dict(binding)
            local[coords[axis]] = value
            local.update(zip(names, point))
            return math.sqrt(det_h(local)) * w(local)[axis]

        if rest:
            part = quadrature(f, rest, tol=share)
        else:
            part = f(())
        total += side * part
    return total


def super_stokes_check(
    nu: SuperFunction,
    Q: SuperVectorField,
    sigma,
    h,
    H,
    box,
    faces=None,
    tol: float = 1e-7,
    binding=None,
) -> dict:
    """Bulk integral of Q(nu) against the Berezinian versus the boundary
    flux of the doubly dualized section; reports both values.

    The identity needs sigma covariantly constant, so that is checked
    first on points inside the box.
    """
    binding = dict(binding or {})
    samples = []
    for k, frac in enumerate((0.5, 0.375, 0.6875)):
        point = dict(binding)
        for axis, (lo, hi) in enumerate(box):
            mix = frac if axis % 2 == k % 2 else 1 - frac
            point[nu.chart.coords[axis]] = lo + mix * (hi - lo)
        samples.append(point)
    assumption = check_sigma_parallel(
        sigma, h, nu.chart, H=H, samples=samples, tol=max(tol, 1e-8)
    )
    if assumption["status"] != "pass":
        raise AssumptionViolated(
            "sigma is not parallel on this domain, residual %s"
            % (assumption["max_residual"],)
        )
    lhs_density = berezin_density(Q.apply(nu), h, H)

    def lhs_f(point):
        local = dict(binding)
        local.update(zip(nu.chart.coords, point))
        return lhs_density(local)

    lhs = quadrature(lhs_f, box, tol=tol / 4)
    dual = hodge_dual_H(nu, H)
    sigma_fns = [[_compile(e) for e in row] for row in sigma]

    def w(local) -> np.ndarray:
        d = dual(local)
        return np.array(
            [sum(fn(local) * d[A] for A, fn in enumerate(row)) for row in sigma_fns]
        )

    rhs = boundary_flux(
        w, h, nu.chart.coords, box, faces=faces, tol=tol / 4, binding=binding
    )
    return {
        "bulk": lhs,
        "boundary": rhs,
        "difference": abs(lhs - rhs),
        "status": "pass" if abs(lhs - rhs) <= tol else "fail",
    }
