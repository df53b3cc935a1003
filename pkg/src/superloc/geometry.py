"""Worked geometries for the scenario suite.

The round two-sphere with its rotation action is the central example: two
stereographic charts related by an orientation-reversing inversion, with
the height function and the area density written per chart. A flat plane
with the same rotation, and an annulus in polar coordinates, cover the
boundary-identity scenarios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

from . import scalars as sc
from .actions import ActionSpec
from .grassmann import SuperChart, SuperFunction
from .localize import FixedPointData, find_fixed_points
from .oracle import OraclePatch
from .scalars import ScalarExpr

X = sc.sym("x")
Y = sc.sym("y")
T = sc.sym("t")

PLANE_CHART = SuperChart(("x", "y"), 2)
PLANE_ROTATION = ActionSpec(("t",), PLANE_CHART, ((sc.ZERO - Y, X),))


@dataclass(frozen=True)
class SphereChart:
    """One stereographic chart of the unit sphere with its rotation data.

    The chart covers the sphere minus the opposite pole; z is the height
    function and omega_coeff the theta^1 theta^2 coefficient of the area
    form, both written in this chart. The southern chart is reached by the
    inversion (x, y) -> (x, y)/r^2, which reverses orientation, so its
    orientation flag, z, and area coefficient all flip sign.
    """

    name: str
    chart: SuperChart
    spec: ActionSpec
    h: tuple
    z: ScalarExpr
    omega_coeff: ScalarExpr
    orientation: int


def sphere_chart(name: str) -> SphereChart:
    if name not in ("north", "south"):
        raise ValueError("chart name must be north or south")
    sign = 1 if name == "north" else -1
    den = sc.rational(1) + X * X + Y * Y
    conformal = sc.rational(4) * den ** (-2)
    h = ((conformal, sc.ZERO), (sc.ZERO, conformal))
    z = sc.rational(sign) * (sc.rational(1) - X * X - Y * Y) * den ** (-1)
    omega = sc.rational(4 * sign) * den ** (-2)
    return SphereChart(name, PLANE_CHART, PLANE_ROTATION, h, z, omega, sign)


def sphere_atlas() -> Tuple[SphereChart, SphereChart]:
    return (sphere_chart("north"), sphere_chart("south"))


def height_exponential(patch: SphereChart) -> SuperFunction:
    """exp(-t z) (1 + omega): the closed integrand whose localized value
    has the closed form 2 pi (e^t - e^{-t}) / t."""
    body = sc.exp(sc.ZERO - T * patch.z)
    return SuperFunction(
        patch.chart,
        {(): body, (1, 2): sc.normalize(body * patch.omega_coeff)},
    )


def closed_power(patch: SphereChart, k: int) -> SuperFunction:
    """k-th power of the closed generator omega - t z."""
    if k < 0:
        raise ValueError("power must be non-negative")
    base = sc.ZERO - T * patch.z
    terms = {(): sc.normalize(base ** k) if k else sc.ONE}
    if k >= 1:
        terms[(1, 2)] = sc.normalize(
            sc.rational(k) * base ** (k - 1) * patch.omega_coeff
        )
    return SuperFunction(patch.chart, terms)


def closed_polynomial(patch: SphereChart, coeffs) -> SuperFunction:
    """Linear combination sum_k coeffs[k] (omega - t z)^k."""
    total = SuperFunction.zero(patch.chart)
    for k, c in enumerate(coeffs):
        total = total + Fraction(c) * closed_power(patch, k)
    return total


def sphere_fixed_points():
    """Both poles, each at the origin of its own chart."""
    out = []
    for patch in sphere_atlas():
        out.extend(
            find_fixed_points(
                patch.spec,
                strategy="declared",
                declared=[(0, 0)],
                h=patch.h,
                chart_id=patch.name,
                orientation=patch.orientation,
            )
        )
    return out


def sphere_oracle_patch() -> OraclePatch:
    """Angle coordinates (colatitude, azimuth) cover the sphere up to a
    measure-zero set; the height integrand reduces to a 1D profile."""
    u = sc.sym("u")
    return OraclePatch(
        ("u", "v"),
        ((0.0, math.pi), (0.0, 2 * math.pi)),
        sc.exp(sc.ZERO - T * sc.cos(u)) * sc.sin(u),
    )


def gaussian_rotation_form() -> SuperFunction:
    """(1 - theta^1 theta^2) exp(-(t/2) r^2) on the flat plane, closed for
    the rotation field and integrable at infinity for t > 0."""
    body = sc.exp(sc.rational(-1, 2) * T * (X * X + Y * Y))
    return SuperFunction(
        PLANE_CHART, {(): body, (1, 2): sc.normalize(sc.ZERO - body)}
    )


def gaussian_oracle_patch(half_width: float = 14.0) -> OraclePatch:
    """Top component of the flat Gaussian integrand on a truncated box;
    the tail beyond the default width is far below the tolerances used."""
    body = sc.exp(sc.rational(-1, 2) * T * (X * X + Y * Y))
    return OraclePatch(
        ("x", "y"),
        ((-half_width, half_width), (-half_width, half_width)),
        sc.normalize(sc.ZERO - body),
    )


def plane_fixed_point():
    return find_fixed_points(
        PLANE_ROTATION,
        strategy="declared",
        declared=[(0, 0)],
        chart_id="plane",
    )


@dataclass(frozen=True)
class DomainData:
    """A coordinate box with metric and action data for boundary checks."""

    chart: SuperChart
    spec: ActionSpec
    h: tuple
    box: tuple
    faces: Optional[tuple]


def flat_box_domain() -> DomainData:
    eye = ((sc.ONE, sc.ZERO), (sc.ZERO, sc.ONE))
    return DomainData(PLANE_CHART, PLANE_ROTATION, eye, ((0.0, 1.0), (0.0, 1.0)), None)


def annulus_domain(inner: float = 0.5) -> DomainData:
    """Polar coordinates on the plane, radial faces only; the angle is
    periodic and the inner circle keeps the rotation fixed point outside."""
    chart = SuperChart(("r", "phi"), 2)
    r = sc.sym("r")
    spec = ActionSpec(("t",), chart, ((sc.ZERO, sc.ONE),))
    h = ((sc.ONE, sc.ZERO), (sc.ZERO, r * r))
    return DomainData(
        chart, spec, h, ((inner, 1.0), (0.0, 2 * math.pi)), ((0, 1), (0, -1))
    )
