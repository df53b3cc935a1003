"""Matrix-model data with two commuting symmetries: constraints, group
actions, and the odd vector fields that square to the symmetry generator.

The bosonic data are four complex matrices (B1, B2 of size k x k, I of
size k x N, J of size N x k).  Two layers coexist:

* a numeric layer (`ADHMData`, exact complex rationals) for constraint
  residuals and finite group actions;
* a symbolic layer (`ADHMSuperChart`) where every complex entry is
  flattened into a real coordinate pair and every boson gets one odd
  partner at the same position.  The partners are, in order, M1, M2,
  mu_I, mu_J and, when the multiplier sector is present, chi_R, chi_C,
  eta paired with the extra bosons H_R, H_C, phibar.

With that positional pairing the odd operator on the matter sector has
the identity symbol map, and its square is the lifted even field.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Mapping, Optional, Sequence, Tuple

from . import scalars as sc
from .actions import ActionSpec
from .cgrass import (
    CSuper,
    cmat_add,
    cmat_commutator,
    cmat_dagger,
    cmat_mul,
    cmat_neg,
    cmat_scale,
    cmat_sub,
)
from .errors import (
    BadSusy,
    DimensionMismatch,
    NonlinearTtilde,
    NotUnitary,
    ShapeMismatch,
    StabilizerNotTrivial,
)
from .grassmann import SuperChart, SuperFunction, SuperVectorField
from .linalg import det


# ---------------------------------------------------------------------------
# exact complex numbers and small dense matrices over them


@dataclass(frozen=True)
class CNum:
    """Complex number with exact rational parts."""

    re: Fraction
    im: Fraction

    @staticmethod
    def of(value) -> "CNum":
        if isinstance(value, CNum):
            return value
        if isinstance(value, (int, Fraction)):
            return CNum(Fraction(value), Fraction(0))
        if isinstance(value, tuple) and len(value) == 2:
            return CNum(Fraction(value[0]), Fraction(value[1]))
        raise TypeError("cannot interpret %r as an exact complex number" % (value,))

    def __add__(self, other) -> "CNum":
        other = CNum.of(other)
        return CNum(self.re + other.re, self.im + other.im)

    def __sub__(self, other) -> "CNum":
        other = CNum.of(other)
        return CNum(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "CNum":
        return CNum(-self.re, -self.im)

    def __mul__(self, other) -> "CNum":
        other = CNum.of(other)
        return CNum(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __radd__ = __add__
    __rmul__ = __mul__

    def conj(self) -> "CNum":
        return CNum(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def inv(self) -> "CNum":
        d = self.abs2()
        if d == 0:
            raise ZeroDivisionError("inverse of zero")
        return CNum(self.re / d, -self.im / d)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def as_complex(self) -> complex:
        return complex(float(self.re), float(self.im))


C_ZERO = CNum(Fraction(0), Fraction(0))
C_ONE = CNum(Fraction(1), Fraction(0))

NMatrix = Tuple[Tuple[CNum, ...], ...]


def nmat(rows) -> NMatrix:
    return tuple(tuple(CNum.of(x) for x in row) for row in rows)


def nmat_zero(rows: int, cols: int) -> NMatrix:
    return tuple(tuple(C_ZERO for _ in range(cols)) for _ in range(rows))


def nmat_eye(n: int) -> NMatrix:
    return tuple(
        tuple(C_ONE if i == j else C_ZERO for j in range(n)) for i in range(n)
    )


def nmat_add(A: NMatrix, B: NMatrix) -> NMatrix:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(A, B))


def nmat_sub(A: NMatrix, B: NMatrix) -> NMatrix:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(A, B))


def nmat_scale(A: NMatrix, z) -> NMatrix:
    z = CNum.of(z)
    return tuple(tuple(z * x for x in row) for row in A)


def nmat_mul(A: NMatrix, B: NMatrix) -> NMatrix:
    if len(A[0]) != len(B):
        raise ShapeMismatch("inner dimensions differ")
    return tuple(
        tuple(
            sum((A[i][l] * B[l][j] for l in range(len(B))), C_ZERO)
            for j in range(len(B[0]))
        )
        for i in range(len(A))
    )


def nmat_dagger(A: NMatrix) -> NMatrix:
    return tuple(
        tuple(A[i][j].conj() for i in range(len(A))) for j in range(len(A[0]))
    )


def nmat_commutator(A: NMatrix, B: NMatrix) -> NMatrix:
    return nmat_sub(nmat_mul(A, B), nmat_mul(B, A))


def nmat_equal(A: NMatrix, B: NMatrix) -> bool:
    return all(
        (x - y).is_zero() for ra, rb in zip(A, B) for x, y in zip(ra, rb)
    )


def nmat_norm2(A: NMatrix) -> Fraction:
    """Squared Frobenius norm, an exact rational."""
    return sum((x.abs2() for row in A for x in row), Fraction(0))


def nmat_inverse(A: NMatrix) -> NMatrix:
    n = len(A)
    work = [list(row) + list(e) for row, e in zip(A, nmat_eye(n))]
    for col in range(n):
        pivot = next((r for r in range(col, n) if not work[r][col].is_zero()), None)
        if pivot is None:
            raise ZeroDivisionError("matrix is singular")
        work[col], work[pivot] = work[pivot], work[col]
        scale = work[col][col].inv()
        work[col] = [scale * x for x in work[col]]
        for r in range(n):
            if r != col and not work[r][col].is_zero():
                factor = work[r][col]
                work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
    return tuple(tuple(row[n:]) for row in work)


# ---------------------------------------------------------------------------
# numeric data, constraints, and group actions


@dataclass(frozen=True)
class ADHMData:
    """Exact matrix data (B1, B2, I, J) for instanton number k, group rank N."""

    B1: NMatrix
    B2: NMatrix
    I: NMatrix
    J: NMatrix

    def __post_init__(self) -> None:
        k = len(self.B1)
        if any(len(row) != k for row in self.B1):
            raise ShapeMismatch("B1 must be square")
        if len(self.B2) != k or any(len(row) != k for row in self.B2):
            raise ShapeMismatch("B2 must be %d x %d" % (k, k))
        if len(self.I) != k:
            raise ShapeMismatch("I must have %d rows" % (k,))
        N = len(self.I[0]) if k else 0
        if any(len(row) != N for row in self.I):
            raise ShapeMismatch("ragged I")
        if len(self.J) != N or any(len(row) != k for row in self.J):
            raise ShapeMismatch("J must be %d x %d" % (N, k))

    @property
    def k(self) -> int:
        return len(self.B1)

    @property
    def N(self) -> int:
        return len(self.I[0])

    @property
    def moduli_dimension(self) -> int:
        return 4 * self.k * self.N


def adhm_data(B1, B2, I, J) -> ADHMData:
    return ADHMData(nmat(B1), nmat(B2), nmat(I), nmat(J))


def constraint_real(d: ADHMData) -> NMatrix:
    """[B1,B1+] + [B2,B2+] + I I+ - J+ J, a hermitian k x k matrix."""
    out = nmat_add(
        nmat_commutator(d.B1, nmat_dagger(d.B1)),
        nmat_commutator(d.B2, nmat_dagger(d.B2)),
    )
    out = nmat_add(out, nmat_mul(d.I, nmat_dagger(d.I)))
    out = nmat_sub(out, nmat_mul(nmat_dagger(d.J), d.J))
    assert nmat_equal(out, nmat_dagger(out))
    return out


def constraint_complex(d: ADHMData) -> NMatrix:
    """[B1,B2] + I J, a k x k matrix."""
    return nmat_add(nmat_commutator(d.B1, d.B2), nmat_mul(d.I, d.J))


@dataclass(frozen=True)
class GroupElement:
    """Block (U, V, t1, t2); omitted blocks act as the identity."""

    U: Optional[NMatrix] = None
    V: Optional[NMatrix] = None
    t1: Optional[CNum] = None
    t2: Optional[CNum] = None


def _check_unitary(M: NMatrix, label: str) -> None:
    if not nmat_equal(nmat_mul(nmat_dagger(M), M), nmat_eye(len(M))):
        raise NotUnitary("%s block is not exactly unitary" % (label,))


def group_act(g: GroupElement, d: ADHMData) -> ADHMData:
    """Conjugation on B1, B2; framing rotation on I, J; torus phases."""
    U = g.U if g.U is not None else nmat_eye(d.k)
    V = g.V if g.V is not None else nmat_eye(d.N)
    t1 = CNum.of(g.t1) if g.t1 is not None else C_ONE
    t2 = CNum.of(g.t2) if g.t2 is not None else C_ONE
    _check_unitary(U, "gauge")
    _check_unitary(V, "framing")
    for t, label in ((t1, "first torus"), (t2, "second torus")):
        if t.abs2() != 1:
            raise NotUnitary("%s phase is not on the unit circle" % (label,))
    Ud = nmat_dagger(U)
    Vd = nmat_dagger(V)
    return ADHMData(
        nmat_scale(nmat_mul(nmat_mul(U, d.B1), Ud), t1),
        nmat_scale(nmat_mul(nmat_mul(U, d.B2), Ud), t2),
        nmat_mul(nmat_mul(U, d.I), Vd),
        nmat_scale(nmat_mul(nmat_mul(V, d.J), Ud), t1 * t2),
    )


def cayley_unitary(A: NMatrix) -> NMatrix:
    """(1 - A)(1 + A)^-1 for exact anti-hermitian A, an exact unitary."""
    if not nmat_equal(nmat_dagger(A), nmat_scale(A, CNum.of(-1))):
        raise ShapeMismatch("Cayley input must be anti-hermitian")
    one = nmat_eye(len(A))
    return nmat_mul(nmat_sub(one, A), nmat_inverse(nmat_add(one, A)))


def random_antihermitian(n: int, rng: random.Random) -> NMatrix:
    rows = [[C_ZERO] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = CNum(Fraction(0), Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        for j in range(i + 1, n):
            z = CNum(
                Fraction(rng.randint(-4, 4), rng.randint(1, 3)),
                Fraction(rng.randint(-4, 4), rng.randint(1, 3)),
            )
            rows[i][j] = z
            rows[j][i] = -z.conj()
    return tuple(tuple(r) for r in rows)


def random_unitary(n: int, rng: random.Random) -> NMatrix:
    return cayley_unitary(random_antihermitian(n, rng))


def unit_phase(rng: random.Random) -> CNum:
    """Random exact point on the unit circle from a Pythagorean pair."""
    m = rng.randint(2, 9)
    n = rng.randint(1, m - 1)
    t = CNum(
        Fraction(m * m - n * n, m * m + n * n), Fraction(2 * m * n, m * m + n * n)
    )
    return t.conj() if rng.random() < 0.5 else t


def random_adhm_data(k: int, N: int, rng: random.Random) -> ADHMData:
    def entry() -> CNum:
        return CNum(
            Fraction(rng.randint(-5, 5), rng.randint(1, 3)),
            Fraction(rng.randint(-5, 5), rng.randint(1, 3)),
        )

    def block(rows: int, cols: int) -> NMatrix:
        return tuple(tuple(entry() for _ in range(cols)) for _ in range(rows))

    return ADHMData(block(k, k), block(k, k), block(k, N), block(N, k))


# ---------------------------------------------------------------------------
# flattened super chart


MATTER_SECTORS = ("B1", "B2", "I", "J")
MULTIPLIER_SECTORS = ("HR", "HC", "PB")


@dataclass(frozen=True)
class ADHMSuperChart:
    """Real chart for the matrix data with positional odd partners.

    Sector blocks appear in a fixed order; each complex entry (i, j)
    occupies two consecutive real coordinates (real part first), and
    the odd generator with the same index is its fermionic partner.
    `params` names the Cartan symbols of the symmetry group.
    """

    k: int
    N: int
    full: bool
    chart: SuperChart
    sectors: Tuple[Tuple[str, int, int], ...]
    params: Tuple[str, ...]

    def offset(self, sector: str) -> int:
        pos = 0
        for name, rows, cols in self.sectors:
            if name == sector:
                return pos
            pos += 2 * rows * cols
        raise KeyError(sector)

    def shape(self, sector: str) -> Tuple[int, int]:
        for name, rows, cols in self.sectors:
            if name == sector:
                return rows, cols
        raise KeyError(sector)

    def coord_index(self, sector: str, i: int, j: int, imag: bool = False) -> int:
        rows, cols = self.shape(sector)
        if not (0 <= i < rows and 0 <= j < cols):
            raise ShapeMismatch("entry (%d,%d) outside %s block" % (i, j, sector))
        return self.offset(sector) + 2 * (i * cols + j) + (1 if imag else 0)

    def boson_entry(self, sector: str, i: int, j: int) -> CSuper:
        p = self.coord_index(sector, i, j)
        re = SuperFunction.from_scalar(self.chart, sc.sym(self.chart.coords[p]))
        im = SuperFunction.from_scalar(self.chart, sc.sym(self.chart.coords[p + 1]))
        return CSuper(re, im)

    def fermion_entry(self, sector: str, i: int, j: int) -> CSuper:
        p = self.coord_index(sector, i, j)
        return CSuper(
            SuperFunction.generator(self.chart, p + 1),
            SuperFunction.generator(self.chart, p + 2),
        )

    def boson_matrix(self, sector: str):
        rows, cols = self.shape(sector)
        return [
            [self.boson_entry(sector, i, j) for j in range(cols)] for i in range(rows)
        ]

    def fermion_matrix(self, sector: str):
        rows, cols = self.shape(sector)
        return [
            [self.fermion_entry(sector, i, j) for j in range(cols)]
            for i in range(rows)
        ]

    def sector_coords(self, sector: str) -> Tuple[str, ...]:
        rows, cols = self.shape(sector)
        base = self.offset(sector)
        return self.chart.coords[base : base + 2 * rows * cols]


def adhm_super_chart(k: int, N: int, full: bool = False) -> ADHMSuperChart:
    if k < 1 or N < 1:
        raise ShapeMismatch("need k >= 1 and N >= 1")
    sectors = [("B1", k, k), ("B2", k, k), ("I", k, N), ("J", N, k)]
    if full:
        sectors += [("HR", k, k), ("HC", k, k), ("PB", k, k)]
    coords = []
    for name, rows, cols in sectors:
        for i in range(rows):
            for j in range(cols):
                coords.append("%s_%d%d_re" % (name, i, j))
                coords.append("%s_%d%d_im" % (name, i, j))
    chart = SuperChart(tuple(coords), len(coords))
    params = tuple("phi%d" % (j + 1,) for j in range(k))
    params += tuple("a%d" % (r + 1,) for r in range(N - 1))
    params += ("e1", "e2")
    return ADHMSuperChart(k, N, full, chart, tuple(sectors), params)


def cartan_params(lay: ADHMSuperChart):
    """Diagonal (phi, a) and the two rotation symbols, all anti-hermitian.

    Returns (phi, a, e1, e2) with phi = i diag(phi_1..phi_k), a the
    traceless i diag(a_1, .., -sum), e_l = i times a real symbol.
    """
    chart = lay.chart

    def imag_const(e) -> CSuper:
        return CSuper.imag(SuperFunction.from_scalar(chart, e))

    zero = CSuper.zero(chart)
    phi = [
        [imag_const(sc.sym("phi%d" % (i + 1,))) if i == j else zero for j in range(lay.k)]
        for i in range(lay.k)
    ]
    a_top = [sc.sym("a%d" % (r + 1,)) for r in range(lay.N - 1)]
    a_last = sc.ZERO
    for e in a_top:
        a_last = a_last - e
    a_diag = list(a_top) + [a_last]
    a = [
        [imag_const(a_diag[i]) if i == j else zero for j in range(lay.N)]
        for i in range(lay.N)
    ]
    return phi, a, imag_const(sc.sym("e1")), imag_const(sc.sym("e2"))


def _check_param_shapes(lay: ADHMSuperChart, phi, a) -> None:
    if len(phi) != lay.k or any(len(row) != lay.k for row in phi):
        raise ShapeMismatch("phi must be %d x %d" % (lay.k, lay.k))
    if len(a) != lay.N or any(len(row) != lay.N for row in a):
        raise ShapeMismatch("a must be %d x %d" % (lay.N, lay.N))


def _rep_updates(lay: ADHMSuperChart, phi, a, e1, e2, mats) -> dict:
    """Infinitesimal action on a dict of sector matrices.

    B_l rotates by [phi, .] plus its own torus weight; I and J carry the
    frame action; the multiplier sector is adjoint, with the combined
    weight on the HC block only.
    """
    eps = e1 + e2
    out = {}
    if "B1" in mats:
        out["B1"] = cmat_add(
            cmat_commutator(phi, mats["B1"]), cmat_scale(mats["B1"], e1)
        )
    if "B2" in mats:
        out["B2"] = cmat_add(
            cmat_commutator(phi, mats["B2"]), cmat_scale(mats["B2"], e2)
        )
    if "I" in mats:
        out["I"] = cmat_sub(cmat_mul(phi, mats["I"]), cmat_mul(mats["I"], a))
    if "J" in mats:
        out["J"] = cmat_add(
            cmat_sub(cmat_mul(a, mats["J"]), cmat_mul(mats["J"], phi)),
            cmat_scale(mats["J"], eps),
        )
    if "HR" in mats:
        out["HR"] = cmat_commutator(phi, mats["HR"])
    if "HC" in mats:
        out["HC"] = cmat_add(
            cmat_commutator(phi, mats["HC"]), cmat_scale(mats["HC"], eps)
        )
    if "PB" in mats:
        out["PB"] = cmat_commutator(phi, mats["PB"])
    return out


def _flatten(lay: ADHMSuperChart, updates: Mapping[str, list]) -> tuple:
    comps = [SuperFunction.zero(lay.chart) for _ in range(lay.chart.m)]
    for name, rows, cols in lay.sectors:
        block = updates.get(name)
        if block is None:
            continue
        base = lay.offset(name)
        for i in range(rows):
            for j in range(cols):
                z = block[i][j]
                comps[base + 2 * (i * cols + j)] = z.re
                comps[base + 2 * (i * cols + j) + 1] = z.im
    return tuple(comps)


def _zeros(lay: ADHMSuperChart) -> tuple:
    zero = SuperFunction.zero(lay.chart)
    return tuple(zero for _ in range(lay.chart.m))


def adhm_fundamental_field(lay: ADHMSuperChart, phi, a, e1, e2) -> SuperVectorField:
    """Even generator of the combined gauge, frame, and torus action."""
    _check_param_shapes(lay, phi, a)
    bosons = {name: lay.boson_matrix(name) for name, _, _ in lay.sectors}
    return SuperVectorField(
        lay.chart,
        0,
        _flatten(lay, _rep_updates(lay, phi, a, e1, e2, bosons)),
        _zeros(lay),
    )


def adhm_lifted_field(lay: ADHMSuperChart, phi, a, e1, e2) -> SuperVectorField:
    """Fundamental field plus the matching rotation of the odd partners."""
    _check_param_shapes(lay, phi, a)
    bosons = {name: lay.boson_matrix(name) for name, _, _ in lay.sectors}
    fermions = {name: lay.fermion_matrix(name) for name, _, _ in lay.sectors}
    return SuperVectorField(
        lay.chart,
        0,
        _flatten(lay, _rep_updates(lay, phi, a, e1, e2, bosons)),
        _flatten(lay, _rep_updates(lay, phi, a, e1, e2, fermions)),
    )


def adhm_Q_unconstrained(lay: ADHMSuperChart, phi, a, e1, e2) -> SuperVectorField:
    """Odd operator on the matter sector: partner on bosons, action on
    partners.  Its square is the lifted even field."""
    _check_param_shapes(lay, phi, a)
    bosons = {name: lay.boson_matrix(name) for name in MATTER_SECTORS}
    fermions = {name: lay.fermion_matrix(name) for name in MATTER_SECTORS}
    return SuperVectorField(
        lay.chart,
        1,
        _flatten(lay, fermions),
        _flatten(lay, _rep_updates(lay, phi, a, e1, e2, bosons)),
    )


def adhm_Q_full(lay: ADHMSuperChart, phi, a, e1, e2) -> SuperVectorField:
    """Odd operator including the multiplier and auxiliary sector."""
    if not lay.full:
        raise ShapeMismatch("layout lacks the multiplier sector")
    _check_param_shapes(lay, phi, a)
    eps = e1 + e2
    bosons = {name: lay.boson_matrix(name) for name, _, _ in lay.sectors}
    fermions = {name: lay.fermion_matrix(name) for name, _, _ in lay.sectors}

    a_upd = {name: fermions[name] for name in MATTER_SECTORS}
    a_upd["HR"] = cmat_commutator(phi, fermions["HR"])
    a_upd["HC"] = cmat_add(
        cmat_commutator(phi, fermions["HC"]), cmat_scale(fermions["HC"], eps)
    )
    a_upd["PB"] = fermions["PB"]

    b_upd = _rep_updates(
        lay, phi, a, e1, e2, {name: bosons[name] for name in MATTER_SECTORS}
    )
    b_upd["HR"] = bosons["HR"]
    b_upd["HC"] = bosons["HC"]
    b_upd["PB"] = cmat_commutator(phi, bosons["PB"])

    return SuperVectorField(lay.chart, 1, _flatten(lay, a_upd), _flatten(lay, b_upd))


def adhm_action_spec(lay: ADHMSuperChart) -> ActionSpec:
    """Action table with the Cartan symbols as group parameters.

    Components of the fundamental field are linear in the parameters, so
    stripping one derivative per parameter recovers the generator table.
    """
    base = adhm_fundamental_field(lay, *cartan_params(lay))
    bodies = [comp.terms.get((), sc.ZERO) for comp in base.a]
    T = tuple(
        tuple(sc.normalize(sc.differentiate(body, name)) for body in bodies)
        for name in lay.params
    )
    return ActionSpec(lay.params, lay.chart, T)


# ---------------------------------------------------------------------------
# symbolic constraints on the flattened chart


def chart_constraint_real(lay: ADHMSuperChart):
    """The hermitian constraint as a matrix of complex superfunctions."""
    B1 = lay.boson_matrix("B1")
    B2 = lay.boson_matrix("B2")
    I = lay.boson_matrix("I")
    J = lay.boson_matrix("J")
    out = cmat_add(
        cmat_commutator(B1, cmat_dagger(B1)), cmat_commutator(B2, cmat_dagger(B2))
    )
    out = cmat_add(out, cmat_mul(I, cmat_dagger(I)))
    return cmat_sub(out, cmat_mul(cmat_dagger(J), J))


def chart_constraint_complex(lay: ADHMSuperChart):
    B1 = lay.boson_matrix("B1")
    B2 = lay.boson_matrix("B2")
    I = lay.boson_matrix("I")
    J = lay.boson_matrix("J")
    return cmat_add(cmat_commutator(B1, B2), cmat_mul(I, J))


def adhm_constraint_scalars(lay: ADHMSuperChart):
    """All real components of both constraints, ordered like the
    multiplier coordinates (real block first, then complex block)."""
    out = []
    for block in (chart_constraint_real(lay), chart_constraint_complex(lay)):
        for row in block:
            for z in row:
                out.append(sc.normalize(z.re.terms.get((), sc.ZERO)))
                out.append(sc.normalize(z.im.terms.get((), sc.ZERO)))
    return out


def fermionic_constraints(chart: SuperChart, V: Sequence) -> list:
    """First-order odd shadows W_a = dV_a/dx^k theta^k.

    Needs the tautological pairing of odd generators with coordinates,
    so the chart must have one generator per coordinate.
    """
    if chart.n < chart.m:
        raise DimensionMismatch("need one odd generator per coordinate")
    out = []
    for v in V:
        if isinstance(v, sc.ScalarExpr):
            expr = v
        else:
            f = Fraction(v)
            expr = sc.rational(f.numerator, f.denominator)
        terms = {}
        for idx, name in enumerate(chart.coords, start=1):
            d = sc.normalize(sc.differentiate(expr, name))
            if not sc.is_zero(d):
                terms[(idx,)] = d
        out.append(SuperFunction(chart, terms))
    return out


# ---------------------------------------------------------------------------
# multiplier-sector consistency


def _mc_samples(symbols, count=3, seed=2203):
    rng = random.Random(seed)
    names = sorted(symbols)
    return [
        {name: Fraction(rng.randint(-9, 9), rng.randint(1, 4)) for name in names}
        for _ in range(count)
    ]


def multiplier_completion(
    V: Sequence,
    T: Mapping[str, sc.ScalarExpr],
    Ttilde: Sequence,
    H_names: Sequence[str],
    samples=None,
):
    """Linearization matrix of the multiplier action and its consistency.

    `V` are the constraints, `T` maps base coordinates to the contracted
    even components there, `Ttilde` are the contracted components on the
    multiplier coordinates `H_names`.  Returns (N, report) where
    N[a][b] = dTtilde_a/dH_b.  The report records whether the pairing
    identity sum_a N[a][b] V_a + T(V_b) = 0 holds, and whether N is
    invertible at sampled generic parameter values.
    """
    r = len(V)
    if len(Ttilde) != r or len(H_names) != r:
        raise ShapeMismatch("V, Ttilde, H_names must have equal length")
    V = [sc.normalize(v) for v in V]
    N = [
        [sc.normalize(sc.differentiate(Ttilde[a], H_names[b])) for b in range(r)]
        for a in range(r)
    ]
    H_set = set(H_names)
    for a in range(r):
        for b in range(r):
            if sc.free_symbols(N[a][b]) & H_set:
                raise NonlinearTtilde(
                    "multiplier component %d is not linear in the multipliers" % (a,)
                )

    residuals = []
    for b in range(r):
        e = sc.ZERO
        for a in range(r):
            e = e + N[a][b] * V[a]
        for coord, comp in T.items():
            e = e + comp * sc.differentiate(V[b], coord)
        residuals.append(sc.normalize(e))
    symbolic_zero = all(sc.is_zero(e) for e in residuals)

    symbols = set()
    for e in residuals:
        symbols |= sc.free_symbols(e)
    for row in N:
        for e in row:
            symbols |= sc.free_symbols(e)
    if samples is None:
        samples = _mc_samples(symbols)

    max_abs = 0.0
    if not symbolic_zero:
        for binding in samples:
            for e in residuals:
                max_abs = max(max_abs, abs(float(sc.evaluate(e, binding))))

    invertible = False
    for binding in samples:
        numeric = [[Fraction(sc.evaluate(e, binding)) for e in row] for row in N]
        if det(numeric) != 0:
            invertible = True
            break

    report = {
        "size": r,
        "linear_in_H": True,
        "pairing_residual_zero": symbolic_zero,
        "pairing_residual_max": max_abs,
        "invertible": invertible,
    }
    return N, report


# ---------------------------------------------------------------------------
# bookkeeping and fixed points


def rank_bookkeeping(k: int, N: int, susy: int) -> int:
    """Rank of the relevant bundle over the instanton moduli space."""
    if k < 1 or N < 1:
        raise ShapeMismatch("need k >= 1 and N >= 1")
    ranks = {1: 2 * k * N, 2: 4 * k * N, 4: 8 * k * N}
    if susy not in ranks:
        raise BadSusy("supersymmetry multiplicity must be 1, 2, or 4")
    return ranks[susy]


def check_stabilizer(d: ADHMData) -> None:
    """Reject data whose gauge stabilizer is larger than the center acts
    freely on; vanishing (I, J) always fails."""
    if all(z.is_zero() for row in d.I for z in row) and all(
        z.is_zero() for row in d.J for z in row
    ):
        raise StabilizerNotTrivial("data with I = J = 0 sit on a singular stratum")


def _fraction_sqrt(q: Fraction) -> Fraction:
    if q < 0:
        raise ValueError("negative scale")
    num, den = q.numerator, q.denominator
    rn, rd = isqrt(num), isqrt(den)
    if rn * rn != num or rd * rd != den:
        raise ValueError("scale must be a perfect rational square")
    return Fraction(rn, rd)


@dataclass(frozen=True)
class ADHMFixedPoint:
    """Torus-fixed datum at instanton number one.

    `phi` is the compensating gauge parameter; `weights` are the four
    torus weights of the reduced tangent directions.
    """

    r: int
    data: ADHMData
    phi: sc.ScalarExpr
    weights: Tuple[sc.ScalarExpr, ...]


def adhm_fixed_points(k: int, N: int, zeta: Fraction = Fraction(1)) -> list:
    """Enumerate the k = 1 fixed data classes of the torus action.

    At instanton number one the fixed classes are labelled by the frame
    index carrying the single unit of charge; the real constraint level
    is `zeta` (a perfect rational square, by default 1).
    """
    if k != 1:
        raise ShapeMismatch("fixed-point enumeration only covers k = 1")
    if N < 2:
        raise ShapeMismatch("need N >= 2 for isolated fixed data")
    s = _fraction_sqrt(Fraction(zeta))
    a_top = [sc.sym("a%d" % (r + 1,)) for r in range(N - 1)]
    a_last = sc.ZERO
    for e in a_top:
        a_last = a_last - e
    a_diag = list(a_top) + [a_last]
    e1, e2 = sc.sym("e1"), sc.sym("e2")
    out = []
    for r in range(N):
        I = tuple(
            tuple(CNum(s, Fraction(0)) if c == r else C_ZERO for c in range(N))
            for _ in range(1)
        )
        data = ADHMData(
            nmat_zero(1, 1), nmat_zero(1, 1), I, nmat_zero(N, 1)
        )
        check_stabilizer(data)
        level = nmat((((zeta, 0),),))
        assert nmat_equal(constraint_real(data), level)
        assert nmat_equal(constraint_complex(data), nmat_zero(1, 1))
        weights = [e1, e2]
        weights += [sc.normalize(a_diag[r] - a_diag[s_]) for s_ in range(N) if s_ != r]
        weights += [
            sc.normalize(a_diag[s_] - a_diag[r] + e1 + e2)
            for s_ in range(N)
            if s_ != r
        ]
        out.append(
            ADHMFixedPoint(r, data, sc.normalize(a_diag[r]), tuple(weights))
        )
    return out
