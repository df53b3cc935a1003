"""Sparse Grassmann algebra over the scalar kernel.

A superfunction on an (m, n) chart is a map from strictly increasing odd
multi-indices to scalar coefficients; missing keys mean zero and the empty
key is the body. Odd derivatives follow the left-derivative convention, so
``d/dth2 (th1*th2) = -th1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Tuple

from . import scalars as sc
from .errors import DimensionMismatch, IndexOutOfRange, WrongGrade, ZeroBody
from .scalars import Binding, ScalarExpr, normalize

Index = Tuple[int, ...]


@dataclass(frozen=True)
class SuperChart:
    """Even coordinate names plus the number of odd generators."""

    coords: Tuple[str, ...]
    n: int
    odd_names: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "coords", tuple(self.coords))
        if not self.odd_names:
            object.__setattr__(
                self, "odd_names", tuple("th%d" % (k,) for k in range(1, self.n + 1))
            )
        if len(self.odd_names) != self.n:
            raise DimensionMismatch("need %d odd names, got %d" % (self.n, len(self.odd_names)))

    @property
    def m(self) -> int:
        return len(self.coords)


def _merge_sign(left: Index, right: Index):
    """Concatenate two increasing multi-indices with the Koszul sign.

    Returns (None, 0) when the indices overlap.
    """
    if set(left) & set(right):
        return None, 0
    inversions = sum(1 for i in left for j in right if i > j)
    merged = tuple(sorted(left + right))
    return merged, (-1) ** inversions


class SuperFunction:
    """Element of the Grassmann algebra over scalar expressions."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: SuperChart, terms: Mapping[Index, ScalarExpr]):
        clean = {}
        for idx, coeff in terms.items():
            idx = tuple(idx)
            if any(not (1 <= k <= chart.n) for k in idx):
                raise IndexOutOfRange("odd index out of range in %r" % (idx,))
            if list(idx) != sorted(set(idx)):
                raise IndexOutOfRange("multi-index must be strictly increasing: %r" % (idx,))
            c = normalize(coeff if isinstance(coeff, ScalarExpr) else sc.Rat(Fraction(coeff)))
            if c != sc.ZERO:
                prev = clean.get(idx)
                clean[idx] = c if prev is None else normalize(prev + c)
        self.chart = chart
        self.terms = {k: v for k, v in clean.items() if v != sc.ZERO}

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_scalar(chart: SuperChart, value) -> "SuperFunction":
        if not isinstance(value, ScalarExpr):
            value = sc.Rat(Fraction(value))
        return SuperFunction(chart, {(): value})

    @staticmethod
    def zero(chart: SuperChart) -> "SuperFunction":
        return SuperFunction(chart, {})

    @staticmethod
    def one(chart: SuperChart) -> "SuperFunction":
        return SuperFunction(chart, {(): sc.ONE})

    @staticmethod
    def generator(chart: SuperChart, index: int) -> "SuperFunction":
        if not (1 <= index <= chart.n):
            raise IndexOutOfRange("no odd generator %d on this chart" % (index,))
        return SuperFunction(chart, {(index,): sc.ONE})

    # -- ring structure ----------------------------------------------------

    def _check_chart(self, other: "SuperFunction") -> None:
        if self.chart != other.chart:
            raise DimensionMismatch("superfunctions live on different charts")

    def __add__(self, other):
        other = _coerce(self.chart, other)
        if other is NotImplemented:
            return NotImplemented
        self._check_chart(other)
        merged = dict(self.terms)
        for idx, c in other.terms.items():
            merged[idx] = merged[idx] + c if idx in merged else c
        return SuperFunction(self.chart, merged)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(self.chart, other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(self.chart, other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __neg__(self):
        return SuperFunction(self.chart, {k: -v for k, v in self.terms.items()})

    def __mul__(self, other):
        other = _coerce(self.chart, other)
        if other is NotImplemented:
            return NotImplemented
        self._check_chart(other)
        out: dict = {}
        for il, cl in self.terms.items():
            for ir, cr in other.terms.items():
                merged, sign = _merge_sign(il, ir)
                if merged is None:
                    continue
                term = cl * cr if sign > 0 else -(cl * cr)
                out[merged] = out[merged] + term if merged in out else term
        return SuperFunction(self.chart, out)

    def __rmul__(self, other):
        other = _coerce(self.chart, other)
        if other is NotImplemented:
            return NotImplemented
        return other * self

    def __eq__(self, other):
        return (
            isinstance(other, SuperFunction)
            and self.chart == other.chart
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.chart, tuple(sorted(self.terms.items(), key=lambda kv: kv[0]))))

    def __repr__(self):
        return "SuperFunction(%s)" % (to_super_text(self),)

    # -- structure ---------------------------------------------------------

    def body(self) -> ScalarExpr:
        return self.terms.get((), sc.ZERO)

    def grade(self, k: int) -> "SuperFunction":
        return SuperFunction(self.chart, {i: c for i, c in self.terms.items() if len(i) == k})

    def grades(self) -> Tuple[int, ...]:
        return tuple(sorted({len(i) for i in self.terms}))

    def top_component(self) -> ScalarExpr:
        full = tuple(range(1, self.chart.n + 1))
        return self.terms.get(full, sc.ZERO)

    def coefficient(self, idx: Sequence[int]) -> ScalarExpr:
        return self.terms.get(tuple(idx), sc.ZERO)

    def parity(self):
        """0 for even, 1 for odd, None for mixed or zero."""
        pars = {len(i) % 2 for i in self.terms}
        if len(pars) == 1:
            return pars.pop()
        return None

    def is_zero(self) -> bool:
        return not self.terms

    def free_symbols(self) -> frozenset:
        out: frozenset = frozenset()
        for c in self.terms.values():
            out = out | sc.free_symbols(c)
        return out

    def evaluate_terms(self, binding: Binding) -> dict:
        return {idx: sc.evaluate(c, binding) for idx, c in self.terms.items()}


def _coerce(chart: SuperChart, value):
    if isinstance(value, SuperFunction):
        return value
    if isinstance(value, ScalarExpr):
        return SuperFunction.from_scalar(chart, value)
    if isinstance(value, (int, Fraction)):
        return SuperFunction.from_scalar(chart, value)
    return NotImplemented


# ---------------------------------------------------------------------------
# Derivations.
# ---------------------------------------------------------------------------


def odd_partial(f: SuperFunction, index: int) -> SuperFunction:
    """Left derivative with respect to the odd generator."""
    if not (1 <= index <= f.chart.n):
        raise IndexOutOfRange("no odd generator %d on this chart" % (index,))
    out = {}
    for idx, c in f.terms.items():
        if index not in idx:
            continue
        pos = idx.index(index)
        rest = idx[:pos] + idx[pos + 1:]
        term = c if pos % 2 == 0 else -c
        out[rest] = out[rest] + term if rest in out else term
    return SuperFunction(f.chart, out)


def even_partial(f: SuperFunction, index: int) -> SuperFunction:
    """Coefficient-wise derivative with respect to coordinate number index (1-based)."""
    if not (1 <= index <= f.chart.m):
        raise IndexOutOfRange("no coordinate %d on this chart" % (index,))
    name = f.chart.coords[index - 1]
    return SuperFunction(
        f.chart, {idx: sc.differentiate(c, name) for idx, c in f.terms.items()}
    )


@dataclass(frozen=True)
class SuperVectorField:
    """Derivation a^i d/dx^i + b^A d/dth^A with a declared parity."""

    chart: SuperChart
    parity: int
    a: Tuple[SuperFunction, ...]
    b: Tuple[SuperFunction, ...]

    def __post_init__(self) -> None:
        if len(self.a) != self.chart.m or len(self.b) != self.chart.n:
            raise DimensionMismatch(
                "field needs %d even and %d odd components" % (self.chart.m, self.chart.n)
            )
        object.__setattr__(self, "a", tuple(self.a))
        object.__setattr__(self, "b", tuple(self.b))

    def apply(self, f: SuperFunction) -> SuperFunction:
        if f.chart != self.chart:
            raise DimensionMismatch("field and function live on different charts")
        out = SuperFunction.zero(self.chart)
        for i, comp in enumerate(self.a, start=1):
            if not comp.is_zero():
                out = out + comp * even_partial(f, i)
        for A, comp in enumerate(self.b, start=1):
            if not comp.is_zero():
                out = out + comp * odd_partial(f, A)
        return out

    def parity_violations(self) -> list:
        """Component grades inconsistent with the declared parity.

        For an even field a^i must be even-graded and b^A odd-graded;
        reversed for an odd field.
        """
        bad = []
        want_a = self.parity % 2
        want_b = (self.parity + 1) % 2
        for i, comp in enumerate(self.a, start=1):
            if not comp.is_zero() and any(len(k) % 2 != want_a for k in comp.terms):
                bad.append("a[%d] has grades %s" % (i, comp.grades()))
        for A, comp in enumerate(self.b, start=1):
            if not comp.is_zero() and any(len(k) % 2 != want_b for k in comp.terms):
                bad.append("b[%d] has grades %s" % (A, comp.grades()))
        return bad


def graded_commutator(X: SuperVectorField, Y: SuperVectorField) -> SuperVectorField:
    """[X, Y] = X Y - (-1)^{|X||Y|} Y X, itself a derivation."""
    if X.chart != Y.chart:
        raise DimensionMismatch("fields live on different charts")
    sign = (-1) ** (X.parity * Y.parity)
    a = []
    for i in range(X.chart.m):
        left = X.apply(Y.a[i])
        right = Y.apply(X.a[i])
        a.append(left - right if sign > 0 else left + right)
    b = []
    for A in range(X.chart.n):
        left = X.apply(Y.b[A])
        right = Y.apply(X.b[A])
        b.append(left - right if sign > 0 else left + right)
    return SuperVectorField(X.chart, (X.parity + Y.parity) % 2, tuple(a), tuple(b))


def field_is_zero(X: SuperVectorField) -> bool:
    return all(c.is_zero() for c in X.a) and all(c.is_zero() for c in X.b)


def scale_field(X: SuperVectorField, factor) -> SuperVectorField:
    factor_sf = _coerce(X.chart, factor)
    return SuperVectorField(
        X.chart,
        X.parity,
        tuple(factor_sf * c for c in X.a),
        tuple(factor_sf * c for c in X.b),
    )


def add_fields(X: SuperVectorField, Y: SuperVectorField) -> SuperVectorField:
    if X.parity != Y.parity:
        raise DimensionMismatch("cannot add fields of different parity")
    return SuperVectorField(
        X.chart,
        X.parity,
        tuple(x + y for x, y in zip(X.a, Y.a)),
        tuple(x + y for x, y in zip(X.b, Y.b)),
    )


# ---------------------------------------------------------------------------
# Inversion of even elements.
# ---------------------------------------------------------------------------


def invert_even(f: SuperFunction, samples: Iterable[Binding] = ()) -> SuperFunction:
    """Inverse of an even superfunction with nonvanishing body.

    Computed as f0^-1 * sum_j (-nu/f0)^j with nu = f - f0 nilpotent; the
    series truncates at j = floor(n/2). Sample bindings, when given, guard
    against a body that vanishes somewhere on the intended domain.
    """
    if any(len(k) % 2 for k in f.terms):
        raise WrongGrade("cannot invert an element with odd-grade terms")
    f0 = f.body()
    if f0 == sc.ZERO:
        raise ZeroBody("body vanishes identically")
    for b in samples:
        v = sc.evaluate(f0, b)
        if v == 0 or (isinstance(v, float) and abs(v) < 1e-300):
            raise ZeroBody("body vanishes at sample %r" % (dict(b),))
    inv0 = normalize(sc.Pow(f0, -1))
    nu = f - SuperFunction.from_scalar(f.chart, f0)
    minus_ratio = -(nu * inv0)
    acc = SuperFunction.one(f.chart)
    power = SuperFunction.one(f.chart)
    for _ in range(f.chart.n // 2):
        power = power * minus_ratio
        if power.is_zero():
            break
        acc = acc + power
    return inv0 * acc


# ---------------------------------------------------------------------------
# Text form.
# ---------------------------------------------------------------------------


def to_super_text(f: SuperFunction) -> str:
    """Render like ``(x^2)*th1*th2 + 3*th1``; parse_super round-trips."""
    if not f.terms:
        return "0"
    names = f.chart.odd_names
    parts = []
    for idx in sorted(f.terms, key=lambda i: (len(i), i)):
        c = f.terms[idx]
        gen_txt = "*".join(names[k - 1] for k in idx)
        if not idx:
            parts.append(sc.to_text(c))
            continue
        if c == sc.ONE:
            parts.append(gen_txt)
        else:
            ct = sc.to_text(c)
            if not isinstance(c, (sc.Rat, sc.Sym, sc.Func)):
                ct = "(" + ct + ")"
            parts.append(ct + "*" + gen_txt)
    out = parts[0]
    for p in parts[1:]:
        if p.startswith("-"):
            out += " - " + p[1:]
        else:
            out += " + " + p
    return out


class _SuperParser(sc._Parser):
    def __init__(self, chart: SuperChart, text: str):
        super().__init__(text)
        self.chart = chart
        self.gen_index = {name: k for k, name in enumerate(chart.odd_names, start=1)}

    def expr(self):
        e = self.term()
        while self.peek() in "+-":
            op = self.take()[0]
            rhs = self.term()
            e = e + rhs if op == "+" else e - rhs
        return e

    def term(self):
        e = self.unary()
        while self.peek() in "*/":
            op = self.take()[0]
            rhs = self.unary()
            if op == "*":
                e = e * rhs
            else:
                if isinstance(rhs, SuperFunction):
                    if rhs.grades() not in ((), (0,)):
                        raise ValueError("cannot divide by an odd expression")
                    rhs = rhs.body()
                e = e * normalize(sc.Pow(rhs, -1))
        return e

    def unary(self):
        if self.peek() == "-":
            self.take()
            return -self.unary()
        if self.peek() == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        e = self.atom()
        if self.peek() == "^":
            self.take()
            sign = 1
            if self.peek() == "-":
                self.take()
                sign = -1
            tok = self.take("num")
            k = sign * int(tok[1])
            if isinstance(e, SuperFunction):
                if k < 0:
                    raise ValueError("negative powers of odd expressions are not defined")
                out = SuperFunction.one(self.chart)
                for _ in range(k):
                    out = out * e
                return out
            return sc.Pow(e, k)
        return e

    def atom(self):
        kind = self.peek()
        if kind == "name":
            name = self.tokens[self.pos][1]
            if name in self.gen_index and self.tokens[self.pos + 1][0] != "(":
                self.take()
                return SuperFunction.generator(self.chart, self.gen_index[name])
        node = super().atom()
        if isinstance(node, sc.Func) and isinstance(node.arg, SuperFunction):
            raise ValueError("%s() takes a scalar argument" % (node.kind,))
        return node


def parse_super(chart: SuperChart, text: str) -> SuperFunction:
    """Parse the superfunction text form on the given chart."""
    value = _SuperParser(chart, text).parse()
    if isinstance(value, SuperFunction):
        return value
    return SuperFunction.from_scalar(chart, value)
