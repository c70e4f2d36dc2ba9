"""Exact scalars, sparse polynomials, eventual signs and real-root isolation.

Everything here is exact: scalars are :class:`fractions.Fraction`, polynomials
are sparse maps from monomials to nonzero fractions, and real algebraic numbers
are carried as isolating intervals of square-free rational polynomials.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence, Union

Rational = Fraction
Scalar = Union[int, Fraction]

__all__ = [
    "Rational",
    "Poly",
    "RootBox",
    "Region",
    "parse_rational",
    "format_rational",
    "eventual_sign",
    "isolate_real_roots",
    "eventual_sign_region",
    "sign_cells",
    "sign_at",
    "compare",
    "algebraic_equal",
    "floor_of",
    "to_float",
]


def parse_rational(text: str | int | Fraction) -> Fraction:
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    text = text.strip()
    if not text:
        raise ValueError("empty rational")
    return Fraction(text)


def format_rational(q: Scalar) -> str:
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _sgn(x) -> int:
    return (x > 0) - (x < 0)


# ---------------------------------------------------------------------------
# sparse multivariate polynomials


def _mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    exps = dict(a)
    for v, e in b:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


class Poly:
    """Sparse polynomial with Fraction coefficients.

    A monomial is a sorted tuple of ``(variable, exponent)`` pairs; the empty
    tuple is the constant monomial.  The engine only ever uses the variables
    ``m`` and ``b`` in reported results, but validation builds symbolic classes
    with one variable per basis symbol, so variable names are unrestricted.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: dict | None = None):
        self.terms: dict[tuple, Fraction] = {}
        if terms:
            for mono, c in terms.items():
                if c:
                    self.terms[mono] = Fraction(c)

    @classmethod
    def _raw(cls, terms: dict) -> "Poly":
        p = cls.__new__(cls)
        p.terms = terms
        return p

    @classmethod
    def var(cls, name: str) -> "Poly":
        return cls._raw({((name, 1),): Fraction(1)})

    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls._raw({(): Fraction(c)} if c else {})

    @classmethod
    def coerce(cls, x) -> "Poly":
        if isinstance(x, Poly):
            return x
        return cls.const(x)

    @classmethod
    def from_univariate(cls, coeffs: Sequence[Scalar], var: str) -> "Poly":
        terms = {}
        for i, c in enumerate(coeffs):
            if c:
                terms[((var, i),) if i else ()] = Fraction(c)
        return cls._raw(terms)

    # -- inspection
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def variables(self) -> set[str]:
        return {v for mono in self.terms for v, _ in mono}

    def degree(self, var: str | None = None) -> int:
        """Degree in ``var`` (total degree if omitted); -1 for the zero polynomial."""
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e for _, e in mono) for mono in self.terms)
        return max(dict(mono).get(var, 0) for mono in self.terms)

    def constant(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def is_constant(self) -> bool:
        return all(not mono for mono in self.terms)

    def coeffs(self, var: str) -> list["Poly"]:
        """Coefficients with respect to ``var``, indexed by exponent."""
        deg = self.degree(var)
        out: list[dict] = [dict() for _ in range(deg + 1)]
        for mono, c in self.terms.items():
            e = 0
            rest = []
            for v, k in mono:
                if v == var:
                    e = k
                else:
                    rest.append((v, k))
            out[e][tuple(rest)] = c
        return [Poly._raw(t) for t in out]

    def univariate(self, var: str) -> list[Fraction]:
        """Dense coefficient list (low to high) of a polynomial in ``var`` only."""
        extra = self.variables() - {var}
        if extra:
            raise ValueError(f"polynomial is not univariate in {var!r}: also involves {sorted(extra)}")
        return [c.constant() for c in self.coeffs(var)]

    def subs(self, values: dict[str, Scalar]) -> "Poly":
        out: dict[tuple, Fraction] = {}
        for mono, c in self.terms.items():
            rest = []
            for v, e in mono:
                if v in values:
                    c = c * Fraction(values[v]) ** e
                else:
                    rest.append((v, e))
            if c:
                key = tuple(rest)
                s = out.get(key, 0) + c
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return Poly._raw(out)

    def __call__(self, **values: Scalar) -> Fraction:
        p = self.subs(values)
        if not p.is_constant():
            raise ValueError(f"unassigned variables {sorted(p.variables())}")
        return p.constant()

    # -- arithmetic
    def __neg__(self) -> "Poly":
        return Poly._raw({k: -c for k, c in self.terms.items()})

    def __add__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            if isinstance(other, (int, Fraction)):
                other = Poly.const(other)
            else:
                return NotImplemented
        if not other.terms:
            return self
        out = dict(self.terms)
        for k, c in other.terms.items():
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __sub__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return Poly.coerce(other) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly()
            return Poly._raw({k: c * other for k, c in self.terms.items()})
        if not isinstance(other, Poly):
            return NotImplemented
        out: dict[tuple, Fraction] = {}
        for k1, c1 in self.terms.items():
            for k2, c2 in other.terms.items():
                k = _mono_mul(k1, k2)
                out[k] = out.get(k, 0) + c1 * c2
        return Poly._raw({k: c for k, c in out.items() if c})

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Poly":
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return NotImplemented

    def __pow__(self, n: int) -> "Poly":
        result = Poly.const(1)
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mono in sorted(self.terms, key=lambda k: (-sum(e for _, e in k), k)):
            c = self.terms[mono]
            vs = "*".join(v if e == 1 else f"{v}^{e}" for v, e in mono)
            if not vs:
                parts.append(format_rational(c))
            elif c == 1:
                parts.append(vs)
            elif c == -1:
                parts.append("-" + vs)
            else:
                parts.append(f"{format_rational(c)}*{vs}")
        return " + ".join(parts).replace("+ -", "- ")

    # -- serialization (variables m and b only)
    def to_records(self) -> list[dict]:
        extra = self.variables() - {"m", "b"}
        if extra:
            raise ValueError(f"only m and b serialize, found {sorted(extra)}")
        recs = []
        for mono, c in self.terms.items():
            e = dict(mono)
            recs.append({"m": e.get("m", 0), "b": e.get("b", 0), "coeff": format_rational(c)})
        recs.sort(key=lambda r: (r["m"], r["b"]))
        return recs

    @classmethod
    def from_records(cls, recs: Iterable[dict]) -> "Poly":
        out = Poly()
        for r in recs:
            mono = tuple((v, r[v]) for v in ("b", "m") if r.get(v, 0))
            out = out + Poly._raw({mono: parse_rational(r["coeff"])})
        return out


# ---------------------------------------------------------------------------
# dense univariate helpers (coefficient lists, low to high)


def _trim(p: list) -> list:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def _ev(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _deriv(p: Sequence[Fraction]) -> list:
    return _trim([i * p[i] for i in range(1, len(p))])


def _divmod(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[list, list]:
    a = _trim(a)
    b = _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    lb = b[-1]
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        f = r[-1] / lb
        q[k] = f
        for i, c in enumerate(b):
            r[i + k] -= f * c
        r = _trim(r)
    return _trim(q), r


def _monic(p: list) -> list:
    p = _trim(p)
    if not p:
        return p
    lc = p[-1]
    return [c / lc for c in p]


def _gcd(a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _divmod(a, b)[1]
    return _monic(a)


def _mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def _squarefree_decomposition(p: list) -> list[tuple[list, int]]:
    """Yun's algorithm: returns [(factor, multiplicity)] with square-free, pairwise coprime factors."""
    p = _monic(p)
    out = []
    dp = _deriv(p)
    a = _gcd(p, dp)
    b = _divmod(p, a)[0]
    c = _divmod(dp, a)[0]
    d = _trim([x - y for x, y in _zip_pad(c, _deriv(b))])
    i = 1
    while len(b) > 1:
        a = _gcd(b, d)
        if len(a) > 1:
            out.append((a, i))
        b = _divmod(b, a)[0]
        c = _divmod(d, a)[0]
        d = _trim([x - y for x, y in _zip_pad(c, _deriv(b))])
        i += 1
    return out


def _zip_pad(a, b):
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return zip(a, b)


def _squarefree_part(p: list) -> list:
    p = _trim(p)
    if len(p) <= 1:
        return _monic(p)
    return _monic(_divmod(p, _gcd(p, _deriv(p)))[0])


def _cauchy_bound(p: list) -> Fraction:
    lc = abs(p[-1])
    return 1 + max((abs(c) / lc for c in p[:-1]), default=Fraction(0))


def _taylor_shift(p: list, a: Fraction) -> list:
    """Coefficients of p(x + a)."""
    q = list(p)
    n = len(q)
    for i in range(n):
        for k in range(n - 2, i - 1, -1):
            q[k] += a * q[k + 1]
    return q


def _int_poly(p: Sequence[Fraction]) -> list[int]:
    """Integer multiple of p with the same roots."""
    den = reduce(math.lcm, (Fraction(c).denominator for c in p), 1)
    return [int(c * den) for c in p]


def _descartes_count(p: list, lo: Fraction, hi: Fraction) -> int:
    """Sign variations bounding the number of roots of p in the open interval (lo, hi)."""
    n = len(p) - 1
    if n <= 0:
        return 0
    c = _int_poly(p)
    lo, w = Fraction(lo), Fraction(hi) - Fraction(lo)
    # D^n * p(lo + w*y) with integer arithmetic, lo = ln/ld, w = wn/wd
    A, B, D = lo.numerator * w.denominator, w.numerator * lo.denominator, lo.denominator * w.denominator
    r = [c[n]]
    Dpow = 1
    for i in range(n - 1, -1, -1):
        Dpow *= D
        nxt = [0] * (len(r) + 1)
        for k, x in enumerate(r):
            nxt[k] += A * x
            nxt[k + 1] += B * x
        nxt[0] += c[i] * Dpow
        r = nxt
    q = list(reversed(r))  # reciprocal, then shift by 1
    m = len(q)
    for i in range(m):
        for k in range(m - 2, i - 1, -1):
            q[k] += q[k + 1]
    signs = [x > 0 for x in q if x]
    return sum(1 for s, t in zip(signs, signs[1:]) if s != t)


def _primitive_lead(p: list) -> int:
    den = reduce(math.lcm, (c.denominator for c in p), 1)
    ints = [int(c * den) for c in p]
    g = reduce(math.gcd, (abs(x) for x in ints if x), 0)
    return abs(ints[-1] // g)


# ---------------------------------------------------------------------------
# real algebraic numbers


@dataclass(frozen=True)
class RootBox:
    """A real root of a square-free polynomial, isolated by a rational interval.

    ``poly`` holds the dense coefficients (low to high) of the defining
    polynomial; ``(lo, hi)`` contains exactly one of its real roots and neither
    endpoint is a root.  ``exact`` is set when the root is rational.
    """

    poly: tuple[Fraction, ...]
    lo: Fraction
    hi: Fraction
    exact: Fraction | None = None
    multiplicity: int = field(default=1, compare=False)

    def width(self) -> Fraction:
        return self.hi - self.lo

    def refine(self, width: Fraction = Fraction(1, 2**32)) -> "RootBox":
        if self.exact is not None:
            half = min(width / 2, self.hi - self.exact, self.exact - self.lo)
            return RootBox(self.poly, self.exact - half, self.exact + half, self.exact, self.multiplicity)
        lo, hi = self.lo, self.hi
        slo = _sgn(_ev(self.poly, lo))
        while hi - lo > width:
            mid = (lo + hi) / 2
            sm = _sgn(_ev(self.poly, mid))
            if sm == 0:
                return RootBox(self.poly, mid - (hi - lo) / 4, mid + (hi - lo) / 4, mid, self.multiplicity).refine(width)
            if sm == slo:
                lo = mid
            else:
                hi = mid
        return RootBox(self.poly, lo, hi, None, self.multiplicity)

    def bisect(self) -> "RootBox":
        return self.refine((self.hi - self.lo) / 2)

    def shift(self, c: Scalar) -> "RootBox":
        """The root plus the rational ``c``."""
        c = Fraction(c)
        return RootBox(
            tuple(_taylor_shift(list(self.poly), -c)),
            self.lo + c,
            self.hi + c,
            None if self.exact is None else self.exact + c,
            self.multiplicity,
        )

    def value(self) -> Fraction | "RootBox":
        return self.exact if self.exact is not None else self

    def __float__(self) -> float:
        if self.exact is not None:
            return float(self.exact)
        r = self.refine(Fraction(1, 2**60))
        return float((r.lo + r.hi) / 2)

    def describe(self) -> str:
        if self.exact is not None:
            return format_rational(self.exact)
        terms = Poly.from_univariate(self.poly, "x")
        return f"root of {terms} in ({format_rational(self.lo)}, {format_rational(self.hi)})"

    def to_record(self) -> dict:
        if self.exact is not None:
            return {"exact": format_rational(self.exact)}
        return {
            "poly": [format_rational(c) for c in self.poly],
            "lo": format_rational(self.lo),
            "hi": format_rational(self.hi),
            "approx": float(self),
        }


Point = Union[Fraction, RootBox]


def _detect_rational(box: RootBox) -> RootBox:
    p = list(box.poly)
    if len(p) == 2:
        r = -p[0] / p[1]
        return RootBox(box.poly, box.lo, box.hi, r, box.multiplicity)
    a_n = _primitive_lead(p)
    b = box.refine(Fraction(1, 2 * a_n))
    if b.exact is not None:
        return b
    k = math.ceil(b.lo * a_n)
    cand = Fraction(k, a_n)
    if b.lo < cand < b.hi and _ev(p, cand) == 0:
        return RootBox(box.poly, box.lo, box.hi, cand, box.multiplicity)
    return RootBox(box.poly, b.lo, b.hi, None, box.multiplicity)


def _isolate_squarefree(p: list, multiplicity: int = 1) -> list[RootBox]:
    p = _monic(p)
    if len(p) <= 1:
        return []
    bound = _cauchy_bound(p)
    B = Fraction(2 ** max(0, math.ceil(math.log2(bound)) + 1))
    poly = tuple(p)
    found: list[RootBox] = []
    stack = [(-B, B)]
    while stack:
        lo, hi = stack.pop()
        v = _descartes_count(p, lo, hi)
        if v == 0:
            continue
        if v == 1 and _ev(p, lo) != 0 and _ev(p, hi) != 0:
            found.append(RootBox(poly, lo, hi, None, multiplicity))
            continue
        mid = (lo + hi) / 2
        if _ev(p, mid) == 0:
            w = (hi - lo) / 4
            # shrink until the exact root's box excludes the other roots
            while _descartes_count(p, mid - w, mid + w) > 1 or _ev(p, mid - w) == 0 or _ev(p, mid + w) == 0:
                w /= 2
            found.append(RootBox(poly, mid - w, mid + w, mid, multiplicity))
            stack.append((lo, mid - w))
            stack.append((mid + w, hi))
        else:
            stack.append((lo, mid))
            stack.append((mid, hi))
    found.sort(key=lambda r: r.lo)
    return [_detect_rational(r) for r in found]


def _as_dense(p) -> list[Fraction]:
    if isinstance(p, Poly):
        vs = p.variables()
        if len(vs) > 1:
            raise ValueError(f"expected a univariate polynomial, got variables {sorted(vs)}")
        var = next(iter(vs)) if vs else "b"
        return _trim(p.univariate(var))
    return _trim([Fraction(c) for c in p])


def isolate_real_roots(p) -> list[RootBox]:
    """Isolate the distinct real roots of a nonzero univariate polynomial.

    Boxes come back in increasing order, pairwise disjoint, each carrying the
    multiplicity of its root in ``p``.
    """
    dense = _as_dense(p)
    if not dense:
        raise ValueError("cannot isolate the roots of the zero polynomial")
    if len(dense) == 1:
        return []
    roots: list[RootBox] = []
    for factor, mult in _squarefree_decomposition(dense):
        roots.extend(_isolate_squarefree(factor, mult))
    # boxes of different square-free factors may overlap; refine until disjoint
    roots.sort(key=lambda r: r.lo)
    changed = True
    while changed:
        changed = False
        roots.sort(key=lambda r: r.lo)
        for i in range(len(roots) - 1):
            a, b = roots[i], roots[i + 1]
            if a.hi > b.lo:
                roots[i], roots[i + 1] = a.bisect(), b.bisect()
                changed = True
    return roots


def eventual_sign(p) -> int:
    """Sign of a polynomial in ``m`` at every sufficiently large argument."""
    if isinstance(p, Poly):
        extra = p.variables() - {"m"}
        if extra:
            raise ValueError(f"eventual_sign expects a polynomial in m only, got {sorted(extra)}")
        if p.is_zero():
            return 0
        top = p.coeffs("m")[-1]
        return _sgn(top.constant())
    dense = _trim([Fraction(c) for c in p])
    return _sgn(dense[-1]) if dense else 0


def sign_at(p, x: Point) -> int:
    """Exact sign of univariate ``p`` at a rational or isolated algebraic point."""
    q = _as_dense(p)
    if not q:
        return 0
    if isinstance(x, RootBox) and x.exact is not None:
        x = x.exact
    if not isinstance(x, RootBox):
        return _sgn(_ev(q, Fraction(x)))
    g = _gcd(list(x.poly), q)
    if len(g) > 1:
        glo, ghi = _ev(g, x.lo), _ev(g, x.hi)
        if _sgn(glo) * _sgn(ghi) < 0:
            return 0
    box = x
    while True:
        if _ev(q, box.lo) != 0 and _ev(q, box.hi) != 0 and _descartes_count(q, box.lo, box.hi) == 0:
            return _sgn(_ev(q, box.lo))
        box = box.bisect()
        if box.exact is not None:
            return _sgn(_ev(q, box.exact))


def _cmp_rational(a: RootBox, r: Fraction) -> int:
    if a.exact is not None:
        return _sgn(a.exact - r)
    box = a
    while box.lo <= r <= box.hi:
        box = box.bisect()
        if box.exact is not None:
            return _sgn(box.exact - r)
    return 1 if box.lo > r else -1


def _root_index(x: RootBox, g: list, gboxes: list[RootBox]) -> int:
    for i, gb in enumerate(gboxes):
        if _cmp_rational(x, gb.lo) > 0 and _cmp_rational(x, gb.hi) < 0:
            return i
    raise AssertionError("point is not a root of the given polynomial")


def algebraic_equal(a: Point, b: Point) -> bool:
    if isinstance(a, RootBox) and a.exact is not None:
        a = a.exact
    if isinstance(b, RootBox) and b.exact is not None:
        b = b.exact
    if not isinstance(a, RootBox) and not isinstance(b, RootBox):
        return Fraction(a) == Fraction(b)
    if not isinstance(a, RootBox):
        a, b = b, a
    if not isinstance(b, RootBox):
        # a is irrational here
        return False
    g = _gcd(list(a.poly), list(b.poly))
    if len(g) <= 1:
        return False
    if sign_at(g, a) != 0 or sign_at(g, b) != 0:
        return False
    gboxes = _isolate_squarefree(g)
    return _root_index(a, g, gboxes) == _root_index(b, g, gboxes)


def compare(a: Point, b: Point) -> int:
    """Three-way comparison of exact real points."""
    if isinstance(a, RootBox) and a.exact is not None:
        a = a.exact
    if isinstance(b, RootBox) and b.exact is not None:
        b = b.exact
    if not isinstance(a, RootBox) and not isinstance(b, RootBox):
        return _sgn(Fraction(a) - Fraction(b))
    if not isinstance(a, RootBox):
        return -_cmp_rational(b, Fraction(a))
    if not isinstance(b, RootBox):
        return _cmp_rational(a, Fraction(b))
    if algebraic_equal(a, b):
        return 0
    while not (a.hi < b.lo or b.hi < a.lo):
        a, b = a.bisect(), b.bisect()
        if a.exact is not None or b.exact is not None:
            return compare(a, b)
    return -1 if a.hi < b.lo else 1


def floor_of(x: Point) -> int:
    if isinstance(x, RootBox):
        if x.exact is not None:
            return math.floor(x.exact)
        box = x
        while math.floor(box.lo) != math.floor(box.hi) or box.hi == math.floor(box.hi):
            box = box.bisect()
            if box.exact is not None:
                return math.floor(box.exact)
        return math.floor(box.lo)
    return math.floor(Fraction(x))


def to_float(x: Point | None) -> float:
    if x is None:
        return math.nan
    return float(x)


def point_record(x: Point | None) -> dict | None:
    if x is None:
        return None
    if isinstance(x, RootBox):
        return x.to_record()
    return {"exact": format_rational(x)}


def describe_point(x: Point | None, side: int = 0) -> str:
    if x is None:
        return "-inf" if side < 0 else "+inf"
    if isinstance(x, RootBox):
        return x.describe()
    return format_rational(x)


# ---------------------------------------------------------------------------
# sign regions of "eventual sign in m" as b varies


@dataclass(frozen=True)
class Region:
    """A maximal interval of the real b-line carrying one label.

    ``lo``/``hi`` of ``None`` mean an infinite end; a point region has
    ``lo == hi`` and both ends closed.
    """

    lo: Point | None
    hi: Point | None
    lo_closed: bool
    hi_closed: bool
    label: object

    def is_point(self) -> bool:
        return self.lo is not None and self.hi is not None and self.lo_closed and self.hi_closed and (
            self.lo is self.hi or compare(self.lo, self.hi) == 0
        )

    def describe(self) -> str:
        if self.is_point():
            return "{" + describe_point(self.lo) + "}"
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{describe_point(self.lo, -1)}, {describe_point(self.hi, 1)}{right}"

    def to_record(self) -> dict:
        return {
            "lo": point_record(self.lo),
            "hi": point_record(self.hi),
            "lo_closed": self.lo_closed,
            "hi_closed": self.hi_closed,
            "label": self.label,
        }


def _top_sign(coeff_lists: list[list[Fraction]], x: Point) -> int:
    for c in reversed(coeff_lists):
        if not c:
            continue
        s = sign_at(c, x)
        if s:
            return s
    return 0


def sign_cells(families: list[list]) -> list[tuple[Point | None, Point | None, bool, tuple[int, ...]]]:
    """Common cell decomposition of the b-line for several m-coefficient families.

    Each family is a list of univariate polynomials in ``b`` indexed by
    m-degree.  Returns cells ``(lo, hi, is_point, signs)`` in increasing order,
    where ``signs[k]`` is the eventual sign in ``m`` of family ``k`` on that cell.
    """
    dense_fams = [[_as_dense(c) for c in fam] for fam in families]
    product: list[Fraction] = [Fraction(1)]
    for fam in dense_fams:
        for c in fam:
            if len(c) > 1:
                product = _mul(product, _squarefree_part(c))
    roots = _isolate_squarefree(_squarefree_part(product)) if len(product) > 1 else []

    def label(x: Point) -> tuple[int, ...]:
        return tuple(_top_sign(fam, x) for fam in dense_fams)

    if not roots:
        return [(None, None, False, label(Fraction(0)))]
    cells = []
    cells.append((None, roots[0].value(), False, label(roots[0].lo)))
    for i, r in enumerate(roots):
        cells.append((r.value(), r.value(), True, label(r.value())))
        nxt = roots[i + 1].value() if i + 1 < len(roots) else None
        cells.append((r.value(), nxt, False, label(r.hi)))
    return cells


def merge_cells(cells, keep) -> list[Region]:
    """Merge consecutive cells into maximal regions labeled by ``keep(signs)``."""
    regions: list[Region] = []
    for lo, hi, is_point, signs in cells:
        lab = keep(signs)
        if regions and regions[-1].label == lab:
            prev = regions[-1]
            regions[-1] = Region(prev.lo, hi, prev.lo_closed, is_point, lab)
        else:
            regions.append(Region(lo, hi, is_point, is_point, lab))
    return regions


def eventual_sign_region(coeffs: list) -> list[Region]:
    """Partition the b-line by the eventual sign in m.

    ``coeffs[k]`` is the coefficient of ``m**k`` as a univariate polynomial in
    ``b``.  At each b the label is the sign of the highest-degree coefficient
    that does not vanish there.
    """
    if all(_as_dense(c) == [] for c in coeffs):
        return [Region(None, None, False, False, 0)]
    return merge_cells(sign_cells([list(coeffs)]), lambda s: s[0])
