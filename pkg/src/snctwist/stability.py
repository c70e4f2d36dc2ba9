"""Stability defects e_Y, eventual-sign semistability and twistable intervals."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import PreconditionError
from .exactnum import (
    Point,
    Poly,
    Region,
    RootBox,
    algebraic_equal,
    compare,
    describe_point,
    eventual_sign,
    floor_of,
    format_rational,
    merge_cells,
    point_record,
    sign_cells,
)
from .sncmodel import ClassExpr, Configuration

__all__ = [
    "MINUS",
    "PLUS",
    "IntervalReport",
    "KXResult",
    "e_value",
    "e_poly",
    "m_coefficients",
    "eventually_nonpositive",
    "eventually_nonnegative",
    "semistable_unions",
    "is_semistable",
    "first_failure",
    "twistable_interval",
    "kx_criterion",
]

MINUS = "minus"
PLUS = "plus"

UNIT = "UnitInterval"
DEGENERATE = "Degenerate"


def _check_mode(mode: str) -> int:
    if mode == MINUS:
        return -1
    if mode == PLUS:
        return 1
    raise ValueError(f"mode must be 'minus' or 'plus', got {mode!r}")


def _sign_ok(sign: int, mode_sign: int) -> bool:
    """minus mode wants eventual sign <= 0, plus mode >= 0."""
    return sign * mode_sign >= 0


def _e_from_vector(config: Configuration, Y: frozenset, vec: Sequence):
    d = config.d
    yvec = config.union_vector(Y)
    xvec = config.union_vector(config.all_components)
    chi_X = config.chi_union_vec(config.all_components, vec)
    inner = Fraction(0)
    for j in range(1, d + 2):
        term = config.form([vec] * (d + 1 - j) + [yvec] * j)
        if term:
            inner = inner + math.comb(d + 1, j) * (-1) ** (j - 1) * term
    first = chi_X * inner * Fraction(1, d + 1)
    second = config.form([vec] * d + [xvec]) * config.chi_union_vec(Y, vec)
    return math.factorial(d) * (first - second)


def _nonempty(config: Configuration, Y) -> frozenset:
    Ys = config.subset(Y)
    if not Ys:
        raise ValueError("the union must be nonempty")
    return Ys


def e_value(config: Configuration, Y: Iterable, M: ClassExpr) -> Fraction:
    """Exact stability defect e_Y(M)."""
    Ys = _nonempty(config, Y)
    return Fraction(_e_from_vector(config, Ys, config.vector(M)))


def e_poly(config: Configuration, Y: Iterable, L: ClassExpr, H: ClassExpr, W: Iterable | None = None) -> Poly:
    """e_Y(L + m*H + b*W) as an exact polynomial in ``m`` and ``b``.

    With ``W=None`` the variable ``b`` does not occur.
    """
    Ys = _nonempty(config, Y)
    lv, hv = config.vector(L), config.vector(H)
    m = Poly.var("m")
    b = Poly.var("b")
    wset = None
    if W is not None:
        wset = config.subset(W)
        if not wset:
            raise ValueError("the twisting union must be nonempty")
    vec = []
    for i in range(len(lv)):
        entry = Poly.const(lv[i]) + m * hv[i]
        if wset is not None and i in wset:
            entry = entry + b
        vec.append(entry)
    return Poly.coerce(_e_from_vector(config, Ys, vec))


def m_coefficients(P: Poly) -> list[list[Fraction]]:
    """Coefficients of ``m**k`` in a polynomial of (m, b), as dense b-polynomials."""
    if P.is_zero():
        return []
    return [c.univariate("b") for c in P.coeffs("m")]


def eventually_nonpositive(config: Configuration, Y: Iterable, L: ClassExpr, H: ClassExpr) -> bool:
    return eventual_sign(e_poly(config, Y, L, H)) <= 0


def eventually_nonnegative(config: Configuration, Y: Iterable, L: ClassExpr, H: ClassExpr) -> bool:
    return eventual_sign(e_poly(config, Y, L, H)) >= 0


def semistable_unions(config: Configuration, scope: str = "connected_pairs") -> list[frozenset]:
    """Nonempty proper unions examined by :func:`is_semistable`."""
    if scope in ("connected_pairs", "pairs"):
        return [
            Y
            for Y in config.proper_unions()
            if config.is_connected(Y) and config.is_connected(config.complement(Y))
        ]
    if scope in ("all_unions", "all"):
        return config.proper_unions()
    raise ValueError(f"unknown scope {scope!r}")


def first_failure(
    config: Configuration, L: ClassExpr, H: ClassExpr, mode: str = MINUS, scope: str = "connected_pairs"
) -> tuple[frozenset, Poly] | None:
    """First union violating the eventual-sign condition, with its polynomial in m."""
    ms = _check_mode(mode)
    for Y in semistable_unions(config, scope):
        p = e_poly(config, Y, L, H)
        if not _sign_ok(eventual_sign(p), ms):
            return Y, p
    return None


def is_semistable(
    config: Configuration, L: ClassExpr, H: ClassExpr, mode: str = MINUS, scope: str = "connected_pairs"
) -> bool:
    return first_failure(config, L, H, mode, scope) is None


# ---------------------------------------------------------------------------
# twistable intervals


@dataclass(frozen=True)
class IntervalReport:
    """Solution set in b of the two eventual-sign conditions for (Y, Z).

    For a unit interval, ``endpoint`` is its right end s and the set runs
    from s - 1 to s.  ``regions`` always holds the full partition of the
    b-line into kept (True) and rejected (False) pieces.
    """

    kind: str
    union: frozenset
    mode: str
    regions: tuple[Region, ...]
    endpoint: Point | None = None
    left_closed: bool = False
    right_closed: bool = False
    case: str | None = None
    candidates: tuple[int, ...] = ()
    reason: str = ""
    A1: Fraction | None = None
    A0: Fraction | None = None
    limit_case: str | None = None
    cross_check: bool | None = None

    @property
    def is_unit(self) -> bool:
        return self.kind == UNIT

    @property
    def left(self) -> Point | None:
        if self.endpoint is None:
            return None
        return _shift(self.endpoint, -1)

    def describe(self) -> str:
        if self.is_unit:
            left = "[" if self.left_closed else "("
            right = "]" if self.right_closed else ")"
            cands = ", ".join(str(c) for c in self.candidates)
            return (
                f"{left}{describe_point(self.left)}, {describe_point(self.endpoint)}{right}"
                f" {self.case}; candidates {{{cands}}}"
            )
        kept = [r.describe() for r in self.regions if r.label]
        return f"Degenerate: {self.reason}; solution set: {' U '.join(kept) if kept else 'empty'}"

    def to_record(self, names: Sequence[str] | None = None) -> dict:
        rec: dict = {
            "kind": self.kind,
            "union": [names[i] for i in sorted(self.union)] if names else sorted(self.union),
            "mode": self.mode,
        }
        if self.is_unit:
            rec.update(
                left=point_record(self.left),
                endpoint=point_record(self.endpoint),
                left_closed=self.left_closed,
                right_closed=self.right_closed,
                case=self.case,
                candidates=list(self.candidates),
            )
        else:
            rec["reason"] = self.reason
        if self.A1 is not None:
            rec["A1"] = format_rational(self.A1)
            rec["A0"] = format_rational(self.A0)
        if self.cross_check is not None:
            rec["cross_check"] = self.cross_check
        rec["regions"] = [r.to_record() for r in self.regions]
        return rec


def _shift(x: Point, c: int) -> Point:
    if isinstance(x, RootBox):
        return x.shift(c).value()
    return Fraction(x) + c


def integers_in(region: Region) -> list[int]:
    if region.lo is None or region.hi is None:
        raise ValueError("unbounded region")
    lo_int = floor_of(region.lo)
    if compare(lo_int, region.lo) < 0 or (compare(lo_int, region.lo) == 0 and not region.lo_closed):
        lo_int += 1
    hi_int = floor_of(region.hi)
    if compare(hi_int, region.hi) == 0 and not region.hi_closed:
        hi_int -= 1
    return list(range(lo_int, hi_int + 1))


def _case_from_limit(q_sign: int, A1: Fraction) -> str:
    if q_sign == 0:
        return "Case3"
    if (q_sign > 0) == (A1 > 0):
        return "Case2"
    return "Case1"


_CASE_FLAGS = {"Case1": (False, True), "Case2": (True, False), "Case3": (True, True)}


def _case_from_flags(left: bool, right: bool) -> str | None:
    for name, flags in _CASE_FLAGS.items():
        if flags == (left, right):
            return name
    return None


def _evsign_at(P: Poly, b: Point) -> int:
    """Eventual sign in m of P(m, b) at an exact point b."""
    if isinstance(b, RootBox):
        from .exactnum import sign_at

        for coeff in reversed(m_coefficients(P)):
            s = sign_at(coeff, b)
            if s:
                return s
        return 0
    return eventual_sign(P.subs({"b": Fraction(b)}))


def twistable_interval(
    config: Configuration, Y: Iterable, L: ClassExpr, H: ClassExpr, mode: str = MINUS
) -> IntervalReport:
    """Exact set of real b for which both Y and its complement pass at L + bY."""
    ms = _check_mode(mode)
    Ys = config.subset(Y)
    if not Ys or Ys == config.all_components:
        raise ValueError("Y must be a nonempty proper union of components")
    Zs = config.complement(Ys)
    P = e_poly(config, Ys, L, H, W=Ys)
    Q = e_poly(config, Zs, L, H, W=Ys)
    famP, famQ = m_coefficients(P), m_coefficients(Q)
    cells = sign_cells([famP or [[]], famQ or [[]]])
    regions = tuple(merge_cells(cells, lambda s: _sign_ok(s[0], ms) and _sign_ok(s[1], ms)))
    kept = [r for r in regions if r.label]

    A1 = A0 = None
    s_limit = None
    limit_case = None
    if famP:
        top = [c for c in famP[-1]]
        while top and top[-1] == 0:
            top.pop()
        if len(top) == 2:
            A0, A1 = top[0], top[1]
            s_limit = -A0 / A1
            q = P.subs({"b": s_limit})
            limit_case = _case_from_limit(eventual_sign(q), A1)

    def degenerate(reason: str) -> IntervalReport:
        return IntervalReport(
            kind=DEGENERATE, union=Ys, mode=mode, regions=regions, reason=reason, A1=A1, A0=A0,
        )

    if P.degree("b") <= 0 and Q.degree("b") <= 0:
        return degenerate("e_Y(L+mH+bY) and e_Z(L+mH+bY) do not depend on b")
    if not kept:
        return degenerate("empty solution set")
    if len(kept) > 1:
        return degenerate("solution set is not connected")
    reg = kept[0]
    if reg.lo is None or reg.hi is None:
        return degenerate("solution set is unbounded")
    if reg.is_point():
        return degenerate("solution set is a single point")
    if not algebraic_equal(_shift(reg.lo, 1), reg.hi):
        return degenerate("solution set is a bounded interval of length other than 1")
    if not (reg.lo_closed or reg.hi_closed):
        return degenerate("unit interval contains neither endpoint")

    s = reg.hi
    # endpoint inclusion by direct evaluation at s and s - 1
    right = _sign_ok(_evsign_at(P, s), ms) and _sign_ok(_evsign_at(Q, s), ms)
    left_pt = _shift(s, -1)
    left = _sign_ok(_evsign_at(P, left_pt), ms) and _sign_ok(_evsign_at(Q, left_pt), ms)
    cross = None
    if limit_case is not None:
        cross = (
            compare(s_limit, s) == 0
            and _CASE_FLAGS[limit_case] == (left, right)
            and (left, right) == (reg.lo_closed, reg.hi_closed)
        )
    case = limit_case if cross else _case_from_flags(left, right)
    if case == "Case3" and config.d == 1:
        case = "CurveExact"
    return IntervalReport(
        kind=UNIT,
        union=Ys,
        mode=mode,
        regions=regions,
        endpoint=s,
        left_closed=left,
        right_closed=right,
        case=case,
        candidates=tuple(integers_in(reg)),
        A1=A1,
        A0=A0,
        limit_case=limit_case,
        cross_check=cross,
    )


# ---------------------------------------------------------------------------
# canonical sign criterion


@dataclass(frozen=True)
class KXResult:
    value: Fraction
    classification: str
    k_top: Fraction
    k_yy: Fraction

    def to_record(self) -> dict:
        return {
            "value": format_rational(self.value),
            "classification": self.classification,
            "K^d.X": format_rational(self.k_top),
            "K^(d-1).Y.Y": format_rational(self.k_yy),
        }


def kx_criterion(config: Configuration, Y: Iterable) -> KXResult:
    """Sign of [K^d X] * [K^(d-1) Y Y], deciding K-minus or K-plus twistability."""
    if config.canonical is None:
        raise PreconditionError("no canonical class is designated in this configuration")
    Ys = _nonempty(config, Y)
    d = config.d
    K = config.vector(config.bundle_class(config.canonical))
    X = config.union_vector(config.all_components)
    yv = config.union_vector(Ys)
    k_top = Fraction(config.form([K] * d + [X]))
    k_yy = Fraction(config.form([K] * (d - 1) + [yv, yv]))
    value = k_top * k_yy
    if value < 0:
        cls = "MinusTwistable"
    elif value > 0:
        cls = "PlusTwistable"
    else:
        cls = "Inconclusive"
    return KXResult(value, cls, k_top, k_yy)
