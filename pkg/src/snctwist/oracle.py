"""Independent cross-checks: brute-force twist search, balanced multidegrees,
identity batteries, degree bounds and finite thresholds in m.

The defect evaluator here expands the intersection table by multinomial
counting instead of permutations and never calls the stability module, so a
bug in one implementation shows up as a disagreement with the other.
"""
from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import PreconditionError
from .exactnum import Poly, eventual_sign, format_rational, isolate_real_roots
from .sncmodel import ClassExpr, Configuration, emit_config
from .twistenum import Twist

__all__ = [
    "OracleReport",
    "BalancedRow",
    "Threshold",
    "eq1",
    "eq1_poly",
    "brute_force_twists",
    "oracle_window",
    "balanced_check",
    "identity_battery",
    "degree_bound_battery",
    "m_threshold",
    "m_threshold_poly",
]


# ---------------------------------------------------------------------------
# reports


@dataclass
class OracleReport:
    """Outcome of a battery of exact checks on one instance."""

    instance: str
    checks: dict[str, int] = field(default_factory=dict)
    failures: list[dict] = field(default_factory=list)
    reproducer: str | None = None

    @property
    def ok(self) -> bool:
        return not self.failures

    def record(self, name: str, passed: bool, **witness) -> None:
        self.checks[name] = self.checks.get(name, 0) + 1
        if not passed:
            self.failures.append({"check": name, **{k: _plain(v) for k, v in witness.items()}})

    def to_record(self) -> dict:
        rec = {"instance": self.instance, "ok": self.ok, "checks": dict(self.checks), "failures": self.failures}
        if self.failures and self.reproducer:
            rec["reproducer"] = self.reproducer
        return rec


def _plain(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, (frozenset, set)):
        return sorted(v)
    if isinstance(v, Poly):
        return str(v)
    if isinstance(v, ClassExpr):
        return {"comp": list(v.comp), "bundles": dict(v.bundles)}
    return v


# ---------------------------------------------------------------------------
# independent evaluation of the defect


def _multinomial(counts: Iterable[int]) -> int:
    counts = list(counts)
    out = math.factorial(sum(counts))
    for c in counts:
        out //= math.factorial(c)
    return out


def _sub_multisets(key: tuple, size: int):
    """Distinct sub-multisets of ``key`` of the given size, with the remainder."""
    cnt = Counter(key)
    syms = sorted(cnt)

    def rec(i, left):
        if i == len(syms):
            if left == 0:
                yield {}
            return
        s = syms[i]
        for k in range(min(cnt[s], left) + 1):
            for rest in rec(i + 1, left - k):
                yield {s: k, **rest} if k else rest

    for chosen in rec(0, size):
        remainder = {s: cnt[s] - chosen.get(s, 0) for s in syms if cnt[s] - chosen.get(s, 0)}
        yield chosen, remainder


def _power_pair(config: Configuration, A: Sequence, p: int, B: Sequence, q: int):
    """[A^p B^q] for the symmetric form, by splitting each key between A and B."""
    total = Fraction(0)
    for key, val in config.intersection.items():
        for toB, toA in _sub_multisets(key, q):
            coef = _multinomial(toA.values()) * _multinomial(toB.values())
            prod = val * coef
            for s, k in toA.items():
                prod = prod * A[s] ** k
            for s, k in toB.items():
                prod = prod * B[s] ** k
            total = total + prod
    return total


def _chi(config: Configuration, terms: dict, vec: Sequence):
    total = Fraction(0)
    for key, val in terms.items():
        prod = val
        for s in key:
            prod = prod * vec[s]
        total = total + prod
    return total


def _chi_union(config: Configuration, Y: frozenset, vec: Sequence):
    total = sum((_chi(config, config.chi_components[i], vec) for i in Y), Fraction(0))
    for (i, j), terms in config.chi_edges.items():
        if i in Y and j in Y:
            total = total - _chi(config, terms, vec)
    return total


def _indicator(config: Configuration, Y: Iterable[int]) -> list[Fraction]:
    Y = set(Y)
    return [Fraction(1) if i in Y else Fraction(0) for i in range(len(config.symbols))]


def eq1(config: Configuration, Y: Iterable[int], vec: Sequence):
    """Defect of the class with coordinate vector ``vec`` along the union Y."""
    Y = frozenset(Y)
    d = config.d
    yv = _indicator(config, Y)
    xv = _indicator(config, range(config.n))
    alt = Fraction(0)
    for j in range(1, d + 2):
        alt = alt + (-1) ** (j - 1) * math.comb(d + 1, j) * _power_pair(config, vec, d + 1 - j, yv, j)
    chi_x = _chi_union(config, frozenset(range(config.n)), vec)
    top = _power_pair(config, vec, d, xv, 1)
    return math.factorial(d) * (chi_x * alt / (d + 1) - top * _chi_union(config, Y, vec))


def _class_vec(config: Configuration, M: ClassExpr) -> list[Fraction]:
    return config.vector(M)


def eq1_poly(config: Configuration, Y: Iterable[int], L: ClassExpr, H: ClassExpr, twist_vars: bool = False) -> Poly:
    """Defect at L + m*H (+ sum t_i Y_i with symbolic t_2..t_n if requested)."""
    lv, hv = _class_vec(config, L), _class_vec(config, H)
    m = Poly.var("m")
    vec = []
    for i in range(len(lv)):
        entry = lv[i] + m * hv[i]
        if twist_vars and 0 < i < config.n:
            entry = entry + Poly.var(f"t{i}")
        vec.append(Poly.coerce(entry))
    return Poly.coerce(eq1(config, Y, vec))


# ---------------------------------------------------------------------------
# brute force


def _mode_sign(mode: str) -> int:
    if mode not in ("minus", "plus"):
        raise ValueError(f"mode must be 'minus' or 'plus', got {mode!r}")
    return -1 if mode == "minus" else 1


def brute_force_twists(
    config: Configuration, L: ClassExpr, H: ClassExpr, mode: str = "minus", window: int = 10
) -> set[Twist]:
    """Every normalized twist with entries in [-W, W] that is semistable.

    Each candidate is judged on all proper unions.  A union is tested as soon
    as all twist variables it depends on are fixed, which prunes the search
    without skipping any test.
    """
    n = config.n
    if n > 12:
        raise PreconditionError("brute force limited to at most 12 components")
    if window < 0:
        raise ValueError("window must be nonnegative")
    ms = _mode_sign(mode)
    if n == 1:
        return {Twist((0,))}
    unions = [frozenset(i for i in range(n) if mask >> i & 1) for mask in range(1, 2**n - 1)]
    polys = [eq1_poly(config, Y, L, H, twist_vars=True) for Y in unions]
    ready_at: dict[int, list[Poly]] = {}
    for p in polys:
        idx = [int(v[1:]) for v in p.variables() if v.startswith("t")]
        ready_at.setdefault(max(idx, default=0), []).append(p)
    found: set[Twist] = set()
    values: dict[str, int] = {}

    def passes(p: Poly) -> bool:
        q = p.subs({k: v for k, v in values.items() if k in p.variables()}) if p.variables() - {"m"} else p
        return eventual_sign(q) * ms >= 0

    if not all(passes(p) for p in ready_at.get(0, [])):
        return found

    def dfs(i: int):
        if i == n:
            found.add(Twist((0,) + tuple(values[f"t{k}"] for k in range(1, n))))
            return
        for a in range(-window, window + 1):
            values[f"t{i}"] = a
            if all(passes(p) for p in ready_at.get(i, [])):
                dfs(i + 1)
        values.pop(f"t{i}", None)

    dfs(1)
    return found


def oracle_window(trace_intervals, base: int = 10) -> int:
    """Window large enough to contain every candidate of an enumeration trace."""
    from .exactnum import floor_of

    w = base
    for rep in trace_intervals:
        if rep.endpoint is not None:
            w = max(w, abs(floor_of(rep.endpoint)) + 2)
        for c in rep.candidates:
            w = max(w, abs(c) + 1)
    return w


# ---------------------------------------------------------------------------
# balanced multidegrees


@dataclass(frozen=True)
class BalancedRow:
    union: frozenset
    d_Y: Fraction
    g_Y: Fraction
    k_Y: Fraction
    bound: Fraction
    balanced: bool
    e: Fraction
    agrees: bool

    def to_record(self, names) -> dict:
        return {
            "union": [names[i] for i in sorted(self.union)],
            "d_Y": format_rational(self.d_Y),
            "g_Y": format_rational(self.g_Y),
            "k_Y": format_rational(self.k_Y),
            "bound": format_rational(self.bound),
            "balanced": self.balanced,
            "e": format_rational(self.e),
            "agrees": self.agrees,
        }


def balanced_check(config: Configuration, L: ClassExpr) -> list[BalancedRow]:
    """Caporaso's inequality for each union, next to the sign of the defect at L + mK."""
    if config.d != 1:
        raise PreconditionError("balanced multidegrees are defined for curves")
    if config.canonical is None:
        raise PreconditionError("no canonical class designated")
    zero = [Fraction(0)] * len(config.symbols)
    allc = frozenset(range(config.n))
    g_X = 1 - _chi_union(config, allc, zero)
    if g_X < 2:
        raise PreconditionError(f"arithmetic genus {g_X} < 2")
    lv = _class_vec(config, L)
    xv = _indicator(config, allc)
    d_X = _power_pair(config, lv, 1, xv, 1)
    K = ClassExpr.bundle(config.canonical)
    rows = []
    for mask in range(1, 2**config.n - 1):
        Y = frozenset(i for i in range(config.n) if mask >> i & 1)
        yv = _indicator(config, Y)
        d_Y = _power_pair(config, lv, 1, yv, 1)
        g_Y = 1 - _chi_union(config, Y, zero)
        k_Y = -_power_pair(config, yv, 0, yv, 2)
        bound = d_X / (g_X - 1) * (g_Y - 1 + k_Y / 2) - k_Y / 2
        balanced = d_Y >= bound
        p = eq1_poly(config, Y, L, K)
        sign = eventual_sign(p)
        e = p.subs({"m": 0}).constant() if not p.is_zero() else Fraction(0)
        rows.append(BalancedRow(Y, d_Y, g_Y, k_Y, bound, balanced, e, balanced == (sign <= 0)))
    return rows


# ---------------------------------------------------------------------------
# identity and degree batteries


def _random_class(config: Configuration, rng: random.Random, span: int = 6) -> ClassExpr:
    comp = tuple(rng.randint(-span, span) for _ in range(config.n))
    bundles = tuple((b, rng.randint(-span, span)) for b in config.bundles)
    return ClassExpr(comp, bundles)


def identity_battery(config: Configuration, samples: int = 100, seed: int = 0) -> OracleReport:
    """Exact checks of the defect identities on random unions, classes and twists.

    Checked: e_Z(M) = -e_Y(M+Y); additivity over connected parts; locality
    (twists away from the components meeting both Y and Z do not matter);
    e_X = 0; invariance under twisting by X.  Values come from the stability
    module, and a fraction of samples are also compared with this module's
    independent evaluator.
    """
    from .stability import e_value

    rng = random.Random(seed)
    report = OracleReport(instance=f"identity battery seed={seed} n={config.n} d={config.d}")
    n = config.n
    allc = frozenset(range(n))
    X = ClassExpr((1,) * n)
    for k in range(samples):
        M = _random_class(config, rng)
        eX = e_value(config, allc, M)
        report.record("e_X_zero", eX == 0, M=M, value=eX)
        if n == 1:
            continue
        mask = rng.randint(1, 2**n - 2)
        Y = frozenset(i for i in range(n) if mask >> i & 1)
        Z = allc - Y
        eY = e_value(config, Y, M)
        report.record("full_X_invariance", e_value(config, Y, M + X) == eY, Y=Y, M=M)
        lhs = e_value(config, Z, M)
        rhs = -e_value(config, Y, M + config.union_class(Y))
        report.record("complement_identity", lhs == rhs, Y=Y, M=M, e_Z=lhs, minus_e_Y_twisted=rhs)
        parts = config.connected_parts(Y)
        total = sum((e_value(config, P, M) for P in parts), Fraction(0))
        report.record("additivity", total == eY, Y=Y, M=M, whole=eY, parts=total)
        J = config.boundary(Y)
        tw = [rng.randint(-4, 4) for _ in range(n)]
        full = M + ClassExpr(tuple(tw))
        local = M + ClassExpr(tuple(t if i in J else 0 for i, t in enumerate(tw)))
        report.record("locality", e_value(config, Y, full) == e_value(config, Y, local), Y=Y, M=M, twist=tw)
        if k % 10 == 0:
            indep = Fraction(eq1(config, Y, config.vector(M)))
            report.record("independent_evaluator", indep == eY, Y=Y, M=M, engine=eY, oracle=indep)
    if report.failures:
        report.reproducer = emit_config(config)
    return report


def degree_bound_battery(
    config: Configuration, Y: Iterable, L: ClassExpr, H: ClassExpr | None = None
) -> OracleReport:
    """Degree bounds on the b-coefficients of e_Y(L + mH + bY).

    The bound deg_m <= 2d-1-i holds for any H.  With H = K additionally the
    constant coefficient has m-degree <= 2d-2, the linear coefficient has
    leading part -(d/2)[K^d][K^(d-1) Y Y] m^(2d-2), and for surfaces the
    quadratic coefficient has a closed form.
    """
    from .stability import e_poly

    Ys = config.subset(Y)
    d = config.d
    report = OracleReport(instance=f"degree bounds Y={config.format_union(Ys)} d={d}")
    is_K = False
    if H is None:
        if config.canonical is None:
            raise PreconditionError("no canonical class designated")
        H = ClassExpr.bundle(config.canonical)
    if config.canonical is not None and H == ClassExpr.bundle(config.canonical):
        is_K = True
    P = e_poly(config, Ys, L, H, W=Ys)
    coeffs = P.coeffs("b") if not P.is_zero() else []
    A = [c for c in coeffs]

    def get(i: int) -> Poly:
        return A[i] if i < len(A) else Poly()

    for i in range(len(A)):
        deg = A[i].degree("m")
        report.record("lemma_bound", deg <= 2 * d - 1 - i, i=i, degree=deg, bound=2 * d - 1 - i)
    report.record("b_degree", P.degree("b") <= d + 1, degree=P.degree("b"))
    if is_K:
        K = config.vector(H)
        xv = _indicator(config, range(config.n))
        yv = _indicator(config, Ys)
        Kd = _power_pair(config, K, d, xv, 1)
        KYY = _power_pair(config, K, d - 1, yv, 2)
        report.record("constant_degree", get(0).degree("m") <= 2 * d - 2, degree=get(0).degree("m"))
        a1 = get(1).coeffs("m") if not get(1).is_zero() else []
        lead = a1[2 * d - 2].constant() if len(a1) > 2 * d - 2 else Fraction(0)
        expected = -Fraction(d, 2) * Kd * KYY
        report.record("linear_leading", lead == expected and get(1).degree("m") <= 2 * d - 2, found=lead, expected=expected)
        if d == 2:
            lv = config.vector(L)
            Y3 = _power_pair(config, yv, 0, yv, 3)
            K2 = _power_pair(config, K, 2, xv, 1)
            LK = Fraction(config.form([lv, K, xv]))
            chiO = _chi_union(config, frozenset(range(config.n)), [Fraction(0)] * len(config.symbols))
            closed = Poly.var("m") * (-Y3 * K2) + (-Y3 * LK + 2 * Y3 * chiO)
            report.record("surface_quadratic", get(2) == closed, found=get(2), expected=closed)
    if report.failures:
        report.reproducer = emit_config(config)
    return report


# ---------------------------------------------------------------------------
# thresholds in m


@dataclass(frozen=True)
class Threshold:
    m0: int
    bound: Fraction
    sign: int
    verified: bool

    def to_record(self) -> dict:
        return {"m0": self.m0, "cauchy_bound": format_rational(self.bound), "sign": self.sign, "verified": self.verified}


def m_threshold_poly(p: Poly | Sequence, samples: int = 1000) -> Threshold:
    """Smallest m0 >= 1 after which p(m) keeps its eventual sign."""
    p = p if isinstance(p, Poly) else Poly.from_univariate(list(p), "m")
    extra = p.variables() - {"m"}
    if extra:
        raise ValueError(f"expected a polynomial in m, got {sorted(extra)}")
    if p.is_zero():
        return Threshold(1, Fraction(1), 0, True)
    dense = p.univariate("m")
    lead = dense[-1]
    bound = 1 + max((abs(c / lead) for c in dense[:-1]), default=Fraction(0))
    sign = eventual_sign(p)
    m0 = 1
    roots = isolate_real_roots(dense) if len(dense) > 1 else []
    if roots:
        from .exactnum import floor_of

        m0 = max(1, floor_of(roots[-1]) + 1)
    verified = all((1 if v > 0 else -1 if v < 0 else 0) == sign for v in (p(m=m) for m in range(m0, m0 + samples + 1)))
    verified = verified and (m0 == 1 or (1 if p(m=m0 - 1) > 0 else -1 if p(m=m0 - 1) < 0 else 0) != sign)
    return Threshold(m0, bound, sign, verified)


def m_threshold(config: Configuration, Y: Iterable, L: ClassExpr, H: ClassExpr, samples: int = 1000) -> Threshold:
    Ys = config.subset(Y)
    return m_threshold_poly(eq1_poly(config, Ys, L, H), samples)
