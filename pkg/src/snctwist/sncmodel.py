"""Combinatorial model of a simple-normal-crossings degeneration fiber.

A :class:`Configuration` records the components ``Y1..Yn`` of the fiber, its
dual graph, a symmetric intersection table of degree ``d+1`` over the basis
symbols (components plus named line-bundle classes), and Euler-characteristic
polynomials per component and per double locus.  Nothing is derived from actual
geometry; :func:`validate` checks the identities the stability calculus relies
on.
"""
from __future__ import annotations

import json
import math
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import combinations, combinations_with_replacement, permutations
from typing import Iterable, Sequence

from .errors import ConfigError
from .exactnum import Poly, format_rational, parse_rational

__all__ = [
    "ClassExpr",
    "Configuration",
    "CheckResult",
    "ValidationReport",
    "validate",
    "intersect",
    "chi_union",
    "curve_builder",
    "synth_generator",
    "load_config",
    "dump_config",
    "parse_config",
    "emit_config",
]


# ---------------------------------------------------------------------------
# formal classes


@dataclass(frozen=True)
class ClassExpr:
    """Integer combination of component classes and named bundle classes."""

    comp: tuple[int, ...] = ()
    bundles: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "comp", _strip_zeros(tuple(int(c) for c in self.comp)))
        merged: dict[str, int] = {}
        for name, c in self.bundles:
            merged[name] = merged.get(name, 0) + int(c)
        object.__setattr__(self, "bundles", tuple(sorted((k, v) for k, v in merged.items() if v)))

    @classmethod
    def bundle(cls, name: str, coeff: int = 1) -> "ClassExpr":
        return cls((), ((name, coeff),))

    @classmethod
    def components(cls, indices: Iterable[int], coeff: int = 1) -> "ClassExpr":
        idx = list(indices)
        vec = [0] * (max(idx) + 1 if idx else 0)
        for i in idx:
            vec[i] += coeff
        return cls(tuple(vec))

    @classmethod
    def zero(cls) -> "ClassExpr":
        return cls()

    def component(self, i: int) -> int:
        return self.comp[i] if i < len(self.comp) else 0

    def bundle_coeff(self, name: str) -> int:
        return dict(self.bundles).get(name, 0)

    def has_components(self) -> bool:
        return any(self.comp)

    def has_bundles(self) -> bool:
        return bool(self.bundles)

    def __add__(self, other: "ClassExpr") -> "ClassExpr":
        n = max(len(self.comp), len(other.comp))
        comp = tuple(self.component(i) + other.component(i) for i in range(n))
        return ClassExpr(comp, self.bundles + other.bundles)

    def __neg__(self) -> "ClassExpr":
        return ClassExpr(tuple(-c for c in self.comp), tuple((k, -v) for k, v in self.bundles))

    def __sub__(self, other: "ClassExpr") -> "ClassExpr":
        return self + (-other)

    def __mul__(self, k: int) -> "ClassExpr":
        return ClassExpr(tuple(k * c for c in self.comp), tuple((n, k * v) for n, v in self.bundles))

    __rmul__ = __mul__

    def format(self, names: Sequence[str]) -> str:
        parts = [(names[i], c) for i, c in enumerate(self.comp) if c] + list(self.bundles)
        if not parts:
            return "0"
        out = ""
        for name, c in parts:
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 else f"{abs(c)}*"
            out += f"{sign}{mag}{name}"
        return out.lstrip("+")


def _strip_zeros(t: tuple) -> tuple:
    t = list(t)
    while t and t[-1] == 0:
        t.pop()
    return tuple(t)


# ---------------------------------------------------------------------------
# configuration


@lru_cache(maxsize=None)
def _distinct_perms(key: tuple) -> tuple:
    return tuple(set(permutations(key)))


def _is_zero(x) -> bool:
    return not x


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    witness: str = ""

    def to_record(self) -> dict:
        rec = {"name": self.name, "passed": self.passed}
        if self.witness:
            rec["witness"] = self.witness
        return rec


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def __getitem__(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)


@dataclass(frozen=True)
class Configuration:
    """An SNC fiber described purely by its numerical data.

    Symbols are indexed components first, then bundles.  Intersection keys and
    chi-term keys are sorted tuples of symbol indices.  Intersection values are
    intersection numbers (entries of the symmetric form); chi terms are
    polynomial coefficients, so ``chi(M) = sum(value * prod(M[s] for s in key))``.
    """

    dimension: int
    components: tuple[str, ...]
    edges: tuple[tuple[int, int], ...]
    bundles: tuple[str, ...]
    intersection: dict
    chi_components: tuple[dict, ...]
    chi_edges: dict
    canonical: str | None = None

    def __post_init__(self):
        d = self.dimension
        if not isinstance(d, int) or d < 1:
            raise ConfigError(f"dimension must be a positive integer, got {d!r}")
        names = list(self.components) + list(self.bundles)
        if len(set(names)) != len(names):
            raise ConfigError("component and bundle names must be distinct")
        if not self.components:
            raise ConfigError("at least one component is required")
        n = len(self.components)
        nsym = len(names)
        norm_edges = []
        for e in self.edges:
            i, j = e
            if not (0 <= i < n and 0 <= j < n):
                raise ConfigError(f"edge {e} references an unknown component")
            if i == j:
                raise ConfigError(f"edge {e} is a loop")
            norm_edges.append((min(i, j), max(i, j)))
        if len(set(norm_edges)) != len(norm_edges):
            raise ConfigError("duplicate edge")
        object.__setattr__(self, "edges", tuple(sorted(norm_edges)))
        table = {}
        for key, val in self.intersection.items():
            key = tuple(sorted(key))
            if len(key) != d + 1:
                raise ConfigError(f"intersection key {key} must have {d + 1} symbols")
            if any(not (0 <= s < nsym) for s in key):
                raise ConfigError(f"intersection key {key} has an unknown symbol")
            if not any(s < n for s in key):
                raise ConfigError(f"intersection key {key} has no component symbol")
            if key in table:
                raise ConfigError(f"duplicate intersection key {key}")
            if val:
                table[key] = Fraction(val)
        object.__setattr__(self, "intersection", table)
        if len(self.chi_components) != n:
            raise ConfigError("one chi functional per component is required")
        object.__setattr__(
            self, "chi_components", tuple(self._norm_chi(t, d, nsym, f"component {self.components[i]}") for i, t in enumerate(self.chi_components))
        )
        chi_e = {}
        for e, terms in self.chi_edges.items():
            e = (min(e), max(e))
            if e not in self.edges:
                raise ConfigError(f"chi data for {e} which is not an edge")
            chi_e[e] = self._norm_chi(terms, d - 1, nsym, f"edge {e}")
        for e in self.edges:
            chi_e.setdefault(e, {})
        object.__setattr__(self, "chi_edges", chi_e)
        if self.canonical is not None and self.canonical not in self.bundles:
            raise ConfigError(f"canonical symbol {self.canonical!r} is not a declared bundle")

    @staticmethod
    def _norm_chi(terms: dict, maxdeg: int, nsym: int, owner: str) -> dict:
        out = {}
        for key, val in terms.items():
            key = tuple(sorted(key))
            if len(key) > maxdeg:
                raise ConfigError(f"chi term {key} of {owner} exceeds degree {maxdeg}")
            if any(not (0 <= s < nsym) for s in key):
                raise ConfigError(f"chi term {key} of {owner} has an unknown symbol")
            if key in out:
                raise ConfigError(f"duplicate chi term {key} of {owner}")
            if val:
                out[key] = Fraction(val)
        return out

    # -- basic structure
    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def d(self) -> int:
        return self.dimension

    @cached_property
    def symbols(self) -> tuple[str, ...]:
        return tuple(self.components) + tuple(self.bundles)

    @cached_property
    def symbol_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.symbols)}

    @cached_property
    def neighbors(self) -> tuple[frozenset, ...]:
        nb = [set() for _ in range(self.n)]
        for i, j in self.edges:
            nb[i].add(j)
            nb[j].add(i)
        return tuple(frozenset(s) for s in nb)

    @cached_property
    def all_components(self) -> frozenset:
        return frozenset(range(self.n))

    def is_connected(self, subset: Iterable[int] | None = None) -> bool:
        sub = set(self.all_components if subset is None else subset)
        if not sub:
            return False
        start = next(iter(sub))
        seen = {start}
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in self.neighbors[v]:
                if w in sub and w not in seen:
                    seen.add(w)
                    queue.append(w)
        return seen == sub

    def connected_parts(self, subset: Iterable[int]) -> list[frozenset]:
        sub = set(subset)
        parts = []
        while sub:
            start = min(sub)
            seen = {start}
            queue = deque([start])
            while queue:
                v = queue.popleft()
                for w in self.neighbors[v]:
                    if w in sub and w not in seen:
                        seen.add(w)
                        queue.append(w)
            parts.append(frozenset(seen))
            sub -= seen
        return parts

    def is_tree(self) -> bool:
        return self.is_connected() and len(self.edges) == self.n - 1

    def subset(self, Y: Iterable) -> frozenset:
        """Normalize a union of components given by indices or names."""
        out = set()
        for y in Y:
            if isinstance(y, str):
                if y not in self.components:
                    raise ConfigError(f"unknown component {y!r}")
                out.add(self.components.index(y))
            else:
                if not (0 <= int(y) < self.n):
                    raise ConfigError(f"component index {y} out of range")
                out.add(int(y))
        return frozenset(out)

    def complement(self, Y: frozenset) -> frozenset:
        return self.all_components - Y

    def proper_unions(self) -> list[frozenset]:
        n = self.n
        return [frozenset(i for i in range(n) if mask >> i & 1) for mask in range(1, 2**n - 1)]

    def boundary(self, Y: frozenset) -> frozenset:
        """Components meeting both Y and its complement."""
        Z = self.complement(Y)
        out = set()
        for i in range(self.n):
            near = self.neighbors[i] | {i}
            if near & Y and near & Z:
                out.add(i)
        return frozenset(out)

    def format_union(self, Y: Iterable[int]) -> str:
        return "{" + ",".join(self.components[i] for i in sorted(Y)) + "}"

    # -- classes as vectors over the symbols
    def vector(self, M: ClassExpr) -> list[Fraction]:
        if len(M.comp) > self.n:
            raise ConfigError(f"class has {len(M.comp)} component coefficients, configuration has {self.n}")
        vec = [Fraction(0)] * len(self.symbols)
        for i, c in enumerate(M.comp):
            vec[i] = Fraction(c)
        for name, c in M.bundles:
            if name not in self.bundles:
                raise ConfigError(f"unknown bundle symbol {name!r}")
            vec[self.symbol_index[name]] = Fraction(c)
        return vec

    def union_vector(self, Y: Iterable[int]) -> list[Fraction]:
        vec = [Fraction(0)] * len(self.symbols)
        for i in Y:
            vec[i] = Fraction(1)
        return vec

    def bundle_class(self, name: str) -> ClassExpr:
        if name not in self.bundles:
            raise ConfigError(f"unknown bundle symbol {name!r}")
        return ClassExpr.bundle(name)

    def union_class(self, Y: Iterable[int]) -> ClassExpr:
        vec = [0] * self.n
        for i in Y:
            vec[i] = 1
        return ClassExpr(tuple(vec))

    def parse_class(self, text: str) -> ClassExpr:
        """Parse expressions such as ``L``, ``L+2*Y1-K`` or ``3L - Y2``."""
        import re

        s = text.replace(" ", "")
        if not s:
            raise ConfigError("empty class expression")
        if s == "0":
            return ClassExpr()
        total = ClassExpr()
        for sign, coef, name in re.findall(r"([+-]?)(\d*)\*?([A-Za-z_][A-Za-z0-9_]*)", s):
            k = int(coef) if coef else 1
            if sign == "-":
                k = -k
            if name in self.components:
                i = self.components.index(name)
                total = total + ClassExpr.components([i], k)
            elif name in self.bundles:
                total = total + ClassExpr.bundle(name, k)
            else:
                raise ConfigError(f"unknown symbol {name!r} in class expression {text!r}")
        rebuilt = re.sub(r"([+-]?)(\d*)\*?([A-Za-z_][A-Za-z0-9_]*)", "", s)
        if rebuilt:
            raise ConfigError(f"cannot parse class expression {text!r}")
        return total

    # -- evaluation
    def form(self, vecs: Sequence[Sequence]) -> object:
        """Evaluate the symmetric (d+1)-linear intersection form.

        Vector entries may be Fractions or :class:`Poly` objects.
        """
        if len(vecs) != self.d + 1:
            raise ValueError(f"need {self.d + 1} arguments, got {len(vecs)}")
        total = Fraction(0)
        for key, val in self.intersection.items():
            for perm in _distinct_perms(key):
                prod = val
                for v, s in zip(vecs, perm):
                    x = v[s]
                    if _is_zero(x):
                        prod = 0
                        break
                    prod = prod * x
                if not _is_zero(prod):
                    total = total + prod
        return total

    def chi_eval(self, terms: dict, vec: Sequence) -> object:
        total = Fraction(0)
        for key, val in terms.items():
            prod = val
            for s in key:
                x = vec[s]
                if _is_zero(x):
                    prod = 0
                    break
                prod = prod * x
            if not _is_zero(prod):
                total = total + prod
        return total

    def chi_union_vec(self, Y: Iterable[int], vec: Sequence) -> object:
        Y = frozenset(Y)
        total = Fraction(0)
        for i in sorted(Y):
            total = total + self.chi_eval(self.chi_components[i], vec)
        for e in self.edges:
            if e[0] in Y and e[1] in Y:
                total = total - self.chi_eval(self.chi_edges[e], vec)
        return total

    @cached_property
    def report(self) -> ValidationReport:
        return validate(self)

    def require_valid(self) -> None:
        rep = self.report
        if not rep.ok:
            bad = "; ".join(f"{c.name}: {c.witness}" for c in rep.failed())
            raise ConfigError(f"configuration fails validation: {bad}")


def intersect(config: Configuration, classes: Sequence[ClassExpr]) -> Fraction:
    """Intersection number of d+1 classes on the fiber."""
    if len(classes) != config.d + 1:
        raise ValueError(f"need exactly {config.d + 1} classes, got {len(classes)}")
    if all(c.has_bundles() for c in classes):
        raise ValueError("at least one argument must be supported on the fiber components")
    return config.form([config.vector(c) for c in classes])


def chi_union(config: Configuration, Y: Iterable, M: ClassExpr) -> Fraction:
    """Euler characteristic of M restricted to the union Y (pairwise inclusion-exclusion)."""
    Ys = config.subset(Y)
    if not Ys:
        raise ValueError("the union must be nonempty")
    return config.chi_union_vec(Ys, config.vector(M))


# ---------------------------------------------------------------------------
# validation


def _symbolic_vector(config: Configuration) -> list[Poly]:
    return [Poly.var(f"x{i}") for i in range(len(config.symbols))]


def _homogeneous_part(p: Poly, deg: int) -> Poly:
    return Poly._raw({k: c for k, c in p.terms.items() if sum(e for _, e in k) == deg})


def validate(config: Configuration, max_union_components: int = 12) -> ValidationReport:
    """Run every model check and report pass/fail with a witness for failures."""
    c = config
    d, n = c.d, c.n
    checks: list[CheckResult] = []

    # (a) connectivity
    checks.append(CheckResult("connected", c.is_connected(), "" if c.is_connected() else "dual graph is disconnected"))

    # (b) adjacency vanishing
    adj = set(c.edges)
    bad = None
    for key, val in c.intersection.items():
        comps = sorted({s for s in key if s < n})
        for i, j in combinations(comps, 2):
            if (i, j) not in adj:
                bad = f"entry {[c.symbols[s] for s in key]} = {format_rational(val)} involves non-adjacent {c.components[i]}, {c.components[j]}"
                break
        if bad:
            break
    checks.append(CheckResult("adjacency_vanishing", bad is None, bad or ""))

    # (c) the fiber class restricts trivially: [S . Y_c . X] = 0
    bad = None
    for S in combinations_with_replacement(range(len(c.symbols)), d - 1):
        for comp in range(n):
            total = sum((c.intersection.get(tuple(sorted(S + (comp, i))), 0) for i in range(n)), Fraction(0))
            if total:
                names = [c.symbols[s] for s in S] + [c.components[comp], "X"]
                bad = f"[{' '.join(names)}] = {format_rational(total)}"
                break
        if bad:
            break
    checks.append(CheckResult("x_squared", bad is None, bad or ""))

    # (g) edges are exactly the supported pairs
    support = set()
    for key in c.intersection:
        comps = sorted({s for s in key if s < n})
        for i, j in combinations(comps, 2):
            support.add((i, j))
    missing = [e for e in c.edges if e not in support]
    wit = ""
    if missing:
        e = missing[0]
        wit = f"edge {c.components[e[0]]}-{c.components[e[1]]} has no nonzero intersection entry"
    checks.append(CheckResult("edge_support", not missing, wit))

    x = _symbolic_vector(c)

    # (f) chi functionals are invariant under the trivial twist by X
    bad = None
    xX = [x[i] + (1 if i < n else 0) for i in range(len(x))]
    owners = [(c.components[i], t) for i, t in enumerate(c.chi_components)]
    owners += [(f"{c.components[e[0]]}-{c.components[e[1]]}", c.chi_edges[e]) for e in c.edges]
    for name, terms in owners:
        diff = c.chi_eval(terms, xX) - c.chi_eval(terms, x)
        if not _is_zero(diff):
            bad = f"chi({name}, M+X) - chi({name}, M) = {diff}"
            break
    checks.append(CheckResult("chi_x_trivial", bad is None, bad or ""))

    # (d) Mayer-Vietoris: chi(Z, M) = chi(X, M) - chi(Y, M + Y)
    if n <= max_union_components:
        unions = c.proper_unions()
    else:
        unions = []
        for e in c.edges:
            unions.append(_edge_side(c, e))
    bad = None
    chi_X = c.chi_union_vec(c.all_components, x)
    for Y in unions:
        Z = c.complement(Y)
        xY = [x[i] + (1 if i in Y else 0) for i in range(len(x))]
        diff = c.chi_union_vec(Z, x) - chi_X + c.chi_union_vec(Y, xY)
        if not _is_zero(diff):
            bad = f"Y={c.format_union(Y)}: chi(Z,M) - chi(X,M) + chi(Y,M+Y) = {diff}"
            break
    checks.append(CheckResult("mayer_vietoris", bad is None, bad or ""))

    # (e) Riemann-Roch top terms, when a canonical class is designated
    if c.canonical is not None:
        bad = None
        K = [Fraction(0)] * len(x)
        K[c.symbol_index[c.canonical]] = Fraction(1)
        fact = math.factorial(d)
        for w in range(n):
            W = c.union_vector([w])
            expr = fact * c.chi_eval(c.chi_components[w], x) - c.form([x] * d + [W])
            expr = expr + Fraction(d, 2) * (c.form([x] * (d - 1) + [K, W]) + c.form([x] * (d - 1) + [W, W]))
            expr = Poly.coerce(expr)
            if expr.degree() > d - 2:
                bad = f"component {c.components[w]}: leftover {_homogeneous_part(expr, expr.degree())}"
                break
        if bad is None:
            for e in c.edges:
                expr = math.factorial(d - 1) * c.chi_eval(c.chi_edges[e], x) - c.form(
                    [x] * (d - 1) + [c.union_vector([e[0]]), c.union_vector([e[1]])]
                )
                expr = Poly.coerce(expr)
                if expr.degree() > d - 2:
                    bad = f"edge {c.components[e[0]]}-{c.components[e[1]]}: leftover {_homogeneous_part(expr, expr.degree())}"
                    break
        checks.append(CheckResult("riemann_roch_top", bad is None, bad or ""))

    return ValidationReport(tuple(checks))


def _edge_side(c: Configuration, e: tuple[int, int]) -> frozenset:
    """Component of e[0] after deleting edge e (tree dual graphs)."""
    seen = {e[0]}
    queue = deque([e[0]])
    while queue:
        v = queue.popleft()
        for w in c.neighbors[v]:
            if (min(v, w), max(v, w)) == e:
                continue
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return frozenset(seen)


# ---------------------------------------------------------------------------
# curves


def curve_builder(
    genera: Sequence[int],
    edges: Sequence[tuple[int, int, int]],
    degrees: dict[str, Sequence[int]] | None = None,
    canonical: str = "K",
) -> Configuration:
    """Nodal curve with components of the given genera and node counts per edge.

    ``degrees`` maps each bundle symbol to its multidegree.  The canonical
    class is added automatically with degree ``2g_i - 2 + (nodes on Y_i)``.
    """
    degrees = dict(degrees or {})
    n = len(genera)
    if n < 1:
        raise ConfigError("at least one component is required")
    if any(g < 0 for g in genera):
        raise ConfigError("genera must be nonnegative")
    if canonical in degrees:
        raise ConfigError(f"{canonical!r} is reserved for the canonical class")
    nodes: dict[tuple[int, int], int] = {}
    for i, j, k in edges:
        if k < 1:
            raise ConfigError(f"edge ({i}, {j}) needs a positive node count, got {k}")
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise ConfigError(f"bad edge ({i}, {j})")
        key = (min(i, j), max(i, j))
        nodes[key] = nodes.get(key, 0) + k
    for name, vec in degrees.items():
        if len(vec) != n:
            raise ConfigError(f"degree vector for {name!r} has length {len(vec)}, expected {n}")
    bundles = tuple(sorted(degrees)) + (canonical,)
    names = tuple(f"Y{i + 1}" for i in range(n))
    sym = {s: i for i, s in enumerate(names + bundles)}
    valence = [0] * n
    for (i, j), k in nodes.items():
        valence[i] += k
        valence[j] += k
    table: dict[tuple, Fraction] = {}
    for (i, j), k in nodes.items():
        table[(i, j)] = Fraction(k)
    for i in range(n):
        if valence[i]:
            table[(i, i)] = Fraction(-valence[i])
        for name, vec in degrees.items():
            if vec[i]:
                table[(i, sym[name])] = Fraction(vec[i])
        kdeg = 2 * genera[i] - 2 + valence[i]
        if kdeg:
            table[(i, sym[canonical])] = Fraction(kdeg)
    chis = []
    for i in range(n):
        terms: dict[tuple, Fraction] = {}
        if 1 - genera[i]:
            terms[()] = Fraction(1 - genera[i])
        for key, val in table.items():
            if i in key:
                other = key[1] if key[0] == i else key[0]
                if key == (i, i):
                    other = i
                terms[(other,)] = val
        chis.append(terms)
    chi_e = {e: {(): Fraction(k)} for e, k in nodes.items()}
    config = Configuration(
        dimension=1,
        components=names,
        edges=tuple(nodes),
        bundles=bundles,
        intersection=table,
        chi_components=tuple(chis),
        chi_edges=chi_e,
        canonical=canonical,
    )
    if not config.is_connected():
        raise ConfigError("the dual graph of the curve is disconnected")
    return config


def curve_genus(config: Configuration) -> int:
    """Arithmetic genus 1 - chi(O_X) of a curve configuration."""
    chi0 = config.chi_union_vec(config.all_components, [Fraction(0)] * len(config.symbols))
    return int(1 - chi0)


# ---------------------------------------------------------------------------
# formal higher-dimensional fixtures


def _rref_free_solution(rows: list[dict[int, Fraction]], ncols: int, rng: random.Random, span: int = 3) -> list[Fraction] | None:
    """Random element of the kernel of a sparse homogeneous linear system."""
    pivots: dict[int, dict[int, Fraction]] = {}
    for row in rows:
        r = {k: v for k, v in row.items() if v}
        # eliminate existing pivots
        changed = True
        while changed and r:
            changed = False
            for col in list(r):
                if col in pivots and col in r:
                    f = r[col]
                    for k, v in pivots[col].items():
                        nv = r.get(k, 0) - f * v
                        if nv:
                            r[k] = nv
                        else:
                            r.pop(k, None)
                    changed = True
        if not r:
            continue
        col = min(r)
        inv = 1 / r[col]
        r = {k: v * inv for k, v in r.items()}
        # back-substitute into existing pivot rows
        for pc, prow in pivots.items():
            if col in prow:
                f = prow[col]
                for k, v in r.items():
                    nv = prow.get(k, 0) - f * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
        pivots[col] = r
    free = [j for j in range(ncols) if j not in pivots]
    if not free:
        return None
    values = [Fraction(0)] * ncols
    for j in free:
        values[j] = Fraction(rng.randint(-span, span))
    for col, row in pivots.items():
        values[col] = -sum((v * values[k] for k, v in row.items() if k != col), Fraction(0))
    return values


def synth_generator(d: int, tree: Sequence[tuple[int, int]], seed: int, max_attempts: int = 25) -> Configuration:
    """Random formal fixture satisfying every validation identity.

    Entries of the intersection table and the chi polynomials are unknowns of
    a homogeneous linear system (fiber-class triviality, Mayer-Vietoris for
    every union, Riemann-Roch top terms); a seeded random kernel element is
    taken.  Bundles are ``L`` and the canonical ``K``.
    """
    rng = random.Random(seed)
    tree = [(min(i, j), max(i, j)) for i, j in tree]
    n = 1 + max((max(e) for e in tree), default=0)
    if len(tree) != n - 1 or len(set(tree)) != len(tree):
        raise ConfigError("synth_generator needs a tree on vertices 0..n-1")
    if d == 1:
        genera = [rng.randint(0, 3) for _ in range(n)]
        edges = [(i, j, rng.randint(1, 2)) for i, j in tree]
        degs = {"L": [rng.randint(-5, 5) for _ in range(n)]}
        cfg = curve_builder(genera, edges, degs)
        if not cfg.is_tree():
            raise ConfigError("synth_generator needs a tree on vertices 0..n-1")
        return cfg
    if d < 1:
        raise ConfigError("dimension must be positive")
    names = tuple(f"Y{i + 1}" for i in range(n))
    bundles = ("L", "K")
    nsym = n + len(bundles)
    adj = set(tree)

    def admissible(key):
        comps = sorted({s for s in key if s < n})
        if not comps:
            return False
        return all((i, j) in adj for i, j in combinations(comps, 2))

    tkeys = [k for k in combinations_with_replacement(range(nsym), d + 1) if admissible(k)]
    cmonos = [k for deg in range(d + 1) for k in combinations_with_replacement(range(nsym), deg)]
    emonos = [k for deg in range(d) for k in combinations_with_replacement(range(nsym), deg)]
    unknown: dict[tuple, int] = {}
    for k in tkeys:
        unknown[("T", k)] = len(unknown)
    for c in range(n):
        for k in cmonos:
            unknown[("C", c, k)] = len(unknown)
    for e in tree:
        for k in emonos:
            unknown[("E", e, k)] = len(unknown)

    x = [Poly.var(f"x{i}") for i in range(nsym)]
    rows: list[dict[int, Fraction]] = []

    def add_poly_rows(lin: dict[int, Poly], keep=None):
        bymono: dict[tuple, dict[int, Fraction]] = {}
        for u, p in lin.items():
            for mono, coef in Poly.coerce(p).terms.items():
                if keep is not None and not keep(mono):
                    continue
                row = bymono.setdefault(mono, {})
                row[u] = row.get(u, 0) + coef
        rows.extend(bymono.values())

    def mono_val(key, vec):
        prod = Poly.const(1)
        for s in key:
            prod = prod * vec[s]
        return prod

    def accumulate(lin, u, p):
        if not _is_zero(p):
            lin[u] = lin.get(u, Poly()) + p

    # fiber-class triviality in the table
    for S in combinations_with_replacement(range(nsym), d - 1):
        for comp in range(n):
            row = {}
            for i in range(n):
                k = tuple(sorted(S + (comp, i)))
                if ("T", k) in unknown:
                    row[unknown[("T", k)]] = row.get(unknown[("T", k)], 0) + 1
            if row:
                rows.append(row)

    def owner_terms(kind, owner, monos):
        return [(unknown[(kind, owner, k)], k) for k in monos]

    # chi invariance under +X
    xX = [x[i] + (1 if i < n else 0) for i in range(nsym)]
    for c in range(n):
        lin: dict[int, Poly] = {}
        for u, k in owner_terms("C", c, cmonos):
            accumulate(lin, u, mono_val(k, xX) - mono_val(k, x))
        add_poly_rows(lin)
    for e in tree:
        lin = {}
        for u, k in owner_terms("E", e, emonos):
            accumulate(lin, u, mono_val(k, xX) - mono_val(k, x))
        add_poly_rows(lin)

    # Mayer-Vietoris for every proper union
    allc = frozenset(range(n))
    for mask in range(1, 2**n - 1):
        Y = frozenset(i for i in range(n) if mask >> i & 1)
        Z = allc - Y
        xY = [x[i] + (1 if i in Y else 0) for i in range(nsym)]
        lin = {}
        for c in range(n):
            for u, k in owner_terms("C", c, cmonos):
                p = mono_val(k, x) * ((1 if c in Z else 0) - 1)
                if c in Y:
                    p = p + mono_val(k, xY)
                accumulate(lin, u, p)
        for e in tree:
            inY = e[0] in Y and e[1] in Y
            inZ = e[0] in Z and e[1] in Z
            for u, k in owner_terms("E", e, emonos):
                p = mono_val(k, x) * (1 - (1 if inZ else 0))
                if inY:
                    p = p - mono_val(k, xY)
                accumulate(lin, u, p)
        add_poly_rows(lin)

    # Riemann-Roch top terms on components and double loci
    Kvec = [Fraction(0)] * nsym
    Kvec[n + 1] = Fraction(1)

    def perm_sum(key, vecs):
        total = Poly()
        for perm in _distinct_perms(key):
            prod = Poly.const(1)
            for v, s in zip(vecs, perm):
                prod = prod * v[s]
                if prod.is_zero():
                    break
            total = total + prod
        return total

    fact = math.factorial(d)
    for w in range(n):
        W = [Fraction(1) if i == w else Fraction(0) for i in range(nsym)]
        lin = {}
        for u, k in owner_terms("C", w, cmonos):
            accumulate(lin, u, mono_val(k, x) * fact)
        for k in tkeys:
            p = -perm_sum(k, [x] * d + [W])
            p = p + Fraction(d, 2) * (perm_sum(k, [x] * (d - 1) + [Kvec, W]) + perm_sum(k, [x] * (d - 1) + [W, W]))
            accumulate(lin, unknown[("T", k)], p)
        add_poly_rows(lin, keep=lambda mono: sum(e for _, e in mono) > d - 2)
    for e in tree:
        Wi = [Fraction(1) if s == e[0] else Fraction(0) for s in range(nsym)]
        Wj = [Fraction(1) if s == e[1] else Fraction(0) for s in range(nsym)]
        lin = {}
        for u, k in owner_terms("E", e, emonos):
            accumulate(lin, u, mono_val(k, x) * math.factorial(d - 1))
        for k in tkeys:
            accumulate(lin, unknown[("T", k)], -perm_sum(k, [x] * (d - 1) + [Wi, Wj]))
        add_poly_rows(lin, keep=lambda mono: sum(e for _, e in mono) > d - 2)

    for attempt in range(max_attempts):
        sol = _rref_free_solution([dict(r) for r in rows], len(unknown), rng)
        if sol is None:
            raise ConfigError("constraint system has only the zero solution")
        table = {k: sol[unknown[("T", k)]] for k in tkeys if sol[unknown[("T", k)]]}
        chis = tuple({k: sol[unknown[("C", c, k)]] for k in cmonos if sol[unknown[("C", c, k)]]} for c in range(n))
        chi_e = {e: {k: sol[unknown[("E", e, k)]] for k in emonos if sol[unknown[("E", e, k)]]} for e in tree}
        cfg = Configuration(
            dimension=d,
            components=names,
            edges=tuple(tree),
            bundles=bundles,
            intersection=table,
            chi_components=chis,
            chi_edges=chi_e,
            canonical="K",
        )
        if cfg.report.ok:
            return cfg
    raise ConfigError(f"no admissible fixture found in {max_attempts} attempts; try a denser support or another seed")


# ---------------------------------------------------------------------------
# file format


_TOP_FIELDS = {"dimension", "components", "edges", "bundles", "canonical", "intersection", "chi"}


def emit_config(config: Configuration) -> str:
    syms = config.symbols

    def mono(key):
        return [syms[s] for s in key]

    def terms(t):
        return [{"monomial": mono(k), "value": format_rational(v)} for k, v in sorted(t.items(), key=lambda kv: (len(kv[0]), kv[0]))]

    doc: dict = {
        "dimension": config.dimension,
        "components": list(config.components),
        "edges": [{"i": config.components[i], "j": config.components[j]} for i, j in config.edges],
        "bundles": list(config.bundles),
    }
    if config.canonical is not None:
        doc["canonical"] = config.canonical
    doc["intersection"] = [
        {"monomial": mono(k), "value": format_rational(v)} for k, v in sorted(config.intersection.items())
    ]
    doc["chi"] = {
        "components": [{"component": config.components[i], "terms": terms(t)} for i, t in enumerate(config.chi_components)],
        "edges": [
            {"edge": [config.components[e[0]], config.components[e[1]]], "terms": terms(config.chi_edges[e])}
            for e in config.edges
        ],
    }
    return json.dumps(doc, indent=2) + "\n"


def _expect_keys(obj, allowed: set, required: set, where: str):
    if not isinstance(obj, dict):
        raise ConfigError(f"{where} must be an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ConfigError(f"unknown field(s) {sorted(unknown)} in {where}")
    missing = required - set(obj)
    if missing:
        raise ConfigError(f"missing field(s) {sorted(missing)} in {where}")


def parse_config(text: str) -> Configuration:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"not valid JSON: {exc}") from exc
    _expect_keys(doc, _TOP_FIELDS, {"dimension", "components", "edges", "bundles", "intersection", "chi"}, "configuration")
    comps = doc["components"]
    bundles = doc["bundles"]
    if not all(isinstance(s, str) for s in comps + bundles):
        raise ConfigError("component and bundle names must be strings")
    syms = {s: i for i, s in enumerate(list(comps) + list(bundles))}
    cidx = {s: i for i, s in enumerate(comps)}

    def comp_of(name, where):
        if name not in cidx:
            raise ConfigError(f"{where} references unknown component {name!r}")
        return cidx[name]

    def key_of(monomial, where):
        if not isinstance(monomial, list):
            raise ConfigError(f"{where}: monomial must be a list")
        try:
            return tuple(sorted(syms[s] for s in monomial))
        except KeyError as exc:
            raise ConfigError(f"{where}: unknown symbol {exc.args[0]!r}") from None

    def value_of(v, where):
        if not isinstance(v, (str, int)) or isinstance(v, bool):
            raise ConfigError(f"{where}: value must be a string 'p/q'")
        try:
            return parse_rational(str(v))
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(f"{where}: bad rational {v!r}") from exc

    edges = []
    for e in doc["edges"]:
        _expect_keys(e, {"i", "j"}, {"i", "j"}, "edge")
        edges.append((comp_of(e["i"], "edge"), comp_of(e["j"], "edge")))
    table = {}
    for ent in doc["intersection"]:
        _expect_keys(ent, {"monomial", "value"}, {"monomial", "value"}, "intersection entry")
        k = key_of(ent["monomial"], "intersection entry")
        if k in table:
            raise ConfigError(f"duplicate intersection entry {ent['monomial']}")
        table[k] = value_of(ent["value"], "intersection entry")
    chi = doc["chi"]
    _expect_keys(chi, {"components", "edges"}, {"components", "edges"}, "chi")

    def terms_of(ts, where):
        out = {}
        for t in ts:
            _expect_keys(t, {"monomial", "value"}, {"monomial", "value"}, where)
            k = key_of(t["monomial"], where)
            if k in out:
                raise ConfigError(f"{where}: duplicate term {t['monomial']}")
            out[k] = value_of(t["value"], where)
        return out

    chis: list[dict | None] = [None] * len(comps)
    for ent in chi["components"]:
        _expect_keys(ent, {"component", "terms"}, {"component", "terms"}, "chi component")
        i = comp_of(ent["component"], "chi component")
        if chis[i] is not None:
            raise ConfigError(f"duplicate chi data for {ent['component']}")
        chis[i] = terms_of(ent["terms"], f"chi of {ent['component']}")
    chis = [c if c is not None else {} for c in chis]
    chi_e = {}
    for ent in chi["edges"]:
        _expect_keys(ent, {"edge", "terms"}, {"edge", "terms"}, "chi edge")
        pair = ent["edge"]
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError("chi edge must name two components")
        e = tuple(sorted((comp_of(pair[0], "chi edge"), comp_of(pair[1], "chi edge"))))
        chi_e[e] = terms_of(ent["terms"], f"chi of edge {pair}")
    dim = doc["dimension"]
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise ConfigError("dimension must be an integer")
    return Configuration(
        dimension=dim,
        components=tuple(comps),
        edges=tuple(edges),
        bundles=tuple(bundles),
        intersection=table,
        chi_components=tuple(chis),
        chi_edges=chi_e,
        canonical=doc.get("canonical"),
    )


def load_config(path) -> Configuration:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


def dump_config(config: Configuration, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_config(config))
