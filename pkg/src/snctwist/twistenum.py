"""Twists of a line bundle by fiber components and the tree enumeration algorithm."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import PreconditionError
from .sncmodel import ClassExpr, Configuration
from .stability import MINUS, IntervalReport, is_semistable, kx_criterion, twistable_interval

__all__ = [
    "Twist",
    "TraceNode",
    "EnumerationTrace",
    "Enumeration",
    "apply_twist",
    "multidegree",
    "bfs_order",
    "enumerate_semistable_twists",
    "classify",
]


@dataclass(frozen=True, order=True)
class Twist:
    """Element of Z^n modulo the all-ones vector, stored with first entry 0."""

    coords: tuple[int, ...]

    def __post_init__(self):
        c = tuple(int(x) for x in self.coords)
        if c:
            c = tuple(x - c[0] for x in c)
        object.__setattr__(self, "coords", c)

    @classmethod
    def of(cls, vec: Iterable[int]) -> "Twist":
        return cls(tuple(vec))

    @classmethod
    def zero(cls, n: int) -> "Twist":
        return cls((0,) * n)

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)

    def __getitem__(self, i):
        return self.coords[i]

    def as_list(self) -> list[int]:
        return list(self.coords)


def apply_twist(config: Configuration, M: ClassExpr, t: Twist | Sequence[int]) -> ClassExpr:
    """M + sum_i t_i Y_i."""
    coords = tuple(t)
    if len(coords) != config.n:
        raise ValueError(f"twist has {len(coords)} entries, configuration has {config.n} components")
    return M + ClassExpr(coords)


def multidegree(config: Configuration, M: ClassExpr) -> list:
    """Degrees [M . Y_i] on each component of a curve configuration."""
    from .sncmodel import intersect

    if config.d != 1:
        raise ValueError("multidegrees are defined for curve configurations")
    return [intersect(config, [M, ClassExpr.components([i])]) for i in range(config.n)]


def bfs_order(config: Configuration, root: int = 0) -> tuple[list[int], dict[int, int]]:
    """Vertices in breadth-first order from ``root`` and the parent map."""
    order = [root]
    parent: dict[int, int] = {}
    queue = deque([root])
    seen = {root}
    while queue:
        v = queue.popleft()
        for w in sorted(config.neighbors[v]):
            if w not in seen:
                seen.add(w)
                parent[w] = v
                order.append(w)
                queue.append(w)
    return order, parent


def _subtrees(order: list[int], parent: dict[int, int]) -> dict[int, frozenset]:
    below: dict[int, set] = {v: {v} for v in order}
    for v in reversed(order):
        if v in parent:
            below[parent[v]] |= below[v]
    return {v: frozenset(s) for v, s in below.items()}


@dataclass
class TraceNode:
    """One branching step: the twistable interval at a vertex given earlier choices."""

    vertex: int
    parent: int
    union: frozenset
    assigned: dict[int, int]
    interval: IntervalReport
    children: dict[int, "TraceNode | None"] = field(default_factory=dict)

    def to_record(self, names: Sequence[str]) -> dict:
        return {
            "edge": [names[self.parent], names[self.vertex]],
            "union": [names[i] for i in sorted(self.union)],
            "assigned": {names[k]: v for k, v in sorted(self.assigned.items())},
            "interval": self.interval.to_record(names),
            "candidates": list(self.interval.candidates),
            "children": {str(b): (c.to_record(names) if c else None) for b, c in self.children.items()},
        }


@dataclass
class EnumerationTrace:
    root: int
    order: list[int]
    parent: dict[int, int]
    tree: TraceNode | None
    leaves: list[tuple[Twist, bool]]

    def intervals(self) -> list[IntervalReport]:
        out = []
        stack = [self.tree] if self.tree else []
        while stack:
            node = stack.pop()
            out.append(node.interval)
            stack.extend(c for c in node.children.values() if c)
        return out

    def to_record(self, names: Sequence[str]) -> dict:
        return {
            "root": names[self.root],
            "order": [names[v] for v in self.order],
            "steps": self.tree.to_record(names) if self.tree else None,
            "leaves": [{"twist": t.as_list(), "semistable": ok} for t, ok in self.leaves],
        }


@dataclass
class Enumeration:
    twists: list[Twist]
    trace: EnumerationTrace

    def __iter__(self):
        return iter(self.twists)

    def __len__(self):
        return len(self.twists)

    def as_set(self) -> set[Twist]:
        return set(self.twists)


def _is_canonical(config: Configuration, H: ClassExpr) -> bool:
    return config.canonical is not None and H == ClassExpr.bundle(config.canonical)


def enumerate_semistable_twists(
    config: Configuration, L: ClassExpr, H: ClassExpr, mode: str = MINUS, root: int = 0
) -> Enumeration:
    """All twists of L that are H-semistable in the given mode.

    Requires a tree dual graph and a unit twistable interval at every step;
    otherwise a :class:`PreconditionError` names the offending edge.
    """
    config.require_valid()
    if not config.is_tree():
        raise PreconditionError("dual graph is not a tree")
    n = config.n
    names = config.components
    order, parent = bfs_order(config, root)
    if n == 1:
        t = Twist.zero(1)
        return Enumeration([t], EnumerationTrace(root, order, parent, None, [(t, True)]))
    below = _subtrees(order, parent)
    if _is_canonical(config, H):
        for v in order[1:]:
            kx = kx_criterion(config, below[v])
            wanted = "MinusTwistable" if mode == MINUS else "PlusTwistable"
            if kx.classification != wanted:
                raise PreconditionError(
                    f"edge {names[parent[v]]}-{names[v]}: canonical criterion is {kx.classification}"
                    f" (value {kx.value}), so the pair is not {mode}-twistable"
                )

    leaves: list[tuple[Twist, bool]] = []
    found: list[Twist] = []

    def step(k: int, assigned: dict[int, int]) -> TraceNode | None:
        if k == len(order):
            t = Twist(tuple(assigned.get(i, 0) for i in range(n)))
            ok = is_semistable(config, apply_twist(config, L, t), H, mode, "connected_pairs")
            leaves.append((t, ok))
            if ok:
                found.append(t)
            return None
        v = order[k]
        base = apply_twist(config, L, [assigned.get(i, 0) for i in range(n)])
        rep = twistable_interval(config, below[v], base, H, mode)
        if not rep.is_unit:
            raise PreconditionError(
                f"edge {names[parent[v]]}-{names[v]}: twistable interval is degenerate ({rep.reason})"
            )
        node = TraceNode(v, parent[v], below[v], dict(assigned), rep)
        for b in rep.candidates:
            node.children[b] = step(k + 1, {**assigned, v: b})
        return node

    tree = step(1, {root: 0})
    twists = sorted(set(found))
    return Enumeration(twists, EnumerationTrace(root, order, parent, tree, leaves))


def classify(config: Configuration, L: ClassExpr, H: ClassExpr, mode: str, t: Twist | Sequence[int]) -> str:
    """Stable, StrictlySemistable or Unstable for the twist t of L."""
    t = t if isinstance(t, Twist) else Twist(tuple(t))
    if not is_semistable(config, apply_twist(config, L, t), H, mode):
        return "Unstable"
    result = enumerate_semistable_twists(config, L, H, mode)
    if result.twists == [t]:
        return "Stable"
    return "StrictlySemistable"
