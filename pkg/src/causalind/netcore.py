"""Discrete belief networks and the graph queries run on them.

Tables are stored flat, one row per parent configuration.  Rows are laid
out row-major over the declared parent order with the rightmost parent
varying fastest, and each row holds one probability per child state.
"""

from __future__ import annotations

import heapq
import itertools
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidNetworkError, UnknownStateError, UnknownVariableError

BOOL_STATES = ("false", "true")
ROW_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Variable:
    name: str
    states: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "states", tuple(str(s) for s in self.states))

    @property
    def card(self) -> int:
        return len(self.states)

    def index(self, state: str) -> int:
        try:
            return self.states.index(str(state))
        except ValueError:
            raise UnknownStateError(
                f"{state!r} is not a state of {self.name} (states: {', '.join(self.states)})"
            ) from None


def boolean(name: str) -> Variable:
    return Variable(name, BOOL_STATES)


def integer_range(name: str, low: int, high: int) -> Variable:
    """Variable whose states are the integers ``low..high`` as labels."""
    return Variable(name, tuple(str(k) for k in range(low, high + 1)))


@dataclass(frozen=True, eq=False)
class ConditionalTable:
    child: str
    parents: tuple[str, ...]
    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        arr = np.array(self.table, dtype=np.float64).ravel()
        arr.setflags(write=False)
        object.__setattr__(self, "table", arr)

    def __eq__(self, other):
        if not isinstance(other, ConditionalTable):
            return NotImplemented
        return (
            self.child == other.child
            and self.parents == other.parents
            and self.table.shape == other.table.shape
            and bool(np.array_equal(self.table, other.table))
        )

    __hash__ = None

    def rows(self, child_card: int) -> np.ndarray:
        return self.table.reshape(-1, child_card)

    def is_deterministic(self, child_card: int) -> bool:
        rows = self.rows(child_card)
        return bool(np.all((rows == 1.0).sum(axis=1) == 1) and np.all((rows == 0.0) | (rows == 1.0)))


@dataclass(frozen=True, eq=False)
class BeliefNetwork:
    """A DAG of discrete variables with one conditional table per variable.

    ``annotations`` carries builder metadata such as which variable is the
    effect; it never influences inference.
    """

    variables: tuple[Variable, ...]
    tables: tuple[ConditionalTable, ...]
    annotations: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "tables", tuple(self.tables))
        object.__setattr__(self, "annotations", dict(self.annotations))

    def __eq__(self, other):
        if not isinstance(other, BeliefNetwork):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.tables == other.tables
            and self.annotations == other.annotations
        )

    __hash__ = None

    @cached_property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @cached_property
    def _vars(self) -> dict[str, Variable]:
        return {v.name: v for v in self.variables}

    @cached_property
    def _tables(self) -> dict[str, ConditionalTable]:
        return {t.child: t for t in self.tables}

    @cached_property
    def rank(self) -> dict[str, int]:
        """Declaration index of each variable, used for deterministic tie-breaks."""
        return {name: i for i, name in enumerate(self.names)}

    def var(self, name: str) -> Variable:
        try:
            return self._vars[name]
        except KeyError:
            raise UnknownVariableError(f"unknown variable {name!r}") from None

    def table(self, name: str) -> ConditionalTable:
        self.var(name)
        return self._tables[name]

    def parents(self, name: str) -> tuple[str, ...]:
        return self.table(name).parents

    @cached_property
    def _children(self) -> dict[str, tuple[str, ...]]:
        kids: dict[str, list[str]] = {n: [] for n in self.names}
        for t in self.tables:
            for p in t.parents:
                if p in kids:
                    kids[p].append(t.child)
        return {n: tuple(sorted(set(c), key=self.rank.__getitem__)) for n, c in kids.items()}

    def children(self, name: str) -> tuple[str, ...]:
        self.var(name)
        return self._children[name]

    def cpt_array(self, name: str) -> np.ndarray:
        """Conditional table shaped ``(parent cards..., child card)``."""
        t = self.table(name)
        shape = tuple(self.var(p).card for p in t.parents) + (self.var(name).card,)
        return t.table.reshape(shape)

    def check(self, names: Iterable[str]) -> None:
        for n in names:
            self.var(n)

    @cached_property
    def report(self) -> "ValidationReport":
        return validate(self)

    def require_valid(self) -> None:
        if not self.report.ok:
            raise InvalidNetworkError(self.report.violations)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def validate(net: BeliefNetwork) -> ValidationReport:
    """Collect every structural and numeric violation; never raises."""
    out: list[str] = []
    seen: dict[str, Variable] = {}
    for v in net.variables:
        if v.name in seen:
            out.append(f"duplicate variable {v.name}")
        seen[v.name] = v
        if len(v.states) < 2:
            out.append(f"variable {v.name} has fewer than 2 states")
        if len(set(v.states)) != len(v.states):
            out.append(f"variable {v.name} has duplicate state labels")

    by_child: dict[str, list[ConditionalTable]] = {}
    for t in net.tables:
        by_child.setdefault(t.child, []).append(t)
    for name in seen:
        count = len(by_child.get(name, []))
        if count == 0:
            out.append(f"no table for {name}")
        elif count > 1:
            out.append(f"{count} tables for {name}")
    for child in by_child:
        if child not in seen:
            out.append(f"table for unknown variable {child}")

    graph_ok = True
    for t in net.tables:
        if t.child not in seen:
            continue
        if len(set(t.parents)) != len(t.parents):
            out.append(f"duplicate parent in table of {t.child}")
        dangling = [p for p in t.parents if p not in seen]
        for p in dangling:
            out.append(f"dangling parent {p} of {t.child}")
        if dangling:
            graph_ok = False
            continue
        card = seen[t.child].card
        expected = card * int(np.prod([seen[p].card for p in t.parents], dtype=np.int64))
        if t.table.size != expected:
            out.append(f"table of {t.child} has {t.table.size} entries, expected {expected}")
            continue
        bad = np.flatnonzero((t.table < 0.0) | (t.table > 1.0) | ~np.isfinite(t.table))
        for k in bad[:5]:
            out.append(f"entry {k} of {t.child} is {_fmt(t.table[k])}, outside [0, 1]")
        if card:
            sums = t.table.reshape(-1, card).sum(axis=1)
            for r in np.flatnonzero(np.abs(sums - 1.0) > ROW_TOLERANCE)[:5]:
                out.append(f"row {r} of {t.child} sums to {_fmt(sums[r])}")

    if graph_ok:
        cycle = _find_cycle(net)
        if cycle:
            out.append("cycle " + ",".join(cycle))
    return ValidationReport(tuple(out))


def _find_cycle(net: BeliefNetwork) -> list[str] | None:
    rank = {n: i for i, n in enumerate(net.names)}
    kids: dict[str, list[str]] = {n: [] for n in rank}
    for t in net.tables:
        if t.child in kids:
            for p in t.parents:
                kids[p].append(t.child)
    for n in kids:
        kids[n].sort(key=rank.__getitem__)

    color = dict.fromkeys(rank, 0)
    for root in rank:
        if color[root]:
            continue
        stack = [(root, iter(kids[root]))]
        path = [root]
        color[root] = 1
        while stack:
            node, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                color[node] = 2
                stack.pop()
                path.pop()
            elif color[nxt] == 1:
                cyc = path[path.index(nxt):]
                start = min(range(len(cyc)), key=lambda i: rank[cyc[i]])
                return cyc[start:] + cyc[:start]
            elif color[nxt] == 0:
                color[nxt] = 1
                stack.append((nxt, iter(kids[nxt])))
                path.append(nxt)
    return None


def topological_order(net: BeliefNetwork) -> list[str]:
    """Parents before children; among ready variables the earliest declared wins."""
    net.require_valid()
    rank = net.rank
    indeg = {n: len(net.parents(n)) for n in net.names}
    heap = [(rank[n], n) for n in net.names if indeg[n] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        _, n = heapq.heappop(heap)
        order.append(n)
        for c in net.children(n):
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, (rank[c], c))
    return order


def ancestors(net: BeliefNetwork, names: Iterable[str]) -> set[str]:
    """The given variables together with all of their ancestors."""
    seen = set()
    todo = list(names)
    while todo:
        n = todo.pop()
        if n in seen:
            continue
        seen.add(n)
        todo.extend(net.parents(n))
    return seen


def _check_sets(net, x, y, z):
    x, y, z = set(x), set(y), set(z)
    net.check(x | y | z)
    if x & y or x & z or y & z:
        raise ValueError("x, y and z must be disjoint")
    return x, y, z


def d_separated(net: BeliefNetwork, x: Iterable[str], y: Iterable[str], z: Iterable[str] = ()) -> bool:
    """Reachability form of the d-separation test, linear in the network size."""
    x, y, z = _check_sets(net, x, y, z)
    anc_z = ancestors(net, z)
    # (node, arrived_from_child) states; True means travelling up against edges
    todo = deque((n, True) for n in x)
    visited = set()
    while todo:
        node, up = todo.popleft()
        if (node, up) in visited:
            continue
        visited.add((node, up))
        if node in y:
            return False
        if up:
            if node not in z:
                todo.extend((p, True) for p in net.parents(node))
                todo.extend((c, False) for c in net.children(node))
        else:
            if node not in z:
                todo.extend((c, False) for c in net.children(node))
            if node in anc_z:
                todo.extend((p, True) for p in net.parents(node))
    return True


def active_path(
    net: BeliefNetwork, x: Iterable[str], y: Iterable[str], z: Iterable[str] = ()
) -> list[tuple[str, str]] | None:
    """One simple d-connecting path from ``x`` to ``y`` given ``z``, or None.

    The path is returned as ``[(node, arrow), ...]`` where ``arrow`` is the
    edge taken to reach ``node`` ("->" along the edge, "<-" against it, ""
    for the start).  Depth-first over simple paths, so only meant for the
    small networks one inspects by hand.
    """
    x, y, z = _check_sets(net, x, y, z)
    anc_z = ancestors(net, z)
    rank = net.rank

    def steps(node):
        out = [(p, "<-") for p in net.parents(node)] + [(c, "->") for c in net.children(node)]
        return sorted(out, key=lambda s: rank[s[0]])

    for start in sorted(x, key=rank.__getitem__):
        path = [(start, "")]
        on_path = {start}
        stack = [iter(steps(start))]
        while stack:
            nxt = next(stack[-1], None)
            if nxt is None:
                stack.pop()
                on_path.discard(path.pop()[0])
                continue
            node, arrow = nxt
            if node in on_path or node in x:
                continue
            if len(path) >= 2:
                mid, into_mid = path[-1]
                collider = into_mid == "->" and arrow == "<-"
                if collider and mid not in anc_z:
                    continue
                if not collider and mid in z:
                    continue
            path.append(nxt)
            on_path.add(node)
            if node in y:
                return list(path)
            stack.append(iter(steps(node)))
    return None


def format_path(path: Sequence[tuple[str, str]]) -> str:
    return " ".join(f"{arrow} {node}" if arrow else node for node, arrow in path)


def moral_graph(net: BeliefNetwork) -> dict[str, frozenset[str]]:
    """Undirected adjacency: every edge plus an edge between each pair of co-parents."""
    net.require_valid()
    adj: dict[str, set[str]] = {n: set() for n in net.names}
    for t in net.tables:
        for p in t.parents:
            adj[p].add(t.child)
            adj[t.child].add(p)
        for a, b in itertools.combinations(t.parents, 2):
            adj[a].add(b)
            adj[b].add(a)
    return {n: frozenset(s) for n, s in adj.items()}


def skeleton(net: BeliefNetwork) -> dict[str, frozenset[str]]:
    adj: dict[str, set[str]] = {n: set() for n in net.names}
    for t in net.tables:
        for p in t.parents:
            adj[p].add(t.child)
            adj[t.child].add(p)
    return {n: frozenset(s) for n, s in adj.items()}


def chordless_cycle(adj: Mapping[str, frozenset[str]], rank: Mapping[str, int]) -> list[str] | None:
    """Shortest-found chordless cycle of length >= 4, or None if the graph is chordal.

    For a vertex v with non-adjacent neighbours a and b, a shortest a-b path
    avoiding every other vertex of N[v] closes a chordless cycle through v.
    """
    best: list[str] | None = None
    order = sorted(adj, key=rank.__getitem__)
    for v in order:
        nbrs = sorted(adj[v], key=rank.__getitem__)
        for a, b in itertools.combinations(nbrs, 2):
            if b in adj[a]:
                continue
            blocked = (adj[v] | {v}) - {a, b}
            path = _shortest_path(adj, a, b, blocked, rank)
            if path is None:
                continue
            cycle = [v] + path
            if best is None or len(cycle) < len(best):
                best = cycle
                if len(best) == 4:
                    return best
    return best


def _shortest_path(adj, src, dst, blocked, rank):
    prev = {src: None}
    todo = deque([src])
    while todo:
        node = todo.popleft()
        if node == dst:
            path = []
            while node is not None:
                path.append(node)
                node = prev[node]
            return path[::-1]
        for nb in sorted(adj[node], key=rank.__getitem__):
            if nb not in prev and nb not in blocked:
                prev[nb] = node
                todo.append(nb)
    return None


@dataclass(frozen=True)
class ProblemCycles:
    """Outcome of the residual-intractability check.

    ``moral_cycle`` is a chordless cycle (length >= 4) of the moral graph.
    ``cycle`` lifts it back to the network: every edge that exists only
    because two parents were married is routed through their shared child,
    which yields an undirected cycle of the network itself.
    """

    found: bool
    cycle: tuple[str, ...] = ()
    moral_cycle: tuple[str, ...] = ()

    def __bool__(self):
        return self.found


def has_problem_cycles(net: BeliefNetwork) -> ProblemCycles:
    moral = moral_graph(net)
    cyc = chordless_cycle(moral, net.rank)
    if cyc is None:
        return ProblemCycles(False)
    skel = skeleton(net)
    lifted: list[str] = []
    for u, w in zip(cyc, cyc[1:] + cyc[:1]):
        lifted.append(u)
        if w not in skel[u]:
            shared = set(net.children(u)) & set(net.children(w))
            lifted.append(min(shared, key=net.rank.__getitem__))
    return ProblemCycles(True, tuple(lifted), tuple(cyc))


def is_cycle_of(adj: Mapping[str, frozenset[str]], cycle: Sequence[str]) -> bool:
    """True iff consecutive vertices (cyclically) are adjacent and all distinct."""
    if len(set(cycle)) != len(cycle) or len(cycle) < 3:
        return False
    return all(b in adj[a] for a, b in zip(cycle, list(cycle[1:]) + [cycle[0]]))
