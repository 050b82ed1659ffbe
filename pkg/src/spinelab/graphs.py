"""Thorned graphs: invariants, predicates, forest collapse and canonical forms.

A thorned graph is a connected multigraph with an optional basepoint and a
list of labeled marks. Mark ``i`` (0-based) is the attachment vertex of the
thorn with label ``v_{i+1}``. Thorns themselves are never stored as
edges; every formula that needs them adds the mark multiplicities back in.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

Edge = tuple[int, int]


class GraphError(ValueError):
    """Base class for graph errors."""


class StructuralError(GraphError):
    """The graph is not connected or has invalid indices."""


class UnsupportedParameterError(GraphError):
    """The operation is undefined for the given parameters (e.g. degree at s=0)."""


class InvariantViolation(GraphError):
    """An argument breaks a documented invariant (e.g. a forest with a cycle)."""


class NotApplicableError(GraphError):
    """A precondition of a check does not hold; the check has no verdict."""


@dataclass(frozen=True)
class ThornedGraph:
    vertex_count: int
    edges: tuple[Edge, ...]
    basepoint: int | None = None
    marks: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        edges = tuple((min(u, v), max(u, v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "marks", tuple(self.marks))
        V = self.vertex_count
        if V < 1:
            raise StructuralError("a thorned graph needs at least one vertex")
        for u, v in edges:
            if not (0 <= u < V and 0 <= v < V):
                raise StructuralError(f"edge {(u, v)} has an invalid endpoint")
        if self.basepoint is None:
            if self.marks:
                raise StructuralError("marks require a basepoint")
        elif not 0 <= self.basepoint < V:
            raise StructuralError(f"invalid basepoint {self.basepoint}")
        for m in self.marks:
            if not 0 <= m < V:
                raise StructuralError(f"invalid mark vertex {m}")

    @property
    def s(self) -> int:
        """Number of distinguished points (basepoint plus marks)."""
        return 0 if self.basepoint is None else len(self.marks) + 1

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @cached_property
    def valences(self) -> tuple[int, ...]:
        val = [0] * self.vertex_count
        for u, v in self.edges:
            val[u] += 1
            val[v] += 1
        return tuple(val)

    @cached_property
    def mark_counts(self) -> tuple[int, ...]:
        counts = [0] * self.vertex_count
        for m in self.marks:
            counts[m] += 1
        return tuple(counts)

    def total_valence(self, v: int) -> int:
        """Valence counting the implied thorns at ``v``."""
        return self.valences[v] + self.mark_counts[v]

    @cached_property
    def is_connected(self) -> bool:
        return len(_component(self.vertex_count, self.edges, 0)) == self.vertex_count

    def to_json(self) -> dict:
        return {
            "n": rank(self),
            "s": self.s,
            "vertices": self.vertex_count,
            "edges": [list(e) for e in self.edges],
            "basepoint": self.basepoint,
            "marks": list(self.marks),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "ThornedGraph":
        g = cls(
            obj["vertices"],
            tuple(tuple(e) for e in obj["edges"]),
            obj.get("basepoint"),
            tuple(obj.get("marks", ())),
        )
        if "n" in obj and rank(g) != obj["n"]:
            raise StructuralError(f"declared rank {obj['n']} but graph has rank {rank(g)}")
        if "s" in obj and g.s != obj["s"]:
            raise StructuralError(f"declared s={obj['s']} but graph has s={g.s}")
        return g


def _component(V: int, edges: Iterable[Edge], start: int) -> set[int]:
    adj: list[list[int]] = [[] for _ in range(V)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return seen


# -- standard graphs ---------------------------------------------------------

def rose(n: int, s: int = 1) -> ThornedGraph:
    """The standard thorned rose R_{n,s}; ``s=0`` gives the unpointed rose."""
    if s == 0:
        return ThornedGraph(1, ((0, 0),) * n)
    return ThornedGraph(1, ((0, 0),) * n, 0, (0,) * (s - 1))


def theta(s: int = 0) -> ThornedGraph:
    """Two vertices joined by three edges; basepoint (if any) at vertex 0."""
    if s == 0:
        return ThornedGraph(2, ((0, 1),) * 3)
    return ThornedGraph(2, ((0, 1),) * 3, 0, (0,) * (s - 1))


def dumbbell(s: int = 0) -> ThornedGraph:
    """Two loops joined by a bridge."""
    edges = ((0, 0), (0, 1), (1, 1))
    if s == 0:
        return ThornedGraph(2, edges)
    return ThornedGraph(2, edges, 0, (0,) * (s - 1))


# -- invariants ---------------------------------------------------------------

def rank(g: ThornedGraph) -> int:
    if not g.is_connected:
        raise StructuralError("rank is only defined for connected graphs")
    return g.edge_count - g.vertex_count + 1


def euler_characteristic(g: ThornedGraph) -> int:
    return g.vertex_count - g.edge_count


def basepoint_valence(g: ThornedGraph) -> int:
    """|v_0|: stored-edge valence of the basepoint plus thorns attached there."""
    if g.basepoint is None:
        raise UnsupportedParameterError("graph has no basepoint (s = 0)")
    return g.total_valence(g.basepoint)


def degree(g: ThornedGraph) -> int:
    """2n + s - 1 - |v_0|."""
    if g.basepoint is None:
        raise UnsupportedParameterError("degree is undefined for s = 0")
    return 2 * rank(g) + g.s - 1 - basepoint_valence(g)


def basepoint_loop_count(g: ThornedGraph) -> int:
    if g.basepoint is None:
        raise UnsupportedParameterError("no basepoint (s = 0)")
    b = g.basepoint
    return sum(1 for u, v in g.edges if u == v == b)


def bridges(g: ThornedGraph) -> list[int]:
    """Indices of stored edges whose removal disconnects the graph."""
    out = []
    for i, (u, v) in enumerate(g.edges):
        if u == v:
            continue
        rest = g.edges[:i] + g.edges[i + 1:]
        if v not in _component(g.vertex_count, rest, u):
            out.append(i)
    return out


def valence_ok(g: ThornedGraph) -> bool:
    """Every vertex that is neither basepoint nor marked has valence >= 3."""
    for v in range(g.vertex_count):
        if v == g.basepoint or g.mark_counts[v]:
            continue
        if g.valences[v] < 3:
            return False
    return True


def is_reduced(g: ThornedGraph) -> bool:
    return g.is_connected and valence_ok(g) and not bridges(g)


# -- forests and collapse -----------------------------------------------------

def is_forest(g: ThornedGraph, forest: Iterable[int]) -> bool:
    parent = list(range(g.vertex_count))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in forest:
        if not 0 <= e < g.edge_count:
            return False
        u, v = g.edges[e]
        if u == v:
            return False
        ru, rv = find(u), find(v)
        if ru == rv:
            return False
        parent[ru] = rv
    return True


def collapse_with_map(g: ThornedGraph, forest: Iterable[int]) -> tuple[ThornedGraph, dict[int, int], list[int]]:
    """Collapse ``forest`` and return (quotient, surviving-edge map, vertex map).

    Quotient vertices are numbered by first appearance in the old vertex
    order; surviving edges keep their relative order.
    """
    forest = frozenset(forest)
    if not is_forest(g, forest):
        raise InvariantViolation(f"{sorted(forest)} is not a forest of non-loop edges")
    parent = list(range(g.vertex_count))

    def find(x: int) -> int:
        while parent[x] != x:
            x = parent[x]
        return x

    for e in forest:
        u, v = g.edges[e]
        ru, rv = find(u), find(v)
        parent[max(ru, rv)] = min(ru, rv)
    roots: dict[int, int] = {}
    vmap = []
    for v in range(g.vertex_count):
        r = find(v)
        if r not in roots:
            roots[r] = len(roots)
        vmap.append(roots[r])
    new_edges = []
    emap = {}
    for i, (u, v) in enumerate(g.edges):
        if i in forest:
            continue
        emap[i] = len(new_edges)
        new_edges.append((vmap[u], vmap[v]))
    bp = None if g.basepoint is None else vmap[g.basepoint]
    h = ThornedGraph(len(roots), tuple(new_edges), bp, tuple(vmap[m] for m in g.marks))
    return h, emap, vmap


def collapse(g: ThornedGraph, forest: Iterable[int]) -> ThornedGraph:
    return collapse_with_map(g, forest)[0]


def proof_identity_check(g: ThornedGraph) -> bool:
    """Check n = 2k - E(Gamma_1) on a normalized graph.

    Normalized means: a basepoint, no loops at it, and every other vertex of
    total valence exactly 3. E(Gamma_1) counts stored edges avoiding the
    basepoint plus the thorns attached away from it.
    """
    if g.basepoint is None:
        raise NotApplicableError("needs a basepoint")
    if basepoint_loop_count(g):
        raise NotApplicableError("graph has a loop at the basepoint")
    b = g.basepoint
    for v in range(g.vertex_count):
        if v != b and g.total_valence(v) != 3:
            raise NotApplicableError(f"vertex {v} is not trivalent")
    e1 = sum(1 for u, v in g.edges if b not in (u, v))
    e1 += sum(1 for m in g.marks if m != b)
    return rank(g) == 2 * degree(g) - e1


# -- canonical form -----------------------------------------------------------

def _vertex_colors(g: ThornedGraph) -> list[tuple]:
    labels: list[list[int]] = [[] for _ in range(g.vertex_count)]
    for i, m in enumerate(g.marks):
        labels[m].append(i)
    return [(v == g.basepoint, tuple(labels[v])) for v in range(g.vertex_count)]


def _multiplicities(g: ThornedGraph) -> list[list[int]]:
    V = g.vertex_count
    mult = [[0] * V for _ in range(V)]
    for u, v in g.edges:
        mult[u][v] += 1
        if u != v:
            mult[v][u] += 1
    return mult


def _refine(cells: list[list[int]], mult: list[list[int]]) -> list[list[int]]:
    """Equitable refinement of an ordered partition; isomorphism-invariant."""
    V = len(mult)
    while True:
        cell_of = [0] * V
        for ci, cell in enumerate(cells):
            for v in cell:
                cell_of[v] = ci
        new_cells: list[list[int]] = []
        for ci, cell in enumerate(cells):
            if len(cell) == 1:
                new_cells.append(cell)
                continue
            sig = {}
            for v in cell:
                pattern = sorted((cell_of[w], mult[v][w]) for w in range(V) if mult[v][w] and w != v)
                sig[v] = (mult[v][v], tuple(pattern))
            groups: dict[tuple, list[int]] = {}
            for v in cell:
                groups.setdefault(sig[v], []).append(v)
            for key in sorted(groups):
                new_cells.append(groups[key])
        if len(new_cells) == len(cells):
            return new_cells
        cells = new_cells


def _encode(g: ThornedGraph, order: Sequence[int], mult: list[list[int]]) -> bytes:
    """Bytes of the graph relabeled so that ``order[i]`` becomes vertex i."""
    pos = [0] * len(order)
    for i, v in enumerate(order):
        pos[v] = i
    V = g.vertex_count
    head = [rank(g), g.s, V, 255 if g.basepoint is None else pos[g.basepoint]]
    head += [pos[m] for m in g.marks]
    body = [mult[order[i]][order[j]] for i in range(V) for j in range(i, V)]
    return bytes(head + body)


def decode(data: bytes) -> ThornedGraph:
    """Inverse of the canonical encoding."""
    n, s, V, bp = data[0], data[1], data[2], data[3]
    k = max(s - 1, 0)
    marks = tuple(data[4:4 + k])
    body = data[4 + k:]
    edges = []
    it = iter(body)
    for i in range(V):
        for j in range(i, V):
            edges.extend([(i, j)] * next(it))
    g = ThornedGraph(V, tuple(edges), None if bp == 255 else bp, marks)
    if rank(g) != n:
        raise StructuralError("corrupt canonical bytes")
    return g


@dataclass(frozen=True)
class CanonicalGraph:
    """Canonical representative of a label-preserving isomorphism class.

    ``graph`` is the decoded canonical graph (its edges are sorted), and
    ``vertex_automorphisms`` is the full group of color-preserving vertex
    permutations of that graph.
    """
    canonical_bytes: bytes
    vertex_automorphisms: tuple[tuple[int, ...], ...] = field(compare=False)

    @cached_property
    def graph(self) -> ThornedGraph:
        return decode(self.canonical_bytes)

    @property
    def hex(self) -> str:
        return self.canonical_bytes.hex()

    @cached_property
    def _parallel_classes(self) -> dict[Edge, list[int]]:
        classes: dict[Edge, list[int]] = {}
        for i, e in enumerate(self.graph.edges):
            classes.setdefault(e, []).append(i)
        return classes

    def automorphism_order(self) -> int:
        """Order of the automorphism group acting on half-edges."""
        order = len(self.vertex_automorphisms)
        for (u, v), idx in self._parallel_classes.items():
            m = len(idx)
            order *= math.factorial(m) * (2 ** m if u == v else 1)
        return order

    def automorphism_generators(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """Generators as (vertex permutation, half-edge permutation) pairs.

        Half-edge ``2e`` sits at the first endpoint of edge ``e``, ``2e+1`` at
        the second.
        """
        g = self.graph
        ident_v = tuple(range(g.vertex_count))
        gens = []
        for sigma in self.vertex_automorphisms:
            if sigma != ident_v:
                gens.append((sigma, self._dart_lift(sigma)))
        D = 2 * g.edge_count
        for (u, v), idx in self._parallel_classes.items():
            for a, b in zip(idx, idx[1:]):
                perm = list(range(D))
                perm[2 * a], perm[2 * b] = 2 * b, 2 * a
                perm[2 * a + 1], perm[2 * b + 1] = 2 * b + 1, 2 * a + 1
                gens.append((ident_v, tuple(perm)))
            if u == v:
                e = idx[0]
                perm = list(range(D))
                perm[2 * e], perm[2 * e + 1] = 2 * e + 1, 2 * e
                gens.append((ident_v, tuple(perm)))
        return gens

    def _dart_lift(self, sigma: Sequence[int]) -> tuple[int, ...]:
        g = self.graph
        perm = [0] * (2 * g.edge_count)
        for (u, v), idx in self._parallel_classes.items():
            a, b = sigma[u], sigma[v]
            target = self._parallel_classes[(min(a, b), max(a, b))]
            for e, f in zip(idx, target):
                if (a, b) == g.edges[f]:
                    perm[2 * e], perm[2 * e + 1] = 2 * f, 2 * f + 1
                else:
                    perm[2 * e], perm[2 * e + 1] = 2 * f + 1, 2 * f
        return tuple(perm)

    def edge_permutations(self, non_loop_only: bool = True) -> list[tuple[int, ...]]:
        """All distinct permutations of edge indices induced by automorphisms.

        With ``non_loop_only`` (default) loops are held fixed, which is all
        that matters for the action on forests.
        """
        g = self.graph
        classes = [(e, idx) for e, idx in self._parallel_classes.items()
                   if not (non_loop_only and e[0] == e[1])]
        within = [list(itertools.permutations(idx)) for _, idx in classes]
        out = set()
        for sigma in self.vertex_automorphisms:
            base = list(range(g.edge_count))
            lifted = []
            for (u, v), idx in classes:
                a, b = sigma[u], sigma[v]
                lifted.append(self._parallel_classes[(min(a, b), max(a, b))])
            for choice in itertools.product(*within):
                perm = base[:]
                for tgt, src in zip(lifted, choice):
                    for e, f in zip(src, tgt):
                        perm[e] = f
                out.add(tuple(perm))
        return sorted(out)


def canonical_labeling(g: ThornedGraph) -> tuple[bytes, list[int], list[list[int]]]:
    """Return (canonical bytes, canonical order, all orders achieving it).

    ``order[i]`` is the vertex of ``g`` that becomes canonical vertex ``i``.
    """
    mult = _multiplicities(g)
    colors = _vertex_colors(g)
    groups: dict[tuple, list[int]] = {}
    for v in range(g.vertex_count):
        groups.setdefault(colors[v], []).append(v)
    start = [groups[c] for c in sorted(groups)]
    best: list = [None, []]

    def search(cells: list[list[int]]) -> None:
        cells = _refine(cells, mult)
        for i, cell in enumerate(cells):
            if len(cell) > 1:
                for v in cell:
                    rest = [w for w in cell if w != v]
                    search(cells[:i] + [[v], rest] + cells[i + 1:])
                return
        order = [c[0] for c in cells]
        code = _encode(g, order, mult)
        if best[0] is None or code < best[0]:
            best[0] = code
            best[1] = [order]
        elif code == best[0]:
            best[1].append(order)

    search(start)
    return best[0], best[1][0], best[1]


def canonical_form(g: ThornedGraph) -> CanonicalGraph:
    code, first, orders = canonical_labeling(g)
    # canonical vertex i <- first[i]; automorphism of the canonical graph
    # maps i to pos_other(first[i]) for each optimal order.
    auts = set()
    for order in orders:
        pos = {v: i for i, v in enumerate(order)}
        auts.add(tuple(pos[first[i]] for i in range(len(first))))
    return CanonicalGraph(code, tuple(sorted(auts)))


def canonical_transport(g: ThornedGraph) -> tuple[CanonicalGraph, list[int]]:
    """Canonical form plus a map from edges of ``g`` to canonical edge indices."""
    code, order, orders = canonical_labeling(g)
    auts = set()
    for o in orders:
        pos = {v: i for i, v in enumerate(o)}
        auts.add(tuple(pos[order[i]] for i in range(len(order))))
    cg = CanonicalGraph(code, tuple(sorted(auts)))
    pos = {v: i for i, v in enumerate(order)}
    slots = {e: list(idx) for e, idx in cg._parallel_classes.items()}
    emap = []
    for u, v in g.edges:
        a, b = pos[u], pos[v]
        emap.append(slots[(min(a, b), max(a, b))].pop())
    return cg, emap


def brute_force_isomorphic(g: ThornedGraph, h: ThornedGraph) -> bool:
    """Label-preserving isomorphism test by trying every vertex bijection."""
    if (g.vertex_count, g.edge_count, g.basepoint is None, len(g.marks)) != (
        h.vertex_count, h.edge_count, h.basepoint is None, len(h.marks)):
        return False
    target = Counter(h.edges)
    for perm in itertools.permutations(range(h.vertex_count)):
        if g.basepoint is not None and perm[g.basepoint] != h.basepoint:
            continue
        if any(perm[m] != hm for m, hm in zip(g.marks, h.marks)):
            continue
        mapped = Counter((min(perm[u], perm[v]), max(perm[u], perm[v])) for u, v in g.edges)
        if mapped == target:
            return True
    return False
