"""Finite complexes: Delta(Z), the pattern quotient, quotient spines, chain maps.

Quotient spine cells are orbits of chains ``G > G/F_1 > ... > G/F_d`` in the
poset of collapses of a reduced thorned graph ``G``. A cell is keyed by the
index of ``G`` in the sorted graph list and the lexicographically least image
of the flag ``(F_1, ..., F_d)`` (edge bitmasks) under automorphisms of ``G``.
Vertex ``0`` of the simplex is ``G`` and vertex ``i`` is ``G/F_i``, so every
automorphism fixing a chain fixes its vertices in order and no cell is glued
to itself with a sign flip.
"""
from __future__ import annotations

import itertools
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Hashable, Iterable, Sequence

from .enumeration import (
    EnumerationQuery,
    ResourceBudgetExceeded,
    enumerate_graphs,
    forest_masks,
)
from .graphs import (
    CanonicalGraph,
    GraphError,
    ThornedGraph,
    basepoint_loop_count,
    canonical_form,
    canonical_transport,
    collapse_with_map,
    decode,
    is_reduced,
    rank,
)
from .homology import ChainComplex, ChainMap, HomologySummary, SparseMatrix, homology_z

DEFAULT_BUDGET = 2_000_000


# -- simplicial complexes and Delta(Z) --------------------------------------------

@dataclass(frozen=True)
class SimplicialComplex:
    vertices: tuple[int, ...]
    facets: tuple[frozenset[int], ...]

    @classmethod
    def from_facets(cls, facets: Iterable[Iterable[int]]) -> "SimplicialComplex":
        fs = {frozenset(f) for f in facets if f}
        maximal = [f for f in fs if not any(f < g for g in fs)]
        verts = sorted(set().union(*maximal)) if maximal else []
        return cls(tuple(verts), tuple(sorted(maximal, key=lambda f: (len(f), sorted(f)))))

    def faces(self, dim: int) -> list[tuple[int, ...]]:
        out = set()
        for f in self.facets:
            for c in itertools.combinations(sorted(f), dim + 1):
                out.add(c)
        return sorted(out)

    @property
    def dim(self) -> int:
        return max((len(f) - 1 for f in self.facets), default=-1)

    def chain_complex(self, max_dim: int | None = None) -> ChainComplex:
        """Oriented simplicial chains (vertices in increasing order)."""
        top = self.dim if max_dim is None else min(self.dim, max_dim)
        cells = [self.faces(d) for d in range(top + 1)]
        return _alternating_complex(cells, lambda c, i: c[:i] + c[i + 1:], complete=top == self.dim)

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "facets": [sorted(f) for f in self.facets]}


def boundary_of_simplex(k: int) -> SimplicialComplex:
    """The boundary of the k-simplex, a (k-1)-sphere."""
    return SimplicialComplex.from_facets(itertools.combinations(range(k + 1), k))


def rp2() -> SimplicialComplex:
    """Six-vertex triangulation of the real projective plane."""
    return SimplicialComplex.from_facets([
        (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
        (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3),
    ])


def random_complex(rng: random.Random, max_vertices: int = 8, max_facet: int = 4,
                   max_facets: int = 6) -> SimplicialComplex:
    nv = rng.randint(1, max_vertices)
    facets = []
    for _ in range(rng.randint(1, max_facets)):
        size = rng.randint(1, min(max_facet, nv))
        facets.append(rng.sample(range(nv), size))
    return SimplicialComplex.from_facets(facets)


def _alternating_complex(cells: list[list[Hashable]], face: Callable[[Hashable, int], Hashable],
                         complete: bool = True) -> ChainComplex:
    index = [{c: i for i, c in enumerate(cs)} for cs in cells]
    bounds = [SparseMatrix.zeros(0, len(cells[0]))] if cells else []
    for d in range(1, len(cells)):
        columns = []
        for c in cells[d]:
            col: dict[int, int] = {}
            for i in range(d + 1):
                r = index[d - 1][face(c, i)]
                v = col.get(r, 0) + (-1) ** i
                if v:
                    col[r] = v
                else:
                    col.pop(r, None)
            columns.append(col)
        bounds.append(SparseMatrix(len(cells[d - 1]), len(cells[d]), columns))
    return ChainComplex(cells, bounds, complete)


def delta_cells(Z: SimplicialComplex, d: int) -> list[tuple[int, ...]]:
    """Ordered (d+1)-tuples of vertices spanning a face, repetitions allowed."""
    out = set()
    for f in Z.facets:
        out.update(itertools.product(sorted(f), repeat=d + 1))
    return sorted(out)


def delta_construction(Z: SimplicialComplex, max_dim: int) -> ChainComplex:
    if max_dim < 1:
        raise ValueError("max_dim must be >= 1")
    cells = [delta_cells(Z, d) for d in range(max_dim + 1)]
    return _alternating_complex(cells, lambda c, i: c[:i] + c[i + 1:], complete=False)


@dataclass
class DeltaReport:
    equal: bool
    max_check_dim: int
    delta: dict
    simplicial: dict
    first_difference: int | None

    def to_json(self) -> dict:
        return {"equal": self.equal, "max_check_dim": self.max_check_dim, "delta": self.delta,
                "simplicial": self.simplicial, "first_difference": self.first_difference}


def delta_homology_check(Z: SimplicialComplex, max_check_dim: int) -> DeltaReport:
    """Compare integral H_d of Delta(Z) and Z for d <= max_check_dim.

    Both complexes are built one dimension past the check range so that
    every reported group is exact.
    """
    hd = homology_z(delta_construction(Z, max_check_dim + 1))
    hz = homology_z(Z.chain_complex(max_check_dim + 1))

    def table(h: HomologySummary) -> dict:
        betti = (h.betti + [0] * (max_check_dim + 1))[:max_check_dim + 1]
        tors = (h.torsion + [[]] * (max_check_dim + 1))[:max_check_dim + 1]
        return {"betti": betti, "torsion": tors}

    a, b = table(hd), table(hz)
    diff = next((d for d in range(max_check_dim + 1)
                 if (a["betti"][d], a["torsion"][d]) != (b["betti"][d], b["torsion"][d])), None)
    return DeltaReport(diff is None, max_check_dim, a, b, diff)


# -- pattern quotient ---------------------------------------------------------------

def normalize_pattern(labels: Sequence[int]) -> tuple[int, ...]:
    """Relabel blocks in order of first appearance (restricted growth form)."""
    seen: dict[int, int] = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


def pattern_face(cell: tuple[int, ...], i: int) -> tuple[int, ...]:
    return normalize_pattern(cell[:i] + cell[i + 1:])


def set_partitions(length: int, max_blocks: int) -> list[tuple[int, ...]]:
    out = []

    def rec(prefix: list[int], top: int) -> None:
        if len(prefix) == length:
            out.append(tuple(prefix))
            return
        for b in range(min(top + 1, max_blocks)):
            prefix.append(b)
            rec(prefix, max(top, b + 1))
            prefix.pop()

    rec([], 0)
    return out


def pattern_quotient(n: int, max_dim: int) -> ChainComplex:
    """d-cells: set partitions of {0..d} into at most n blocks."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cells = [set_partitions(d + 1, n) for d in range(max_dim + 1)]
    return _alternating_complex(cells, pattern_face, complete=False)


def pattern_to_blocks(cell: tuple[int, ...]) -> list[list[int]]:
    blocks: dict[int, list[int]] = {}
    for pos, b in enumerate(cell):
        blocks.setdefault(b, []).append(pos)
    return [blocks[b] for b in sorted(blocks)]


# -- quotient spines ------------------------------------------------------------------

class _GraphData:
    """Per-graph tables used while building spine cells."""

    def __init__(self, cg: CanonicalGraph):
        self.cg = cg
        self.graph = cg.graph
        self.forests = forest_masks(self.graph)
        self.perms = cg.edge_permutations()
        self._images: dict[int, tuple[int, ...]] = {}
        self.collapse_cache: dict[int, tuple[bytes, list[int]]] = {}

    def images(self, mask: int) -> tuple[int, ...]:
        img = self._images.get(mask)
        if img is None:
            bits = [i for i in range(mask.bit_length()) if mask >> i & 1]
            img = tuple(sum(1 << p[i] for i in bits) for p in self.perms)
            self._images[mask] = img
        return img

    def canonical_chain(self, chain: tuple[int, ...]) -> tuple[int, ...]:
        if not chain:
            return chain
        imgs = [self.images(m) for m in chain]
        return min(tuple(im[k] for im in imgs) for k in range(len(self.perms)))

    def chains(self, d: int) -> Iterable[tuple[int, ...]]:
        if d == 0:
            yield ()
            return
        forests = self.forests
        supersets = {f: [h for h in forests if h != f and h & f == f] for f in forests}

        def rec(chain):
            if len(chain) == d:
                yield chain
                return
            for h in supersets[chain[-1]]:
                yield from rec(chain + (h,))

        for f in forests:
            yield from rec((f,))

    def collapse(self, mask: int) -> tuple[bytes, list[int]]:
        """Canonical bytes of G/F and a map from old edges to new (-1 if collapsed)."""
        hit = self.collapse_cache.get(mask)
        if hit is None:
            forest = [i for i in range(mask.bit_length()) if mask >> i & 1]
            h, emap, _ = collapse_with_map(self.graph, forest)
            cg, to_canon = canonical_transport(h)
            full = [-1] * self.graph.edge_count
            for old, new in emap.items():
                full[old] = to_canon[new]
            hit = (cg.canonical_bytes, full)
            self.collapse_cache[mask] = hit
        return hit


def _map_mask(mask: int, emap: Sequence[int]) -> int:
    out = 0
    for i in range(mask.bit_length()):
        if mask >> i & 1 and emap[i] >= 0:
            out |= 1 << emap[i]
    return out


_WORKER_STATE: dict = {}


def _worker_init(codes: list[bytes]) -> None:
    _WORKER_STATE["codes"] = codes
    _WORKER_STATE["index"] = {c: i for i, c in enumerate(codes)}
    _WORKER_STATE["data"] = {}


def _data(gi: int) -> _GraphData:
    cache = _WORKER_STATE["data"]
    d = cache.get(gi)
    if d is None:
        codes = _WORKER_STATE["codes"]
        d = _GraphData(canonical_form(decode(codes[gi])))
        cache[gi] = d
    return d


def _cells_for_graph(args: tuple[int, int, int]) -> list[list[tuple[int, tuple[int, ...]]]]:
    gi, max_dim, budget = args
    gd = _data(gi)
    out = []
    total = 0
    for d in range(max_dim + 1):
        reps = []
        for chain in gd.chains(d):
            if gd.canonical_chain(chain) == chain:
                reps.append((gi, chain))
        total += len(reps)
        if total > budget:
            raise ResourceBudgetExceeded(f"graph {gi} alone yields more than {budget} cells")
        out.append(reps)
    return out


def _faces_of(cell: tuple[int, tuple[int, ...]]) -> list[tuple[tuple[int, tuple[int, ...]], int]]:
    gi, chain = cell
    gd = _data(gi)
    d = len(chain)
    faces = []
    code, emap = gd.collapse(chain[0])
    ti = _WORKER_STATE["index"].get(code)
    if ti is None:
        raise GraphError("collapse left the graph set; filters are not closed under collapse")
    rest = tuple(_map_mask(m, emap) for m in chain[1:])
    faces.append(((ti, _data(ti).canonical_chain(rest)), 1))
    for j in range(1, d + 1):
        sub = chain[:j - 1] + chain[j:]
        faces.append(((gi, gd.canonical_chain(sub)), (-1) ** j))
    return faces


def _faces_batch(cells: list[tuple[int, tuple[int, ...]]]):
    return [_faces_of(c) for c in cells]


@dataclass
class SpineQuotient:
    n: int
    s: int
    graphs: list[CanonicalGraph]
    complex: ChainComplex
    restrict_to_L: bool = False
    degree_max: int | None = None
    full_dim: int = 0

    def index_of(self, cell) -> int:
        return self._index[len(cell[1])][cell]

    def __post_init__(self) -> None:
        self._index = [{c: i for i, c in enumerate(cs)} for cs in self.complex.cells]
        self._gindex = {g.canonical_bytes: i for i, g in enumerate(self.graphs)}

    def cell_json(self, cell) -> dict:
        gi, chain = cell
        return {"graph": self.graphs[gi].hex,
                "flag": [[i for i in range(m.bit_length()) if m >> i & 1] for m in chain]}


def spine_graphs(n: int, s: int, restrict_to_L: bool = False, degree_max: int | None = None,
                 use_cache: bool = False, workers: int = 1) -> list[CanonicalGraph]:
    q = EnumerationQuery(n, s, degree_max=degree_max, require_basepoint_loop=restrict_to_L)
    return enumerate_graphs(q, use_cache=use_cache, workers=workers)


def spine_quotient(n: int, s: int, *, restrict_to_L: bool = False, degree_max: int | None = None,
                   max_dim: int | None = None, budget: int = DEFAULT_BUDGET, workers: int = 1,
                   use_cache: bool = False) -> SpineQuotient:
    """Quotient of the spine of reduced thorned graphs by Gamma_{n,s}.

    ``max_dim`` truncates the cell list; the result is then flagged
    incomplete when higher cells exist.
    """
    graphs = spine_graphs(n, s, restrict_to_L, degree_max, use_cache, workers)
    codes = [g.canonical_bytes for g in graphs]
    full_dim = max((g.graph.vertex_count - 1 for g in graphs), default=0)
    top = full_dim if max_dim is None else min(max_dim, full_dim)
    tasks = [(gi, top, budget) for gi in range(len(codes))]
    if workers > 1:
        with ProcessPoolExecutor(workers, initializer=_worker_init, initargs=(codes,)) as pool:
            per_graph = list(pool.map(_cells_for_graph, tasks, chunksize=4))
            cells = _merge(per_graph, top, budget)
            flat = [c for d in range(1, top + 1) for c in cells[d]]
            chunks = [flat[i:i + 2000] for i in range(0, len(flat), 2000)]
            faces_flat = [f for part in pool.map(_faces_batch, chunks) for f in part]
    else:
        _worker_init(codes)
        per_graph = [_cells_for_graph(t) for t in tasks]
        cells = _merge(per_graph, top, budget)
        flat = [c for d in range(1, top + 1) for c in cells[d]]
        faces_flat = _faces_batch(flat)
    index = [{c: i for i, c in enumerate(cs)} for cs in cells]
    bounds = [SparseMatrix.zeros(0, len(cells[0]))]
    pos = 0
    for d in range(1, top + 1):
        columns = []
        for _ in cells[d]:
            col: dict[int, int] = {}
            for key, sign in faces_flat[pos]:
                r = index[d - 1][key]
                v = col.get(r, 0) + sign
                if v:
                    col[r] = v
                else:
                    col.pop(r, None)
            columns.append(col)
            pos += 1
        bounds.append(SparseMatrix(len(cells[d - 1]), len(cells[d]), columns))
    cx = ChainComplex(cells, bounds, complete=top == full_dim)
    return SpineQuotient(n, s, graphs, cx, restrict_to_L, degree_max, full_dim)


def _merge(per_graph, top: int, budget: int) -> list[list]:
    cells = [[] for _ in range(top + 1)]
    total = 0
    for part in per_graph:
        for d in range(top + 1):
            cells[d].extend(part[d])
            total += len(part[d])
    if total > budget:
        raise ResourceBudgetExceeded(f"{total} spine cells exceed budget {budget}")
    for d in range(top + 1):
        cells[d].sort()
    return cells


# -- stabilization maps on graphs -------------------------------------------------------

def add_basepoint_loop(g: ThornedGraph) -> ThornedGraph:
    """alpha: wedge a new loop at the basepoint."""
    if g.basepoint is None:
        raise GraphError("alpha needs s >= 1")
    b = g.basepoint
    return ThornedGraph(g.vertex_count, g.edges + ((b, b),), b, g.marks)


def add_basepoint_mark(g: ThornedGraph) -> ThornedGraph:
    """mu: a new last thorn at the basepoint."""
    if g.basepoint is None:
        raise GraphError("mu needs s >= 1")
    return ThornedGraph(g.vertex_count, g.edges, g.basepoint, g.marks + (g.basepoint,))


def join_last_two(g: ThornedGraph) -> ThornedGraph:
    """beta: join the last two distinguished points by an edge and forget them.

    For s = 2 the two points are the basepoint and v_1, and the result has
    no basepoint.
    """
    if g.s < 2:
        raise GraphError("beta needs s >= 2")
    points = (g.basepoint,) + g.marks
    a, b = points[-2], points[-1]
    edges = g.edges + ((a, b),)
    if g.s == 2:
        return ThornedGraph(g.vertex_count, edges)
    return ThornedGraph(g.vertex_count, edges, g.basepoint, g.marks[:-2])


STAB_OPS: dict[str, tuple[Callable[[ThornedGraph], ThornedGraph], int, int]] = {
    # name -> (graph operation, rank shift, s shift)
    "alpha": (add_basepoint_loop, 1, 0),
    "mu": (add_basepoint_mark, 0, 1),
    "beta": (join_last_two, 1, -2),
}


def stab_target(kind: str, n: int, s: int) -> tuple[int, int]:
    _, dn, ds = STAB_OPS[kind]
    if kind in ("alpha", "mu") and s < 1:
        raise GraphError(f"{kind} needs s >= 1")
    if kind == "beta" and s < 2:
        raise GraphError("beta needs s >= 2")
    return n + dn, s + ds


def stabilization_chain_map(kind: str, source: SpineQuotient, target: SpineQuotient) -> ChainMap:
    """Cellular chain map induced by a stabilization operation on graphs.

    The operation keeps every old edge (new edges are appended), so forests
    and flags carry over unchanged; commutation with boundaries is checked
    by the caller through :meth:`ChainMap.commutes`.
    """
    op, dn, ds = STAB_OPS[kind]
    if (target.n, target.s) != stab_target(kind, source.n, source.s):
        raise GraphError(f"{kind} maps ({source.n},{source.s}) to {stab_target(kind, source.n, source.s)}")
    tdata: dict[int, _GraphData] = {}
    transport: dict[int, tuple[int, list[int]]] = {}
    top = min(source.complex.top_dim, target.complex.top_dim)
    matrices = []
    for d in range(top + 1):
        cols = []
        for gi, chain in source.complex.cells[d]:
            if gi not in transport:
                g = source.graphs[gi].graph
                h = op(g)
                if not is_reduced(h) or rank(h) != rank(g) + dn:
                    raise GraphError(f"{kind} produced a non-reduced graph from {source.graphs[gi].hex}")
                cg, emap = canonical_transport(h)
                ti = target._gindex.get(cg.canonical_bytes)
                if ti is None:
                    raise GraphError(f"{kind} image of {source.graphs[gi].hex} is not in the target spine")
                transport[gi] = (ti, emap)
            ti, emap = transport[gi]
            if ti not in tdata:
                tdata[ti] = _GraphData(target.graphs[ti])
            key = (ti, tdata[ti].canonical_chain(tuple(_map_mask(m, emap) for m in chain)))
            cols.append({target.index_of(key): 1})
        matrices.append(SparseMatrix(len(target.complex.cells[d]), len(cols), cols))
    return ChainMap(source.complex, target.complex, matrices)


def compose_chain_maps(f: ChainMap, g: ChainMap) -> ChainMap:
    """g after f."""
    top = min(len(f.matrices), len(g.matrices))
    return ChainMap(f.source, g.target, [g.matrices[d] @ f.matrices[d] for d in range(top)])


def has_basepoint_loop(cg: CanonicalGraph) -> bool:
    return basepoint_loop_count(cg.graph) > 0
