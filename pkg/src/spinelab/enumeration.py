"""Isomorph-free generation of thorned graphs, forests and forest flags.

Graphs are grown one vertex at a time by splitting a vertex into two joined
by a new edge (the inverse of a single-edge collapse). Every reduced graph
with two or more vertices collapses along any non-loop edge to a reduced
graph with one fewer vertex, so growing from the rose reaches every class.
Duplicates are removed with canonical forms.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .graphs import (
    CanonicalGraph,
    GraphError,
    ThornedGraph,
    UnsupportedParameterError,
    basepoint_loop_count,
    bridges,
    canonical_form,
    decode,
    degree,
    is_forest,
    rose,
    valence_ok,
)


class ResourceBudgetExceeded(RuntimeError):
    """A computation would exceed the configured size budget."""


@dataclass(frozen=True)
class EnumerationQuery:
    n: int
    s: int
    reduced: bool = True
    degree_max: int | None = None
    require_basepoint_loop: bool = False
    forbid_basepoint_loop: bool = False

    def __post_init__(self) -> None:
        if self.n < 1:
            raise UnsupportedParameterError("rank 0 is not supported")
        if self.s < 0:
            raise ValueError("s must be nonnegative")
        if self.require_basepoint_loop and self.forbid_basepoint_loop:
            raise ValueError("require and forbid basepoint loop are exclusive")
        if self.s == 0 and (self.degree_max is not None or self.require_basepoint_loop
                            or self.forbid_basepoint_loop):
            raise UnsupportedParameterError("degree and basepoint filters need s >= 1")

    def key(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True) + "|" + __version__
        return hashlib.sha256(blob.encode()).hexdigest()[:24]


def vertex_bound(n: int, s: int) -> int:
    """Upper bound on vertex count, strictly above any reduced graph.

    Reduced graphs satisfy V <= 2n + s - 2 (s >= 1) or V <= 2n - 2 (s = 0),
    from 2E + s - 1 >= 3(V - 1) + 2 and E = n + V - 1.
    """
    return 2 * (n - 1) + (s + 1)


def _splits(g: ThornedGraph, v: int, reduced: bool):
    """All graphs obtained by splitting vertex ``v`` of ``g``."""
    darts = []
    for i, (a, b) in enumerate(g.edges):
        if a == v:
            darts.append((i, 0))
        if b == v:
            darts.append((i, 1))
    mark_idx = [i for i, m in enumerate(g.marks) if m == v]
    new = g.vertex_count
    items = len(darts) + len(mark_idx)
    # the basepoint (if at v) stays on the old side; the new side gets a nonempty share
    for mask in range(1, 1 << items):
        moved_darts = [darts[k] for k in range(len(darts)) if mask >> k & 1]
        moved_marks = [mark_idx[k] for k in range(len(mark_idx)) if mask >> (len(darts) + k) & 1]
        edges = [list(e) for e in g.edges]
        for i, end in moved_darts:
            edges[i][end] = new
        edges.append([v, new])
        marks = list(g.marks)
        for i in moved_marks:
            marks[i] = new
        h = ThornedGraph(new + 1, tuple((a, b) for a, b in edges), g.basepoint, tuple(marks))
        if not valence_ok(h):
            continue
        if reduced:
            if bridges(h):
                continue
        elif not _leaf_rule(h):
            continue
        yield h


def _leaf_rule(h: ThornedGraph) -> bool:
    # non-reduced graphs still need every vertex to touch at least one edge
    return all(x > 0 for x in h.valences) and h.is_connected


def _passes(h: ThornedGraph, q: EnumerationQuery) -> bool:
    if q.degree_max is not None and degree(h) > q.degree_max:
        return False
    if q.require_basepoint_loop and basepoint_loop_count(h) == 0:
        return False
    return True


def _prunes(h: ThornedGraph, q: EnumerationQuery) -> bool:
    # degree never drops and basepoint loops never appear under splitting
    return not _passes(h, q)


def _expand_one(args: tuple[bytes, EnumerationQuery]) -> list[bytes]:
    code, q = args
    g = decode(code)
    out = set()
    for v in range(g.vertex_count):
        for h in _splits(g, v, q.reduced):
            if _prunes(h, q):
                continue
            out.add(canonical_form(h).canonical_bytes)
    return sorted(out)


def _generate(q: EnumerationQuery, workers: int = 1, order_seed: int | None = None) -> list[bytes]:
    start = rose(q.n, q.s)
    if q.s == 0 and not valence_ok(start):
        return []
    if _prunes(start, q):
        return []
    bound = vertex_bound(q.n, q.s) if q.reduced else vertex_bound(q.n, q.s) + max(q.s - 1, 0)
    found: set[bytes] = set()
    level = [canonical_form(start).canonical_bytes]
    V = 1
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        while level:
            found.update(level)
            if V + 1 >= bound:
                # nothing at the bound may be valid; expanding once more must yield nothing
                nxt = _expand_level(level, q, pool)
                if nxt:
                    raise AssertionError(f"valid graph with {V + 1} vertices reached the bound {bound}")
                break
            if order_seed is not None:
                import random
                random.Random(order_seed + V).shuffle(level)
            level = _expand_level(level, q, pool)
            V += 1
    finally:
        if pool is not None:
            pool.shutdown()
    result = [c for c in found if _passes_final(decode(c), q)]
    return sorted(result)


def _expand_level(level: list[bytes], q: EnumerationQuery, pool) -> list[bytes]:
    tasks = [(c, q) for c in level]
    parts = pool.map(_expand_one, tasks, chunksize=8) if pool else map(_expand_one, tasks)
    merged: set[bytes] = set()
    for part in parts:
        merged.update(part)
    return sorted(merged)


def _passes_final(g: ThornedGraph, q: EnumerationQuery) -> bool:
    if not _passes(g, q):
        return False
    if q.forbid_basepoint_loop and basepoint_loop_count(g) > 0:
        return False
    return True


def cache_dir() -> Path:
    return Path(os.environ.get("SPINELAB_CACHE", Path.home() / ".cache" / "spinelab"))


@dataclass
class CacheStats:
    hits: int = 0
    misses: int = 0


CACHE_STATS = CacheStats()


def enumerate_graphs(q: EnumerationQuery, *, workers: int = 1, use_cache: bool = False,
                     budget: int | None = None) -> list[CanonicalGraph]:
    """One canonical representative per isomorphism class, sorted by bytes."""
    codes = None
    path = cache_dir() / f"graphs-{q.key()}.jsonl"
    if use_cache and path.exists():
        codes = [bytes.fromhex(json.loads(line)["canonical"]) for line in path.read_text().splitlines() if line]
        CACHE_STATS.hits += 1
    if codes is None:
        codes = _generate(q, workers)
        if use_cache:
            CACHE_STATS.misses += 1
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text("".join(json.dumps({"canonical": c.hex()}) + "\n" for c in codes))
            tmp.replace(path)
    if budget is not None and len(codes) > budget:
        raise ResourceBudgetExceeded(f"{len(codes)} graphs exceed budget {budget}")
    return [canonical_form(decode(c)) for c in codes]


# -- forests and flags --------------------------------------------------------

def forest_masks(g: ThornedGraph) -> list[int]:
    """Nonempty forests as bitmasks over edge indices, sorted."""
    non_loop = [i for i, (u, v) in enumerate(g.edges) if u != v]
    out = []
    parent = list(range(g.vertex_count))

    def find(x: int) -> int:
        while parent[x] != x:
            x = parent[x]
        return x

    def rec(k: int, mask: int) -> None:
        if k == len(non_loop):
            if mask:
                out.append(mask)
            return
        rec(k + 1, mask)
        e = non_loop[k]
        u, v = g.edges[e]
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
            rec(k + 1, mask | (1 << e))
            parent[ru] = ru

    rec(0, 0)
    return sorted(out)


def mask_to_set(mask: int) -> frozenset[int]:
    return frozenset(i for i in range(mask.bit_length()) if mask >> i & 1)


def enumerate_forests(g: ThornedGraph) -> list[frozenset[int]]:
    return [mask_to_set(m) for m in forest_masks(g)]


def flag_masks(g: ThornedGraph, p: int, forests: list[int] | None = None) -> list[tuple[int, ...]]:
    if p < 1:
        raise ValueError("flag length must be >= 1")
    if forests is None:
        forests = forest_masks(g)
    supersets = {f: [h for h in forests if h != f and h & f == f] for f in forests}
    out = []

    def rec(chain: tuple[int, ...]) -> None:
        if len(chain) == p:
            out.append(chain)
            return
        for h in supersets[chain[-1]]:
            rec(chain + (h,))

    for f in forests:
        rec((f,))
    return out


def enumerate_flags(g: ThornedGraph, p: int) -> list[tuple[frozenset[int], ...]]:
    return [tuple(mask_to_set(m) for m in chain) for chain in flag_masks(g, p)]


# -- the basepoint-loop lemma ---------------------------------------------------

@dataclass
class LemmaReport:
    n_max: int
    s_max: int
    checked: dict[str, int] = field(default_factory=dict)
    violations: list[dict] = field(default_factory=list)
    witnesses: dict[int, dict | None] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "n_max": self.n_max,
            "s_max": self.s_max,
            "checked": self.checked,
            "violations": self.violations,
            "witnesses": {str(k): v for k, v in sorted(self.witnesses.items())},
            "passed": self.passed,
        }


def verify_basepoint_loop_lemma(n_max: int, s_max: int, *, workers: int = 1,
                                use_cache: bool = False) -> LemmaReport:
    """Exhaustively check that degree k < n/2 forces a loop at the basepoint.

    Also records, per rank, a graph of degree ceil(n/2) without basepoint
    loops when one exists, showing the bound cannot be pushed further.
    """
    report = LemmaReport(n_max, s_max)
    for n in range(1, n_max + 1):
        report.witnesses[n] = None
        sharp = math.ceil(n / 2)
        for s in range(1, s_max + 1):
            graphs = enumerate_graphs(EnumerationQuery(n, s, degree_max=sharp),
                                      workers=workers, use_cache=use_cache)
            count = 0
            for cg in graphs:
                g = cg.graph
                k = degree(g)
                loops = basepoint_loop_count(g)
                if 2 * k < n:
                    count += 1
                    if loops == 0:
                        report.violations.append({"n": n, "s": s, "degree": k, "graph": cg.hex})
                elif k == sharp and loops == 0 and report.witnesses[n] is None:
                    report.witnesses[n] = {"s": s, "degree": k, "graph": cg.hex}
            report.checked[f"{n},{s}"] = count
    return report


def all_graphs_upto(n_max: int, s_max: int, **kw) -> dict[tuple[int, int], list[CanonicalGraph]]:
    out = {}
    for n, s in itertools.product(range(1, n_max + 1), range(0, s_max + 1)):
        out[(n, s)] = enumerate_graphs(EnumerationQuery(n, s), **kw)
    return out


__all__ = [
    "EnumerationQuery",
    "GraphError",
    "LemmaReport",
    "ResourceBudgetExceeded",
    "enumerate_flags",
    "enumerate_forests",
    "enumerate_graphs",
    "flag_masks",
    "forest_masks",
    "verify_basepoint_loop_lemma",
    "vertex_bound",
]
