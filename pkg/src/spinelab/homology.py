"""Exact chain complexes, Betti numbers, Smith normal form and induced maps.

Matrices are sparse: a list of columns, each a ``{row: value}`` dict with
Python ints. Boundary matrices map d-cells (columns) to (d-1)-cells (rows).
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Hashable, Sequence

Column = dict[int, int]


class HomologyError(ValueError):
    pass


@dataclass
class SparseMatrix:
    rows: int
    cols: int
    columns: list[Column]

    def __post_init__(self) -> None:
        if len(self.columns) != self.cols:
            raise HomologyError("column count mismatch")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols, [{} for _ in range(cols)])

    @classmethod
    def from_dense(cls, m: Sequence[Sequence[int]]) -> "SparseMatrix":
        rows = len(m)
        cols = len(m[0]) if rows else 0
        return cls(rows, cols, [{i: m[i][j] for i in range(rows) if m[i][j]} for j in range(cols)])

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for j, col in enumerate(self.columns):
            for i, v in col.items():
                out[i][j] = v
        return out

    def nnz(self) -> int:
        return sum(len(c) for c in self.columns)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise HomologyError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = []
        for col in other.columns:
            acc: Column = {}
            for k, b in col.items():
                for i, a in self.columns[k].items():
                    v = acc.get(i, 0) + a * b
                    if v:
                        acc[i] = v
                    else:
                        acc.pop(i, None)
            out.append(acc)
        return SparseMatrix(self.rows, other.cols, out)

    def is_zero(self) -> bool:
        return all(not c for c in self.columns)

    def to_json(self) -> dict:
        entries = sorted([i, j, v] for j, col in enumerate(self.columns) for i, v in col.items())
        return {"rows": self.rows, "cols": self.cols, "entries": entries}

    @classmethod
    def from_json(cls, obj: dict) -> "SparseMatrix":
        m = cls.zeros(obj["rows"], obj["cols"])
        for i, j, v in obj["entries"]:
            m.columns[j][i] = v
        return m


# -- sparse elimination ---------------------------------------------------------

def _eliminate(matrix: SparseMatrix, units_only: bool) -> tuple[int, list[dict[int, int]]]:
    """Pivot-and-remove elimination; return (pivot count, leftover rows).

    With ``units_only`` only +-1 pivots are used (valid over Z; leftover
    rows then need a full Smith form). Otherwise any pivot is used with
    fraction-free row updates divided by their content (valid over Q).
    Columns are visited in order of current fill (Markowitz-style).
    """
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, set[int]] = {}
    for j, col in enumerate(matrix.columns):
        if col:
            cols[j] = set(col)
            for i, v in col.items():
                rows.setdefault(i, {})[j] = v
    heap = [(len(s), j) for j, s in cols.items()]
    heapq.heapify(heap)
    deferred: list[int] = []
    rank = 0
    while True:
        progressed = False
        while heap:
            size, j = heapq.heappop(heap)
            s = cols.get(j)
            if not s:
                continue
            if len(s) != size:
                heapq.heappush(heap, (len(s), j))
                continue
            best = None
            for i in s:
                a = rows[i][j]
                if units_only and abs(a) != 1:
                    continue
                cand = (abs(a), len(rows[i]), i)
                if best is None or cand < best:
                    best = cand
            if best is None:
                deferred.append(j)
                continue
            _, _, p = best
            prow = rows.pop(p)
            a = prow[j]
            for jj in prow:
                cols[jj].discard(p)
            for r in sorted(cols[j]):
                row = rows[r]
                b = row[j]
                if units_only:
                    f = b * a  # a == +-1 so a^-1 == a
                    for jj, v in prow.items():
                        nv = row.get(jj, 0) - f * v
                        if nv:
                            if jj not in row:
                                cols[jj].add(r)
                            row[jj] = nv
                        else:
                            row.pop(jj, None)
                            cols[jj].discard(r)
                else:
                    g = gcd(a, b)
                    ca, cb = a // g, b // g
                    for jj in list(row):
                        row[jj] *= ca
                    for jj, v in prow.items():
                        nv = row.get(jj, 0) - cb * v
                        if nv:
                            if jj not in row:
                                cols[jj].add(r)
                            row[jj] = nv
                        else:
                            row.pop(jj, None)
                            cols[jj].discard(r)
                    content = 0
                    for v in row.values():
                        content = gcd(content, v)
                        if content == 1:
                            break
                    if content > 1:
                        for jj in row:
                            row[jj] //= content
                if not row:
                    del rows[r]
                for jj in row:
                    heapq.heappush(heap, (len(cols[jj]), jj))
            del cols[j]
            rank += 1
            progressed = True
        if not deferred or not progressed:
            break
        for j in deferred:
            if cols.get(j):
                heapq.heappush(heap, (len(cols[j]), j))
        deferred = []
    leftover = [r for r in rows.values() if r]
    return rank, leftover


def rank_q(matrix: SparseMatrix) -> int:
    """Exact rank over Q by fraction-free sparse elimination."""
    r, leftover = _eliminate(matrix, units_only=False)
    if leftover:
        raise AssertionError("rational elimination left nonzero rows")
    return r


def rank_q_naive(matrix: SparseMatrix) -> int:
    """Rank by textbook Gaussian elimination over Fraction (test oracle)."""
    m = [[Fraction(x) for x in row] for row in matrix.to_dense()]
    rank = 0
    ncols = matrix.cols
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(len(m)):
            if r != rank and m[r][c] != 0:
                f = m[r][c] / m[rank][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def elementary_divisors(matrix: SparseMatrix) -> list[int]:
    """Nonzero invariant factors d_1 | d_2 | ... of an integer matrix."""
    units, leftover = _eliminate(matrix, units_only=True)
    divisors = [1] * units
    if leftover:
        colset = sorted({j for r in leftover for j in r})
        pos = {j: k for k, j in enumerate(colset)}
        dense = [[0] * len(colset) for _ in leftover]
        for i, r in enumerate(leftover):
            for j, v in r.items():
                dense[i][pos[j]] = v
        divisors += _divisors_modular(dense)
    return divisors


def _independent_minor(a: list[list[int]]) -> tuple[list[int], list[int]]:
    """Rows and columns of a nonsingular maximal square submatrix."""
    m = [[Fraction(x) for x in row] for row in a]
    rows = list(range(len(m)))
    piv_rows, piv_cols = [], []
    for c in range(len(m[0]) if m else 0):
        k = len(piv_rows)
        p = next((r for r in range(k, len(m)) if m[r][c] != 0), None)
        if p is None:
            continue
        m[k], m[p] = m[p], m[k]
        rows[k], rows[p] = rows[p], rows[k]
        for r in range(k + 1, len(m)):
            if m[r][c]:
                f = m[r][c] / m[k][c]
                m[r] = [x - f * y for x, y in zip(m[r], m[k])]
        piv_rows.append(rows[k])
        piv_cols.append(c)
    return sorted(piv_rows), piv_cols


def _divisors_modular(a: list[list[int]]) -> list[int]:
    """Invariant factors computed modulo a nonzero maximal minor D.

    Every nonzero invariant factor divides D, so the Smith form of a over
    Z/D recovers them as gcd(., D) while keeping entries below D.
    """
    rows, cols = _independent_minor(a)
    r = len(rows)
    if r == 0:
        return []
    D = abs(determinant([[a[i][j] for j in cols] for i in rows]))
    if D == 1:
        return [1] * r
    b = [[x % D for x in row] for row in a]
    m, n = len(b), len(b[0])
    t = 0
    while t < min(m, n):
        nz = [(b[i][j], i, j) for i in range(t, m) for j in range(t, n) if b[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        b[t], b[i] = b[i], b[t]
        for row in b:
            row[t], row[j] = row[j], row[t]
        while True:
            done = True
            for i in range(t + 1, m):
                if b[i][t]:
                    q = b[i][t] // b[t][t]
                    b[i] = [(x - q * y) % D for x, y in zip(b[i], b[t])]
                    if b[i][t]:
                        b[t], b[i] = b[i], b[t]
                        done = False
            for j in range(t + 1, n):
                if b[t][j]:
                    q = b[t][j] // b[t][t]
                    for row in b:
                        row[j] = (row[j] - q * row[t]) % D
                    if b[t][j]:
                        for row in b:
                            row[t], row[j] = row[j], row[t]
                        done = False
            if not done:
                continue
            bad = next((i for i in range(t + 1, m) for j in range(t + 1, n) if b[i][j] % b[t][t]), None)
            if bad is None:
                break
            b[t] = [(x + y) % D for x, y in zip(b[t], b[bad])]
        t += 1
    found = sorted(gcd(b[i][i], D) for i in range(min(m, n)) if b[i][i])
    if len(found) > r:
        raise AssertionError("modular Smith form found more divisors than the rank")
    return found + [D] * (r - len(found))


# -- dense Smith normal form ------------------------------------------------------

def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def _snf_dense(a: list[list[int]], want_transforms: bool = True):
    """Return (divisors, U, D, V) with U a V = D; U, V unimodular."""
    a = [row[:] for row in a]
    m = len(a)
    n = len(a[0]) if m else 0
    U = _identity(m) if want_transforms else None
    V = _identity(n) if want_transforms else None

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        if U is not None:
            U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        if V is not None:
            for row in V:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, f):  # row_dst += f * row_src
        a[dst] = [x + f * y for x, y in zip(a[dst], a[src])]
        if U is not None:
            U[dst] = [x + f * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, f):  # col_dst += f * col_src
        for row in a:
            row[dst] += f * row[src]
        if V is not None:
            for row in V:
                row[dst] += f * row[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    add_row(i, t, -q)
                    if a[i][t]:
                        swap_rows(t, i)
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    add_col(j, t, -q)
                    if a[t][j]:
                        swap_cols(t, j)
                        done = False
            if not done:
                continue
            # enforce divisibility of the rest by the pivot
            bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                        if a[i][j] % a[t][t]), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            if U is not None:
                U[t] = [-x for x in U[t]]
        t += 1
    divisors = [a[i][i] for i in range(min(m, n)) if a[i][i]]
    return divisors, U, a, V


def smith_normal_form(m: "SparseMatrix | Sequence[Sequence[int]]"):
    """Return (divisors, (U, V)) with U m V diagonal and U, V unimodular.

    The transforms are verified by multiplication before returning.
    """
    if isinstance(m, SparseMatrix):
        m = m.to_dense()
    dense = [list(map(int, row)) for row in m]
    divisors, U, D, V = _snf_dense(dense)
    if dense and dense[0]:
        check = _dense_mul(_dense_mul(U, dense), V)
        if check != D:
            raise AssertionError("Smith transforms do not reproduce the diagonal")
        for k in range(len(divisors) - 1):
            if divisors[k + 1] % divisors[k]:
                raise AssertionError("divisibility chain broken")
    return divisors, (U, V)


def _dense_mul(a: list[list[int]], b: list[list[int]]) -> list[list[int]]:
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def determinant(a: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by Bareiss elimination."""
    m = [list(map(int, row)) for row in a]
    n = len(m)
    sign, prev = 1, 1
    for k in range(n - 1):
        if m[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if m[i][k]), None)
            if sw is None:
                return 0
            m[k], m[sw] = m[sw], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1] if n else 1


# -- chain complexes ------------------------------------------------------------

@dataclass
class ChainComplex:
    """cells[d] lists the d-cells; boundaries[d] maps d-cells to (d-1)-cells.

    ``boundaries[0]`` is the zero map to the empty (-1)-group.
    ``complete`` is False when higher cells exist but were not built.
    """
    cells: list[list[Hashable]]
    boundaries: list[SparseMatrix]
    complete: bool = True

    def __post_init__(self) -> None:
        if len(self.cells) != len(self.boundaries):
            raise HomologyError("need one boundary matrix per dimension")
        for d, (c, b) in enumerate(zip(self.cells, self.boundaries)):
            below = len(self.cells[d - 1]) if d else 0
            if b.cols != len(c) or b.rows != below:
                raise HomologyError(f"boundary {d} has shape {b.rows}x{b.cols}, expected {below}x{len(c)}")

    @property
    def top_dim(self) -> int:
        return len(self.cells) - 1

    def cell_counts(self) -> list[int]:
        return [len(c) for c in self.cells]

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * k for d, k in enumerate(self.cell_counts()))

    def to_json(self) -> dict:
        return {"dims": [{"cells": [_json_key(k) for k in c], "boundary": b.to_json()}
                         for c, b in zip(self.cells, self.boundaries)]}


def _json_key(k):
    if isinstance(k, tuple):
        return [_json_key(x) for x in k]
    if isinstance(k, frozenset):
        return sorted(k)
    return k


def verify_dd_zero(c: ChainComplex) -> bool:
    for d in range(2, len(c.cells)):
        if not (c.boundaries[d - 1] @ c.boundaries[d]).is_zero():
            return False
    return True


def _require_dd(c: ChainComplex) -> None:
    if not verify_dd_zero(c):
        raise HomologyError("boundary of boundary is not zero")


def boundary_ranks(c: ChainComplex) -> list[int]:
    return [rank_q(b) for b in c.boundaries]


def betti_q(c: ChainComplex) -> list[int]:
    """Rational Betti numbers in dimensions 0..top (top is exact only if complete)."""
    _require_dd(c)
    ranks = boundary_ranks(c) + [0]
    return [len(c.cells[d]) - ranks[d] - ranks[d + 1] for d in range(len(c.cells))]


@dataclass
class HomologySummary:
    betti: list[int]
    torsion: list[list[int]]
    euler_cells: int
    euler_betti: int
    complete: bool = True

    @property
    def euler_consistent(self) -> bool:
        return self.euler_cells == self.euler_betti

    def to_json(self) -> dict:
        return {"betti": self.betti, "torsion": self.torsion, "euler_cells": self.euler_cells,
                "euler_betti": self.euler_betti, "complete": self.complete}


def homology_z(c: ChainComplex) -> HomologySummary:
    """Integral homology: free ranks and torsion divisors per dimension."""
    _require_dd(c)
    divisors = [elementary_divisors(b) for b in c.boundaries] + [[]]
    betti, torsion = [], []
    for d in range(len(c.cells)):
        betti.append(len(c.cells[d]) - len(divisors[d]) - len(divisors[d + 1]))
        torsion.append([x for x in divisors[d + 1] if x > 1])
    euler_b = sum((-1) ** d * b for d, b in enumerate(betti))
    return HomologySummary(betti, torsion, c.euler_characteristic(), euler_b, c.complete)


def homology_q_summary(c: ChainComplex) -> HomologySummary:
    betti = betti_q(c)
    euler_b = sum((-1) ** d * b for d, b in enumerate(betti))
    return HomologySummary(betti, [[] for _ in betti], c.euler_characteristic(), euler_b, c.complete)


def reduced_betti(betti: list[int]) -> list[int]:
    out = list(betti)
    if out:
        out[0] -= 1
    return out


# -- homology bases and induced maps ---------------------------------------------

class _Reducer:
    """Incremental echelon basis of sparse rational vectors with pivot = max index."""

    def __init__(self) -> None:
        self.pivots: dict[int, dict[int, Fraction]] = {}
        self.tags: dict[int, dict[int, Fraction]] = {}

    def reduce(self, vec: dict[int, Fraction], tag: dict[int, Fraction] | None = None):
        vec = dict(vec)
        tag = dict(tag or {})
        while vec:
            p = max(vec)
            if p not in self.pivots:
                break
            f = vec[p] / self.pivots[p][p]
            for i, v in self.pivots[p].items():
                nv = vec.get(i, 0) - f * v
                if nv:
                    vec[i] = nv
                else:
                    vec.pop(i, None)
            for i, v in self.tags[p].items():
                nv = tag.get(i, 0) - f * v
                if nv:
                    tag[i] = nv
                else:
                    tag.pop(i, None)
        return vec, tag

    def add(self, vec: dict[int, Fraction], tag: dict[int, Fraction]) -> None:
        p = max(vec)
        self.pivots[p] = vec
        self.tags[p] = tag


def kernel_basis(b: SparseMatrix) -> list[dict[int, Fraction]]:
    """Basis of ker b, one vector per non-pivot column in cell order."""
    red = _Reducer()
    out = []
    for j, col in enumerate(b.columns):
        vec, tag = red.reduce({i: Fraction(v) for i, v in col.items()}, {j: Fraction(1)})
        if vec:
            red.add(vec, tag)
        else:
            out.append(tag)
    return out


@dataclass
class HomologyBasis:
    dim: int
    reps: list[dict[int, Fraction]]
    _reducer: _Reducer = field(repr=False)
    _rep_pivots: list[int] = field(repr=False)

    def coordinates(self, cycle: dict[int, Fraction]) -> list[Fraction]:
        """Coordinates of a cycle's class in this basis."""
        vec, tag = self._reducer.reduce(cycle, {})
        if vec:
            raise HomologyError("vector is not a cycle")
        return [-tag.get(k, Fraction(0)) for k in range(len(self.reps))]


def homology_basis(c: ChainComplex, d: int) -> HomologyBasis:
    """Cycle representatives of H_d(c; Q), chosen deterministically.

    Boundaries are entered first; kernel vectors (in cell order) that stay
    independent modulo boundaries become the representatives.
    """
    red = _Reducer()
    if d >= c.top_dim and not c.complete:
        raise HomologyError(f"H_{d} needs cells of dimension {d + 1}")
    if d > c.top_dim:
        return HomologyBasis(d, [], red, [])
    if d + 1 < len(c.boundaries):
        for col in c.boundaries[d + 1].columns:
            vec, _ = red.reduce({i: Fraction(v) for i, v in col.items()})
            if vec:
                red.add(vec, {})
    reps = []
    pivots = []
    for z in kernel_basis(c.boundaries[d]):
        vec, tag = red.reduce(z, {})
        if vec:
            k = len(reps)
            tag = dict(tag)
            tag[k] = tag.get(k, 0) + 1
            red.add(vec, tag)
            reps.append(z)
            pivots.append(max(vec))
    return HomologyBasis(d, reps, red, pivots)


@dataclass
class ChainMap:
    source: ChainComplex
    target: ChainComplex
    matrices: list[SparseMatrix]

    def commutes(self) -> bool:
        for d in range(1, min(len(self.matrices), len(self.source.cells), len(self.target.cells))):
            lhs = self.target.boundaries[d] @ self.matrices[d]
            rhs = self.matrices[d - 1] @ self.source.boundaries[d]
            if lhs.to_json() != rhs.to_json():
                return False
        return True


@dataclass
class InducedMap:
    dim: int
    matrix: list[list[Fraction]]
    source_betti: int
    target_betti: int

    @property
    def rank(self) -> int:
        return rank_q_naive(SparseMatrix.from_dense([[int(x * _lcm_den(self.matrix)) for x in row]
                                                     for row in self.matrix])) if self.matrix and self.matrix[0] else 0

    @property
    def is_isomorphism(self) -> bool:
        return self.source_betti == self.target_betti == self.rank

    @property
    def is_surjective(self) -> bool:
        return self.rank == self.target_betti

    @property
    def is_injective(self) -> bool:
        return self.rank == self.source_betti

    @property
    def vacuous(self) -> bool:
        return self.source_betti == 0 and self.target_betti == 0

    def to_json(self) -> dict:
        return {"dim": self.dim, "matrix": [[str(x) for x in row] for row in self.matrix],
                "source_betti": self.source_betti, "target_betti": self.target_betti,
                "rank": self.rank, "iso": self.is_isomorphism, "surjective": self.is_surjective,
                "injective": self.is_injective, "vacuous": self.vacuous}


def _lcm_den(matrix: list[list[Fraction]]) -> int:
    out = 1
    for row in matrix:
        for x in row:
            out = out * x.denominator // gcd(out, x.denominator)
    return out


def induced_map(f: ChainMap, d: int) -> InducedMap:
    """Matrix of f_* on H_d (rows: target basis, columns: source basis)."""
    if not f.commutes():
        raise HomologyError("chain map does not commute with boundaries")
    src = homology_basis(f.source, d)
    tgt = homology_basis(f.target, d)
    cols = []
    for z in src.reps:
        image: dict[int, Fraction] = {}
        for j, v in z.items():
            for i, a in f.matrices[d].columns[j].items():
                nv = image.get(i, 0) + a * v
                if nv:
                    image[i] = nv
                else:
                    image.pop(i, None)
        cols.append(tgt.coordinates(image))
    matrix = [[cols[j][i] for j in range(len(cols))] for i in range(len(tgt.reps))]
    return InducedMap(d, matrix, len(src.reps), len(tgt.reps))
