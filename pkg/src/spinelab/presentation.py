"""Abelianization of Gamma_{n,s} from a machine-checked partial presentation.

Generators are the Nielsen automorphisms (inversions, swaps, left and
right transvections) and, for s >= 2, the thorn generators t_{k,j} that put
x_j on thorn k. Relators come from conjugation: whenever g h^{+-1} g^-1
evaluates to a word of length <= 2 in the generators, that identity is a
relator. Every relator is checked by evaluation in the group model, so the
presented group surjects onto Gamma_{n,s}; the rank read off here is an
upper bound for the true rank of the abelianization and is exact when it
is zero. For s = 0 the inner automorphisms are added as relators.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .freegroup import (
    EMPTY,
    FreeAutomorphism,
    inversion,
    swap,
    transvection,
)
from .gamma import GammaElement
from .homology import SparseMatrix, elementary_divisors


@dataclass
class AbelianizationReport:
    n: int
    s: int
    generators: list[str]
    relator_count: int
    rank: int
    torsion: list[int]
    exact: bool

    def to_json(self) -> dict:
        return {"n": self.n, "s": self.s, "generators": len(self.generators),
                "relators": self.relator_count, "rank": self.rank, "torsion": self.torsion,
                "rank_is_exact": self.exact}


def _key(g: GammaElement):
    return g.phi.images, g.thorns


def generators(n: int, s: int) -> list[tuple[str, GammaElement]]:
    t = max(s, 1)
    thorns0 = (EMPTY,) * (t - 1)
    out = []

    def lift(name: str, phi: FreeAutomorphism) -> None:
        out.append((name, GammaElement(n, t, phi, thorns0)))

    for i in range(1, n + 1):
        lift(f"I{i}", inversion(n, i))
    for i, j in itertools.permutations(range(1, n + 1), 2):
        lift(f"R{i}{j}", transvection(n, i, j, True))
        lift(f"L{i}{j}", transvection(n, i, j, False))
        if i < j:
            lift(f"P{i}{j}", swap(n, i, j))
    for k in range(t - 1):
        for j in range(1, n + 1):
            words = list(thorns0)
            words[k] = (j,)
            out.append((f"T{k + 1}.{j}", GammaElement(n, t, FreeAutomorphism.identity(n), tuple(words))))
    return out


def _inner_relators(n: int, names: dict[str, int]) -> list[dict[int, int]]:
    # conjugation by x_j = product over i != j of L_ij R_ij^-1
    rows = []
    for j in range(1, n + 1):
        row: dict[int, int] = {}
        for i in range(1, n + 1):
            if i != j:
                row[names[f"L{i}{j}"]] = row.get(names[f"L{i}{j}"], 0) + 1
                row[names[f"R{i}{j}"]] = row.get(names[f"R{i}{j}"], 0) - 1
        rows.append(row)
    return rows


def _check_inner(n: int, gens: list[tuple[str, GammaElement]], names: dict[str, int]) -> None:
    for j in range(1, n + 1):
        acc = FreeAutomorphism.identity(n)
        for i in range(1, n + 1):
            if i != j:
                acc = acc @ gens[names[f"L{i}{j}"]][1].phi @ gens[names[f"R{i}{j}"]][1].phi.inverse()
        if acc.images != FreeAutomorphism.conjugation(n, (j,)).images:
            raise AssertionError(f"inner relator for x_{j} does not evaluate to conjugation")


def abelianization(n: int, s: int) -> AbelianizationReport:
    gens = generators(n, s)
    names = {name: k for k, (name, _) in enumerate(gens)}
    letters = [(k, 1) for k in range(len(gens))] + [(k, -1) for k in range(len(gens))]
    value = {(k, e): (g if e == 1 else g.inverse()) for k, (_, g) in enumerate(gens) for e in (1, -1)}

    short: dict = {}
    ident = GammaElement.identity(n, max(s, 1))
    short.setdefault(_key(ident), {})
    for a in letters:
        short.setdefault(_key(value[a]), {a[0]: a[1]})
    for a, b in itertools.product(letters, repeat=2):
        e = value[a] * value[b]
        vec: dict[int, int] = {}
        for k, sign in (a, b):
            vec[k] = vec.get(k, 0) + sign
        short.setdefault(_key(e), {k: v for k, v in vec.items() if v})

    rows: list[dict[int, int]] = []
    seen = set()
    for (gk, _), h in itertools.product([(k, 1) for k in range(len(gens))], letters):
        g = value[(gk, 1)]
        conj = g * value[h] * g.inverse()
        word = short.get(_key(conj))
        if word is None:
            continue
        # exponent sum of g h g^-1 w^-1
        row = {h[0]: h[1]}
        for k, v in word.items():
            row[k] = row.get(k, 0) - v
        row = {k: v for k, v in row.items() if v}
        frozen = tuple(sorted(row.items()))
        if row and frozen not in seen:
            seen.add(frozen)
            rows.append(row)
    for k, (_, g) in enumerate(gens):
        if (g * g).is_identity():
            frozen = ((k, 2),)
            if frozen not in seen:
                seen.add(frozen)
                rows.append({k: 2})
    if s == 0:
        _check_inner(n, gens, names)
        rows.extend(_inner_relators(n, names))

    # relators are rows; divisors of the transpose are the same
    m = SparseMatrix(len(gens), len(rows), [dict(r) for r in rows])
    divisors = elementary_divisors(m)
    rank = len(gens) - len(divisors)
    torsion = sorted(d for d in divisors if d != 1)
    return AbelianizationReport(n, s, [name for name, _ in gens], len(rows), rank, torsion, rank == 0)
