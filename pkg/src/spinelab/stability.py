"""Induced maps of the stabilizations on spine homology, with range verdicts.

Known stable ranges, in terms of the source rank n and homological degree i:

    alpha : Gamma_{n,s} -> Gamma_{n+1,s}     iso for n >= 2i+2, onto for n = 2i+1
    mu    : Gamma_{n,s} -> Gamma_{n,s+1}     iso for n >= 2i+2
    beta  : Gamma_{n,s} -> Gamma_{n+1,s-2}   iso for n >= 2i+2 when s >= 3
    beta  : Gamma_{n,2} -> Gamma_{n+1,0}     iso for n >= 2i+3, onto for n = 2i+2
"""
from __future__ import annotations

from dataclasses import dataclass

from .complexes import (
    DEFAULT_BUDGET,
    SpineQuotient,
    compose_chain_maps,
    spine_quotient,
    stab_target,
    stabilization_chain_map,
)
from .homology import ChainMap, induced_map


def stable_range(kind: str, n: int, s: int, i: int) -> str:
    """'iso', 'surjective' or 'none' according to the known ranges."""
    if kind == "beta" and s == 2:
        iso_from, onto_at = 2 * i + 3, 2 * i + 2
    elif kind == "alpha":
        iso_from, onto_at = 2 * i + 2, 2 * i + 1
    else:
        iso_from, onto_at = 2 * i + 2, None
    if n >= iso_from:
        return "iso"
    if n == onto_at:
        return "surjective"
    return "none"


@dataclass
class StabReport:
    kind: str
    source: tuple[int, int]
    target: tuple[int, int]
    dim: int
    matrix: list[list[str]]
    source_betti: int
    target_betti: int
    rank: int
    iso: bool
    surjective: bool
    range: str
    verdict: str
    consistent: bool

    def to_json(self) -> dict:
        return {"map": self.kind, "source": list(self.source), "target": list(self.target),
                "dim": self.dim, "matrix": self.matrix, "source_betti": self.source_betti,
                "target_betti": self.target_betti, "rank": self.rank, "iso": self.iso,
                "surjective": self.surjective, "range": self.range, "verdict": self.verdict,
                "consistent": self.consistent}


def _verdict(rng: str, source_betti: int, target_betti: int) -> str:
    if source_betti == 0 and target_betti == 0:
        return "vacuous"
    return "in-range" if rng != "none" else "out-of-range"


def report_from_chain_map(kind: str, f: ChainMap, source: tuple[int, int], target: tuple[int, int],
                          i: int) -> StabReport:
    ind = induced_map(f, i)
    rng = stable_range(kind, source[0], source[1], i)
    iso, onto = ind.is_isomorphism, ind.is_surjective
    consistent = {"iso": iso, "surjective": onto, "none": True}[rng]
    return StabReport(kind, source, target, i, [[str(x) for x in row] for row in ind.matrix],
                      ind.source_betti, ind.target_betti, ind.rank, iso, onto, rng,
                      _verdict(rng, ind.source_betti, ind.target_betti), consistent)


def stab_map_report(kind: str, n: int, s: int, i: int, *, workers: int = 1,
                    budget: int = DEFAULT_BUDGET, use_cache: bool = False,
                    spines: dict | None = None) -> StabReport:
    """Build both spines through dimension i + 1 and report the map on H_i.

    ``spines`` may hold prebuilt quotients keyed by (n, s, max_dim).
    """
    tn, ts = stab_target(kind, n, s)
    src = _spine(n, s, i + 1, workers, budget, use_cache, spines)
    tgt = _spine(tn, ts, i + 1, workers, budget, use_cache, spines)
    f = stabilization_chain_map(kind, src, tgt)
    return report_from_chain_map(kind, f, (n, s), (tn, ts), i)


def _spine(n, s, max_dim, workers, budget, use_cache, spines) -> SpineQuotient:
    key = (n, s, max_dim)
    if spines is not None and key in spines:
        return spines[key]
    sq = spine_quotient(n, s, max_dim=max_dim, workers=workers, budget=budget, use_cache=use_cache)
    if spines is not None:
        spines[key] = sq
    return sq


def alpha_equals_beta_mu_mu(n: int, s: int, max_dim: int, *, workers: int = 1,
                            budget: int = DEFAULT_BUDGET, spines: dict | None = None) -> bool:
    """The composite beta mu mu and alpha agree as cellular chain maps."""
    a = _spine(n, s, max_dim, workers, budget, False, spines)
    b = _spine(n, s + 1, max_dim, workers, budget, False, spines)
    c = _spine(n, s + 2, max_dim, workers, budget, False, spines)
    t = _spine(n + 1, s, max_dim, workers, budget, False, spines)
    composite = compose_chain_maps(
        compose_chain_maps(stabilization_chain_map("mu", a, b), stabilization_chain_map("mu", b, c)),
        stabilization_chain_map("beta", c, t))
    direct = stabilization_chain_map("alpha", a, t)
    return all(x.to_json() == y.to_json() for x, y in zip(composite.matrices, direct.matrices))
