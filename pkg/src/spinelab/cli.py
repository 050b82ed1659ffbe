"""The ``spinelab`` command line.

Results are JSON lines (sorted keys). With ``--out`` they go to the file
and the run manifest is printed; otherwise results are printed followed by
one ``{"manifest": ...}`` line. The manifest digest is a sha256 over the
result lines, so it does not depend on timing, caching or thread count.

Exit codes: 0 success, 2 verification failure, 3 resource budget, 4 bad flags.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from typing import Callable

from . import __version__
from .checks import (
    degree_decrement_suite,
    delta_corpus,
    delta_suite,
    diagram_suite,
    euler_identity_suite,
    exact_sequence_suite,
    lemma_suite,
    pattern_suite,
)
from .complexes import DEFAULT_BUDGET, SimplicialComplex, delta_homology_check, spine_quotient
from .enumeration import CACHE_STATS, EnumerationQuery, ResourceBudgetExceeded, enumerate_graphs
from .graphs import GraphError, degree
from .homology import HomologyError, homology_q_summary, homology_z, verify_dd_zero
from .presentation import abelianization
from .stability import stab_map_report

EXIT_OK, EXIT_VERIFY, EXIT_BUDGET, EXIT_FLAGS = 0, 2, 3, 4


class FlagError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse exits 2 by default, which is taken
        self.print_usage(sys.stderr)
        raise FlagError(message)


class Outcome:
    def __init__(self, records: list[dict], ok: bool = True):
        self.records = records
        self.ok = ok


def canonical_line(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(lines: list[str]) -> str:
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode())
        h.update(b"\n")
    return h.hexdigest()


# -- commands ------------------------------------------------------------------------

def cmd_enumerate(a) -> Outcome:
    q = EnumerationQuery(a.rank, a.marks, reduced=not a.all, degree_max=a.degree_max,
                         require_basepoint_loop=a.require_basepoint_loop,
                         forbid_basepoint_loop=a.forbid_basepoint_loop)
    graphs = enumerate_graphs(q, workers=a.threads, use_cache=a.cache, budget=a.budget)
    records = []
    for cg in graphs:
        g = cg.graph
        rec = {"canonical": cg.hex, "graph": g.to_json(), "automorphisms": cg.automorphism_order()}
        if g.basepoint is not None:
            rec["degree"] = degree(g)
        records.append(rec)
    return Outcome(records)


def cmd_homology(a) -> Outcome:
    if a.marks == 0 and (a.restrict_L or a.degree_max is not None):
        raise GraphError("degree and basepoint-loop filters need --marks >= 1")
    build = None if a.max_dim is None else a.max_dim + 1
    sq = spine_quotient(a.rank, a.marks, restrict_to_L=a.restrict_L, degree_max=a.degree_max,
                        max_dim=build, workers=a.threads, budget=a.budget, use_cache=a.cache)
    cx = sq.complex
    if not verify_dd_zero(cx):
        return Outcome([{"error": "boundary of boundary is not zero"}], ok=False)
    h = homology_z(cx) if a.coeff == "z" else homology_q_summary(cx)
    top = cx.top_dim if cx.complete else cx.top_dim - 1
    rec = {"rank": a.rank, "marks": a.marks, "restrict_L": a.restrict_L, "degree_max": a.degree_max,
           "cells": cx.cell_counts(), "complete": cx.complete, "full_dim": sq.full_dim,
           "betti": h.betti[:top + 1], "coefficients": a.coeff}
    if a.coeff == "z":
        rec["torsion"] = h.torsion[:top + 1]
        rec["torsion_note"] = "space-level only: quotient homology, not group homology"
    ok = True
    if cx.complete:
        rec["euler_cells"], rec["euler_betti"] = h.euler_cells, h.euler_betti
        ok = h.euler_consistent
    if top >= 1 and not a.restrict_L and a.degree_max is None:
        ab = abelianization(a.rank, a.marks)
        rec["h1_oracle"] = ab.to_json()
        if ab.exact:
            rec["h1_matches_oracle"] = h.betti[1] == ab.rank
            ok = ok and rec["h1_matches_oracle"]
    return Outcome([rec], ok)


def cmd_stab_map(a) -> Outcome:
    rep = stab_map_report(a.map, a.rank, a.marks, a.dim, workers=a.threads, budget=a.budget,
                          use_cache=a.cache)
    return Outcome([rep.to_json()], rep.consistent)


SUITES: dict[str, Callable] = {
    "lemma": lambda a: lemma_suite(a.n_max or 5, 3, workers=a.threads, use_cache=a.cache),
    "degree": lambda a: degree_decrement_suite(a.n_max or 4, 3, workers=a.threads, use_cache=a.cache),
    "euler": lambda a: euler_identity_suite(a.n_max or 4, 3, workers=a.threads, use_cache=a.cache),
    "diagrams": lambda a: diagram_suite(a.samples, a.seed),
    "exact": lambda a: exact_sequence_suite(a.samples, a.seed),
    "delta": lambda a: delta_suite(50, a.seed),
    "pattern": lambda a: pattern_suite(a.n_max or 5),
}


def cmd_verify(a) -> Outcome:
    names = list(SUITES) if a.suite == "all" else [a.suite]
    records = [SUITES[name](a).to_json() for name in names]
    return Outcome(records, all(r["passed"] for r in records))


def _parse_complex(text: str) -> SimplicialComplex:
    try:
        facets = [[int(x) for x in part.split(",") if x.strip()] for part in text.split(";")]
    except ValueError as exc:
        raise FlagError(f"bad complex {text!r}: {exc}") from None
    return SimplicialComplex.from_facets(facets)


def cmd_delta_check(a) -> Outcome:
    if a.complex:
        corpus = [("given", _parse_complex(a.complex))]
    else:
        corpus = delta_corpus(a.random, a.seed, a.max_vertices)
    records = []
    for name, z in corpus:
        rep = delta_homology_check(z, a.max_check_dim)
        records.append({"complex": name, **z.to_json(), **rep.to_json()})
    return Outcome(records, all(r["equal"] for r in records))


COMMANDS = {
    "enumerate": cmd_enumerate,
    "homology": cmd_homology,
    "stab-map": cmd_stab_map,
    "verify": cmd_verify,
    "delta-check": cmd_delta_check,
}


# -- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1,
                        help="worker processes (results do not depend on this)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum cell or graph count")
    common.add_argument("--out", help="write result lines here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--no-cache", dest="cache", action="store_false",
                        help="skip the on-disk enumeration cache ($SPINELAB_CACHE)")

    p = _Parser(prog="spinelab", description="Thorned graphs, quotient spines and stabilization maps.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("enumerate", parents=[common], help="list reduced thorned graphs")
    e.add_argument("--rank", type=int, required=True)
    e.add_argument("--marks", type=int, required=True, help="s: basepoint plus marked points")
    e.add_argument("--degree-max", type=int)
    e.add_argument("--require-basepoint-loop", action="store_true")
    e.add_argument("--forbid-basepoint-loop", action="store_true")
    e.add_argument("--all", action="store_true", help="include non-reduced graphs")

    h = sub.add_parser("homology", parents=[common], help="homology of a quotient spine")
    h.add_argument("--rank", type=int, required=True)
    h.add_argument("--marks", type=int, required=True)
    h.add_argument("--restrict-L", action="store_true", help="only graphs with a basepoint loop")
    h.add_argument("--degree-max", type=int)
    h.add_argument("--max-dim", type=int)
    h.add_argument("--coeff", choices=["q", "z"], default="q")

    m = sub.add_parser("stab-map", parents=[common], help="map induced by alpha, mu or beta")
    m.add_argument("--map", choices=["alpha", "mu", "beta"], required=True)
    m.add_argument("--rank", type=int, required=True)
    m.add_argument("--marks", type=int, required=True)
    m.add_argument("--dim", type=int, required=True)

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    v.add_argument("--samples", type=int, default=1000)
    v.add_argument("--n-max", type=int)

    d = sub.add_parser("delta-check", parents=[common], help="compare homology of Delta(Z) and Z")
    d.add_argument("--random", type=int, default=50, help="number of seeded random complexes")
    d.add_argument("--max-vertices", type=int, default=8)
    d.add_argument("--max-check-dim", type=int, default=3)
    d.add_argument("--complex", help="facets like '0,1,2;2,3' instead of the random corpus")
    return p


def _validate(a) -> None:
    if a.threads < 1 or a.budget < 1:
        raise FlagError("--threads and --budget must be positive")
    for name in ("rank", "dim", "max_dim", "degree_max", "samples", "random", "max_check_dim"):
        val = getattr(a, name, None)
        if val is not None and val < 0:
            raise FlagError(f"--{name.replace('_', '-')} must be nonnegative")
    if getattr(a, "marks", 0) < 0:
        raise FlagError("--marks must be nonnegative")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
        _validate(a)
    except FlagError as exc:
        print(f"spinelab: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    start = time.perf_counter()
    hits0 = CACHE_STATS.hits
    try:
        outcome = COMMANDS[a.command](a)
    except ResourceBudgetExceeded as exc:
        print(f"spinelab: resource budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except FlagError as exc:
        print(f"spinelab: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    except (GraphError, HomologyError) as exc:
        print(f"spinelab: error: {exc}", file=sys.stderr)
        return EXIT_FLAGS
    lines = [canonical_line(r) for r in outcome.records]
    params = {k: v for k, v in sorted(vars(a).items()) if k not in ("out", "command")}
    manifest = {
        "command": a.command,
        "params": params,
        "version": __version__,
        "seed": a.seed,
        "timing_s": round(time.perf_counter() - start, 3),
        "cache_hits": CACHE_STATS.hits - hits0,
        "records": len(lines),
        "passed": outcome.ok,
        "digest": digest(lines),
    }
    if a.out:
        with open(a.out, "w") as fh:
            fh.writelines(line + "\n" for line in lines)
        print(canonical_line({"manifest": manifest}))
    else:
        for line in lines:
            print(line)
        print(canonical_line({"manifest": manifest}))
    return EXIT_OK if outcome.ok else EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
