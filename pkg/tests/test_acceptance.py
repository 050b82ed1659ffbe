"""Acceptance criteria, one test each; every test records a PASS/FAIL line.

The lines are gathered into an "acceptance criteria" section at the end of
the pytest run.
"""
import json
import time

from spinelab.checks import (
    degree_decrement_suite,
    delta_suite,
    diagram_suite,
    euler_identity_suite,
    exact_sequence_suite,
    lemma_suite,
    pattern_suite,
)
from spinelab.cli import main
from spinelab.complexes import spine_quotient
from spinelab.homology import homology_q_summary, verify_dd_zero
from spinelab.presentation import abelianization
from spinelab.stability import stab_map_report


def report(record_property, number, name, ok, detail):
    line = f"criterion {number}: {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    record_property("acceptance", line)
    print(line)
    return ok


def test_criterion_01_basepoint_loop_lemma(record_property):
    res = lemma_suite(5, 3, use_cache=True)
    witnesses = res.details["sharpness_witnesses"]
    found = sorted(int(n) for n, w in witnesses.items() if w)
    ok = res.passed and res.checked > 0
    report(record_property, 1, "low-degree graphs have a basepoint loop (n<=5, s<=3)", ok,
           f"{res.checked} graphs of degree < n/2, {len(res.failures)} violations, "
           f"sharpness witnesses for n in {found}")
    assert ok, res.failures


def test_criterion_02_degree_decrement(record_property):
    res = degree_decrement_suite(4, 3, use_cache=True)
    ok = res.passed and res.checked > 0
    report(record_property, 2, "collapse toward the basepoint lowers degree by one (n<=4, s<=3)", ok,
           f"{res.checked} collapses over {res.details['graphs']} graphs, {len(res.failures)} violations")
    assert ok, res.failures


def test_criterion_03_euler_identity(record_property):
    res = euler_identity_suite(4, 3, use_cache=True)
    ok = res.passed and res.checked > 0
    report(record_property, 3, "n = 2k - E(Gamma_1) on normalized graphs (n<=4)", ok,
           f"{res.checked} normalized graphs, {len(res.failures)} violations")
    assert ok, res.failures


def test_criterion_04_delta_construction(record_property):
    start = time.perf_counter()
    res = delta_suite(50, seed=0, max_check_dim=3)
    elapsed = time.perf_counter() - start
    ok = res.passed and res.checked == 54 and elapsed < 300
    report(record_property, 4, "H_*(Delta(Z); Z) = H_*(Z; Z) through dimension 3", ok,
           f"{res.checked} complexes, {len(res.failures)} mismatches, {elapsed:.1f}s")
    assert ok, res.failures


def test_criterion_05_pattern_quotient(record_property):
    start = time.perf_counter()
    res = pattern_suite(5)
    elapsed = time.perf_counter() - start
    ok = res.passed and res.checked == 4 and elapsed < 300
    report(record_property, 5, "pattern quotient reduced Betti vanish through n-1 (n=2..5)", ok,
           f"{res.details}, {elapsed:.1f}s")
    assert ok, res.failures


BASELINES = [(1, 1, [1]), (2, 0, [1, 0]), (2, 1, None), (3, 0, None), (3, 1, None)]


def test_criterion_06_spine_baselines(record_property):
    start = time.perf_counter()
    rows, ok = [], True
    for n, s, expected in BASELINES:
        sq = spine_quotient(n, s, use_cache=True)
        h = homology_q_summary(sq.complex)
        good = verify_dd_zero(sq.complex) and sq.complex.complete and h.euler_consistent
        if expected is not None:
            good = good and h.betti == expected
        else:
            ab = abelianization(n, s)
            good = good and h.betti[0] == 1 and ab.exact and h.betti[1] == ab.rank
        rows.append(f"({n},{s}) betti={h.betti} chi={h.euler_cells}")
        ok = ok and good
    elapsed = time.perf_counter() - start
    ok = ok and elapsed < 1800
    report(record_property, 6, "quotient spine baselines with Euler and abelianization cross-checks", ok,
           "; ".join(rows) + f"; {elapsed:.1f}s")
    assert ok


def test_criterion_07_group_identities(record_property):
    res = diagram_suite(1000, seed=2024, n_max=4, s_max=4, max_len=8)
    counts = res.details["per_identity"]
    ok = (res.passed and counts["alpha=beta*mu^2"] == 16000 and counts["gamma*mu=id"] == 16000
          and counts["gamma*alpha=beta*mu"] == 4000)
    report(record_property, 7, "alpha = beta mu^2, gamma alpha = beta mu, gamma mu = id", ok,
           f"{counts}, {len(res.failures)} failures")
    assert ok, res.failures


def test_criterion_08_exact_sequence(record_property):
    res = exact_sequence_suite(1000, seed=2024)
    ok = res.passed and res.checked == 12000
    report(record_property, 8, "kernel of forgetting the last thorn is a copy of F_n", ok,
           f"{res.checked} samples, {len(res.failures)} failures")
    assert ok, res.failures


# every map with source rank <= 3 whose target spine fits in memory here; the (3,3)
# spine does not, so alpha from (2,3) and mu from (3,2) are left out.
# alpha (3,1)->(4,1) and beta (3,2)->(4,0) reach rank 4.
STAB_CASES = [
    ("alpha", 1, 1), ("alpha", 1, 2), ("alpha", 1, 3), ("alpha", 2, 1), ("alpha", 2, 2), ("alpha", 3, 1),
    ("mu", 1, 1), ("mu", 1, 2), ("mu", 2, 1), ("mu", 2, 2), ("mu", 3, 1),
    ("beta", 1, 2), ("beta", 1, 3), ("beta", 2, 2), ("beta", 2, 3), ("beta", 3, 2),
]


def test_criterion_09_stabilization_maps(record_property):
    spines: dict = {}
    lines, ok = [], True
    tally = {"in-range": 0, "out-of-range": 0, "vacuous": 0}
    for i in (0, 1):
        for kind, n, s in STAB_CASES:
            rep = stab_map_report(kind, n, s, i, spines=spines, use_cache=True)
            tally[rep.verdict] += 1
            good = rep.consistent and (i > 0 or (rep.iso and rep.source_betti == rep.target_betti == 1))
            ok = ok and good
            lines.append(f"H_{i} {kind} {rep.source}->{rep.target}: {rep.verdict}, range={rep.range}, "
                         f"iso={rep.iso}{'' if good else ' <-- FAIL'}")
    print("\n".join(lines))
    report(record_property, 9, "stabilization maps on H_0 and H_1 agree with the stable ranges", ok,
           f"{len(lines)} maps: {tally}")
    assert ok, lines


DETERMINISM_COMMANDS = [
    ["enumerate", "--rank", "3", "--marks", "2"],
    ["enumerate", "--rank", "2", "--marks", "3", "--degree-max", "2"],
    ["homology", "--rank", "3", "--marks", "1"],
    ["homology", "--rank", "3", "--marks", "0", "--coeff", "z"],
    ["stab-map", "--map", "mu", "--rank", "2", "--marks", "1", "--dim", "1"],
    ["stab-map", "--map", "beta", "--rank", "2", "--marks", "3", "--dim", "0"],
    ["verify", "--suite", "diagrams", "--samples", "200", "--seed", "7"],
    ["verify", "--suite", "exact", "--samples", "200", "--seed", "7"],
    ["verify", "--suite", "lemma", "--n-max", "4"],
    ["verify", "--suite", "pattern"],
    ["delta-check", "--random", "10", "--seed", "3"],
]


def _digest(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out.strip().splitlines()
    return code, json.loads(out[-1])["manifest"]["digest"]


def test_criterion_10_determinism(record_property, capsys):
    mismatches = []
    for argv in DETERMINISM_COMMANDS:
        runs = [_digest(capsys, argv + ["--threads", "1", "--no-cache"]),
                _digest(capsys, argv + ["--threads", "8"]),
                _digest(capsys, argv + ["--threads", "8"])]
        if len({d for _, d in runs}) != 1 or any(code != 0 for code, _ in runs):
            mismatches.append(" ".join(argv))
    ok = not mismatches
    report(record_property, 10, "identical digests with 1 and 8 workers, cache on and off", ok,
           f"{len(DETERMINISM_COMMANDS)} commands x 3 runs, mismatches: {mismatches or 'none'}")
    assert ok, mismatches
