"""Verification suites shared by the command line and the test suite.

Each suite returns a :class:`SuiteResult` holding per-check records and
the first failures found (minimal witnesses).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from .complexes import (
    SimplicialComplex,
    boundary_of_simplex,
    delta_homology_check,
    pattern_quotient,
    random_complex,
    rp2,
)
from .enumeration import EnumerationQuery, enumerate_graphs, verify_basepoint_loop_lemma
from .freegroup import FreeAutomorphism, inversion, mul, random_word
from .gamma import (
    GammaElement,
    OuterClass,
    alpha,
    beta,
    forget_last,
    gamma_fill,
    kernel_element,
    kernel_project,
    mu,
    random_element,
)
from .graphs import (
    NotApplicableError,
    collapse,
    degree,
    proof_identity_check,
)
from .homology import betti_q, reduced_betti


@dataclass
class SuiteResult:
    suite: str
    checked: int = 0
    failures: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def fail(self, record: dict, keep: int = 20) -> None:
        if len(self.failures) < keep:
            self.failures.append(record)
        else:
            self.details["dropped_failures"] = self.details.get("dropped_failures", 0) + 1

    def to_json(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "checked": self.checked,
                "failures": self.failures, "details": self.details}


def lemma_suite(n_max: int = 5, s_max: int = 3, workers: int = 1, use_cache: bool = False) -> SuiteResult:
    rep = verify_basepoint_loop_lemma(n_max, s_max, workers=workers, use_cache=use_cache)
    out = SuiteResult("lemma", sum(rep.checked.values()), list(rep.violations))
    out.details = {"per_rank_marks": rep.checked,
                   "sharpness_witnesses": {str(k): v for k, v in sorted(rep.witnesses.items())}}
    return out


def degree_decrement_suite(n_max: int = 4, s_max: int = 3, workers: int = 1,
                           use_cache: bool = False) -> SuiteResult:
    """Collapsing an edge from the basepoint to an unmarked trivalent vertex lowers degree by 1."""
    out = SuiteResult("degree-decrement")
    graphs_seen = 0
    for n in range(1, n_max + 1):
        for s in range(1, s_max + 1):
            for cg in enumerate_graphs(EnumerationQuery(n, s), workers=workers, use_cache=use_cache):
                g = cg.graph
                graphs_seen += 1
                k = degree(g)
                b = g.basepoint
                unmarked = set(range(g.vertex_count)) - set(g.marks) - {b}
                for e, (u, v) in enumerate(g.edges):
                    other = v if u == b else u if v == b else None
                    if other is None or other == b or other not in unmarked:
                        continue
                    if g.total_valence(other) != 3:
                        continue
                    out.checked += 1
                    k2 = degree(collapse(g, [e]))
                    if k2 != k - 1:
                        out.fail({"graph": cg.hex, "edge": e, "degree": k, "after": k2})
    out.details["graphs"] = graphs_seen
    return out


def euler_identity_suite(n_max: int = 4, s_max: int = 3, workers: int = 1,
                         use_cache: bool = False) -> SuiteResult:
    out = SuiteResult("euler-identity")
    skipped = 0
    for n in range(1, n_max + 1):
        for s in range(1, s_max + 1):
            for cg in enumerate_graphs(EnumerationQuery(n, s), workers=workers, use_cache=use_cache):
                try:
                    ok = proof_identity_check(cg.graph)
                except NotApplicableError:
                    skipped += 1
                    continue
                out.checked += 1
                if not ok:
                    out.fail({"graph": cg.hex, "n": n, "s": s})
    out.details["not_normalized"] = skipped
    return out


# -- group-model identities ---------------------------------------------------------

def _twist(n: int, rng: random.Random, max_len: int) -> FreeAutomorphism:
    return FreeAutomorphism.conjugation(n, random_word(n, rng.randint(1, max_len), rng))


def diagram_suite(samples: int = 1000, seed: int = 0, n_max: int = 4, s_max: int = 4,
                  max_len: int = 8) -> SuiteResult:
    """alpha = beta mu^2, gamma alpha = beta mu (s = 1), gamma mu = id."""
    out = SuiteResult("diagrams")
    counts = {"alpha=beta*mu^2": 0, "gamma*alpha=beta*mu": 0, "gamma*mu=id": 0,
              "non-inner twist detected": 0}
    for n in range(1, n_max + 1):
        for s in range(1, s_max + 1):
            rng = random.Random(f"{seed}:{n}:{s}")
            for t in range(samples):
                g = random_element(n, s, max_len, rng)
                lhs, rhs = alpha(g), beta(mu(mu(g)))
                out.checked += 1
                counts["alpha=beta*mu^2"] += 1
                if lhs != rhs:
                    out.fail({"identity": "alpha=beta*mu^2", "n": n, "s": s, "g": g.to_json()})
                out.checked += 1
                counts["gamma*mu=id"] += 1
                if gamma_fill(mu(g)) != g:
                    out.fail({"identity": "gamma*mu=id", "n": n, "s": s, "g": g.to_json()})
                if s != 1:
                    continue
                # compare outer classes through a random inner twist so that equality
                # has to be decided by the innerness test rather than by identical words
                a = gamma_fill(alpha(g))
                b = beta(mu(g))
                assert isinstance(a, OuterClass) and isinstance(b, OuterClass)
                twisted = OuterClass(b.representative @ _twist(n + 1, rng, max_len))
                out.checked += 1
                counts["gamma*alpha=beta*mu"] += 1
                if a != twisted:
                    out.fail({"identity": "gamma*alpha=beta*mu", "n": n, "g": g.to_json()})
                # negative control: an inversion is never inner
                bad = OuterClass(b.representative @ inversion(n + 1, rng.randint(1, n + 1)))
                out.checked += 1
                counts["non-inner twist detected"] += 1
                if a == bad:
                    out.fail({"identity": "inversion twist must differ", "n": n, "g": g.to_json()})
    out.details["per_identity"] = counts
    return out


def exact_sequence_suite(samples: int = 1000, seed: int = 0, n_max: int = 4, s_max: int = 4,
                         max_len: int = 8) -> SuiteResult:
    """Kernel of forgetting the last thorn is {(id, 1, ..., 1, w)}, a copy of F_n."""
    out = SuiteResult("exact-sequence")
    for n in range(1, n_max + 1):
        for s in range(2, s_max + 1):
            rng = random.Random(f"{seed}:{n}:{s}")
            for _ in range(samples):
                g = random_element(n, s, max_len, rng)
                h = random_element(n, s, max_len, rng)
                w = random_word(n, rng.randint(0, max_len), rng)
                u = random_word(n, rng.randint(0, max_len), rng)
                out.checked += 1
                record = {"n": n, "s": s, "g": g.to_json(), "w": list(w), "u": list(u)}
                # forget_last is a homomorphism
                if forget_last(g * h) != forget_last(g) * forget_last(h):
                    out.fail({**record, "check": "forget is a homomorphism"})
                # kernel elements have the stated shape and multiply like F_n (reversed order)
                kw, ku = kernel_element(n, s, w), kernel_element(n, s, u)
                if kernel_project(kw) != w:
                    out.fail({**record, "check": "kernel element projects to its word"})
                if kw * ku != kernel_element(n, s, mul(u, w)):
                    out.fail({**record, "check": "kernel product rule"})
                # a lift of the same image differs by a kernel element
                lift = GammaElement(n, s, g.phi, g.thorns[:-1] + (w,))
                diff = g.inverse() * lift
                if forget_last(diff).is_identity() is False or kernel_project(diff) is None:
                    out.fail({**record, "check": "same image implies kernel difference"})
                elif not (diff.phi.is_identity() and all(x == () for x in diff.thorns[:-1])):
                    out.fail({**record, "check": "kernel element shape"})
                # elements with nontrivial image are not in the kernel
                if not forget_last(g).is_identity() and kernel_project(g) is not None:
                    out.fail({**record, "check": "non-kernel element projected"})
                # normality
                if kernel_project(g * kw * g.inverse()) is None:
                    out.fail({**record, "check": "kernel is normal"})
    return out


# -- complexes ---------------------------------------------------------------------------

def delta_corpus(count: int = 50, seed: int = 0, max_vertices: int = 8) -> list[tuple[str, SimplicialComplex]]:
    rng = random.Random(seed)
    corpus = [(f"random-{i}", random_complex(rng, max_vertices)) for i in range(count)]
    corpus += [("boundary-triangle", boundary_of_simplex(2)),
               ("boundary-tetrahedron", boundary_of_simplex(3)),
               ("projective-plane", rp2()),
               ("two-points", SimplicialComplex.from_facets([(0,), (1,)]))]
    return corpus


def delta_suite(count: int = 50, seed: int = 0, max_check_dim: int = 3) -> SuiteResult:
    out = SuiteResult("delta")
    for name, z in delta_corpus(count, seed):
        rep = delta_homology_check(z, max_check_dim)
        out.checked += 1
        if not rep.equal:
            out.fail({"complex": name, **z.to_json(), **rep.to_json()})
    return out


def pattern_suite(n_max: int = 5) -> SuiteResult:
    """Reduced rational Betti numbers of the pattern quotient vanish through n - 1."""
    out = SuiteResult("pattern")
    for n in range(2, n_max + 1):
        betti = betti_q(pattern_quotient(n, n))
        red = reduced_betti(betti)[:n]
        out.checked += 1
        out.details[str(n)] = red
        if any(red):
            out.fail({"n": n, "reduced_betti": red})
    return out
