"""Acceptance suite: every criterion below prints one PASS/FAIL line.

Criterion 5 asserts the literal per-iteration progress property (rank strictly
up AND the count of rank-2 composite-degree sections strictly down).  The
count half is violated by the mathematics on complete graphs, where resolving
the full section creates one new coarser singular pair (1 -> 1 -> 0); the
test states the property as specified and is expected to fail there.
"""

import json
import random
import sys
import time

import pytest

from cayrep.cayley import cayley_isomorphic, cgi, cgrec, crg
from cayrep.cli import build_dbase_report
from cayrep.cohcfg import aut_brute, cc_from_graph, is_automorphism, wl_extension
from cayrep.dbase import (
    AutMembership,
    PipelineTrace,
    _are_conjugate_in_ambient,
    dbase_size_bound,
    is_d_isomorphic,
    main_dbase,
    pdbase,
)
from cayrep.errors import BudgetExceeded
from cayrep.perm import Perm, schreier_sims, sylow_p_subgroup

import instances as inst
from oracle import (
    DEFAULT_BUDGET,
    assert_dbase_matches,
    brute_aut,
    brute_isomorphic,
)


def report_line(num: int, ok: bool, text: str) -> None:
    print(f"ACCEPTANCE {num:02d} {'PASS' if ok else 'FAIL'}: {text}",
          file=sys.__stdout__, flush=True)


def cyc(n, *cycles):
    return Perm.from_cycles(n, cycles)


SIZES = [(4, 2, 1), (8, 2, 2), (9, 3, 1)]
RANDOM_GRAPHS_PER_SIZE = 200


def named_instances(n):
    out = {
        "complete": inst.complete_graph(n),
        "edgeless": inst.edgeless_graph(n),
    }
    if n == 4:
        out["wreath-chain"] = inst.cayley_graph_over_d(2, 1, [(0, 1)])
    if n == 8:
        out["cycle"] = inst.cycle_graph(8)
        out["cube"] = inst.cube_q3()
        out["wreath-chain"] = inst.cayley_graph_over_d(2, 2, [(0, 1)])
    if n == 9:
        out["paley"] = inst.paley9_edges()
        out["wreath-chain"] = inst.cayley_graph_over_d(3, 1, [(0, 1), (0, 2)])
    return out


def criterion1_corpus():
    corpus = []
    for n, p, k in SIZES:
        for i in range(RANDOM_GRAPHS_PER_SIZE):
            rng = random.Random(1_000_000 * n + i)
            corpus.append((f"random-{n}-{i}", n, p, k,
                           inst.random_directed_graph(n, rng)))
        for name, edges in named_instances(n).items():
            corpus.append((f"{name}-{n}", n, p, k, edges))
    return corpus


@pytest.fixture(scope="module")
def corpus_runs():
    """main_dbase over the criterion-1 corpus; shared by criteria 1, 3, 5, 9."""
    runs = []
    for name, n, p, k, edges in criterion1_corpus():
        X = cc_from_graph(n, edges)
        trace = PipelineTrace()
        out = main_dbase(X, p, k, seed=0, trace=trace)
        runs.append({"name": name, "n": n, "p": p, "k": k, "edges": edges,
                     "out": out, "trace": trace})
    return runs


@pytest.fixture(scope="module")
def n27_runs():
    """Criterion-2 corpus: 30 random Cayley graphs over C_3 x C_9 plus 10
    provably non-Cayley graphs on 27 vertices."""
    cayley = []
    for i in range(30):
        rng = random.Random(27_000 + i)
        conn = inst.random_connection_set(3, 2, rng) or [(1, 0)]
        edges = inst.cayley_graph_over_d(3, 2, conn)
        X = cc_from_graph(27, edges)
        trace = PipelineTrace()
        out = main_dbase(X, 3, 2, seed=0, trace=trace)
        cayley.append({"conn": conn, "edges": edges, "X": X, "out": out,
                       "trace": trace})
    non_cayley = []
    for i in range(9):
        rng = random.Random(54_000 + i)
        edges = {(u, v) for u, v in inst.random_directed_graph(27, rng)
                 if u not in (0, 1)}
        edges |= {(0, v) for v in range(1, 27)}  # out-degree 26 at vertex 0
        non_cayley.append((f"degree-skew-{i}", sorted(edges)))
    non_cayley.append(("cycle-27", inst.cycle_graph(27)))
    return cayley, non_cayley


class TestCriterion1:
    def test_oracle_equivalence_small_scale(self, corpus_runs):
        t0 = time.perf_counter()
        ok = True
        try:
            for run in corpus_runs:
                assert_dbase_matches(run["out"].subgroups, brute_aut(
                    run["n"], run["edges"]), run["n"], run["p"], run["k"])
        except AssertionError:
            ok = False
            raise
        finally:
            report_line(1, ok, "main_dbase matches brute force on "
                        f"{len(corpus_runs)} graphs at n=4,8,9 "
                        f"({time.perf_counter() - t0:.0f}s oracle time)")


class TestCriterion2:
    def test_n27_spot_suite(self, n27_runs):
        cayley, non_cayley = n27_runs
        ok = True
        try:
            trans_gens = [
                Perm([inst.d_index(i + 1, j, 3, 2) for i in range(9) for j in range(3)]),
                Perm([inst.d_index(i, j + 1, 3, 2) for i in range(9) for j in range(3)]),
            ]
            translations = schreier_sims(trans_gens)
            for run in cayley:
                subs = run["out"].subgroups
                assert subs, "Cayley input must admit a representation"
                amb = AutMembership(run["X"])
                for G in subs:
                    assert G.is_regular()
                    assert is_d_isomorphic(G, 3, 2)
                    assert all(is_automorphism(g, run["X"]) for g in G.generators)
                for i, G in enumerate(subs):
                    for H in subs[i + 1:]:
                        assert not _are_conjugate_in_ambient(
                            G, H, amb, 3, 2, run["X"].color)
                # the translation subgroup must be covered by some class
                assert any(_are_conjugate_in_ambient(
                    translations, G, amb, 3, 2, run["X"].color) for G in subs)
                # maximality by brute force only when the oracle budget allows
                # (never at n = 27: full Aut enumeration needs degree <= 10)
                with pytest.raises(BudgetExceeded):
                    brute_aut(27, run["edges"])
            for name, edges in non_cayley:
                assert not cgrec(27, edges, 3, 2), name
        except AssertionError:
            ok = False
            raise
        finally:
            report_line(2, ok, "n=27 spot suite: 30 Cayley + 10 non-Cayley inputs")


class TestCriterion3:
    def test_size_bound(self, corpus_runs, n27_runs):
        ok = True
        try:
            assert dbase_size_bound(2, 8) == 2048
            for run in corpus_runs:
                assert len(run["out"].subgroups) <= dbase_size_bound(
                    run["p"], run["n"])
            for run in n27_runs[0]:
                assert len(run["out"].subgroups) <= dbase_size_bound(3, 27)
        except AssertionError:
            ok = False
            raise
        finally:
            report_line(3, ok, "D-base size bound (p-1)^2 p!/p^p n^(p+2) on every run")


class TestCriterion4:
    def test_wl_extension_aut_property(self):
        ok = True
        t0 = time.perf_counter()
        try:
            count = 0
            i = 0
            while count < 50:
                rng = random.Random(4_000 + i)
                i += 1
                n = rng.randrange(4, 9)
                edges = inst.random_directed_graph(n, rng)
                X = cc_from_graph(n, edges)
                t = sorted((a, b) for a in range(n) for b in range(n)
                           if rng.random() < 0.3)
                Y = wl_extension(X, [t])
                tset = set(t)
                expected = {f for f in aut_brute(X).elements()
                            if {(f(a), f(b)) for a, b in tset} == tset}
                assert set(aut_brute(Y).elements()) == expected
                count += 1
        except AssertionError:
            ok = False
            raise
        finally:
            report_line(4, ok, "Aut(WL(X,T)) equals the T-stabilizer in Aut(X) "
                        f"on 50 pairs ({time.perf_counter() - t0:.0f}s)")


class TestCriterion5:
    def test_resolution_progress(self, corpus_runs, n27_runs):
        """Rank must strictly increase and the count of rank-2 composite
        sections strictly decrease on every singular iteration, as specified.

        The count half fails on complete graphs: resolving the unique full
        singular section creates one new coarser singular pair, so the count
        goes 1 -> 1 before reaching 0.  Recorded in the decisions ledger.
        """
        ok = True
        violations = []
        try:
            iterations = 0
            for run in list(corpus_runs) + n27_runs[0]:
                for it in run["trace"].iterations:
                    iterations += 1
                    if it["rank_after"] <= it["rank_before"]:
                        violations.append((run.get("name", "n27"), "rank", it))
                    if it["singular_sections_after"] >= it["singular_sections_before"]:
                        violations.append((run.get("name", "n27"), "count", it))
            assert not violations, (
                f"{len(violations)} progress violations over {iterations} "
                f"iterations, e.g. {violations[0]}")
        except AssertionError:
            ok = False
            raise
        finally:
            report_line(5, ok, "strict rank increase and singular-section count "
                        "decrease per resolution iteration")


class TestCriterion6:
    def test_pdbase_standalone(self):
        ok = True
        t0 = time.perf_counter()
        try:
            sym8 = schreier_sims([cyc(8, (0, 1)), cyc(8, tuple(range(8)))])
            sym9 = schreier_sims([cyc(9, (0, 1)), cyc(9, tuple(range(9)))])
            cases = {
                "sylow2-sym8": (sylow_p_subgroup(sym8, 2), 2, 2),
                "wreath-c2-tower": (schreier_sims([
                    cyc(8, (0, 1)), cyc(8, (0, 2), (1, 3)),
                    cyc(8, (0, 4), (1, 5), (2, 6), (3, 7))]), 2, 2),
                "sylow3-sym9": (sylow_p_subgroup(sym9, 3), 3, 1),
                "regular-c2xc4": (schreier_sims([
                    cyc(8, (0, 2, 4, 6), (1, 3, 5, 7)),
                    cyc(8, (0, 1), (2, 3), (4, 5), (6, 7))]), 2, 2),
                "cyclic-c8": (schreier_sims([cyc(8, tuple(range(8)))]), 2, 2),
            }
            for name, (P, p, k) in cases.items():
                out = pdbase(P, p, k)
                assert_dbase_matches(out.subgroups, P.generators, P.n, p, k)
        except AssertionError:
            ok = False
            raise
        finally:
            report_line(6, ok, "pdbase matches brute force on five named p-groups "
                        f"({time.perf_counter() - t0:.0f}s)")


class TestCriterion7:
    def test_paley_pathway(self):
        ok = True
        try:
            edges = inst.paley9_edges()
            X = cc_from_graph(9, edges)
            out = main_dbase(X, 3, 1)
            assert len(out.subgroups) == 1
            auts = brute_aut(9, edges)
            assert len(auts) == 72
            assert_dbase_matches(out.subgroups, auts, 9, 3, 1)
        except AssertionError:
            ok = False
            raise
        finally:
            report_line(7, ok, "Paley(9): one class, automorphism group of order 72")


class TestCriterion8:
    def test_cgi_end_to_end(self):
        ok = True
        try:
            conn = [(1, 0), (3, 0), (0, 1)]
            assert cgi(conn, 8, inst.cube_q3(), 2, 2) is True
            assert cgi(conn, 8, inst.cycle_graph(8), 2, 2) is False
            cay = inst.cayley_graph_over_d(2, 2, conn)
            assert brute_isomorphic(8, cay, inst.cube_q3()) is True
            assert brute_isomorphic(8, cay, inst.cycle_graph(8)) is False
        except AssertionError:
            ok = False
            raise
        finally:
            report_line(8, ok, "CGI on the cube and the 8-cycle agrees with "
                        "the brute-force isomorphism oracle")


class TestCriterion9:
    def test_byte_identical_reports(self, corpus_runs):
        ok = True
        t0 = time.perf_counter()
        try:
            for run in corpus_runs:
                a = json.dumps(build_dbase_report(
                    run["n"], run["edges"], run["p"], run["k"], seed=0),
                    sort_keys=True, separators=(",", ":"))
                b = json.dumps(build_dbase_report(
                    run["n"], run["edges"], run["p"], run["k"], seed=0),
                    sort_keys=True, separators=(",", ":"))
                assert a == b, run["name"]
        except AssertionError:
            ok = False
            raise
        finally:
            report_line(9, ok, "byte-identical JSON reports across reruns of the "
                        f"criterion-1 corpus ({time.perf_counter() - t0:.0f}s)")


class TestCriterion10:
    def test_n81_within_ten_minutes(self):
        ok = True
        timings = []
        try:
            inputs = []
            for i in range(2):
                rng = random.Random(81_000 + i)
                conn = inst.random_connection_set(3, 3, rng) or [(1, 0)]
                inputs.append((f"random-81-{i}", conn))
            inputs.append(("triangles-81", [(0, 1), (0, 2)]))
            for name, conn in inputs:
                edges = inst.cayley_graph_over_d(3, 3, conn)
                t0 = time.perf_counter()
                X = cc_from_graph(81, edges)
                out = main_dbase(X, 3, 3, seed=0)
                dt = time.perf_counter() - t0
                timings.append((name, dt, len(out.subgroups)))
                assert out.subgroups, f"{name}: Cayley input must be recognized"
                assert dt < 600, f"{name}: {dt:.0f}s exceeds the 10 minute target"
        except AssertionError:
            ok = False
            raise
        finally:
            detail = ", ".join(f"{nm}={dt:.0f}s" for nm, dt, _ in timings)
            report_line(10, ok, f"n=81 Cayley inputs within 10 minutes each ({detail})")
