import itertools
import random

import pytest

from cayrep.cayley import (
    AbstractGroupD,
    cayley_isomorphic,
    cgi,
    cgrec,
    crg,
    representation_from_subgroup,
)
from cayrep.cohcfg import cc_from_graph
from cayrep.dbase import main_dbase
from cayrep.errors import MalformedInput, PreconditionViolation
from cayrep.perm import Perm, schreier_sims

import instances as inst
from oracle import brute_isomorphic


def klein_regular():
    return schreier_sims([Perm.from_cycles(4, [(0, 1), (2, 3)]),
                          Perm.from_cycles(4, [(0, 2), (1, 3)])])


def translations_over_d(p, k):
    """The regular right-translation action of C_{p^k} x C_p on itself,
    under the vertex numbering of instances.d_index."""
    pk = p ** k
    n = pk * p
    c = Perm([inst.d_index(i + 1, j, p, k) for i in range(pk) for j in range(p)])
    b = Perm([inst.d_index(i, j + 1, p, k) for i in range(pk) for j in range(p)])
    return schreier_sims([c, b])


class TestAbstractGroupD:
    def test_orders(self):
        D = AbstractGroupD(2, 2)
        assert D.element_order((1, 0)) == 4
        assert D.element_order((0, 1)) == 2
        assert D.element_order((2, 1)) == 2
        assert D.element_order((0, 0)) == 1

    def test_automorphism_counts(self):
        assert len(AbstractGroupD(2, 1).automorphisms()) == 6    # GL(2,2)
        assert len(AbstractGroupD(3, 1).automorphisms()) == 48   # GL(2,3)
        assert len(AbstractGroupD(2, 2).automorphisms()) == 8

    def test_automorphisms_match_bijection_filter(self):
        # against filtering all bijections fixing the group structure
        for p, k in ((2, 1), (2, 2), (3, 1)):
            D = AbstractGroupD(p, k)
            elems = D.elements()
            idx = {e: i for i, e in enumerate(elems)}
            auts = set()
            for images in itertools.permutations(range(len(elems))):
                if images[idx[(0, 0)]] != idx[(0, 0)]:
                    continue
                ok = all(
                    images[idx[D.add(a, b)]] ==
                    idx[D.add(elems[images[idx[a]]], elems[images[idx[b]]])]
                    for a in elems for b in elems)
                if ok:
                    auts.add(images)
            mine = {tuple(idx[t[e]] for e in elems)
                    for t in D.automorphisms()}
            assert mine == auts

    def test_automorphisms_form_group_at_16(self):
        D = AbstractGroupD(2, 3)
        tables = D.automorphisms()
        keys = {tuple(sorted(t.items())) for t in tables}
        assert len(keys) == len(tables)
        for t in tables:
            assert all(t[D.add(a, b)] == D.add(t[a], t[b])
                       for a in D.elements() for b in D.elements())
        for t1 in tables[:5]:
            for t2 in tables[:5]:
                comp = {e: t2[t1[e]] for e in D.elements()}
                assert tuple(sorted(comp.items())) in keys


class TestRepresentationFromSubgroup:
    def test_complete_graph(self):
        rep = representation_from_subgroup(4, inst.complete_graph(4),
                                           klein_regular(), 2, 1)
        assert sorted(rep.connection_set) == [(0, 1), (1, 0), (1, 1)]

    def test_edgeless(self):
        rep = representation_from_subgroup(4, [], klein_regular(), 2, 1)
        assert rep.connection_set == []

    def test_cube_as_cayley_graph(self):
        conn = [(1, 0), (3, 0), (0, 1)]
        edges = inst.cayley_graph_over_d(2, 2, conn)
        G = translations_over_d(2, 2)
        rep = representation_from_subgroup(8, edges, G, 2, 2)
        assert len(rep.connection_set) == 3
        assert cayley_isomorphic(rep.connection_set, conn, 2, 2)

    def test_labeling_transports_edges(self):
        rng = random.Random(31)
        for _ in range(5):
            conn = inst.random_connection_set(2, 2, rng)
            if not conn:
                continue
            edges = inst.cayley_graph_over_d(2, 2, conn)
            rep = representation_from_subgroup(8, edges, translations_over_d(2, 2),
                                               2, 2)
            D = AbstractGroupD(2, 2)
            index_of = {w: v for v, w in enumerate(rep.labeling)}
            transported = {(index_of[g], index_of[D.add(x, g)])
                           for g in D.elements() for x in rep.connection_set}
            assert transported == set(edges)

    def test_wrong_subgroup_raises(self):
        with pytest.raises(PreconditionViolation):
            representation_from_subgroup(8, [], schreier_sims(
                [Perm.from_cycles(8, [tuple(range(8))])]), 2, 2)


class TestCayleyIsomorphic:
    def test_identity(self):
        assert cayley_isomorphic([(1, 0), (0, 1)], [(1, 0), (0, 1)], 2, 2)

    def test_order_mismatch(self):
        assert not cayley_isomorphic([(1, 0)], [(0, 1)], 2, 2)

    def test_spec_pair_resolved_by_scan(self):
        x1 = [(1, 0), (3, 0), (0, 1)]
        x2 = [(1, 1), (3, 1), (0, 1)]
        # oracle: sigma(c) = (1,1), sigma(b) = (0,1) is an automorphism
        # mapping x1 onto x2
        assert cayley_isomorphic(x1, x2, 2, 2)

    def test_matches_graph_isomorphism(self):
        rng = random.Random(37)
        for _ in range(6):
            c1 = inst.random_connection_set(2, 2, rng)
            c2 = inst.random_connection_set(2, 2, rng)
            if not c1 or not c2:
                continue
            e1 = inst.cayley_graph_over_d(2, 2, c1)
            e2 = inst.cayley_graph_over_d(2, 2, c2)
            if cayley_isomorphic(c1, c2, 2, 2):
                assert brute_isomorphic(8, e1, e2)


class TestProblems:
    def test_cgrec_k4(self):
        assert cgrec(4, inst.complete_graph(4), 2, 1)

    def test_cgrec_8_cycle_false(self):
        assert not cgrec(8, inst.cycle_graph(8), 2, 2)

    def test_cgi_cube(self):
        conn = [(1, 0), (3, 0), (0, 1)]
        assert cgi(conn, 8, inst.cube_q3(), 2, 2)
        assert not cgi(conn, 8, inst.cycle_graph(8), 2, 2)
        # agreement with the brute-force isomorphism oracle
        cay = inst.cayley_graph_over_d(2, 2, conn)
        assert brute_isomorphic(8, cay, inst.cube_q3())
        assert not brute_isomorphic(8, cay, inst.cycle_graph(8))

    def test_crg_representations_are_nonequivalent(self):
        edges = inst.cayley_graph_over_d(2, 2, [(0, 1)])
        reps = crg(8, edges, 2, 2)
        assert reps
        for i, r1 in enumerate(reps):
            for r2 in reps[i + 1:]:
                assert not cayley_isomorphic(r1.connection_set,
                                             r2.connection_set, 2, 2)

    def test_crg_count_matches_dbase(self):
        edges = inst.cube_q3()
        X = cc_from_graph(8, edges)
        assert len(crg(8, edges, 2, 2)) == len(main_dbase(X, 2, 2).subgroups)

    def test_cgi_agrees_with_brute_on_random_cayley(self):
        rng = random.Random(41)
        for _ in range(4):
            conn = inst.random_connection_set(2, 2, rng)
            if not conn:
                continue
            cay = inst.cayley_graph_over_d(2, 2, conn)
            other = inst.random_directed_graph(8, rng)
            assert cgi(conn, 8, other, 2, 2) == brute_isomorphic(8, cay, other)

    def test_size_mismatch(self):
        with pytest.raises(MalformedInput):
            cgrec(6, inst.cycle_graph(6), 2, 2)

    def test_json_shape(self):
        reps = crg(4, inst.complete_graph(4), 2, 1)
        d = reps[0].to_json_dict()
        assert set(d) == {"labeling", "connection_set", "generators"}
        assert set(d["generators"]) == {"c", "b"}
