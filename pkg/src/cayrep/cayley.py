"""Cayley representations over D = C_{p^k} x C_p and the recognition and
isomorphism problems they answer.

Elements of the abstract group are pairs (i mod p^k, j mod p) with
componentwise addition; a graph representation is a vertex labeling carrying
the edge set onto {(g, x + g) : g in D, x in X} for a connection set X.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cohcfg import CoherentConfiguration, cc_from_graph
from .dbase import DBase, PipelineTrace, main_dbase
from .errors import MalformedInput, PreconditionViolation
from .perm import Perm, PermutationGroup


DElement = tuple[int, int]


class AbstractGroupD:
    """The group C_{p^k} x C_p with elements (i mod p^k, j mod p)."""

    def __init__(self, p: int, k: int):
        self.p = p
        self.k = k
        self.pk = p ** k
        self.order = p ** (k + 1)

    def elements(self) -> list[DElement]:
        return [(i, j) for i in range(self.pk) for j in range(self.p)]

    def add(self, a: DElement, b: DElement) -> DElement:
        return ((a[0] + b[0]) % self.pk, (a[1] + b[1]) % self.p)

    def neg(self, a: DElement) -> DElement:
        return ((-a[0]) % self.pk, (-a[1]) % self.p)

    def scale(self, m: int, a: DElement) -> DElement:
        return ((m * a[0]) % self.pk, (m * a[1]) % self.p)

    def element_order(self, a: DElement) -> int:
        o = 1
        cur = a
        while cur != (0, 0):
            cur = self.add(cur, a)
            o += 1
        return o

    def generates(self, a: DElement, b: DElement) -> bool:
        span = {(0, 0)}
        frontier = [(0, 0)]
        while frontier:
            x = frontier.pop()
            for g in (a, b):
                y = self.add(x, g)
                if y not in span:
                    span.add(y)
                    frontier.append(y)
        return len(span) == self.order

    def automorphisms(self) -> list[dict[DElement, DElement]]:
        """All automorphisms, enumerated as (image of c, image of b) pairs
        that generate; c = (1, 0), b = (0, 1)."""
        c_images = [e for e in self.elements() if self.element_order(e) == self.pk]
        b_images = [e for e in self.elements()
                    if self.element_order(e) in (1, self.p)]
        out = []
        for ci in c_images:
            for bi in b_images:
                if not self.generates(ci, bi):
                    continue
                table = {}
                for i in range(self.pk):
                    for j in range(self.p):
                        table[(i, j)] = self.add(self.scale(i, ci), self.scale(j, bi))
                if len(set(table.values())) == self.order:
                    out.append(table)
        return out


@dataclass
class CayleyRepresentation:
    """A vertex labeling onto D carrying the graph to a Cayley graph."""
    labeling: list[DElement]          # vertex -> group element
    connection_set: list[DElement]
    source_subgroup: PermutationGroup
    c_generator: Perm
    b_generator: Perm

    def to_json_dict(self) -> dict:
        return {
            "labeling": [list(x) for x in self.labeling],
            "connection_set": [list(x) for x in self.connection_set],
            "generators": {
                "c": self.c_generator.cycle_string(),
                "b": self.b_generator.cycle_string(),
            },
        }


def _normalized_edges(n: int, edges) -> set[tuple[int, int]]:
    out = set()
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise MalformedInput(f"vertex out of range: ({u}, {v})")
        out.add((u, v))
    return out


def representation_from_subgroup(n: int, edges, G: PermutationGroup,
                                 p: int, k: int) -> CayleyRepresentation:
    """Turn a regular subgroup of the graph's automorphism group into an
    explicit Cayley representation: label vertex 0^g by the abstract word of
    g, and read the connection set off the out-neighbors of vertex 0."""
    D = AbstractGroupD(p, k)
    if G.n != n or not G.is_regular() or G.order != D.order:
        raise PreconditionViolation("subgroup is not regular of the right order")
    edge_set = _normalized_edges(n, edges)
    elems = sorted(G.elements())
    g1 = next((g for g in elems if g.order() == D.pk), None)
    if g1 is None:
        raise PreconditionViolation("subgroup has no element of the full cyclic order")
    powers = {g1 ** i for i in range(D.pk)}
    g2 = next((g for g in elems if g.order() == p and g not in powers), None)
    if g2 is None:
        raise PreconditionViolation("subgroup is not of type C_{p^k} x C_p")
    word_of: dict[Perm, DElement] = {}
    for i in range(D.pk):
        for j in range(p):
            word_of[(g1 ** i) * (g2 ** j)] = (i, j)
    if len(word_of) != D.order:
        raise PreconditionViolation("generators fail to factor the subgroup")
    labeling: list[DElement] = [None] * n  # type: ignore[list-item]
    for g, w in word_of.items():
        labeling[g(0)] = w
    connection_set = sorted(labeling[v] for (u, v) in edge_set if u == 0)
    # the labeling must transport the whole edge set onto the Cayley edges
    label_index = {w: v for v, w in enumerate(labeling)}
    for x in connection_set:
        for g in D.elements():
            if (label_index[g], label_index[D.add(x, g)]) not in edge_set:
                raise AssertionError("labeling does not transport the edge set")
    if len(edge_set) != len(connection_set) * D.order:
        raise AssertionError("edge count does not match the connection set")
    return CayleyRepresentation(labeling, connection_set, G, g1, g2)


def cayley_isomorphic(X1: Sequence[DElement], X2: Sequence[DElement],
                      p: int, k: int) -> bool:
    """Whether some automorphism of D maps X1 onto X2."""
    D = AbstractGroupD(p, k)
    s1 = {(i % D.pk, j % D.p) for i, j in X1}
    s2 = {(i % D.pk, j % D.p) for i, j in X2}
    if len(s1) != len(s2):
        return False
    for table in D.automorphisms():
        if {table[x] for x in s1} == s2:
            return True
    return False


def crg(n: int, edges, p: int, k: int, seed: int = 0,
        trace: PipelineTrace | None = None) -> list[CayleyRepresentation]:
    """The full set of pairwise non-equivalent Cayley representations of the
    graph over D: one per conjugacy class of regular subgroups."""
    if n != p ** (k + 1):
        raise MalformedInput(f"vertex count {n} is not {p}^{k + 1}")
    X = cc_from_graph(n, _normalized_edges(n, edges))
    base = main_dbase(X, p, k, seed=seed, trace=trace)
    return [representation_from_subgroup(n, edges, G, p, k)
            for G in base.subgroups]


def cgrec(n: int, edges, p: int, k: int, seed: int = 0) -> bool:
    """Whether the graph is isomorphic to a Cayley graph over D."""
    return bool(crg(n, edges, p, k, seed=seed))


def cgi(connection_set: Sequence[DElement], n: int, edges, p: int, k: int,
        seed: int = 0) -> bool:
    """Whether the Cayley graph of the given connection set over D is
    isomorphic to the given graph."""
    if n != p ** (k + 1):
        raise MalformedInput(f"vertex count {n} is not {p}^{k + 1}")
    D = AbstractGroupD(p, k)
    conn = [( i % D.pk, j % D.p) for i, j in connection_set]
    if (0, 0) in conn:
        raise MalformedInput("connection set contains the identity")
    reps = crg(n, edges, p, k, seed=seed)
    return any(cayley_isomorphic(r.connection_set, conn, p, k) for r in reps)
