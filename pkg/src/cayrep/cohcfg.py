"""Coherent configurations: Weisfeiler-Leman closure, the equivalence
lattice of a feasible scheme, sections, and small automorphism groups.

A configuration is stored as an n x n matrix of color indices partitioning
the pair set.  Color numbering is canonical: diagonal colors first, then
off-diagonal colors sorted by (source fiber, target fiber, refinement
signature, first occurrence), so equal inputs give identical colorings.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import FeasibilityViolation, MalformedInput
from .perm import Perm, PermutationGroup, schreier_sims

PairSet = Iterable[tuple[int, int]]


# -- refinement core --------------------------------------------------------


def _refine_to_stability(color: np.ndarray) -> np.ndarray:
    """Iterate the pair refinement until the coloring is stable.

    The signature of (a, b) is its color together with the multiset of
    (color(a, c), color(c, b)) over all c; colors are renumbered by sorted
    signature every round, which keeps the numbering canonical.
    """
    n = color.shape[0]
    while True:
        r = int(color.max()) + 1
        sig_ids = np.empty((n, n), dtype=np.int64)
        table: dict[bytes, int] = {}
        for a in range(n):
            paths = color[a, :, None] * r + color  # [c, b] -> code of (a,c),(c,b)
            paths.sort(axis=0)
            cols = np.ascontiguousarray(paths.T)
            for b in range(n):
                key = color[a, b].tobytes() + cols[b].tobytes()
                sig_ids[a, b] = table.setdefault(key, len(table))
        if len(table) == r:
            return color
        # renumber by signature id; signature ids are assigned in scan order,
        # so the result is deterministic
        color = sig_ids


def _canonicalize(color: np.ndarray) -> np.ndarray:
    """Renumber a stable coloring: diagonal colors first (by fiber order),
    then off-diagonal colors by (source fiber, target fiber, first occurrence).
    """
    n = color.shape[0]
    diag = color.diagonal()
    fiber_of = np.empty(n, dtype=np.int64)
    fiber_order: dict[int, int] = {}
    for a in range(n):
        fiber_order.setdefault(int(diag[a]), len(fiber_order))
        fiber_of[a] = fiber_order[int(diag[a])]
    entries = {}
    for a in range(n):
        for b in range(n):
            c = int(color[a, b])
            if c not in entries:
                entries[c] = (0 if a == b else 1, int(fiber_of[a]),
                              int(fiber_of[b]), len(entries))
    order = sorted(entries, key=lambda c: entries[c])
    remap = np.empty(int(color.max()) + 1, dtype=np.int64)
    for new, old in enumerate(order):
        remap[old] = new
    return remap[color]


def _first_occurrence_renumber(color: np.ndarray) -> np.ndarray:
    remap: dict[int, int] = {}
    n = color.shape[0]
    out = np.empty_like(color)
    for a in range(n):
        for b in range(n):
            c = int(color[a, b])
            if c not in remap:
                remap[c] = len(remap)
            out[a, b] = remap[c]
    return out


class CoherentConfiguration:
    """A coherent configuration on n points given by its color matrix."""

    def __init__(self, color: np.ndarray):
        color = np.asarray(color, dtype=np.int64)
        if color.ndim != 2 or color.shape[0] != color.shape[1]:
            raise MalformedInput("color matrix must be square")
        self.color = color
        self.color.setflags(write=False)
        self.n = color.shape[0]
        self.rank = int(color.max()) + 1
        self._fibers: list[tuple[int, ...]] | None = None
        self._valency: dict[int, int] | None = None
        self._indicator: list[np.ndarray] | None = None

    # -- structure ---------------------------------------------------

    @property
    def fibers(self) -> list[tuple[int, ...]]:
        if self._fibers is None:
            byc: dict[int, list[int]] = {}
            diag = self.color.diagonal()
            for a in range(self.n):
                byc.setdefault(int(diag[a]), []).append(a)
            self._fibers = sorted(tuple(v) for v in byc.values())
        return self._fibers

    def is_homogeneous(self) -> bool:
        return len(self.fibers) == 1

    @property
    def valency(self) -> dict[int, int]:
        if self._valency is None:
            self._valency = {}
            for c in range(self.rank):
                rows = np.where((self.color == c).any(axis=1))[0]
                self._valency[c] = int((self.color[rows[0]] == c).sum())
        return self._valency

    def indicator(self, c: int) -> np.ndarray:
        if self._indicator is None:
            self._indicator = [None] * self.rank
        if self._indicator[c] is None:
            self._indicator[c] = self.color == c
        return self._indicator[c]

    def color_transpose(self, c: int) -> int:
        a, b = np.argwhere(self.color == c)[0]
        return int(self.color[b, a])

    def pairs_of_color(self, c: int) -> list[tuple[int, int]]:
        return [(int(a), int(b)) for a, b in np.argwhere(self.color == c)]

    def __eq__(self, other) -> bool:
        return isinstance(other, CoherentConfiguration) and \
            np.array_equal(self.color, other.color)

    def __hash__(self) -> int:
        return hash(self.color.tobytes())

    def refines(self, other: "CoherentConfiguration") -> bool:
        """True when every color class of other is a union of ours."""
        if self.n != other.n:
            return False
        seen: dict[int, int] = {}
        for a in range(self.n):
            for b in range(self.n):
                mine, theirs = int(self.color[a, b]), int(other.color[a, b])
                if seen.setdefault(mine, theirs) != theirs:
                    return False
        return True

    def key(self) -> bytes:
        return self.color.tobytes()

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "rank": self.rank,
            "color_matrix": [int(x) for x in self.color.reshape(-1)],
            "fibers": [list(f) for f in self.fibers],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "CoherentConfiguration":
        n = d["n"]
        color = np.array(d["color_matrix"], dtype=np.int64).reshape(n, n)
        return cls(color)

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    def __repr__(self) -> str:
        return f"CoherentConfiguration(n={self.n}, rank={self.rank})"


# -- constructors -----------------------------------------------------------


def cc_from_graph(n: int, edges: PairSet) -> CoherentConfiguration:
    """Coherent closure of a directed graph: the minimal configuration in
    which the edge set is a union of basis relations; its automorphism group
    equals the automorphism group of the graph.
    """
    edges = list(edges)
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise MalformedInput(f"vertex out of range: ({u}, {v})")
    adj = np.zeros((n, n), dtype=np.int64)
    for u, v in edges:
        adj[u, v] = 1
    init = 1 + adj + 2 * adj.T
    np.fill_diagonal(init, 0)
    color = _first_occurrence_renumber(init)
    return CoherentConfiguration(_canonicalize(_refine_to_stability(color)))


def wl_extension(X: CoherentConfiguration,
                 T: Sequence[PairSet]) -> CoherentConfiguration:
    """Minimal coherent configuration refining X in which every member of T
    is a union of basis relations.
    """
    n = X.n
    code = X.color.copy()
    for t in T:
        mark = np.zeros((n, n), dtype=np.int64)
        for u, v in t:
            if not (0 <= u < n and 0 <= v < n):
                raise MalformedInput(f"pair out of range: ({u}, {v})")
            mark[u, v] = 1
        code = code * 2 + mark
    color = _first_occurrence_renumber(code)
    return CoherentConfiguration(_canonicalize(_refine_to_stability(color)))


def verify_coherence(X: CoherentConfiguration) -> bool:
    """Direct check of the defining conditions: the diagonal is a union of
    colors, colors are transpose-closed, and all intersection numbers are
    well defined (the refinement signature is constant on every color).
    """
    color = X.color
    n = X.n
    diag_colors = set(int(c) for c in color.diagonal())
    for c in diag_colors:
        mask = color == c
        if not np.array_equal(mask, mask & np.eye(n, dtype=bool)):
            return False
    for c in range(X.rank):
        mask = color == c
        tcolors = set(int(x) for x in color.T[mask])
        if len(tcolors) != 1:
            return False
    r = X.rank
    for c in range(r):
        pairs = np.argwhere(color == c)
        sig0 = None
        for a, b in pairs:
            codes = color[a, :] * r + color[:, b]
            codes = np.sort(codes)
            key = codes.tobytes()
            if sig0 is None:
                sig0 = key
            elif key != sig0:
                return False
    return True


# -- pair-set and equivalence utilities -------------------------------------


class EquivalenceRelation:
    """An equivalence relation on {0..n-1} as a class partition."""

    def __init__(self, classes: Sequence[Sequence[int]], n: int):
        self.n = n
        self.classes = sorted(tuple(sorted(c)) for c in classes)
        self.class_of = [-1] * n
        for i, c in enumerate(self.classes):
            for x in c:
                self.class_of[x] = i
        if any(v < 0 for v in self.class_of):
            raise MalformedInput("classes do not partition the point set")

    @classmethod
    def from_class_of(cls, class_of: Sequence[int], n: int) -> "EquivalenceRelation":
        byrep: dict[int, list[int]] = {}
        for x in range(n):
            byrep.setdefault(class_of[x], []).append(x)
        return cls(list(byrep.values()), n)

    @classmethod
    def identity(cls, n: int) -> "EquivalenceRelation":
        return cls([[x] for x in range(n)], n)

    @classmethod
    def full(cls, n: int) -> "EquivalenceRelation":
        return cls([list(range(n))], n)

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    def pair_count(self) -> int:
        """|E| as a subset of Omega x Omega."""
        return sum(len(c) ** 2 for c in self.classes)

    def contains_pair(self, a: int, b: int) -> bool:
        return self.class_of[a] == self.class_of[b]

    def is_refined_by(self, other: "EquivalenceRelation") -> bool:
        """True when other <= self as pair sets."""
        return all(len({self.class_of[x] for x in c}) == 1 for c in other.classes)

    def as_color_set(self, X: CoherentConfiguration) -> set[int]:
        """The colors of X whose union this relation is; raises if not a union."""
        inside = set()
        outside = set()
        for a in range(self.n):
            for b in range(self.n):
                c = int(X.color[a, b])
                (inside if self.contains_pair(a, b) else outside).add(c)
        if inside & outside:
            raise MalformedInput("relation is not a union of basis relations")
        return inside

    def key(self) -> tuple:
        return tuple(self.classes)

    def __eq__(self, other) -> bool:
        return isinstance(other, EquivalenceRelation) and self.classes == other.classes

    def __hash__(self) -> int:
        return hash(self.key())

    def __repr__(self) -> str:
        return f"EquivalenceRelation({self.classes})"


def equivalence_closure(pairs: PairSet, n: int) -> EquivalenceRelation:
    """Smallest equivalence relation containing the given pairs: the
    connected components of the graph with edges s union s*."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    return EquivalenceRelation.from_class_of([find(x) for x in range(n)], n)


def _join(e1: EquivalenceRelation, e2: EquivalenceRelation) -> EquivalenceRelation:
    parent = list(range(e1.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for rel in (e1, e2):
        for c in rel.classes:
            r0 = find(c[0])
            for x in c[1:]:
                rx = find(x)
                if rx != r0:
                    if rx < r0:
                        r0, rx = rx, r0
                    parent[rx] = r0
    return EquivalenceRelation.from_class_of([find(x) for x in range(e1.n)], e1.n)


def radical(pairs: PairSet, n: int) -> EquivalenceRelation:
    """Largest relation r with s*r = r*s = s, where s is the given pair set.

    Two points are equivalent iff they have identical in- and out-
    neighborhoods under s; this is the largest such r directly.
    """
    outn = [set() for _ in range(n)]
    inn = [set() for _ in range(n)]
    for a, b in pairs:
        outn[a].add(b)
        inn[b].add(a)
    sig = {}
    class_of = []
    for x in range(n):
        key = (frozenset(outn[x]), frozenset(inn[x]))
        class_of.append(sig.setdefault(key, x))
    return EquivalenceRelation.from_class_of(class_of, n)


# -- the equivalence lattice of a feasible scheme ----------------------------


def _color_closures(X: CoherentConfiguration) -> list[EquivalenceRelation]:
    out = []
    for c in range(X.rank):
        out.append(equivalence_closure(X.pairs_of_color(c), X.n))
    return out


def is_commutative(X: CoherentConfiguration) -> bool:
    """c_rs^t == c_sr^t for all colors: per pair (a, b) the multiset of path
    color pairs must be swap-symmetric."""
    if not X.is_homogeneous():
        return False
    color = X.color
    n, r = X.n, X.rank
    for a in range(n):
        fwd = color[a, :, None] * r + color
        rev = color[a, :, None] + color * r
        fwd.sort(axis=0)
        rev.sort(axis=0)
        if not np.array_equal(fwd, rev):
            return False
    return True


def is_feasible(X: CoherentConfiguration) -> bool:
    """A commutative scheme whose equivalence lattice is generated by
    closures of pairs of basis relations (checked via the stabilization
    condition on pair and triple closures)."""
    if not is_commutative(X):
        return False
    single = _color_closures(X)
    pair_set = {}
    for e1 in single:
        for e2 in single:
            e = _join(e1, e2)
            pair_set.setdefault(e.key(), e)
    triple_set = set(pair_set)
    for e in list(pair_set.values()):
        for e2 in single:
            triple_set.add(_join(e, e2).key())
    return triple_set == set(pair_set)


def enumerate_equivalences(X: CoherentConfiguration) -> list[EquivalenceRelation]:
    """All of E(X) for a feasible scheme, sorted coarsest-last."""
    if not is_feasible(X):
        raise FeasibilityViolation("scheme is not feasible")
    single = _color_closures(X)
    out: dict[tuple, EquivalenceRelation] = {}
    for e1 in single:
        for e2 in single:
            e = _join(e1, e2)
            out.setdefault(e.key(), e)
    return sorted(out.values(), key=lambda e: (e.pair_count(), e.key()))


def is_primitive(X: CoherentConfiguration) -> bool:
    """No nontrivial basis relation has a proper equivalence closure."""
    if X.n == 1:
        return True
    if not X.is_homogeneous():
        return False
    for c in range(X.rank):
        pairs = X.pairs_of_color(c)
        if pairs[0][0] == pairs[0][1]:
            continue
        if equivalence_closure(pairs, X.n).num_classes != 1:
            return False
    return True


# -- restrictions, quotients, sections --------------------------------------


@dataclass(frozen=True)
class SectionDescriptor:
    """A section: an E-class Delta taken modulo F (F <= E in E(X))."""
    E: EquivalenceRelation
    F: EquivalenceRelation
    delta: tuple[int, ...]

    @property
    def degree(self) -> int:
        return len({self.F.class_of[x] for x in self.delta})


def restriction(X: CoherentConfiguration, delta: Sequence[int]) -> CoherentConfiguration:
    pts = sorted(delta)
    sub = X.color[np.ix_(pts, pts)]
    return CoherentConfiguration(_canonicalize(_first_occurrence_renumber(sub)))


def quotient(X: CoherentConfiguration, E: EquivalenceRelation) -> CoherentConfiguration:
    """Quotient modulo E: class-pair colors are the sets of colors meeting
    the class pair."""
    m = E.num_classes
    qcolor = np.empty((m, m), dtype=np.int64)
    table: dict[frozenset, int] = {}
    for i, ci in enumerate(E.classes):
        for j, cj in enumerate(E.classes):
            key = frozenset(int(x) for x in np.unique(X.color[np.ix_(ci, cj)]))
            qcolor[i, j] = table.setdefault(key, len(table))
    return CoherentConfiguration(_canonicalize(_first_occurrence_renumber(qcolor)))


def section(X: CoherentConfiguration, sec: SectionDescriptor) -> CoherentConfiguration:
    """Restriction to the class followed by the quotient modulo F."""
    if not _f_subset_e(sec.F, sec.E):
        raise MalformedInput("section requires F <= E")
    if tuple(sorted(sec.delta)) not in set(sec.E.classes):
        raise MalformedInput("delta is not a class of E")
    pts = sorted(sec.delta)
    rest = restriction(X, pts)
    f_classes: dict[int, list[int]] = {}
    for local, x in enumerate(pts):
        f_classes.setdefault(sec.F.class_of[x], []).append(local)
    e_local = EquivalenceRelation(list(f_classes.values()), len(pts))
    return quotient(rest, e_local)


def _f_subset_e(F: EquivalenceRelation, E: EquivalenceRelation) -> bool:
    return E.is_refined_by(F)


def section_of_pair(X: CoherentConfiguration, F: EquivalenceRelation,
                    E: EquivalenceRelation,
                    delta: tuple[int, ...] | None = None) -> CoherentConfiguration:
    if delta is None:
        delta = E.classes[E.class_of[0]]
    return section(X, SectionDescriptor(E, F, tuple(delta)))


def enumerate_prim_sections(X: CoherentConfiguration) -> list[SectionDescriptor]:
    """Primitive sections of a feasible scheme: one descriptor per adjacent
    pair F < E in the equivalence lattice, with the class containing the
    least point as representative."""
    eqs = enumerate_equivalences(X)
    out = []
    for F, E in itertools.permutations(eqs, 2):
        if F == E or not _f_subset_e(F, E):
            continue
        if any(R not in (F, E) and _f_subset_e(F, R) and _f_subset_e(R, E)
               for R in eqs):
            continue
        delta = E.classes[E.class_of[0]]
        out.append(SectionDescriptor(E, F, tuple(delta)))
    return out


def maximal_path(X: CoherentConfiguration) -> list[EquivalenceRelation]:
    """A maximal chain 1 = E_0 < ... < E_s = full in E(X): each step picks
    the successor of least pair count, so consecutive sections are primitive."""
    eqs = enumerate_equivalences(X)
    chain = [EquivalenceRelation.identity(X.n)]
    full = EquivalenceRelation.full(X.n)
    while chain[-1] != full:
        cur = chain[-1]
        succ = [e for e in eqs if e != cur and _f_subset_e(cur, e)]
        nxt = min(succ, key=lambda e: (e.pair_count(), e.key()))
        chain.append(nxt)
    return chain


# -- automorphisms -----------------------------------------------------------


def is_automorphism(f: Perm, X: CoherentConfiguration) -> bool:
    """Whether every color class is preserved by f."""
    if f.n != X.n:
        raise MalformedInput("degree mismatch")
    img = np.fromiter(f.img, dtype=np.int64, count=X.n)
    return np.array_equal(X.color[np.ix_(img, img)], X.color)


_AUT_BRUTE_CACHE: dict[bytes, list[Perm]] = {}


def aut_brute(X: CoherentConfiguration) -> PermutationGroup:
    """Aut(X) by filtering all n! permutations; n <= 9 only."""
    if X.n > 9:
        raise MalformedInput(f"aut_brute limited to degree 9, got {X.n}")
    key = X.key()
    if key not in _AUT_BRUTE_CACHE:
        from .vectorized import filter_color_preserving

        _AUT_BRUTE_CACHE[key] = filter_color_preserving(X.color)
    elems = _AUT_BRUTE_CACHE[key]
    return schreier_sims(elems, X.n)


def find_isomorphism(A: CoherentConfiguration,
                     B: CoherentConfiguration) -> Perm | None:
    """A point bijection f with a matching color bijection, by backtracking;
    None when the configurations are not isomorphic."""
    if A.n != B.n or A.rank != B.rank:
        return None
    n = A.n
    cmap: dict[int, int] = {}
    cmap_rev: dict[int, int] = {}
    assign: list[int] = []
    used = [False] * n

    def compatible(a: int, b: int) -> bool:
        added = []
        ok = True
        for i, bi in enumerate(assign + [b]):
            ai = i if i < len(assign) else a
            for (x, y), (u, v) in (((ai, a), (bi, b)), ((a, ai), (b, bi))):
                ca, cb = int(A.color[x, y]), int(B.color[u, v])
                if ca in cmap:
                    if cmap[ca] != cb:
                        ok = False
                elif cb in cmap_rev:
                    ok = False
                else:
                    cmap[ca] = cb
                    cmap_rev[cb] = ca
                    added.append(ca)
                if not ok:
                    break
            if not ok:
                break
        return ok, added

    def undo(added):
        for ca in added:
            del cmap_rev[cmap.pop(ca)]

    def bt(a: int) -> bool:
        if a == n:
            return True
        for b in range(n):
            if used[b]:
                continue
            ok, added = compatible(a, b)
            if ok:
                used[b] = True
                assign.append(b)
                if bt(a + 1):
                    return True
                assign.pop()
                used[b] = False
            undo(added)
        return False

    if bt(0):
        return Perm(assign)
    return None
