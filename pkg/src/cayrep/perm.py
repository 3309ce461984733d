"""Permutations of {0..n-1} and permutation groups with a strong generating set.

Composition is read left to right: ``(g * h)(a) == h(g(a))``, i.e. ``g * h``
applies ``g`` first.  Conjugation ``x.conj(h) == h.inverse() * x * h`` matches
the action on images: if ``x`` maps ``a`` to ``b`` then ``x.conj(h)`` maps
``h(a)`` to ``h(b)``.
"""

from __future__ import annotations

import math
import re
from typing import Callable, Iterable, Iterator, Sequence

from .errors import (
    DivisibilityError,
    MalformedInput,
    NotInImage,
    PreconditionViolation,
    UnsupportedShape,
)


class Perm:
    """An immutable permutation stored as an image table."""

    __slots__ = ("img",)

    def __init__(self, images: Sequence[int]):
        img = tuple(images)
        n = len(img)
        seen = bytearray(n)
        for x in img:
            if not 0 <= x < n or seen[x]:
                raise MalformedInput(f"not a permutation of 0..{n - 1}: {img}")
            seen[x] = 1
        self.img = img

    @classmethod
    def _unsafe(cls, img: tuple) -> "Perm":
        p = object.__new__(cls)
        p.img = img
        return p

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls._unsafe(tuple(range(n)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Perm":
        img = list(range(n))
        for cyc in cycles:
            for x in cyc:
                if not 0 <= x < n:
                    raise MalformedInput(f"point {x} out of range 0..{n - 1}")
            if len(set(cyc)) != len(cyc):
                raise MalformedInput(f"repeated point in cycle {cyc}")
            for a, b in zip(cyc, cyc[1:]):
                img[a] = b
            if cyc:
                img[cyc[-1]] = cyc[0]
        return cls(img)

    @property
    def n(self) -> int:
        return len(self.img)

    def __call__(self, point: int) -> int:
        return self.img[point]

    def __mul__(self, other: "Perm") -> "Perm":
        oi = other.img
        if len(oi) != len(self.img):
            raise MalformedInput("degree mismatch in product")
        return Perm._unsafe(tuple(oi[x] for x in self.img))

    def inverse(self) -> "Perm":
        inv = [0] * len(self.img)
        for a, b in enumerate(self.img):
            inv[b] = a
        return Perm._unsafe(tuple(inv))

    def __pow__(self, e: int) -> "Perm":
        out = list(range(len(self.img)))
        for cyc in self.cycles(include_fixed=True):
            ln = len(cyc)
            k = e % ln
            for i, a in enumerate(cyc):
                out[a] = cyc[(i + k) % ln]
        return Perm._unsafe(tuple(out))

    def conj(self, h: "Perm") -> "Perm":
        """h^-1 * self * h."""
        hi = h.img
        si = self.img
        out = [0] * len(si)
        for a in range(len(si)):
            out[hi[a]] = hi[si[a]]
        return Perm._unsafe(tuple(out))

    def is_identity(self) -> bool:
        for a, b in enumerate(self.img):
            if a != b:
                return False
        return True

    def cycles(self, include_fixed: bool = False) -> list[tuple[int, ...]]:
        """Cycle decomposition, cycles sorted by least element."""
        seen = bytearray(len(self.img))
        out = []
        for a in range(len(self.img)):
            if seen[a]:
                continue
            cyc = [a]
            seen[a] = 1
            b = self.img[a]
            while b != a:
                seen[b] = 1
                cyc.append(b)
                b = self.img[b]
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return out

    def order(self) -> int:
        o = 1
        for cyc in self.cycles():
            o = math.lcm(o, len(cyc))
        return o

    def degree_moved(self) -> int:
        return sum(1 for a, b in enumerate(self.img) if a != b)

    def moved_points(self) -> list[int]:
        return [a for a, b in enumerate(self.img) if a != b]

    def cycle_string(self) -> str:
        cycs = self.cycles()
        if not cycs:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cycs)

    def __repr__(self) -> str:
        return f"Perm[{self.cycle_string()}]"

    def __eq__(self, other) -> bool:
        return isinstance(other, Perm) and self.img == other.img

    def __lt__(self, other: "Perm") -> bool:
        return self.img < other.img

    def __hash__(self) -> int:
        return hash(self.img)


def element_order(g: Perm) -> int:
    return g.order()


def element_degree(g: Perm) -> int:
    """Number of points moved by g."""
    return g.degree_moved()


_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def parse_perm(text: str, n: int) -> Perm:
    """Parse cycle notation like "(0 1 2)(3 4)"; "()" is the identity."""
    stripped = text.strip()
    if not stripped:
        raise MalformedInput("empty permutation string")
    if re.sub(_CYCLE_RE, "", stripped).strip():
        raise MalformedInput(f"cannot parse permutation {text!r}")
    cycles = []
    for m in _CYCLE_RE.finditer(stripped):
        body = m.group(1).replace(",", " ").split()
        if body:
            cycles.append([int(x) for x in body])
    return Perm.from_cycles(n, cycles)


class _OrderCapExceeded(Exception):
    pass


class _Level:
    __slots__ = ("point", "gens", "transversal", "inv_transversal", "orbit", "ptrs")

    def __init__(self, point: int, n: int):
        self.point = point
        self.gens: list[Perm] = []
        e = Perm.identity(n)
        self.transversal: dict[int, Perm] = {point: e}
        self.inv_transversal: dict[int, Perm] = {point: e}
        self.orbit: list[int] = [point]
        self.ptrs: list[int] = []

    def clone(self) -> "_Level":
        lv = object.__new__(_Level)
        lv.point = self.point
        lv.gens = self.gens[:]
        lv.transversal = dict(self.transversal)
        lv.inv_transversal = dict(self.inv_transversal)
        lv.orbit = self.orbit[:]
        lv.ptrs = self.ptrs[:]
        return lv


class PermutationGroup:
    """A permutation group represented by a base and strong generating set.

    Built by the deterministic Schreier-Sims procedure with smallest-moved-
    point base selection; every strong generator is a product of the original
    generators, and the order is the product of the fundamental orbit lengths.
    """

    def __init__(self, generators: Sequence[Perm], n: int | None = None,
                 base_hint: Sequence[int] = (), order_cap: int | None = None,
                 _seed_strong: Sequence[Perm] | None = None):
        gens = list(generators)
        if n is None:
            if not gens:
                raise MalformedInput("degree required for the trivial group")
            n = gens[0].n
        for g in gens:
            if g.n != n:
                raise MalformedInput("generators of inconsistent degree")
        self.n = n
        self.generators = gens
        self._order_cap = order_cap
        self._levels: list[_Level] = [_Level(b, n) for b in base_hint]
        self.strong_generators: list[Perm] = []
        self._order: int | None = None
        self._elements_cache: list[Perm] | None = None
        seed = gens if _seed_strong is None else list(_seed_strong)
        self._add_gens_inplace(seed)

    # -- construction -------------------------------------------------

    def _add_gens_inplace(self, new_gens: Sequence[Perm]) -> None:
        self._order = None
        self._elements_cache = None
        deepest = -1
        for g in new_gens:
            if g.n != self.n:
                raise MalformedInput("generator degree mismatch")
            if not g.is_identity():
                deepest = max(deepest, self._distribute(g))
        if deepest >= 0:
            self._complete(deepest)

    def _distribute(self, g: Perm) -> int:
        """Register g as a strong generator; returns the deepest level it joins."""
        self.strong_generators.append(g)
        i = 0
        while True:
            if i == len(self._levels):
                self._levels.append(_Level(min(g.moved_points()), self.n))
            lv = self._levels[i]
            lv.gens.append(g)
            if g.img[lv.point] != lv.point:
                return i
            i += 1

    def _running_order(self) -> int:
        o = 1
        for lv in self._levels:
            o *= len(lv.transversal)
        return o

    def _sweep_level(self, i: int) -> int | None:
        """Process pending (orbit point, generator) pairs at level i.

        Extends the transversal and strips Schreier generators.  Returns the
        deepest level a new strong generator was routed to, or None when the
        level is complete.
        """
        lv = self._levels[i]
        gens = lv.gens
        ptrs = lv.ptrs
        orbit = lv.orbit
        trans = lv.transversal
        inv = lv.inv_transversal
        while True:
            advanced = False
            for gi in range(len(gens)):
                if gi == len(ptrs):
                    ptrs.append(0)
                g = gens[gi]
                gimg = g.img
                while ptrs[gi] < len(orbit):
                    a = orbit[ptrs[gi]]
                    ptrs[gi] += 1
                    advanced = True
                    b = gimg[a]
                    ub_inv = inv.get(b)
                    if ub_inv is None:
                        ub = trans[a] * g
                        trans[b] = ub
                        inv[b] = ub.inverse()
                        orbit.append(b)
                        if self._order_cap is not None and \
                                self._running_order() > self._order_cap:
                            raise _OrderCapExceeded
                        continue
                    sg = trans[a] * g * ub_inv
                    if sg.is_identity():
                        continue
                    h, _ = self._strip(sg, i + 1)
                    if not h.is_identity():
                        return self._distribute(h)
            if not advanced:
                return None

    def _complete(self, start: int) -> None:
        i = min(start, len(self._levels) - 1)
        while i >= 0:
            jump = self._sweep_level(i)
            if jump is None:
                i -= 1
            else:
                i = min(max(jump, i), len(self._levels) - 1)

    def _strip(self, g: Perm, start: int = 0) -> tuple[Perm, int]:
        h = g
        for i in range(start, len(self._levels)):
            lv = self._levels[i]
            img = h.img[lv.point]
            if img == lv.point:
                continue
            u_inv = lv.inv_transversal.get(img)
            if u_inv is None:
                return h, i
            h = h * u_inv
        return h, len(self._levels)

    # -- queries ------------------------------------------------------

    @property
    def order(self) -> int:
        if self._order is None:
            self._order = self._running_order()
        return self._order

    @property
    def base(self) -> list[int]:
        return [lv.point for lv in self._levels]

    def contains(self, g: Perm) -> bool:
        if g.n != self.n:
            return False
        h, _ = self._strip(g)
        return h.is_identity()

    __contains__ = contains

    def extended_with(self, new_gens: Sequence[Perm],
                      order_cap: int | None = None) -> "PermutationGroup":
        """Group generated by this group together with new_gens."""
        grp = object.__new__(PermutationGroup)
        grp.n = self.n
        grp.generators = self.generators + list(new_gens)
        grp._order_cap = order_cap
        grp._levels = [lv.clone() for lv in self._levels]
        grp.strong_generators = self.strong_generators[:]
        grp._order = None
        grp._elements_cache = None
        grp._add_gens_inplace(list(new_gens))
        return grp

    def elements(self, limit: int | None = None) -> list[Perm]:
        """All group elements in a deterministic order (guard with limit)."""
        if limit is not None and self.order > limit:
            raise PreconditionViolation(
                f"group order {self.order} exceeds limit {limit}")
        if self._elements_cache is None:
            out = [Perm.identity(self.n)]
            for lv in reversed(self._levels):
                if len(lv.transversal) == 1:
                    continue
                trans = [lv.transversal[a] for a in sorted(lv.transversal)]
                out = [v * u for v in out for u in trans]
            self._elements_cache = out
        return self._elements_cache

    def random_element(self, rng) -> Perm:
        """Uniform random element; deterministic for a seeded rng."""
        g = Perm.identity(self.n)
        for lv in reversed(self._levels):
            if len(lv.transversal) == 1:
                continue
            pts = sorted(lv.transversal)
            g = g * lv.transversal[pts[rng.randrange(len(pts))]]
        return g

    def orbits(self) -> list[list[int]]:
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in self.generators:
            for a in range(self.n):
                ra, rb = find(a), find(g.img[a])
                if ra != rb:
                    parent[rb] = ra
        groups: dict[int, list[int]] = {}
        for a in range(self.n):
            groups.setdefault(find(a), []).append(a)
        return sorted(groups.values())

    def is_transitive(self) -> bool:
        return len(self.orbits()) == 1

    def is_regular(self) -> bool:
        return self.is_transitive() and self.order == self.n

    def is_abelian(self) -> bool:
        gens = self.generators
        for i, g in enumerate(gens):
            for h in gens[i + 1:]:
                if g * h != h * g:
                    return False
        return True

    def __repr__(self) -> str:
        return f"PermutationGroup(n={self.n}, order={self.order})"


def schreier_sims(generators: Sequence[Perm], n: int | None = None,
                  base_hint: Sequence[int] = ()) -> PermutationGroup:
    """Build a group with base and strong generating set from generators."""
    return PermutationGroup(generators, n, base_hint=base_hint)


def trivial_group(n: int) -> PermutationGroup:
    return PermutationGroup([], n)


# -- orbit and block machinery --------------------------------------------


class BlockSystem:
    """A group-invariant partition of {0..n-1} into blocks of equal size."""

    def __init__(self, blocks: Sequence[Sequence[int]], n: int):
        self.blocks = sorted(tuple(sorted(b)) for b in blocks)
        self.n = n
        self.block_of = [-1] * n
        for i, b in enumerate(self.blocks):
            for x in b:
                self.block_of[x] = i
        if any(v < 0 for v in self.block_of):
            raise MalformedInput("blocks do not partition the point set")
        if len({len(b) for b in self.blocks}) != 1:
            raise MalformedInput("blocks have unequal sizes")

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def block_size(self) -> int:
        return len(self.blocks[0])

    def is_invariant_under(self, g: Perm) -> bool:
        for b in self.blocks:
            if len({self.block_of[g.img[x]] for x in b}) != 1:
                return False
        return True

    def __repr__(self) -> str:
        return f"BlockSystem({self.blocks})"


def _finest_blocks_merging(gens: Sequence[Perm], n: int, a: int, b: int) -> list[tuple[int, ...]]:
    """Finest invariant partition in which a and b share a block."""
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x, y):
        rx, ry = find(x), find(y)
        if rx == ry:
            return None
        if rx > ry:
            rx, ry = ry, rx
        parent[ry] = rx
        return (rx, ry)

    queue = [(a, b)]
    union(a, b)
    while queue:
        x, y = queue.pop()
        for g in gens:
            merged = union(g.img[x], g.img[y])
            if merged:
                queue.append(merged)
    classes: dict[int, list[int]] = {}
    for x in range(n):
        classes.setdefault(find(x), []).append(x)
    return sorted(tuple(sorted(c)) for c in classes.values())


def minimal_blocks_of_size_p(P: PermutationGroup, p: int) -> BlockSystem:
    """A P-invariant partition into blocks of size p (lexicographically least)."""
    if not P.is_transitive():
        raise PreconditionViolation("group is not transitive")
    n = P.n
    best = None
    for b in range(1, n):
        blocks = _finest_blocks_merging(P.generators, n, 0, b)
        if len(blocks[0]) == p and all(len(c) == p for c in blocks):
            key = tuple(blocks)
            if best is None or key < best:
                best = key
    if best is None:
        raise PreconditionViolation(f"no invariant partition with blocks of size {p}")
    return BlockSystem(list(best), n)


class BlockAction:
    """Action of a group on an invariant block system.

    Carries the induced image group on blocks, the kernel (setwise stabilizer
    of every block), and an element-preimage oracle for the image.
    """

    def __init__(self, P: PermutationGroup, B: BlockSystem):
        n, m = P.n, B.num_blocks
        for g in P.generators:
            if not B.is_invariant_under(g):
                raise PreconditionViolation("block system is not invariant")
        self.P = P
        self.blocks = B
        combined = []
        for g in P.generators:
            img = [B.block_of[g.img[B.blocks[i][0]]] for i in range(m)]
            img += [m + g.img[a] for a in range(n)]
            combined.append(Perm._unsafe(tuple(img)))
        self._combined = PermutationGroup(combined, m + n, base_hint=range(m))
        self._m = m
        img_gens = [Perm._unsafe(g.img[:m]) for g in self._combined.generators]
        self.image = PermutationGroup([g for g in img_gens if not g.is_identity()], m)
        ker_gens = [Perm._unsafe(tuple(x - m for x in g.img[m:]))
                    for g in self._combined.strong_generators
                    if all(g.img[i] == i for i in range(m))]
        self.kernel = PermutationGroup([g for g in ker_gens if not g.is_identity()], n)
        if self.image.order * self.kernel.order != P.order:
            raise AssertionError("block action decomposition failed to certify")

    def lift(self, hbar: Perm) -> Perm:
        """Some h in P whose induced block permutation equals hbar."""
        if hbar.n != self._m:
            raise MalformedInput("degree mismatch with the block count")
        m = self._m
        rem = hbar
        parts: list[Perm] = []
        for lv in self._combined._levels:
            if lv.point >= m:
                break
            img = rem.img[lv.point]
            if img == lv.point:
                continue
            u = lv.transversal.get(img)
            if u is None:
                raise NotInImage("element is not induced by the group")
            parts.append(u)
            rem = rem * Perm._unsafe(lv.inv_transversal[img].img[:m])
        if not rem.is_identity():
            raise NotInImage("element is not induced by the group")
        full = Perm.identity(m + self.P.n)
        for u in reversed(parts):
            full = full * u
        h = Perm._unsafe(tuple(x - m for x in full.img[m:]))
        if [self.blocks.block_of[h.img[b[0]]] for b in self.blocks.blocks] != list(hbar.img):
            raise AssertionError("lift failed to project to the requested element")
        return h


def block_action(P: PermutationGroup, B: BlockSystem) -> BlockAction:
    return BlockAction(P, B)


# -- centralizers, element searches, Sylow ---------------------------------


def centralizer_in_sym(g: Perm) -> PermutationGroup:
    """Centralizer of g in the full symmetric group, for the shapes needed:
    identity, a single n-cycle, or a fixed-point-free product of equal cycles.
    """
    n = g.n
    if g.is_identity():
        if n <= 1:
            return trivial_group(n)
        gens = [Perm.from_cycles(n, [(0, 1)])]
        if n > 2:
            gens.append(Perm.from_cycles(n, [tuple(range(n))]))
        return PermutationGroup(gens, n)
    cycs = g.cycles(include_fixed=True)
    lengths = {len(c) for c in cycs}
    if len(lengths) != 1:
        raise UnsupportedShape(f"mixed cycle lengths {sorted(lengths)}")
    ln = lengths.pop()
    m = n // ln
    if m == 1:
        return PermutationGroup([g], n)
    cycs = sorted(cycs)
    gens = [Perm.from_cycles(n, [c]) for c in cycs]
    swap = list(range(n))
    for a, b in zip(cycs[0], cycs[1]):
        swap[a], swap[b] = b, a
    gens.append(Perm(swap))
    if m > 2:
        rot = list(range(n))
        for i in range(m):
            nxt = cycs[(i + 1) % m]
            for a, b in zip(cycs[i], nxt):
                rot[a] = b
        gens.append(Perm(rot))
    C = PermutationGroup(gens, n)
    assert C.order == ln ** m * math.factorial(m)
    return C


def centralizer_sym_elements(g: Perm, compose_with: Perm | None = None,
                             chunk: int = 200_000) -> Iterator:
    """Enumerate C_sym(g), optionally right-composed with a fixed permutation,
    as numpy arrays of image tables in chunks.  Requires the fixed-point-free
    equal-cycle shape.
    """
    import itertools

    import numpy as np

    cycs = sorted(g.cycles(include_fixed=True))
    if len({len(c) for c in cycs}) != 1:
        raise UnsupportedShape("mixed cycle lengths")
    ln = len(cycs[0])
    m = len(cycs)
    n = g.n
    cyc_arr = np.array(cycs, dtype=np.int64)
    tail = np.array(compose_with.img, dtype=np.int64) if compose_with is not None else None
    buf = []
    for sigma in itertools.permutations(range(m)):
        rolled = [[np.roll(cyc_arr[sigma[i]], -s) for s in range(ln)] for i in range(m)]
        for shifts in itertools.product(range(ln), repeat=m):
            img = np.empty(n, dtype=np.int64)
            for i in range(m):
                img[cyc_arr[i]] = rolled[i][shifts[i]]
            buf.append(img)
            if len(buf) >= chunk:
                block = np.stack(buf)
                yield block if tail is None else tail[block]
                buf = []
    if buf:
        block = np.stack(buf)
        yield block if tail is None else tail[block]


def _forced_map_consistent(x: Perm, y: Perm, pairs: Iterable[tuple[int, int]],
                           n: int) -> bool:
    """Whether the partial map given by pairs extends under the forcing rule
    a -> b implies x(a) -> y(b), staying injective.  Necessary for some h with
    h^-1 x h = y to extend the pairs.
    """
    fwd = [-1] * n
    bwd = [-1] * n
    stack = []
    for a, b in pairs:
        if fwd[a] == -1 and bwd[b] == -1:
            fwd[a], bwd[b] = b, a
            stack.append(a)
        elif fwd[a] != b:
            return False
    while stack:
        a = stack.pop()
        xa, yb = x.img[a], y.img[fwd[a]]
        if fwd[xa] == -1 and bwd[yb] == -1:
            fwd[xa], bwd[yb] = yb, xa
            stack.append(xa)
        elif fwd[xa] != yb:
            return False
    return True


def subgroup_search(K: PermutationGroup, prune: Callable[[int, Perm], bool],
                    accept: Callable[[Perm], bool]) -> PermutationGroup:
    """The subgroup {g in K : accept(g)} by backtracking over K's chain.

    prune(depth, w) must be sound: it may return False only when no element of
    the coset sharing w's base-image prefix satisfies accept.  accept must be
    closed under products and inverses for the result to be a group.
    """
    levels = [lv for lv in K._levels if len(lv.transversal) > 1]
    H = trivial_group(K.n)
    known_in_H: set[Perm] = set()
    level_in_H = [False] * len(levels)

    def refresh_level_cache():
        for i, lv in enumerate(levels):
            if not level_in_H[i]:
                ok = True
                for g in lv.gens:
                    if g not in known_in_H:
                        if H.contains(g):
                            known_in_H.add(g)
                        else:
                            ok = False
                            break
                level_in_H[i] = ok

    def dfs(i: int, w: Perm):
        if i == len(levels):
            if accept(w) and not H.contains(w):
                H._add_gens_inplace([w])
                H.generators.append(w)
                refresh_level_cache()
            return
        if level_in_H[i] and H.contains(w):
            return
        lv = levels[i]
        wimg = w.img
        for _, d in sorted((wimg[d], d) for d in lv.orbit):
            w2 = lv.transversal[d] * w
            if prune(i + 1, w2):
                dfs(i + 1, w2)

    dfs(0, Perm.identity(K.n))
    return H


def find_group_element(K: PermutationGroup, prune: Callable[[int, Perm], bool],
                       accept: Callable[[Perm], bool]) -> Perm | None:
    """First element of K (in chain DFS order) satisfying accept, or None."""
    levels = [lv for lv in K._levels if len(lv.transversal) > 1]

    def dfs(i: int, w: Perm) -> Perm | None:
        if i == len(levels):
            return w if accept(w) else None
        lv = levels[i]
        wimg = w.img
        for _, d in sorted((wimg[d], d) for d in lv.orbit):
            w2 = lv.transversal[d] * w
            if prune(i + 1, w2):
                res = dfs(i + 1, w2)
                if res is not None:
                    return res
        return None

    return dfs(0, Perm.identity(K.n))


def centralizer_in_group(K: PermutationGroup, x: Perm) -> PermutationGroup:
    """C_K(x) = {h in K : h x = x h}, by backtracking with forced-map pruning."""
    if x.n != K.n:
        raise MalformedInput("degree mismatch")
    levels = [lv for lv in K._levels if len(lv.transversal) > 1]
    base = [lv.point for lv in levels]

    def prune(depth: int, w: Perm) -> bool:
        return _forced_map_consistent(
            x, x, [(b, w.img[b]) for b in base[:depth]], K.n)

    def accept(h: Perm) -> bool:
        return h * x == x * h

    return subgroup_search(K, prune, accept)


def find_conjugating_element(K: PermutationGroup, x: Perm, y: Perm) -> Perm | None:
    """Some h in K with h^-1 x h = y, or None if x, y are not K-conjugate."""
    levels = [lv for lv in K._levels if len(lv.transversal) > 1]
    base = [lv.point for lv in levels]

    def prune(depth: int, w: Perm) -> bool:
        return _forced_map_consistent(
            x, y, [(b, w.img[b]) for b in base[:depth]], K.n)

    def accept(h: Perm) -> bool:
        return x.conj(h) == y

    return find_group_element(K, prune, accept)


def _p_part_exponent(m: int, p: int) -> int:
    a = 0
    while m % p == 0:
        m //= p
        a += 1
    return a


def _is_p_power(m: int, p: int) -> bool:
    while m % p == 0:
        m //= p
    return m == 1


def sylow_p_subgroup(K: PermutationGroup, p: int, seed: int = 0) -> PermutationGroup:
    """A Sylow p-subgroup of K.

    Draws seeded random elements, keeps their p-parts while the generated
    group stays a p-group, and certifies the result against the p-part of
    |K|.  Falls back to a greedy scan over all elements for small K.
    """
    import random

    if K.order % p != 0:
        raise DivisibilityError(f"{p} does not divide the group order {K.order}")
    target = p ** _p_part_exponent(K.order, p)
    rng = random.Random(seed)
    P = trivial_group(K.n)
    stall = 0
    for _ in range(6000):
        if P.order == target:
            return P
        g = K.random_element(rng)
        m = g.order()
        a = _p_part_exponent(m, p)
        if a == 0:
            stall += 1
        else:
            h = g ** (m // p ** a)
            if P.contains(h):
                stall += 1
            else:
                try:
                    cand = P.extended_with([h], order_cap=target)
                except _OrderCapExceeded:
                    cand = None
                if cand is not None and _is_p_power(cand.order, p):
                    P = cand
                    stall = 0
                else:
                    stall += 1
        if stall > 150:
            P = trivial_group(K.n)
            stall = 0
    if P.order == target:
        return P
    if K.order <= 10 ** 6:
        P = trivial_group(K.n)
        elems = sorted(g for g in K.elements() if _is_p_power(g.order(), p))
        progress = True
        while P.order < target and progress:
            progress = False
            for h in elems:
                if P.contains(h):
                    continue
                try:
                    cand = P.extended_with([h], order_cap=target)
                except _OrderCapExceeded:
                    continue
                if _is_p_power(cand.order, p):
                    P = cand
                    progress = True
                    break
        if P.order == target:
            return P
    raise RuntimeError("failed to certify a Sylow subgroup within the retry budget")
