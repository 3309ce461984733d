"""Recognizers for the scheme classes that drive the main pipeline's
branching: the Paley scheme, quasinormal schemes, and singular schemes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cohcfg import (
    CoherentConfiguration,
    EquivalenceRelation,
    enumerate_equivalences,
    enumerate_prim_sections,
    is_feasible,
    is_primitive,
    section_of_pair,
)


def _is_composite(m: int) -> bool:
    if m < 4:
        return False
    return any(m % d == 0 for d in range(2, int(m ** 0.5) + 1))


def is_paley_scheme(X: CoherentConfiguration) -> bool:
    """Degree 9, rank 3, primitive: these three conditions identify the
    scheme up to isomorphism, so no explicit isomorphism test is needed."""
    return X.n == 9 and X.rank == 3 and is_primitive(X)


def is_quasinormal(X: CoherentConfiguration, p: int) -> bool:
    """Feasible with every primitive section of degree p or Paley.

    Non-feasible inputs are simply not quasinormal.
    """
    if not is_feasible(X):
        return False
    for sec in enumerate_prim_sections(X):
        if sec.degree == p:
            continue
        if is_paley_scheme(section_of_pair(X, sec.F, sec.E, sec.delta)):
            continue
        return False
    return True


@dataclass
class SingularData:
    """The pairs (F, E) whose sections have rank 2 and composite degree."""
    all_pairs: list[tuple[EquivalenceRelation, EquivalenceRelation]]
    minimal: list[tuple[EquivalenceRelation, EquivalenceRelation]]
    m: int  # the minimal |E| attained (pair-set cardinality)


def _pair_key(F: EquivalenceRelation, E: EquivalenceRelation) -> tuple:
    return (len(F.classes[0]), F.key(), E.key())


def singular_data(X: CoherentConfiguration, p: int) -> SingularData | None:
    """All (F, E) with F <= E whose section has rank 2 and composite degree,
    together with the subset minimizing |E|; None when there are none (in
    particular for non-feasible X)."""
    if not is_feasible(X):
        return None
    eqs = enumerate_equivalences(X)
    pairs = []
    for E in eqs:
        for F in eqs:
            if F == E or not E.is_refined_by(F):
                continue
            delta = E.classes[E.class_of[0]]
            degree = len({F.class_of[x] for x in delta})
            if not _is_composite(degree):
                continue
            if section_of_pair(X, F, E, delta).rank == 2:
                pairs.append((F, E))
    if not pairs:
        return None
    pairs.sort(key=lambda fe: _pair_key(*fe))
    m = min(E.pair_count() for _, E in pairs)
    minimal = [(F, E) for F, E in pairs if E.pair_count() == m]
    return SingularData(all_pairs=pairs, minimal=minimal, m=m)


def is_singular(X: CoherentConfiguration, p: int) -> bool:
    return singular_data(X, p) is not None


def pick_minimal_pair(data: SingularData) -> tuple[EquivalenceRelation, EquivalenceRelation]:
    """Deterministic choice inside the minimal set: least class size of F,
    then the canonical class fingerprints."""
    return min(data.minimal, key=lambda fe: _pair_key(*fe))
