"""Cayley representations of graphs over C_p x C_{p^k} (p in {2, 3})."""

from .perm import Perm, PermutationGroup, schreier_sims

__all__ = ["Perm", "PermutationGroup", "schreier_sims"]
