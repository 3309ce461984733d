"""Vectorized bulk permutation filters shared by the search routines."""

from __future__ import annotations

import itertools

import numpy as np

from .perm import Perm

_ALL_PERMS: dict[int, np.ndarray] = {}


def all_perms(n: int) -> np.ndarray:
    """All n! permutations of 0..n-1 as an (n!, n) int array (n <= 9)."""
    if n not in _ALL_PERMS:
        if n > 9:
            raise ValueError("all_perms limited to n <= 9")
        _ALL_PERMS[n] = np.array(
            list(itertools.permutations(range(n))), dtype=np.int64)
    return _ALL_PERMS[n]


def color_preserving_mask(color: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """Boolean mask of the rows of perms that preserve every color class."""
    n = color.shape[0]
    keep = np.ones(len(perms), dtype=bool)
    for a in range(n):
        cols_a = perms[keep][:, a]
        sub = perms[keep]
        ok = np.ones(len(sub), dtype=bool)
        for b in range(n):
            ok &= color[cols_a, sub[:, b]] == color[a, b]
        idx = np.flatnonzero(keep)
        keep[idx[~ok]] = False
        if not keep.any():
            break
    return keep


def filter_color_preserving(color: np.ndarray) -> list[Perm]:
    """All permutations of the point set preserving every color class."""
    n = color.shape[0]
    perms = all_perms(n)
    keep = color_preserving_mask(color, perms)
    return [Perm._unsafe(tuple(int(x) for x in row)) for row in perms[keep]]


def probe_pairs(n: int, count: int = 40) -> list[tuple[int, int]]:
    """A fixed low-discrepancy list of point pairs used as a cheap necessary
    filter before the exact color check."""
    pairs = []
    a, b = 0, 1
    for i in range(count):
        pairs.append((a, b))
        a = (a * 5 + 3 + i) % n
        b = (b * 7 + 5 + 2 * i) % n
    return pairs


def color_preserving_rows(color: np.ndarray, block: np.ndarray,
                          probes: list[tuple[int, int]]) -> np.ndarray:
    """Indices of rows of block (image tables) preserving the coloring.

    Applies the probe-pair filter first, then the exact check on survivors.
    """
    keep = np.ones(len(block), dtype=bool)
    for a, b in probes:
        keep &= color[block[:, a], block[:, b]] == color[a, b]
        if not keep.any():
            return np.empty(0, dtype=np.int64)
    survivors = np.flatnonzero(keep)
    n = color.shape[0]
    out = []
    for i in survivors:
        row = block[i]
        if np.array_equal(color[np.ix_(row, row)], color):
            out.append(i)
    return np.array(out, dtype=np.int64)
