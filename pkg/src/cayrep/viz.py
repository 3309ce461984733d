"""Figure rendering for CLI reports: color-matrix heatmaps and connection
set charts, written to files with the Agg backend."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .cohcfg import CoherentConfiguration


def render_color_matrix(X: CoherentConfiguration, path: str,
                        title: str | None = None) -> None:
    """Heatmap of the color matrix with fiber boundaries marked."""
    fig, ax = plt.subplots(figsize=(5.2, 4.6))
    im = ax.imshow(X.color, cmap="viridis", interpolation="nearest")
    boundaries = []
    pos = 0
    for f in X.fibers[:-1]:
        pos += len(f)
        boundaries.append(pos - 0.5)
    for b in boundaries:
        ax.axhline(b, color="white", linewidth=0.6)
        ax.axvline(b, color="white", linewidth=0.6)
    ax.set_title(title or f"coherent configuration: n={X.n}, rank={X.rank}")
    ax.set_xlabel("point")
    ax.set_ylabel("point")
    fig.colorbar(im, ax=ax, label="color")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_resolution(X0: CoherentConfiguration, X1: CoherentConfiguration,
                      path: str) -> None:
    """Input closure and final resolved scheme side by side."""
    fig, axes = plt.subplots(1, 2, figsize=(9.6, 4.4))
    for ax, X, name in zip(axes, (X0, X1), ("input closure", "resolved scheme")):
        ax.imshow(X.color, cmap="viridis", interpolation="nearest")
        ax.set_title(f"{name}: rank {X.rank}")
        ax.set_xlabel("point")
    axes[0].set_ylabel("point")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_connection_sets(reps, p: int, k: int, path: str) -> None:
    """One panel per representation: the connection set on the
    Z_{p^k} x Z_p grid."""
    pk = p ** k
    count = max(len(reps), 1)
    fig, axes = plt.subplots(1, count, figsize=(3.4 * count, 3.2), squeeze=False)
    for idx in range(count):
        ax = axes[0][idx]
        ax.set_xlim(-0.5, pk - 0.5)
        ax.set_ylim(-0.5, p - 0.5)
        ax.set_xticks(range(pk))
        ax.set_yticks(range(p))
        ax.set_xlabel("cyclic part (order %d)" % pk)
        ax.set_ylabel("order-%d part" % p)
        ax.grid(True, linewidth=0.3)
        if idx < len(reps):
            xs = [e[0] for e in reps[idx].connection_set]
            ys = [e[1] for e in reps[idx].connection_set]
            ax.scatter(xs, ys, s=80, marker="s")
            ax.set_title(f"representation {idx}")
        else:
            ax.set_title("no representations")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
