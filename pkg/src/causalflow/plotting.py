"""Matplotlib renderings of flows and of the classification report."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .digraph import is_trivial  # noqa: E402
from .flow import FlowGraph, structure_of  # noqa: E402
from .formats import dot_label  # noqa: E402

LEAF_COLOR = "#d9ead3"
NONTRIVIAL_LEAF_COLOR = "#f4cccc"
NODE_COLOR = "#ffffff"


def _layout(f: FlowGraph):
    layers = f.layers()
    sizes = sorted(layers, reverse=True)
    pos = {}
    for row, k in enumerate(sizes):
        members = layers[k]
        for col, n in enumerate(members):
            pos[n] = (col - (len(members) - 1) / 2.0, -row)
    return pos, len(sizes), max(len(v) for v in layers.values())


def plot_flow(f: FlowGraph, path, title=None, annotate=False):
    """Draw ``f`` layer by layer (vertex count decreasing downwards) and save to ``path``."""
    from .formats import edge_annotation

    pos, rows, width = _layout(f)
    fig, ax = plt.subplots(figsize=(max(4.0, 1.9 * width), max(2.5, 1.4 * rows)))
    for u, v in f.sorted_edges():
        (x0, y0), (x1, y1) = pos[u], pos[v]
        ax.annotate(
            "", xy=(x1, y1 + 0.18), xytext=(x0, y0 - 0.18),
            arrowprops=dict(arrowstyle="-|>", color="0.4", lw=0.8, shrinkA=0, shrinkB=0),
        )
        if annotate:
            text = edge_annotation(f, u, v)
            if text:
                ax.text((x0 + x1) / 2, (y0 + y1) / 2, text, fontsize=6, color="0.3", ha="center")
    for n, (x, y) in pos.items():
        d = structure_of(n)
        if f.is_leaf(n):
            color = LEAF_COLOR if is_trivial(d) else NONTRIVIAL_LEAF_COLOR
        else:
            color = NODE_COLOR
        ax.text(
            x, y, dot_label(d).replace(";", "\n") if len(d.edges) > 3 else dot_label(d),
            ha="center", va="center", fontsize=7, family="monospace",
            bbox=dict(boxstyle="round,pad=0.3", fc=color, ec="0.2", lw=0.8 if n != f.root else 1.6),
        )
    ax.set_xlim(-width / 2 - 0.5, width / 2 + 0.5)
    ax.set_ylim(-rows + 0.4, 0.6)
    ax.axis("off")
    if title:
        ax.set_title(title, fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def plot_classification(rows, path, title=None):
    """Bar chart of superflow sizes per isomorphism class, coloured by certificate."""
    fig, ax = plt.subplots(figsize=(max(4.0, 0.7 * len(rows) + 2), 3.0))
    ids = [r.class_id for r in rows]
    heights = [r.superflow_nodes for r in rows]
    colors = [LEAF_COLOR if r.certified else NONTRIVIAL_LEAF_COLOR for r in rows]
    ax.bar(ids, heights, color=colors, edgecolor="0.2", lw=0.8)
    for r in rows:
        ax.text(r.class_id, r.superflow_nodes, "yes" if r.certified else "no",
                ha="center", va="bottom", fontsize=7)
    ax.set_xticks(ids)
    ax.set_xlabel("isomorphism class")
    ax.set_ylabel("superflow nodes")
    if title:
        ax.set_title(title, fontsize=9)
    for side in ("top", "right"):
        ax.spines[side].set_visible(False)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
