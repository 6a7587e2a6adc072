"""DOT export for products, arenas, and witness lassos (viewing only)."""

from __future__ import annotations

from .core import Lasso
from .product import GameArena, ProductGraph


def _esc(s) -> str:
    return str(s).replace("\\", "\\\\").replace('"', '\\"')


def product_dot(g: ProductGraph, highlight: Lasso = None) -> str:
    """Graphviz rendering; final vertices are double-circled, initial ones
    filled, and the optional witness lasso is drawn bold."""
    hot_vertices = set()
    hot_edges = set()
    if highlight is not None:
        walk = list(highlight.prefix) + list(highlight.cycle) + [highlight.cycle[0]]
        hot_vertices.update(walk)
        hot_edges.update(zip(walk, walk[1:]))
    lines = ["digraph product {", "  rankdir=LR;"]
    for v in sorted(g.vertices):
        attrs = ['label="%s"' % _esc(v)]
        attrs.append("shape=doublecircle" if v in g.final else "shape=circle")
        if v in g.initial:
            attrs.append('style=filled fillcolor=lightgrey')
        if v in hot_vertices:
            attrs.append("penwidth=2")
        lines.append(f'  "{_esc(v)}" [{" ".join(attrs)}];')
    for e in g.edges:
        attrs = [f'label="{e.weight}"']
        if (e.src, e.dst) in hot_edges:
            attrs.append("penwidth=2")
        lines.append(f'  "{_esc(e.src)}" -> "{_esc(e.dst)}" [{" ".join(attrs)}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def arena_dot(a: GameArena) -> str:
    """Min vertices are circles (double-circled when final), the adversary's
    intermediate vertices are boxes."""
    lines = ["digraph arena {", "  rankdir=LR;"]
    for v in sorted(a.vertices):
        if v in a.max_vertices:
            shape = "box"
        elif v in a.final:
            shape = "doublecircle"
        else:
            shape = "circle"
        style = ' style=filled fillcolor=lightgrey' if v in a.initial else ""
        lines.append(f'  "{_esc(v)}" [label="{_esc(v)}" shape={shape}{style}];')
    for e in a.edges:
        lines.append(f'  "{_esc(e.src)}" -> "{_esc(e.dst)}" [label="{e.weight}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
