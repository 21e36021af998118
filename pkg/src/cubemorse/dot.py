"""Graphviz DOT export of a complex's 1-skeleton."""

from __future__ import annotations

import colorsys
from typing import Iterable

from .complex import CubeComplex


def wall_colour(k: int, total: int) -> str:
    """Evenly spaced hues, one per wall."""
    r, g, b = colorsys.hsv_to_rgb((k * 0.618034) % 1.0, 0.65, 0.85)
    return f"#{int(r * 255):02x}{int(g * 255):02x}{int(b * 255):02x}"


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(
    cx: CubeComplex,
    highlight_vertices: Iterable[str] = (),
    highlight_path: Iterable[str] = (),
    highlight_walls: Iterable[str] = (),
    name: str = "complex",
) -> str:
    """DOT text with wall-coloured edges.

    Highlighted vertices are filled, consecutive highlighted path vertices get
    bold edges, and edges dual to highlighted walls are drawn thick and dashed.
    """
    hv = set(highlight_vertices)
    path = list(highlight_path)
    hv |= set(path)
    path_edges = {frozenset(e) for e in zip(path, path[1:])}
    hw = set(highlight_walls)
    for v in hv | set(hw):
        if v in hv:
            cx.vid(v)
        else:
            cx.wid(v)
    lines = [f"graph {_q(name)} {{", "  node [shape=circle, fontsize=8, width=0.2];"]
    for v in cx.vertices:
        attrs = ["style=filled", 'fillcolor="#ffd54f"'] if v in hv else []
        if v == cx.basepoint:
            attrs.append("shape=doublecircle")
        lines.append(f"  {_q(v)}" + (f" [{', '.join(attrs)}]" if attrs else "") + ";")
    total = len(cx.walls)
    for u, v, w in cx.edges:
        attrs = [f'color="{wall_colour(cx.wid(w), total)}"', f"label={_q(w)}", "fontsize=7"]
        if frozenset((u, v)) in path_edges:
            attrs.append("penwidth=3")
        if w in hw:
            attrs += ["penwidth=4", "style=dashed"]
        lines.append(f"  {_q(u)} -- {_q(v)} [{', '.join(attrs)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
