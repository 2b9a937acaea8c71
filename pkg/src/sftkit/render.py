"""Deterministic SVG rendering of Z^2 patches and target-group ball assignments."""

from __future__ import annotations

import colorsys
from pathlib import Path
from typing import Optional, Sequence
from xml.sax.saxutils import escape

from .groups import GroupModel
from .reduction import split_symbol
from .sft import PartialConfiguration

CELL = 24
PALETTE = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
    "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac",
)
# border colors by direction index (2..n)
BORDERS = ("#000000", "#555555", "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b")


def color(k: int) -> str:
    if k < len(PALETTE):
        return PALETTE[k]
    # golden-angle hues past the fixed palette
    r, g, b = colorsys.hls_to_rgb((k * 0.618033988749895) % 1.0, 0.55, 0.6)
    return "#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255))


def _document(width: int, height: int, body: list[str], title: str) -> str:
    head = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f"<title>{escape(title)}</title>",
    ]
    return "\n".join(head + body + ["</svg>", ""])


def render_z2_patch(patch: dict[tuple[int, int], str], alphabet: Optional[Sequence[str]] = None) -> str:
    """Unit squares colored by symbol; row 0 at the bottom."""
    if not patch:
        raise ValueError("cannot render an empty patch")
    symbols = list(alphabet) if alphabet is not None else sorted(set(patch.values()))
    xs = [i for i, _ in patch]
    ys = [j for _, j in patch]
    x0, y1 = min(xs), max(ys)
    w = (max(xs) - x0 + 1) * CELL
    h = (y1 - min(ys) + 1) * CELL
    body = []
    for (i, j), a in sorted(patch.items(), key=lambda kv: (-kv[0][1], kv[0][0])):
        x = (i - x0) * CELL
        y = (y1 - j) * CELL
        body.append(f'<rect x="{x}" y="{y}" width="{CELL}" height="{CELL}" '
                    f'fill="{color(symbols.index(a))}"><title>{escape(a)} ({i},{j})</title></rect>')
    return _document(w, h, body, "z2 patch")


def render_ball_assignment(model: GroupModel, x: PartialConfiguration,
                           order: Sequence, base_alphabet: Optional[Sequence[str]] = None) -> str:
    """One row per assigned g1-line segment, cells placed by their g1-exponent.

    ``order`` fixes the canonical element order (normally the ball's BFS
    order); a row's reference element is its first member in that order.
    Fill encodes the first symbol component, the border the direction index.
    """
    if not x:
        raise ValueError("cannot render an empty assignment")
    rows: list[tuple] = []  # (reference element, [(element, l)])
    placed = {}
    for v in order:
        if v not in x or v in placed:
            continue
        v_inv = model.inverse(v)
        members = []
        for w in order:
            if w in x and w not in placed:
                ell = model.in_cyclic_subgroup(model.multiply(v_inv, w))
                if ell is not None:
                    members.append((w, ell))
                    placed[w] = True
        rows.append((v, sorted(members, key=lambda m: m[1])))
    firsts = [split_symbol(s)[0] for s in x.values()]
    symbols = list(base_alphabet) if base_alphabet is not None else sorted(set(firsts))
    lo = min(ell for _, members in rows for _, ell in members)
    hi = max(ell for _, members in rows for _, ell in members)
    w = (hi - lo + 1) * CELL + 2 * CELL
    h = len(rows) * CELL
    body = []
    for r, (ref, members) in enumerate(rows):
        for g, ell in members:
            a, d = split_symbol(x[g])
            cx = (ell - lo) * CELL + CELL
            body.append(
                f'<rect x="{cx + 2}" y="{r * CELL + 2}" width="{CELL - 4}" height="{CELL - 4}" '
                f'fill="{color(symbols.index(a))}" stroke="{BORDERS[d % len(BORDERS)]}" stroke-width="3">'
                f"<title>{escape(x[g])} {escape(repr(g.nf))}</title></rect>"
            )
    return _document(w, h, body, f"{model.name} ball assignment")


def write_svg(text: str, out) -> Path:
    path = Path(out)
    path.write_text(text, encoding="utf-8")
    return path
