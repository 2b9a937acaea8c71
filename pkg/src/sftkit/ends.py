"""Finite-radius probes of Cayley-graph ends: boundaries, outer components, Menger widths.

An "end at radius R" here is a connected component of the annulus
r <= |g| <= R that reaches the R-sphere.  This is a finite surrogate; ends themselves are limits
and are not computed.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Iterable, Optional

import networkx as nx

from .groups import BallGraph, GroupModel, ball


def boundary(b: BallGraph, inner: Iterable) -> set:
    inner = set(inner)
    out = set()
    for v in inner:
        for _, w in b.adjacency[v]:
            if w not in inner:
                out.add(w)
    return out


@dataclass(frozen=True)
class ComponentSummary:
    first: object  # first vertex in canonical order
    size: int
    outer_vertices: int  # how many R-sphere vertices it contains
    vertices: tuple


def _components(b: BallGraph, keep) -> list[tuple]:
    seen = set()
    comps = []
    for v in b.vertices:
        if v in seen or not keep(v):
            continue
        comp = [v]
        seen.add(v)
        stack = [v]
        while stack:
            u = stack.pop()
            for _, w in b.adjacency[u]:
                if w not in seen and keep(w):
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        idx = b.index
        comps.append(tuple(sorted(comp, key=idx.__getitem__)))
    return comps


def outer_components(model: GroupModel, r: int, R: int, b: Optional[BallGraph] = None) -> list[ComponentSummary]:
    """Components of the annulus r <= |g| <= R that contain an R-sphere vertex.

    The annulus keeps the r-sphere, so on a tree the count equals the
    r-sphere size.
    """
    if not 0 <= r < R:
        raise ValueError("need 0 <= r < R")
    b = b if b is not None else ball(model, R)
    dist = b.distance
    out = []
    for comp in _components(b, lambda v: dist[v] >= r):
        outer = sum(1 for v in comp if dist[v] == R)
        if outer:
            out.append(ComponentSummary(comp[0], len(comp), outer, comp))
    return out


def _flow_value(b: BallGraph, sources, sinks, allowed=None) -> int:
    """Maximum number of vertex-disjoint source-sink paths (vertex-split max-flow)."""
    allowed = set(b.vertices if allowed is None else allowed)
    idx = b.index
    G = nx.DiGraph()
    for v in sorted(allowed, key=idx.__getitem__):
        i = idx[v]
        G.add_edge(("in", i), ("out", i), capacity=1)
        for _, w in b.adjacency[v]:
            if w in allowed:
                G.add_edge(("out", i), ("in", idx[w]))
    src = [v for v in sources if v in allowed]
    dst = [v for v in sinks if v in allowed]
    if not src or not dst:
        return 0
    for v in src:
        G.add_edge("s", ("in", idx[v]))
    for v in dst:
        G.add_edge(("out", idx[v]), "t")
    return int(nx.maximum_flow_value(G, "s", "t"))


def menger_width(model: GroupModel, r: int, R: int, b: Optional[BallGraph] = None) -> int:
    """Vertex-disjoint paths from the r-sphere to the R-sphere inside B_R."""
    if not 0 <= r < R:
        raise ValueError("need 0 <= r < R")
    b = b if b is not None else ball(model, R)
    return _flow_value(b, b.sphere_at(r), b.sphere_at(R))


def component_widths(model: GroupModel, r: int, R: int, b: Optional[BallGraph] = None) -> list[int]:
    """Menger width through each outer component separately."""
    b = b if b is not None else ball(model, R)
    inner = b.sphere_at(r)
    outer = b.sphere_at(R)
    return [_flow_value(b, inner, outer, allowed=c.vertices) for c in outer_components(model, r, R, b)]


def min_vertex_separator(b: BallGraph, sources, sinks, max_size: Optional[int] = None) -> int:
    """Brute-force smallest vertex set meeting every source-sink path (tiny graphs only)."""
    sources, sinks = set(sources), set(sinks)
    verts = list(b.vertices)
    limit = len(verts) if max_size is None else max_size

    def separated(cut):
        start = [v for v in sources if v not in cut]
        seen = set(start)
        stack = list(start)
        while stack:
            u = stack.pop()
            if u in sinks:
                return False
            for _, w in b.adjacency[u]:
                if w not in seen and w not in cut:
                    seen.add(w)
                    stack.append(w)
        return True

    for k in range(limit + 1):
        for cut in itertools.combinations(verts, k):
            if separated(set(cut)):
                return k
    raise ValueError("no separator within the size limit")


@dataclass(frozen=True)
class RadiusProbe:
    r: int
    R: int
    boundary: int
    components: int
    width: int
    component_widths: tuple[int, ...]

    @property
    def max_component_width(self) -> int:
        return max(self.component_widths, default=0)


@dataclass(frozen=True)
class ProbeReport:
    model: str
    radii: tuple[int, ...]
    rows: tuple[RadiusProbe, ...]
    growing: bool

    def to_dict(self) -> dict:
        return {
            "group": self.model,
            "radii": list(self.radii),
            "growing": self.growing,
            "rows": [dict(asdict(row), component_widths=list(row.component_widths)) for row in self.rows],
        }

    def table(self) -> str:
        lines = ["radius\tboundary\tcomponents\twidth\tmax_component_width"]
        for row in self.rows:
            lines.append(f"{row.r}\t{row.boundary}\t{row.components}\t{row.width}\t{row.max_component_width}")
        return "\n".join(lines) + "\n"


def _probe(model: GroupModel, r: int) -> RadiusProbe:
    R = 2 * r
    b = ball(model, R)
    inner = [v for v in b.vertices if b.distance[v] <= r]
    comps = outer_components(model, r, R, b)
    return RadiusProbe(
        r=r,
        R=R,
        boundary=len(boundary(b, inner)),
        components=len(comps),
        width=menger_width(model, r, R, b),
        component_widths=tuple(component_widths(model, r, R, b)),
    )


def thickness_profile(model: GroupModel, radii: Iterable[int], threads: int = 1) -> ProbeReport:
    """Probe (r, 2r) annuli; ``growing`` means the per-component width strictly increases.

    Using the widest single component keeps trees (many thin branches) apart
    from grids (one component whose width grows with r).
    """
    radii = tuple(radii)
    if any(r < 1 for r in radii) or list(radii) != sorted(set(radii)):
        raise ValueError("radii must be positive and strictly increasing")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = tuple(pool.map(lambda r: _probe(model, r), radii))
    else:
        rows = tuple(_probe(model, r) for r in radii)
    widths = [row.max_component_width for row in rows]
    growing = len(widths) > 1 and all(a < b for a, b in zip(widths, widths[1:]))
    return ProbeReport(model.name, radii, rows, growing)
