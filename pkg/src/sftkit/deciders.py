"""Emptiness deciders and the ball-admissibility semi-decider."""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional

from .groups import BallGraph, FreeAbelian, FreeGroup, ball
from .sft import PartialConfiguration, SftDefinition

DEFAULT_BUDGET = 10_000_000
DEFAULT_MAX_RADIUS = 4

EMPTY = "empty"
NONEMPTY = "nonempty"
UNKNOWN = "unknown"

ADMISSIBLE = "admissible"
INADMISSIBLE = "inadmissible"
BUDGET_EXCEEDED = "budget_exceeded"


class SearchBudgetExceeded(RuntimeError):
    def __init__(self, radius: int, nodes: int, budget: int):
        super().__init__(f"search at radius {radius} exceeded budget of {budget} nodes")
        self.radius = radius
        self.nodes = nodes
        self.budget = budget


class WrongModel(ValueError):
    pass


class NotOneStep(ValueError):
    pass


def default_budget() -> int:
    env = os.environ.get("SFT_BUDGET")
    return int(env) if env else DEFAULT_BUDGET


@dataclass(frozen=True)
class EmptinessVerdict:
    kind: str
    method: str
    radius: Optional[int] = None
    # cycle (list of symbols), surviving symbol list, or a ball witness
    witness: Any = None
    detail: dict = field(default_factory=dict)

    @property
    def is_empty(self) -> bool:
        return self.kind == EMPTY


@dataclass(frozen=True)
class SearchResult:
    status: str
    radius: int
    nodes: int
    witness: Optional[PartialConfiguration] = None


# -- transition-graph deciders -------------------------------------------------


def _require_one_step(s: SftDefinition) -> None:
    if not s.is_one_step:
        raise NotOneStep("the SFT is not one-step; recode it with to_one_step first")


def _trim(symbols: list[str], succ: dict, pred: dict) -> list[str]:
    alive = set(symbols)
    changed = True
    while changed:
        changed = False
        for a in symbols:
            if a in alive and not (succ[a] & alive and pred[a] & alive):
                alive.discard(a)
                changed = True
    return [a for a in symbols if a in alive]


def _longest_path(symbols: list[str], succ: dict) -> int:
    """Vertex count of the longest path in an acyclic digraph."""
    memo: dict[str, int] = {}

    def depth(a):
        if a not in memo:
            memo[a] = 1 + max((depth(b) for b in succ[a]), default=0)
        return memo[a]

    return max((depth(a) for a in symbols), default=0)


def decide_z(s: SftDefinition) -> EmptinessVerdict:
    """Exact emptiness for one-step SFTs on Z via the symbol transition graph."""
    if not (isinstance(s.model, (FreeAbelian, FreeGroup)) and len(s.model.generators) == 1
            and getattr(s.model, "step", 1) == 1):
        raise WrongModel(f"decide_z needs a rank-one model, got {s.model.name}")
    _require_one_step(s)
    symbols = list(s.alphabet)
    allowed = s.allowed_pairs(s.model.generators[0])
    succ = {a: {b for (x, b) in allowed if x == a} for a in symbols}
    pred = {a: {x for (x, b) in allowed if b == a} for a in symbols}
    alive = _trim(symbols, succ, pred)
    if not alive:
        return EmptinessVerdict(EMPTY, "transition-graph", witness=[],
                                detail={"obstruction_length": _longest_path(symbols, succ) + 1})
    # every survivor has a surviving successor, so walking must close a cycle
    alive_set = set(alive)
    path = [alive[0]]
    seen = {alive[0]: 0}
    while True:
        nxt = next(b for b in alive if b in succ[path[-1]] and b in alive_set)
        if nxt in seen:
            cycle = path[seen[nxt]:]
            break
        seen[nxt] = len(path)
        path.append(nxt)
    return EmptinessVerdict(NONEMPTY, "transition-graph", witness=cycle,
                            detail={"period": len(cycle), "surviving": alive})


def decide_tree(s: SftDefinition) -> EmptinessVerdict:
    """Exact emptiness for one-step SFTs on free groups by symbol elimination."""
    if not (isinstance(s.model, FreeGroup) or (isinstance(s.model, FreeAbelian) and s.model.rank == 1
                                               and s.model.step == 1)):
        raise WrongModel(f"decide_tree needs a free group, got {s.model.name}")
    _require_one_step(s)
    symbols = list(s.alphabet)
    relations = [s.allowed_pairs(g) for g in s.model.generators]
    alive = set(symbols)
    rounds = 0
    while True:
        dead = set()
        for a in alive:
            for rel in relations:
                fwd = any((a, b) in rel for b in alive)
                bwd = any((b, a) in rel for b in alive)
                if not (fwd and bwd):
                    dead.add(a)
                    break
        if not dead:
            break
        alive -= dead
        rounds += 1
    surviving = [a for a in symbols if a in alive]
    kind = NONEMPTY if surviving else EMPTY
    return EmptinessVerdict(kind, "symbol-elimination", witness=surviving, detail={"rounds": rounds})


def has_periodic_point(s: SftDefinition, max_period: int) -> Optional[tuple[str, ...]]:
    """Brute force over periodic configurations on Z with period <= max_period.

    Works for arbitrary forbidden blocks (not just one-step).  Returns the
    first period word found, or None.
    """
    if not (isinstance(s.model, FreeAbelian) and s.model.rank == 1 and s.model.step == 1):
        raise WrongModel("periodic search is implemented for Z only")
    pats = [([d.nf[0] for d in p.domain], p.symbols) for p in s.forbidden]
    for period in range(1, max_period + 1):
        for word in itertools.product(s.alphabet.symbols, repeat=period):
            if all(
                any(word[(i + d) % period] != sym for d, sym in zip(offs, syms))
                for offs, syms in pats
                for i in range(period)
            ):
                return word
    return None


# -- ball search ---------------------------------------------------------------


class _Compiled:
    """Forbidden-pattern placements inside a ball as constraints on vertex domains.

    Domains are bitmasks over alphabet indices.  Each constraint is a tuple of
    ball indices with the set of forbidden symbol tuples placed on it.
    """

    def __init__(self, s: SftDefinition, b: BallGraph):
        model = s.model
        idx = b.index
        sym_idx = {a: i for i, a in enumerate(s.alphabet)}
        self.n = len(b.vertices)
        self.nsym = len(s.alphabet)
        self.full = (1 << self.nsym) - 1
        self.trivially_violated = any(not p.domain for p in s.forbidden)
        by_domain: dict[tuple, list] = {}
        for p in s.forbidden:
            if p.domain:
                by_domain.setdefault(p.domain, []).append(tuple(sym_idx[a] for a in p.symbols))
        placed: dict[tuple, set] = {}
        for domain, symlist in by_domain.items():
            d0_inv = model.inverse(domain[0])
            for v in b.vertices:
                at = model.multiply(v, d0_inv)
                cells = [model.multiply(at, d) for d in domain]
                if all(c in idx for c in cells):
                    placed.setdefault(tuple(idx[c] for c in cells), set()).update(symlist)
        self.cells: list[tuple] = []
        # per constraint and position: value -> forbidden tuples with that value there
        self.by_pos: list[list[dict]] = []
        self.watch: list[list[tuple[int, int]]] = [[] for _ in range(self.n)]
        for key in sorted(placed):
            ci = len(self.cells)
            self.cells.append(key)
            table = [{} for _ in key]
            for t in sorted(placed[key]):
                for pos, val in enumerate(t):
                    table[pos].setdefault(val, []).append(t)
            self.by_pos.append(table)
            for pos, v in enumerate(key):
                self.watch[v].append((ci, pos))

    def _revise(self, dom: list, ci: int, pos: int) -> bool:
        """Drop values at one position that no allowed tuple supports; True if changed."""
        cells = self.cells[ci]
        others = 1
        for q, c in enumerate(cells):
            if q != pos:
                others *= bin(dom[c]).count("1")
        v = cells[pos]
        keep = dom[v]
        for val, tuples in self.by_pos[ci][pos].items():
            if not keep >> val & 1 or len(tuples) < others:
                continue
            hits = sum(1 for t in tuples if all(dom[c] >> t[q] & 1 for q, c in enumerate(cells)))
            if hits >= others:
                keep &= ~(1 << val)
        if keep != dom[v]:
            dom[v] = keep
            return True
        return False

    def propagate(self, dom: list, changed) -> bool:
        """Arc consistency from the changed vertices; False on a wiped-out domain."""
        queue = list(changed)
        queued = set(queue)
        while queue:
            u = queue.pop()
            queued.discard(u)
            for ci, upos in self.watch[u]:
                for pos, v in enumerate(self.cells[ci]):
                    if (pos == upos and len(self.cells[ci]) > 1) or not self._revise(dom, ci, pos):
                        continue
                    if not dom[v]:
                        return False
                    if v not in queued:
                        queued.add(v)
                        queue.append(v)
        return True

    def root(self) -> Optional[list]:
        if self.trivially_violated or self.nsym == 0:
            return None
        dom = [self.full] * self.n
        return dom if self.propagate(dom, range(self.n)) else None


class _Budget(Exception):
    pass


class _Walker:
    """Depth-first search maintaining arc consistency.

    Vertices are assigned in ball order and values tried in alphabet order;
    pruning only removes values that extend to no solution, so solutions come
    out in lexicographic order.  ``nodes`` counts every value assignment tried.
    """

    def __init__(self, c: _Compiled, budget: float, first: Optional[int] = None):
        self.c = c
        self.budget = budget
        self.first = first
        self.nodes = 0

    def solutions(self) -> Iterator[list]:
        c = self.c
        dom = c.root()
        if dom is None:
            return
        if self.first is not None:
            dom[0] &= 1 << self.first
            if not dom[0]:
                return
        frames = [(dom, dom[0])]
        while frames:
            k = len(frames) - 1
            base, cand = frames[-1]
            if not cand:
                frames.pop()
                continue
            bit = cand & -cand
            frames[-1] = (base, cand ^ bit)
            self.nodes += 1
            if self.nodes > self.budget:
                raise _Budget()
            d = list(base)
            d[k] = bit
            if not c.propagate(d, (k,)):
                continue
            if k == c.n - 1:
                yield [x.bit_length() - 1 for x in d]
            else:
                frames.append((d, d[k + 1]))


def _to_config(b: BallGraph, s: SftDefinition, assign: list) -> PartialConfiguration:
    syms = s.alphabet.symbols
    return PartialConfiguration({v: syms[a] for v, a in zip(b.vertices, assign)})


def _first_solution(c: _Compiled, budget: float, first: Optional[int] = None):
    """Return (assignment or None, nodes, exceeded)."""
    w = _Walker(c, budget, first)
    try:
        for sol in w.solutions():
            return sol, w.nodes, False
    except _Budget:
        return None, w.nodes, True
    return None, w.nodes, False


def ball_admissibility_search(s: SftDefinition, radius: int, budget: Optional[int] = None,
                              threads: int = 1) -> SearchResult:
    """Exhaustive search over symbol assignments to the ball of ``radius``.

    Vertices are filled in canonical BFS order and symbols tried in alphabet
    order, so an admissible result carries the lexicographically first witness.
    The search splits on the symbol at the identity; with ``threads > 1`` those
    branches run concurrently, and the result (status, witness and node count)
    is the one the sequential run reports.
    """
    if radius < 0:
        raise ValueError("radius must be non-negative")
    budget = default_budget() if budget is None else budget
    b = ball(s.model, radius)
    c = _Compiled(s, b)
    dom = c.root()
    if dom is None:
        return SearchResult(INADMISSIBLE, radius, 0)
    branches = [a for a in range(c.nsym) if dom[0] >> a & 1]
    if threads > 1 and len(branches) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = pool.map(lambda a: _first_solution(c, budget, a), branches)
    else:
        results = None
    sol, nodes = None, 0
    for a in branches:
        if results is not None:
            bsol, bnodes, _ = next(results)
        else:
            bsol, bnodes, _ = _first_solution(c, budget - nodes, a)
        nodes += bnodes
        if nodes > budget:
            return SearchResult(BUDGET_EXCEEDED, radius, budget + 1)
        if bsol is not None:
            sol = bsol
            break
    if sol is None:
        return SearchResult(INADMISSIBLE, radius, nodes)
    return SearchResult(ADMISSIBLE, radius, nodes, _to_config(b, s, sol))


def enumerate_admissible(s: SftDefinition, b: BallGraph, limit: Optional[int] = None) -> Iterator[PartialConfiguration]:
    """Every locally admissible assignment of ``b`` in canonical order."""
    w = _Walker(_Compiled(s, b), float("inf"))
    for count, sol in enumerate(w.solutions()):
        if limit is not None and count >= limit:
            raise SearchBudgetExceeded(b.radius, count, limit)
        yield _to_config(b, s, sol)


def emptiness_semidecide(s: SftDefinition, max_radius: int = DEFAULT_MAX_RADIUS,
                         budget: Optional[int] = None, threads: int = 1) -> EmptinessVerdict:
    """Search balls of growing radius; never claims Nonempty."""
    budget = default_budget() if budget is None else budget
    last = None
    for r in range(max_radius + 1):
        res = ball_admissibility_search(s, r, budget, threads)
        if res.status == BUDGET_EXCEEDED:
            raise SearchBudgetExceeded(r, res.nodes, budget)
        if res.status == INADMISSIBLE:
            return EmptinessVerdict(EMPTY, "ball-search", radius=r, detail={"nodes": res.nodes})
        last = res
    return EmptinessVerdict(UNKNOWN, "ball-search", radius=max_radius, witness=last.witness,
                            detail={"nodes": last.nodes})


def verify_verdict(s: SftDefinition, v: EmptinessVerdict, budget: Optional[int] = None) -> bool:
    """Re-check a certificate independently of the procedure that produced it."""
    from .sft import locally_admissible

    if v.method == "ball-search":
        res = ball_admissibility_search(s, v.radius, budget)
        if v.kind == EMPTY:
            return res.status == INADMISSIBLE
        return v.witness is not None and locally_admissible(v.witness, s) and len(v.witness) == len(ball(s.model, v.radius))
    if v.method == "transition-graph":
        if v.kind == EMPTY:
            n = v.detail["obstruction_length"]
            return has_periodic_point(s, len(s.alphabet)) is None and not _has_word(s, n)
        cyc = v.witness
        allowed = s.allowed_pairs(s.model.generators[0])
        return all((cyc[i], cyc[(i + 1) % len(cyc)]) in allowed for i in range(len(cyc)))
    if v.method == "symbol-elimination":
        alive = set(v.witness)
        if v.kind == EMPTY:
            return decide_tree(s).kind == EMPTY
        for g in s.model.generators:
            rel = s.allowed_pairs(g)
            for a in alive:
                if not (any((a, b) in rel for b in alive) and any((b, a) in rel for b in alive)):
                    return False
        return True
    raise ValueError(f"unknown verdict method {v.method!r}")


def _has_word(s: SftDefinition, n: int) -> bool:
    """Is there an allowed word of length n for a one-step Z-SFT?"""
    allowed = s.allowed_pairs(s.model.generators[0])
    layer = set(s.alphabet)
    for _ in range(n - 1):
        layer = {b for (a, b) in allowed if a in layer}
    return bool(layer)
