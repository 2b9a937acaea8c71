"""Finitely generated group models with canonical normal forms.

Every model exposes the same small surface: an identity, multiplication and
inversion on :class:`GroupElement` values, a named generator list, and
(optionally) a membership oracle for the cyclic subgroup generated by a
designated central element.  Elements carry the name of their model so that
mixing elements of different groups fails loudly.
"""

from __future__ import annotations

import string
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

DEFAULT_BALL_CAP = 2_000_000


class ModelMismatch(ValueError):
    pass


class UnknownGenerator(ValueError):
    pass


class BallTooLarge(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class GroupElement:
    model: str
    nf: tuple

    def __repr__(self) -> str:
        return f"{self.model}{self.nf!r}"


class GroupModel:
    """Base class; subclasses implement the normal-form arithmetic."""

    name: str
    generators: tuple[str, ...]
    # name of the designated central generator (always generators[0] when set)
    central: Optional[str] = None

    # -- normal-form level, overridden by subclasses
    def _identity(self) -> tuple:
        raise NotImplementedError

    def _mul(self, a: tuple, b: tuple) -> tuple:
        raise NotImplementedError

    def _inv(self, a: tuple) -> tuple:
        raise NotImplementedError

    def _gen(self, index: int) -> tuple:
        raise NotImplementedError

    def _cyclic_power(self, a: tuple) -> Optional[int]:
        raise NotImplementedError

    def _is_central(self, a: tuple) -> bool:
        raise NotImplementedError

    # -- element level
    def element(self, nf) -> GroupElement:
        return GroupElement(self.name, tuple(nf))

    def identity(self) -> GroupElement:
        return GroupElement(self.name, self._identity())

    def _check(self, g: GroupElement) -> None:
        if g.model != self.name:
            raise ModelMismatch(f"element {g!r} does not belong to {self.name}")

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        self._check(g)
        self._check(h)
        return GroupElement(self.name, self._mul(g.nf, h.nf))

    def inverse(self, g: GroupElement) -> GroupElement:
        self._check(g)
        return GroupElement(self.name, self._inv(g.nf))

    def power(self, g: GroupElement, k: int) -> GroupElement:
        base = g if k >= 0 else self.inverse(g)
        out = self.identity()
        for _ in range(abs(k)):
            out = self.multiply(out, base)
        return out

    def generator(self, name: str) -> GroupElement:
        neg = name.startswith("-")
        bare = name[1:] if neg else name
        try:
            idx = self.generators.index(bare)
        except ValueError:
            raise UnknownGenerator(f"{bare!r} is not a generator of {self.name}") from None
        nf = self._gen(idx)
        return GroupElement(self.name, self._inv(nf) if neg else nf)

    def letters(self) -> list[str]:
        """Signed letters in the fixed BFS order: g1, -g1, g2, -g2, ..."""
        out = []
        for g in self.generators:
            out += [g, "-" + g]
        return out

    def evaluate_word(self, word: Iterable[str]) -> GroupElement:
        nf = self._identity()
        for letter in word:
            nf = self._mul(nf, self.generator(letter).nf)
        return GroupElement(self.name, nf)

    @property
    def has_cyclic_oracle(self) -> bool:
        return self.central is not None

    def central_element(self) -> GroupElement:
        if self.central is None:
            raise ValueError(f"{self.name} has no designated central element")
        return self.generator(self.central)

    def in_cyclic_subgroup(self, g: GroupElement) -> Optional[int]:
        """Return k with g = a**k for the designated central a, else None."""
        if self.central is None:
            raise ValueError(f"{self.name} has no cyclic-membership oracle")
        self._check(g)
        return self._cyclic_power(g.nf)

    def is_central(self, g: GroupElement) -> bool:
        self._check(g)
        return self._is_central(g.nf)

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


class FreeAbelian(GroupModel):
    """Z^n with coordinate-wise addition; the first generator is central."""

    _NAMES = ("x", "y", "z", "w")

    def __init__(self, rank: int, name: Optional[str] = None, step: int = 1):
        if not 1 <= rank <= 4:
            raise ValueError("FreeAbelian rank must be between 1 and 4")
        self.rank = rank
        # step != 1 models the subgroup step*Z^n with literal ambient coordinates
        self.step = step
        self.name = name or ("z" if rank == 1 else f"z{rank}")
        self.generators = self._NAMES[:rank]
        self.central = self.generators[0]

    def _identity(self):
        return (0,) * self.rank

    def _mul(self, a, b):
        return tuple(x + y for x, y in zip(a, b))

    def _inv(self, a):
        return tuple(-x for x in a)

    def _gen(self, index):
        return tuple(self.step if i == index else 0 for i in range(self.rank))

    def _cyclic_power(self, a):
        if any(a[1:]) or a[0] % self.step:
            return None
        return a[0] // self.step

    def _is_central(self, a):
        return True


class FreeGroup(GroupModel):
    """Free group on k letters; normal forms are freely reduced words of signed ints."""

    def __init__(self, k: int):
        if not 1 <= k <= 3:
            raise ValueError("FreeGroup rank must be between 1 and 3")
        self.k = k
        self.name = f"free{k}"
        self.generators = ("a", "b", "c")[:k]
        # only the rank-one free group has a nontrivial center
        self.central = "a" if k == 1 else None

    def _identity(self):
        return ()

    def _mul(self, a, b):
        out = list(a)
        for letter in b:
            if out and out[-1] == -letter:
                out.pop()
            else:
                out.append(letter)
        return tuple(out)

    def _inv(self, a):
        return tuple(-x for x in reversed(a))

    def _gen(self, index):
        return (index + 1,)

    def _cyclic_power(self, a):
        if all(x == 1 for x in a):
            return len(a)
        if all(x == -1 for x in a):
            return -len(a)
        return None

    def _is_central(self, a):
        return self.k == 1 or a == ()


class Heisenberg(GroupModel):
    """Discrete Heisenberg group as triples (a, b, c).

    (a, b, c) * (a', b', c') = (a + a', b + b', c + c' + a * b').
    Generators are ordered (z, x, y) with z = (0, 0, 1) central.
    """

    name = "heisenberg"
    generators = ("z", "x", "y")
    central = "z"

    def _identity(self):
        return (0, 0, 0)

    def _mul(self, p, q):
        return (p[0] + q[0], p[1] + q[1], p[2] + q[2] + p[0] * q[1])

    def _inv(self, p):
        a, b, c = p
        return (-a, -b, a * b - c)

    def _gen(self, index):
        return ((0, 0, 1), (1, 0, 0), (0, 1, 0))[index]

    def _cyclic_power(self, p):
        return p[2] if p[0] == 0 and p[1] == 0 else None

    def _is_central(self, p):
        return p[0] == 0 and p[1] == 0


class DirectProduct(GroupModel):
    """Direct product of two models; normal forms are pairs of normal forms.

    Right-factor generator names that collide with left ones are renamed to the
    first unused lowercase letters.  The designated central element is the
    left factor's, embedded as (a, 1).
    """

    def __init__(self, left: GroupModel, right: GroupModel):
        self.left = left
        self.right = right
        self.name = f"product:{left.name}:{right.name}"
        names = list(left.generators)
        spare = (c for c in string.ascii_lowercase if c not in left.generators and c not in right.generators)
        for g in right.generators:
            names.append(next(spare) if g in names else g)
        self.generators = tuple(names)
        self.central = self.generators[0] if left.central == left.generators[0] else None

    def _identity(self):
        return (self.left._identity(), self.right._identity())

    def _mul(self, p, q):
        return (self.left._mul(p[0], q[0]), self.right._mul(p[1], q[1]))

    def _inv(self, p):
        return (self.left._inv(p[0]), self.right._inv(p[1]))

    def _gen(self, index):
        nl = len(self.left.generators)
        if index < nl:
            return (self.left._gen(index), self.right._identity())
        return (self.left._identity(), self.right._gen(index - nl))

    def _cyclic_power(self, p):
        if p[1] != self.right._identity():
            return None
        return self.left._cyclic_power(p[0])

    def _is_central(self, p):
        return self.left._is_central(p[0]) and self.right._is_central(p[1])


_SIMPLE = {
    "z": lambda: FreeAbelian(1),
    "z2": lambda: FreeAbelian(2),
    "z3": lambda: FreeAbelian(3),
    "z4": lambda: FreeAbelian(4),
    "2z": lambda: FreeAbelian(1, name="2z", step=2),
    "free1": lambda: FreeGroup(1),
    "free2": lambda: FreeGroup(2),
    "free3": lambda: FreeGroup(3),
    "heisenberg": Heisenberg,
}

_CACHE: dict[str, GroupModel] = {}


def get_model(name: str) -> GroupModel:
    """Look up a shipped model by name (``z2``, ``heisenberg``, ``product:z:free2`` ...)."""
    if name in _CACHE:
        return _CACHE[name]
    if name in _SIMPLE:
        model = _SIMPLE[name]()
    elif name.startswith("product:"):
        parts = name.split(":")
        if len(parts) != 3:
            raise KeyError(f"malformed product name {name!r}")
        model = DirectProduct(get_model(parts[1]), get_model(parts[2]))
    else:
        raise KeyError(f"unknown group {name!r}")
    _CACHE[name] = model
    return model


# -- balls -----------------------------------------------------------------


@dataclass(frozen=True)
class BallGraph:
    """Induced Cayley-graph ball; ``vertices`` is in canonical BFS order."""

    model: GroupModel
    center: GroupElement
    radius: int
    vertices: tuple[GroupElement, ...]
    distance: dict = field(repr=False)
    # vertex -> tuple of (letter, neighbor) for neighbors inside the ball
    adjacency: dict = field(repr=False)
    index: dict = field(repr=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index.update((v, i) for i, v in enumerate(self.vertices))

    @property
    def sphere(self) -> tuple[GroupElement, ...]:
        return tuple(v for v in self.vertices if self.distance[v] == self.radius)

    def sphere_at(self, r: int) -> tuple[GroupElement, ...]:
        return tuple(v for v in self.vertices if self.distance[v] == r)

    @property
    def edges(self) -> list[tuple[GroupElement, GroupElement]]:
        idx = self.index
        out = set()
        for v, nbrs in self.adjacency.items():
            for _, w in nbrs:
                out.add((v, w) if idx[v] < idx[w] else (w, v))
        return sorted(out, key=lambda e: (idx[e[0]], idx[e[1]]))

    def __contains__(self, g) -> bool:
        return g in self.distance

    def __len__(self) -> int:
        return len(self.vertices)


def ball(model: GroupModel, radius: int, center: Optional[GroupElement] = None,
         max_vertices: int = DEFAULT_BALL_CAP) -> BallGraph:
    if radius < 0:
        raise ValueError("radius must be non-negative")
    center = model.identity() if center is None else center
    letters = [(s, model.generator(s)) for s in model.letters()]
    dist = {center: 0}
    order = [center]
    queue = deque([center])
    while queue:
        v = queue.popleft()
        if dist[v] == radius:
            continue
        for _, s in letters:
            w = model.multiply(v, s)
            if w not in dist:
                dist[w] = dist[v] + 1
                order.append(w)
                if len(order) > max_vertices:
                    raise BallTooLarge(f"ball of radius {radius} in {model.name} exceeds {max_vertices} vertices")
                queue.append(w)
    adjacency = {}
    for v in order:
        nbrs = []
        for name, s in letters:
            w = model.multiply(v, s)
            if w in dist:
                nbrs.append((name, w))
        adjacency[v] = tuple(nbrs)
    return BallGraph(model, center, radius, tuple(order), dist, adjacency)


def geodesic_word(model: GroupModel, g: GroupElement, max_radius: int = 12) -> list[str]:
    """Shortlex-first geodesic word for ``g`` (BFS with the fixed letter order)."""
    model._check(g)
    start = model.identity()
    parent: dict = {start: None}
    frontier = [start]
    letters = [(s, model.generator(s)) for s in model.letters()]
    for _ in range(max_radius + 1):
        if g in parent:
            break
        nxt = []
        for v in frontier:
            for name, s in letters:
                w = model.multiply(v, s)
                if w not in parent:
                    parent[w] = (v, name)
                    nxt.append(w)
        frontier = nxt
    if g not in parent:
        raise BallTooLarge(f"{g!r} not within word length {max_radius}")
    word = []
    v = g
    while parent[v] is not None:
        v, name = parent[v]
        word.append(name)
    return word[::-1]


def word_length(model: GroupModel, g: GroupElement, max_radius: int = 12) -> int:
    return len(geodesic_word(model, g, max_radius))


# -- coset embeddings --------------------------------------------------------


@dataclass(frozen=True)
class CosetEmbedding:
    """A subgroup H of G with g = rep(g) * embed(h(g))."""

    name: str
    ambient: GroupModel
    subgroup: GroupModel
    embed: Callable[[GroupElement], GroupElement]
    _decompose: Callable[[GroupElement], tuple[GroupElement, GroupElement]]
    is_rep: Callable[[GroupElement], bool]
    finite_index: bool = True

    def decompose(self, g: GroupElement) -> tuple[GroupElement, GroupElement]:
        self.ambient._check(g)
        return self._decompose(g)


def coset_decompose(e: CosetEmbedding, g: GroupElement) -> tuple[GroupElement, GroupElement]:
    return e.decompose(g)


def _z_in_z2() -> CosetEmbedding:
    G, H = get_model("z2"), get_model("z")

    def decompose(g):
        a, b = g.nf
        return G.element((0, b)), H.element((a,))

    return CosetEmbedding(
        "z-in-z2", G, H,
        embed=lambda h: G.element((h.nf[0], 0)),
        _decompose=decompose,
        is_rep=lambda g: g.nf[0] == 0,
    )


def _two_z_in_z() -> CosetEmbedding:
    G, H = get_model("z"), get_model("2z")

    def decompose(g):
        r = g.nf[0] % 2
        return G.element((r,)), H.element((g.nf[0] - r,))

    return CosetEmbedding(
        "2z-in-z", G, H,
        embed=lambda h: G.element(h.nf),
        _decompose=decompose,
        is_rep=lambda g: g.nf[0] in (0, 1),
    )


def _z_in_heisenberg() -> CosetEmbedding:
    G, H = get_model("heisenberg"), get_model("z")

    def decompose(g):
        a, b, c = g.nf
        return G.element((a, b, 0)), H.element((c,))

    return CosetEmbedding(
        "z-in-heisenberg", G, H,
        embed=lambda h: G.element((0, 0, h.nf[0])),
        _decompose=decompose,
        is_rep=lambda g: g.nf[2] == 0,
        finite_index=False,
    )


_EMBEDDINGS = {
    "z-in-z2": _z_in_z2,
    "2z-in-z": _two_z_in_z,
    "z-in-heisenberg": _z_in_heisenberg,
}


def get_embedding(name: str) -> CosetEmbedding:
    if name not in _EMBEDDINGS:
        raise KeyError(f"unknown embedding {name!r}; choose from {sorted(_EMBEDDINGS)}")
    return _EMBEDDINGS[name]()


def embedding_names() -> list[str]:
    return sorted(_EMBEDDINGS)


def parse_word(text: str | Sequence[str]) -> list[str]:
    if isinstance(text, str):
        return [t for t in text.replace(",", " ").split() if t]
    return list(text)
