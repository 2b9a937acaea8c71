"""Subgroup lifting and the Z^2-to-G tileset compiler with configuration transfer."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

from .groups import CosetEmbedding, GroupElement, GroupModel, ball
from .sft import (
    Alphabet,
    MalformedSft,
    PartialConfiguration,
    Pattern,
    SftDefinition,
)

SEP = "|"


class ReductionError(ValueError):
    pass


class SupportError(ValueError):
    def __init__(self, message: str, element: Optional[GroupElement] = None):
        super().__init__(message)
        self.element = element


class RayTooShort(ReductionError):
    pass


class EncodingStalled(ReductionError):
    def __init__(self, frontier):
        super().__init__(f"encoding stalled with {len(frontier)} uncovered elements")
        self.frontier = frontier


class CheckerBug(RuntimeError):
    pass


# -- subgroup lifting ----------------------------------------------------------


def lift_subgroup_sft(s_h: SftDefinition, e: CosetEmbedding) -> SftDefinition:
    """Forbid the same patterns, re-indexed into the ambient group."""
    if s_h.model.name != e.subgroup.name:
        raise ReductionError(f"SFT lives on {s_h.model.name}, embedding subgroup is {e.subgroup.name}")
    forbidden = tuple(Pattern(tuple(e.embed(d) for d in p.domain), p.symbols) for p in s_h.forbidden)
    return SftDefinition(e.ambient, s_h.alphabet, forbidden)


def lift_configuration(c: PartialConfiguration, e: CosetEmbedding,
                       window: Iterable[GroupElement]) -> PartialConfiguration:
    """c'(g) = c(h(g)) on ``window``."""
    out = {}
    for g in window:
        _, h = e.decompose(g)
        if h not in c:
            raise SupportError(f"h({g!r}) = {h!r} is outside the subgroup configuration", g)
        out[g] = c[h]
    return PartialConfiguration(out)


# -- rays ----------------------------------------------------------------------


@dataclass
class RayWord:
    """Eventually periodic ray ``prefix + period^inf`` of positive generator letters.

    An empty ``period`` denotes a finite ray usable only up to ``len(prefix)``.
    """

    model: GroupModel
    prefix: tuple[str, ...]
    period: tuple[str, ...]
    _prefixes: list = field(default_factory=list, repr=False)
    verified_length: int = field(default=0, repr=False)

    def __post_init__(self):
        self.prefix = tuple(self.prefix)
        self.period = tuple(self.period)
        for g in self.prefix + self.period:
            if g not in self.model.generators:
                raise ReductionError(f"ray letter {g!r} is not a positive generator of {self.model.name}")
        if not self.prefix and not self.period:
            raise ReductionError("empty ray")
        if not self._prefixes:
            self._prefixes = [self.model.identity()]

    @property
    def is_finite(self) -> bool:
        return not self.period

    @property
    def max_length(self) -> Optional[int]:
        return len(self.prefix) if self.is_finite else None

    def letter(self, j: int) -> str:
        """The j-th letter w_j, 1-based."""
        if j < 1:
            raise IndexError(j)
        if j <= len(self.prefix):
            return self.prefix[j - 1]
        if self.is_finite:
            raise RayTooShort(f"ray has only {len(self.prefix)} letters, needed w_{j}")
        return self.period[(j - len(self.prefix) - 1) % len(self.period)]

    def point(self, j: int) -> GroupElement:
        """p_j = w_1 ... w_j (p_0 is the identity)."""
        while len(self._prefixes) <= j:
            k = len(self._prefixes)
            self._prefixes.append(self.model.multiply(self._prefixes[-1], self.model.generator(self.letter(k))))
        return self._prefixes[j]

    def subword_violation(self, length: int) -> Optional[tuple[int, int, int]]:
        """First (i, j, k) with p_i^-1 p_j = a^k, 0 <= i < j <= length."""
        inv = [self.model.inverse(self.point(i)) for i in range(length + 1)]
        for j in range(1, length + 1):
            pj = self.point(j)
            for i in range(j):
                k = self.model.in_cyclic_subgroup(self.model.multiply(inv[i], pj))
                if k is not None:
                    return i, j, k
        return None

    def verify(self, length: int) -> bool:
        if self.max_length is not None and length > self.max_length:
            raise RayTooShort(f"cannot verify {length} letters of a {self.max_length}-letter ray")
        if length <= self.verified_length:
            return True
        ok = self.subword_violation(length) is None
        if ok:
            self.verified_length = length
        return ok

    def to_dict(self) -> dict:
        return {"prefix": list(self.prefix), "period": list(self.period)}


def find_ray(model: GroupModel, length: int, budget: int = 1_000_000) -> Optional[RayWord]:
    """Search for a ray whose subwords avoid the designated central cyclic subgroup.

    Pure powers of each non-central generator are tried first, then a
    depth-first search over positive letters.  Returns None when the search
    space is exhausted or the budget runs out (see ``find_ray_status``).
    """
    return find_ray_status(model, length, budget)[0]


def find_ray_status(model: GroupModel, length: int, budget: int = 1_000_000) -> tuple[Optional[RayWord], str]:
    """Like :func:`find_ray` but also reports ``found``, ``exhausted`` or ``budget``."""
    if not model.has_cyclic_oracle:
        raise ReductionError(f"{model.name} has no designated central element")
    for g in model.generators:
        if g == model.central:
            continue
        ray = RayWord(model, (), (g,))
        if ray.verify(length):
            return ray, "found"
    letters = list(model.generators)
    # stack of (word, prefix points); prune on any subword landing in <a>
    nodes = 0
    word: list[str] = []
    points = [model.identity()]
    inverses = [model.identity()]
    choice = [-1]
    while choice:
        depth = len(choice) - 1
        if depth == length:
            return RayWord(model, tuple(word), ()), "found"
        choice[-1] += 1
        if choice[-1] >= len(letters):
            choice.pop()
            if word:
                word.pop()
                points.pop()
                inverses.pop()
            continue
        nodes += 1
        if nodes > budget:
            return None, "budget"
        g = letters[choice[-1]]
        p = model.multiply(points[-1], model.generator(g))
        if any(model.in_cyclic_subgroup(model.multiply(q, p)) is not None for q in inverses):
            continue
        word.append(g)
        points.append(p)
        inverses.append(model.inverse(p))
        choice.append(-1)
    return None, "exhausted"


# -- the Z^2 -> G compiler -----------------------------------------------------


def pair_symbol(a: str, i: int) -> str:
    return f"{a}{SEP}{i}"


def split_symbol(sym: str) -> tuple[str, int]:
    a, _, i = sym.rpartition(SEP)
    return a, int(i)


@dataclass(frozen=True)
class ReducedSft:
    base: SftDefinition
    target: GroupModel
    sft: SftDefinition
    rule_index: tuple[str, ...]
    ray: Optional[RayWord] = None

    @property
    def n(self) -> int:
        return len(self.target.generators)

    def rule_counts(self) -> dict[str, int]:
        return {tag: self.rule_index.count(tag) for tag in ("I", "II", "III")}


def check_target(target: GroupModel) -> None:
    if target.central is None or target.central != target.generators[0]:
        raise ReductionError(f"{target.name}: generator g1 must be the designated central generator")
    if len(target.generators) < 2:
        raise ReductionError(f"{target.name}: need at least two generators")


def _base_relations(s: SftDefinition) -> tuple[set, set]:
    if s.model.name != "z2":
        raise ReductionError(f"base SFT must live on z2, got {s.model.name}")
    if not s.is_one_step:
        raise ReductionError("base SFT must be one-step")
    return s.allowed_pairs("x"), s.allowed_pairs("y")


def reduce_z2_to_g(s: SftDefinition, target: GroupModel, ray: Optional[RayWord] = None) -> ReducedSft:
    """Compile a one-step Z^2-SFT into a target-group SFT over A x {2..n}.

    (I)   the second component is constant along g1-lines;
    (II)  consecutive cells on a g1-line obey the horizontal relation;
    (III) a cell (a, i) and the cell at x*g_i obey the vertical relation.
    """
    check_target(target)
    for a in s.alphabet:
        if SEP in a:
            raise MalformedSft(f"base symbol {a!r} must not contain {SEP!r}")
    if ray is not None and ray.model.name != target.name:
        raise ReductionError("ray and target live on different groups")
    horiz, vert = _base_relations(s)
    n = len(target.generators)
    idx = range(2, n + 1)
    A = list(s.alphabet)
    ident = target.identity()
    gens = [target.generator(g) for g in target.generators]
    g1 = gens[0]
    alphabet = Alphabet(tuple(pair_symbol(a, i) for a in A for i in idx))
    forbidden, tags = [], []

    def emit(g, left, right, tag):
        forbidden.append(Pattern((ident, g), (left, right)))
        tags.append(tag)

    for a, b in itertools.product(A, A):
        for i, j in itertools.product(idx, idx):
            if i != j:
                emit(g1, pair_symbol(a, i), pair_symbol(b, j), "I")
    for a, b in itertools.product(A, A):
        if (a, b) not in horiz:
            for i in idx:
                emit(g1, pair_symbol(a, i), pair_symbol(b, i), "II")
    for i in idx:
        for a, b in itertools.product(A, A):
            if (a, b) not in vert:
                for j in idx:
                    emit(gens[i - 1], pair_symbol(a, i), pair_symbol(b, j), "III")
    sft = SftDefinition(target, alphabet, tuple(forbidden))
    return ReducedSft(s, target, sft, tuple(tags), ray)


# -- Z^2 configurations --------------------------------------------------------


class Z2Config:
    """A total Z^2 configuration given by a rule (k, n) -> symbol."""

    def __init__(self, rule: Callable[[int, int], str], name: str = "rule"):
        self.rule = rule
        self.name = name

    def __call__(self, k: int, n: int) -> str:
        return self.rule(k, n)


class PeriodicZ2Config(Z2Config):
    """c(k, n) = patch[n mod py][k mod px]."""

    def __init__(self, patch: Sequence[Sequence[str]], name: str = "periodic"):
        self.patch = tuple(tuple(row) for row in patch)
        if not self.patch or not self.patch[0] or any(len(r) != len(self.patch[0]) for r in self.patch):
            raise ValueError("periodic patch must be a non-empty rectangle")
        self.period = (len(self.patch[0]), len(self.patch))
        super().__init__(lambda k, n: self.patch[n % self.period[1]][k % self.period[0]], name)

    def admissible_for(self, s: SftDefinition) -> bool:
        horiz, vert = _base_relations(s)
        px, py = self.period
        return all(
            (self(k, n), self(k + 1, n)) in horiz and (self(k, n), self(k, n + 1)) in vert
            for k in range(px) for n in range(py)
        )


def constant_config(a: str) -> PeriodicZ2Config:
    return PeriodicZ2Config([[a]], "constant")


def checkerboard_config(a: str, b: str) -> PeriodicZ2Config:
    return PeriodicZ2Config([[a, b], [b, a]], "checkerboard")


def stripes_config(a: str, b: str) -> PeriodicZ2Config:
    """Horizontal stripes: rows alternate between a and b."""
    return PeriodicZ2Config([[a], [b]], "stripes")


def _line_partition(model: GroupModel, vertices: Sequence[GroupElement]) -> dict:
    """Map each vertex to (representative, l) with vertex = rep * g1^l."""
    out: dict = {}
    for v in vertices:
        if v in out:
            continue
        v_inv = model.inverse(v)
        for w in vertices:
            if w not in out:
                ell = model.in_cyclic_subgroup(model.multiply(v_inv, w))
                if ell is not None:
                    out[w] = (v, ell)
    return out


@dataclass
class EncodeState:
    """Bookkeeping of an encoding run: Z^2 coordinate and direction index per cell."""

    coords: dict = field(default_factory=dict)
    uncovered: list = field(default_factory=list)
    seeds: list = field(default_factory=list)


def encode_z2_config(c: Z2Config, ray: RayWord, s_g: ReducedSft, radius: int,
                     reseed: bool = True, require_cover: bool = False,
                     state: Optional[EncodeState] = None) -> PartialConfiguration:
    """Transfer a Z^2 configuration to the target ball of ``radius``.

    The identity's g1-line and the ray lines p_j<g1> are assigned first with
    c'(p_j g1^l) = (c(l, j), i(j)), where g_{i(j)} = w_{j+1}.  Then any
    unassigned x with x*g_m assigned (m >= 2, canonical order) receives its
    whole g1-line one row below x*g_m with direction m.  When nothing more
    can be reached that way and ``reseed`` is set, the first unassigned
    element starts a fresh copy of the ray, which keeps the window locally
    admissible; without ``reseed`` the remaining elements stay uncovered.
    """
    target = s_g.target
    check_target(target)
    if ray.model.name != target.name:
        raise ReductionError("ray and target live on different groups")
    gens = list(target.generators)
    b = ball(target, radius)
    lines = _line_partition(target, b.vertices)
    members: dict = {}
    for v, (rep, ell) in lines.items():
        members.setdefault(rep, []).append((v, ell))
    st = state if state is not None else EncodeState()
    coords = st.coords  # element -> (k, n, direction index)

    def line_of(x):
        """Elements of x<g1> in the ball as (element, l) with element = x g1^l."""
        rep, off = lines[x]
        return [(v, ell - off) for v, ell in members[rep]]

    def seed(x, k0, n0):
        st.seeds.append(x)
        j = 0
        base = x
        while True:
            seg = line_of(base) if base in lines else _offball_line(target, base, lines)
            if not seg or any(v in coords for v, _ in seg):
                return
            nxt_letter = ray.letter(j + 1)
            d = gens.index(nxt_letter) + 1
            for v, ell in seg:
                coords[v] = (k0 + ell, n0 + j, d)
            base = target.multiply(base, target.generator(nxt_letter))
            j += 1

    seed(target.identity(), 0, 0)
    while True:
        progressed = True
        while progressed:
            progressed = False
            for x in b.vertices:
                if x in coords:
                    continue
                for m in range(2, len(gens) + 1):
                    y = target.multiply(x, target.generator(gens[m - 1]))
                    if y in coords:
                        k, n, _ = coords[y]
                        for v, ell in line_of(x):
                            coords[v] = (k + ell, n - 1, m)
                        progressed = True
                        break
        rest = [v for v in b.vertices if v not in coords]
        if not rest or not reseed:
            st.uncovered = rest
            break
        seed(rest[0], 0, 0)

    if st.uncovered and require_cover:
        raise EncodingStalled(st.uncovered)
    used = {(k, n) for k, n, _ in coords.values()}
    if used:
        ks = [k for k, _ in used]
        ns = [n for _, n in used]
        box = {(k, n): c(k, n) for k in range(min(ks), max(ks) + 2) for n in range(min(ns), max(ns) + 2)}
        if not patch_admissible(box, s_g.base):
            raise ReductionError(f"{c.name} configuration is not admissible for the base SFT on the used patch")
    return PartialConfiguration({v: pair_symbol(c(k, n), d) for v, (k, n, d) in
                                 ((v, coords[v]) for v in b.vertices if v in coords)})


def _offball_line(target, base, lines) -> list:
    """Ball elements on base<g1> when base itself lies outside the ball."""
    base_inv = target.inverse(base)
    out = []
    for v in lines:
        ell = target.in_cyclic_subgroup(target.multiply(base_inv, v))
        if ell is not None:
            out.append((v, ell))
    return out


def decode_g_config(c: PartialConfiguration, s_g: ReducedSft, height: int, width: int,
                    strict: bool = True) -> dict[tuple[int, int], str]:
    """Read a Z^2 patch off a target configuration.

    Row 0 is the g1-line through the identity; row j+1 is the g1-line through
    b_j * g_{y_j}, where y_j is the direction carried by row j.  Columns and
    rows run over 0..width and 0..height inclusive.  With ``strict=False``
    cells whose group element is outside the support are skipped and the walk
    stops at the first row whose direction cannot be read.
    """
    target = s_g.target
    gens = list(target.generators)
    g1 = target.generator(gens[0])
    powers = [target.identity()]
    for _ in range(width):
        powers.append(target.multiply(powers[-1], g1))
    patch: dict[tuple[int, int], str] = {}
    base = target.identity()
    for j in range(height + 1):
        direction = None
        for i in range(width + 1):
            g = target.multiply(base, powers[i])
            if g not in c:
                if strict:
                    raise SupportError(f"cell ({i}, {j}) needs {g!r}, which is outside the support", g)
                continue
            a, d = split_symbol(c[g])
            if direction is not None and d != direction:
                raise CheckerBug(f"row {j} carries directions {direction} and {d}")
            direction = d
            patch[(i, j)] = a
        if j == height:
            break
        if direction is None:
            if strict:
                raise SupportError(f"row {j} has no readable cell", base)
            break
        base = target.multiply(base, target.generator(gens[direction - 1]))
    return patch


def patch_admissible(patch: dict[tuple[int, int], str], s: SftDefinition) -> bool:
    horiz, vert = _base_relations(s)
    for (i, j), a in patch.items():
        right = patch.get((i + 1, j))
        up = patch.get((i, j + 1))
        if right is not None and (a, right) not in horiz:
            return False
        if up is not None and (a, up) not in vert:
            return False
    return True
