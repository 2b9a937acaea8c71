"""Patterns, partial configurations and SFT definitions over a group model."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .groups import GroupElement, GroupModel, ball, word_length


class AlphabetMismatch(ValueError):
    pass


class MalformedSft(ValueError):
    pass


@dataclass(frozen=True)
class Alphabet:
    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if len(set(self.symbols)) != len(self.symbols):
            raise MalformedSft(f"duplicate symbols in alphabet {self.symbols}")

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self):
        return len(self.symbols)

    def __contains__(self, s):
        return s in self.symbols

    def index(self, s) -> int:
        return self.symbols.index(s)


@dataclass(frozen=True)
class Pattern:
    domain: tuple[GroupElement, ...]
    symbols: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "symbols", tuple(self.symbols))
        if len(self.domain) != len(self.symbols):
            raise MalformedSft("pattern domain and symbols differ in length")
        if len(set(self.domain)) != len(self.domain):
            raise MalformedSft(f"pattern domain has repeated elements: {self.domain}")

    def items(self):
        return zip(self.domain, self.symbols)

    @classmethod
    def from_words(cls, model: GroupModel, words, symbols) -> "Pattern":
        return cls(tuple(model.evaluate_word(w) for w in words), tuple(symbols))


class PartialConfiguration(Mapping):
    """Immutable finite map from group elements to symbols."""

    __slots__ = ("_values",)

    def __init__(self, values: Mapping[GroupElement, str] | Iterable = ()):
        self._values = dict(values)

    def __getitem__(self, g):
        return self._values[g]

    def __iter__(self) -> Iterator[GroupElement]:
        return iter(self._values)

    def __len__(self):
        return len(self._values)

    def __eq__(self, other):
        if isinstance(other, PartialConfiguration):
            return self._values == other._values
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._values.items()))

    def __repr__(self):
        return f"PartialConfiguration({len(self)} cells)"

    @property
    def support(self) -> frozenset:
        return frozenset(self._values)

    def translate(self, model: GroupModel, g: GroupElement) -> "PartialConfiguration":
        """The configuration y with y[g*k] = x[k]."""
        return PartialConfiguration({model.multiply(g, k): s for k, s in self._values.items()})


def restrict(x: PartialConfiguration, dom) -> PartialConfiguration:
    dom = set(dom)
    return PartialConfiguration({g: s for g, s in x.items() if g in dom})


@dataclass(frozen=True)
class SftDefinition:
    model: GroupModel
    alphabet: Alphabet
    forbidden: tuple[Pattern, ...]

    def __post_init__(self):
        if not isinstance(self.alphabet, Alphabet):
            object.__setattr__(self, "alphabet", Alphabet(tuple(self.alphabet)))
        object.__setattr__(self, "forbidden", tuple(self.forbidden))
        for p in self.forbidden:
            for g, s in p.items():
                if g.model != self.model.name:
                    raise MalformedSft(f"pattern element {g!r} is not in {self.model.name}")
                if s not in self.alphabet:
                    raise AlphabetMismatch(f"forbidden pattern uses unknown symbol {s!r}")

    @property
    def one_step_generator(self) -> dict:
        """Map each one-step forbidden pattern to the generator index of its domain."""
        ident = self.model.identity()
        gens = {self.model.generator(g): i for i, g in enumerate(self.model.generators)}
        out = {}
        for p in self.forbidden:
            if len(p.domain) == 2 and ident in p.domain:
                other = p.domain[1] if p.domain[0] == ident else p.domain[0]
                if other in gens:
                    out[p] = gens[other]
        return out

    @property
    def is_one_step(self) -> bool:
        return len(self.one_step_generator) == len(self.forbidden)

    def allowed_pairs(self, generator: str) -> set[tuple[str, str]]:
        """Pairs (a, b) with 1 -> a, g -> b not forbidden (one-step view)."""
        g = self.model.generator(generator)
        ident = self.model.identity()
        banned = set()
        for p in self.forbidden:
            cells = dict(p.items())
            if set(cells) == {ident, g}:
                banned.add((cells[ident], cells[g]))
        return {(a, b) for a in self.alphabet for b in self.alphabet} - banned

    def enclosing_radius(self) -> int:
        if not self.forbidden:
            return 0
        return max(word_length(self.model, g) for p in self.forbidden for g in p.domain)


def _check_alphabet(x: PartialConfiguration, s: SftDefinition) -> None:
    for g, sym in x.items():
        if sym not in s.alphabet:
            raise AlphabetMismatch(f"symbol {sym!r} at {g!r} is not in the SFT alphabet")


def pattern_appears(model: GroupModel, x: Mapping, p: Pattern, at: GroupElement) -> bool:
    for d, sym in p.items():
        g = model.multiply(at, d)
        if x.get(g) != sym:
            return False
    return True


def occurrences(x: PartialConfiguration, s: SftDefinition) -> list[tuple[Pattern, GroupElement]]:
    """All (pattern, anchor) pairs where a forbidden pattern sits fully inside x."""
    model = s.model
    found = []
    for p in s.forbidden:
        d0, sym0 = p.domain[0], p.symbols[0]
        d0_inv = model.inverse(d0)
        anchors = sorted({model.multiply(g, d0_inv) for g, sym in x.items() if sym == sym0})
        for at in anchors:
            if pattern_appears(model, x, p, at):
                found.append((p, at))
    return found


def locally_admissible(x: PartialConfiguration, s: SftDefinition) -> bool:
    _check_alphabet(x, s)
    model = s.model
    for p in s.forbidden:
        if not p.domain:
            # an empty forbidden pattern appears everywhere, even in the empty window
            return False
        d0, sym0 = p.domain[0], p.symbols[0]
        d0_inv = model.inverse(d0)
        for g, sym in x.items():
            if sym == sym0 and pattern_appears(model, x, p, model.multiply(g, d0_inv)):
                return False
    return True


def block_symbol(block: tuple[str, ...]) -> str:
    return "|".join(block)


def to_one_step(s: SftDefinition, max_blocks: int = 200_000) -> SftDefinition:
    """Higher-block recoding on balls of radius m enclosing every forbidden domain.

    New symbols are the locally admissible patterns on B_m, named by joining
    their symbols in canonical ball order with ``|``.  Two blocks may sit at 1
    and g_i iff they agree on the overlap of B_m and g_i * B_m.
    """
    if s.is_one_step:
        return s
    from .deciders import enumerate_admissible

    model = s.model
    m = s.enclosing_radius()
    b = ball(model, m)
    idx = b.index
    blocks = []
    for w in enumerate_admissible(s, b, limit=max_blocks):
        blocks.append(tuple(w[v] for v in b.vertices))
    names = [block_symbol(blk) for blk in blocks]
    if len(set(names)) != len(names):
        raise MalformedSft("block names collide; symbols must not contain '|'")
    forbidden = []
    for gname in model.generators:
        g = model.generator(gname)
        g_inv = model.inverse(g)
        # positions (i in block at 1, j in block at g) naming the same element
        overlap = []
        for v in b.vertices:
            u = model.multiply(g_inv, v)
            if u in idx:
                overlap.append((idx[v], idx[u]))
        keys = {}
        for k, blk in enumerate(blocks):
            keys.setdefault(tuple(blk[j] for _, j in overlap), []).append(k)
        for p, left in enumerate(blocks):
            want = tuple(left[i] for i, _ in overlap)
            ok = set(keys.get(want, ()))
            for q in range(len(blocks)):
                if q not in ok:
                    forbidden.append(Pattern((model.identity(), g), (names[p], names[q])))
    return SftDefinition(model, Alphabet(tuple(names)), tuple(forbidden))


def make_one_step(model: GroupModel, alphabet, allowed: dict[str, Iterable[tuple[str, str]]]) -> SftDefinition:
    """One-step SFT from allowed pair relations per generator name.

    Generators missing from ``allowed`` are unconstrained.
    """
    alphabet = Alphabet(tuple(alphabet))
    ident = model.identity()
    forbidden = []
    for gname in model.generators:
        if gname not in allowed:
            continue
        ok = set(map(tuple, allowed[gname]))
        g = model.generator(gname)
        for a in alphabet:
            for c in alphabet:
                if (a, c) not in ok:
                    forbidden.append(Pattern((ident, g), (a, c)))
    return SftDefinition(model, alphabet, tuple(forbidden))

