"""JSON documents: tilesets, reduced tilesets, rays, configurations, patches, verdicts."""

from __future__ import annotations

import json
from functools import lru_cache
from pathlib import Path
from typing import Any, Optional

from .deciders import EmptinessVerdict
from .groups import GroupElement, GroupModel, geodesic_word, get_model
from .reduction import (
    PeriodicZ2Config,
    RayWord,
    ReducedSft,
    checkerboard_config,
    constant_config,
    stripes_config,
)
from .sft import Alphabet, PartialConfiguration, Pattern, SftDefinition


class FormatError(ValueError):
    pass


def read_json(path) -> Any:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _model(doc: dict) -> GroupModel:
    try:
        return get_model(doc["group"])
    except KeyError as exc:
        raise FormatError(f"bad or missing group: {exc}") from None


@lru_cache(maxsize=100_000)
def element_word(model_name: str, g: GroupElement) -> tuple[str, ...]:
    return tuple(geodesic_word(get_model(model_name), g))


def _word(model: GroupModel, g: GroupElement) -> list[str]:
    return list(element_word(model.name, g))


def _evaluate(model: GroupModel, word) -> GroupElement:
    if not isinstance(word, list) or not all(isinstance(t, str) for t in word):
        raise FormatError(f"a word must be a list of generator names, got {word!r}")
    try:
        return model.evaluate_word(word)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def _shortlex(model: GroupModel, g: GroupElement):
    order = {s: i for i, s in enumerate(model.letters())}
    w = _word(model, g)
    return len(w), [order[t] for t in w]


# -- tilesets ------------------------------------------------------------------


def load_tileset(doc: dict) -> SftDefinition:
    if not isinstance(doc, dict):
        raise FormatError("tileset document must be an object")
    model = _model(doc)
    alphabet = doc.get("alphabet")
    if not isinstance(alphabet, list) or not all(isinstance(a, str) for a in alphabet):
        raise FormatError("alphabet must be a list of strings")
    if not alphabet:
        raise FormatError("alphabet must be non-empty")
    try:
        alpha = Alphabet(tuple(alphabet))
    except ValueError as exc:
        raise FormatError(str(exc)) from None
    forbidden = []
    for entry in doc.get("forbidden", []):
        try:
            domain = [_evaluate(model, w) for w in entry["domain"]]
            symbols = list(entry["symbols"])
            forbidden.append(Pattern(tuple(domain), tuple(symbols)))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"malformed forbidden entry {entry!r}: {exc}") from None
        except ValueError as exc:
            raise FormatError(str(exc)) from None
    for key, gen in (("horizontal_allowed", "x"), ("vertical_allowed", "y")):
        if key not in doc:
            continue
        if model.name != "z2":
            raise FormatError(f"{key} is only accepted for z2 tilesets")
        ok = {tuple(p) for p in doc[key]}
        g = model.generator(gen)
        for a in alphabet:
            for b in alphabet:
                if (a, b) not in ok:
                    forbidden.append(Pattern((model.identity(), g), (a, b)))
    try:
        return SftDefinition(model, alpha, tuple(forbidden))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def dump_tileset(s: SftDefinition, provenance: Optional[tuple[str, ...]] = None) -> dict:
    forbidden = []
    for k, p in enumerate(s.forbidden):
        entry = {"domain": [_word(s.model, d) for d in p.domain], "symbols": list(p.symbols)}
        if provenance is not None:
            entry["provenance"] = provenance[k]
        forbidden.append(entry)
    return {"group": s.model.name, "alphabet": list(s.alphabet), "forbidden": forbidden}


def load_tileset_file(path) -> SftDefinition:
    return load_tileset(read_json(path))


# -- rays and reduced tilesets ---------------------------------------------------


def dump_ray(ray: RayWord) -> dict:
    return ray.to_dict()


def load_ray(doc: dict, model: GroupModel) -> RayWord:
    try:
        return RayWord(model, tuple(doc.get("prefix", ())), tuple(doc.get("period", ())))
    except (ValueError, AttributeError, TypeError) as exc:
        raise FormatError(f"bad ray document: {exc}") from None


def dump_reduced(red: ReducedSft) -> dict:
    doc = dump_tileset(red.sft, red.rule_index)
    doc["reduction"] = {"base": dump_tileset(red.base)}
    if red.ray is not None:
        doc["reduction"]["ray"] = dump_ray(red.ray)
    return doc


def load_reduced(doc: dict) -> ReducedSft:
    meta = doc.get("reduction")
    if not isinstance(meta, dict) or "base" not in meta:
        raise FormatError("reduced tileset lacks its 'reduction' block")
    sft = load_tileset(doc)
    base = load_tileset(meta["base"])
    tags = tuple(entry.get("provenance", "") for entry in doc.get("forbidden", []))
    if any(t not in ("I", "II", "III") for t in tags):
        raise FormatError("every forbidden pattern of a reduced tileset needs a provenance tag")
    ray = load_ray(meta["ray"], sft.model) if "ray" in meta else None
    return ReducedSft(base, sft.model, sft, tags, ray)


# -- configurations ------------------------------------------------------------------


def dump_partial(model: GroupModel, x: PartialConfiguration) -> dict:
    cells = sorted(x.items(), key=lambda kv: _shortlex(model, kv[0]))
    return {
        "group": model.name,
        "cells": [{"word": _word(model, g), "symbol": sym} for g, sym in cells],
    }


def load_partial(doc: dict) -> tuple[GroupModel, PartialConfiguration]:
    model = _model(doc)
    values = {}
    for cell in doc.get("cells", []):
        try:
            g = _evaluate(model, cell["word"])
            sym = cell["symbol"]
        except (KeyError, TypeError):
            raise FormatError(f"malformed cell {cell!r}") from None
        if g in values:
            raise FormatError(f"duplicate cell for {cell['word']!r}")
        values[g] = sym
    return model, PartialConfiguration(values)


_BUILTINS = {
    "constant": (constant_config, 1),
    "checkerboard": (checkerboard_config, 2),
    "stripes": (stripes_config, 2),
}


def load_z2_config(doc: dict) -> PeriodicZ2Config:
    if "builtin" in doc:
        name = doc["builtin"]
        if name not in _BUILTINS:
            raise FormatError(f"unknown built-in configuration {name!r}")
        make, arity = _BUILTINS[name]
        symbols = doc.get("symbols", [])
        if len(symbols) != arity:
            raise FormatError(f"{name} needs {arity} symbol(s)")
        return make(*symbols)
    if "patch" in doc:
        try:
            return PeriodicZ2Config(doc["patch"])
        except (ValueError, TypeError) as exc:
            raise FormatError(str(exc)) from None
    raise FormatError("configuration needs 'builtin' or 'patch'")


def dump_patch(patch: dict[tuple[int, int], str]) -> dict:
    cells = sorted(patch.items(), key=lambda kv: (kv[0][1], kv[0][0]))
    return {"type": "z2-patch", "cells": [[i, j, a] for (i, j), a in cells]}


def load_patch(doc: dict) -> dict[tuple[int, int], str]:
    if doc.get("type") != "z2-patch":
        raise FormatError("not a z2-patch document")
    try:
        return {(int(i), int(j)): str(a) for i, j, a in doc["cells"]}
    except (KeyError, TypeError, ValueError):
        raise FormatError("malformed z2-patch cells") from None


# -- verdicts ------------------------------------------------------------------


def dump_verdict(v: EmptinessVerdict, model: GroupModel) -> dict:
    doc: dict = {"verdict": v.kind, "method": v.method}
    if v.radius is not None:
        doc["radius"] = v.radius
    if v.method == "transition-graph":
        if v.kind == "empty":
            doc["obstruction_length"] = v.detail["obstruction_length"]
        else:
            doc["cycle"] = list(v.witness)
            doc["period"] = v.detail["period"]
    elif v.method == "symbol-elimination":
        doc["surviving"] = list(v.witness)
        doc["rounds"] = v.detail["rounds"]
    elif v.method == "ball-search":
        doc["nodes"] = v.detail["nodes"]
        if v.witness is not None:
            doc["witness"] = dump_partial(model, v.witness)["cells"]
    return doc
