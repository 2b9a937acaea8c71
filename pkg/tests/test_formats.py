import json

import pytest

from conftest import DATA
from sftkit import formats
from sftkit.deciders import decide_tree, decide_z, emptiness_semidecide
from sftkit.groups import ball, get_model
from sftkit.reduction import RayWord, checkerboard_config, encode_z2_config, reduce_z2_to_g
from sftkit.sft import PartialConfiguration, to_one_step

H = get_model("heisenberg")


def load(name):
    return formats.load_tileset_file(DATA / name)


@pytest.mark.parametrize("name", sorted(p.name for p in DATA.glob("*.json")
                                        if not p.name.startswith(("config", "ray", "patch"))))
def test_tileset_round_trip(name):
    s = load(name)
    doc = formats.dump_tileset(s)
    again = formats.load_tileset(json.loads(formats.dumps(doc)))
    assert again == s
    assert formats.dump_tileset(again) == doc


def test_convenience_keys():
    s = load("z2_checkerboard.json")
    assert s.is_one_step
    assert s.allowed_pairs("x") == {("a", "b"), ("b", "a")}
    assert s.allowed_pairs("y") == {("a", "b"), ("b", "a")}
    with pytest.raises(formats.FormatError):
        formats.load_tileset({"group": "z", "alphabet": ["a"], "horizontal_allowed": [["a", "a"]]})


@pytest.mark.parametrize("doc", [
    [],
    {"alphabet": ["a"]},
    {"group": "nope", "alphabet": ["a"]},
    {"group": "z", "alphabet": []},
    {"group": "z", "alphabet": ["a", "a"]},
    {"group": "z", "alphabet": "ab"},
    {"group": "z", "alphabet": ["a"], "forbidden": [{"domain": [["q"]], "symbols": ["a"]}]},
    {"group": "z", "alphabet": ["a"], "forbidden": [{"domain": [[]], "symbols": ["b"]}]},
    {"group": "z", "alphabet": ["a"], "forbidden": [{"domain": [[]]}]},
    {"group": "z", "alphabet": ["a"], "forbidden": [{"domain": [[], ["x", "-x"]], "symbols": ["a", "a"]}]},
])
def test_malformed_tilesets(doc):
    with pytest.raises(formats.FormatError):
        formats.load_tileset(doc)


def test_invalid_json(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(formats.FormatError):
        formats.read_json(p)


def test_reduced_round_trip():
    red = reduce_z2_to_g(load("z2_checkerboard.json"), H, RayWord(H, (), ("x",)))
    doc = formats.dump_reduced(red)
    assert [e["provenance"] for e in doc["forbidden"]].count("III") == 8
    back = formats.load_reduced(json.loads(formats.dumps(doc)))
    assert back.sft == red.sft and back.base == red.base
    assert back.rule_index == red.rule_index
    assert back.ray.to_dict() == red.ray.to_dict()
    assert formats.dump_reduced(back) == doc
    del doc["forbidden"][0]["provenance"]
    with pytest.raises(formats.FormatError):
        formats.load_reduced(doc)
    with pytest.raises(formats.FormatError):
        formats.load_reduced({"group": "heisenberg", "alphabet": ["a"]})


def test_ray_round_trip():
    ray = formats.load_ray(json.loads((DATA / "ray_x.json").read_text()), H)
    assert formats.dump_ray(ray) == {"prefix": [], "period": ["x"]}
    with pytest.raises(formats.FormatError):
        formats.load_ray({"period": ["w"]}, H)


def test_partial_round_trip():
    red = reduce_z2_to_g(load("z2_checkerboard.json"), H, RayWord(H, (), ("x",)))
    x = encode_z2_config(checkerboard_config("a", "b"), red.ray, red, 2)
    doc = formats.dump_partial(H, x)
    words = [c["word"] for c in doc["cells"]]
    assert words[0] == []
    assert [len(w) for w in words] == sorted(len(w) for w in words)
    model, back = formats.load_partial(json.loads(formats.dumps(doc)))
    assert model is H and back == x
    assert formats.dump_partial(H, back) == doc


def test_partial_duplicates_rejected():
    doc = {"group": "z", "cells": [{"word": ["x", "-x"], "symbol": "a"}, {"word": [], "symbol": "b"}]}
    with pytest.raises(formats.FormatError):
        formats.load_partial(doc)


def test_z2_configs():
    c = formats.load_z2_config({"builtin": "checkerboard", "symbols": ["a", "b"]})
    assert [c(k, 0) for k in range(3)] == ["a", "b", "a"]
    c = formats.load_z2_config(json.loads((DATA / "config_periodic.json").read_text()))
    assert c(1, 1) == "a" and c(1, 0) == "b"
    for bad in [{"builtin": "plaid", "symbols": []}, {"builtin": "constant", "symbols": []},
                {"patch": [["a"], ["a", "b"]]}, {}]:
        with pytest.raises(formats.FormatError):
            formats.load_z2_config(bad)


def test_patch_round_trip():
    patch = {(0, 0): "a", (1, 0): "b", (0, 1): "b"}
    doc = formats.dump_patch(patch)
    assert doc["cells"] == [[0, 0, "a"], [1, 0, "b"], [0, 1, "b"]]
    assert formats.load_patch(json.loads(formats.dumps(doc))) == patch
    with pytest.raises(formats.FormatError):
        formats.load_patch({"type": "other"})


def test_verdict_documents():
    v = decide_z(to_one_step(load("z_forbid_everything.json")))
    assert formats.dump_verdict(v, get_model("z"))["verdict"] == "empty"
    v = decide_z(load("z_alternating.json"))
    doc = formats.dump_verdict(v, get_model("z"))
    assert doc["period"] == 2 and len(doc["cycle"]) == 2
    v = decide_tree(load("free2_proper.json"))
    assert "surviving" in formats.dump_verdict(v, get_model("free2"))
    s = load("z2_all_allowed.json")
    v = emptiness_semidecide(s, 1)
    doc = formats.dump_verdict(v, s.model)
    assert doc["verdict"] == "unknown" and len(doc["witness"]) == len(ball(s.model, 1))
    cells = formats.load_partial({"group": "z2", "cells": doc["witness"]})[1]
    assert isinstance(cells, PartialConfiguration)
