import itertools

import pytest

from sftkit.deciders import (
    ADMISSIBLE,
    EMPTY,
    INADMISSIBLE,
    ball_admissibility_search,
    decide_z,
    emptiness_semidecide,
    enumerate_admissible,
)
from sftkit.groups import ball, get_embedding, get_model
from sftkit.reduction import (
    CheckerBug,
    EncodeState,
    PeriodicZ2Config,
    RayTooShort,
    RayWord,
    ReductionError,
    SupportError,
    checkerboard_config,
    constant_config,
    decode_g_config,
    encode_z2_config,
    find_ray,
    find_ray_status,
    lift_configuration,
    lift_subgroup_sft,
    pair_symbol,
    patch_admissible,
    reduce_z2_to_g,
    split_symbol,
    stripes_config,
)
from sftkit.sft import Alphabet, PartialConfiguration, Pattern, SftDefinition, locally_admissible, make_one_step

Z = get_model("z")
Z2 = get_model("z2")
H = get_model("heisenberg")
ALT = [("a", "b"), ("b", "a")]
SAME = [("a", "a"), ("b", "b")]
ALL_AB = list(itertools.product("ab", repeat=2))


def z2_sft(alphabet, horizontal, vertical):
    return make_one_step(Z2, alphabet, {"x": horizontal, "y": vertical})


CHECKER = z2_sft("ab", ALT, ALT)
STRIPES = z2_sft("ab", SAME, ALT)
FULL = z2_sft("ab", ALL_AB, ALL_AB)
RAY_X = RayWord(H, (), ("x",))


# -- lifting -----------------------------------------------------------------------


def test_lift_without_patterns():
    e = get_embedding("z-in-z2")
    lifted = lift_subgroup_sft(SftDefinition(Z, Alphabet(("a", "b")), ()), e)
    assert lifted.model is Z2 and lifted.forbidden == ()


def test_lift_forbid_aa():
    e = get_embedding("z-in-z2")
    s = make_one_step(Z, "ab", {"x": [("a", "b"), ("b", "a"), ("b", "b")]})
    lifted = lift_subgroup_sft(s, e)
    assert lifted.allowed_pairs("x") == {("a", "b"), ("b", "a"), ("b", "b")}
    assert lifted.allowed_pairs("y") == set(ALL_AB)
    window = ball(Z2, 3).vertices
    x = PartialConfiguration({v: "ab"[v.nf[0] % 2] for v in window})
    assert locally_admissible(x, lifted)


def test_lift_forbidden_letter():
    e = get_embedding("z-in-z2")
    s = SftDefinition(Z, Alphabet(("a",)), (Pattern((Z.identity(),), ("a",)),))
    assert ball_admissibility_search(lift_subgroup_sft(s, e), 0).status == INADMISSIBLE


def test_lift_model_mismatch():
    with pytest.raises(ReductionError):
        lift_subgroup_sft(CHECKER, get_embedding("z-in-z2"))


def test_lift_configuration():
    e = get_embedding("z-in-z2")
    c = PartialConfiguration({Z.element((k,)): "ab"[k % 2] for k in range(-3, 4)})
    window = ball(Z2, 2).vertices
    lifted = lift_configuration(c, e, window)
    assert all(lifted[v] == "ab"[v.nf[0] % 2] for v in window)
    s = lift_subgroup_sft(make_one_step(Z, "ab", {"x": [("a", "b"), ("b", "a"), ("b", "b")]}), e)
    assert locally_admissible(lifted, s)
    # on the embedded window the lift is the original configuration
    embedded = [e.embed(h) for h in c]
    assert {e.decompose(g)[1]: s for g, s in lift_configuration(c, e, embedded).items()} == dict(c)
    const = PartialConfiguration({Z.element((k,)): "a" for k in range(-2, 3)})
    assert set(lift_configuration(const, e, window).values()) == {"a"}


def test_lift_configuration_support_error():
    e = get_embedding("z-in-z2")
    c = PartialConfiguration({Z.identity(): "a"})
    with pytest.raises(SupportError) as info:
        lift_configuration(c, e, ball(Z2, 1).vertices)
    assert info.value.element is not None


# -- rays ------------------------------------------------------------------------------


def test_heisenberg_ray():
    ray = find_ray(H, 100)
    assert ray.to_dict() == {"prefix": [], "period": ["x"]}
    # oracle: p_i^-1 p_j lies in <z> iff its first two coordinates vanish
    pts = [ray.point(j) for j in range(101)]
    for i, j in itertools.combinations(range(101), 2):
        a, b, _ = H.multiply(H.inverse(pts[i]), pts[j]).nf
        assert (a, b) != (0, 0)
    assert ray.verified_length == 100


def test_z2_ray():
    ray = find_ray(Z2, 30)
    assert ray.period == ("y",)


def test_z_has_no_ray():
    assert find_ray_status(Z, 5) == (None, "exhausted")


def test_ray_budget():
    # z has no non-central generator, so the search goes straight to the budgeted DFS
    ray, status = find_ray_status(Z, 5, budget=0)
    assert ray is None and status == "budget"


def test_ray_needs_oracle():
    with pytest.raises(ReductionError):
        find_ray(get_model("free2"), 3)


def test_ray_word_basics():
    ray = RayWord(H, ("y",), ("x", "y"))
    assert [ray.letter(j) for j in range(1, 6)] == ["y", "x", "y", "x", "y"]
    assert ray.point(2) == H.evaluate_word(["y", "x"])
    with pytest.raises(ReductionError):
        RayWord(H, (), ("-x",))
    bad = RayWord(H, (), ("z",))
    assert bad.subword_violation(3) == (0, 1, 1)
    assert not bad.verify(3)
    finite = RayWord(H, ("x", "y"), ())
    with pytest.raises(RayTooShort):
        finite.letter(3)
    with pytest.raises(RayTooShort):
        finite.verify(5)


# -- the compiler -----------------------------------------------------------------------


def schema_count(base, target):
    """Forbidden two-cell patterns by reading each rule off its definition."""
    n = len(target.generators)
    A = list(base.alphabet)
    horiz, vert = base.allowed_pairs("x"), base.allowed_pairs("y")
    counts = {"I": 0, "II": 0, "III": 0}
    for gi in range(1, n + 1):
        for (a, i), (b, j) in itertools.product(itertools.product(A, range(2, n + 1)), repeat=2):
            if gi == 1:
                if i != j:
                    counts["I"] += 1
                elif (a, b) not in horiz:
                    counts["II"] += 1
            elif gi == i and (a, b) not in vert:
                counts["III"] += 1
    return counts


def closed_form(base, target):
    n = len(target.generators)
    A = len(base.alphabet)
    dh = A * A - len(base.allowed_pairs("x"))
    dv = A * A - len(base.allowed_pairs("y"))
    return {"I": A * A * (n - 1) * (n - 2), "II": dh * (n - 1), "III": dv * (n - 1) ** 2}


def test_checkerboard_rule_counts():
    red = reduce_z2_to_g(CHECKER, H, RAY_X)
    assert red.rule_counts() == {"I": 8, "II": 4, "III": 8}
    assert len(red.sft.forbidden) == 20
    assert len(red.sft.alphabet) == 4


@pytest.mark.parametrize("target", ["heisenberg", "z3", "z4", "product:heisenberg:z"])
@pytest.mark.parametrize("base", ["checker", "stripes", "full", "single", "novert"])
def test_rule_counts_match_schema(target, base):
    bases = {
        "checker": CHECKER, "stripes": STRIPES, "full": FULL,
        "single": z2_sft("a", [("a", "a")], [("a", "a")]), "novert": z2_sft("ab", ALL_AB, []),
    }
    s, g = bases[base], get_model(target)
    red = reduce_z2_to_g(s, g)
    assert red.rule_counts() == schema_count(s, g) == closed_form(s, g)
    assert len(red.sft.alphabet) == len(s.alphabet) * (len(g.generators) - 1)
    gens = [g.generator(x) for x in g.generators]
    for p, tag in zip(red.sft.forbidden, red.rule_index):
        assert p.domain[0] == g.identity()
        if tag in ("I", "II"):
            assert p.domain[1] == gens[0]
        else:
            i = split_symbol(p.symbols[0])[1]
            assert p.domain[1] == gens[i - 1]


def test_single_symbol_all_allowed():
    red = reduce_z2_to_g(z2_sft("a", [("a", "a")], [("a", "a")]), H)
    assert len(red.sft.alphabet) == 2
    assert red.rule_counts() == {"I": 2, "II": 0, "III": 0}


def test_reduce_errors():
    with pytest.raises(ReductionError):
        reduce_z2_to_g(CHECKER, get_model("free2"))
    with pytest.raises(ReductionError):
        reduce_z2_to_g(CHECKER, Z)
    not_one_step = SftDefinition(Z2, Alphabet(("a",)), (Pattern.from_words(Z2, [[], ["x", "x"]], ["a", "a"]),))
    with pytest.raises(ReductionError):
        reduce_z2_to_g(not_one_step, H)
    with pytest.raises(ReductionError):
        reduce_z2_to_g(make_one_step(Z, "a", {}), H)


def test_pair_symbols():
    assert pair_symbol("a", 3) == "a|3"
    assert split_symbol("a|3") == ("a", 3)


# -- encoding ----------------------------------------------------------------------------


CASES = [(constant_config("a"), FULL), (checkerboard_config("a", "b"), CHECKER),
         (stripes_config("a", "b"), STRIPES), (checkerboard_config("a", "b"), FULL),
         (stripes_config("a", "b"), FULL)]


@pytest.mark.parametrize("radius", [0, 1, 2])
@pytest.mark.parametrize("case", range(len(CASES)))
def test_encode_is_admissible(case, radius):
    c, base = CASES[case]
    red = reduce_z2_to_g(base, H, RAY_X)
    st = EncodeState()
    x = encode_z2_config(c, RAY_X, red, radius, state=st)
    assert x.support == frozenset(ball(H, radius).vertices)
    assert st.uncovered == []
    assert locally_admissible(x, red.sft)


def test_encode_constant():
    red = reduce_z2_to_g(FULL, H, RAY_X)
    x = encode_z2_config(constant_config("a"), RAY_X, red, 2)
    assert {split_symbol(s)[0] for s in x.values()} == {"a"}


def test_encode_ray_lines_carry_ray_direction():
    red = reduce_z2_to_g(CHECKER, H, RAY_X)
    x = encode_z2_config(checkerboard_config("a", "b"), RAY_X, red, 2)
    for j in range(3):
        p = H.power(H.generator("x"), j)
        for ell in range(-2, 3):
            g = H.multiply(p, H.power(H.generator("z"), ell))
            if g in x:
                # x is generator number 2
                assert split_symbol(x[g])[1] == 2


def test_encode_checkerboard_alternates_along_lines():
    red = reduce_z2_to_g(CHECKER, H, RAY_X)
    x = encode_z2_config(checkerboard_config("a", "b"), RAY_X, red, 2)
    z = H.generator("z")
    for g in x:
        gz = H.multiply(g, z)
        if gz in x:
            assert split_symbol(x[g])[0] != split_symbol(x[gz])[0]


def test_encode_without_reseed_leaves_gaps():
    red = reduce_z2_to_g(CHECKER, H, RAY_X)
    st = EncodeState()
    x = encode_z2_config(checkerboard_config("a", "b"), RAY_X, red, 2, reseed=False, state=st)
    assert len(x) + len(st.uncovered) == len(ball(H, 2))
    assert st.uncovered
    assert locally_admissible(x, red.sft)


def test_encode_rejects_inadmissible_config():
    red = reduce_z2_to_g(CHECKER, H, RAY_X)
    with pytest.raises(ReductionError):
        encode_z2_config(constant_config("a"), RAY_X, red, 1)


def test_encode_short_ray():
    red = reduce_z2_to_g(CHECKER, H)
    with pytest.raises(RayTooShort):
        encode_z2_config(checkerboard_config("a", "b"), RayWord(H, ("x",), ()), red, 2)


def test_periodic_config():
    c = PeriodicZ2Config([["a", "b", "b"]])
    assert [c(k, 0) for k in range(-1, 4)] == ["b", "a", "b", "b", "a"]
    assert not c.admissible_for(CHECKER)
    assert checkerboard_config("a", "b").admissible_for(CHECKER)
    with pytest.raises(ValueError):
        PeriodicZ2Config([["a"], ["a", "b"]])


# -- decoding ------------------------------------------------------------------------------


@pytest.mark.parametrize("case", range(len(CASES)))
def test_round_trip(case):
    c, base = CASES[case]
    red = reduce_z2_to_g(base, H, RAY_X)
    x = encode_z2_config(c, RAY_X, red, 2)
    patch = decode_g_config(x, red, 2, 2, strict=False)
    assert patch
    assert (0, 0) in patch and (0, 2) in patch and (2, 0) in patch
    assert all(patch[(i, j)] == c(i, j) for (i, j) in patch)


def test_decode_constant_and_single_row():
    red = reduce_z2_to_g(FULL, H, RAY_X)
    x = encode_z2_config(constant_config("b"), RAY_X, red, 2)
    assert set(decode_g_config(x, red, 2, 2, strict=False).values()) == {"b"}
    row = decode_g_config(x, red, 0, 2)
    assert sorted(row) == [(0, 0), (1, 0), (2, 0)]


def test_decode_soundness_on_searched_patterns():
    red = reduce_z2_to_g(CHECKER, H, RAY_X)
    for r in (1, 2):
        b = ball(H, r)
        for k, x in enumerate(enumerate_admissible(red.sft, b)):
            if k >= 200:
                break
            patch = decode_g_config(x, red, 2, 2, strict=False)
            assert patch and patch_admissible(patch, CHECKER)


def test_decode_errors():
    red = reduce_z2_to_g(CHECKER, H, RAY_X)
    with pytest.raises(SupportError):
        decode_g_config(PartialConfiguration({H.identity(): "a|2"}), red, 1, 1)
    z = H.generator("z")
    bad = PartialConfiguration({H.identity(): "a|2", z: "b|3"})
    with pytest.raises(CheckerBug):
        decode_g_config(bad, red, 0, 1)


# -- emptiness and lift transfer ----------------------------------------------------------


def test_emptiness_transfer():
    novert = reduce_z2_to_g(z2_sft("a", [("a", "a")], []), H, RAY_X)
    v = emptiness_semidecide(novert.sft, 2)
    assert v.kind == EMPTY and v.radius <= 2
    allowed = reduce_z2_to_g(z2_sft("a", [("a", "a")], [("a", "a")]), H, RAY_X)
    assert all(ball_admissibility_search(allowed.sft, r).status == ADMISSIBLE for r in range(3))
    checker = reduce_z2_to_g(CHECKER, H, RAY_X)
    assert all(ball_admissibility_search(checker.sft, r).status == ADMISSIBLE for r in range(3))


def test_lift_transfer():
    e = get_embedding("z-in-z2")
    for mask in range(16):
        rel = [p for k, p in enumerate(ALL_AB) if mask >> k & 1]
        s = make_one_step(Z, "ab", {"x": rel})
        lifted = lift_subgroup_sft(s, e)
        v = decide_z(s)
        if v.kind == EMPTY:
            assert v.detail["obstruction_length"] <= 3
            assert any(ball_admissibility_search(lifted, r).status == INADMISSIBLE for r in range(4))
        else:
            cyc = v.witness
            c = PartialConfiguration({Z.element((k,)): cyc[k % len(cyc)] for k in range(-3, 4)})
            x = lift_configuration(c, e, ball(Z2, 3).vertices)
            assert locally_admissible(x, lifted)
