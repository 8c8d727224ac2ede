import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from endlab.errors import BudgetExceeded
from endlab.group_backends import FiniteGroup, RewritingGroup, ball_enumerate


def make_z():
    return RewritingGroup(["a"], {"a": "A"}, name="Z")


def make_z2():
    return RewritingGroup(
        ["a", "b"],
        {"a": "A", "b": "B"},
        [("ba", "ab"), ("bA", "Ab"), ("Ba", "aB"), ("BA", "AB")],
        name="Z2",
    )


def make_f2():
    return RewritingGroup(["a", "b"], {"a": "A", "b": "B"}, name="F2")


def make_dinf():
    return RewritingGroup(["x", "y"], {"x": "x", "y": "y"}, name="Dinf")


# -- independent oracles ------------------------------------------------------

def z_count(word):
    return word.count("a") - word.count("A")


def z2_count(word):
    return (word.count("a") - word.count("A"), word.count("b") - word.count("B"))


def affine_of(word):
    """x acts on the integers by n -> -n, y by n -> 1 - n."""
    maps = {"x": (-1, 0), "y": (-1, 1)}
    p, q = 1, 0
    for c in word:
        a, b = maps[c]
        p, q = p * a, p * b + q
    return p, q


def free_reduce(word):
    inv = {"a": "A", "A": "a", "b": "B", "B": "b"}
    out = []
    for c in word:
        if out and out[-1] == inv[c]:
            out.pop()
        else:
            out.append(c)
    return "".join(out)


# -- finite groups --------------------------------------------------------------

def test_cyclic_group_is_verified():
    g = FiniteGroup.cyclic(6)
    assert len(g) == 6
    assert g.identity == 0
    assert g.mul(4, 5) == 3
    assert g.inv(2) == 4


def test_non_latin_table_rejected():
    with pytest.raises(ValueError):
        FiniteGroup([0, 1], [[0, 1], [1, 1]])


def test_nonassociative_loop_rejected():
    # order-5 Latin square with identity and inverses, but (1.1).2 != 1.(1.2)
    table = [
        [0, 1, 2, 3, 4],
        [1, 0, 3, 4, 2],
        [2, 4, 0, 1, 3],
        [3, 2, 4, 0, 1],
        [4, 3, 1, 2, 0],
    ]
    with pytest.raises(ValueError, match="associative"):
        FiniteGroup(list(range(5)), table)


def test_subgroup_tools():
    g = FiniteGroup.cyclic(6)
    assert g.is_subgroup([0, 2, 4])
    assert not g.is_subgroup([0, 2])
    assert g.subgroup_closure([2]) == (0, 2, 4)


# -- normal forms -----------------------------------------------------------------

def test_free_reduction_in_z():
    assert make_z().normal_form("aAa") == "a"


def test_single_commutation_in_z2():
    assert make_z2().normal_form("ba") == "ab"


def test_dinf_against_affine_oracle():
    d = make_dinf()
    assert d.normal_form("xyyxx") == "x"
    assert affine_of(d.normal_form("xyyxx")) == affine_of("xyyxx")


def test_dinf_normal_forms_faithful_on_ball4():
    d = make_dinf()
    ball = d.ball_enumerate(["x", "y"], 4)
    for u, v in itertools.product(ball.elements, repeat=2):
        same_nf = d.multiply(u, v) == d.multiply(u, v)
        assert same_nf
        assert (d.normal_form(u) == d.normal_form(v)) == (affine_of(u) == affine_of(v))


def test_z2_normal_forms_match_counts_on_ball4():
    z2 = make_z2()
    ball = z2.ball_enumerate(["a", "A", "b", "B"], 4)
    for u, v in itertools.product(ball.elements, repeat=2):
        assert (u == v) == (z2_count(u) == z2_count(v))


def test_f2_normal_forms_match_free_reduction_on_ball4():
    f2 = make_f2()
    ball = f2.ball_enumerate(["a", "A", "b", "B"], 4)
    for u in ball.elements:
        assert u == free_reduce(u)
    rng = random.Random(5)
    letters = "aAbB"
    for _ in range(300):
        w = "".join(rng.choice(letters) for _ in range(rng.randint(0, 10)))
        assert f2.normal_form(w) == free_reduce(w)


def test_unknown_letter_rejected():
    with pytest.raises(ValueError, match="unknown letter"):
        make_z().normal_form("ac")


@settings(max_examples=120, deadline=None)
@given(st.text(alphabet="aA", max_size=14))
def test_normal_form_idempotent_z(word):
    z = make_z()
    nf = z.normal_form(word)
    assert z.normal_form(nf) == nf
    assert z_count(nf) == z_count(word)


@settings(max_examples=120, deadline=None)
@given(st.text(alphabet="aAbB", max_size=12))
def test_normal_form_constant_on_rewrites_z2(word):
    z2 = make_z2()
    nf = z2.normal_form(word)
    # apply a random single rewriting step by hand, then normalize again
    rng = random.Random(len(word))
    for lhs, rhs in z2.rules:
        at = word.find(lhs)
        if at >= 0 and rng.random() < 0.7:
            stepped = word[:at] + rhs + word[at + len(lhs):]
            assert z2.normal_form(stepped) == nf
    assert z2_count(nf) == z2_count(word)


# -- confluence --------------------------------------------------------------------

def test_free_group_rules_confluent():
    ok, pair = make_f2().verify_confluence()
    assert ok and pair is None


def test_named_inverse_letter_is_confluent():
    # the system {ab -> 1, ba -> 1} is the free reduction for inverse pair (a, b)
    g = RewritingGroup(["a"], {"a": "b"})
    ok, _ = g.verify_confluence()
    assert ok


def test_non_confluent_system_reports_overlap():
    g = RewritingGroup(
        ["a", "b"], {"a": "A", "b": "B"}, [("ab", "a"), ("ba", "b")], check=False
    )
    ok, pair = g.verify_confluence()
    assert not ok
    word, one, two = pair
    assert one != two
    assert g.normal_form(word) in (one, two)


def test_aa_to_a_system_rejected():
    with pytest.raises(ValueError, match="confluent"):
        RewritingGroup(["a"], {"a": "A"}, [("aa", "a")])


def test_non_reducing_rule_rejected():
    with pytest.raises(ValueError, match="reduce"):
        RewritingGroup(["a"], {"a": "A"}, [("a", "aa")], check=False)


def test_confluence_required_for_enumeration():
    g = RewritingGroup(
        ["a", "b"], {"a": "A", "b": "B"}, [("ab", "a"), ("ba", "b")], check=False
    )
    with pytest.raises(ValueError, match="confluence"):
        g.ball_enumerate(["a", "A"], 2)


# -- ball enumeration ----------------------------------------------------------------

def test_ball_sizes_z():
    z = make_z()
    assert len(z.ball_enumerate(["a", "A"], 2)) == 5


def test_ball_sizes_z2_against_taxicab_oracle():
    z2 = make_z2()
    ball = z2.ball_enumerate(["a", "A", "b", "B"], 2)
    want = {(m, n) for m in range(-2, 3) for n in range(-2, 3) if abs(m) + abs(n) <= 2}
    assert len(ball) == 13 == len(want)
    assert {z2_count(w) for w in ball.elements} == want


def test_ball_sizes_f2_against_reduced_word_oracle():
    f2 = make_f2()
    ball = f2.ball_enumerate(["a", "A", "b", "B"], 2)
    # brute force: all words of length <= 2, freely reduced, deduplicated
    inv = {"a": "A", "A": "a", "b": "B", "B": "b"}
    words = {""}
    for n in (1, 2):
        for w in itertools.product("aAbB", repeat=n):
            words.add(free_reduce("".join(w)))
    assert len(ball) == 17 == len(words)


def test_balls_are_nested_and_monotone():
    z2 = make_z2()
    gens = ["a", "A", "b", "B"]
    sizes = []
    previous = set()
    for r in range(5):
        ball = set(z2.ball_enumerate(gens, r).elements)
        assert previous <= ball
        sizes.append(len(ball))
        previous = ball
    assert sizes == sorted(sizes)


def test_ball_parents_and_depths():
    z = make_z()
    ball = z.ball_enumerate(["a", "A"], 3)
    for el in ball.elements:
        if el == "":
            assert ball.depth[el] == 0
            continue
        parent, gen_index = ball.parent[el]
        assert ball.depth[el] == ball.depth[parent] + 1
        assert z.multiply(parent, ["a", "A"][gen_index]) == el


def test_ball_respects_cap():
    with pytest.raises(BudgetExceeded):
        make_f2().ball_enumerate(["a", "A", "b", "B"], 8, cap=50)


def test_ball_requires_symmetric_generators():
    with pytest.raises(ValueError, match="symmetric"):
        ball_enumerate(make_z(), ["a"], 2)


def test_missing_free_reduction_impossible():
    # the constructor always installs the free reduction rules
    z = make_z()
    assert ("aA", "") in z.rules and ("Aa", "") in z.rules


def test_rewriting_json_round_trip():
    z2 = make_z2()
    data = z2.to_json()
    back = RewritingGroup.from_json(data)
    assert back.to_json() == data
    for w in ("ba", "bA", "aAbB", "BBaa"):
        assert back.normal_form(w) == z2.normal_form(w)


def test_ball_accepts_unnormalized_generators():
    z = make_z()
    ball = z.ball_enumerate(["aAa", "A"], 2)
    assert len(ball) == 5
