"""Finite structures: evaluation, closure, substructures, word codecs."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loclang import (
    FiniteStructure,
    Signature,
    StructureError,
    Word,
    closure,
    decide_membership,
    generated_substructure,
    is_indiscernible_above,
    reduct,
    satisfies,
    sigma_word_sentence,
    structure_to_word,
    word_to_structure,
)
from loclang.structures import (
    MissingSymbolError,
    NotAPartitionError,
    NotLinearOrderError,
)
from loclang.dsl import parse_sentence
from loclang.logic import to_universal_prenex

from .oracles import tarski_eval


def _universal(text):
    return to_universal_prenex(parse_sentence(text))

SIGMA = sigma_word_sentence()


def sigma_witness():
    res = decide_membership("ababbabbba", SIGMA)
    assert res.accepted
    return res.witness


# --- word <-> structure ---------------------------------------------------


def test_word_round_trip():
    for text in ("", "a", "ababba", "bbbb"):
        M = word_to_structure(text, "ab")
        assert "".join(structure_to_word(M).letters) == text


def test_empty_word_is_empty_structure():
    M = word_to_structure("", "ab")
    assert M.size == 0
    assert M.relations["<"] == frozenset()


def test_word_to_structure_rejects_foreign_letters():
    with pytest.raises(StructureError):
        word_to_structure("abc", "ab")


def test_structure_to_word_needs_word_shape():
    # no order relation at all
    sig = Signature(relations=(("P_a", 1),))
    M = FiniteStructure(1, sig, {}, {"P_a": frozenset({(0,)})}, {})
    with pytest.raises(MissingSymbolError):
        structure_to_word(M)
    # an order that is not linear
    sig2 = Signature.word(("a",))
    M2 = FiniteStructure(
        2, sig2, {}, {"<": frozenset(), "P_a": frozenset({(0,), (1,)})}, {}
    )
    with pytest.raises(NotLinearOrderError):
        structure_to_word(M2)
    # two letters on one position
    sig3 = Signature.word(("a", "b"))
    M3 = FiniteStructure(
        1,
        sig3,
        {},
        {"<": frozenset(), "P_a": frozenset({(0,)}), "P_b": frozenset({(0,)})},
        {},
    )
    with pytest.raises(NotAPartitionError):
        structure_to_word(M3)


def test_structure_validation():
    sig = Signature(constants=("c",), functions=(("g", 1),))
    with pytest.raises(StructureError):
        FiniteStructure(2, sig, {"c": 5}, {}, {"g": {(0,): 0, (1,): 1}})
    with pytest.raises(StructureError):
        # missing function entries
        FiniteStructure(2, sig, {"c": 0}, {}, {"g": {(0,): 0}})
    with pytest.raises(StructureError):
        # empty universe cannot interpret a constant
        FiniteStructure(0, sig, {}, {}, {"g": {}})


# --- JSON dict round-trip -------------------------------------------------


def test_to_dict_round_trip():
    M = sigma_witness()
    again = FiniteStructure.from_dict(M.to_dict())
    assert again == M
    # and the dict is plain data (stable under a json round trip)
    import json

    assert FiniteStructure.from_dict(json.loads(json.dumps(M.to_dict()))) == M


def test_from_dict_rejects_bad_payload():
    M = sigma_witness()
    data = M.to_dict()
    del data["size"]
    with pytest.raises(StructureError):
        FiniteStructure.from_dict(data)
    data2 = M.to_dict()
    data2["functions"]["f"] = data2["functions"]["f"][:-1]
    with pytest.raises(StructureError):
        FiniteStructure.from_dict(data2)


# --- evaluation vs the naive evaluator ------------------------------------

EVAL_SENTENCES = [
    _universal(s)
    for s in (
        "(forall x . P(x) | !P(x))",
        "(forall x y . x < y -> !(y < x))",
        "(forall x y . P(x) & !P(y) -> g(x) = g(y) | x < y)",
        "(forall x . g(g(x)) = x | P(g(x)))",
        "(forall x y . min(x, y) = x | min(x, y) = y)",
        "(forall x . P(c) -> g(c) = x | x < g(x))",
        "(forall x y z . x < y & y < z -> x < z)",
    )
]


def _canonical_order(n):
    return frozenset((i, j) for i in range(n) for j in range(n) if i < j)


def all_small_structures(max_size):
    """Every structure over {<, P, g, c} with the true order, sizes 1..max."""
    sig = Signature(
        constants=("c",), relations=(("<", 2), ("P", 1)), functions=(("g", 1),)
    )
    for n in range(1, max_size + 1):
        keys = [(i,) for i in range(n)]
        for c in range(n):
            for p_bits in itertools.product((0, 1), repeat=n):
                p = frozenset((i,) for i in range(n) if p_bits[i])
                for g_vals in itertools.product(range(n), repeat=n):
                    yield FiniteStructure(
                        n,
                        sig,
                        {"c": c},
                        {"<": _canonical_order(n), "P": p},
                        {"g": dict(zip(keys, g_vals))},
                    )


def test_satisfies_matches_naive_evaluator():
    count = 0
    for M in all_small_structures(3):
        for sent in EVAL_SENTENCES:
            got = satisfies(M, sent).holds
            want = tarski_eval(M, sent.as_formula())
            assert got == want, (M.to_dict(), sent)
        count += 1
    assert count == 2 + 2 * 4 * 4 + 3 * 8 * 27  # sizes 1..3


def test_satisfies_reports_failing_conjunct():
    M = word_to_structure("ba", "ab")
    sent = _universal(
        "(forall x y . x < y | y < x | x = y) & (forall x . P_a(x))"
    )
    verdict = satisfies(M, sent)
    assert not verdict.holds
    # the letter conjunct fails at position 0 (a 'b')
    from loclang.logic import Rel

    assert isinstance(verdict.failed_conjunct, Rel)
    assert verdict.failed_conjunct.name == "P_a"
    assert 0 in verdict.counterexample.values()


# --- closure --------------------------------------------------------------


def test_closure_walkthrough_trailing_segments():
    """On the length-10 witness, the two trailing segments from the
    narrative close in exactly two rounds."""
    M = sigma_witness()

    tail5 = closure(M, range(5, 10))
    assert [set(s) for s in tail5.stages] == [
        {5, 6, 7, 8, 9},
        {0, 2, 5, 6, 7, 8, 9},
        set(range(10)),
    ]
    assert tail5.steps == 2

    tail3 = closure(M, {7, 8, 9})
    assert [set(s) for s in tail3.stages] == [
        {7, 8, 9},
        {0, 2, 7, 8, 9},
        {0, 1, 2, 7, 8, 9},
    ]
    assert tail3.steps == 2


def test_closure_of_closed_set_is_zero_steps():
    M = sigma_witness()
    cl = closure(M, range(10))
    assert cl.steps == 0
    assert cl.result == frozenset(range(10))


@given(
    st.sets(st.integers(min_value=0, max_value=9)),
    st.sets(st.integers(min_value=0, max_value=9)),
)
@settings(max_examples=60, deadline=None)
def test_closure_monotone_and_idempotent(xs, ys):
    M = sigma_witness()
    cl_x = closure(M, xs).result
    cl_union = closure(M, xs | ys).result
    assert cl_x <= cl_union
    assert closure(M, cl_x).steps == 0


def test_closure_adds_constants():
    sig = Signature(constants=("c",), relations=(("<", 2),))
    M = FiniteStructure(3, sig, {"c": 2}, {"<": _canonical_order(3)}, {})
    trace = closure(M, {0})
    assert trace.result == frozenset({0, 2})
    assert trace.steps == 1
    # even from the empty set
    assert closure(M, ()).result == frozenset({2})


# --- generated substructures ----------------------------------------------


def test_substructure_induces_shorter_word():
    M = sigma_witness()
    sub, mapping = generated_substructure(M, {7, 8, 9})
    assert sub.size == 6
    # positions 0 1 2 7 8 9 of a b a b b a b b b a
    word_part = reduct(sub, Signature.word(("a", "b")))
    assert "".join(structure_to_word(word_part).letters) == "ababba"
    # renumbering is order-preserving
    items = sorted(mapping.items())
    assert [new for _, new in items] == list(range(6))
    assert satisfies(sub, SIGMA.body).holds


def test_substructure_of_whole_is_identity():
    M = sigma_witness()
    sub, mapping = generated_substructure(M, range(10))
    assert sub == M
    assert mapping == {i: i for i in range(10)}


# --- reducts --------------------------------------------------------------


def test_reduct_to_bare_order():
    M = word_to_structure("abab", "ab")
    bare = reduct(M, Signature(relations=(("<", 2),)))
    assert bare.relations == {"<": _canonical_order(4)}
    assert bare.signature.relations == (("<", 2),)


def test_reduct_requires_subsignature():
    M = word_to_structure("ab", "ab")
    with pytest.raises(StructureError):
        reduct(M, Signature(relations=(("Q", 1),)))


# --- indiscernibility -----------------------------------------------------


def test_indiscernible_singleton():
    M = sigma_witness()
    assert is_indiscernible_above(M, (5,), (), 1).indiscernible


def test_indiscernible_letter_positions_plain_word():
    W = word_to_structure("ababba", "ab")
    assert is_indiscernible_above(W, (0, 2, 5), (), 0).indiscernible


def test_indiscernible_a_positions_in_witness():
    """The witness interprets its pairing functions so uniformly that
    the a-positions stay indiscernible at one function application,
    even taking all four of them and length-4 tuples.  (With only three
    elements no 4-variable pattern is realized twice with three distinct
    values, so comparisons of two function images never get a pair to
    disagree on.)"""
    M = sigma_witness()
    for xs in [(0, 2, 5), (2, 5, 9), (0, 2, 9)]:
        assert is_indiscernible_above(M, xs, (), 1).indiscernible, xs
    assert is_indiscernible_above(
        M, (0, 2, 5, 9), (), 1, max_tuple_len=4
    ).indiscernible


def test_b_positions_are_discernible():
    """b-positions carry their block structure through p: the block
    predecessor of 3 is an a strictly above 1, the one of 4 is not."""
    M = sigma_witness()
    rep = is_indiscernible_above(M, (1, 3, 4), (), 1)
    assert not rep.indiscernible
    assert rep.left == (1, 3)
    assert rep.right == (1, 4)
    assert rep.atom == "x1 < p(x2)"


def test_parameters_can_discern():
    M = sigma_witness()
    rep = is_indiscernible_above(M, (0, 2, 9), (5,), 1)
    assert not rep.indiscernible
    assert rep.atom == "x1 < 5"
