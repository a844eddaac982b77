"""Membership engine: goldens, determinism, and oracle agreement."""

import pytest

from loclang import (
    AlphabetMismatchError,
    Signature,
    Word,
    decide_membership,
    enumerate_language,
    language_equal_upto,
    reduct,
    satisfies,
    sigma_word_sentence,
    word_to_structure,
)

from .corpus import AB_NONE, A_STAR, B_STAR, JUST_AB, SPACED_B
from .oracles import brute_force_membership, words_upto

SIGMA = sigma_word_sentence()

# word -> (accepted, nodes explored); the node counts double as a
# regression net over search order, propagation and pruning
SIGMA_GOLDENS = {
    "": (True, 0),
    "a": (True, 3),
    "b": (False, 2),
    "aa": (False, 3),
    "ab": (False, 12),
    "ba": (False, 11),
    "aba": (True, 27),
    "bab": (False, 25),
    "aab": (False, 4),
    "baa": (False, 9),
    "abab": (False, 71),
    "abba": (False, 125),
    "ababa": (False, 33),
    "ababba": (True, 186),
    "ababbabbba": (True, 1097),
}


def test_sigma_membership_goldens():
    for word, (accepted, nodes) in SIGMA_GOLDENS.items():
        res = decide_membership(word, SIGMA)
        assert res.conclusive, word
        assert res.accepted == accepted, word
        assert res.nodes_explored == nodes, (word, res.nodes_explored)


def test_sigma_witness_facts():
    """The length-10 witness interprets the pairing function the way the
    staircase structure forces: each a-position pairs the b-blocks on
    either side of it."""
    res = decide_membership("ababbabbba", SIGMA)
    M = res.witness
    nontrivial_f = {
        args: v for args, v in M.functions["f"].items() if v != min(args)
    }
    assert nontrivial_f == {
        (0, 2): 1,
        (0, 5): 4,
        (0, 9): 8,
        (2, 5): 3,
        (2, 9): 7,
        (5, 9): 6,
    }
    assert {k[0]: v for k, v in M.functions["p"].items() if v != k[0]} == {
        1: 0, 3: 2, 4: 0, 6: 5, 7: 2, 8: 0
    }
    assert {k[0]: v for k, v in M.functions["p'"].items() if v != k[0]} == {
        1: 2, 3: 5, 4: 5, 6: 9, 7: 9, 8: 9
    }


def test_witness_is_a_real_expansion():
    for word in ("a", "aba", "ababba"):
        res = decide_membership(word, SIGMA)
        assert satisfies(res.witness, SIGMA.body).holds
        word_part = reduct(res.witness, Signature.word(SIGMA.alphabet))
        assert word_part == word_to_structure(word, SIGMA.alphabet)


def test_determinism():
    a = decide_membership("ababba", SIGMA)
    b = decide_membership("ababba", SIGMA)
    assert a.accepted == b.accepted
    assert a.nodes_explored == b.nodes_explored
    assert a.witness == b.witness


def test_alphabet_mismatch():
    with pytest.raises(AlphabetMismatchError):
        decide_membership("abc", SIGMA)


def test_empty_word_with_constants_rejected_immediately():
    res = decide_membership("", JUST_AB)
    assert res.conclusive and not res.accepted
    assert res.nodes_explored == 0


def test_budget_exhaustion_is_inconclusive():
    res = decide_membership("ababbabbba", SIGMA, budget=50)
    assert not res.conclusive
    assert not res.accepted


def test_enumerate_sigma_language():
    sample = enumerate_language(SIGMA, 6)
    assert sample.complete
    words = {"".join(w.letters) for w in sample.words}
    # staircase prefixes that end a complete block: triangular lengths
    assert words == {"", "a", "aba", "ababba"}


def test_enumerate_respects_budget():
    sample = enumerate_language(SIGMA, 6, budget=40)
    assert not sample.complete
    assert sample.undecided


def test_language_equal_upto():
    cmp = language_equal_upto(A_STAR, B_STAR, 3)
    assert not cmp.agree
    assert cmp.counterexample == Word(("a",))
    cmp2 = language_equal_upto(SIGMA, SIGMA, 4)
    assert cmp2.agree and cmp2.complete


def test_empty_language_sentence():
    sample = enumerate_language(AB_NONE, 4)
    assert sample.complete
    assert sample.words == ()


def test_engine_matches_naive_search_on_sigma():
    """Pruned engine vs the rescan-everything backtracker, exhaustively
    on short words."""
    for w in words_upto("ab", 5):
        assert decide_membership(w, SIGMA).accepted == brute_force_membership(
            w, SIGMA
        ), w


def test_engine_matches_naive_search_on_function_sentence():
    for w in words_upto("ab", 4):
        assert decide_membership(w, SPACED_B).accepted == brute_force_membership(
            w, SPACED_B
        ), w
