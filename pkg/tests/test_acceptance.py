"""End-to-end gate: one test per headline guarantee.

Each test here exercises a whole subsystem against an independent
oracle or a frozen walkthrough and is time-boxed, so a pass means the
advertised behavior holds at the advertised scale.  The two audit
sweeps share one model collection per corpus case through a
module-scoped fixture; everything else recomputes from scratch.
"""

from __future__ import annotations

import dataclasses
import itertools
import time

import pytest

from loclang.audit import (
    audit_closure_bound,
    audit_substructure_closure,
    collect_models,
    declared_bound_for,
)
from loclang.dsl import load_local_sentence
from loclang.langtools import (
    PAREN_ALPHABET,
    antidyck_member,
    antidyck_member_queue,
    ultimately_periodic_divergence,
)
from loclang.logic import Signature
from loclang.search import decide_membership
from loclang.structures import (
    Word,
    closure,
    generated_substructure,
    reduct,
    structure_to_word,
)

from .corpus import (
    ALL_CASES,
    BASE_SENTENCES,
    SHIPPED_FILES,
    build_case,
    case_input_bounds,
    engine_language,
    oracle_language,
)
from .oracles import brute_force_membership, words_upto

SIGMA = BASE_SENTENCES["sigma"]

_CONSTRUCTION_OF = {
    "union": "union",
    "concat": "concat",
    "concat_guarded": "concat",
    "substitution": "substitution",
    "morphism": "morphism",
    "inverse_morphism": "inverse_morphism",
}


@pytest.fixture(scope="module")
def corpus_outputs():
    return {case.name: build_case(case) for case in ALL_CASES}


@pytest.fixture(scope="module")
def corpus_audit_data(corpus_outputs):
    """Per corpus case: output sentence carrying the table bound for its
    construction, plus the shared model collection at sizes up to 7."""
    data = {}
    for case in ALL_CASES:
        bound = declared_bound_for(
            _CONSTRUCTION_OF[case.op], case_input_bounds(case)
        )
        ls = dataclasses.replace(corpus_outputs[case.name], declared_bound=bound)
        data[case.name] = (case, ls, collect_models(ls, 7, 10_000_000))
    return data


def test_staircase_goldens_decide_quickly():
    """The staircase-word sentence accepts exactly the staircase prefixes,
    with conclusive answers in seconds per word at the default budget."""
    goldens = [
        ("", True),
        ("a", True),
        ("abba", False),
        ("b", False),
        ("ababba", True),
        ("ababbabbba", True),
    ]
    for text, accepted in goldens:
        started = time.monotonic()
        result = decide_membership(text, SIGMA)
        elapsed = time.monotonic() - started
        assert result.conclusive, text
        assert result.accepted == accepted, text
        assert elapsed < 10.0, (text, elapsed)


def test_closure_walkthrough_in_length_ten_witness():
    """Inside the witness for the length-10 staircase prefix: closing the
    last five positions recovers the whole universe within two rounds,
    closing the last three yields the length-6 prefix as a substructure,
    and no subset of any small witness ever needs more than two rounds."""
    w10 = decide_membership("ababbabbba", SIGMA).witness
    whole = closure(w10, range(5, 10))
    assert whole.result == set(range(10))
    assert whole.steps <= 2

    tail = closure(w10, {7, 8, 9})
    sub, mapping = generated_substructure(w10, tail.result)
    induced = structure_to_word(reduct(sub, Signature.word(SIGMA.alphabet)))
    assert induced == Word(tuple("ababba"))
    assert [mapping[i] for i in sorted(tail.result)] == list(range(sub.size))

    for text in ("", "a", "aba", "ababba"):
        witness = decide_membership(text, SIGMA).witness
        for k in range(witness.size + 1):
            for subset in itertools.combinations(range(witness.size), k):
                assert closure(witness, subset).steps <= 2, (text, subset)


def test_corpus_constructions_match_set_oracles(corpus_outputs):
    """Every corpus construction equals its set-level oracle exactly on
    all words of length up to 6, inside a 15-minute box.  The corpus has
    at least 20 union/concatenation/substitution cases and exercises
    every shipped sentence file."""
    started = time.monotonic()

    constructive = [
        c for c in ALL_CASES
        if c.op in ("union", "concat", "concat_guarded", "substitution")
    ]
    assert len(constructive) >= 20

    used = set()
    for case in ALL_CASES:
        for name in case.operands:
            used.update(name.replace("|", " ").replace(".", " ").split())
        for _, inner in case.inner_map or ():
            used.add(inner)
    stem_to_key = {
        "a_star": "a_star",
        "b_star": "b_star",
        "all_words_ab": "ab_all",
        "no_words_ab": "ab_none",
        "layered_letters": "layered",
        "just_ab": "just_ab",
        "spaced_b": "spaced_b",
        "sigma_word": "sigma",
    }
    assert {stem_to_key[path.stem] for path in SHIPPED_FILES} <= used

    mismatches = []
    for case in ALL_CASES:
        got = engine_language(corpus_outputs[case.name], 6)
        want = oracle_language(case, 6)
        if got != want:
            mismatches.append((case.name, sorted(got ^ want)[:5]))
    assert mismatches == []
    assert time.monotonic() - started < 900.0


@pytest.mark.slow
def test_table_bounds_audit_consistent(corpus_audit_data):
    """Auditing each corpus output against the bound table for its
    construction finds no counterexample on models up to size 7."""
    failures = []
    for name, (case, ls, models) in corpus_audit_data.items():
        report = audit_closure_bound(ls, 7, models=models, sentence_id=name)
        if report.verdict != "consistent":
            failures.append((name, report.verdict, report.max_steps_observed))
    assert failures == []


@pytest.mark.slow
def test_no_substructure_violations(corpus_audit_data):
    """Generated substructures of corpus-output models always satisfy the
    sentence again: zero violations across the corpus."""
    bad = []
    for name, (case, ls, models) in corpus_audit_data.items():
        report = audit_substructure_closure(ls, 7, models=models, sentence_id=name)
        if report.violations or report.verdict != "consistent":
            bad.append((name, report.verdict, len(report.violations)))
    assert bad == []


def test_antidyck_rewrite_equals_queue_semantics():
    """The cancellation rewrite and the FIFO-queue replay agree on every
    bracket word of length up to 8, within a minute."""
    assert antidyck_member(("y1", "Y1"))
    assert antidyck_member(("y1", "y2", "Y1", "Y2"))
    assert not antidyck_member(("y1", "y2", "Y2", "Y1"))

    started = time.monotonic()
    checked = 0
    for n in range(9):
        for combo in itertools.product(PAREN_ALPHABET, repeat=n):
            checked += 1
            assert antidyck_member(combo) == antidyck_member_queue(combo), combo
    assert checked == (4**9 - 1) // 3  # 87381 words
    assert time.monotonic() - started < 60.0


def test_periodic_words_always_diverge_from_staircase():
    """No ultimately periodic word u v^omega with short u and v tracks the
    staircase word: a divergence point appears within horizon 60."""
    for u_len in range(5):
        for u_tuple in itertools.product("ab", repeat=u_len):
            u = "".join(u_tuple)
            for v_len in range(1, 5):
                for v_tuple in itertools.product("ab", repeat=v_len):
                    v = "".join(v_tuple)
                    index = ultimately_periodic_divergence(u, v, 60)
                    assert index is not None, (u, v)


def test_search_agrees_with_naive_decider_on_shipped_sentences():
    """The pruned expansion search and the naive rescan-everything
    decider agree on every word of length up to 4, for every shipped
    sentence file."""
    for path in SHIPPED_FILES:
        ls = load_local_sentence(path)
        for word in words_upto(ls.alphabet, 4):
            result = decide_membership(word, ls)
            assert result.conclusive, (path.stem, word)
            assert result.accepted == brute_force_membership(word, ls), (
                path.stem,
                word,
            )
