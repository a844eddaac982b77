"""Locality audits: bound tables, counterexample hunting, report shape."""

from __future__ import annotations

import dataclasses
import json

import pytest

from loclang.audit import (
    SCALE_CAVEAT,
    UnknownConstructionError,
    audit_closure_bound,
    audit_substructure_closure,
    collect_models,
    declared_bound_for,
)
from loclang.dsl import read_local_sentence

from .corpus import BASE_SENTENCES

A_STAR = BASE_SENTENCES["a_star"]
AB_NONE = BASE_SENTENCES["ab_none"]
SIGMA = BASE_SENTENCES["sigma"]


# ---------------------------------------------------------------------------
# Bound table
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "construction,bounds,want",
    [
        ("union", [1, 2], 2),
        ("union", [4], 4),
        ("concat", [3, 1], 3),
        ("substitution", [1, 2, 1], 4),
        ("substitution", [2, 3], 6),
        ("morphism", [2], 2),
        ("inverse_morphism", [2], 3),
    ],
)
def test_declared_bound_table(construction, bounds, want):
    assert declared_bound_for(construction, bounds) == want


def test_declared_bound_errors():
    with pytest.raises(UnknownConstructionError):
        declared_bound_for("complement", [1])
    with pytest.raises(ValueError, match="at least one"):
        declared_bound_for("union", [])
    with pytest.raises(ValueError, match="outer bound plus inner"):
        declared_bound_for("substitution", [1])


# ---------------------------------------------------------------------------
# Counterexample hunting
# ---------------------------------------------------------------------------


def test_staircase_sentence_audits_consistent():
    report = audit_closure_bound(SIGMA, max_size=5, sentence_id="sigma")
    assert report.verdict == "consistent"
    assert report.declared_bound == 2
    assert report.max_steps_observed <= 2
    assert report.models_checked >= 4  # one witness per accepted word
    assert report.inconclusive_searches == 0


def test_substructure_audit_finds_nothing_on_sound_sentences():
    for name in ("a_star", "spaced_b"):
        report = audit_substructure_closure(BASE_SENTENCES[name], max_size=4)
        assert report.check == "substructure-closure"
        assert report.verdict == "consistent"
        assert report.violations == ()


def test_overclaimed_bound_is_falsified():
    """A successor function forces closures to grow one element per round,
    so a small declared bound is refuted by any medium-length witness."""
    stepper = read_local_sentence(
        "alphabet: a\n"
        "bound: 2\n"
        "forall x y . x < y -> x < s(x) & (s(x) < y | s(x) = y)\n"
    )
    report = audit_closure_bound(stepper, max_size=5, sentence_id="stepper")
    assert report.verdict == "falsified"
    assert report.max_steps_observed > 2
    kinds = {v.kind for v in report.violations}
    assert kinds == {"steps-exceeded"}
    assert any("closure took" in v.detail for v in report.violations)


def test_empty_language_is_inconclusive():
    report = audit_closure_bound(AB_NONE, max_size=3)
    assert report.models_checked == 0
    assert report.verdict == "inconclusive"


def test_budget_exhaustion_is_inconclusive():
    report = audit_closure_bound(SIGMA, max_size=3, budget=10)
    assert report.inconclusive_searches > 0
    assert report.models_checked >= 1
    assert report.verdict == "inconclusive"


def test_precollected_models_give_identical_reports():
    models = collect_models(SIGMA, 4, 10_000_000, seed=0)
    direct = audit_closure_bound(SIGMA, max_size=4, sentence_id="s")
    shared = audit_closure_bound(SIGMA, max_size=4, sentence_id="s", models=models)
    assert direct.to_dict() == shared.to_dict()
    sub = audit_substructure_closure(SIGMA, max_size=4, sentence_id="s", models=models)
    assert sub.verdict == "consistent"


def test_random_models_join_the_pool():
    # a sentence satisfied by half of all structures: random sampling
    # must contribute models beyond the word witnesses
    loose = read_local_sentence("alphabet: a\nforall x . P_a(x) | x <= x\n")
    models, inconclusive = collect_models(loose, 2, 10_000, random_tries=50)
    assert inconclusive == 0
    word_witnesses = 3  # empty word, "a", "aa"
    assert len(models) > word_witnesses


# ---------------------------------------------------------------------------
# Report shape
# ---------------------------------------------------------------------------


def test_report_serializes_and_summarizes():
    report = audit_closure_bound(A_STAR, max_size=3, sentence_id="a star")
    payload = report.to_dict()
    assert payload["verdict"] == report.verdict == "consistent"
    assert payload["check"] == "closure-bound"
    assert payload["note"] == SCALE_CAVEAT
    json.dumps(payload)  # stays plain-JSON serializable
    text = report.summary()
    assert "CONSISTENT" in text
    assert SCALE_CAVEAT in text


def test_audit_without_declared_bound_only_observes():
    ls = dataclasses.replace(A_STAR, declared_bound=None)
    report = audit_closure_bound(ls, max_size=3)
    assert report.declared_bound is None
    assert report.verdict == "consistent"
    assert "no declared bound" in report.summary()


def test_falsified_report_lists_violations_in_summary():
    stepper = read_local_sentence(
        "alphabet: a\n"
        "bound: 1\n"
        "forall x y . x < y -> x < s(x) & (s(x) < y | s(x) = y)\n"
    )
    report = audit_closure_bound(stepper, max_size=4)
    text = report.summary()
    assert "FALSIFIED" in text
    assert "steps-exceeded" in text
    assert json.dumps(report.to_dict())
