"""Empirical locality auditing.

A sentence with closure-step bound n promises two things of its models:
generated substructures are again models, and closures stabilize within
n rounds.  Neither can be proved by testing — the promises quantify over
all models, including infinite ones — so the audits here are falsifiers:
they hunt for counterexamples over models found at small sizes and
report ``consistent`` only in the sense of "nothing found at this
scale".  Every report carries that caveat verbatim.

Models come from two sources: expansion witnesses for every accepted
word up to a size cap, and randomly sampled structures kept when they
happen to satisfy the sentence (rare for interesting sentences, but they
add non-word-shaped coverage when they occur).
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .logic import LocalSentence, Signature
from .search import decide_membership
from .structures import (
    FiniteStructure,
    StructureError,
    closure,
    generated_substructure,
    satisfies,
)

SCALE_CAVEAT = (
    "consistent means no counterexample was found at this scale; "
    "it is not a proof"
)

_EXHAUSTIVE_SUBSET_SIZE = 5
_SAMPLED_SUBSETS = 1000
_RANDOM_TRIES_PER_SIZE = 100


class UnknownConstructionError(KeyError):
    pass


def declared_bound_for(construction: str, bounds: Iterable[int]) -> int:
    """Closure-step bound promised for a construction's output, from the
    bounds of its inputs (first entry = outer sentence where relevant)."""
    bounds = list(bounds)
    if not bounds:
        raise ValueError("need at least one input bound")
    if construction in ("union", "concat"):
        return max(bounds)
    if construction == "substitution":
        if len(bounds) < 2:
            raise ValueError("substitution needs the outer bound plus inner bounds")
        return 1 + bounds[0] + max(bounds[1:])
    if construction == "morphism":
        return bounds[0]
    if construction == "inverse_morphism":
        return bounds[0] + 1
    raise UnknownConstructionError(construction)


@dataclass(frozen=True)
class AuditViolation:
    model: FiniteStructure
    subset: tuple[int, ...]
    kind: str  # "substructure-not-model" | "steps-exceeded"
    detail: str = ""

    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "subset": list(self.subset),
            "kind": self.kind,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class AuditReport:
    sentence_id: str
    check: str  # "closure-bound" | "substructure-closure"
    models_checked: int
    subsets_checked: int
    max_steps_observed: int
    declared_bound: Optional[int]
    violations: tuple[AuditViolation, ...]
    inconclusive_searches: int
    note: str = SCALE_CAVEAT

    @property
    def verdict(self) -> str:
        if self.violations:
            return "falsified"
        if self.inconclusive_searches or self.models_checked == 0:
            return "inconclusive"
        return "consistent"

    def to_dict(self) -> dict:
        return {
            "sentence_id": self.sentence_id,
            "check": self.check,
            "models_checked": self.models_checked,
            "subsets_checked": self.subsets_checked,
            "max_steps_observed": self.max_steps_observed,
            "declared_bound": self.declared_bound,
            "violations": [v.to_dict() for v in self.violations],
            "inconclusive_searches": self.inconclusive_searches,
            "verdict": self.verdict,
            "note": self.note,
        }

    def summary(self) -> str:
        lines = [
            f"{self.check} audit of {self.sentence_id}: {self.verdict.upper()}",
            f"  models checked: {self.models_checked} "
            f"(subset checks: {self.subsets_checked})",
            f"  max closure steps observed: {self.max_steps_observed}"
            + (
                f" (declared bound {self.declared_bound})"
                if self.declared_bound is not None
                else " (no declared bound)"
            ),
        ]
        if self.inconclusive_searches:
            lines.append(
                f"  searches exhausting their budget: {self.inconclusive_searches}"
            )
        for v in self.violations[:5]:
            lines.append(
                f"  violation [{v.kind}] subset {list(v.subset)} of a "
                f"size-{v.model.size} model {v.detail}"
            )
        if len(self.violations) > 5:
            lines.append(f"  ... and {len(self.violations) - 5} more violations")
        lines.append(f"  note: {self.note}")
        return "\n".join(lines)


def _random_structure(sig: Signature, size: int, rng: random.Random) -> FiniteStructure:
    constants = {c: rng.randrange(size) for c in sig.constants}
    relations = {}
    for name, arity in sig.relations:
        tuples = [
            t
            for t in itertools.product(range(size), repeat=arity)
            if rng.random() < 0.5
        ]
        relations[name] = frozenset(tuples)
    functions = {}
    for name, arity in sig.functions:
        functions[name] = {
            args: rng.randrange(size)
            for args in itertools.product(range(size), repeat=arity)
        }
    return FiniteStructure(size, sig, constants, relations, functions)


def collect_models(
    ls: LocalSentence,
    max_size: int,
    budget: int,
    seed: int = 0,
    random_tries: int = _RANDOM_TRIES_PER_SIZE,
) -> tuple[list[FiniteStructure], int]:
    """Expansion witnesses for accepted words up to ``max_size``, plus
    seeded random structures that happen to satisfy the sentence.
    Returns the models and the number of budget-limited searches."""
    models: list[FiniteStructure] = []
    inconclusive = 0
    alphabet = tuple(sorted(ls.alphabet))
    for length in range(max_size + 1):
        for combo in itertools.product(alphabet, repeat=length):
            result = decide_membership("".join(combo), ls, budget)
            if not result.conclusive:
                inconclusive += 1
            elif result.accepted:
                models.append(result.witness)
    rng = random.Random(seed)
    sig = ls.signature()
    for size in range(1, max_size + 1):
        for _ in range(random_tries):
            candidate = _random_structure(sig, size, rng)
            try:
                if satisfies(candidate, ls.body).holds:
                    models.append(candidate)
            except StructureError:
                # a random "<" need not behave like an order, which can
                # leave min(...) undefined mid-evaluation; such a
                # structure is simply not a model
                continue
    return models, inconclusive


def _subsets_of(size: int, rng: random.Random) -> Iterable[tuple[int, ...]]:
    if size <= _EXHAUSTIVE_SUBSET_SIZE:
        universe = range(size)
        for k in range(size + 1):
            yield from itertools.combinations(universe, k)
    else:
        for _ in range(_SAMPLED_SUBSETS):
            mask = rng.getrandbits(size)
            yield tuple(i for i in range(size) if mask >> i & 1)


def audit_closure_bound(
    ls: LocalSentence,
    max_size: int = 7,
    budget: int = 10_000_000,
    seed: int = 0,
    sentence_id: str = "sentence",
    models: Optional[tuple[list[FiniteStructure], int]] = None,
) -> AuditReport:
    """Hunt for a subset of a model whose closure needs more rounds than
    the declared bound.  With no declared bound the audit just reports
    the largest step count observed.

    ``models`` short-circuits collection with a precomputed
    ``collect_models`` result, letting several audits of one sentence
    share the expensive part.
    """
    if models is None:
        models = collect_models(ls, max_size, budget, seed)
    models, inconclusive = models
    rng = random.Random(seed + 1)
    violations: list[AuditViolation] = []
    max_steps = 0
    subsets = 0
    for model in models:
        for subset in _subsets_of(model.size, rng):
            subsets += 1
            steps = closure(model, subset).steps
            max_steps = max(max_steps, steps)
            if ls.declared_bound is not None and steps > ls.declared_bound:
                violations.append(
                    AuditViolation(
                        model,
                        subset,
                        "steps-exceeded",
                        f"closure took {steps} steps",
                    )
                )
    return AuditReport(
        sentence_id=sentence_id,
        check="closure-bound",
        models_checked=len(models),
        subsets_checked=subsets,
        max_steps_observed=max_steps,
        declared_bound=ls.declared_bound,
        violations=tuple(violations),
        inconclusive_searches=inconclusive,
    )


def audit_substructure_closure(
    ls: LocalSentence,
    max_size: int = 7,
    budget: int = 10_000_000,
    seed: int = 0,
    sentence_id: str = "sentence",
    models: Optional[tuple[list[FiniteStructure], int]] = None,
) -> AuditReport:
    """Hunt for a generated substructure of a model that fails the
    sentence.  For universal sentences this can never happen; a
    violation here points at an evaluation or closure bug.

    ``models`` works as in :func:`audit_closure_bound`.
    """
    if models is None:
        models = collect_models(ls, max_size, budget, seed)
    models, inconclusive = models
    rng = random.Random(seed + 1)
    violations: list[AuditViolation] = []
    max_steps = 0
    subsets = 0
    for model in models:
        for subset in _subsets_of(model.size, rng):
            subsets += 1
            max_steps = max(max_steps, closure(model, subset).steps)
            sub, _ = generated_substructure(model, subset)
            verdict = satisfies(sub, ls.body)
            if not verdict.holds:
                violations.append(
                    AuditViolation(
                        model,
                        subset,
                        "substructure-not-model",
                        f"failing conjunct {verdict.failed_conjunct}",
                    )
                )
    return AuditReport(
        sentence_id=sentence_id,
        check="substructure-closure",
        models_checked=len(models),
        subsets_checked=subsets,
        max_steps_observed=max_steps,
        declared_bound=ls.declared_bound,
        violations=tuple(violations),
        inconclusive_searches=inconclusive,
    )
