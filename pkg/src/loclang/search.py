"""Word membership by searching for a satisfying expansion.

A word belongs to the language of a universal sentence when its word
structure can be expanded — by choosing constants, extra relations and
total functions — into a model of the sentence.  The search assigns one
interpretation cell at a time (constants, then relation bits, then
function values), rechecking the affected conjuncts after each
assignment with three-valued evaluation, and backjumps on failure to the
most recent cell that actually contributed to it.

Variable-disjoint disjunctions are case-split first: ``forall xy (A(x) |
B(y))`` holds iff ``forall x A`` or ``forall y B`` does, so each case
carries a plain set of small conjuncts and the per-conjunct variable
enumeration stays polynomial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from .logic import (
    And,
    Const,
    Eq,
    FalseF,
    Formula,
    Func,
    LocalSentence,
    Min,
    Not,
    Or,
    Implies,
    Rel,
    Signature,
    Term,
    TrueF,
    Var,
    ORDER_REL,
    free_vars,
    letter_predicate,
    or_components,
)
from .structures import (
    FiniteStructure,
    Word,
    _as_word,
    reduct,
    satisfies,
    word_to_structure,
)

DEFAULT_BUDGET = 10_000_000

_MAX_CASES = 256
_ENV_CAP = 5_000_000


class AlphabetMismatchError(ValueError):
    pass


class SearchSpaceError(ValueError):
    """A conjunct needs more evaluation work than the engine will attempt."""


@dataclass(frozen=True)
class MembershipResult:
    accepted: bool
    witness: Optional[FiniteStructure]
    nodes_explored: int
    conclusive: bool

    def __bool__(self) -> bool:
        return self.accepted


def _split_cases(conjuncts: Sequence[Formula]) -> list[list[Formula]]:
    """All ways of committing to one variable-disjoint branch per disjunction.

    Conjunctions are flattened and disjunctions split recursively; when
    the case count would exceed a cap, remaining disjunctions are kept
    as-is inside their case.
    """
    remaining = [_MAX_CASES]

    def go(items: tuple[Formula, ...]) -> list[list[Formula]]:
        for idx, f in enumerate(items):
            if isinstance(f, And):
                return go(items[:idx] + f.parts + items[idx + 1 :])
            comps = or_components(f)
            if len(comps) > 1 and remaining[0] >= len(comps):
                remaining[0] -= len(comps) - 1
                out: list[list[Formula]] = []
                for comp in comps:
                    out.extend(go(items[:idx] + (comp,) + items[idx + 1 :]))
                return out
        return [list(items)]

    return go(tuple(conjuncts))


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------

_CONST = 0
_REL = 1
_FUNC = 2


class _Engine:
    def __init__(self, word: Word, ls: LocalSentence):
        self.word = word
        self.n = len(word)
        self.ls = ls
        self.signature = ls.signature()
        self.letters = word.letters

        word_rels = {(ORDER_REL, 2)}
        word_rels.update((letter_predicate(a), 1) for a in ls.alphabet)
        self.extra_rels = [p for p in self.signature.relations if p not in word_rels]
        self.letter_set = set(ls.alphabet)

        # cells: constants, then relation bits, then function values
        self.cells: list[tuple] = []
        self.cell_index: dict[tuple, int] = {}
        for c in self.signature.constants:
            self._add_cell((_CONST, c))
        for name, arity in self.extra_rels:
            for args in itertools.product(range(self.n), repeat=arity):
                self._add_cell((_REL, name, args))
        for name, arity in self.signature.functions:
            for args in itertools.product(range(self.n), repeat=arity):
                self._add_cell((_FUNC, name, args))
        self.values: list[Optional[int]] = [None] * len(self.cells)
        self.touched: list[int] = []

    def _add_cell(self, key: tuple) -> None:
        self.cell_index[key] = len(self.cells)
        self.cells.append(key)

    # -- compilation -----------------------------------------------------

    def compile_constraint(self, f: Formula):
        """Returns (eval_fn, var_names, triggers) for one conjunct.

        ``eval_fn(env)`` is three-valued (True/False/None); ``triggers``
        maps a cell index to binding instructions replayed when that cell
        is assigned.
        """
        names = sorted(free_vars(f))
        var_index = {v: i for i, v in enumerate(names)}
        k = len(names)
        if self.n > 1 and self.n**k > _ENV_CAP:
            raise SearchSpaceError(
                f"a conjunct with {k} variables needs {self.n}^{k} checks "
                f"on a word of length {self.n}; rewrite it as smaller conjuncts"
            )
        occurrences: list[tuple[str, tuple[Optional[int], ...], int]] = []
        # (symbol-kind tag is implicit in cell keys; we record per-symbol
        #  var-binding patterns: arg position -> variable slot or None)

        values = self.values
        touched = self.touched
        cell_index = self.cell_index
        letters = self.letters
        letter_set = self.letter_set

        def compile_term(t: Term):
            if isinstance(t, Var):
                i = var_index[t.name]
                return lambda env: env[i]
            if isinstance(t, Const):
                ci = cell_index[(_CONST, t.name)]
                occurrences.append(("const:" + t.name, (), 0))

                def read_const(env, ci=ci):
                    v = values[ci]
                    if v is not None:
                        touched.append(ci)
                    return v

                return read_const
            if isinstance(t, Func):
                argfs = tuple(compile_term(a) for a in t.args)
                pattern = tuple(
                    var_index[a.name] if isinstance(a, Var) else None for a in t.args
                )
                occurrences.append(("func:" + t.name, pattern, len(t.args)))
                name = t.name

                def read_func(env, name=name, argfs=argfs):
                    vals = []
                    for af in argfs:
                        v = af(env)
                        if v is None:
                            return None
                        vals.append(v)
                    ci = cell_index[(_FUNC, name, tuple(vals))]
                    v = values[ci]
                    if v is not None:
                        touched.append(ci)
                    return v

                return read_func
            if isinstance(t, Min):
                argfs = tuple(compile_term(a) for a in t.args)

                def read_min(env, argfs=argfs):
                    vals = []
                    for af in argfs:
                        v = af(env)
                        if v is None:
                            return None
                        vals.append(v)
                    return min(vals)

                return read_min
            raise TypeError(f"not a term: {t!r}")

        def compile_formula(g: Formula):
            if isinstance(g, TrueF):
                return lambda env: True
            if isinstance(g, FalseF):
                return lambda env: False
            if isinstance(g, Eq):
                lf, rf = compile_term(g.left), compile_term(g.right)

                def ev_eq(env):
                    l = lf(env)
                    if l is None:
                        return None
                    r = rf(env)
                    if r is None:
                        return None
                    return l == r

                return ev_eq
            if isinstance(g, Rel):
                argfs = tuple(compile_term(a) for a in g.args)
                if g.name == ORDER_REL:

                    def ev_less(env):
                        l = argfs[0](env)
                        if l is None:
                            return None
                        r = argfs[1](env)
                        if r is None:
                            return None
                        return l < r

                    return ev_less
                if (
                    g.name.startswith("P_")
                    and g.name[2:] in letter_set
                    and len(g.args) == 1
                ):
                    a = g.name[2:]

                    def ev_letter(env, a=a):
                        v = argfs[0](env)
                        if v is None:
                            return None
                        return letters[v] == a

                    return ev_letter
                pattern = tuple(
                    var_index[t.name] if isinstance(t, Var) else None for t in g.args
                )
                occurrences.append(("rel:" + g.name, pattern, len(g.args)))
                name = g.name

                def ev_rel(env, name=name, argfs=argfs):
                    vals = []
                    for af in argfs:
                        v = af(env)
                        if v is None:
                            return None
                        vals.append(v)
                    ci = cell_index[(_REL, name, tuple(vals))]
                    v = values[ci]
                    if v is None:
                        return None
                    touched.append(ci)
                    return bool(v)

                return ev_rel
            if isinstance(g, Not):
                bf = compile_formula(g.body)

                def ev_not(env):
                    v = bf(env)
                    return None if v is None else not v

                return ev_not
            if isinstance(g, And):
                partfs = tuple(compile_formula(p) for p in g.parts)

                def ev_and(env):
                    unknown = False
                    for pf in partfs:
                        v = pf(env)
                        if v is False:
                            return False
                        if v is None:
                            unknown = True
                    return None if unknown else True

                return ev_and
            if isinstance(g, Or):
                partfs = tuple(compile_formula(p) for p in g.parts)

                def ev_or(env):
                    unknown = False
                    for pf in partfs:
                        v = pf(env)
                        if v is True:
                            return True
                        if v is None:
                            unknown = True
                    return None if unknown else False

                return ev_or
            if isinstance(g, Implies):
                lf, rf = compile_formula(g.left), compile_formula(g.right)

                def ev_imp(env):
                    l = lf(env)
                    if l is False:
                        return True
                    r = rf(env)
                    if r is True:
                        return True
                    if l is True and r is False:
                        return False
                    return None

                return ev_imp
            raise TypeError(f"not a quantifier-free formula: {g!r}")

        fn = compile_formula(f)
        return fn, names, occurrences

    # -- checking --------------------------------------------------------

    def check_envs(self, eval_fn, k: int, bound: dict[int, int]) -> bool:
        """Evaluate over all environments extending ``bound`` (slot->value).

        Returns False as soon as some environment refutes the constraint;
        ``self.touched`` then holds the cells the refutation read.
        """
        env = [0] * k
        free = [i for i in range(k) if i not in bound]
        for i, v in bound.items():
            env[i] = v
        touched = self.touched
        if not free:
            touched.clear()
            return eval_fn(env) is not False
        for combo in itertools.product(range(self.n), repeat=len(free)):
            for i, v in zip(free, combo):
                env[i] = v
            touched.clear()
            if eval_fn(env) is False:
                return False
        return True


class _Case:
    """One case: a set of conjuncts that must all hold universally."""

    def __init__(self, engine: _Engine, conjuncts: Sequence[Formula]):
        self.engine = engine
        self.checks: list[tuple] = []  # (eval_fn, k)
        self.triggers: dict[int, list[tuple[int, tuple]]] = {}
        # triggers[cell] = [(check_id, pattern)]: pattern maps arg positions
        # to variable slots (None = ignore), replayed against the cell args
        for f in conjuncts:
            eval_fn, names, occurrences = engine.compile_constraint(f)
            k = len(names)
            check_id = len(self.checks)
            self.checks.append((eval_fn, k))
            for sym, pattern, arity in occurrences:
                kind, _, name = sym.partition(":")
                if kind == "const":
                    ci = engine.cell_index[(_CONST, name)]
                    self._add_trigger(ci, check_id, ())
                elif kind == "rel":
                    for args in itertools.product(range(engine.n), repeat=arity):
                        ci = engine.cell_index[(_REL, name, args)]
                        self._add_trigger(ci, check_id, pattern)
                else:
                    for args in itertools.product(range(engine.n), repeat=arity):
                        ci = engine.cell_index[(_FUNC, name, args)]
                        self._add_trigger(ci, check_id, pattern)

    def _add_trigger(self, cell: int, check_id: int, pattern: tuple) -> None:
        lst = self.triggers.setdefault(cell, [])
        if (check_id, pattern) not in lst:
            lst.append((check_id, pattern))

    def root_pass(self) -> bool:
        for eval_fn, k in self.checks:
            if not self.engine.check_envs(eval_fn, k, {}):
                return False
        return True

    def recheck_cell(self, ci: int) -> Optional[set[int]]:
        """Recheck constraints that read the just-assigned cell.

        Returns None if all pass, else the set of cells involved in the
        refutation (the conflict set, excluding the cell itself).
        """
        engine = self.engine
        key = engine.cells[ci]
        for check_id, pattern in self.triggers.get(ci, ()):
            eval_fn, k = self.checks[check_id]
            bound: dict[int, int] = {}
            consistent = True
            if pattern:
                args = key[2]
                for pos, slot in enumerate(pattern):
                    if slot is None:
                        continue
                    if slot in bound and bound[slot] != args[pos]:
                        consistent = False
                        break
                    bound[slot] = args[pos]
            if not consistent:
                continue
            if not engine.check_envs(eval_fn, k, bound):
                return set(engine.touched) - {ci}
        return None


def _search_case(
    engine: _Engine,
    case: _Case,
    budget_left: int,
) -> tuple[Optional[dict], int, bool]:
    """DFS over cell assignments with conflict-directed backjumping.

    Returns (assignment or None, nodes used, conclusive flag).
    """
    m = len(engine.cells)
    values = engine.values
    values[:] = [None] * m
    n = engine.n
    nodes = 0

    if not case.root_pass():
        return None, 0, True

    def domain(ci: int):
        if engine.cells[ci][0] == _REL:
            return (0, 1)
        return range(n)

    iters: list = [iter(domain(0))] if m else []
    conflicts: list[set[int]] = [set() for _ in range(m)]
    i = 0
    while True:
        if i == m:
            return (
                {engine.cells[ci]: values[ci] for ci in range(m)},
                nodes,
                True,
            )
        advanced = False
        for v in iters[i]:
            if nodes >= budget_left:
                for j in range(i, m):
                    values[j] = None
                return None, nodes, False
            nodes += 1
            values[i] = v
            conflict = case.recheck_cell(i)
            if conflict is None:
                advanced = True
                break
            conflicts[i] |= conflict
            values[i] = None
        if advanced:
            i += 1
            if i < m:
                iters[i:] = [iter(domain(i))]
                conflicts[i] = set()
            continue
        # every value failed: backjump to the latest cell we conflicted on
        values[i] = None
        if not conflicts[i]:
            return None, nodes, True
        j = max(conflicts[i])
        conflicts[j] |= conflicts[i] - {j}
        for t in range(j + 1, i + 1):
            values[t] = None
            conflicts[t] = set()
        iters = iters[: j + 1]
        i = j


def _build_witness(engine: _Engine, assignment: dict) -> FiniteStructure:
    word_struct = word_to_structure(engine.word, engine.ls.alphabet)
    constants = {
        name: assignment[(_CONST, name)] for name in engine.signature.constants
    }
    relations = dict(word_struct.relations)
    for name, arity in engine.extra_rels:
        relations[name] = frozenset(
            args
            for args in itertools.product(range(engine.n), repeat=arity)
            if assignment[(_REL, name, args)]
        )
    functions = {}
    for name, arity in engine.signature.functions:
        functions[name] = {
            args: assignment[(_FUNC, name, args)]
            for args in itertools.product(range(engine.n), repeat=arity)
        }
    return FiniteStructure(
        size=engine.n,
        signature=engine.signature,
        constants=constants,
        relations=relations,
        functions=functions,
    )


def decide_membership(
    word: Union[Word, str],
    ls: LocalSentence,
    budget: int = DEFAULT_BUDGET,
) -> MembershipResult:
    """Search for an expansion of the word that models the sentence."""
    word = _as_word(word)
    bad = [a for a in word.letters if a not in ls.alphabet]
    if bad:
        raise AlphabetMismatchError(
            f"letters {sorted(set(bad))} are not in the alphabet {list(ls.alphabet)}"
        )

    engine = _Engine(word, ls)

    if engine.n == 0 and engine.signature.constants:
        # the empty structure cannot interpret a constant
        return MembershipResult(False, None, 0, True)

    cases = _split_cases(engine.ls.body.conjuncts())
    nodes_total = 0
    all_conclusive = True
    for conjuncts in cases:
        case = _Case(engine, conjuncts)
        assignment, nodes, conclusive = _search_case(
            engine, case, budget - nodes_total
        )
        nodes_total += nodes
        if assignment is not None:
            witness = _build_witness(engine, assignment)
            check = satisfies(witness, ls.body)
            word_sig = Signature.word(ls.alphabet)
            same_word = reduct(witness, word_sig) == word_to_structure(
                word, ls.alphabet
            )
            if not check.holds or not same_word:
                raise RuntimeError(
                    "internal error: candidate witness failed re-verification"
                )
            return MembershipResult(True, witness, nodes_total, True)
        if not conclusive:
            all_conclusive = False
            break
    return MembershipResult(False, None, nodes_total, all_conclusive)


# ---------------------------------------------------------------------------
# Language enumeration and comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LanguageSample:
    words: tuple[Word, ...]
    undecided: tuple[Word, ...]
    max_len: int

    @property
    def complete(self) -> bool:
        return not self.undecided


def enumerate_language(
    ls: LocalSentence, max_len: int, budget: int = DEFAULT_BUDGET
) -> LanguageSample:
    """All member words up to a length, in length-lexicographic order.

    The budget applies per word; words the budget could not settle are
    reported separately.
    """
    members: list[Word] = []
    undecided: list[Word] = []
    for length in range(max_len + 1):
        for combo in itertools.product(ls.alphabet, repeat=length):
            w = Word(combo)
            res = decide_membership(w, ls, budget)
            if res.accepted:
                members.append(w)
            elif not res.conclusive:
                undecided.append(w)
    return LanguageSample(tuple(members), tuple(undecided), max_len)


@dataclass(frozen=True)
class LanguageComparison:
    agree: bool
    counterexample: Optional[Word]
    complete: bool
    max_len: int


def language_equal_upto(
    first: LocalSentence,
    second: LocalSentence,
    max_len: int,
    budget: int = DEFAULT_BUDGET,
) -> LanguageComparison:
    """Compare two languages on every word up to a length.

    Alphabets are unioned; a word undecided on either side makes the
    comparison incomplete rather than a counterexample.
    """
    alphabet = tuple(sorted(set(first.alphabet) | set(second.alphabet)))
    complete = True
    for length in range(max_len + 1):
        for combo in itertools.product(alphabet, repeat=length):
            w = Word(combo)
            ra = _member_or_none(w, first, budget)
            rb = _member_or_none(w, second, budget)
            if ra is None or rb is None:
                complete = False
                continue
            if ra != rb:
                return LanguageComparison(False, w, complete, max_len)
    return LanguageComparison(True, None, complete, max_len)


def _member_or_none(w: Word, ls: LocalSentence, budget: int) -> Optional[bool]:
    if any(a not in ls.alphabet for a in w.letters):
        return False
    res = decide_membership(w, ls, budget)
    if res.accepted:
        return True
    return False if res.conclusive else None
