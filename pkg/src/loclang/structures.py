"""Finite structures, words as ordered structures, and evaluation.

A structure's universe is ``0 .. size-1``.  Words over an alphabet become
structures over the word signature (the strict order ``<`` plus one unary
letter predicate per letter); richer structures add constants, extra
relations and total functions on top.

``satisfies`` checks a universal sentence conjunct by conjunct,
enumerating only the variables each conjunct actually uses, so sentences
assembled from many small conjuncts stay cheap even when their combined
prefix is long.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence, Union

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
    UniversalSentence,
    Var,
    ORDER_REL,
    conj,
    free_vars,
    letter_predicate,
    or_components,
)


class StructureError(ValueError):
    pass


class MissingSymbolError(StructureError):
    pass


class NotLinearOrderError(StructureError):
    pass


class NotAPartitionError(StructureError):
    pass


EMPTY_WORD_DISPLAY = "λ"  # λ


@dataclass(frozen=True)
class Word:
    """A finite word; letters may be multi-character strings."""

    letters: tuple[str, ...]

    @classmethod
    def from_text(cls, text: str) -> "Word":
        return cls(tuple(text))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return EMPTY_WORD_DISPLAY
        return "".join(self.letters)


def _as_word(w: Union[Word, str]) -> Word:
    return w if isinstance(w, Word) else Word.from_text(w)


@dataclass
class FiniteStructure:
    size: int
    signature: Signature
    constants: dict[str, int] = field(default_factory=dict)
    relations: dict[str, frozenset[tuple[int, ...]]] = field(default_factory=dict)
    functions: dict[str, dict[tuple[int, ...], int]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        n = self.size
        if n < 0:
            raise StructureError("size must be >= 0")

        declared_c = set(self.signature.constants)
        if set(self.constants) - declared_c:
            extra = sorted(set(self.constants) - declared_c)
            raise StructureError(f"constants not in signature: {extra}")
        for c in declared_c:
            if c not in self.constants:
                raise StructureError(f"no value for constant {c!r}")
            v = self.constants[c]
            if not 0 <= v < n:
                raise StructureError(f"constant {c!r} = {v} outside universe of size {n}")

        declared_r = dict(self.signature.relations)
        if set(self.relations) - set(declared_r):
            extra = sorted(set(self.relations) - set(declared_r))
            raise StructureError(f"relations not in signature: {extra}")
        rels: dict[str, frozenset[tuple[int, ...]]] = {}
        for name, arity in declared_r.items():
            tuples = frozenset(tuple(t) for t in self.relations.get(name, frozenset()))
            for t in tuples:
                if len(t) != arity:
                    raise StructureError(f"tuple {t} has wrong arity for {name}/{arity}")
                if any(not 0 <= v < n for v in t):
                    raise StructureError(f"tuple {t} of {name!r} outside universe")
            rels[name] = tuples
        self.relations = rels

        declared_f = dict(self.signature.functions)
        if set(self.functions) - set(declared_f):
            extra = sorted(set(self.functions) - set(declared_f))
            raise StructureError(f"functions not in signature: {extra}")
        funcs: dict[str, dict[tuple[int, ...], int]] = {}
        for name, arity in declared_f.items():
            table = {tuple(k): v for k, v in self.functions.get(name, {}).items()}
            expected = n**arity
            if len(table) != expected:
                raise StructureError(
                    f"function {name!r} has {len(table)} entries, needs {expected}"
                )
            for args, v in table.items():
                if len(args) != arity or any(not 0 <= a < n for a in args):
                    raise StructureError(f"bad argument tuple {args} for {name!r}")
                if not 0 <= v < n:
                    raise StructureError(f"{name}{args} = {v} outside universe")
            funcs[name] = table
        self.functions = funcs

    @property
    def universe(self) -> range:
        return range(self.size)

    # -- serialization ---------------------------------------------------

    def to_dict(self) -> dict:
        sig = {
            "constants": list(self.signature.constants),
            "relations": {name: arity for name, arity in self.signature.relations},
            "functions": {name: arity for name, arity in self.signature.functions},
        }
        relations = {
            name: sorted(list(t) for t in tuples)
            for name, tuples in self.relations.items()
        }
        functions = {}
        for name, arity in self.signature.functions:
            table = self.functions[name]
            flat = [
                table[args]
                for args in itertools.product(range(self.size), repeat=arity)
            ]
            functions[name] = flat
        return {
            "size": self.size,
            "signature": sig,
            "constants": dict(self.constants),
            "relations": relations,
            "functions": functions,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "FiniteStructure":
        try:
            size = int(data["size"])
            sig_data = data["signature"]
            signature = Signature(
                constants=tuple(sig_data.get("constants", ())),
                relations=tuple(
                    (name, int(a)) for name, a in sig_data.get("relations", {}).items()
                ),
                functions=tuple(
                    (name, int(a)) for name, a in sig_data.get("functions", {}).items()
                ),
            )
        except (KeyError, TypeError) as exc:
            raise StructureError(f"malformed structure data: {exc}") from exc
        relations = {
            name: frozenset(tuple(t) for t in tuples)
            for name, tuples in data.get("relations", {}).items()
        }
        functions: dict[str, dict[tuple[int, ...], int]] = {}
        for name, flat in data.get("functions", {}).items():
            arity = signature.function_arity(name)
            if arity is None:
                raise StructureError(f"function {name!r} not in signature block")
            if len(flat) != size**arity:
                raise StructureError(
                    f"function {name!r}: expected {size ** arity} values, got {len(flat)}"
                )
            table = {}
            for args, value in zip(
                itertools.product(range(size), repeat=arity), flat
            ):
                table[args] = int(value)
            functions[name] = table
        return cls(
            size=size,
            signature=signature,
            constants={c: int(v) for c, v in data.get("constants", {}).items()},
            relations=relations,
            functions=functions,
        )


# ---------------------------------------------------------------------------
# Words <-> structures
# ---------------------------------------------------------------------------


def word_to_structure(word: Union[Word, str], alphabet: Sequence[str]) -> FiniteStructure:
    word = _as_word(word)
    alpha = tuple(alphabet)
    bad = [a for a in word.letters if a not in alpha]
    if bad:
        raise StructureError(f"letters {sorted(set(bad))} not in alphabet {list(alpha)}")
    n = len(word)
    relations: dict[str, frozenset[tuple[int, ...]]] = {
        ORDER_REL: frozenset((i, j) for i in range(n) for j in range(i + 1, n))
    }
    for a in alpha:
        relations[letter_predicate(a)] = frozenset(
            (i,) for i, x in enumerate(word.letters) if x == a
        )
    return FiniteStructure(
        size=n, signature=Signature.word(alpha), relations=relations
    )


def structure_to_word(M: FiniteStructure) -> Word:
    """Read the word a structure's order and letter predicates spell out.

    The ``<`` relation must be a strict linear order and the letter
    predicates must partition the universe.
    """
    n = M.size
    if ORDER_REL not in M.relations:
        raise MissingSymbolError(f"structure has no {ORDER_REL!r} relation")
    order = M.relations[ORDER_REL]
    below = [0] * n
    for a, b in order:
        below[b] += 1
    if sorted(below) != list(range(n)):
        raise NotLinearOrderError("order relation is not a strict linear order")
    expected = frozenset(
        (a, b) for a in range(n) for b in range(n) if below[a] < below[b]
    )
    if order != expected:
        raise NotLinearOrderError("order relation is not a strict linear order")
    by_rank = sorted(range(n), key=lambda e: below[e])

    letter_rels = {
        name: tuples
        for name, tuples in M.relations.items()
        if name.startswith("P_") and len(name) > 2
    }
    letters: list[str] = []
    for e in by_rank:
        holders = [name[2:] for name, tuples in sorted(letter_rels.items()) if (e,) in tuples]
        if len(holders) != 1:
            raise NotAPartitionError(
                f"element {e} satisfies {len(holders)} letter predicates, wants exactly 1"
            )
        letters.append(holders[0])
    return Word(tuple(letters))


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def eval_term(M: FiniteStructure, t: Term, env: Mapping[str, int]) -> int:
    if isinstance(t, Var):
        try:
            return env[t.name]
        except KeyError:
            raise StructureError(f"unbound variable {t.name!r}") from None
    if isinstance(t, Const):
        try:
            return M.constants[t.name]
        except KeyError:
            raise MissingSymbolError(f"no constant {t.name!r} in structure") from None
    if isinstance(t, Func):
        try:
            table = M.functions[t.name]
        except KeyError:
            raise MissingSymbolError(f"no function {t.name!r} in structure") from None
        args = tuple(eval_term(M, a, env) for a in t.args)
        return table[args]
    if isinstance(t, Min):
        values = [eval_term(M, a, env) for a in t.args]
        try:
            order = M.relations[ORDER_REL]
        except KeyError:
            raise MissingSymbolError(
                f"min needs the {ORDER_REL!r} relation"
            ) from None
        for m in values:
            if all(v == m or (m, v) in order for v in values):
                return m
        raise StructureError(f"no least element among {values} under {ORDER_REL!r}")
    raise TypeError(f"not a term: {t!r}")


def eval_formula(M: FiniteStructure, f: Formula, env: Mapping[str, int]) -> bool:
    """Evaluate a quantifier-free formula."""
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, Eq):
        return eval_term(M, f.left, env) == eval_term(M, f.right, env)
    if isinstance(f, Rel):
        try:
            tuples = M.relations[f.name]
        except KeyError:
            raise MissingSymbolError(f"no relation {f.name!r} in structure") from None
        args = tuple(eval_term(M, a, env) for a in f.args)
        return args in tuples
    if isinstance(f, Not):
        return not eval_formula(M, f.body, env)
    if isinstance(f, And):
        return all(eval_formula(M, p, env) for p in f.parts)
    if isinstance(f, Or):
        return any(eval_formula(M, p, env) for p in f.parts)
    if isinstance(f, Implies):
        return (not eval_formula(M, f.left, env)) or eval_formula(M, f.right, env)
    raise ValueError(f"eval_formula is quantifier-free only, got {type(f).__name__}")


# ---------------------------------------------------------------------------
# Satisfaction of universal sentences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SatisfactionResult:
    holds: bool
    counterexample: Optional[dict[str, int]] = None
    failed_conjunct: Optional[Formula] = None

    def __bool__(self) -> bool:
        return self.holds


def _single_var_guard(g: Formula) -> Optional[str]:
    """Name of the variable when g is P(x) or !P(x) for a variable x."""
    inner = g.body if isinstance(g, Not) else g
    if isinstance(inner, Rel) and len(inner.args) == 1 and isinstance(inner.args[0], Var):
        return inner.args[0].name
    return None


def _strip_vacuous_guards(M: FiniteStructure, f: Formula) -> Optional[Formula]:
    """Drop relativization guards on variables the consequent never uses.

    ``forall y (P(y) -> C)`` with ``y`` not free in ``C`` holds when no
    element satisfies the guard, and otherwise equals the guard-free
    consequent restricted to the used variables.  Returns ``None`` when
    the formula is vacuously true, else an equivalent slimmed formula.
    """
    if not isinstance(f, Implies):
        return f
    guards = f.left.parts if isinstance(f.left, And) else (f.left,)
    used = free_vars(f.right)
    kept: list[Formula] = []
    by_unused_var: dict[str, list[Formula]] = {}
    for g in guards:
        v = _single_var_guard(g)
        if v is not None and v not in used:
            by_unused_var.setdefault(v, []).append(g)
        else:
            kept.append(g)
    for v, gs in by_unused_var.items():
        satisfiable = any(
            all(eval_formula(M, g, {v: e}) for g in gs) for e in M.universe
        )
        if not satisfiable:
            return None
    if not kept:
        return f.right
    return Implies(conj(kept), f.right)


def _holds_universally(
    M: FiniteStructure, f: Formula
) -> tuple[bool, Optional[dict[str, int]]]:
    """Decide M |= forall(free vars of f). f, returning a falsifying env."""
    if isinstance(f, And):
        for p in f.parts:
            ok, env = _holds_universally(M, p)
            if not ok:
                return False, env
        return True, None
    slim = _strip_vacuous_guards(M, f)
    if slim is None:
        return True, None
    names = sorted(free_vars(slim))
    if not names:
        return (True, None) if eval_formula(M, slim, {}) else (False, {})
    for values in itertools.product(M.universe, repeat=len(names)):
        env = dict(zip(names, values))
        if not eval_formula(M, slim, env):
            return False, env
    return True, None


def satisfies(
    M: FiniteStructure, sentence: Union[UniversalSentence, LocalSentence]
) -> SatisfactionResult:
    """Check a universal sentence against a finite structure."""
    if isinstance(sentence, LocalSentence):
        sentence = sentence.body
    for conjunct in sentence.conjuncts():
        components = or_components(conjunct)
        envs: list[dict[str, int]] = []
        satisfied = False
        for comp in components:
            ok, env = _holds_universally(M, comp)
            if ok:
                satisfied = True
                break
            envs.append(env if env is not None else {})
        if not satisfied:
            merged: dict[str, int] = {}
            for env in envs:
                merged.update(env)
            return SatisfactionResult(False, merged, conjunct)
    return SatisfactionResult(True)


# ---------------------------------------------------------------------------
# Closure and generated substructures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosureTrace:
    """Stages of repeatedly adding constants and function images.

    ``stages[0]`` is the starting set; each later stage applies one round.
    The final stage is closed.  ``steps`` counts the rounds that grew the
    set (so an already-closed start has 0 steps).
    """

    stages: tuple[frozenset[int], ...]

    @property
    def steps(self) -> int:
        return len(self.stages) - 1

    @property
    def result(self) -> frozenset[int]:
        return self.stages[-1]


def _closure_round(M: FiniteStructure, current: frozenset[int]) -> frozenset[int]:
    out = set(current)
    out.update(M.constants.values())
    for name, arity in M.signature.functions:
        table = M.functions[name]
        for args in itertools.product(sorted(current), repeat=arity):
            out.add(table[args])
    return frozenset(out)


def closure(M: FiniteStructure, start: Iterable[int]) -> ClosureTrace:
    current = frozenset(start)
    for e in current:
        if not 0 <= e < M.size:
            raise StructureError(f"element {e} outside universe of size {M.size}")
    stages = [current]
    while True:
        nxt = _closure_round(M, stages[-1])
        if nxt == stages[-1]:
            break
        stages.append(nxt)
    return ClosureTrace(tuple(stages))


def generated_substructure(
    M: FiniteStructure, start: Iterable[int]
) -> tuple[FiniteStructure, dict[int, int]]:
    """Substructure generated by ``start``: closed elements, renumbered.

    Returns the substructure together with the old-to-new element map;
    renumbering preserves the numeric order of the surviving elements.
    """
    elements = sorted(closure(M, start).result)
    to_new = {old: i for i, old in enumerate(elements)}
    keep = set(elements)
    constants = {c: to_new[v] for c, v in M.constants.items()}
    relations = {
        name: frozenset(
            tuple(to_new[v] for v in t)
            for t in tuples
            if all(v in keep for v in t)
        )
        for name, tuples in M.relations.items()
    }
    functions = {}
    for name, arity in M.signature.functions:
        table = M.functions[name]
        functions[name] = {
            tuple(to_new[a] for a in args): to_new[table[args]]
            for args in itertools.product(elements, repeat=arity)
        }
    sub = FiniteStructure(
        size=len(elements),
        signature=M.signature,
        constants=constants,
        relations=relations,
        functions=functions,
    )
    return sub, to_new


def reduct(M: FiniteStructure, signature: Signature) -> FiniteStructure:
    if not signature.is_subsignature_of(M.signature):
        raise StructureError("target signature is not contained in the structure's")
    return FiniteStructure(
        size=M.size,
        signature=signature,
        constants={c: M.constants[c] for c in signature.constants},
        relations={name: M.relations[name] for name, _ in signature.relations},
        functions={name: dict(M.functions[name]) for name, _ in signature.functions},
    )


# ---------------------------------------------------------------------------
# Indiscernibility probe
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IndiscernibilityReport:
    indiscernible: bool
    left: Optional[tuple[int, ...]] = None
    right: Optional[tuple[int, ...]] = None
    atom: Optional[str] = None


def _pattern(tup: tuple[int, ...]) -> tuple[tuple[int, int], ...]:
    """Order/equality pattern of a tuple, for order-isomorphism grouping."""
    return tuple(
        (int(a < b) - int(b < a), int(a == b))
        for a, b in itertools.combinations(tup, 2)
    )


class _ITerm:
    __slots__ = ("kind", "payload", "args", "depth")

    def __init__(self, kind: str, payload, args: tuple = (), depth: int = 0):
        self.kind = kind  # "var" | "param" | "func"
        self.payload = payload
        self.args = args
        self.depth = depth

    def eval(self, M: FiniteStructure, tup: tuple[int, ...]) -> int:
        if self.kind == "var":
            return tup[self.payload]
        if self.kind == "param":
            return self.payload
        table = M.functions[self.payload]
        return table[tuple(a.eval(M, tup) for a in self.args)]

    def show(self) -> str:
        if self.kind == "var":
            return f"x{self.payload + 1}"
        if self.kind == "param":
            return str(self.payload)
        return f"{self.payload}({', '.join(a.show() for a in self.args)})"


def _terms_upto(
    M: FiniteStructure, n_vars: int, params: Sequence[int], depth: int
) -> list[_ITerm]:
    level: list[_ITerm] = [_ITerm("var", i) for i in range(n_vars)]
    level += [_ITerm("param", p) for p in params]
    all_terms = list(level)
    for d in range(1, depth + 1):
        new: list[_ITerm] = []
        for name, arity in M.signature.functions:
            for args in itertools.product(all_terms, repeat=arity):
                if max(a.depth for a in args) == d - 1:
                    new.append(_ITerm("func", name, tuple(args), d))
        all_terms += new
    return all_terms


def is_indiscernible_above(
    M: FiniteStructure,
    positions: Iterable[int],
    params: Iterable[int] = (),
    depth: int = 1,
    max_tuple_len: int = 3,
) -> IndiscernibilityReport:
    """Do order-isomorphic tuples from ``positions`` satisfy the same atoms?

    Atoms use terms of nesting depth at most ``depth`` built from tuple
    variables, the given parameter elements and the structure's
    functions; tuples are compared up to length ``max_tuple_len``.
    Returns the first violating pair and the offending atom if any.
    """
    xs = sorted(set(positions))
    ps = sorted(set(params))
    for length in range(1, max_tuple_len + 1):
        terms = _terms_upto(M, length, ps, depth)
        atoms: list[tuple[str, str, tuple[_ITerm, ...]]] = []
        for name, arity in M.signature.relations:
            for args in itertools.product(terms, repeat=arity):
                atoms.append(("rel", name, args))
        for a, b in itertools.combinations_with_replacement(terms, 2):
            atoms.append(("eq", "=", (a, b)))
        groups: dict[tuple, list[tuple[int, ...]]] = {}
        for tup in itertools.product(xs, repeat=length):
            groups.setdefault(_pattern(tup), []).append(tup)
        for group in groups.values():
            for left, right in itertools.combinations(group, 2):
                for kind, name, args in atoms:
                    lv = tuple(t.eval(M, left) for t in args)
                    rv = tuple(t.eval(M, right) for t in args)
                    if kind == "eq":
                        l_ok = lv[0] == lv[1]
                        r_ok = rv[0] == rv[1]
                        text = f"{args[0].show()} = {args[1].show()}"
                    else:
                        l_ok = lv in M.relations[name]
                        r_ok = rv in M.relations[name]
                        if name == ORDER_REL and len(args) == 2:
                            text = f"{args[0].show()} < {args[1].show()}"
                        else:
                            text = f"{name}({', '.join(a.show() for a in args)})"
                    if l_ok != r_ok:
                        return IndiscernibilityReport(False, left, right, text)
    return IndiscernibilityReport(True)
