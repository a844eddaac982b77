"""Core syntax: signatures, terms, formulas, and universal prenex form.

Terms and formulas are immutable ASTs built from frozen dataclasses.  The
order relation ``<`` and equality are treated as logical builtins: ``<``
may appear inside a :class:`Signature` (always binary), ``=`` never does,
and ``min`` is a builtin term former denoting the ``<``-least of its
arguments.  Letter predicates for an alphabet letter ``a`` are unary
relations named ``P_a``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Union

ORDER_REL = "<"
MIN_NAME = "min"
MAX_ARITY = 3

_RESERVED_NAMES = {"=", ORDER_REL, MIN_NAME}


class SignatureError(ValueError):
    pass


class ArityConflictError(SignatureError):
    """A symbol is used with two different arities or two different kinds."""

    def __init__(self, symbol: str, detail: str):
        super().__init__(f"conflicting use of symbol {symbol!r}: {detail}")
        self.symbol = symbol


class NotUniversalError(ValueError):
    """The sentence has an essentially existential quantifier."""

    def __init__(self, var: str, reason: str):
        super().__init__(f"sentence is not universal: quantifier on {var!r} {reason}")
        self.var = var


def letter_predicate(letter: str) -> str:
    return "P_" + letter


# ---------------------------------------------------------------------------
# Signatures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Signature:
    """Constant, relation, and function symbols with their arities.

    ``relations`` and ``functions`` are sorted tuples of ``(name, arity)``
    pairs; ``constants`` is a sorted tuple of names.  Names are unique
    across all three kinds.  ``<`` is only admitted as a binary relation,
    and ``=``/``min`` are rejected everywhere (they are builtins).
    """

    constants: tuple[str, ...] = ()
    relations: tuple[tuple[str, int], ...] = ()
    functions: tuple[tuple[str, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "constants", tuple(sorted(self.constants)))
        object.__setattr__(self, "relations", tuple(sorted(self.relations)))
        object.__setattr__(self, "functions", tuple(sorted(self.functions)))
        seen: set[str] = set()
        for name in self.constants:
            if name in _RESERVED_NAMES:
                raise SignatureError(f"{name!r} cannot be a constant")
            if name in seen:
                raise ArityConflictError(name, "declared twice")
            seen.add(name)
        for kind, pairs in (("relation", self.relations), ("function", self.functions)):
            for name, arity in pairs:
                if name in seen:
                    raise ArityConflictError(name, "declared twice")
                seen.add(name)
                if name == "=" or name == MIN_NAME:
                    raise SignatureError(f"{name!r} is a builtin and cannot be declared")
                if name == ORDER_REL and (kind != "relation" or arity != 2):
                    raise SignatureError("'<' is only admitted as a binary relation")
                if not (1 <= arity <= MAX_ARITY):
                    raise SignatureError(
                        f"{kind} {name!r} has arity {arity}; supported arities are 1..{MAX_ARITY}"
                    )

    # -- lookups ---------------------------------------------------------

    def relation_arity(self, name: str) -> Optional[int]:
        for n, a in self.relations:
            if n == name:
                return a
        return None

    def function_arity(self, name: str) -> Optional[int]:
        for n, a in self.functions:
            if n == name:
                return a
        return None

    def symbols(self) -> frozenset[str]:
        return frozenset(
            itertools.chain(
                self.constants,
                (n for n, _ in self.relations),
                (n for n, _ in self.functions),
            )
        )

    def is_subsignature_of(self, other: "Signature") -> bool:
        return (
            set(self.constants) <= set(other.constants)
            and set(self.relations) <= set(other.relations)
            and set(self.functions) <= set(other.functions)
        )

    def merge(self, other: "Signature") -> "Signature":
        """Union of two signatures; conflicting arities/kinds raise."""
        consts = set(self.constants) | set(other.constants)
        rels: dict[str, int] = dict(self.relations)
        funcs: dict[str, int] = dict(self.functions)
        for n, a in other.relations:
            if rels.get(n, a) != a:
                raise ArityConflictError(n, f"relation arity {rels[n]} vs {a}")
            rels[n] = a
        for n, a in other.functions:
            if funcs.get(n, a) != a:
                raise ArityConflictError(n, f"function arity {funcs[n]} vs {a}")
            funcs[n] = a
        return Signature(tuple(consts), tuple(rels.items()), tuple(funcs.items()))

    def restricted(self, names: Iterable[str]) -> "Signature":
        keep = set(names)
        return Signature(
            tuple(c for c in self.constants if c in keep),
            tuple(p for p in self.relations if p[0] in keep),
            tuple(p for p in self.functions if p[0] in keep),
        )

    # -- word signatures -------------------------------------------------

    @classmethod
    def word(cls, alphabet: Iterable[str]) -> "Signature":
        """The signature of bare word structures: ``<`` plus letter predicates."""
        rels = [(ORDER_REL, 2)] + [(letter_predicate(a), 1) for a in alphabet]
        return cls(relations=tuple(rels))

    def missing_word_symbols(self, alphabet: Iterable[str]) -> list[str]:
        """Word-signature symbols (with the right arity) absent from self."""
        missing = []
        if self.relation_arity(ORDER_REL) != 2:
            missing.append(ORDER_REL)
        for a in alphabet:
            if self.relation_arity(letter_predicate(a)) != 1:
                missing.append(letter_predicate(a))
        return missing

    def includes_word_signature(self, alphabet: Iterable[str]) -> bool:
        return not self.missing_word_symbols(alphabet)


# ---------------------------------------------------------------------------
# Terms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Term:
    pass


@dataclass(frozen=True)
class Var(Term):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Const(Term):
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Func(Term):
    name: str
    args: tuple[Term, ...]

    def __str__(self) -> str:
        return f"{self.name}({', '.join(map(str, self.args))})"


@dataclass(frozen=True)
class Min(Term):
    """Builtin: the ``<``-least of the argument values."""

    args: tuple[Term, ...]

    def __str__(self) -> str:
        return f"min({', '.join(map(str, self.args))})"


def term_complexity(t: Term) -> int:
    """Nesting depth of signature function applications; ``min`` is free."""
    if isinstance(t, (Var, Const)):
        return 0
    if isinstance(t, Min):
        return max((term_complexity(a) for a in t.args), default=0)
    if isinstance(t, Func):
        return 1 + max((term_complexity(a) for a in t.args), default=0)
    raise TypeError(f"not a term: {t!r}")


def term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Const):
        return frozenset()
    if isinstance(t, (Func, Min)):
        out: frozenset[str] = frozenset()
        for a in t.args:
            out |= term_vars(a)
        return out
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Formulas
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class TrueF(Formula):
    def __str__(self) -> str:
        return "true"


@dataclass(frozen=True)
class FalseF(Formula):
    def __str__(self) -> str:
        return "false"


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Rel(Formula):
    name: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class Or(Formula):
    parts: tuple[Formula, ...]


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


def conj(parts: Iterable[Formula]) -> Formula:
    """N-ary conjunction; flattens nested ``And`` and drops ``true``."""
    flat: list[Formula] = []
    for p in parts:
        if isinstance(p, And):
            flat.extend(p.parts)
        elif isinstance(p, TrueF):
            continue
        else:
            flat.append(p)
    if not flat:
        return TrueF()
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(parts: Iterable[Formula]) -> Formula:
    """N-ary disjunction; flattens nested ``Or`` and drops ``false``."""
    flat: list[Formula] = []
    for p in parts:
        if isinstance(p, Or):
            flat.extend(p.parts)
        elif isinstance(p, FalseF):
            continue
        else:
            flat.append(p)
    if not flat:
        return FalseF()
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def forall_many(vars: Iterable[str], body: Formula) -> Formula:
    out = body
    for v in reversed(tuple(vars)):
        out = Forall(v, out)
    return out


def free_vars(f: Formula) -> frozenset[str]:
    if isinstance(f, (TrueF, FalseF)):
        return frozenset()
    if isinstance(f, Eq):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Rel):
        out: frozenset[str] = frozenset()
        for a in f.args:
            out |= term_vars(a)
        return out
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        out = frozenset()
        for p in f.parts:
            out |= free_vars(p)
        return out
    if isinstance(f, Implies):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, (TrueF, FalseF, Eq, Rel)):
        return True
    if isinstance(f, Not):
        return is_quantifier_free(f.body)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(p) for p in f.parts)
    if isinstance(f, Implies):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    return False


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.body)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            yield from subformulas(p)
    elif isinstance(f, Implies):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    elif isinstance(f, (Forall, Exists)):
        yield from subformulas(f.body)


def _map_terms(f: Formula, fn) -> Formula:
    if isinstance(f, (TrueF, FalseF)):
        return f
    if isinstance(f, Eq):
        return Eq(fn(f.left), fn(f.right))
    if isinstance(f, Rel):
        return Rel(f.name, tuple(fn(a) for a in f.args))
    if isinstance(f, Not):
        return Not(_map_terms(f.body, fn))
    if isinstance(f, And):
        return And(tuple(_map_terms(p, fn) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(_map_terms(p, fn) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(_map_terms(f.left, fn), _map_terms(f.right, fn))
    if isinstance(f, Forall):
        return Forall(f.var, _map_terms(f.body, fn))
    if isinstance(f, Exists):
        return Exists(f.var, _map_terms(f.body, fn))
    raise TypeError(f"not a formula: {f!r}")


def substitute_var(f: Formula, var: str, replacement: Term) -> Formula:
    """Replace free occurrences of ``var``.  Replacement terms must not
    contain variables that could be captured; callers pass fresh names."""

    def on_term(t: Term) -> Term:
        if isinstance(t, Var):
            return replacement if t.name == var else t
        if isinstance(t, Const):
            return t
        if isinstance(t, Func):
            return Func(t.name, tuple(on_term(a) for a in t.args))
        if isinstance(t, Min):
            return Min(tuple(on_term(a) for a in t.args))
        raise TypeError(f"not a term: {t!r}")

    if isinstance(f, (Forall, Exists)):
        if f.var == var:
            return f
        body = substitute_var(f.body, var, replacement)
        return type(f)(f.var, body)
    if isinstance(f, Not):
        return Not(substitute_var(f.body, var, replacement))
    if isinstance(f, And):
        return And(tuple(substitute_var(p, var, replacement) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(substitute_var(p, var, replacement) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(
            substitute_var(f.left, var, replacement),
            substitute_var(f.right, var, replacement),
        )
    return _map_terms(f, on_term)


def rename_symbols(f: Formula, mapping: dict[str, str]) -> Formula:
    """Rename constant/function/relation symbols throughout a formula."""

    def on_term(t: Term) -> Term:
        if isinstance(t, Var):
            return t
        if isinstance(t, Const):
            return Const(mapping.get(t.name, t.name))
        if isinstance(t, Func):
            return Func(mapping.get(t.name, t.name), tuple(on_term(a) for a in t.args))
        if isinstance(t, Min):
            return Min(tuple(on_term(a) for a in t.args))
        raise TypeError(f"not a term: {t!r}")

    def walk(g: Formula) -> Formula:
        if isinstance(g, Rel):
            return Rel(mapping.get(g.name, g.name), tuple(on_term(a) for a in g.args))
        if isinstance(g, Eq):
            return Eq(on_term(g.left), on_term(g.right))
        if isinstance(g, (TrueF, FalseF)):
            return g
        if isinstance(g, Not):
            return Not(walk(g.body))
        if isinstance(g, And):
            return And(tuple(walk(p) for p in g.parts))
        if isinstance(g, Or):
            return Or(tuple(walk(p) for p in g.parts))
        if isinstance(g, Implies):
            return Implies(walk(g.left), walk(g.right))
        if isinstance(g, Forall):
            return Forall(g.var, walk(g.body))
        if isinstance(g, Exists):
            return Exists(g.var, walk(g.body))
        raise TypeError(f"not a formula: {g!r}")

    return walk(f)


# ---------------------------------------------------------------------------
# Signature inference
# ---------------------------------------------------------------------------


def _collect_symbols(x, table: dict[str, tuple[str, int]]) -> None:
    def note(name: str, kind: str, arity: int) -> None:
        prev = table.get(name)
        if prev is None:
            table[name] = (kind, arity)
        elif prev != (kind, arity):
            raise ArityConflictError(
                name, f"used as {prev[0]}/{prev[1]} and as {kind}/{arity}"
            )

    if isinstance(x, Var):
        return
    if isinstance(x, Const):
        note(x.name, "constant", 0)
        return
    if isinstance(x, Func):
        note(x.name, "function", len(x.args))
        for a in x.args:
            _collect_symbols(a, table)
        return
    if isinstance(x, Min):
        for a in x.args:
            _collect_symbols(a, table)
        return
    if isinstance(x, (TrueF, FalseF)):
        return
    if isinstance(x, Eq):
        _collect_symbols(x.left, table)
        _collect_symbols(x.right, table)
        return
    if isinstance(x, Rel):
        note(x.name, "relation", len(x.args))
        for a in x.args:
            _collect_symbols(a, table)
        return
    if isinstance(x, Not):
        _collect_symbols(x.body, table)
        return
    if isinstance(x, (And, Or)):
        for p in x.parts:
            _collect_symbols(p, table)
        return
    if isinstance(x, Implies):
        _collect_symbols(x.left, table)
        _collect_symbols(x.right, table)
        return
    if isinstance(x, (Forall, Exists)):
        _collect_symbols(x.body, table)
        return
    raise TypeError(f"cannot collect symbols from {x!r}")


def signature_of(x: Union[Formula, Term, "UniversalSentence", "LocalSentence"]) -> Signature:
    """Infer the signature of a formula/term from how symbols are used.

    Raises :class:`ArityConflictError` when a symbol is used inconsistently.
    """
    if isinstance(x, UniversalSentence):
        return signature_of(x.matrix)
    if isinstance(x, LocalSentence):
        return signature_of(x.body)
    table: dict[str, tuple[str, int]] = {}
    _collect_symbols(x, table)
    consts = [n for n, (k, _) in table.items() if k == "constant"]
    rels = [(n, a) for n, (k, a) in table.items() if k == "relation"]
    funcs = [(n, a) for n, (k, a) in table.items() if k == "function"]
    return Signature(tuple(consts), tuple(rels), tuple(funcs))


# ---------------------------------------------------------------------------
# Universal sentences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniversalSentence:
    """A universal prenex sentence: ``forall prefix . matrix``.

    The matrix is quantifier-free with free variables among the prefix.
    """

    prefix: tuple[str, ...]
    matrix: Formula

    def __post_init__(self) -> None:
        if len(set(self.prefix)) != len(self.prefix):
            raise ValueError("prefix variables must be distinct")
        if not is_quantifier_free(self.matrix):
            raise ValueError("matrix must be quantifier-free")
        extra = free_vars(self.matrix) - set(self.prefix)
        if extra:
            raise ValueError(f"matrix has free variables outside the prefix: {sorted(extra)}")

    def conjuncts(self) -> tuple[Formula, ...]:
        if isinstance(self.matrix, And):
            return self.matrix.parts
        return (self.matrix,)

    def as_formula(self) -> Formula:
        return forall_many(self.prefix, self.matrix)


def _fresh_name(base: str, taken: set[str]) -> str:
    if base not in taken:
        return base
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def to_universal_prenex(sentence: Formula) -> UniversalSentence:
    """Hoist quantifiers of a closed formula into a universal prefix.

    Quantifiers that would surface existentially (a positive ``exists`` or
    a negated ``forall``) raise :class:`NotUniversalError`.  Bound
    variables are renamed apart when hoisting would clash; the matrix
    keeps its original connective structure.
    """
    fv = free_vars(sentence)
    if fv:
        raise ValueError(f"not a sentence; free variables {sorted(fv)}")

    sig_syms = set(signature_of(sentence).symbols())
    # Renaming targets must dodge every binder name in the sentence, or a
    # substitution could be captured by a deeper quantifier.
    taken = sig_syms | {
        sub.var for sub in subformulas(sentence) if isinstance(sub, (Forall, Exists))
    }

    prefix: list[str] = []

    def pick_name(var: str) -> str:
        if var not in prefix and var not in sig_syms:
            return var
        return _fresh_name(var, set(prefix) | taken)

    def hoist(f: Formula, positive: bool) -> Formula:
        if isinstance(f, Forall):
            if not positive:
                raise NotUniversalError(f.var, "is universal under a negation")
            name = pick_name(f.var)
            body = f.body if name == f.var else substitute_var(f.body, f.var, Var(name))
            prefix.append(name)
            return hoist(body, positive)
        if isinstance(f, Exists):
            if positive:
                raise NotUniversalError(f.var, "is existential")
            name = pick_name(f.var)
            body = f.body if name == f.var else substitute_var(f.body, f.var, Var(name))
            prefix.append(name)
            return hoist(body, positive)
        if isinstance(f, Not):
            return Not(hoist(f.body, not positive))
        if isinstance(f, And):
            return And(tuple(hoist(p, positive) for p in f.parts))
        if isinstance(f, Or):
            return Or(tuple(hoist(p, positive) for p in f.parts))
        if isinstance(f, Implies):
            left = hoist(f.left, not positive)
            right = hoist(f.right, positive)
            return Implies(left, right)
        return f

    matrix = hoist(sentence, True)
    return UniversalSentence(tuple(prefix), matrix)


# ---------------------------------------------------------------------------
# Local sentences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LocalSentence:
    """A universal sentence read over words of a fixed alphabet.

    ``declared_bound`` is the claimed closure-step bound for models of the
    body (``None`` when unknown).  Construction normalizes the alphabet to
    a sorted tuple; use :func:`validate` for signature diagnostics.
    """

    body: UniversalSentence
    alphabet: tuple[str, ...]
    declared_bound: Optional[int] = None

    def __post_init__(self) -> None:
        letters = tuple(sorted(set(self.alphabet)))
        if not letters:
            raise ValueError("alphabet must be nonempty")
        if any(not a for a in letters):
            raise ValueError("letters must be nonempty strings")
        object.__setattr__(self, "alphabet", letters)
        if self.declared_bound is not None and self.declared_bound < 1:
            raise ValueError("declared_bound must be >= 1")

    def letter_predicates(self) -> tuple[str, ...]:
        return tuple(letter_predicate(a) for a in self.alphabet)

    def signature(self) -> Signature:
        """Symbols of the body merged with the word signature.

        This is the signature expansions are searched over: the word part
        is always present even when the body does not mention every letter.
        """
        return signature_of(self.body).merge(Signature.word(self.alphabet))


def validate(ls: LocalSentence) -> list[str]:
    """Diagnostics for a local sentence; empty iff the body mentions the
    whole word signature consistently (letter predicates unary, ``<``
    binary) and symbol use is arity-consistent."""
    diags: list[str] = []
    try:
        sig = signature_of(ls.body)
    except ArityConflictError as e:
        return [str(e)]
    for name in sig.symbols():
        if name in {"=", MIN_NAME}:
            diags.append(f"symbol {name!r} is reserved")
    for missing in sig.missing_word_symbols(ls.alphabet):
        if missing == ORDER_REL:
            diags.append("order relation '<' missing from signature")
        else:
            diags.append(f"letter predicate {missing!r} missing from signature")
    return diags


# ---------------------------------------------------------------------------
# Variable-disjoint disjunction splitting
# ---------------------------------------------------------------------------


def or_components(f: Formula) -> list[Formula]:
    """Split a top-level disjunction into variable-disjoint groups.

    ``forall xs (A(x) | B(y))`` with disjoint variables is equivalent to
    ``forall x A | forall y B``; this returns the grouped disjuncts (each
    group rejoined with ``|``) so callers can case-split.  A formula that
    is not an ``Or``, or whose disjuncts all share variables, comes back
    as a single group.
    """
    if not isinstance(f, Or):
        return [f]
    parts = f.parts
    varsets = [free_vars(p) for p in parts]
    group_of = list(range(len(parts)))

    def find(i: int) -> int:
        while group_of[i] != i:
            group_of[i] = group_of[group_of[i]]
            i = group_of[i]
        return i

    for i in range(len(parts)):
        for j in range(i + 1, len(parts)):
            if varsets[i] & varsets[j]:
                group_of[find(i)] = find(j)
    buckets: dict[int, list[int]] = {}
    for i in range(len(parts)):
        buckets.setdefault(find(i), []).append(i)
    if len(buckets) == 1:
        return [f]
    groups = sorted(buckets.values(), key=min)
    return [disj(parts[i] for i in idxs) for idxs in groups]
