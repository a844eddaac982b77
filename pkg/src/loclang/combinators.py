"""Language operations realized as sentence constructions.

Each operation takes universal sentences and produces a universal
sentence for the combined language: union, concatenation, letterwise
substitution, alphabetic morphism image, and inverse alphabetic
morphism.  The constructions keep every conjunct small (they relativize
conjunct by conjunct rather than wrapping whole matrices), which keeps
both the expansion search and satisfaction checks cheap.

Two conventions matter throughout:

* auxiliary functions a model does not "use" are pinned to a neutral
  value (the least argument, or the argument itself), so they never
  enlarge generated substructures and closure-step bounds survive the
  construction;
* a sentence is expected to pin its own letters down (a conjunct saying
  each position carries exactly one letter of its alphabet), as
  :func:`always_true` and every shipped example do.  Without that, e.g.
  the union of languages over different alphabets can leak words that
  mix letters.

The empty word needs care: it belongs to a language iff the sentence has
no constants and its variable-free conjuncts hold, and a sentence using
constants can never accept it.  Each construction documents how that
plays out.
"""

from __future__ import annotations

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
    _fresh_name,
    conj,
    disj,
    free_vars,
    letter_predicate,
    rename_symbols,
    signature_of,
    substitute_var,
)
from .structures import Word, _as_word


class CombinatorError(ValueError):
    pass


class ErasingMorphismError(CombinatorError):
    pass


class InnerLanguageAcceptsEmptyError(CombinatorError):
    """Substitution needs every letter language to reject the empty word."""


# ---------------------------------------------------------------------------
# Small helpers
# ---------------------------------------------------------------------------


class _VarSupply:
    """Fresh variable names avoiding a fixed set of taken names."""

    def __init__(self, taken: Iterable[str], base: str = "u"):
        self.taken = set(taken)
        self.base = base
        self.counter = 0

    def fresh(self) -> str:
        while True:
            self.counter += 1
            name = f"{self.base}{self.counter}"
            if name not in self.taken:
                self.taken.add(name)
                return name

    def fresh_many(self, count: int) -> list[str]:
        return [self.fresh() for _ in range(count)]


def _leq(a: Term, b: Term) -> Formula:
    return Or((Rel(ORDER_REL, (a, b)), Eq(a, b)))


def _exactly_one(atoms: Sequence[Formula]) -> Formula:
    parts: list[Formula] = [disj(atoms)]
    for i in range(len(atoms)):
        for j in range(i + 1, len(atoms)):
            parts.append(Not(And((atoms[i], atoms[j]))))
    return conj(parts)


def _letter_partition(var: str, alphabet: Sequence[str]) -> Formula:
    x = Var(var)
    return _exactly_one([Rel(letter_predicate(a), (x,)) for a in alphabet])


def _all_symbols(*sentences: LocalSentence) -> set[str]:
    out: set[str] = set()
    for ls in sentences:
        out |= set(ls.signature().symbols())
        out |= set(ls.body.prefix)
    return out


def _rename_vars_apart(body: UniversalSentence, taken: set[str]) -> UniversalSentence:
    """Rename prefix variables clashing with ``taken``; updates ``taken``."""
    matrix = body.matrix
    new_prefix = []
    for v in body.prefix:
        if v in taken:
            nv = _fresh_name(v, taken)
            matrix = substitute_var(matrix, v, Var(nv))
            new_prefix.append(nv)
            taken.add(nv)
        else:
            new_prefix.append(v)
            taken.add(v)
    return UniversalSentence(tuple(new_prefix), matrix)


def rename_apart(first: LocalSentence, second: LocalSentence) -> LocalSentence:
    """Rename ``second``'s private symbols and variables off ``first``'s.

    The order relation and letter predicates are shared vocabulary and
    stay put; everything else (constants, functions, other relations)
    that clashes is renamed with a numeric suffix.
    """
    shared = {ORDER_REL} | {letter_predicate(a) for a in second.alphabet}
    taken = _all_symbols(first) | _all_symbols(second)
    sig2 = signature_of(second.body)
    mapping: dict[str, str] = {}
    for name in sorted(sig2.symbols()):
        if name in shared:
            continue
        if name in _all_symbols(first):
            mapping[name] = _fresh_name(name, taken)
            taken.add(mapping[name])
    matrix = rename_symbols(second.body.matrix, mapping) if mapping else second.body.matrix
    body = UniversalSentence(second.body.prefix, matrix)
    body = _rename_vars_apart(body, _all_symbols(first) | set(signature_of(body).symbols()))
    return LocalSentence(body, second.alphabet, second.declared_bound)


def _conjunct_list(body: UniversalSentence) -> list[Formula]:
    out: list[Formula] = []
    work = list(body.conjuncts())
    while work:
        f = work.pop(0)
        if isinstance(f, And):
            work = list(f.parts) + work
        else:
            out.append(f)
    return out


def _assemble(conjuncts: Sequence[Formula], alphabet: Iterable[str], bound: Optional[int]) -> LocalSentence:
    matrix = conj(conjuncts)
    sig = signature_of(matrix)
    if sig.relation_arity(ORDER_REL) is None:
        # keep the order relation in the signature even when no conjunct
        # happens to use it
        v = _fresh_name("x", set(sig.symbols()) | free_vars(matrix))
        conjuncts = list(conjuncts) + [_leq(Var(v), Var(v))]
    seen: list[str] = []
    for f in conjuncts:
        for v in sorted(free_vars(f)):
            if v not in seen:
                seen.append(v)
    body = UniversalSentence(tuple(seen), conj(conjuncts))
    return LocalSentence(body, tuple(alphabet), bound)


def _bound_after_new_constant(bound: Optional[int], sig: Signature) -> Optional[int]:
    """Adding a fresh constant can delay closure by one round when
    functions can act on its value; without functions nothing changes."""
    if bound is None:
        return None
    return bound + 1 if sig.functions else bound


def _min_pin(name: str, arity: int, supply: _VarSupply, guard: Optional[Formula] = None,
             guard_vars: Optional[list[str]] = None) -> Formula:
    """``f(v..) = min(v..)`` (or ``= v`` when unary), optionally guarded."""
    if guard_vars is None:
        vs = supply.fresh_many(arity)
    else:
        vs = guard_vars
    args = tuple(Var(v) for v in vs)
    value: Term = args[0] if arity == 1 else Min(args)
    eq = Eq(Func(name, args), value)
    if guard is None:
        return eq
    return Implies(guard, eq)


# ---------------------------------------------------------------------------
# Trivial languages
# ---------------------------------------------------------------------------


def always_true(alphabet: Sequence[str]) -> LocalSentence:
    """Accepts every word over the alphabet (the letter-partition sentence)."""
    letters = tuple(sorted(set(alphabet)))
    x = Var("x")
    matrix = conj([_leq(x, x), _letter_partition("x", letters)])
    return LocalSentence(UniversalSentence(("x",), matrix), letters, 1)


def always_false(alphabet: Sequence[str]) -> LocalSentence:
    """Accepts nothing: a constant that both carries and lacks a letter."""
    letters = tuple(sorted(set(alphabet)))
    x = Var("x")
    first = letter_predicate(letters[0])
    c = Const("z0")
    matrix = conj(
        [
            _leq(x, x),
            _letter_partition("x", letters),
            Rel(first, (c,)),
            Not(Rel(first, (c,))),
        ]
    )
    return LocalSentence(UniversalSentence(("x",), matrix), letters, 1)


# ---------------------------------------------------------------------------
# Union
# ---------------------------------------------------------------------------


def union_sentence(first: LocalSentence, second: LocalSentence) -> LocalSentence:
    """Language union via a variable-disjoint disjunction.

    Each branch asserts one operand's matrix and pins the other
    operand's functions to least-argument values so they cannot affect
    generated substructures.  The other operand's constants stay
    unconstrained; when only one operand uses constants and the other
    accepts the empty word, the union sentence still rejects the empty
    word (no sentence with constants can accept it) — the one place the
    construction is coarser than the word-set union.
    """
    second = rename_apart(first, second)
    alphabet = tuple(sorted(set(first.alphabet) | set(second.alphabet)))
    taken = _all_symbols(first, second)
    supply = _VarSupply(taken)

    sig1 = signature_of(first.body)
    sig2 = signature_of(second.body)
    branch1 = [first.body.matrix] + [
        _min_pin(name, arity, supply) for name, arity in sig2.functions
    ]
    branch2 = [second.body.matrix] + [
        _min_pin(name, arity, supply) for name, arity in sig1.functions
    ]
    matrix = Or((conj(branch1), conj(branch2)))
    if signature_of(matrix).relation_arity(ORDER_REL) is None:
        # keep the order relation in the signature even when neither
        # operand mentions it
        v = supply.fresh()
        matrix = conj([matrix, _leq(Var(v), Var(v))])

    prefix = tuple(
        dict.fromkeys(
            list(first.body.prefix)
            + list(second.body.prefix)
            + sorted(free_vars(matrix) - set(first.body.prefix) - set(second.body.prefix))
        )
    )
    bound = None
    if first.declared_bound is not None and second.declared_bound is not None:
        # in a branch-1 model the other side's constants take arbitrary
        # values; reaching their function images can cost one extra round
        b1 = first.declared_bound + (1 if sig2.constants and sig1.functions else 0)
        b2 = second.declared_bound + (1 if sig1.constants and sig2.functions else 0)
        bound = max(b1, b2)
    return LocalSentence(UniversalSentence(prefix, matrix), alphabet, bound)


# ---------------------------------------------------------------------------
# Concatenation
# ---------------------------------------------------------------------------


def with_greatest_element(ls: LocalSentence) -> LocalSentence:
    """Add a constant for the last position; drops the empty word."""
    taken = _all_symbols(ls)
    top = _fresh_name("last", taken)
    taken.add(top)
    supply = _VarSupply(taken)
    v = supply.fresh()
    conjuncts = _conjunct_list(ls.body) + [_leq(Var(v), Const(top))]
    bound = _bound_after_new_constant(ls.declared_bound, signature_of(ls.body))
    return _assemble(conjuncts, ls.alphabet, bound)


def concat_sentence(
    first: LocalSentence,
    second: LocalSentence,
    require_nonempty_first: bool = False,
) -> LocalSentence:
    """Concatenation via a fresh initial-segment predicate.

    A fresh unary predicate carves the word into a prefix satisfying
    ``first`` and a suffix satisfying ``second``; each operand's
    conjuncts are relativized to its side and its functions are confined
    there (pinned to least arguments elsewhere).  With
    ``require_nonempty_first`` the prefix must contain its own greatest
    element, so the first factor cannot be empty.
    """
    second = rename_apart(first, second)
    alphabet = tuple(sorted(set(first.alphabet) | set(second.alphabet)))
    taken = _all_symbols(first, second)
    seg = _fresh_name("Seg", taken)
    taken.add(seg)
    supply = _VarSupply(taken)

    def in_seg(v: str) -> Formula:
        return Rel(seg, (Var(v),))

    def out_seg(v: str) -> Formula:
        return Not(Rel(seg, (Var(v),)))

    conjuncts: list[Formula] = []
    x, y = supply.fresh_many(2)
    conjuncts.append(
        Implies(And((in_seg(x), out_seg(y))), Rel(ORDER_REL, (Var(x), Var(y))))
    )

    for source, inside in ((first, in_seg), (second, out_seg)):
        sig = signature_of(source.body)
        for f in _conjunct_list(source.body):
            vs = sorted(free_vars(f))
            if vs:
                guard = conj([inside(v) for v in vs])
                conjuncts.append(Implies(guard, f))
            else:
                conjuncts.append(f)
        for name, arity in sig.functions:
            vs = supply.fresh_many(arity)
            guard = conj([inside(v) for v in vs])
            fx = Func(name, tuple(Var(v) for v in vs))
            confined = (
                Rel(seg, (fx,)) if inside is in_seg else Not(Rel(seg, (fx,)))
            )
            conjuncts.append(Implies(guard, confined))
            conjuncts.append(
                _min_pin(name, arity, supply, guard=Not(guard), guard_vars=vs)
            )
        for cname in sig.constants:
            catom = Rel(seg, (Const(cname),))
            conjuncts.append(catom if inside is in_seg else Not(catom))

    if require_nonempty_first:
        top = _fresh_name("cut", taken)
        taken.add(top)
        v = supply.fresh()
        conjuncts.append(Rel(seg, (Const(top),)))
        conjuncts.append(Implies(in_seg(v), _leq(Var(v), Const(top))))

    bound = None
    if first.declared_bound is not None and second.declared_bound is not None:
        bound = max(first.declared_bound, second.declared_bound)
        if require_nonempty_first:
            merged = signature_of(first.body).merge(signature_of(second.body))
            bound = _bound_after_new_constant(bound, merged)
    return _assemble(conjuncts, alphabet, bound)


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SubstitutionSpec:
    """One sentence per outer letter; images must reject the empty word."""

    mapping: Mapping[str, LocalSentence]

    def target_alphabet(self) -> tuple[str, ...]:
        letters: set[str] = set()
        for ls in self.mapping.values():
            letters |= set(ls.alphabet)
        return tuple(sorted(letters))


def substitution_sentence(
    outer: LocalSentence,
    spec: SubstitutionSpec,
    probe_budget: int = 500_000,
) -> LocalSentence:
    """Replace each letter of the outer language by an inner language.

    The word is carved into consecutive nonempty blocks by a fresh
    "block start" function mapping every position to the first position
    of its block.  Fresh unary labels on block starts choose an outer
    letter per block; the outer sentence is transplanted onto the block
    starts, and each inner sentence is relativized to the blocks
    carrying its label.  Inner languages containing the empty word are
    rejected (:class:`InnerLanguageAcceptsEmptyError`): empty blocks do
    not exist, so the construction could not be faithful.
    """
    from .search import decide_membership

    missing = [a for a in outer.alphabet if a not in spec.mapping]
    if missing:
        raise CombinatorError(f"no replacement language for letters {missing}")
    for letter, inner in spec.mapping.items():
        probe = decide_membership(Word(()), inner, probe_budget)
        if probe.accepted or not probe.conclusive:
            raise InnerLanguageAcceptsEmptyError(
                f"language substituted for {letter!r} must provably reject "
                f"the empty word"
            )

    alphabet = spec.target_alphabet()
    inners = {a: spec.mapping[a] for a in outer.alphabet}

    letter_syms = {letter_predicate(a) for a in alphabet}
    inner_all: set[str] = set()
    for inner in inners.values():
        inner_all |= _all_symbols(inner)
    taken = _all_symbols(outer) | inner_all | letter_syms | {ORDER_REL}

    blk = _fresh_name("blk", taken)
    taken.add(blk)
    labels = {}
    for a in outer.alphabet:
        labels[a] = _fresh_name(f"Out_{a}", taken)
        taken.add(labels[a])

    # rename the outer sentence's symbols: letters become labels; private
    # symbols move only when they clash with inner machinery or letters
    outer_map = {letter_predicate(a): labels[a] for a in outer.alphabet}
    for name in sorted(signature_of(outer.body).symbols()):
        if name in outer_map or name == ORDER_REL:
            continue
        if name in inner_all or name in letter_syms:
            fresh = _fresh_name(name, taken)
            outer_map[name] = fresh
            taken.add(fresh)
    outer_body = UniversalSentence(
        outer.body.prefix, rename_symbols(outer.body.matrix, outer_map)
    )
    outer_body = _rename_vars_apart(outer_body, set(taken))
    taken |= set(outer_body.prefix)

    # rename each inner sentence's private symbols, tagging them with the
    # outer letter they serve (letter predicates stay real)
    inner_bodies: dict[str, UniversalSentence] = {}
    inner_sigs: dict[str, Signature] = {}
    for a, inner in sorted(inners.items()):
        own_letters = {letter_predicate(d) for d in inner.alphabet}
        mapping: dict[str, str] = {}
        for name in sorted(signature_of(inner.body).symbols()):
            if name == ORDER_REL or name in own_letters:
                continue
            fresh = _fresh_name(f"{name}_{a}", taken)
            mapping[name] = fresh
            taken.add(fresh)
        body = UniversalSentence(
            inner.body.prefix, rename_symbols(inner.body.matrix, mapping)
        )
        body = _rename_vars_apart(body, set(taken))
        taken |= set(body.prefix)
        inner_bodies[a] = body
        inner_sigs[a] = signature_of(body)

    supply = _VarSupply(taken)

    def B(t: Term) -> Term:
        return Func(blk, (t,))

    def is_start(t: Term) -> Formula:
        return Eq(B(t), t)

    conjuncts: list[Formula] = []

    # block structure: blk maps each position to the start of its block
    y, y2 = supply.fresh_many(2)
    vy, vy2 = Var(y), Var(y2)
    conjuncts.append(_leq(B(vy), vy))
    conjuncts.append(Implies(Rel(ORDER_REL, (vy, vy2)), _leq(B(vy), B(vy2))))
    conjuncts.append(
        Implies(And((_leq(B(vy), vy2), _leq(vy2, vy))), Eq(B(vy2), B(vy)))
    )

    # every position carries exactly one letter of the target alphabet
    w = supply.fresh()
    conjuncts.append(_letter_partition(w, alphabet))

    # labels live on block starts and partition them
    z = supply.fresh()
    vz = Var(z)
    for a in outer.alphabet:
        conjuncts.append(Implies(Rel(labels[a], (vz,)), is_start(vz)))
    z1 = supply.fresh()
    vz1 = Var(z1)
    conjuncts.append(
        Implies(
            is_start(vz1),
            _exactly_one([Rel(labels[a], (vz1,)) for a in outer.alphabet]),
        )
    )

    # the outer sentence holds on block starts
    outer_sig = signature_of(outer_body)
    for f in _conjunct_list(outer_body):
        vs = sorted(free_vars(f))
        if vs:
            guard = conj([is_start(Var(v)) for v in vs])
            conjuncts.append(Implies(guard, f))
        else:
            conjuncts.append(f)
    for name, arity in outer_sig.functions:
        vs = supply.fresh_many(arity)
        args = tuple(Var(v) for v in vs)
        guard = conj([is_start(Var(v)) for v in vs])
        conjuncts.append(Implies(guard, is_start(Func(name, args))))
        conjuncts.append(_min_pin(name, arity, supply, guard=Not(guard), guard_vars=vs))
    for cname in outer_sig.constants:
        conjuncts.append(is_start(Const(cname)))

    # each inner sentence holds on the blocks carrying its label
    for a in sorted(inners.keys()):
        label = labels[a]
        body = inner_bodies[a]
        sig = inner_sigs[a]
        inner_alpha = inners[a].alphabet

        # letters inside such blocks come from the inner alphabet
        p = supply.fresh()
        vp = Var(p)
        conjuncts.append(
            Implies(
                Rel(label, (B(vp),)),
                disj([Rel(letter_predicate(d), (vp,)) for d in inner_alpha]),
            )
        )

        # constants of the inner sentence become one position per block
        lifted: dict[str, str] = {}
        for cname in sig.constants:
            fname = _fresh_name(f"{cname}_at", taken)
            taken.add(fname)
            supply.taken.add(fname)
            lifted[cname] = fname
            q, q2 = supply.fresh_many(2)
            vq, vq2 = Var(q), Var(q2)
            e = Func(fname, (vq,))
            conjuncts.append(
                Implies(Rel(label, (B(vq),)), Eq(B(e), B(vq)))
            )
            conjuncts.append(
                Implies(
                    And((Eq(B(vq), B(vq2)), Rel(label, (B(vq),)))),
                    Eq(Func(fname, (vq,)), Func(fname, (vq2,))),
                )
            )
            conjuncts.append(
                Implies(Not(Rel(label, (B(vq),))), Eq(e, vq))
            )

        def lift_constants(f: Formula, anchor: str) -> Formula:
            mapping = {c: Func(fn, (Var(anchor),)) for c, fn in lifted.items()}

            def on_term(t: Term) -> Term:
                if isinstance(t, Const) and t.name in mapping:
                    return mapping[t.name]
                if isinstance(t, Func):
                    return Func(t.name, tuple(on_term(s) for s in t.args))
                if isinstance(t, Min):
                    return Min(tuple(on_term(s) for s in t.args))
                return t

            def walk(g: Formula) -> Formula:
                if isinstance(g, Rel):
                    return Rel(g.name, tuple(on_term(s) for s in g.args))
                if isinstance(g, Eq):
                    return Eq(on_term(g.left), on_term(g.right))
                if isinstance(g, Not):
                    return Not(walk(g.body))
                if isinstance(g, And):
                    return And(tuple(walk(p) for p in g.parts))
                if isinstance(g, Or):
                    return Or(tuple(walk(p) for p in g.parts))
                if isinstance(g, Implies):
                    return Implies(walk(g.left), walk(g.right))
                return g

            return walk(f)

        for f in _conjunct_list(body):
            vs = sorted(free_vars(f))
            if vs:
                anchor = vs[0]
                same_block = [Eq(B(Var(v)), B(Var(anchor))) for v in vs[1:]]
                guard = conj(same_block + [Rel(label, (B(Var(anchor)),))])
                conjuncts.append(Implies(guard, lift_constants(f, anchor)))
            else:
                # even a variable-free conjunct only binds blocks that
                # exist: anchor it to an arbitrary position of one
                anchor = supply.fresh()
                guard = Rel(label, (B(Var(anchor)),))
                conjuncts.append(Implies(guard, lift_constants(f, anchor)))

        for name, arity in sig.functions:
            vs = supply.fresh_many(arity)
            args = tuple(Var(v) for v in vs)
            anchor = Var(vs[0])
            same_block = [Eq(B(Var(v)), B(anchor)) for v in vs[1:]]
            guard = conj(same_block + [Rel(label, (B(anchor),))])
            conjuncts.append(Implies(guard, Eq(B(Func(name, args)), B(anchor))))
            conjuncts.append(_min_pin(name, arity, supply, guard=Not(guard), guard_vars=vs))

    bound = None
    inner_bounds = [ls.declared_bound for ls in inners.values()]
    if outer.declared_bound is not None and all(b is not None for b in inner_bounds):
        bound = 1 + outer.declared_bound + max(inner_bounds)
    return _assemble(conjuncts, alphabet, bound)


# ---------------------------------------------------------------------------
# Morphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AlphabeticMorphism:
    """A letter-to-letter map; ``None`` erases a letter."""

    mapping: Mapping[str, Optional[str]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "mapping", dict(self.mapping))

    @property
    def non_erasing(self) -> bool:
        return all(v is not None for v in self.mapping.values())

    def source_alphabet(self) -> tuple[str, ...]:
        return tuple(sorted(self.mapping))

    def image_alphabet(self) -> tuple[str, ...]:
        return tuple(sorted({v for v in self.mapping.values() if v is not None}))

    def apply(self, word: Union[Word, str]) -> Word:
        word = _as_word(word)
        out = []
        for a in word.letters:
            if a not in self.mapping:
                raise CombinatorError(f"letter {a!r} not in the morphism's domain")
            image = self.mapping[a]
            if image is not None:
                out.append(image)
        return Word(tuple(out))

    def preimages(self, letter: str) -> tuple[str, ...]:
        return tuple(sorted(a for a, v in self.mapping.items() if v == letter))

    def erased(self) -> tuple[str, ...]:
        return tuple(sorted(a for a, v in self.mapping.items() if v is None))


def morphism_sentence(ls: LocalSentence, h: AlphabeticMorphism) -> LocalSentence:
    """Image of the language under a non-erasing letter-to-letter map.

    Positions keep their identity (the map preserves length), so the
    source sentence runs over fresh "source letter" predicates tied to
    the actual letters they map to.
    """
    if set(ls.alphabet) - set(h.mapping):
        missing = sorted(set(ls.alphabet) - set(h.mapping))
        raise CombinatorError(f"morphism does not cover letters {missing}")
    if not h.non_erasing:
        raise ErasingMorphismError(
            f"image sentence needs a non-erasing map; {list(h.erased())} are erased"
        )
    alphabet = tuple(sorted({h.mapping[a] for a in ls.alphabet}))
    taken = _all_symbols(ls) | {letter_predicate(a) for a in alphabet}
    source_rel = {}
    for a in ls.alphabet:
        source_rel[a] = _fresh_name(f"Src_{a}", taken)
        taken.add(source_rel[a])
    mapping = {letter_predicate(a): source_rel[a] for a in ls.alphabet}
    body = UniversalSentence(ls.body.prefix, rename_symbols(ls.body.matrix, mapping))

    supply = _VarSupply(taken | set(body.prefix))
    conjuncts = _conjunct_list(body)
    x = supply.fresh()
    vx = Var(x)
    conjuncts.append(_exactly_one([Rel(source_rel[a], (vx,)) for a in ls.alphabet]))
    y = supply.fresh()
    vy = Var(y)
    for a in ls.alphabet:
        conjuncts.append(
            Implies(
                Rel(source_rel[a], (vy,)),
                Rel(letter_predicate(h.mapping[a]), (vy,)),
            )
        )
    z = supply.fresh()
    conjuncts.append(_letter_partition(z, alphabet))
    return _assemble(conjuncts, alphabet, ls.declared_bound)


def inverse_morphism_sentence(
    ls: LocalSentence,
    h: AlphabeticMorphism,
    trailing_marker: Optional[str] = None,
) -> LocalSentence:
    """All words whose image under the (possibly erasing) map is accepted.

    Erased positions simply vanish from the image: the sentence
    relativizes the source sentence to the non-erased positions,
    translating each source letter predicate into the disjunction of its
    preimage letters.  With ``trailing_marker`` (an erased letter), the
    word must end with one or more marker letters and markers may appear
    only there.
    """
    alphabet = h.source_alphabet()
    if not alphabet:
        raise CombinatorError("morphism has an empty domain")
    if trailing_marker is not None:
        if h.mapping.get(trailing_marker, "missing") is not None:
            raise CombinatorError(
                f"trailing marker {trailing_marker!r} must be an erased letter"
            )

    taken = _all_symbols(ls) | {letter_predicate(a) for a in alphabet}
    supply = _VarSupply(taken)
    sig = signature_of(ls.body)

    kept = [a for a in alphabet if h.mapping[a] is not None]

    def on_image_side(t: Term) -> Formula:
        if not kept:
            return FalseF()
        return disj([Rel(letter_predicate(a), (t,)) for a in kept])

    def translate(f: Formula) -> Formula:
        if isinstance(f, Rel):
            if f.name.startswith("P_") and f.name[2:] in ls.alphabet:
                pre = h.preimages(f.name[2:])
                if not pre:
                    return FalseF()
                return disj([Rel(letter_predicate(a), f.args) for a in pre])
            return f
        if isinstance(f, Not):
            return Not(translate(f.body))
        if isinstance(f, And):
            return And(tuple(translate(p) for p in f.parts))
        if isinstance(f, Or):
            return Or(tuple(translate(p) for p in f.parts))
        if isinstance(f, Implies):
            return Implies(translate(f.left), translate(f.right))
        return f

    conjuncts: list[Formula] = []
    w = supply.fresh()
    conjuncts.append(_letter_partition(w, alphabet))

    for f in _conjunct_list(ls.body):
        vs = sorted(free_vars(f))
        translated = translate(f)
        if vs:
            guard = conj([on_image_side(Var(v)) for v in vs])
            conjuncts.append(Implies(guard, translated))
        else:
            conjuncts.append(translated)

    for name, arity in sig.functions:
        vs = supply.fresh_many(arity)
        args = tuple(Var(v) for v in vs)
        guard = conj([on_image_side(Var(v)) for v in vs])
        conjuncts.append(Implies(guard, on_image_side(Func(name, args))))
        conjuncts.append(
            Implies(Not(guard), Eq(Func(name, args), args[0]))
        )
    for cname in sig.constants:
        conjuncts.append(on_image_side(Const(cname)))

    if trailing_marker is not None:
        marker = letter_predicate(trailing_marker)
        a, b = supply.fresh_many(2)
        conjuncts.append(
            Implies(
                And((Rel(marker, (Var(a),)), Not(Rel(marker, (Var(b),))))),
                Rel(ORDER_REL, (Var(b), Var(a))),
            )
        )
        end = _fresh_name("mark", taken)
        conjuncts.append(Rel(marker, (Const(end),)))

    bound = None if ls.declared_bound is None else ls.declared_bound + 1
    return _assemble(conjuncts, alphabet, bound)


# ---------------------------------------------------------------------------
# Shipped examples
# ---------------------------------------------------------------------------

_SIGMA_WORD_TEXT = """\
alphabet: a b
bound: 2

# ordering is a strict linear order
  (forall x . !(x < x))
& (forall x y z . x < y & y < z -> x < z)
& (forall x y . x < y | x = y | y < x)
# each position carries exactly one letter
& (forall x . P_a(x) <-> !P_b(x))
# outside increasing pairs of a-positions the pairing function stays put
& (forall x y . !(P_a(x) & P_a(y) & x < y) -> f(x, y) = min(x, y))
# on a-positions the block maps are the identity
& (forall x in P_a . p(x) = x & p'(x) = x)
# every b-position is produced by an increasing pair of a-positions
& (forall z in P_b . P_a(p(z)) & P_a(p'(z)) & f(p(z), p'(z)) = z)
# f lands strictly after every a-position at or above its first argument
& (forall x y y' in P_a . x <= y' & y' < y -> y' < f(x, y) & f(x, y) < y)
# f is strictly decreasing in its first argument
& (forall x x' y in P_a . x < x' & x' < y -> f(x', y) < f(x, y) & f(x, y) < y)
"""


def sigma_word_sentence() -> LocalSentence:
    """The staircase language: prefixes of a b a b b a b b b a ... that
    end on an ``a`` (or are empty).  Accepting a word forces a unique
    expansion: ``f`` enumerates each b-block from its right end, indexed
    by the a-positions below, which makes consecutive blocks grow by
    exactly one.
    """
    from .dsl import read_local_sentence

    return read_local_sentence(_SIGMA_WORD_TEXT)


def layered_letters_sentence(
    base: Optional[LocalSentence] = None,
    letters: Sequence[str] = ("0", "1", "2"),
) -> LocalSentence:
    """Constrain ``base`` so letters appear in nondecreasing layers, with
    at least one position of the last letter (default: ``0* 1* 2+``)."""
    letters = tuple(letters)
    if len(letters) < 2:
        raise CombinatorError("need at least two letters to layer")
    if base is None:
        base = always_true(letters)
    if set(letters) - set(base.alphabet):
        raise CombinatorError("layer letters must belong to the base alphabet")
    taken = _all_symbols(base)
    supply = _VarSupply(taken)
    x, y = supply.fresh_many(2)
    conjuncts = _conjunct_list(base.body)
    for i, a in enumerate(letters):
        for b in letters[i + 1 :]:
            conjuncts.append(
                Implies(
                    And(
                        (
                            Rel(letter_predicate(a), (Var(x),)),
                            Rel(letter_predicate(b), (Var(y),)),
                        )
                    ),
                    Rel(ORDER_REL, (Var(x), Var(y))),
                )
            )
    top = _fresh_name("wit", taken)
    conjuncts.append(Rel(letter_predicate(letters[-1]), (Const(top),)))
    bound = _bound_after_new_constant(base.declared_bound, signature_of(base.body))
    return _assemble(conjuncts, base.alphabet, bound)


_EXAMPLES = {
    "sigma_word": sigma_word_sentence,
    "layered_letters": layered_letters_sentence,
}


def example_sentence(name: str) -> LocalSentence:
    """A shipped example by name; see :data:`example_names`."""
    try:
        factory = _EXAMPLES[name]
    except KeyError:
        raise KeyError(
            f"unknown example {name!r}; available: {sorted(_EXAMPLES)}"
        ) from None
    return factory()


example_names = tuple(sorted(_EXAMPLES))
