"""Concrete syntax for sentences.

Grammar (see docs/dsl.md for the full EBNF)::

    formula     = or-chain [ ("->" | "<->") formula ]
    or-chain    = and-chain { "|" and-chain }
    and-chain   = unary { "&" unary }
    unary       = "!" unary | quantifier | "(" formula ")" | "true" | "false" | atom
    quantifier  = ("forall" | "exists") name+ [ "in" ["!"] name ] "." formula
    atom        = term ( "=" | "!=" | "<" | "<=" | ">" | ">=" ) term
                | name "(" term { "," term } ")"
    term        = "min" "(" term { "," term } ")" | name [ "(" term { "," term } ")" ]

``x <= y`` is sugar for ``x < y | x = y`` (similarly ``>=``, ``>``,
``!=``), ``a <-> b`` for ``(a -> b) & (b -> a)``, and
``forall x y in P . body`` for ``forall x y . (P(x) & P(y)) -> body``
(``in !P`` guards negatively).  A bare name is a variable when bound by an
enclosing quantifier and a constant otherwise.  Identifiers may end in
primes (``p'``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from .logic import (
    And,
    Const,
    Eq,
    Exists,
    FalseF,
    Forall,
    Formula,
    Func,
    Implies,
    LocalSentence,
    Min,
    Not,
    Or,
    Rel,
    Term,
    TrueF,
    UniversalSentence,
    Var,
    ORDER_REL,
    conj,
    free_vars,
    letter_predicate,
    signature_of,
    to_universal_prenex,
)

_KEYWORDS = {"forall", "exists", "in", "min", "true", "false"}

_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r]+)
      | (?P<nl>\n)
      | (?P<comment>\#[^\n]*)
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*'*)
      | (?P<op><->|->|<=|>=|!=|[<>=&|!(),.])
    """,
    re.VERBOSE,
)


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class UnknownSymbolError(ValueError):
    """A symbol violates the declared-signature header of a sentence file."""


@dataclass(frozen=True)
class _Token:
    kind: str  # "name", "op", "end"
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind in ("ws", "comment"):
            col += len(s)
        else:
            tokens.append(_Token(kind, s, line, col))
            col += len(s)
        pos = m.end()
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.scopes: list[str] = []

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[_Token] = None) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col)

    def expect_op(self, op: str) -> _Token:
        tok = self.peek()
        if tok.kind != "op" or tok.text != op:
            shown = tok.text or "end of input"
            raise self.error(f"expected {op!r}, found {shown!r}")
        return self.next()

    def at_op(self, op: str) -> bool:
        tok = self.peek()
        return tok.kind == "op" and tok.text == op

    # ------------------------------------------------------------------

    def parse_formula(self) -> Formula:
        left = self.parse_or()
        if self.at_op("->"):
            self.next()
            right = self.parse_formula()
            return Implies(left, right)
        if self.at_op("<->"):
            self.next()
            right = self.parse_formula()
            return And((Implies(left, right), Implies(right, left)))
        return left

    def parse_or(self) -> Formula:
        parts = [self.parse_and()]
        while self.at_op("|"):
            self.next()
            parts.append(self.parse_and())
        if len(parts) == 1:
            return parts[0]
        return Or(tuple(parts))

    def parse_and(self) -> Formula:
        parts = [self.parse_unary()]
        while self.at_op("&"):
            self.next()
            parts.append(self.parse_unary())
        if len(parts) == 1:
            return parts[0]
        return And(tuple(parts))

    def parse_unary(self) -> Formula:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "!":
            self.next()
            return Not(self.parse_unary())
        if tok.kind == "op" and tok.text == "(":
            self.next()
            inner = self.parse_formula()
            self.expect_op(")")
            return inner
        if tok.kind == "name" and tok.text in ("forall", "exists"):
            return self.parse_quantifier()
        if tok.kind == "name" and tok.text == "true":
            self.next()
            return TrueF()
        if tok.kind == "name" and tok.text == "false":
            self.next()
            return FalseF()
        return self.parse_atom()

    def parse_quantifier(self) -> Formula:
        head = self.next()
        names: list[_Token] = []
        while self.peek().kind == "name" and self.peek().text not in ("in",):
            nt = self.next()
            if nt.text in _KEYWORDS:
                raise self.error(f"{nt.text!r} cannot be a variable name", nt)
            names.append(nt)
        if not names:
            raise self.error("expected at least one variable after " + head.text)
        guard_pred: Optional[str] = None
        guard_positive = True
        if self.peek().kind == "name" and self.peek().text == "in":
            self.next()
            if self.at_op("!"):
                self.next()
                guard_positive = False
            gt = self.peek()
            if gt.kind != "name" or gt.text in _KEYWORDS:
                raise self.error("expected a predicate name after 'in'")
            guard_pred = self.next().text
        self.expect_op(".")
        for nt in names:
            self.scopes.append(nt.text)
        body = self.parse_formula()
        for _ in names:
            self.scopes.pop()
        if guard_pred is not None:
            guards: list[Formula] = []
            for nt in names:
                g: Formula = Rel(guard_pred, (Var(nt.text),))
                if not guard_positive:
                    g = Not(g)
                guards.append(g)
            if head.text == "forall":
                body = Implies(conj(guards), body)
            else:
                # existential relativization conjoins its guard
                body = And(tuple(guards) + (body,))
        cls = Forall if head.text == "forall" else Exists
        out: Formula = body
        for nt in reversed(names):
            out = cls(nt.text, out)
        return out

    def parse_atom(self) -> Formula:
        start = self.peek()
        left = self.parse_term()
        tok = self.peek()
        if tok.kind == "op" and tok.text in ("=", "!=", "<", "<=", ">", ">="):
            op = self.next().text
            right = self.parse_term()
            if op == "=":
                return Eq(left, right)
            if op == "!=":
                return Not(Eq(left, right))
            if op == "<":
                return Rel(ORDER_REL, (left, right))
            if op == ">":
                return Rel(ORDER_REL, (right, left))
            if op == "<=":
                return Or((Rel(ORDER_REL, (left, right)), Eq(left, right)))
            return Or((Rel(ORDER_REL, (right, left)), Eq(left, right)))
        if isinstance(left, Func):
            return Rel(left.name, left.args)
        if isinstance(left, Min):
            raise self.error("min(...) is a term, not a formula", start)
        raise self.error("expected a relation application or a comparison", start)

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind != "name":
            shown = tok.text or "end of input"
            raise self.error(f"expected a term, found {shown!r}")
        if tok.text in _KEYWORDS and tok.text != "min":
            raise self.error(f"{tok.text!r} cannot start a term", tok)
        self.next()
        if self.at_op("("):
            self.next()
            args = [self.parse_term()]
            while self.at_op(","):
                self.next()
                args.append(self.parse_term())
            self.expect_op(")")
            if tok.text == "min":
                return Min(tuple(args))
            return Func(tok.text, tuple(args))
        if tok.text == "min":
            raise self.error("min requires arguments", tok)
        if tok.text in self.scopes:
            return Var(tok.text)
        return Const(tok.text)


def parse_sentence(text: str) -> Formula:
    """Parse a closed formula.  Raises :class:`ParseError` on bad input."""
    parser = _Parser(text)
    f = parser.parse_formula()
    tok = parser.peek()
    if tok.kind != "end":
        raise parser.error(f"unexpected trailing input {tok.text!r}")
    fv = free_vars(f)
    if fv:
        # cannot happen via the scope rules above, but guard programmatic misuse
        raise ParseError(f"formula has free variables {sorted(fv)}", 1, 1)
    return f


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

_PREC_IMPL = 1
_PREC_OR = 2
_PREC_AND = 3
_PREC_NOT = 4
_PREC_ATOM = 5


def _render_term(t: Term) -> str:
    if isinstance(t, (Var, Const)):
        return t.name
    if isinstance(t, Func):
        return f"{t.name}({', '.join(_render_term(a) for a in t.args)})"
    if isinstance(t, Min):
        return f"min({', '.join(_render_term(a) for a in t.args)})"
    raise TypeError(f"not a term: {t!r}")


def _comparison_sugar(f: Formula) -> Optional[str]:
    """Recognize the expansions of <=, >= and != and fold them back."""
    if isinstance(f, Or) and len(f.parts) == 2:
        first, second = f.parts
        if (
            isinstance(first, Rel)
            and first.name == ORDER_REL
            and isinstance(second, Eq)
        ):
            lo, hi = first.args
            if (second.left, second.right) == (lo, hi):
                return f"{_render_term(lo)} <= {_render_term(hi)}"
            if (second.left, second.right) == (hi, lo):
                return f"{_render_term(hi)} >= {_render_term(lo)}"
    if isinstance(f, Not) and isinstance(f.body, Eq):
        return f"{_render_term(f.body.left)} != {_render_term(f.body.right)}"
    return None


def _iff_sugar(f: Formula) -> Optional[tuple[Formula, Formula]]:
    if isinstance(f, And) and len(f.parts) == 2:
        a, b = f.parts
        if (
            isinstance(a, Implies)
            and isinstance(b, Implies)
            and a.left == b.right
            and a.right == b.left
        ):
            return a.left, a.right
    return None


def _match_guards(
    guards: Sequence[Formula], names: list[str]
) -> Optional[tuple[str, bool]]:
    """One unary guard atom per variable, same predicate and polarity."""
    pred: Optional[str] = None
    positive = True
    for g, name in zip(guards, names):
        neg = isinstance(g, Not)
        inner = g.body if neg else g
        if not (
            isinstance(inner, Rel)
            and len(inner.args) == 1
            and inner.args[0] == Var(name)
        ):
            return None
        if pred is None:
            pred, positive = inner.name, not neg
        elif pred != inner.name or positive != (not neg):
            return None
    if pred is None:
        return None
    return pred, positive


def _quantifier_sugar(f: Formula) -> Optional[tuple[str, list[str], Optional[str], bool, Formula]]:
    """Collapse a quantifier chain; detect a shared relativizing guard.

    ``forall`` guards sit in an implication premise, ``exists`` guards
    are leading conjuncts — mirroring how parsing expands ``in``.
    """
    cls = type(f)
    if cls not in (Forall, Exists):
        return None
    names: list[str] = []
    body: Formula = f
    while isinstance(body, cls):
        names.append(body.var)
        body = body.body
    kw = "forall" if cls is Forall else "exists"
    if cls is Forall and isinstance(body, Implies):
        guards = body.left.parts if isinstance(body.left, And) else (body.left,)
        if len(guards) == len(names):
            matched = _match_guards(guards, names)
            if matched is not None:
                pred, positive = matched
                return kw, names, pred, positive, body.right
    if cls is Exists and isinstance(body, And) and len(body.parts) == len(names) + 1:
        matched = _match_guards(body.parts[: len(names)], names)
        if matched is not None:
            pred, positive = matched
            return kw, names, pred, positive, body.parts[-1]
    return kw, names, None, True, body


def _render(f: Formula, need: int) -> str:
    sugar = _comparison_sugar(f)
    if sugar is not None:
        return sugar
    if isinstance(f, (Forall, Exists)):
        kw, names, pred, positive, body = _quantifier_sugar(f)
        head = f"{kw} {' '.join(names)}"
        if pred is not None:
            head += f" in {'' if positive else '!'}{pred}"
        text = f"{head} . {_render(body, 0)}"
        return f"({text})" if need > 0 else text
    iff = _iff_sugar(f)
    if iff is not None:
        a, b = iff
        text = f"{_render(a, _PREC_IMPL + 1)} <-> {_render(b, _PREC_IMPL + 1)}"
        return f"({text})" if need > _PREC_IMPL else text
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Eq):
        return f"{_render_term(f.left)} = {_render_term(f.right)}"
    if isinstance(f, Rel):
        if f.name == ORDER_REL and len(f.args) == 2:
            return f"{_render_term(f.args[0])} < {_render_term(f.args[1])}"
        return f"{f.name}({', '.join(_render_term(a) for a in f.args)})"
    if isinstance(f, Not):
        return "!" + _render(f.body, _PREC_NOT)
    if isinstance(f, And):
        text = " & ".join(_render(p, _PREC_AND + 1) for p in f.parts)
        return f"({text})" if need > _PREC_AND else text
    if isinstance(f, Or):
        text = " | ".join(_render(p, _PREC_OR + 1) for p in f.parts)
        return f"({text})" if need > _PREC_OR else text
    if isinstance(f, Implies):
        text = f"{_render(f.left, _PREC_IMPL + 1)} -> {_render(f.right, _PREC_IMPL)}"
        return f"({text})" if need > _PREC_IMPL else text
    raise TypeError(f"not a formula: {f!r}")


def render_sentence(s: Union[Formula, UniversalSentence]) -> str:
    """Canonical text for a sentence; ``parse_sentence`` inverts it.

    Raises ``ValueError`` when a constant shares its name with a bound
    variable in scope: such an AST cannot be printed unambiguously.
    """
    f = s.as_formula() if isinstance(s, UniversalSentence) else s
    _check_shadowing(f, set())
    return _render(f, 0)


def _term_constants(t: Term) -> set[str]:
    if isinstance(t, Const):
        return {t.name}
    if isinstance(t, (Func, Min)):
        out: set[str] = set()
        for a in t.args:
            out |= _term_constants(a)
        return out
    return set()


def _check_shadowing(f: Formula, bound: set[str]) -> None:
    if isinstance(f, (Forall, Exists)):
        _check_shadowing(f.body, bound | {f.var})
        return
    if isinstance(f, Not):
        _check_shadowing(f.body, bound)
        return
    if isinstance(f, (And, Or)):
        for p in f.parts:
            _check_shadowing(p, bound)
        return
    if isinstance(f, Implies):
        _check_shadowing(f.left, bound)
        _check_shadowing(f.right, bound)
        return
    if isinstance(f, Eq):
        names = _term_constants(f.left) | _term_constants(f.right)
    elif isinstance(f, Rel):
        names = set()
        for a in f.args:
            names |= _term_constants(a)
    else:
        return
    clash = names & bound
    if clash:
        raise ValueError(
            f"cannot render: constant name(s) {sorted(clash)} shadowed by bound variables"
        )


# ---------------------------------------------------------------------------
# Sentence files
# ---------------------------------------------------------------------------

_HEADER_RE = re.compile(r"^\s*(alphabet|bound|constants|functions|relations)\s*:\s*(.*?)\s*$")
_ARITY_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*'*)/(\d+)$")


def _parse_arity_list(value: str, header: str) -> dict[str, int]:
    out: dict[str, int] = {}
    for item in value.split():
        m = _ARITY_RE.match(item)
        if m is None:
            raise ValueError(f"bad {header} header entry {item!r}; expected name/arity")
        out[m.group(1)] = int(m.group(2))
    return out


def read_local_sentence(text: str) -> LocalSentence:
    """Parse sentence-file text: header lines, then the formula.

    The ``alphabet:`` header is required.  When any of the declared
    signature headers (``constants:``, ``functions:``, ``relations:``) is
    present, every non-word symbol used by the formula must be declared
    with a matching arity, else :class:`UnknownSymbolError` is raised.
    """
    header_lines: list[str] = []
    body_lines: list[str] = []
    in_header = True
    for raw in text.splitlines():
        stripped = raw.strip()
        if in_header:
            if not stripped or stripped.startswith("#"):
                continue
            m = _HEADER_RE.match(raw)
            if m:
                header_lines.append(raw)
                continue
            in_header = False
        body_lines.append(raw)

    alphabet: Optional[tuple[str, ...]] = None
    bound: Optional[int] = None
    declared: Optional[dict[str, tuple[str, int]]] = None

    def declare(name: str, kind: str, arity: int) -> None:
        nonlocal declared
        if declared is None:
            declared = {}
        declared[name] = (kind, arity)

    for line in header_lines:
        m = _HEADER_RE.match(line)
        assert m is not None
        key, value = m.group(1), m.group(2)
        if key == "alphabet":
            letters = tuple(value.split())
            if not letters:
                raise ValueError("alphabet header must list at least one letter")
            alphabet = letters
        elif key == "bound":
            bound = int(value)
        elif key == "constants":
            for name in value.split():
                declare(name, "constant", 0)
        else:
            for name, arity in _parse_arity_list(value, key).items():
                declare(name, "function" if key == "functions" else "relation", arity)

    if alphabet is None:
        raise ValueError("sentence file needs an 'alphabet:' header")

    formula = parse_sentence("\n".join(body_lines))

    if declared is not None:
        allowed = dict(declared)
        allowed[ORDER_REL] = ("relation", 2)
        for a in alphabet:
            allowed[letter_predicate(a)] = ("relation", 1)
        sig = signature_of(formula)
        used: list[tuple[str, str, int]] = []
        used += [(c, "constant", 0) for c in sig.constants]
        used += [(n, "relation", a) for n, a in sig.relations]
        used += [(n, "function", a) for n, a in sig.functions]
        for name, kind, arity in used:
            if name not in allowed:
                raise UnknownSymbolError(
                    f"symbol {name!r} is not declared in the signature header"
                )
            want = allowed[name]
            if want != (kind, arity):
                raise UnknownSymbolError(
                    f"symbol {name!r} declared as {want[0]}/{want[1]} "
                    f"but used as {kind}/{arity}"
                )

    body = to_universal_prenex(formula)
    return LocalSentence(body, alphabet, bound)


def load_local_sentence(path: Union[str, Path]) -> LocalSentence:
    return read_local_sentence(Path(path).read_text(encoding="utf-8"))


def format_local_sentence(ls: LocalSentence) -> str:
    lines = ["alphabet: " + " ".join(ls.alphabet)]
    if ls.declared_bound is not None:
        lines.append(f"bound: {ls.declared_bound}")
    lines.append(render_sentence(ls.body))
    return "\n".join(lines) + "\n"


def save_local_sentence(ls: LocalSentence, path: Union[str, Path]) -> None:
    Path(path).write_text(format_local_sentence(ls), encoding="utf-8")
