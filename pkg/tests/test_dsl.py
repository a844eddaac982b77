"""Parser, renderer, and sentence-file round trips."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from loclang.dsl import (
    ParseError,
    UnknownSymbolError,
    format_local_sentence,
    load_local_sentence,
    parse_sentence,
    read_local_sentence,
    render_sentence,
    save_local_sentence,
)
from loclang.logic import (
    ORDER_REL,
    And,
    Const,
    Eq,
    Exists,
    FalseF,
    Forall,
    Func,
    Implies,
    Min,
    Not,
    Or,
    Rel,
    TrueF,
    Var,
    signature_of,
)

from .corpus import (
    BASE_SENTENCES,
    CONCAT_CASES,
    INVERSE_MORPHISM_CASES,
    MORPHISM_CASES,
    SHIPPED_FILES,
    SUBSTITUTION_CASES,
    UNION_CASES,
    build_case,
)

X, Y = Var("x"), Var("y")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def test_parse_plain_universal():
    got = parse_sentence("forall x y . P_a(x) -> x < y")
    want = Forall(
        "x",
        Forall("y", Implies(Rel("P_a", (X,)), Rel(ORDER_REL, (X, Y)))),
    )
    assert got == want


@pytest.mark.parametrize(
    "text,want",
    [
        ("forall x . x <= c", Forall("x", Or((Rel(ORDER_REL, (X, Const("c"))), Eq(X, Const("c")))))),
        ("forall x . x >= c", Forall("x", Or((Rel(ORDER_REL, (Const("c"), X)), Eq(X, Const("c")))))),
        ("forall x . x != c", Forall("x", Not(Eq(X, Const("c"))))),
        ("forall x . x > c", Forall("x", Rel(ORDER_REL, (Const("c"), X)))),
        (
            "forall x . P(x) <-> Q(x)",
            Forall(
                "x",
                And(
                    (
                        Implies(Rel("P", (X,)), Rel("Q", (X,))),
                        Implies(Rel("Q", (X,)), Rel("P", (X,))),
                    )
                ),
            ),
        ),
        (
            "forall x y in P . x < y",
            Forall(
                "x",
                Forall(
                    "y",
                    Implies(
                        And((Rel("P", (X,)), Rel("P", (Y,)))),
                        Rel(ORDER_REL, (X, Y)),
                    ),
                ),
            ),
        ),
        (
            "forall x in !P . P_b(x)",
            Forall("x", Implies(Not(Rel("P", (X,))), Rel("P_b", (X,)))),
        ),
        ("exists x . true", Exists("x", TrueF())),
        (
            # existential guards conjoin (a guard in an implication
            # premise would make the quantifier trivially satisfiable)
            "!(exists x in P . P_b(x))",
            Not(Exists("x", And((Rel("P", (X,)), Rel("P_b", (X,)))))),
        ),
        (
            "!(exists x y in !P . x < y)",
            Not(
                Exists(
                    "x",
                    Exists(
                        "y",
                        And(
                            (
                                Not(Rel("P", (X,))),
                                Not(Rel("P", (Y,))),
                                Rel(ORDER_REL, (X, Y)),
                            )
                        ),
                    ),
                )
            ),
        ),
        ("forall x . min(x, c) = x", Forall("x", Eq(Min((X, Const("c"))), X))),
    ],
)
def test_parse_sugar(text, want):
    assert parse_sentence(text) == want


def test_unbound_names_become_constants():
    # there is no separate constant declaration in the formula language:
    # any name outside every quantifier scope is a constant
    f = parse_sentence("forall x . x <= top")
    assert Const("top") in (f.body.parts[0].args[1], f.body.parts[1].right)
    assert signature_of(f).constants == ("top",)


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("forall x . x <", "expected a term"),
        ("forall . true", "expected at least one variable"),
        ("forall min . true", "'min' cannot be a variable name"),
        ("forall x in . true", "expected a predicate name after 'in'"),
        ("(forall x . P(x)) true", "unexpected trailing input"),
        ("(forall x . P(x)", "expected ')'"),
        ("forall x . min(x, x)", "min(...) is a term, not a formula"),
        ("forall x . min < x", "min requires arguments"),
        ("forall x . x @ x", "unexpected character"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError) as info:
        parse_sentence(text)
    assert fragment in str(info.value)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse_sentence("forall x .\n   x @ x")
    assert info.value.line == 2
    assert info.value.col == 6


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------


def _terms(names: tuple[str, ...]):
    leaves = [Const("c"), Const("d")] + [Var(n) for n in names]
    base = st.sampled_from(leaves)

    def extend(children):
        return st.one_of(
            st.builds(lambda a: Func("p", (a,)), children),
            st.builds(lambda a, b: Func("g", (a, b)), children, children),
            st.builds(lambda a, b: Min((a, b)), children, children),
        )

    return st.recursive(base, extend, max_leaves=4)


def _matrices(names: tuple[str, ...]):
    t = _terms(names)
    atoms = st.one_of(
        st.builds(lambda a, b: Rel(ORDER_REL, (a, b)), t, t),
        st.builds(Eq, t, t),
        st.builds(lambda a: Rel("P_a", (a,)), t),
        st.builds(lambda a, b: Rel("R", (a, b)), t, t),
        st.just(TrueF()),
        st.just(FalseF()),
    )

    def extend(children):
        return st.one_of(
            st.builds(Not, children),
            st.builds(lambda a, b: And((a, b)), children, children),
            st.builds(lambda a, b: Or((a, b)), children, children),
            st.builds(Implies, children, children),
        )

    return st.recursive(atoms, extend, max_leaves=6)


@st.composite
def closed_formulas(draw):
    n = draw(st.integers(min_value=0, max_value=3))
    names = ("x", "y", "z")[:n]
    quants = draw(
        st.lists(st.sampled_from((Forall, Exists)), min_size=n, max_size=n)
    )
    body = draw(_matrices(names))
    for cls, name in zip(reversed(quants), reversed(names)):
        body = cls(name, body)
    return body


@settings(max_examples=200, deadline=None)
@given(closed_formulas())
def test_render_parse_round_trip(formula):
    assert parse_sentence(render_sentence(formula)) == formula


@settings(max_examples=100, deadline=None)
@given(closed_formulas())
def test_render_is_a_fixed_point(formula):
    text = render_sentence(formula)
    assert render_sentence(parse_sentence(text)) == text


def test_render_rejects_shadowed_constant():
    bad = Forall("c", Eq(Var("c"), Const("c")))
    with pytest.raises(ValueError, match="shadowed"):
        render_sentence(bad)


# ---------------------------------------------------------------------------
# Sentence files
# ---------------------------------------------------------------------------


def test_read_requires_alphabet_header():
    with pytest.raises(ValueError, match="alphabet"):
        read_local_sentence("bound: 1\nforall x . P_a(x)")


def test_read_headers_comments_and_blank_lines():
    text = """
# trailing letter must be b
alphabet: a b

bound: 2
forall x y .
    (x < y | x = y | y < x)
"""
    ls = read_local_sentence(text)
    assert ls.alphabet == ("a", "b")
    assert ls.declared_bound == 2
    assert ls.body.prefix == ("x", "y")


def test_read_without_bound_header():
    ls = read_local_sentence("alphabet: a\nforall x . P_a(x)")
    assert ls.declared_bound is None


def test_declared_signature_accepts_matching_use():
    text = (
        "alphabet: a b\n"
        "constants: e\n"
        "functions: p/1\n"
        "forall x . P_a(x) -> p(x) <= e\n"
    )
    ls = read_local_sentence(text)
    sig = signature_of(ls.body.as_formula())
    assert sig.constants == ("e",)
    assert ("p", 1) in sig.functions


def test_declared_signature_rejects_undeclared_symbol():
    text = "alphabet: a\nconstants: e\nforall x . q(x) = e\n"
    with pytest.raises(UnknownSymbolError, match="'q' is not declared"):
        read_local_sentence(text)


def test_declared_signature_rejects_arity_mismatch():
    text = "alphabet: a\nfunctions: p/1\nforall x y . p(x, y) = x\n"
    with pytest.raises(UnknownSymbolError, match="declared as function/1"):
        read_local_sentence(text)


def test_bad_arity_header_entry():
    with pytest.raises(ValueError, match="expected name/arity"):
        read_local_sentence("alphabet: a\nfunctions: p\nforall x . true")


@pytest.mark.parametrize("path", SHIPPED_FILES, ids=lambda p: p.stem)
def test_shipped_file_round_trip(path):
    ls = load_local_sentence(path)
    assert read_local_sentence(format_local_sentence(ls)) == ls


def test_save_then_load(tmp_path):
    ls = BASE_SENTENCES["spaced_b"]
    target = tmp_path / "out.lfs"
    save_local_sentence(ls, target)
    assert load_local_sentence(target) == ls


@pytest.mark.parametrize("name", sorted(BASE_SENTENCES), ids=str)
def test_corpus_sentence_round_trip(name):
    ls = BASE_SENTENCES[name]
    assert read_local_sentence(format_local_sentence(ls)) == ls


@pytest.mark.parametrize(
    "case",
    [
        UNION_CASES[0],
        CONCAT_CASES[0],
        SUBSTITUTION_CASES[0],
        MORPHISM_CASES[0],
        INVERSE_MORPHISM_CASES[0],
    ],
    ids=lambda c: c.name,
)
def test_combined_sentence_round_trip(case):
    """Machine-built sentences print and re-read without loss."""
    out = build_case(case)
    assert read_local_sentence(format_local_sentence(out)) == out
