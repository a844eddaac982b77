"""Universal first-order sentences over word signatures, made executable.

Words are finite linear orders with letter predicates; a sentence over a
larger signature defines the language of words whose structure can be
expanded to a model.  This package parses such sentences, decides
membership by expansion search, computes closures inside finite models,
builds sentences for language operations, and audits closure-step
bounds empirically.
"""

__version__ = "0.1.0"

from .logic import (
    ArityConflictError,
    LocalSentence,
    NotUniversalError,
    Signature,
    SignatureError,
    UniversalSentence,
    letter_predicate,
    signature_of,
    to_universal_prenex,
    validate,
)
from .dsl import (
    ParseError,
    UnknownSymbolError,
    format_local_sentence,
    load_local_sentence,
    parse_sentence,
    read_local_sentence,
    render_sentence,
    save_local_sentence,
)
from .structures import (
    ClosureTrace,
    EMPTY_WORD_DISPLAY,
    FiniteStructure,
    SatisfactionResult,
    StructureError,
    Word,
    closure,
    eval_formula,
    eval_term,
    generated_substructure,
    is_indiscernible_above,
    reduct,
    satisfies,
    structure_to_word,
    word_to_structure,
)
from .search import (
    AlphabetMismatchError,
    LanguageComparison,
    LanguageSample,
    MembershipResult,
    SearchSpaceError,
    decide_membership,
    enumerate_language,
    language_equal_upto,
)
from .combinators import (
    AlphabeticMorphism,
    CombinatorError,
    ErasingMorphismError,
    InnerLanguageAcceptsEmptyError,
    SubstitutionSpec,
    always_false,
    always_true,
    concat_sentence,
    example_names,
    example_sentence,
    inverse_morphism_sentence,
    layered_letters_sentence,
    morphism_sentence,
    rename_apart,
    sigma_word_sentence,
    substitution_sentence,
    union_sentence,
    with_greatest_element,
)
from .langtools import (
    PAREN_ALPHABET,
    ParenWordError,
    antidyck_member,
    antidyck_member_queue,
    antidyck_reduce_step,
    antidyck_reduction,
    parse_paren_word,
    sigma_prefix,
    ultimately_periodic_divergence,
)
from .audit import (
    AuditReport,
    AuditViolation,
    UnknownConstructionError,
    audit_closure_bound,
    audit_substructure_closure,
    collect_models,
    declared_bound_for,
)

__all__ = [name for name in dir() if not name.startswith("_")]
