"""Command-line surface.

Eight subcommands: ``check`` (diagnose a sentence file), ``member``
(decide one word), ``enum`` (list members up to a length), ``combine``
(build union/concat/substitution/morphism sentences), ``closure``
(closure stages inside a structure or a membership witness), ``audit``
(empirical locality checks), ``antidyck`` (bracket-word membership), and
``sigma`` (staircase word prefixes and divergence checks).

Exit codes everywhere: 0 success/accepted/consistent, 1 rejected or
falsified, 2 usage or input error, 3 search budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .audit import audit_closure_bound, audit_substructure_closure, collect_models
from .combinators import (
    AlphabeticMorphism,
    CombinatorError,
    SubstitutionSpec,
    concat_sentence,
    example_sentence,
    example_names,
    inverse_morphism_sentence,
    morphism_sentence,
    substitution_sentence,
    union_sentence,
)
from .dsl import (
    ParseError,
    UnknownSymbolError,
    format_local_sentence,
    load_local_sentence,
    render_sentence,
    save_local_sentence,
)
from .langtools import (
    ParenWordError,
    antidyck_member,
    antidyck_reduction,
    parse_paren_word,
    sigma_prefix,
    ultimately_periodic_divergence,
)
from .logic import LocalSentence, SignatureError, signature_of, validate
from .search import (
    AlphabetMismatchError,
    SearchSpaceError,
    decide_membership,
    enumerate_language,
)
from .structures import (
    EMPTY_WORD_DISPLAY,
    FiniteStructure,
    StructureError,
    Word,
    closure,
)

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ERROR = 2
EXIT_BUDGET = 3

_USER_ERRORS = (
    ParseError,
    UnknownSymbolError,
    SignatureError,
    StructureError,
    CombinatorError,
    AlphabetMismatchError,
    SearchSpaceError,
    ParenWordError,
    OSError,
    ValueError,
    KeyError,
)


class _CliError(Exception):
    pass


def _load_sentence(spec: str) -> LocalSentence:
    """A sentence argument is either a file path or ``example:NAME``."""
    if spec.startswith("example:"):
        return example_sentence(spec[len("example:") :])
    return load_local_sentence(spec)


def _parse_word(inline: Optional[str], word_file: Optional[str]) -> Word:
    if (inline is None) == (word_file is None):
        raise _CliError("give exactly one of --word or --word-file")
    if word_file is not None:
        letters = tuple(Path(word_file).read_text().split())
        return Word(letters)
    if inline in ("", EMPTY_WORD_DISPLAY):
        return Word(())
    return Word(tuple(inline))


def _show_word(w: Word) -> str:
    return str(w) if len(w) else EMPTY_WORD_DISPLAY


def _emit(args: argparse.Namespace, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(human)


# ---------------------------------------------------------------------------
# Subcommand handlers
# ---------------------------------------------------------------------------


def _cmd_check(args: argparse.Namespace) -> int:
    ls = _load_sentence(args.sentence)
    diagnostics = validate(ls)
    sig = signature_of(ls.body)
    payload = {
        "valid": not diagnostics,
        "diagnostics": diagnostics,
        "alphabet": list(ls.alphabet),
        "declared_bound": ls.declared_bound,
        "variables": len(ls.body.prefix),
        "conjuncts": len(ls.body.conjuncts()),
        "constants": list(sig.constants),
        "relations": {name: arity for name, arity in sig.relations},
        "functions": {name: arity for name, arity in sig.functions},
    }
    lines = [
        f"alphabet: {' '.join(ls.alphabet)}",
        f"declared bound: {ls.declared_bound}",
        f"prefix variables: {payload['variables']}, conjuncts: {payload['conjuncts']}",
        f"constants: {', '.join(sig.constants) or '(none)'}",
        f"relations: {', '.join(f'{n}/{a}' for n, a in sig.relations) or '(none)'}",
        f"functions: {', '.join(f'{n}/{a}' for n, a in sig.functions) or '(none)'}",
    ]
    if diagnostics:
        lines += [f"problem: {d}" for d in diagnostics]
    else:
        lines.append("no problems found")
    _emit(args, payload, "\n".join(lines))
    return EXIT_NEGATIVE if diagnostics else EXIT_OK


def _cmd_member(args: argparse.Namespace) -> int:
    ls = _load_sentence(args.sentence)
    word = _parse_word(args.word, args.word_file)
    result = decide_membership(word, ls, args.budget)
    payload = {
        "word": "".join(word.letters),
        "accepted": result.accepted,
        "conclusive": result.conclusive,
        "nodes_explored": result.nodes_explored,
    }
    if args.show_witness and result.witness is not None:
        payload["witness"] = result.witness.to_dict()
    if not result.conclusive:
        verdict = "INCONCLUSIVE (budget exhausted)"
    else:
        verdict = "ACCEPTED" if result.accepted else "REJECTED"
    human = f"{_show_word(word)}: {verdict} [{result.nodes_explored} nodes]"
    if args.show_witness and result.witness is not None and not args.json:
        human += "\n" + json.dumps(result.witness.to_dict(), indent=2, sort_keys=True)
    _emit(args, payload, human)
    if not result.conclusive:
        return EXIT_BUDGET
    return EXIT_OK if result.accepted else EXIT_NEGATIVE


def _cmd_enum(args: argparse.Namespace) -> int:
    ls = _load_sentence(args.sentence)
    sample = enumerate_language(ls, args.max_len, args.budget)
    payload = {
        "max_len": args.max_len,
        "complete": sample.complete,
        "words": ["".join(w.letters) for w in sample.words],
        "undecided": ["".join(w.letters) for w in sample.undecided],
    }
    lines = [_show_word(w) for w in sample.words]
    if sample.undecided:
        lines.append(
            f"({len(sample.undecided)} words undecided within budget)"
        )
    _emit(args, payload, "\n".join(lines) if lines else "(empty language)")
    return EXIT_OK if sample.complete else EXIT_BUDGET


def _read_map_file(path: str) -> dict[str, str]:
    mapping: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "->" not in line:
            raise _CliError(f"map line needs 'letter -> image': {raw!r}")
        left, right = line.split("->", 1)
        letter = left.strip()
        if not letter:
            raise _CliError(f"map line needs a letter before '->': {raw!r}")
        mapping[letter] = right.strip()
    if not mapping:
        raise _CliError(f"map file {path} defines no entries")
    return mapping


def _cmd_combine(args: argparse.Namespace) -> int:
    left = _load_sentence(args.left)
    if args.op in ("union", "concat"):
        if args.right is None:
            raise _CliError(f"{args.op} needs --right")
        right = _load_sentence(args.right)
        if args.op == "union":
            out = union_sentence(left, right)
        else:
            out = concat_sentence(
                left, right, require_nonempty_first=args.require_nonempty_first
            )
    elif args.op in ("morphism", "inverse-morphism"):
        if args.map is None:
            raise _CliError(f"{args.op} needs --map with 'letter -> letter' lines")
        raw = _read_map_file(args.map)
        h = AlphabeticMorphism(
            {letter: (image or None) for letter, image in raw.items()}
        )
        if args.op == "morphism":
            out = morphism_sentence(left, h)
        else:
            out = inverse_morphism_sentence(left, h, trailing_marker=args.marker)
    elif args.op == "substitution":
        if args.map is None:
            raise _CliError(
                "substitution needs --map with 'letter -> sentence-file' lines"
            )
        raw = _read_map_file(args.map)
        base = Path(args.map).parent
        inner = {
            letter: load_local_sentence(base / image)
            for letter, image in raw.items()
        }
        out = substitution_sentence(left, SubstitutionSpec(inner), args.budget)
    else:  # pragma: no cover - argparse restricts choices
        raise _CliError(f"unknown operation {args.op}")

    text = format_local_sentence(out)
    if args.out:
        save_local_sentence(out, args.out)
    payload = {
        "op": args.op,
        "alphabet": list(out.alphabet),
        "declared_bound": out.declared_bound,
        "out": args.out,
        "sentence": render_sentence(out.body),
    }
    human = text if not args.out else (
        f"wrote {args.out} (alphabet {' '.join(out.alphabet)}, "
        f"declared bound {out.declared_bound})"
    )
    _emit(args, payload, human)
    return EXIT_OK


def _cmd_closure(args: argparse.Namespace) -> int:
    if (args.structure is None) == (args.sentence is None):
        raise _CliError("give exactly one of --structure or --sentence")
    if args.structure is not None:
        data = json.loads(Path(args.structure).read_text())
        model = FiniteStructure.from_dict(data)
    else:
        ls = _load_sentence(args.sentence)
        word = _parse_word(args.word, args.word_file)
        result = decide_membership(word, ls, args.budget)
        if not result.conclusive:
            print("membership search exhausted its budget", file=sys.stderr)
            return EXIT_BUDGET
        if not result.accepted:
            print(
                f"{_show_word(word)} is not in the language; no witness to close",
                file=sys.stderr,
            )
            return EXIT_NEGATIVE
        model = result.witness
    if args.elements.strip():
        start = sorted({int(tok) for tok in args.elements.replace(",", " ").split()})
    else:
        start = []
    trace = closure(model, start)
    payload = {
        "start": list(start),
        "steps": trace.steps,
        "stages": [sorted(stage) for stage in trace.stages],
        "result": sorted(trace.result),
    }
    lines = [
        f"stage {i}: {{{', '.join(map(str, sorted(stage)))}}}"
        for i, stage in enumerate(trace.stages)
    ]
    lines.append(f"closed after {trace.steps} steps")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _cmd_audit(args: argparse.Namespace) -> int:
    ls = _load_sentence(args.sentence)
    which = args.check
    reports = []
    sentence_id = args.sentence
    # model collection dominates audit time; share it between checks
    models = collect_models(ls, args.max_size, args.budget, args.seed)
    if which in ("closure-bound", "both"):
        reports.append(
            audit_closure_bound(
                ls, args.max_size, args.budget, args.seed, sentence_id, models
            )
        )
    if which in ("substructure", "both"):
        reports.append(
            audit_substructure_closure(
                ls, args.max_size, args.budget, args.seed, sentence_id, models
            )
        )
    payload = {"reports": [r.to_dict() for r in reports]}
    human = "\n\n".join(r.summary() for r in reports)
    _emit(args, payload, human)
    verdicts = {r.verdict for r in reports}
    if "falsified" in verdicts:
        return EXIT_NEGATIVE
    if "inconclusive" in verdicts:
        return EXIT_BUDGET
    return EXIT_OK


def _cmd_antidyck(args: argparse.Namespace) -> int:
    word = parse_paren_word(" ".join(args.letters))
    member = antidyck_member(word)
    trace = antidyck_reduction(word)
    payload = {
        "word": list(word),
        "member": member,
        "trace": [list(step) for step in trace] if args.trace else None,
    }
    lines = []
    if args.trace:
        for step in trace:
            lines.append(" ".join(step) if step else EMPTY_WORD_DISPLAY)
    lines.append("MEMBER" if member else "NOT MEMBER")
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if member else EXIT_NEGATIVE


def _cmd_sigma(args: argparse.Namespace) -> int:
    if args.periodic_v is not None:
        u = args.periodic_u or ""
        index = ultimately_periodic_divergence(u, args.periodic_v, args.horizon)
        payload = {
            "u": u,
            "v": args.periodic_v,
            "horizon": args.horizon,
            "divergence_index": index,
        }
        if index is None:
            human = f"no divergence within horizon {args.horizon}"
            _emit(args, payload, human)
            return EXIT_NEGATIVE
        _emit(args, payload, f"diverges at index {index}")
        return EXIT_OK
    word = sigma_prefix(args.length)
    payload = {"length": args.length, "word": "".join(word.letters)}
    _emit(args, payload, _show_word(word))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="loclang",
        description="universal sentences over word signatures, made executable",
    )
    parser.add_argument("--version", action="version", version=f"loclang {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_json(p: argparse.ArgumentParser) -> None:
        p.add_argument("--json", action="store_true", help="machine-readable output")

    def add_budget(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--budget",
            type=int,
            default=10_000_000,
            help="search budget in attempted assignments (default 10000000)",
        )

    def add_sentence(p: argparse.ArgumentParser) -> None:
        p.add_argument(
            "--sentence",
            required=True,
            help=f"sentence file, or example:NAME (one of {', '.join(example_names)})",
        )

    def add_word(p: argparse.ArgumentParser) -> None:
        p.add_argument("--word", help="word as a string of single-character letters")
        p.add_argument(
            "--word-file",
            help="file of whitespace-separated letters (for multi-character letters)",
        )

    p = sub.add_parser("check", help="validate a sentence file and summarize it")
    add_sentence(p)
    add_json(p)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("member", help="decide membership of one word")
    add_sentence(p)
    add_word(p)
    add_budget(p)
    p.add_argument(
        "--show-witness", action="store_true", help="print the accepting expansion"
    )
    add_json(p)
    p.set_defaults(func=_cmd_member)

    p = sub.add_parser("enum", help="list member words up to a length")
    add_sentence(p)
    p.add_argument("--max-len", type=int, required=True)
    add_budget(p)
    add_json(p)
    p.set_defaults(func=_cmd_enum)

    p = sub.add_parser("combine", help="build a combined sentence")
    p.add_argument(
        "--op",
        required=True,
        choices=["union", "concat", "substitution", "morphism", "inverse-morphism"],
    )
    p.add_argument("--left", required=True, help="first (or only) sentence file")
    p.add_argument("--right", help="second sentence file (union, concat)")
    p.add_argument(
        "--map",
        help="description file: 'letter -> letter' lines for morphisms "
        "(empty image erases), 'letter -> sentence-file' for substitution; "
        "paths are relative to the map file",
    )
    p.add_argument("--marker", help="trailing marker letter (inverse-morphism)")
    p.add_argument(
        "--require-nonempty-first",
        action="store_true",
        help="concat only: first factor must be nonempty",
    )
    p.add_argument("--out", help="write the sentence here instead of stdout")
    add_budget(p)
    add_json(p)
    p.set_defaults(func=_cmd_combine)

    p = sub.add_parser("closure", help="closure stages of a subset of a model")
    p.add_argument("--structure", help="structure JSON file")
    p.add_argument("--sentence", help="sentence file; closes inside a word witness")
    add_word(p)
    p.add_argument(
        "--elements",
        default="",
        help="comma- or space-separated start elements (default: empty set)",
    )
    add_budget(p)
    add_json(p)
    p.set_defaults(func=_cmd_closure)

    p = sub.add_parser("audit", help="empirical locality checks")
    add_sentence(p)
    p.add_argument(
        "--check",
        choices=["closure-bound", "substructure", "both"],
        default="both",
    )
    p.add_argument(
        "--max-size",
        type=int,
        default=7,
        help="maximum word length searched for models (default 7)",
    )
    p.add_argument("--seed", type=int, default=0)
    add_budget(p)
    add_json(p)
    p.set_defaults(func=_cmd_audit)

    p = sub.add_parser("antidyck", help="bracket-word membership")
    p.add_argument(
        "letters",
        nargs="+",
        help="bracket letters y1 y2 Y1 Y2 (capitals close), tokens or compact",
    )
    p.add_argument("--trace", action="store_true", help="show the reduction sequence")
    add_json(p)
    p.set_defaults(func=_cmd_antidyck)

    p = sub.add_parser("sigma", help="staircase word prefixes and divergence")
    p.add_argument("--length", type=int, default=20, help="prefix length to print")
    p.add_argument("--periodic-u", help="initial part for a divergence check")
    p.add_argument("--periodic-v", help="repeated part; triggers the divergence check")
    p.add_argument("--horizon", type=int, default=60)
    add_json(p)
    p.set_defaults(func=_cmd_sigma)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except _USER_ERRORS as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
