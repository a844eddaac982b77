#!/usr/bin/env python3
"""Walk through the staircase sentence's closure behavior.

Decides the length-10 staircase prefix, prints the forced expansion,
then closes two trailing segments: the last "a b b b a" closes to the
whole universe, and the last "b b a" closes to a six-element substructure
whose induced word is again in the language.
"""

import argparse

from loclang import (
    Signature,
    closure,
    decide_membership,
    generated_substructure,
    reduct,
    sigma_word_sentence,
    structure_to_word,
)


def show_trace(label, trace):
    print(f"closure of {label}:")
    for i, stage in enumerate(trace.stages):
        print(f"  stage {i}: {sorted(stage)}")
    print(f"  -> closed after {trace.steps} steps")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--word", default="ababbabbba", help="word to decide (default: ababbabbba)"
    )
    args = parser.parse_args()

    ls = sigma_word_sentence()
    result = decide_membership(args.word, ls)
    print(f"{args.word!r}: accepted={result.accepted} "
          f"({result.nodes_explored} nodes)")
    if not result.accepted:
        return
    witness = result.witness

    n = len(args.word)
    print("\nforced function values in the witness:")
    f = witness.functions["f"]
    for (x, y), v in sorted(f.items()):
        if v != min(x, y):
            print(f"  f({x}, {y}) = {v}")
    p, p2 = witness.functions["p"], witness.functions["p'"]
    pairs = {
        z[0]: (p[z], p2[z])
        for z in sorted(p)
        if p[z] != z[0] or p2[z] != z[0]
    }
    print("  each b-position z as f(p(z), p'(z)):",
          {z: v for z, v in pairs.items()})

    print()
    tail5 = set(range(n - 5, n))
    show_trace(sorted(tail5), closure(witness, tail5))

    print()
    tail3 = set(range(n - 3, n))
    trace = closure(witness, tail3)
    show_trace(sorted(tail3), trace)
    sub, _ = generated_substructure(witness, tail3)
    word_sig = Signature.word(ls.alphabet)
    induced = structure_to_word(reduct(sub, word_sig))
    print(f"  induced word of the generated substructure: {induced}")
    verdict = decide_membership(induced, ls)
    print(f"  which is itself {'accepted' if verdict.accepted else 'rejected'}")


if __name__ == "__main__":
    main()
