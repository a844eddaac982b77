#!/usr/bin/env python3
"""Audit closure bounds and substructure preservation for every shipped
sentence, and for a few combined sentences built from them."""

import argparse
import time
from pathlib import Path

from loclang import (
    audit_closure_bound,
    audit_substructure_closure,
    concat_sentence,
    load_local_sentence,
    union_sentence,
)

SENTENCES = Path(__file__).parent / "sentences"


def run(name, ls, max_size, budget, seed) -> bool:
    ok = True
    for audit in (audit_closure_bound, audit_substructure_closure):
        t0 = time.time()
        report = audit(ls, max_size, budget, seed, sentence_id=name)
        print(report.summary())
        print(f"  ({time.time() - t0:.1f}s)\n")
        ok &= report.verdict != "falsified"
    return ok


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-size", type=int, default=6)
    parser.add_argument("--budget", type=int, default=10_000_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    loaded = {
        path.name: load_local_sentence(path)
        for path in sorted(SENTENCES.glob("*.lfs"))
    }
    all_ok = True
    for name, ls in loaded.items():
        all_ok &= run(name, ls, args.max_size, args.budget, args.seed)

    combos = {
        "a_star|b_star": union_sentence(loaded["a_star.lfs"], loaded["b_star.lfs"]),
        "a_star.b_star": concat_sentence(loaded["a_star.lfs"], loaded["b_star.lfs"]),
        "spaced_b.a_star": concat_sentence(
            loaded["spaced_b.lfs"], loaded["a_star.lfs"]
        ),
    }
    for name, ls in combos.items():
        all_ok &= run(name, ls, args.max_size, args.budget, args.seed)

    print("NO AUDIT FALSIFIED" if all_ok else "SOME AUDIT WAS FALSIFIED")


if __name__ == "__main__":
    main()
