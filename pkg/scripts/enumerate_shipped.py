#!/usr/bin/env python3
"""Enumerate every shipped sentence's language up to a length."""

import argparse
import time
from pathlib import Path

from loclang import EMPTY_WORD_DISPLAY, enumerate_language, load_local_sentence

SENTENCES = Path(__file__).parent / "sentences"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-len", type=int, default=6)
    parser.add_argument("--budget", type=int, default=10_000_000)
    args = parser.parse_args()

    for path in sorted(SENTENCES.glob("*.lfs")):
        ls = load_local_sentence(path)
        t0 = time.time()
        sample = enumerate_language(ls, args.max_len, args.budget)
        dt = time.time() - t0
        words = [str(w) if len(w) else EMPTY_WORD_DISPLAY for w in sample.words]
        print(f"{path.name} ({dt:.1f}s, {len(words)} words <= {args.max_len}):")
        line = "  "
        for w in words:
            if len(line) + len(w) > 78:
                print(line)
                line = "  "
            line += w + " "
        if line.strip():
            print(line)
        if sample.undecided:
            print(f"  ({len(sample.undecided)} words undecided within budget)")
        print()


if __name__ == "__main__":
    main()
