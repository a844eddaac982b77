"""Word-level tools: a FIFO parenthesis language, the staircase word,
and divergence checking against ultimately periodic words.

The parenthesis language lives over two bracket pairs, written ``y1 y2``
for the opening letters and ``Y1 Y2`` for the closing ones.  A word
belongs to the language when the anchored rewrite rule — drop the first
letter together with the first closing letter, provided they match and
only opening letters sit between them — reduces it to nothing.  That is
exactly queue discipline ("first opened, first closed"), and an
independent queue-based recognizer is provided as a cross-check.
"""

from __future__ import annotations

import re
from collections import deque
from typing import Optional, Sequence, Union

from .structures import Word, _as_word

OPEN_LETTERS = ("y1", "y2")
CLOSE_LETTERS = ("Y1", "Y2")
PAREN_ALPHABET = OPEN_LETTERS + CLOSE_LETTERS

_CLOSER_OF = {"y1": "Y1", "y2": "Y2"}

ParenWord = tuple[str, ...]

_PAREN_TOKEN = re.compile(r"[yY][12]")


class ParenWordError(ValueError):
    pass


def parse_paren_word(text: Union[str, Sequence[str]]) -> ParenWord:
    """Read a bracket word from tokens or compact text like ``y1y2Y1Y2``."""
    if not isinstance(text, str):
        tokens = tuple(text)
    else:
        stripped = "".join(text.split())
        tokens = tuple(_PAREN_TOKEN.findall(stripped))
        if "".join(tokens) != stripped:
            raise ParenWordError(f"cannot read {text!r} as a bracket word")
    for t in tokens:
        if t not in PAREN_ALPHABET:
            raise ParenWordError(
                f"letter {t!r} is not one of {' '.join(PAREN_ALPHABET)}"
            )
    return tokens


def _as_paren(w: Union[str, Sequence[str]]) -> ParenWord:
    return parse_paren_word(w)


def antidyck_reduce_step(w: Union[str, Sequence[str]]) -> Optional[ParenWord]:
    """One anchored reduction, or ``None`` if the rule does not apply.

    The word must start with an opening letter, and the first closing
    letter in the word must be its partner; both disappear.  Each step
    shortens the word by exactly two letters.
    """
    w = _as_paren(w)
    if not w or w[0] not in _CLOSER_OF:
        return None
    for i, letter in enumerate(w):
        if letter in CLOSE_LETTERS:
            if letter != _CLOSER_OF[w[0]]:
                return None
            return w[1:i] + w[i + 1 :]
    return None


def antidyck_reduction(w: Union[str, Sequence[str]]) -> list[ParenWord]:
    """The full reduction sequence, starting word included."""
    current = _as_paren(w)
    trace = [current]
    while True:
        nxt = antidyck_reduce_step(current)
        if nxt is None:
            return trace
        trace.append(nxt)
        current = nxt


def antidyck_member(w: Union[str, Sequence[str]]) -> bool:
    """True iff iterated reduction empties the word."""
    return antidyck_reduction(w)[-1] == ()


def antidyck_member_queue(w: Union[str, Sequence[str]]) -> bool:
    """Independent recognizer: openers enqueue, a closer must match the
    queue front.  Kept deliberately separate from the rewriting path."""
    pending: deque[str] = deque()
    for letter in _as_paren(w):
        if letter in _CLOSER_OF:
            pending.append(_CLOSER_OF[letter])
        else:
            if not pending or pending.popleft() != letter:
                return False
    return not pending


# ---------------------------------------------------------------------------
# The staircase word and ultimately periodic comparisons
# ---------------------------------------------------------------------------


def sigma_prefix(n: int) -> Word:
    """First ``n`` letters of a b a bb a bbb a bbbb ... over {a, b}."""
    if n < 0:
        raise ValueError("length must be nonnegative")
    letters: list[str] = []
    block = 1
    while len(letters) < n:
        letters.append("a")
        letters.extend("b" * block)
        block += 1
    return Word(tuple(letters[:n]))


def ultimately_periodic_divergence(
    u: Union[Word, str],
    v: Union[Word, str],
    horizon: int,
) -> Optional[int]:
    """Least index below ``horizon`` where u·v·v·v··· differs from the
    staircase word, or ``None`` if they agree that far."""
    u = _as_word(u)
    v = _as_word(v)
    if len(v) == 0:
        raise ValueError("the repeated part must be nonempty")
    if horizon < len(u):
        raise ValueError("horizon must cover the initial part")
    reference = sigma_prefix(horizon).letters
    for i in range(horizon):
        periodic = u.letters[i] if i < len(u) else v.letters[(i - len(u)) % len(v)]
        if periodic != reference[i]:
            return i
    return None
