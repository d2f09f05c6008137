"""Tokenization shared by every text-consuming stage.

Indexing, vocabulary building, ground-truth matching, and query parsing all
run through :func:`tokenize` so that a phrase matched in one stage is
guaranteed to match in the others.
"""

from __future__ import annotations

import re

# Maximal runs of Unicode alphanumerics. Underscore is excluded on purpose:
# it is not alphanumeric, so snake_case splits into its parts.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str) -> list[str]:
    """Lowercase word segmentation on non-alphanumeric boundaries.

    No stemming and no stop-word removal: synonym sets carry inflected
    variants explicitly, so the tokenizer must not collapse them.
    """
    return [m.group().lower() for m in _TOKEN_RE.finditer(text)]


def contains_phrase(tokens: list[str], phrase: list[str]) -> bool:
    """True when ``phrase`` occurs as a contiguous token run in ``tokens``."""
    if not phrase:
        return False
    n, k = len(tokens), len(phrase)
    first = phrase[0]
    for i in range(n - k + 1):
        if tokens[i] == first and tokens[i : i + k] == phrase:
            return True
    return False


def ngrams(tokens: list[str], n_min: int = 1, n_max: int = 2) -> list[str]:
    """All n-grams of ``tokens`` for n in [n_min, n_max], space-joined."""
    out: list[str] = []
    for n in range(n_min, n_max + 1):
        if n == 1:
            out.extend(tokens)
        else:
            out.extend(
                " ".join(tokens[i : i + n]) for i in range(len(tokens) - n + 1)
            )
    return out
