"""Free-text prompt to structured quantity-category map.

Tokenization is lexicon-driven and fully deterministic: quantity words set a
pending count, articles count as one, stop-listed tokens are dropped, and
anything left is a noun normalized to singular form. A noun pairs with the
nearest preceding unconsumed quantity word, defaulting to one; duplicate
nouns accumulate.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field

from .lexicon import Lexicon, default_lexicon

log = logging.getLogger(__name__)

_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class CategoryCountMap:
    """Ordered map from singular-form class label to positive count."""

    entries: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for label, count in self.entries.items():
            if count < 1:
                raise ValueError(f"count for {label!r} must be >= 1, got {count}")

    @property
    def n_c(self) -> int:
        return len(self.entries)

    def __bool__(self) -> bool:
        return bool(self.entries)

    def canonical_text(self, lex: Lexicon | None = None) -> str:
        """Render back to prompt form, e.g. 'four person and one skis'."""
        if lex is None:
            lex = default_lexicon()
        words = {v: k for k, v in lex.number_words.items() if k != "tow"}
        parts = [
            f"{words.get(count, str(count))} {label}" for label, count in self.entries.items()
        ]
        if len(parts) <= 1:
            return "".join(parts)
        return ", ".join(parts[:-1]) + " and " + parts[-1]


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def parse_prompt(text: str, lex: Lexicon | None = None) -> CategoryCountMap:
    """Extract the quantity-category mapping from a prompt.

    A prompt with no recognizable noun yields an empty map (logged as a
    warning, not an error).
    """
    if lex is None:
        lex = default_lexicon()
    tokens = tokenize(text)
    entries: dict[str, int] = {}
    pending: int | None = None
    i = 0
    while i < len(tokens):
        # Multiword detector labels ("hot dogs") take priority over
        # word-by-word tagging.
        alias = lex.match_alias(tokens, i)
        if alias is not None:
            label, consumed = alias
            entries[label] = entries.get(label, 0) + (pending if pending is not None else 1)
            pending = None
            i += consumed
            continue
        token = tokens[i]
        i += 1
        quantity = lex.quantity_value(token)
        if quantity is not None:
            pending = quantity
        elif lex.is_article(token):
            pending = 1
        elif lex.is_stop(token):
            continue
        else:
            label = lex.singularize(token)
            entries[label] = entries.get(label, 0) + (pending if pending is not None else 1)
            pending = None
    if not entries:
        log.warning("no category found in prompt: %r", text)
    return CategoryCountMap(entries)


def normalize_noun(word: str, lex: Lexicon | None = None) -> str:
    """Singular form of a noun: irregulars table first, then suffix rules."""
    if not word:
        raise ValueError("word must be nonempty")
    if lex is None:
        lex = default_lexicon()
    return lex.singularize(word.lower())
