"""Deterministic lexicon used for prompt tokenization and noun inflection.

The lexicon is plain data (a JSON file) so the closed quantity-word list,
stop lists, irregular inflections and multiword label aliases can be
extended without touching code. Suffix rewrite rules live here as ordered
regex pairs; irregulars always take precedence over the rules.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

# Ordered rewrite rules, first match wins. Irregulars are consulted first.
SINGULAR_RULES: tuple[tuple[str, str], ...] = (
    (r"^(.{2,})ies$", r"\1y"),
    (r"^(.+(?:x|ch|sh|ss|z))es$", r"\1"),
    (r"^(.+[^su])s$", r"\1"),  # leave -ss and -us endings alone ("glass", "lotus")
)

PLURAL_RULES: tuple[tuple[str, str], ...] = (
    (r"^(.+[^aeiou])y$", r"\1ies"),
    (r"^(.+(?:s|x|z|ch|sh))$", r"\1es"),
    (r"^(.+)$", r"\1s"),
)

# Tokens ending in a stop suffix (at this minimum length) are dropped as
# verb-like, e.g. "resting", "surfing".
STOP_SUFFIXES: tuple[tuple[str, int], ...] = (("ing", 6),)

_MAX_ALIAS_TOKENS = 3


@dataclass(frozen=True)
class Lexicon:
    number_words: dict[str, int]
    articles: frozenset[str]
    irregular_singulars: dict[str, str]  # plural form -> singular form
    irregular_plurals: dict[str, str]  # singular form -> plural form
    stop_words: frozenset[str]
    label_aliases: dict[tuple[str, ...], str]  # token phrase -> canonical label
    singular_rules: tuple[tuple[str, str], ...] = SINGULAR_RULES
    plural_rules: tuple[tuple[str, str], ...] = PLURAL_RULES
    stop_suffixes: tuple[tuple[str, int], ...] = STOP_SUFFIXES

    def quantity_value(self, token: str) -> int | None:
        """Integer value of a quantity token, or None if it is not one.

        Digit strings 1-99 are recognized without being enumerated in the
        number-word table.
        """
        value = self.number_words.get(token)
        if value is not None:
            return value
        if token.isdigit():
            as_int = int(token)
            if 1 <= as_int <= 99:
                return as_int
        return None

    def is_article(self, token: str) -> bool:
        return token in self.articles

    def is_stop(self, token: str) -> bool:
        if token in self.stop_words:
            return True
        return any(
            len(token) >= min_len and token.endswith(suffix)
            for suffix, min_len in self.stop_suffixes
        )

    def singularize(self, word: str) -> str:
        irregular = self.irregular_singulars.get(word)
        if irregular is not None:
            return irregular
        for pattern, repl in self.singular_rules:
            rewritten, n = re.subn(pattern, repl, word)
            if n:
                return rewritten
        return word

    def pluralize(self, word: str) -> str:
        """Plural form for prompt rendering; multiword labels inflect the last token."""
        if " " in word:
            head, _, last = word.rpartition(" ")
            return f"{head} {self.pluralize(last)}"
        irregular = self.irregular_plurals.get(word)
        if irregular is not None:
            return irregular
        for pattern, repl in self.plural_rules:
            rewritten, n = re.subn(pattern, repl, word)
            if n:
                return rewritten
        return word

    def match_alias(self, tokens: list[str], start: int) -> tuple[str, int] | None:
        """Longest multiword-label alias starting at tokens[start].

        Returns (canonical label, tokens consumed) or None.
        """
        for length in range(_MAX_ALIAS_TOKENS, 1, -1):
            phrase = tuple(tokens[start : start + length])
            if len(phrase) == length:
                label = self.label_aliases.get(phrase)
                if label is not None:
                    return label, length
        return None


def _as_phrase(key: str) -> tuple[str, ...]:
    return tuple(key.lower().split())


def load_lexicon(path: str | Path) -> Lexicon:
    """Load a lexicon file: JSON with keys number_words, articles,
    irregular_singulars, stop_words, label_aliases (all optional but
    typically all present). Extra keys are ignored."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    number_words = {str(k).lower(): int(v) for k, v in data.get("number_words", {}).items()}
    if any(v < 1 for v in number_words.values()):
        raise ValueError("number_words values must be >= 1")
    singulars = {str(k).lower(): str(v).lower() for k, v in data.get("irregular_singulars", {}).items()}
    plurals = {str(k).lower(): str(v).lower() for k, v in data.get("irregular_plurals", {}).items()}
    if not plurals:
        # Derive generation-side irregulars by inverting the singular table.
        plurals = {s: p for p, s in singulars.items() if p != s or s == p}
    return Lexicon(
        number_words=number_words,
        articles=frozenset(str(w).lower() for w in data.get("articles", [])),
        irregular_singulars=singulars,
        irregular_plurals=plurals,
        stop_words=frozenset(str(w).lower() for w in data.get("stop_words", [])),
        label_aliases={
            _as_phrase(k): str(v).lower() for k, v in data.get("label_aliases", {}).items()
        },
    )


def default_lexicon() -> Lexicon:
    """The shipped lexicon (package data), loaded fresh."""
    with resources.as_file(
        resources.files("cqscore").joinpath("data/default_lexicon.json")
    ) as path:
        return load_lexicon(path)
