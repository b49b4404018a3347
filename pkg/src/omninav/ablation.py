"""Restricted keyword modes for ablation runs.

"type1" discards extraction entirely and always queries the twelve common
object categories. "type2" extracts normally but keeps only keywords whose
words include one of the twelve category names, so qualified phrases like
"marble kitchen counter" survive while unrelated ones like "kitchen island"
do not. "full" is the unrestricted default pipeline.
"""

from __future__ import annotations

import re
from typing import Iterable

from .detection import normalize_label
from .keywords import extract_keywords_rule_based
from .lexicon import COMMON_CATEGORIES

ABLATION_MODES = ("type1", "type2", "full")

_CATEGORY_WORDS = frozenset(COMMON_CATEGORIES)
_WORD_RE = re.compile(r"[a-z0-9']+")


def contains_common_category(keyword: str) -> bool:
    """True when one of the keyword's words is a common category name."""
    return any(w in _CATEGORY_WORDS for w in _WORD_RE.findall(normalize_label(keyword)))


def type2_filter(keywords: Iterable[str]) -> list[str]:
    return [kw for kw in keywords if contains_common_category(kw)]


def make_keyword_strategy(mode: str):
    """Instruction -> keyword list under the given ablation mode."""
    if mode == "type1":
        return lambda instruction: list(COMMON_CATEGORIES)
    if mode == "type2":
        return lambda instruction: type2_filter(
            extract_keywords_rule_based(instruction).keywords
        )
    if mode == "full":
        return lambda instruction: list(extract_keywords_rule_based(instruction).keywords)
    raise ValueError(f"unknown ablation mode {mode!r}; expected one of {ABLATION_MODES}")
