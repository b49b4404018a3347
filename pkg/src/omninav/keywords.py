"""Keyword extraction from navigation instructions.

Two interchangeable routes produce a KeywordSet: a deterministic rule-based
extractor over a noun-phrase lexicon (the offline default), and a prompt
renderer / response parser pair for batching instructions through an external
language model. Both enforce the same contract: every keyword appears in the
instruction. A small line-delimited JSON cache persists extractions.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .detection import normalize_label
from .errors import CacheCorrupt, MissingAnswerMarker
from .lexicon import DEFAULT_LEXICON

ANSWER_MARKER = "Therefore the answer is:"

SYSTEM_PROMPT = (
    "You are a helpful assistant. You can help me by answering my questions. "
    "I will give you some instructions for vision-language navigation, you need "
    "to give me the key objects that are mentioned in this instruction. Key "
    "object is the noun or noun phrase that a navigation agent can use as "
    "milestone.\n"
    "\n"
    "The query will be given by:\n"
    "\n"
    "Instruction: <QUERY>\n"
    "\n"
    "You must respond to any queries or answer in the following way:\n"
    "\n"
    "Query: <QUERY> Answer: <ANSWER> Therefore the answer is: <TARGET_OBJETCTS>\n"
    "\n"
    "The key objects in <TARGET_OBJETCTS> must appear in the instruction and "
    "are separated by commas."
)


@dataclass(frozen=True)
class KeywordSet:
    """Keywords of one instruction, normalized, in first-occurrence order."""

    instruction: str
    keywords: tuple[str, ...]

    def __post_init__(self):
        seen = set()
        for kw in self.keywords:
            if not kw:
                raise ValueError("empty keyword")
            norm = normalize_label(kw)
            if norm in seen:
                raise ValueError(f"duplicate keyword {kw!r}")
            seen.add(norm)
            if not appears_in_instruction(kw, self.instruction):
                raise ValueError(f"keyword {kw!r} does not appear in instruction")


def appears_in_instruction(keyword: str, instruction: str) -> bool:
    """Case-insensitive, whitespace-collapsed substring test."""
    return normalize_label(keyword) in normalize_label(instruction)


_WORD_RE = re.compile(r"[a-z0-9']+")


def extract_keywords_rule_based(
    instruction: str, lexicon: Sequence[str] = DEFAULT_LEXICON
) -> KeywordSet:
    """Longest-match scan of lexicon phrases over the instruction.

    Words are matched left to right; at each position the longest lexicon
    phrase starting there wins and the scan resumes after it, so overlapping
    candidates resolve toward the longer phrase. Results are deduplicated
    keeping the first occurrence.
    """
    words = _WORD_RE.findall(instruction.lower())
    phrases: dict[tuple[str, ...], str] = {}
    for phrase in lexicon:
        norm = normalize_label(phrase)
        toks = tuple(_WORD_RE.findall(norm))
        if toks:
            phrases.setdefault(toks, norm)
    max_len = max((len(t) for t in phrases), default=0)

    found: list[str] = []
    i = 0
    while i < len(words):
        match = None
        for n in range(min(max_len, len(words) - i), 0, -1):
            toks = tuple(words[i : i + n])
            if toks in phrases:
                match = phrases[toks]
                i += n
                break
        if match is None:
            i += 1
        elif match not in found:
            found.append(match)
    found = [kw for kw in found if appears_in_instruction(kw, instruction)]
    return KeywordSet(instruction=instruction, keywords=tuple(found))


def render_llm_prompt(instruction: str) -> tuple[str, str]:
    """(system prompt, user message) pair for one instruction."""
    return SYSTEM_PROMPT, f"Instruction: {instruction}"


def format_llm_response(keywords: Iterable[str]) -> str:
    """Render keywords into the expected answer template (for mocks and tests)."""
    joined = ", ".join(keywords)
    return f"Query: - Answer: - {ANSWER_MARKER} {joined}"


def parse_llm_response(text: str, instruction: str) -> KeywordSet:
    """Extract the keyword list from a model response.

    Takes everything after the last answer marker, splits on commas, strips
    whitespace and trailing periods, and drops anything that does not appear
    in the instruction.
    """
    idx = text.rfind(ANSWER_MARKER)
    if idx < 0:
        raise MissingAnswerMarker(f"response lacks {ANSWER_MARKER!r}")
    tail = text[idx + len(ANSWER_MARKER):]
    keywords: list[str] = []
    for part in tail.split(","):
        kw = normalize_label(part.strip().rstrip(".").strip())
        if not kw or kw in keywords:
            continue
        if appears_in_instruction(kw, instruction):
            keywords.append(kw)
    return KeywordSet(instruction=instruction, keywords=tuple(keywords))


def instruction_hash(instruction: str) -> str:
    return hashlib.sha256(instruction.encode("utf-8")).hexdigest()


class KeywordCache:
    """Append-only extraction cache persisted as line-delimited JSON.

    Each line is {"hash", "instruction", "keywords"}; a later line for the
    same hash supersedes earlier ones. Lookups are cheap dict reads and may
    run concurrently; stores must be serialized by the caller.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._entries: dict[str, KeywordSet] = {}
        if self.path.exists():
            self._load()

    def _load(self) -> None:
        with open(self.path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    ks = KeywordSet(rec["instruction"], tuple(rec["keywords"]))
                    self._entries[rec["hash"]] = ks
                except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                    raise CacheCorrupt(f"{self.path}:{lineno}: {exc}") from exc

    def lookup(self, instruction: str) -> KeywordSet | None:
        return self._entries.get(instruction_hash(instruction))

    def store(self, keyword_set: KeywordSet) -> None:
        h = instruction_hash(keyword_set.instruction)
        self._entries[h] = keyword_set
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with open(self.path, "a", encoding="utf-8") as fh:
            fh.write(
                json.dumps(
                    {
                        "hash": h,
                        "instruction": keyword_set.instruction,
                        "keywords": list(keyword_set.keywords),
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )

    def __len__(self) -> int:
        return len(self._entries)
