"""Sentence segmentation, word tokenization, syllable counting and word-list
lookup.

Everything here is deterministic and rule based. The counts collected in
:class:`TextStats` are the only inputs the readability formulas see.
"""

from __future__ import annotations

import re
import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable

from .errors import EmptyText, NotAWord

__all__ = [
    "WordLists",
    "TextStats",
    "load_word_list",
    "default_word_lists",
    "segment_sentences",
    "tokenize_words",
    "count_syllables",
    "is_familiar",
    "compute_text_stats",
]

_VOWELS = frozenset("aeiouy")

# Numbers keep their internal separators ("3.14", "1,000"); words may carry
# internal apostrophes and hyphens.
_TOKEN_RE = re.compile(r"\d+(?:[.,]\d+)+|[^\W_]+(?:['’\-][^\W_]+)*")
_TERMINATOR_RE = re.compile(r"[.!?]+[\"'”’)\]]*")
_OPENERS = "\"'“‘([{"
_GROUP_RE = re.compile(r"[aeiouy]+")


def load_word_list(path: str | Path) -> frozenset[str]:
    """Read a one-word-per-line list; blank lines and ``#`` comments are skipped."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip().lower()
            if line:
                words.add(line)
    return frozenset(words)


def _bundled(name: str) -> frozenset[str]:
    with resources.as_file(resources.files("readgrade") / "data" / name) as path:
        return load_word_list(path)


@dataclass(frozen=True)
class WordLists:
    """Familiar-word lists and the abbreviation list used for segmentation."""

    dale_chall_words: frozenset[str]
    spache_words: frozenset[str]
    abbreviation_list: frozenset[str]

    def __post_init__(self) -> None:
        for name in ("dale_chall_words", "spache_words", "abbreviation_list"):
            entries = getattr(self, name)
            for w in entries:
                if not w or w != w.lower() or any(c.isspace() for c in w):
                    raise ValueError(f"{name}: bad entry {w!r}")
            object.__setattr__(self, name, frozenset(entries))

    @classmethod
    def from_files(
        cls,
        dale_chall: str | Path | None = None,
        spache: str | Path | None = None,
        abbreviations: str | Path | None = None,
    ) -> "WordLists":
        """Load lists from disk, falling back to the bundled copy for any path left as None."""
        default = default_word_lists()
        return cls(
            load_word_list(dale_chall) if dale_chall else default.dale_chall_words,
            load_word_list(spache) if spache else default.spache_words,
            load_word_list(abbreviations) if abbreviations else default.abbreviation_list,
        )


@lru_cache(maxsize=1)
def default_word_lists() -> WordLists:
    return WordLists(
        dale_chall_words=_bundled("dale_chall.txt"),
        spache_words=_bundled("spache.txt"),
        abbreviation_list=_bundled("abbreviations.txt"),
    )


@dataclass(frozen=True)
class TextStats:
    """Token-level counts for one text.

    ``character_count`` counts letters and digits; ``letter_count`` counts
    letters only. ``easy_word_count`` and ``hard_word_count`` split words at
    three syllables, and ``complex_word_count`` equals ``hard_word_count``.
    ``dc_difficult_pct`` and ``spache_unfamiliar_pct`` are percentages in
    [0, 100]; the Spache figure is over unique lowercased word types.
    """

    sentence_count: int
    word_count: int
    syllable_count: int
    character_count: int
    letter_count: int
    complex_word_count: int
    easy_word_count: int
    hard_word_count: int
    dc_difficult_count: int
    dc_difficult_pct: float
    spache_unfamiliar_pct: float
    sentence_word_counts: tuple[int, ...] = ()

    @property
    def words_per_sentence(self) -> float:
        return self.word_count / self.sentence_count

    @property
    def syllables_per_word(self) -> float:
        return self.syllable_count / self.word_count

    def invariant_violations(self) -> list[str]:
        """Names of the documented invariants this instance breaks (empty if none)."""
        bad = []
        if self.sentence_count < 1:
            bad.append("sentence_count >= 1")
        if self.word_count < 1:
            bad.append("word_count >= 1")
        if self.easy_word_count + self.hard_word_count != self.word_count:
            bad.append("E + H == W")
        if self.complex_word_count != self.hard_word_count:
            bad.append("complex == H")
        if not 0 <= self.dc_difficult_count <= self.word_count:
            bad.append("0 <= D <= W")
        if self.word_count and abs(self.dc_difficult_pct - 100 * self.dc_difficult_count / self.word_count) > 1e-9:
            bad.append("p == 100 D / W")
        if not 0 <= self.spache_unfamiliar_pct <= 100:
            bad.append("0 <= U <= 100")
        if self.syllable_count < self.word_count:
            bad.append("syllables >= W")
        if not 0 <= self.letter_count <= self.character_count:
            bad.append("0 <= letters <= characters")
        if self.sentence_word_counts and sum(self.sentence_word_counts) != self.word_count:
            bad.append("sum(sentence_word_counts) == W")
        return bad


def tokenize_words(sentence: str) -> list[str]:
    """Split into word tokens; punctuation is dropped, case is preserved."""
    return _TOKEN_RE.findall(sentence)


def _preceding_token(text: str, end: int) -> str:
    start = end
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    return text[start:end].lstrip(_OPENERS).lower()


def segment_sentences(text: str, abbreviations: Iterable[str] | None = None) -> list[str]:
    """Split ``text`` into sentences on ``.``, ``!`` and ``?``.

    A terminator only ends a sentence when followed by whitespace or the end of
    the text, so decimals such as ``3.14`` never split. A lone period after a
    listed abbreviation does not split either. Fragments without any word
    token are folded into the neighbouring sentence.
    """
    abbrevs = default_word_lists().abbreviation_list if abbreviations is None else frozenset(abbreviations)
    pieces: list[str] = []
    start = 0
    for m in _TERMINATOR_RE.finditer(text):
        end = m.end()
        if end < len(text) and not text[end].isspace():
            continue
        run = m.group().rstrip("\"'”’)]")
        if run == "." and _preceding_token(text, m.start()) in abbrevs:
            continue
        piece = text[start:end].strip()
        if piece:
            pieces.append(piece)
        start = end
    tail = text[start:].strip()
    if tail:
        pieces.append(tail)

    sentences: list[str] = []
    pending = ""
    for piece in pieces:
        if not _TOKEN_RE.search(piece):
            if sentences:
                sentences[-1] = f"{sentences[-1]} {piece}"
            else:
                pending = f"{pending} {piece}".strip()
            continue
        sentences.append(f"{pending} {piece}".strip() if pending else piece)
        pending = ""
    if not sentences:
        raise EmptyText("text contains no words")
    return sentences


def _fold(word: str) -> str:
    decomposed = unicodedata.normalize("NFKD", word.lower())
    return "".join(c for c in decomposed if "a" <= c <= "z")


def _count_part(part: str) -> int:
    groups = len(_GROUP_RE.findall(part))
    # Silent final e after a consonant, except consonant + "le" (table, little).
    if (
        len(part) > 2
        and part.endswith("e")
        and part[-2] not in _VOWELS
        and not (part.endswith("le") and part[-3] not in _VOWELS)
    ):
        groups -= 1
    return max(1, groups)


def count_syllables(word: str) -> int:
    """Heuristic syllable count: vowel groups over a, e, i, o, u, y.

    Hyphenated words are counted part by part. Raises NotAWord when the word
    has no letters.
    """
    parts = [_fold(p) for p in word.split("-")]
    parts = [p for p in parts if p]
    if not parts:
        raise NotAWord(f"{word!r} has no letters")
    return sum(_count_part(p) for p in parts)


def _lookup_key(token: str) -> str:
    return token.lower().replace("’", "'")


def is_familiar(token: str, words: frozenset[str]) -> bool:
    """Whether ``token`` counts as a listed word.

    Number-only tokens are always familiar. A hyphenated token is looked up
    whole and then by its parts; any part hit counts.
    """
    key = _lookup_key(token)
    if not any(c.isalpha() for c in key):
        return True
    if key in words:
        return True
    if "-" in key:
        return any(part in words for part in key.split("-") if part)
    return False


def _syllables(token: str) -> int:
    if not any(c.isalpha() for c in token):
        return 1
    return count_syllables(token)


def compute_text_stats(text: str, lists: WordLists | None = None) -> TextStats:
    lists = lists or default_word_lists()
    if not text or not text.strip():
        raise EmptyText("text is empty")
    sentences = segment_sentences(text, lists.abbreviation_list)

    per_sentence = []
    syllables = chars = letters = hard = difficult = 0
    types: set[str] = set()
    for sentence in sentences:
        tokens = tokenize_words(sentence)
        per_sentence.append(len(tokens))
        for tok in tokens:
            n = _syllables(tok)
            syllables += n
            if n >= 3:
                hard += 1
            for c in tok:
                if c.isalpha():
                    letters += 1
                    chars += 1
                elif c.isdigit():
                    chars += 1
            if not is_familiar(tok, lists.dale_chall_words):
                difficult += 1
            types.add(_lookup_key(tok))

    words = sum(per_sentence)
    unfamiliar = sum(1 for t in types if not is_familiar(t, lists.spache_words))
    return TextStats(
        sentence_count=len(sentences),
        word_count=words,
        syllable_count=syllables,
        character_count=chars,
        letter_count=letters,
        complex_word_count=hard,
        easy_word_count=words - hard,
        hard_word_count=hard,
        dc_difficult_count=difficult,
        dc_difficult_pct=100.0 * difficult / words,
        spache_unfamiliar_pct=100.0 * unfamiliar / len(types),
        sentence_word_counts=tuple(per_sentence),
    )
