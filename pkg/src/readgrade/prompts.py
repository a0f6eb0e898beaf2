"""Answer-generation prompt expansion and question-generation prompts."""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any

from .errors import EmptyQuestion
from .metrics import GradeBand

__all__ = [
    "GRADE_LABELS",
    "LENGTH_CAPS",
    "DIFFICULTY_BY_BAND",
    "ANSWER_TEMPLATE",
    "GenerationPrompt",
    "expand_prompts",
    "band_for_prompt",
    "load_taxonomy",
    "question_generation_prompts",
]

GRADE_LABELS: dict[GradeBand, str] = {
    GradeBand.LOWER_ELEMENTARY: "elementary school 1st grade",
    GradeBand.MIDDLE_ELEMENTARY: "elementary school 3rd grade",
    GradeBand.UPPER_ELEMENTARY: "elementary school 5th grade",
    GradeBand.MIDDLE_SCHOOL: "middle school 7th grade",
    GradeBand.HIGH_SCHOOL: "high school 10th grade",
    GradeBand.ADULT: "college",
}
LENGTH_CAPS: tuple[int, ...] = (4, 5, 6, 7, 8, 10, 12, 15, 20)
DIFFICULTY_BY_BAND: dict[GradeBand, str] = {
    GradeBand.LOWER_ELEMENTARY: "very easy",
    GradeBand.MIDDLE_ELEMENTARY: "very easy",
    GradeBand.UPPER_ELEMENTARY: "fairly easy",
    GradeBand.MIDDLE_SCHOOL: "fairly easy",
    GradeBand.HIGH_SCHOOL: "fairly difficult",
    GradeBand.ADULT: "fairly difficult",
}

ANSWER_TEMPLATE = (
    "Please provide the explanation in plain text with no bullet points using "
    "{difficulty} words that {grade} students will know. Answer in detail with "
    "at a maximum of {cap} words per sentence."
)


@dataclass(frozen=True)
class GenerationPrompt:
    question: str
    band: GradeBand
    grade_label: str
    max_words_per_sentence: int
    difficulty_phrase: str
    rendered_text: str

    @property
    def key(self) -> str:
        return f"b{int(self.band)}-w{self.max_words_per_sentence}"

    def message(self) -> str:
        """Full text sent to a provider: the question followed by the instruction."""
        return f"{self.question}\n\n{self.rendered_text}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "question": self.question,
            "band": int(self.band),
            "grade_label": self.grade_label,
            "max_words_per_sentence": self.max_words_per_sentence,
            "difficulty_phrase": self.difficulty_phrase,
            "rendered_text": self.rendered_text,
        }


def expand_prompts(question: str) -> list[GenerationPrompt]:
    """All 6 x 9 grade/length variants for one question, band-major order."""
    question = question.strip() if question else ""
    if not question:
        raise EmptyQuestion("question is empty")
    out = []
    for band, label in GRADE_LABELS.items():
        difficulty = DIFFICULTY_BY_BAND[band]
        for cap in LENGTH_CAPS:
            text = ANSWER_TEMPLATE.format(difficulty=difficulty, grade=label, cap=cap)
            out.append(GenerationPrompt(question, band, label, cap, difficulty, text))
    return out


def band_for_prompt(prompt: str) -> GradeBand | None:
    """Recover the targeted band from a rendered prompt, if it names one."""
    for band, label in GRADE_LABELS.items():
        if f"words that {label} students" in prompt:
            return band
    return None


def load_taxonomy(path: str | Path | None = None) -> dict[str, list[str]]:
    """Field name to subject list; the bundled file is used when ``path`` is None."""
    if path is None:
        text = (resources.files("readgrade") / "data" / "subjects.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    data = json.loads(text)
    return {field: list(subjects) for field, subjects in data["fields"].items()}


QUESTION_TEMPLATE = (
    "Write {n} questions about {subject} (field: {field}). Each question must be "
    "answerable at every level from first grade to college, so avoid questions that "
    "only an expert could answer. Return one question per line.\n"
    "{examples}"
)


def question_generation_prompts(
    taxonomy: dict[str, list[str]] | None = None,
    n: int = 10,
    examples: dict[str, list[str]] | None = None,
) -> list[dict[str, str]]:
    """One prompt per subject, optionally with few-shot example questions."""
    taxonomy = taxonomy if taxonomy is not None else load_taxonomy()
    out = []
    for field, subjects in taxonomy.items():
        for subject in subjects:
            shots = (examples or {}).get(subject, [])
            shot_text = "".join(f"Example: {q}\n" for q in shots)
            out.append(
                {
                    "field": field,
                    "subject": subject,
                    "prompt": QUESTION_TEMPLATE.format(n=n, subject=subject, field=field, examples=shot_text),
                }
            )
    return out
