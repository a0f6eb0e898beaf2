"""Readability formulas and the mapping from raw scores to grade bands."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from pathlib import Path
from types import MappingProxyType
from typing import Any, Mapping

from .errors import BadConfig, InvalidStats
from .textstats import TextStats, WordLists, compute_text_stats

__all__ = [
    "GradeBand",
    "MetricId",
    "INTEGRATED_METRICS",
    "BandTable",
    "BandMappingConfig",
    "MetricScore",
    "MetricReport",
    "fres",
    "fkgl",
    "coleman_liau",
    "linsear_write",
    "gunning_fog",
    "dale_chall",
    "spache",
    "ari",
    "FORMULAS",
    "map_to_band",
    "report_from_stats",
    "score_all",
]


class GradeBand(IntEnum):
    """Six school-level bands, ordered from easiest to hardest."""

    LOWER_ELEMENTARY = 1
    MIDDLE_ELEMENTARY = 2
    UPPER_ELEMENTARY = 3
    MIDDLE_SCHOOL = 4
    HIGH_SCHOOL = 5
    ADULT = 6

    @property
    def grades(self) -> tuple[int, ...]:
        """School grades in the band; the adult band lists only 13 (meaning 13+)."""
        return _BAND_GRADES[self]

    @property
    def label(self) -> str:
        return _BAND_LABELS[self]


_BAND_GRADES = {
    GradeBand.LOWER_ELEMENTARY: (1, 2),
    GradeBand.MIDDLE_ELEMENTARY: (3, 4),
    GradeBand.UPPER_ELEMENTARY: (5, 6),
    GradeBand.MIDDLE_SCHOOL: (7, 8, 9),
    GradeBand.HIGH_SCHOOL: (10, 11, 12),
    GradeBand.ADULT: (13,),
}
_BAND_LABELS = {
    GradeBand.LOWER_ELEMENTARY: "grades 1-2",
    GradeBand.MIDDLE_ELEMENTARY: "grades 3-4",
    GradeBand.UPPER_ELEMENTARY: "grades 5-6",
    GradeBand.MIDDLE_SCHOOL: "grades 7-9",
    GradeBand.HIGH_SCHOOL: "grades 10-12",
    GradeBand.ADULT: "grade 13+",
}


class MetricId(str, Enum):
    FRES = "FRES"
    FKGL = "FKGL"
    CLI = "CLI"
    LW = "LW"
    FOG = "FOG"
    DC = "DC"
    SPACHE = "SPACHE"
    ARI = "ARI"

    @property
    def held_out(self) -> bool:
        """ARI is reported but never votes."""
        return self is MetricId.ARI


INTEGRATED_METRICS: tuple[MetricId, ...] = tuple(m for m in MetricId if not m.held_out)


def _check(stats: TextStats, *, need_sentences: bool = True) -> None:
    if stats.word_count <= 0:
        raise InvalidStats("word_count must be positive")
    if need_sentences and stats.sentence_count <= 0:
        raise InvalidStats("sentence_count must be positive")


def fres(stats: TextStats) -> float:
    """Flesch Reading Ease; higher is easier."""
    _check(stats)
    return 206.835 - 1.015 * (stats.word_count / stats.sentence_count) - 84.6 * (
        stats.syllable_count / stats.word_count
    )


def fkgl(stats: TextStats) -> float:
    _check(stats)
    return 0.39 * (stats.word_count / stats.sentence_count) + 11.8 * (
        stats.syllable_count / stats.word_count
    ) - 15.59


def coleman_liau(stats: TextStats) -> float:
    _check(stats)
    letters_per_100 = 100.0 * stats.letter_count / stats.word_count
    sentences_per_100 = 100.0 * stats.sentence_count / stats.word_count
    return 0.0588 * letters_per_100 - 0.296 * sentences_per_100 - 15.8


def linsear_write(stats: TextStats) -> float:
    """Linsear Write over the whole text rather than a 100-word sample."""
    if stats.sentence_count <= 0:
        raise InvalidStats("sentence_count must be positive")
    i = (stats.easy_word_count + 3 * stats.hard_word_count) / stats.sentence_count
    return i / 2 if i > 20 else (i - 2) / 2


def gunning_fog(stats: TextStats) -> float:
    _check(stats)
    return 0.4 * (
        stats.word_count / stats.sentence_count + 100.0 * stats.complex_word_count / stats.word_count
    )


DALE_CHALL_ADJUSTMENT = 3.6365


def dale_chall(stats: TextStats) -> float:
    """Adjusted Dale-Chall score; the constant is added only when p > 5 (strict)."""
    _check(stats)
    p = stats.dc_difficult_pct
    raw = 0.1579 * p + 0.0496 * (stats.word_count / stats.sentence_count)
    return raw + DALE_CHALL_ADJUSTMENT if p > 5 else raw


def spache(stats: TextStats) -> float:
    _check(stats)
    return 0.141 * (stats.word_count / stats.sentence_count) + 0.086 * stats.spache_unfamiliar_pct + 0.839


def ari(stats: TextStats) -> float:
    _check(stats)
    return 4.71 * (stats.character_count / stats.word_count) + 0.5 * (
        stats.word_count / stats.sentence_count
    ) - 21.43


FORMULAS = MappingProxyType(
    {
        MetricId.FRES: fres,
        MetricId.FKGL: fkgl,
        MetricId.CLI: coleman_liau,
        MetricId.LW: linsear_write,
        MetricId.FOG: gunning_fog,
        MetricId.DC: dale_chall,
        MetricId.SPACHE: spache,
        MetricId.ARI: ari,
    }
)


@dataclass(frozen=True)
class BandTable:
    """Five cut points splitting the real line into six bands.

    ``ascending`` tables give harder bands to larger scores (grade-style
    metrics); descending tables (Flesch Reading Ease) list cuts from high to
    low. ``closed`` says which side of each interval owns its cut point,
    in raw-score terms: "right" means (lo, hi], "left" means [lo, hi).
    ``clamp`` optionally limits the raw score before lookup.
    """

    cuts: tuple[float, ...]
    ascending: bool = True
    closed: str = "right"
    clamp: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "cuts", tuple(float(c) for c in self.cuts))
        if len(self.cuts) != len(GradeBand) - 1:
            raise BadConfig(f"need {len(GradeBand) - 1} cut points, got {len(self.cuts)}")
        if not all(math.isfinite(c) for c in self.cuts):
            raise BadConfig("cut points must be finite")
        pairs = zip(self.cuts, self.cuts[1:])
        if self.ascending and not all(a < b for a, b in pairs):
            raise BadConfig(f"cut points must be strictly increasing: {self.cuts}")
        if not self.ascending and not all(a > b for a, b in pairs):
            raise BadConfig(f"cut points must be strictly decreasing: {self.cuts}")
        if self.closed not in ("left", "right"):
            raise BadConfig(f"closed must be 'left' or 'right', not {self.closed!r}")
        if self.clamp is not None:
            lo, hi = (float(v) for v in self.clamp)
            if not lo < hi:
                raise BadConfig(f"bad clamp range {self.clamp}")
            object.__setattr__(self, "clamp", (lo, hi))

    def band(self, raw: float) -> GradeBand:
        if math.isnan(raw):
            raise ValueError("cannot map NaN to a band")
        if self.clamp is not None:
            raw = min(max(raw, self.clamp[0]), self.clamp[1])
        if self.ascending:
            if self.closed == "right":
                above = sum(1 for c in self.cuts if c < raw)
            else:
                above = sum(1 for c in self.cuts if c <= raw)
        elif self.closed == "left":
            above = sum(1 for c in self.cuts if c > raw)
        else:
            above = sum(1 for c in self.cuts if c >= raw)
        return GradeBand(1 + above)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "cuts": list(self.cuts),
            "direction": "ascending" if self.ascending else "descending",
            "closed": self.closed,
        }
        if self.clamp is not None:
            out["clamp"] = list(self.clamp)
        return out

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "BandTable":
        try:
            direction = data.get("direction", "ascending")
            if direction not in ("ascending", "descending"):
                raise BadConfig(f"direction must be ascending or descending, not {direction!r}")
            clamp = data.get("clamp")
            return cls(
                cuts=tuple(data["cuts"]),
                ascending=direction == "ascending",
                closed=data.get("closed", "right"),
                clamp=tuple(clamp) if clamp is not None else None,
            )
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, BadConfig):
                raise
            raise BadConfig(f"bad band table {dict(data)!r}: {exc}") from exc


GRADE_TABLE = BandTable(cuts=(2.5, 4.5, 6.5, 9.5, 12.5), ascending=True, closed="right", clamp=(1.0, 13.0))
FRES_TABLE = BandTable(cuts=(100.0, 90.0, 80.0, 60.0, 50.0), ascending=False, closed="left")
DALE_CHALL_TABLE = BandTable(cuts=(4.0, 5.0, 6.0, 7.5, 9.0), ascending=True, closed="left")


def _default_tables() -> dict[MetricId, BandTable]:
    tables = {m: GRADE_TABLE for m in MetricId}
    tables[MetricId.FRES] = FRES_TABLE
    tables[MetricId.DC] = DALE_CHALL_TABLE
    return tables


@dataclass(frozen=True)
class BandMappingConfig:
    """Per-metric band tables. Every metric must have one."""

    tables: Mapping[MetricId, BandTable] = field(default_factory=_default_tables)

    def __post_init__(self) -> None:
        tables = {MetricId(k): v for k, v in self.tables.items()}
        missing = [m.value for m in MetricId if m not in tables]
        if missing:
            raise BadConfig(f"no band table for {', '.join(missing)}")
        object.__setattr__(self, "tables", tables)

    @classmethod
    def default(cls) -> "BandMappingConfig":
        return cls()

    def to_dict(self) -> dict[str, Any]:
        return {"metrics": {m.value: self.tables[m].to_dict() for m in MetricId}}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "BandMappingConfig":
        """Build from ``{"metrics": {"FKGL": {...}, ...}}``; unlisted metrics keep defaults."""
        overrides = data.get("metrics", {})
        if not isinstance(overrides, Mapping):
            raise BadConfig("'metrics' must be an object")
        tables = _default_tables()
        for name, table in overrides.items():
            try:
                metric = MetricId(name)
            except ValueError:
                raise BadConfig(f"unknown metric {name!r}") from None
            tables[metric] = BandTable.from_dict(table)
        return cls(tables)

    @classmethod
    def from_file(cls, path: str | Path) -> "BandMappingConfig":
        with open(path, encoding="utf-8") as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise BadConfig(f"{path}: {exc}") from exc
        section = data.get("band_mapping", data)
        return cls.from_dict(section)


def map_to_band(metric: MetricId | str, raw: float, cfg: BandMappingConfig | None = None) -> GradeBand:
    cfg = cfg or _DEFAULT_CONFIG
    return cfg.tables[MetricId(metric)].band(raw)


_DEFAULT_CONFIG = BandMappingConfig()


@dataclass(frozen=True)
class MetricScore:
    metric: MetricId
    raw: float
    band: GradeBand


@dataclass(frozen=True)
class MetricReport:
    scores: Mapping[MetricId, MetricScore]
    stats: TextStats

    def raw(self, metric: MetricId | str) -> float:
        return self.scores[MetricId(metric)].raw

    def band(self, metric: MetricId | str) -> GradeBand:
        return self.scores[MetricId(metric)].band

    def bands(self) -> dict[MetricId, GradeBand]:
        return {m: s.band for m, s in self.scores.items()}

    def raw_scores(self) -> dict[str, float]:
        return {m.value: s.raw for m, s in self.scores.items()}


def report_from_stats(stats: TextStats, cfg: BandMappingConfig | None = None) -> MetricReport:
    cfg = cfg or _DEFAULT_CONFIG
    scores = {}
    for metric, formula in FORMULAS.items():
        raw = formula(stats)
        scores[metric] = MetricScore(metric, raw, cfg.tables[metric].band(raw))
    return MetricReport(scores, stats)


def score_all(text: str, lists: WordLists | None = None, cfg: BandMappingConfig | None = None) -> MetricReport:
    """Compute all eight metrics from one shared :class:`TextStats`."""
    return report_from_stats(compute_text_stats(text, lists), cfg)
