"""Group voting that fuses the seven metric bands into one grade band.

The seven metrics are split into three groups: word-list metrics (Dale-Chall,
Spache), sentence/word-length metrics (FRES, FKGL, Coleman-Liau) and
syllable metrics (Linsear Write, Gunning Fog). A group votes for the band its
members share, or for the easiest member band when they disagree. Two or
more matching votes win outright; otherwise the middle vote is taken.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from .errors import BadGrade, MissingMetric, WrongArity
from .metrics import GradeBand, MetricId, MetricReport

__all__ = ["MetricGroup", "IntegrationResult", "group_vote", "integrate", "band_of_grade"]


class MetricGroup(Enum):
    G1 = (MetricId.DC, MetricId.SPACHE)
    G2 = (MetricId.FRES, MetricId.FKGL, MetricId.CLI)
    G3 = (MetricId.LW, MetricId.FOG)

    @property
    def members(self) -> tuple[MetricId, ...]:
        return self.value


@dataclass(frozen=True)
class IntegrationResult:
    group_votes: Mapping[MetricGroup, GradeBand]
    final: GradeBand
    decided_by: str  # "unanimous" | "mode" | "median"

    def votes(self) -> list[int]:
        return [int(self.group_votes[g]) for g in MetricGroup]


# Enum attribute access is slow in tight loops; resolve it once.
_GROUPS = tuple((g, g.value) for g in MetricGroup)
_GROUP_SIZE = {g: len(members) for g, members in _GROUPS}
_BANDS = {int(b): b for b in GradeBand}


def group_vote(bands: Sequence[GradeBand | int], group: MetricGroup | None = None) -> GradeBand:
    """Shared band when all members agree, else the lowest member band."""
    expected = (_GROUP_SIZE[group],) if group is not None else (2, 3)
    if len(bands) not in expected:
        raise WrongArity(f"expected {' or '.join(map(str, expected))} bands, got {len(bands)}")
    # The shared band of an agreeing group is also its minimum.
    return _BANDS[min(int(b) for b in bands)]


def integrate(report: MetricReport | Mapping[MetricId, GradeBand | int]) -> IntegrationResult:
    bands = report.bands() if isinstance(report, MetricReport) else report
    votes = {}
    for group, metrics in _GROUPS:
        try:
            members = [bands[m] for m in metrics]
        except KeyError as exc:
            raise MissingMetric(f"no band for {exc.args[0]}") from None
        votes[group] = group_vote(members, group)

    a, b, c = votes.values()
    if a == b == c:
        return IntegrationResult(votes, a, "unanimous")
    if a == b or a == c:
        return IntegrationResult(votes, a, "mode")
    if b == c:
        return IntegrationResult(votes, b, "mode")
    return IntegrationResult(votes, sorted((a, b, c))[1], "median")


def band_of_grade(grade: int) -> GradeBand:
    """Band containing a school grade; any grade of 13 or more is adult."""
    if isinstance(grade, bool) or int(grade) != grade or grade < 1:
        raise BadGrade(f"grade must be an integer >= 1, got {grade!r}")
    if grade >= 13:
        return GradeBand.ADULT
    for band in GradeBand:
        if grade in band.grades:
            return band
    raise AssertionError("unreachable")
