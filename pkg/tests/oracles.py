"""Independent reference implementations used to check the library."""

from __future__ import annotations

import statistics
from collections import Counter
from itertools import combinations

GROUPS = {"G1": ("DC", "SPACHE"), "G2": ("FRES", "FKGL", "CLI"), "G3": ("LW", "FOG")}
METRIC_ORDER = ("DC", "SPACHE", "FRES", "FKGL", "CLI", "LW", "FOG")


def fuse(bands: dict[str, int]) -> tuple[tuple[int, int, int], int]:
    """Group votes by set intersection (falling back to the minimum), then mode or median."""
    votes = []
    for members in GROUPS.values():
        common = set.intersection(*({bands[m]} for m in members))
        votes.append(common.pop() if common else min(bands[m] for m in members))
    top, n = Counter(votes).most_common(1)[0]
    final = top if n >= 2 else int(statistics.median(votes))
    return tuple(votes), final


def tau_by_pairs(ranking: list[int]) -> float:
    pairs = list(combinations(range(len(ranking)), 2))
    score = sum(1 if ranking[i] < ranking[j] else -1 for i, j in pairs)
    return score / len(pairs)
