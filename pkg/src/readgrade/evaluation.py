"""Evaluation of classified model outputs and of survey responses."""

from __future__ import annotations

import csv
import math
import statistics
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

from .errors import DimensionMismatch, EmptyCorpus, NoData, NotAPermutation, ProviderError
from .metrics import INTEGRATED_METRICS, BandMappingConfig, GradeBand, MetricId, map_to_band
from .providers import Embedder, LogprobProvider
from .textstats import WordLists, default_word_lists, segment_sentences, tokenize_words

__all__ = [
    "EvalItem",
    "ConfusionMatrix",
    "EvalReport",
    "target_success",
    "confusion_matrix",
    "mean_ari_level",
    "per_metric_mean_band",
    "build_eval_report",
    "kendall_tau",
    "l1_rank_distance",
    "mean_l1_by_position",
    "SurveyTauSummary",
    "survey_tau",
    "rating_summary",
    "diversity_gain",
    "perplexity",
    "SentenceLengthHistogram",
    "sentence_length_distribution",
    "word_counts",
    "zipf_frequency_table",
]

BANDS = tuple(int(b) for b in GradeBand)


@dataclass(frozen=True)
class EvalItem:
    """One model output: the band it aimed for and what it was classified as."""

    target_band: int
    final_band: int
    ari: float | None = None
    metric_bands: Mapping[str, int] = field(default_factory=dict)

    @classmethod
    def from_classified(cls, row: Mapping[str, Any], target_band: int | None = None) -> "EvalItem":
        target = target_band if target_band is not None else row.get("target_band")
        if target is None:
            raise NoData(message=f"record {row.get('id')!r} has no target band")
        return cls(
            target_band=int(GradeBand(int(target))),
            final_band=int(GradeBand(int(row["band"]))),
            ari=row.get("ari"),
            metric_bands=dict(row.get("metric_bands", {})),
        )


def _pairs(items: Iterable[EvalItem | tuple[int, int]]) -> list[tuple[int, int]]:
    out = []
    for it in items:
        if isinstance(it, EvalItem):
            out.append((it.target_band, it.final_band))
        else:
            t, f = it
            out.append((int(t), int(f)))
    return out


def target_success(
    classified: Iterable[EvalItem | tuple[int, int]], bands: Iterable[int] | None = None
) -> dict[int, float]:
    """Percentage of outputs per target band whose final band equals the target.

    Without ``bands``, every band that appears as a target is reported.
    Requesting a band with no outputs raises :class:`NoData`.
    """
    hits: Counter[int] = Counter()
    totals: Counter[int] = Counter()
    for target, final in _pairs(classified):
        totals[target] += 1
        hits[target] += target == final
    wanted = sorted(totals) if bands is None else [int(b) for b in bands]
    if not wanted:
        raise NoData(message="no classified outputs")
    out = {}
    for b in wanted:
        if not totals[b]:
            raise NoData(b)
        out[b] = 100.0 * hits[b] / totals[b]
    return out


@dataclass(frozen=True)
class ConfusionMatrix:
    """6x6 counts; rows are targeted bands, columns classified bands."""

    counts: tuple[tuple[int, ...], ...]

    def row_total(self, band: int) -> int:
        return sum(self.counts[band - 1])

    def normalized(self) -> list[list[float]]:
        """Row percentages; all-zero rows stay zero."""
        out = []
        for row in self.counts:
            total = sum(row)
            out.append([100.0 * c / total if total else 0.0 for c in row])
        return out

    def to_csv(self, path: str | Path, normalized: bool = False) -> None:
        rows = self.normalized() if normalized else self.counts
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["target_band"] + [f"classified_{b}" for b in BANDS])
            for b, row in zip(BANDS, rows):
                w.writerow([b, *row])


def confusion_matrix(classified: Iterable[EvalItem | tuple[int, int]]) -> ConfusionMatrix:
    grid = [[0] * len(BANDS) for _ in BANDS]
    for target, final in _pairs(classified):
        grid[int(GradeBand(target)) - 1][int(GradeBand(final)) - 1] += 1
    return ConfusionMatrix(tuple(tuple(r) for r in grid))


def mean_ari_level(
    classified: Iterable[EvalItem | tuple[int, float]], cfg: BandMappingConfig | None = None
) -> dict[int, tuple[float, int]]:
    """Mean raw ARI per target band and the band that mean maps to."""
    raws: dict[int, list[float]] = defaultdict(list)
    for it in classified:
        if isinstance(it, EvalItem):
            if it.ari is None:
                raise NoData(it.target_band, "item has no raw ARI")
            raws[it.target_band].append(float(it.ari))
        else:
            raws[int(it[0])].append(float(it[1]))
    if not raws:
        raise NoData(message="no ARI values")
    out = {}
    for b in sorted(raws):
        mean = statistics.fmean(raws[b])
        out[b] = (mean, int(map_to_band(MetricId.ARI, mean, cfg)))
    return out


def per_metric_mean_band(classified: Iterable[EvalItem]) -> dict[int, dict[str, float]]:
    """Mean band index of each of the seven voting metrics, per target band."""
    sums: dict[int, dict[str, list[int]]] = defaultdict(lambda: defaultdict(list))
    for it in classified:
        for m in INTEGRATED_METRICS:
            if m.value not in it.metric_bands:
                raise NoData(it.target_band, f"item lacks a band for {m.value}")
            sums[it.target_band][m.value].append(int(it.metric_bands[m.value]))
    if not sums:
        raise NoData(message="no classified outputs")
    return {b: {m.value: statistics.fmean(sums[b][m.value]) for m in INTEGRATED_METRICS} for b in sorted(sums)}


@dataclass
class EvalReport:
    target_pct: dict[int, float]
    confusion: ConfusionMatrix
    ari: dict[int, tuple[float, int]]
    per_metric_mean_band: dict[int, dict[str, float]]
    counts: dict[int, int]

    def to_dict(self) -> dict[str, Any]:
        return {
            "target_pct": {str(b): v for b, v in self.target_pct.items()},
            "counts": {str(b): v for b, v in self.counts.items()},
            "confusion": [list(r) for r in self.confusion.counts],
            "confusion_pct": self.confusion.normalized(),
            "ari_mean": {str(b): m for b, (m, _) in self.ari.items()},
            "ari_level": {str(b): lvl for b, (_, lvl) in self.ari.items()},
            "per_metric_mean_band": {str(b): v for b, v in self.per_metric_mean_band.items()},
        }

    def table_rows(self) -> list[dict[str, Any]]:
        """One row per target band: Target % next to the ARI level."""
        return [
            {"target_band": b, "target_pct": self.target_pct[b], "ari_mean": self.ari[b][0], "ari_level": self.ari[b][1]}
            for b in self.target_pct
        ]


def build_eval_report(items: Sequence[EvalItem], cfg: BandMappingConfig | None = None) -> EvalReport:
    if not items:
        raise NoData(message="no classified outputs")
    counts = Counter(it.target_band for it in items)
    return EvalReport(
        target_pct=target_success(items),
        confusion=confusion_matrix(items),
        ari=mean_ari_level(items, cfg),
        per_metric_mean_band=per_metric_mean_band(items),
        counts=dict(sorted(counts.items())),
    )


def _check_permutation(ranking: Sequence[int]) -> list[int]:
    r = list(ranking)
    if sorted(r) != list(range(1, len(r) + 1)) or len(r) < 2:
        raise NotAPermutation(f"{ranking!r} is not a permutation of 1..n (n >= 2)")
    return r


def _concordance(ranking: Sequence[int]) -> tuple[int, int]:
    r = _check_permutation(ranking)
    concordant = discordant = 0
    for i, j in combinations(range(len(r)), 2):
        # Ground truth ranks position i below position j.
        if r[i] < r[j]:
            concordant += 1
        else:
            discordant += 1
    return concordant, discordant


def kendall_tau(ranking: Sequence[int]) -> float:
    """Kendall's tau between a ranking and the identity; rankings have no ties."""
    c, d = _concordance(ranking)
    return (c - d) / (c + d)


def l1_rank_distance(ranking: Sequence[int]) -> list[int]:
    r = _check_permutation(ranking)
    return [abs(rank - pos) for pos, rank in enumerate(r, 1)]


def mean_l1_by_position(rankings: Iterable[Sequence[int]]) -> list[float]:
    dists = [l1_rank_distance(r) for r in rankings]
    if not dists:
        raise NoData(message="no rankings")
    if len({len(d) for d in dists}) != 1:
        raise NotAPermutation("rankings differ in length")
    return [statistics.fmean(col) for col in zip(*dists)]


@dataclass(frozen=True)
class SurveyTauSummary:
    per_observation_mean: float
    per_rater_mean: float
    pooled: float
    n_observations: int
    n_raters: int
    l1_by_position: list[float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "tau_per_observation_mean": self.per_observation_mean,
            "tau_per_rater_mean": self.per_rater_mean,
            "tau_pooled": self.pooled,
            "n_observations": self.n_observations,
            "n_raters": self.n_raters,
            "l1_by_position": self.l1_by_position,
        }


def survey_tau(observations: Iterable[tuple[str, Sequence[int]]]) -> SurveyTauSummary:
    """Summarise ranking observations given as ``(rater_id, ranking)``.

    Reports tau three ways: the mean over observations, the mean over raters
    (each rater's pairs pooled first) and one pool over every pair judgment.
    """
    obs = [(str(rater), list(r)) for rater, r in observations]
    if not obs:
        raise NoData(message="no ranking observations")
    per_rater: dict[str, list[int]] = defaultdict(lambda: [0, 0])
    taus = []
    for rater, ranking in obs:
        c, d = _concordance(ranking)
        taus.append((c - d) / (c + d))
        per_rater[rater][0] += c
        per_rater[rater][1] += d
    total_c = sum(c for c, _ in per_rater.values())
    total_d = sum(d for _, d in per_rater.values())
    return SurveyTauSummary(
        per_observation_mean=statistics.fmean(taus),
        per_rater_mean=statistics.fmean((c - d) / (c + d) for c, d in per_rater.values()),
        pooled=(total_c - total_d) / (total_c + total_d),
        n_observations=len(obs),
        n_raters=len(per_rater),
        l1_by_position=mean_l1_by_position(r for _, r in obs),
    )


def read_rankings_csv(path: str | Path) -> list[tuple[str, list[int]]]:
    """Read ``rater_id, [item_id,] position, assigned_rank`` rows into rankings."""
    groups: dict[tuple[str, str], dict[int, int]] = defaultdict(dict)
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            key = (row["rater_id"], row.get("item_id") or "")
            groups[key][int(row["position"])] = int(row["assigned_rank"])
    out = []
    for (rater, _), by_pos in groups.items():
        if sorted(by_pos) != list(range(1, len(by_pos) + 1)):
            raise NotAPermutation(f"rater {rater}: positions {sorted(by_pos)} are not 1..n")
        out.append((rater, [by_pos[p] for p in sorted(by_pos)]))
    return out


def _quartiles(values: Sequence[float]) -> tuple[float, float, float]:
    if len(values) == 1:
        return values[0], values[0], values[0]
    q1, q2, q3 = statistics.quantiles(values, n=4, method="inclusive")
    return q1, q2, q3


def rating_summary(rows: Iterable[Mapping[str, Any]]) -> list[dict[str, Any]]:
    """Box-plot statistics of five-point q1/q2/q3 ratings per band.

    Each input row needs ``band`` and any of ``q1``, ``q2``, ``q3``.
    """
    values: dict[tuple[int, str], list[float]] = defaultdict(list)
    for row in rows:
        band = int(row["band"])
        for q in ("q1", "q2", "q3"):
            v = row.get(q)
            if v not in (None, ""):
                values[(band, q)].append(float(v))
    if not values:
        raise NoData(message="no ratings")
    out = []
    for (band, q), vals in sorted(values.items()):
        lo, med, hi = _quartiles(vals)
        out.append(
            {
                "band": band,
                "question": q,
                "n": len(vals),
                "mean": statistics.fmean(vals),
                "median": med,
                "q1": lo,
                "q3": hi,
                "min": min(vals),
                "max": max(vals),
            }
        )
    return out


def diversity_gain(base_texts: Sequence[str], new_texts: Sequence[str], embedder: Embedder) -> float:
    """Mean distance from each new text to its nearest base text in embedding space."""
    if not base_texts or not new_texts:
        raise EmptyCorpus("diversity gain needs at least one base and one new text")
    base = embedder.embed(list(base_texts))
    new = embedder.embed(list(new_texts))
    if len(base) != len(base_texts) or len(new) != len(new_texts):
        raise ProviderError("embedder returned the wrong number of vectors")
    dims = {len(v) for v in base} | {len(v) for v in new}
    if len(dims) != 1:
        raise DimensionMismatch(f"embeddings have differing dimensions {sorted(dims)}")
    total = 0.0
    for x in new:
        total += min(math.dist(x, y) for y in base)
    return total / len(new)


def perplexity(texts: Sequence[str], provider: LogprobProvider) -> float:
    """exp of the negative mean token log-probability, pooled over all texts."""
    total = 0.0
    n = 0
    for text in texts:
        for lp in provider.token_logprobs(text):
            lp = float(lp)
            if lp > 0 or math.isnan(lp):
                raise ProviderError(f"log-probability must be <= 0, got {lp}")
            total += lp
            n += 1
    if n == 0:
        raise EmptyCorpus("no tokens to score")
    return math.exp(-total / n)


@dataclass(frozen=True)
class SentenceLengthHistogram:
    counts: dict[int, int]
    mean: float
    median: float

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def to_dict(self) -> dict[str, Any]:
        return {"counts": {str(k): v for k, v in self.counts.items()}, "mean": self.mean, "median": self.median, "total": self.total}


def sentence_length_distribution(texts: Sequence[str], lists: WordLists | None = None) -> SentenceLengthHistogram:
    """Histogram of words per sentence over a corpus."""
    abbrevs = (lists or default_word_lists()).abbreviation_list
    lengths = []
    for text in texts:
        if not text.strip():
            continue
        lengths.extend(len(tokenize_words(s)) for s in segment_sentences(text, abbrevs))
    if not lengths:
        raise EmptyCorpus("no sentences")
    return SentenceLengthHistogram(dict(sorted(Counter(lengths).items())), statistics.fmean(lengths), statistics.median(lengths))


def word_counts(texts: Iterable[str]) -> Counter[str]:
    counts: Counter[str] = Counter()
    for text in texts:
        counts.update(t.lower() for t in tokenize_words(text))
    return counts


def zipf_frequency_table(texts: Iterable[str], min_count: int = 1) -> list[tuple[str, int]]:
    """Lowercased word counts, most frequent first (ties alphabetical), dropping words below ``min_count``."""
    counts = word_counts(texts)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [(w, c) for w, c in ranked if c >= min_count]
