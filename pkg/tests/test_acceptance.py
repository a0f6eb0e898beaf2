"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run under pytest (lines appear in the terminal summary) or directly with
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
import statistics
import sys
import time
from dataclasses import replace
from itertools import product
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from oracles import METRIC_ORDER, fuse  # noqa: E402
from readgrade.corpus import CorpusRecord, classify_records, load_records, partition_corpus, write_jsonl  # noqa: E402
from readgrade.evaluation import diversity_gain, kendall_tau, l1_rank_distance, perplexity  # noqa: E402
from readgrade.integration import integrate  # noqa: E402
from readgrade.metrics import (  # noqa: E402
    FORMULAS,
    INTEGRATED_METRICS,
    GradeBand,
    MetricId,
    dale_chall,
    score_all,
)
from readgrade.prompts import GRADE_LABELS, expand_prompts  # noqa: E402
from readgrade.providers import FunctionEmbedder, HashedBowEmbedder  # noqa: E402
from readgrade.synthetic import synthetic_text  # noqa: E402
from readgrade.textstats import TextStats, compute_text_stats, default_word_lists  # noqa: E402

RESULTS: list[str] = []


def report(number: int, name: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def stats_of(S, W, syll, letters, chars=None, hard=0, d=0, u=0.0) -> TextStats:
    return TextStats(
        sentence_count=S,
        word_count=W,
        syllable_count=syll,
        character_count=letters if chars is None else chars,
        letter_count=letters,
        complex_word_count=hard,
        easy_word_count=W - hard,
        hard_word_count=hard,
        dc_difficult_count=d,
        dc_difficult_pct=100.0 * d / W,
        spache_unfamiliar_pct=u,
    )


# Expected values exactly as stated for the fixture sentence. The CLI figure
# is the repeating decimal -4.07333...; the ARI figure is taken verbatim.
FORMULA_FIXTURE = {
    MetricId.FRES: 116.145,
    MetricId.FKGL: -1.45,
    MetricId.CLI: -4.0733333333333333,
    MetricId.FOG: 2.4,
    MetricId.ARI: -5.0875,
    MetricId.LW: 2.0,
    MetricId.SPACHE: 1.685,
    MetricId.DC: 0.2976,
}


def test_criterion_1_formula_suite():
    start = time.perf_counter()
    stats = stats_of(S=1, W=6, syll=6, letters=17)
    text_stats = compute_text_stats("The cat sat on the mat.", default_word_lists())
    got = {m: FORMULAS[m](stats) for m in FORMULA_FIXTURE}
    elapsed = time.perf_counter() - start
    same_counts = (text_stats.sentence_count, text_stats.word_count, text_stats.syllable_count, text_stats.letter_count) == (1, 6, 6, 17)
    misses = {m.value: (got[m], want) for m, want in FORMULA_FIXTURE.items() if abs(got[m] - want) > 1e-6}
    detail = f"{elapsed * 1000:.1f} ms; " + ("all within 1e-6" if not misses else "off: " + ", ".join(f"{k} got {g:.6f} want {w}" for k, (g, w) in misses.items()))
    report(1, "formula suite", not misses and same_counts and elapsed < 1.0, detail)


def test_criterion_2_integration_oracle():
    start = time.perf_counter()
    mismatches = violations = 0
    ids = [MetricId(m) for m in METRIC_ORDER]
    for values in product(range(1, 7), repeat=7):
        res = integrate(dict(zip(ids, values)))
        votes = res.votes()
        if (tuple(votes), int(res.final)) != fuse(dict(zip(METRIC_ORDER, values))):
            mismatches += 1
        if res.final not in votes:
            violations += 1
        if len(set(values)) == 1 and (res.final != values[0] or res.decided_by != "unanimous"):
            violations += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and violations == 0 and elapsed < 10.0
    report(2, "exhaustive integration oracle", ok, f"6^7 cases, {mismatches} mismatches, {violations} property violations, {elapsed:.2f} s")


def test_criterion_3_survey_example():
    l1 = l1_rank_distance([6, 5, 4, 3, 2, 1])
    ident = kendall_tau([1, 2, 3, 4, 5, 6])
    rev = kendall_tau([6, 5, 4, 3, 2, 1])
    ok = l1 == [5, 3, 1, 1, 3, 5] and ident == 1.0 and rev == -1.0
    report(3, "survey ranking example", ok, f"L1={l1}, tau(identity)={ident}, tau(reversal)={rev}")


def test_criterion_4_prompt_expansion():
    prompts = expand_prompts("Why is the sky blue?")
    caps = {p.max_words_per_sentence for p in prompts}
    labels = {p.grade_label for p in prompts}
    distinct = len({p.message() for p in prompts})
    ok = len(prompts) == 54 and distinct == 54 and caps == {4, 5, 6, 7, 8, 10, 12, 15, 20} and labels == set(GRADE_LABELS.values()) and len(labels) == 6
    report(4, "prompt expansion", ok, f"{len(prompts)} prompts, {distinct} distinct, caps={sorted(caps)}, {len(labels)} grade labels")


class UniformLogprobs:
    def token_logprobs(self, text):
        return [math.log(0.25)] * len(text.split())


def test_criterion_5_diversity_and_perplexity():
    texts = ["The cat sat on the mat.", "Rivers carry water to the sea.", "Light bends in glass."]
    self_gain = max(
        diversity_gain(texts, texts, emb)
        for emb in (HashedBowEmbedder(), FunctionEmbedder(lambda t: [len(t), t.count(" ")]))
    )
    scalar = diversity_gain(["0", "10"], ["1", "4"], FunctionEmbedder(lambda t: [float(t)]))
    ppl = perplexity(["a b c d", "e f g"], UniformLogprobs())
    ok = self_gain == 0.0 and abs(scalar - 2.5) <= 1e-9 and abs(ppl - 4.0) <= 1e-9
    report(5, "diversity gain and perplexity", ok, f"self gain={self_gain}, scalar={scalar}, perplexity={ppl!r}")


def _digest(directory: Path) -> str:
    h = hashlib.sha256()
    for p in sorted(directory.iterdir()):
        h.update(p.name.encode())
        h.update(p.read_bytes())
    return h.hexdigest()


def _run_pipeline(src: Path, out: Path, jobs: int) -> tuple[float, dict[int, int], str, int]:
    start = time.perf_counter()
    classified = classify_records(load_records(src), default_word_lists(), jobs=jobs)
    summary = partition_corpus(classified, out)
    elapsed = time.perf_counter() - start
    lines = sum(len(p.read_text(encoding="utf-8").splitlines()) for p in out.iterdir())
    return elapsed, summary.counts, _digest(out), lines


def test_criterion_6_pipeline_conservation(tmp_path):
    n = 10_000
    rng = random.Random(2024)
    src = tmp_path / "corpus.jsonl"
    write_jsonl(
        src,
        (
            CorpusRecord(f"r{i:05d}", "Why is the sky blue?", synthetic_text(1 + i % 6, rng, sentences=3)).to_dict()
            for i in range(n)
        ),
    )
    t1, counts1, dig1, lines1 = _run_pipeline(src, tmp_path / "a", jobs=1)
    _, counts2, dig2, lines2 = _run_pipeline(src, tmp_path / "b", jobs=1)
    _, counts4, dig4, lines4 = _run_pipeline(src, tmp_path / "c", jobs=4)
    rate = n / t1
    conserved = sum(counts1.values()) == n and lines1 == lines2 == lines4 == n
    deterministic = dig1 == dig2 == dig4 and counts1 == counts2 == counts4
    ok = conserved and deterministic and rate >= 1000
    report(6, "pipeline conservation", ok, f"{lines1} of {n} records written, identical across runs/jobs={deterministic}, {rate:.0f} records/s")


def test_criterion_7_fixture_corpus_agreement():
    rng = random.Random(7)
    lists = default_word_lists()
    within = total = 0
    bands_by_target: dict[int, dict[str, list[int]]] = {}
    for band in GradeBand:
        per_metric: dict[str, list[int]] = {m.value: [] for m in INTEGRATED_METRICS}
        for _ in range(100):
            rep = score_all(synthetic_text(band, rng, sentences=8, lists=lists), lists)
            final = integrate(rep).final
            within += abs(int(final) - int(rep.band(MetricId.ARI))) <= 1
            total += 1
            for m in INTEGRATED_METRICS:
                per_metric[m.value].append(int(rep.band(m)))
        bands_by_target[int(band)] = per_metric
    share = within / total
    means = {m.value: [statistics.fmean(bands_by_target[b][m.value]) for b in range(1, 7)] for m in INTEGRATED_METRICS}
    flat = [m for m, row in means.items() if not all(a < b for a, b in zip(row, row[1:]))]
    ok = total == 600 and share >= 0.90 and not flat
    report(7, "fixture corpus agreement", ok, f"{share:.1%} within one band of ARI; non-monotone metrics: {flat or 'none'}")


def test_criterion_8_monotonicity():
    rng = random.Random(8)
    bad = []
    for trial in range(1000):
        S = rng.randint(1, 20)
        W = rng.randint(S, 40 * S)
        hard = rng.randint(0, W)
        base = stats_of(
            S=S,
            W=W,
            syll=W + 2 * hard + rng.randint(0, W),
            letters=rng.randint(3 * W, 8 * W),
            hard=hard,
            d=rng.randint(0, W),
            u=rng.uniform(0, 100),
        )
        field, up = _perturb(rng, base)
        for metric, sign in COEFFICIENT_SIGNS[field].items():
            delta = FORMULAS[metric](up) - FORMULAS[metric](base)
            if delta * sign <= 0:
                bad.append((trial, field, metric.value, delta))
    jump_hi = dale_chall(replace(stats_of(S=2, W=20, syll=20, letters=80), dc_difficult_pct=5.0 + 1e-9))
    jump_at = dale_chall(replace(stats_of(S=2, W=20, syll=20, letters=80), dc_difficult_pct=5.0))
    jump_lo = dale_chall(replace(stats_of(S=2, W=20, syll=20, letters=80), dc_difficult_pct=5.0 - 1e-9))
    jump = jump_hi - jump_at
    ok = not bad and abs(jump - 3.6365) <= 1e-6 and abs(jump_at - jump_lo) <= 1e-6
    report(8, "monotonicity suite", ok, f"1000 perturbations, {len(bad)} sign errors, DC jump at p=5 is {jump:.7f}")


# Direction each score moves when a count rises with everything else fixed.
COEFFICIENT_SIGNS = {
    "words_per_sentence": {
        MetricId.FRES: -1, MetricId.FKGL: 1, MetricId.FOG: 1, MetricId.DC: 1,
        MetricId.SPACHE: 1, MetricId.ARI: 1, MetricId.CLI: 1, MetricId.LW: 1,
    },
    "syllables": {MetricId.FRES: -1, MetricId.FKGL: 1},
    "letters": {MetricId.CLI: 1, MetricId.ARI: 1},
    "complex": {MetricId.FOG: 1, MetricId.LW: 1},
    "difficult_pct": {MetricId.DC: 1},
    "unfamiliar_pct": {MetricId.SPACHE: 1},
}


def _perturb(rng: random.Random, s: TextStats) -> tuple[str, TextStats]:
    field = rng.choice(sorted(COEFFICIENT_SIGNS))
    if field == "words_per_sentence" and s.sentence_count == 1:
        field = "syllables"
    if field == "complex" and s.hard_word_count == s.word_count:
        field = "letters"
    if field == "difficult_pct" and s.dc_difficult_pct >= 100:
        field = "syllables"
    if field == "words_per_sentence":
        # Same words over fewer sentences.
        return field, replace(s, sentence_count=rng.randint(1, s.sentence_count - 1))
    if field == "syllables":
        return field, replace(s, syllable_count=s.syllable_count + rng.randint(1, 50))
    if field == "letters":
        k = rng.randint(1, 50)
        return field, replace(s, letter_count=s.letter_count + k, character_count=s.character_count + k)
    if field == "complex":
        k = rng.randint(1, s.word_count - s.hard_word_count)
        return field, replace(
            s,
            complex_word_count=s.complex_word_count + k,
            hard_word_count=s.hard_word_count + k,
            easy_word_count=s.easy_word_count - k,
        )
    if field == "difficult_pct":
        return field, replace(s, dc_difficult_pct=min(100.0, s.dc_difficult_pct + rng.uniform(0.01, 20)))
    return field, replace(s, spache_unfamiliar_pct=s.spache_unfamiliar_pct + rng.uniform(0.01, 20))


if __name__ == "__main__":
    import tempfile

    failed = 0
    for name, fn in sorted((k, v) for k, v in globals().items() if k.startswith("test_criterion_")):
        try:
            if "tmp_path" in fn.__code__.co_varnames[: fn.__code__.co_argcount]:
                with tempfile.TemporaryDirectory() as d:
                    fn(Path(d))
            else:
                fn()
        except AssertionError:
            failed += 1
    print(json.dumps({"criteria": len(RESULTS), "failed": failed}))
    sys.exit(1 if failed else 0)
