"""Command-line interface: ``readgrade <subcommand>``.

Machine-readable output goes to stdout, diagnostics to stderr. Exit codes:
0 success, 1 I/O or provider failure, 2 invalid input.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .corpus import (
    DistributionSummary,
    classify_records,
    dumps,
    emit_finetune_files,
    generate_answers,
    load_records,
    partition_corpus,
    read_jsonl,
    write_jsonl,
)
from .errors import ConfigError, EmptyText, ReadGradeError, ValidationError
from .evaluation import (
    EvalItem,
    build_eval_report,
    diversity_gain,
    rating_summary,
    read_rankings_csv,
    sentence_length_distribution,
    survey_tau,
    zipf_frequency_table,
)
from .integration import integrate
from .metrics import BandMappingConfig, MetricId, score_all
from .prompts import expand_prompts, load_taxonomy, question_generation_prompts
from .providers import HashedBowEmbedder, provider_from_config
from .textstats import WordLists

log = logging.getLogger("readgrade")


@dataclass
class CliConfig:
    dale_chall: Path | None = None
    spache: Path | None = None
    abbreviations: Path | None = None
    band_mapping: BandMappingConfig = field(default_factory=BandMappingConfig)
    provider: dict[str, Any] = field(default_factory=dict)
    jobs: int = 1
    lenient: bool = False

    def word_lists(self) -> WordLists:
        return WordLists.from_files(self.dale_chall, self.spache, self.abbreviations)


def load_config(args: argparse.Namespace) -> CliConfig:
    """Merge the optional JSON config file with command-line flags (flags win)."""
    cfg = CliConfig()
    if args.config:
        path = Path(args.config)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        base = path.parent
        lists = data.get("word_lists", {})
        for key in ("dale_chall", "spache", "abbreviations"):
            if lists.get(key):
                setattr(cfg, key, base / lists[key])
        if "band_mapping" in data:
            cfg.band_mapping = BandMappingConfig.from_dict(data["band_mapping"])
        cfg.provider = dict(data.get("provider", {}))
        cfg.jobs = int(data.get("jobs", cfg.jobs))
        cfg.lenient = bool(data.get("lenient", cfg.lenient))
    for key in ("dale_chall", "spache", "abbreviations"):
        if getattr(args, key, None):
            setattr(cfg, key, Path(getattr(args, key)))
    if getattr(args, "band_config", None):
        cfg.band_mapping = BandMappingConfig.from_file(args.band_config)
    if getattr(args, "jobs", None) is not None:
        cfg.jobs = args.jobs
    if getattr(args, "lenient", False):
        cfg.lenient = True
    if cfg.jobs < 1:
        raise ConfigError("--jobs must be >= 1")
    for key in ("dale_chall", "spache", "abbreviations"):
        p = getattr(cfg, key)
        if p is not None and not p.exists():
            raise ConfigError(f"{key} word list not found: {p}")
    return cfg


def _out(text: str) -> None:
    sys.stdout.write(text + "\n")


def cmd_analyze(args: argparse.Namespace, cfg: CliConfig) -> int:
    if args.file:
        text = Path(args.file).read_text(encoding="utf-8")
    elif args.text is not None:
        text = args.text
    else:
        text = sys.stdin.read()
    if not text.strip():
        raise EmptyText("no text given")
    report = score_all(text, cfg.word_lists(), cfg.band_mapping)
    result = integrate(report)
    if args.json:
        payload = {
            "band": int(result.final),
            "decided_by": result.decided_by,
            "group_votes": result.votes(),
            "scores": {m.value: {"raw": s.raw, "band": int(s.band)} for m, s in report.scores.items()},
            "stats": {k: v for k, v in vars(report.stats).items() if k != "sentence_word_counts"},
        }
        _out(json.dumps(payload, indent=2))
        return 0
    st = report.stats
    _out(f"sentences {st.sentence_count}  words {st.word_count}  syllables {st.syllable_count}")
    _out(f"{'metric':<8}{'raw':>12}  band")
    for m, s in report.scores.items():
        tag = "  (held out)" if m.held_out else ""
        _out(f"{m.value:<8}{s.raw:>12.6g}  {int(s.band)}{tag}")
    _out(f"group votes {result.votes()}  ->  band {int(result.final)} ({result.final.label}, {result.decided_by})")
    return 0


def cmd_classify(args: argparse.Namespace, cfg: CliConfig) -> int:
    summary = DistributionSummary()
    errors: list = []
    records = load_records(args.input, lenient=cfg.lenient, errors=errors)
    classified = classify_records(
        records, cfg.word_lists(), cfg.band_mapping, jobs=cfg.jobs, lenient=cfg.lenient, summary=summary
    )
    rows = (c.to_dict() for c in classified)
    if args.output:
        write_jsonl(args.output, rows)
    else:
        for row in rows:
            _out(dumps(row))
    summary.skipped += len(errors)
    print(json.dumps(summary.to_dict()), file=sys.stderr)
    return 0


def cmd_partition(args: argparse.Namespace, cfg: CliConfig) -> int:
    rows = (obj for _, obj in read_jsonl(args.input))
    summary = partition_corpus(rows, args.out_dir)
    _out(json.dumps(summary.to_dict()))
    return 0


def cmd_emit_finetune(args: argparse.Namespace, cfg: CliConfig) -> int:
    written = emit_finetune_files(args.partition_dir, args.out_dir, args.format)
    _out(json.dumps({str(b): str(p) for b, p in written.items()}))
    return 0


def cmd_gen_prompts(args: argparse.Namespace, cfg: CliConfig) -> int:
    for prompt in expand_prompts(args.question):
        _out(dumps(prompt.to_dict()))
    return 0


def cmd_gen_questions(args: argparse.Namespace, cfg: CliConfig) -> int:
    taxonomy = load_taxonomy(args.taxonomy)
    for item in question_generation_prompts(taxonomy, n=args.n):
        _out(dumps(item))
    return 0


def cmd_generate(args: argparse.Namespace, cfg: CliConfig) -> int:
    if args.question:
        questions = [{"id": "q1", "question": args.question}]
    else:
        questions = [obj for _, obj in read_jsonl(args.questions)]
    provider_name = args.provider or cfg.provider.get("name", "mock")
    provider = provider_from_config(provider_name, seed=args.seed, settings=cfg.provider)
    records, failures = [], []
    for i, q in enumerate(questions):
        if "question" not in q:
            raise ValidationError(f"question entry {i + 1} lacks 'question'")
        run = generate_answers(
            expand_prompts(q["question"]),
            provider,
            question_id=str(q.get("id", f"q{i + 1}")),
            field_name=q.get("field"),
            subject=q.get("subject"),
        )
        records.extend(r.to_dict() for r in run.records)
        failures.extend(f.to_dict() for f in run.failures)
    if args.output:
        write_jsonl(args.output, records)
    else:
        for r in records:
            _out(dumps(r))
    if args.failures:
        write_jsonl(args.failures, failures)
    print(json.dumps({"records": len(records), "failures": len(failures)}), file=sys.stderr)
    return 1 if failures and not records else 0


def _load_targets(path: str | None) -> dict[str, int]:
    if not path:
        return {}
    return {str(obj["id"]): int(obj["target_band"]) for _, obj in read_jsonl(path)}


def cmd_evaluate(args: argparse.Namespace, cfg: CliConfig) -> int:
    targets = _load_targets(args.targets)
    items = []
    for _, row in read_jsonl(args.classified):
        target = targets.get(str(row.get("id"))) if targets else None
        if targets and target is None:
            continue
        items.append(EvalItem.from_classified(row, target))
    report = build_eval_report(items, cfg.band_mapping)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "report.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
    report.confusion.to_csv(out / "confusion.csv")
    report.confusion.to_csv(out / "confusion_pct.csv", normalized=True)
    with open(out / "target_ari.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, ["target_band", "target_pct", "ari_mean", "ari_level"], lineterminator="\n")
        w.writeheader()
        w.writerows(report.table_rows())
    _out(json.dumps(report.to_dict()))
    return 0


def cmd_survey(args: argparse.Namespace, cfg: CliConfig) -> int:
    if not args.rankings and not args.ratings:
        raise ValidationError("give --rankings and/or --ratings")
    result: dict[str, Any] = {}
    if args.rankings:
        result["ranking"] = survey_tau(read_rankings_csv(args.rankings)).to_dict()
    if args.ratings:
        with open(args.ratings, newline="", encoding="utf-8") as fh:
            summary = rating_summary(csv.DictReader(fh))
        result["ratings"] = summary
        if args.out_dir:
            out = Path(args.out_dir)
            out.mkdir(parents=True, exist_ok=True)
            with open(out / "ratings_boxplot.csv", "w", newline="", encoding="utf-8") as fh:
                w = csv.DictWriter(fh, list(summary[0]), lineterminator="\n")
                w.writeheader()
                w.writerows(summary)
    _out(json.dumps(result))
    return 0


def _read_texts(path: str, key: str) -> list[str]:
    p = Path(path)
    if p.suffix == ".jsonl":
        return [str(obj[key]) for _, obj in read_jsonl(p)]
    return [line.rstrip("\n") for line in p.read_text(encoding="utf-8").splitlines() if line.strip()]


def cmd_diversity(args: argparse.Namespace, cfg: CliConfig) -> int:
    base = _read_texts(args.base, args.key)
    new = _read_texts(args.new, args.key)
    value = diversity_gain(base, new, HashedBowEmbedder(args.dim))
    _out(json.dumps({"diversity_gain": value, "base": len(base), "new": len(new)}))
    return 0


def cmd_lengths(args: argparse.Namespace, cfg: CliConfig) -> int:
    hist = sentence_length_distribution(_read_texts(args.input, args.key), cfg.word_lists())
    _out(json.dumps(hist.to_dict()))
    return 0


def cmd_zipf(args: argparse.Namespace, cfg: CliConfig) -> int:
    table = zipf_frequency_table(_read_texts(args.input, args.key), args.min_count)
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["rank", "word", "count"])
    for rank, (word, count) in enumerate(table, 1):
        w.writerow([rank, word, count])
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file (word lists, band mapping, provider, jobs)")
    common.add_argument("--band-config", help="JSON band-mapping file; overrides --config")
    common.add_argument("--dale-chall", help="Dale-Chall familiar word list")
    common.add_argument("--spache", help="Spache familiar word list")
    common.add_argument("--abbreviations", help="abbreviation list for sentence splitting")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(prog="readgrade", description="Grade-band readability classification.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="score one text")
    p.add_argument("text", nargs="?", help="text to analyse (stdin if omitted)")
    p.add_argument("--file", help="read the text from a file")
    p.add_argument("--json", action="store_true", help="emit a JSON report")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("classify", parents=[common], help="classify a JSON Lines corpus")
    p.add_argument("input", help="corpus JSON Lines: id, question, answer, field?, subject?, target_band?")
    p.add_argument("-o", "--output", help="output file (stdout if omitted)")
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")
    p.add_argument("--lenient", action="store_true", help="skip bad lines instead of failing")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("partition", parents=[common], help="split classified records into band files")
    p.add_argument("input", help="classified JSON Lines")
    p.add_argument("--out-dir", required=True, help="directory for band_1.jsonl .. band_6.jsonl")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("emit-finetune", parents=[common], help="write fine-tuning files from a partition")
    p.add_argument("--partition-dir", required=True, help="directory holding band_N.jsonl files")
    p.add_argument("--out-dir", required=True, help="directory for finetune_N.jsonl files")
    p.add_argument("--format", default="chat", help="chat or prompt-completion")
    p.set_defaults(func=cmd_emit_finetune)

    p = sub.add_parser("gen-prompts", parents=[common], help="expand a question into 54 answer prompts")
    p.add_argument("--question", required=True, help="question to expand")
    p.set_defaults(func=cmd_gen_prompts)

    p = sub.add_parser("gen-questions", parents=[common], help="emit question-generation prompts per subject")
    p.add_argument("--taxonomy", help="subjects JSON (bundled list if omitted)")
    p.add_argument("-n", type=int, default=10, help="questions to request per subject")
    p.set_defaults(func=cmd_gen_questions)

    p = sub.add_parser("generate", parents=[common], help="generate answers for all 54 prompt variants")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--question", help="a single question")
    src.add_argument("--questions", help="JSON Lines with id, question, field?, subject?")
    p.add_argument("--provider", choices=["mock", "openai"], help="default: mock, or provider.name in --config")
    p.add_argument("--seed", type=int, default=0, help="seed for the mock provider")
    p.add_argument("-o", "--output", help="output JSON Lines (stdout if omitted)")
    p.add_argument("--failures", help="write failed items here as JSON Lines")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", parents=[common], help="Target %%, confusion matrix, ARI and metric means")
    p.add_argument("--classified", required=True, help="classified JSON Lines")
    p.add_argument("--targets", help="JSON Lines of id and target_band (else target_band in records)")
    p.add_argument("--out-dir", default=".", help="where report.json and the CSV tables go")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("survey", parents=[common], help="Kendall tau, L1 distances and rating summaries")
    p.add_argument("--rankings", help="CSV: rater_id, item_id?, position, assigned_rank")
    p.add_argument("--ratings", help="CSV: rater_id, band, q1, q2, q3")
    p.add_argument("--out-dir", help="write ratings_boxplot.csv here")
    p.set_defaults(func=cmd_survey)

    p = sub.add_parser("diversity", parents=[common], help="diversity gain of new texts over base texts")
    p.add_argument("--base", required=True, help="base texts (.jsonl or one text per line)")
    p.add_argument("--new", required=True, help="new texts (.jsonl or one text per line)")
    p.add_argument("--key", default="answer", help="JSON field holding the text (for .jsonl inputs)")
    p.add_argument("--dim", type=int, default=512, help="hashed embedding dimension")
    p.set_defaults(func=cmd_diversity)

    p = sub.add_parser("lengths", parents=[common], help="sentence length histogram")
    p.add_argument("input", help="texts (.jsonl or one text per line)")
    p.add_argument("--key", default="answer", help="JSON field holding the text")
    p.set_defaults(func=cmd_lengths)

    p = sub.add_parser("zipf", parents=[common], help="ranked word frequency table as CSV")
    p.add_argument("input", help="texts (.jsonl or one text per line)")
    p.add_argument("--key", default="answer", help="JSON field holding the text")
    p.add_argument("--min-count", type=int, default=1, help="drop words seen fewer times")
    p.set_defaults(func=cmd_zipf)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(args)
        return args.func(args, cfg)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ReadGradeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
