"""Question-answer corpus pipeline: load, classify, partition and export.

Records travel as JSON Lines. Classification is per record and can be spread
over worker processes; results always come back in input order, so every
output file is byte-identical whatever the worker count.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import islice
from pathlib import Path
from typing import Any, Iterable, Iterator, Sequence

from .errors import DuplicateId, EmptyText, MissingField, ParseError, ProviderError, RecordError, UnknownFormat
from .integration import IntegrationResult, integrate
from .metrics import BandMappingConfig, GradeBand, MetricId, score_all
from .prompts import GenerationPrompt
from .providers import TextProvider
from .textstats import WordLists, default_word_lists

log = logging.getLogger(__name__)

__all__ = [
    "CorpusRecord",
    "ClassifiedRecord",
    "DistributionSummary",
    "GenerationFailure",
    "GenerationRun",
    "load_records",
    "read_jsonl",
    "write_jsonl",
    "classify_record",
    "classify_records",
    "partition_corpus",
    "emit_finetune_files",
    "generate_answers",
    "band_filename",
    "FINETUNE_FORMATS",
]

REQUIRED_FIELDS = ("id", "question", "answer")


def dumps(obj: Any) -> str:
    """Canonical one-line JSON used for every file this package writes."""
    return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "))


@dataclass(frozen=True)
class CorpusRecord:
    id: str
    question: str
    answer: str
    field: str | None = None
    subject: str | None = None
    target_band: GradeBand | None = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {"id": self.id, "question": self.question, "answer": self.answer}
        if self.field is not None:
            out["field"] = self.field
        if self.subject is not None:
            out["subject"] = self.subject
        if self.target_band is not None:
            out["target_band"] = int(self.target_band)
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any], line: int = 0) -> "CorpusRecord":
        if not isinstance(data, dict):
            raise ParseError(line, "record is not a JSON object")
        for name in REQUIRED_FIELDS:
            if name not in data or data[name] is None:
                raise MissingField(line, name)
            if not isinstance(data[name], (str, int)) or isinstance(data[name], bool):
                raise ParseError(line, f"field {name!r} must be a string")
        target = data.get("target_band")
        if target is not None:
            try:
                target = GradeBand(int(target))
            except (TypeError, ValueError):
                raise ParseError(line, f"target_band must be 1..6, got {target!r}") from None
        return cls(
            id=str(data["id"]),
            question=str(data["question"]),
            answer=str(data["answer"]),
            field=data.get("field"),
            subject=data.get("subject"),
            target_band=target,
        )


@dataclass(frozen=True)
class ClassifiedRecord:
    record: CorpusRecord
    scores: dict[str, float]
    metric_bands: dict[str, int]
    integration: IntegrationResult
    ari: float
    ari_band: GradeBand

    @property
    def band(self) -> GradeBand:
        return self.integration.final

    def to_dict(self) -> dict[str, Any]:
        out = self.record.to_dict()
        out.update(
            {
                "band": int(self.integration.final),
                "decided_by": self.integration.decided_by,
                "scores": self.scores,
                "metric_bands": self.metric_bands,
                "group_votes": self.integration.votes(),
                "ari": self.ari,
                "ari_band": int(self.ari_band),
            }
        )
        return out


@dataclass
class DistributionSummary:
    counts: dict[int, int] = field(default_factory=lambda: {int(b): 0 for b in GradeBand})
    skipped: int = 0

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def add(self, band: GradeBand | int) -> None:
        self.counts[int(band)] += 1

    def to_dict(self) -> dict[str, Any]:
        return {"counts": {str(k): v for k, v in self.counts.items()}, "total": self.total, "skipped": self.skipped}


def read_jsonl(path: str | Path, lenient: bool = False, errors: list[RecordError] | None = None) -> Iterator[tuple[int, dict]]:
    """Yield ``(line_number, object)`` for each non-blank line."""
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                err = ParseError(lineno, exc.msg)
                if not lenient:
                    raise err from None
                log.warning("skipping %s", err)
                if errors is not None:
                    errors.append(err)


def load_records(
    path: str | Path, lenient: bool = False, errors: list[RecordError] | None = None
) -> Iterator[CorpusRecord]:
    """Stream records from a JSON Lines file.

    Bad lines raise :class:`RecordError` subclasses carrying the line number;
    with ``lenient=True`` they are logged, appended to ``errors`` and skipped.
    """
    seen: set[str] = set()
    count = 0
    for lineno, obj in read_jsonl(path, lenient, errors):
        try:
            rec = CorpusRecord.from_dict(obj, lineno)
            if rec.id in seen:
                raise DuplicateId(lineno, f"duplicate id {rec.id!r}")
        except RecordError as err:
            if not lenient:
                raise
            log.warning("skipping %s", err)
            if errors is not None:
                errors.append(err)
            continue
        seen.add(rec.id)
        count += 1
        yield rec
    if count == 0:
        log.warning("%s: no records", path)


def write_jsonl(path: str | Path, rows: Iterable[dict[str, Any]]) -> int:
    n = 0
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(dumps(row))
            fh.write("\n")
            n += 1
    return n


def classify_record(
    rec: CorpusRecord, lists: WordLists | None = None, cfg: BandMappingConfig | None = None
) -> ClassifiedRecord:
    if not rec.answer.strip():
        raise EmptyText(f"record {rec.id!r} has an empty answer")
    report = score_all(rec.answer, lists, cfg)
    integration = integrate(report)
    return ClassifiedRecord(
        record=rec,
        scores=report.raw_scores(),
        metric_bands={m.value: int(s.band) for m, s in report.scores.items()},
        integration=integration,
        ari=report.raw(MetricId.ARI),
        ari_band=report.band(MetricId.ARI),
    )


# Worker-process state, set once per process by the pool initializer.
_worker: dict[str, Any] = {}


def _init_worker(lists: WordLists, cfg: BandMappingConfig | None) -> None:
    _worker["lists"] = lists
    _worker["cfg"] = cfg


def _classify_safe(rec: CorpusRecord) -> ClassifiedRecord | EmptyText:
    try:
        return classify_record(rec, _worker["lists"], _worker["cfg"])
    except EmptyText as exc:
        return exc


def classify_records(
    records: Iterable[CorpusRecord],
    lists: WordLists | None = None,
    cfg: BandMappingConfig | None = None,
    jobs: int = 1,
    lenient: bool = False,
    summary: DistributionSummary | None = None,
    chunksize: int = 256,
) -> Iterator[ClassifiedRecord]:
    """Classify a stream in input order.

    Records with empty answers raise :class:`EmptyText`, or with
    ``lenient=True`` are counted in ``summary.skipped`` and dropped.
    """
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    lists = lists or default_word_lists()
    if jobs == 1:
        _init_worker(lists, cfg)
        results: Iterable[ClassifiedRecord | EmptyText] = map(_classify_safe, records)
        yield from _collect(results, lenient, summary)
        return
    with ProcessPoolExecutor(jobs, initializer=_init_worker, initargs=(lists, cfg)) as pool:
        yield from _collect(_windowed_map(pool, records, jobs, chunksize), lenient, summary)


def _windowed_map(pool: ProcessPoolExecutor, records: Iterable[CorpusRecord], jobs: int, chunksize: int):
    # Executor.map drains its input eagerly; feed it bounded windows instead.
    it = iter(records)
    window = jobs * chunksize * 4
    while batch := list(islice(it, window)):
        yield from pool.map(_classify_safe, batch, chunksize=chunksize)


def _collect(results, lenient, summary) -> Iterator[ClassifiedRecord]:
    for res in results:
        if isinstance(res, EmptyText):
            if not lenient:
                raise res
            log.warning("skipping: %s", res)
            if summary is not None:
                summary.skipped += 1
            continue
        if summary is not None:
            summary.add(res.band)
        yield res


def band_filename(band: GradeBand | int, prefix: str = "band") -> str:
    return f"{prefix}_{int(band)}.jsonl"


def partition_corpus(classified: Iterable[ClassifiedRecord | dict], out_dir: str | Path) -> DistributionSummary:
    """Write each classified record to the file of its final band.

    All six files are created, empty ones included.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = DistributionSummary()
    handles = {b: open(out / band_filename(b), "w", encoding="utf-8", newline="\n") for b in GradeBand}
    try:
        for item in classified:
            row = item.to_dict() if isinstance(item, ClassifiedRecord) else item
            band = GradeBand(int(row["band"]))
            handles[band].write(dumps(row))
            handles[band].write("\n")
            summary.add(band)
    finally:
        for fh in handles.values():
            fh.close()
    return summary


def _chat(row: dict[str, Any]) -> dict[str, Any]:
    return {
        "messages": [
            {"role": "user", "content": row["question"]},
            {"role": "assistant", "content": row["answer"]},
        ]
    }


def _prompt_completion(row: dict[str, Any]) -> dict[str, Any]:
    return {"prompt": row["question"], "completion": row["answer"]}


FINETUNE_FORMATS = {"chat": _chat, "prompt-completion": _prompt_completion}


def emit_finetune_files(partition_dir: str | Path, out_dir: str | Path, format_id: str = "chat") -> dict[int, Path]:
    """Convert each band file of a partition into a fine-tuning file.

    Returns the written path per band. Band files missing from the
    partition produce empty outputs.
    """
    try:
        convert = FINETUNE_FORMATS[format_id]
    except KeyError:
        raise UnknownFormat(f"unknown fine-tune format {format_id!r}; choose from {sorted(FINETUNE_FORMATS)}") from None
    src, dst = Path(partition_dir), Path(out_dir)
    dst.mkdir(parents=True, exist_ok=True)
    written = {}
    for band in GradeBand:
        source = src / band_filename(band)
        target = dst / band_filename(band, "finetune")
        rows = (convert(obj) for _, obj in read_jsonl(source)) if source.exists() else iter(())
        write_jsonl(target, rows)
        written[int(band)] = target
    return written


@dataclass(frozen=True)
class GenerationFailure:
    index: int
    prompt_key: str
    message: str

    def to_dict(self) -> dict[str, Any]:
        return {"index": self.index, "prompt": self.prompt_key, "error": self.message}


@dataclass
class GenerationRun:
    records: list[CorpusRecord] = field(default_factory=list)
    failures: list[GenerationFailure] = field(default_factory=list)


def generate_answers(
    prompts: Sequence[GenerationPrompt],
    provider: TextProvider,
    question_id: str = "q",
    field_name: str | None = None,
    subject: str | None = None,
) -> GenerationRun:
    """Ask the provider for one answer per prompt.

    A provider failure on one item is recorded in ``failures`` and does not
    stop the rest. The provider is expected to do its own retrying.
    """
    run = GenerationRun()
    for i, prompt in enumerate(prompts):
        try:
            answer = provider.complete(prompt.message())
        except ProviderError as exc:
            log.warning("generation failed for %s-%s: %s", question_id, prompt.key, exc)
            run.failures.append(GenerationFailure(i, f"{question_id}-{prompt.key}", str(exc)))
            continue
        run.records.append(
            CorpusRecord(
                id=f"{question_id}-{prompt.key}",
                question=prompt.question,
                answer=answer,
                field=field_name,
                subject=subject,
                target_band=prompt.band,
            )
        )
    return run
