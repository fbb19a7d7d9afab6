"""Loading, validation, filtering, and summary of timestamped text records.

Files come in two interchangeable formats. CSV has the header
``id,date,group,text,label`` (label column optional) with RFC-4180
quoting; JSONL has one object per line with the same field names and
``label`` absent or null. Dates are ISO-8601 calendar dates; intra-day
timestamps are truncated to the day. Malformed rows are never dropped
silently: every load returns the accepted records plus a rejection
report carrying the row number and reason.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .errors import EmptyCorpusError, InvalidDateRangeError, ValidationError

__all__ = [
    "TweetRecord",
    "RowRejection",
    "LoadResult",
    "CorpusSummary",
    "load_corpus",
    "write_corpus",
    "summarize",
    "filter_records",
]

log = logging.getLogger(__name__)

_DATE_RE = re.compile(r"^(\d{4}-\d{2}-\d{2})([T ].*)?$")

_CSV_FIELDS = ("id", "date", "group", "text", "label")


@dataclass(frozen=True)
class TweetRecord:
    """One timestamped, group-tagged short text, optionally class-labeled."""

    id: str
    date: dt.date
    text: str
    group: str
    label: Optional[str] = None


@dataclass(frozen=True)
class RowRejection:
    """Why a particular input row was not turned into a record."""

    row: int
    reason: str


@dataclass
class LoadResult:
    """Accepted records plus the rejection report for one file."""

    records: list[TweetRecord]
    rejections: list[RowRejection] = field(default_factory=list)


@dataclass(frozen=True)
class CorpusSummary:
    """Per-group dataset description: day coverage and tweet volume."""

    group: str
    total_days: int
    min_per_day: int
    max_per_day: int
    avg_per_day: float
    total_tweets: int


def parse_record_date(raw: str) -> dt.date:
    """Parse an ISO calendar date, truncating any time-of-day part."""
    m = _DATE_RE.match(raw.strip())
    if not m:
        raise ValueError(f"not an ISO-8601 calendar date: {raw!r}")
    try:
        return dt.date.fromisoformat(m.group(1))
    except ValueError as exc:
        raise ValueError(f"invalid date {raw!r}: {exc}") from exc


def _build_record(row_no: int, raw: dict) -> TweetRecord:
    for key in ("id", "date", "text"):
        value = raw.get(key)
        if value is None or (isinstance(value, str) and not value.strip()):
            raise ValueError(f"missing required field {key!r}")
    text = str(raw["text"])
    if not text.strip():
        raise ValueError("text is empty after trimming")
    label = raw.get("label")
    if label is not None:
        label = str(label).strip() or None
    return TweetRecord(
        id=str(raw["id"]).strip(),
        date=parse_record_date(str(raw["date"])),
        text=text,
        group=str(raw.get("group") or "").strip(),
        label=label,
    )


def _decode_lines(data: bytes) -> list[tuple[int, str | None]]:
    """Per-line UTF-8 decode; undecodable lines yield None payloads."""
    out: list[tuple[int, str | None]] = []
    for i, chunk in enumerate(data.split(b"\n"), start=1):
        try:
            out.append((i, chunk.decode("utf-8")))
        except UnicodeDecodeError:
            out.append((i, None))
    return out


def _load_csv(data: bytes) -> LoadResult:
    try:
        text = data.decode("utf-8")
        bad_lines: list[int] = []
    except UnicodeDecodeError:
        # Degraded path: keep valid lines, reject the rest. Multi-line
        # quoted fields are not reconstructed across rejected lines.
        decoded = _decode_lines(data)
        bad_lines = [i for i, line in decoded if line is None]
        text = "\n".join(line for _, line in decoded if line is not None)

    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("CSV file has no header row")
    header = [h.strip() for h in header]
    if not set(("id", "date", "text")).issubset(header):
        raise ValidationError(
            f"unparseable CSV header {header!r}; expected columns {','.join(_CSV_FIELDS[:4])}[,label]"
        )

    result = LoadResult(records=[])
    for i in bad_lines:
        result.rejections.append(RowRejection(i, "invalid UTF-8 byte sequence"))
    for row_no, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            result.rejections.append(
                RowRejection(row_no, f"expected {len(header)} fields, got {len(row)}")
            )
            continue
        raw = dict(zip(header, row))
        if raw.get("label", "") == "":
            raw["label"] = None
        try:
            result.records.append(_build_record(row_no, raw))
        except ValueError as exc:
            result.rejections.append(RowRejection(row_no, str(exc)))
    return result


def _load_jsonl(data: bytes) -> LoadResult:
    result = LoadResult(records=[])
    for row_no, line in _decode_lines(data):
        if line is None:
            result.rejections.append(RowRejection(row_no, "invalid UTF-8 byte sequence"))
            continue
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            result.rejections.append(RowRejection(row_no, f"invalid JSON: {exc.msg}"))
            continue
        if not isinstance(raw, dict):
            result.rejections.append(RowRejection(row_no, "JSON value is not an object"))
            continue
        try:
            result.records.append(_build_record(row_no, raw))
        except ValueError as exc:
            result.rejections.append(RowRejection(row_no, str(exc)))
    return result


def load_corpus(path: str | Path, format: str | None = None) -> LoadResult:
    """Load records from a CSV or JSONL file.

    ``format`` is ``"csv"`` or ``"jsonl"``; when omitted it is inferred
    from the file suffix. Well-formed rows are returned in file order;
    malformed rows land in the rejection report. Duplicate ids are kept
    (with a warning), matching the upstream data which never
    deduplicates.
    """
    path = Path(path)
    if format is None:
        suffix = path.suffix.lower()
        format = {"csv": "csv", "jsonl": "jsonl", "json": "jsonl"}.get(suffix.lstrip("."))
        if format is None:
            raise ValidationError(f"cannot infer format from suffix {suffix!r}; pass format=")
    if format not in ("csv", "jsonl"):
        raise ValidationError(f"unknown corpus format {format!r}")
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise ValidationError(f"cannot read corpus file {path}: {exc}") from exc

    result = _load_csv(data) if format == "csv" else _load_jsonl(data)

    dupes = [rid for rid, n in Counter(r.id for r in result.records).items() if n > 1]
    if dupes:
        log.warning("corpus %s contains %d duplicated record id(s)", path, len(dupes))
    return result


def write_corpus(records: Iterable[TweetRecord], path: str | Path, format: str | None = None) -> None:
    """Serialize records to CSV or JSONL using the canonical field names."""
    path = Path(path)
    if format is None:
        format = "csv" if path.suffix.lower() == ".csv" else "jsonl"
    if format == "csv":
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(_CSV_FIELDS)
            for r in records:
                writer.writerow([r.id, r.date.isoformat(), r.group, r.text, r.label or ""])
    elif format == "jsonl":
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for r in records:
                obj = {
                    "id": r.id,
                    "date": r.date.isoformat(),
                    "group": r.group,
                    "text": r.text,
                    "label": r.label,
                }
                fh.write(json.dumps(obj, ensure_ascii=False, sort_keys=True) + "\n")
    else:
        raise ValidationError(f"unknown corpus format {format!r}")


def summarize(records: Sequence[TweetRecord], group: str) -> CorpusSummary:
    """Per-day count statistics over the distinct dates present.

    Days with zero records do not exist in the corpus and therefore do
    not enter min/avg; ``total_days`` counts only dates with at least
    one record. All records must already carry the requested group tag.
    """
    if not records:
        raise EmptyCorpusError(f"no records to summarize for group {group!r}")
    off_group = [r for r in records if r.group != group]
    if off_group:
        raise ValidationError(
            f"{len(off_group)} record(s) do not carry group {group!r}; filter first"
        )
    per_day = Counter(r.date for r in records)
    counts = list(per_day.values())
    total = sum(counts)
    days = len(per_day)
    return CorpusSummary(
        group=group,
        total_days=days,
        min_per_day=min(counts),
        max_per_day=max(counts),
        avg_per_day=total / days,
        total_tweets=total,
    )


def filter_records(
    records: Sequence[TweetRecord],
    group: Optional[str] = None,
    date_range: Optional[tuple[dt.date, dt.date]] = None,
) -> list[TweetRecord]:
    """Stable-order subset matching all given predicates.

    ``date_range`` is a closed interval (start, end). With no predicates
    the input comes back unchanged (as a new list).
    """
    if date_range is not None:
        start, end = date_range
        if start > end:
            raise InvalidDateRangeError(f"date range start {start} is after end {end}")
    out = []
    for r in records:
        if group is not None and r.group != group:
            continue
        if date_range is not None and not (date_range[0] <= r.date <= date_range[1]):
            continue
        out.append(r)
    return out


def groups_in(records: Iterable[TweetRecord]) -> list[str]:
    """Distinct group tags in first-appearance order."""
    seen: dict[str, None] = {}
    for r in records:
        if r.group not in seen:
            seen[r.group] = None
    return list(seen)
