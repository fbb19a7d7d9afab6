"""Date-wise polarity timeseries: per-day mean compound and pos/neg ratio.

Days with no records are simply absent from a series (no gap filling),
so calendar gaps in the data shrink downstream event windows. The
pos/neg count ratio is Laplace-smoothed with +1 on both sides, which
keeps zero-negative days well-defined and in the series.
"""

from __future__ import annotations

import csv
import datetime as dt
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import TweetRecord
from .errors import EmptyCorpusError, ValidationError
from .valence import SentimentScore, ValenceConfig, classify_polarity

__all__ = [
    "DailyPoint",
    "PolaritySeries",
    "pn_ratio",
    "daily_aggregate",
    "series_to_csv",
    "series_from_csv",
    "SERIES_CSV_HEADER",
]

SERIES_CSV_HEADER = ("date", "n", "nPos", "nNeg", "nNeu", "meanPol", "pnRatio")

PARAMETERS = ("meanPol", "pnRatio")


@dataclass(frozen=True)
class DailyPoint:
    date: dt.date
    n: int
    n_pos: int
    n_neg: int
    n_neu: int
    mean_pol: float
    pn_ratio: float

    def value(self, parameter: str) -> float:
        if parameter == "meanPol":
            return self.mean_pol
        if parameter == "pnRatio":
            return self.pn_ratio
        raise ValidationError(f"unknown series parameter {parameter!r}; expected one of {PARAMETERS}")


@dataclass(frozen=True)
class PolaritySeries:
    """Per-day points for one group, strictly ascending by date."""

    group: str
    points: tuple[DailyPoint, ...]

    def __post_init__(self) -> None:
        dates = [p.date for p in self.points]
        if any(a >= b for a, b in zip(dates, dates[1:])):
            raise ValidationError("series dates must be strictly increasing")

    def dates(self) -> list[dt.date]:
        return [p.date for p in self.points]


def pn_ratio(n_pos: int, n_neg: int) -> float:
    """Laplace-smoothed positive:negative count ratio, (n_pos+1)/(n_neg+1)."""
    if n_pos < 0 or n_neg < 0:
        raise ValidationError("counts must be non-negative")
    return (n_pos + 1) / (n_neg + 1)


def daily_aggregate(
    scored: Sequence[tuple[TweetRecord, SentimentScore]],
    config: ValenceConfig = ValenceConfig(),
) -> PolaritySeries:
    """Collapse scored records into one point per distinct date.

    All records must share one group tag. Within a day, records are
    summed in id order so that parallel scoring upstream cannot change
    the floating-point result.
    """
    if not scored:
        raise EmptyCorpusError("cannot aggregate an empty record list")
    groups = {record.group for record, _ in scored}
    if len(groups) > 1:
        raise ValidationError(f"records span multiple groups {sorted(groups)}; aggregate one group at a time")
    group = groups.pop()

    by_date: dict[dt.date, list[tuple[TweetRecord, SentimentScore]]] = {}
    for record, score in scored:
        by_date.setdefault(record.date, []).append((record, score))

    points = []
    for date in sorted(by_date):
        day = sorted(by_date[date], key=lambda pair: pair[0].id)
        n = len(day)
        n_pos = n_neg = n_neu = 0
        total = 0.0
        for _, score in day:
            total += score.compound
            polarity = classify_polarity(score, config)
            if polarity == "positive":
                n_pos += 1
            elif polarity == "negative":
                n_neg += 1
            else:
                n_neu += 1
        points.append(
            DailyPoint(
                date=date,
                n=n,
                n_pos=n_pos,
                n_neg=n_neg,
                n_neu=n_neu,
                mean_pol=total / n,
                pn_ratio=pn_ratio(n_pos, n_neg),
            )
        )
    return PolaritySeries(group=group, points=tuple(points))


def series_to_csv(series: PolaritySeries, path: str | Path | None = None) -> str:
    """Render (and optionally write) the plot-ready CSV for one series."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SERIES_CSV_HEADER)
    for p in series.points:
        writer.writerow(
            [p.date.isoformat(), p.n, p.n_pos, p.n_neg, p.n_neu, repr(p.mean_pol), repr(p.pn_ratio)]
        )
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text, encoding="utf-8")
    return text


def series_from_csv(path: str | Path, group: str) -> PolaritySeries:
    """Parse a series CSV written by :func:`series_to_csv`."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader, ()))
        if header != SERIES_CSV_HEADER:
            raise ValidationError(f"unexpected series CSV header {header!r}")
        points = []
        for row in reader:
            if not row:
                continue
            date, n, n_pos, n_neg, n_neu, mean_pol, ratio = row
            points.append(
                DailyPoint(
                    date=dt.date.fromisoformat(date),
                    n=int(n),
                    n_pos=int(n_pos),
                    n_neg=int(n_neg),
                    n_neu=int(n_neu),
                    mean_pol=float(mean_pol),
                    pn_ratio=float(ratio),
                )
            )
    return PolaritySeries(group=group, points=tuple(points))


def score_records(
    records: Iterable[TweetRecord], scorer, text_of=None
) -> list[tuple[TweetRecord, SentimentScore]]:
    """Score records with a ValenceScorer, keeping record order.

    ``text_of`` lets callers score a transformed text (e.g. the
    preprocessed form) instead of the raw one.
    """
    if text_of is None:
        text_of = lambda r: r.text
    return [(r, scorer.score(text_of(r))) for r in records]
