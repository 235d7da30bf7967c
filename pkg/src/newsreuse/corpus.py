"""Corpus ingestion, validation, and time partitioning.

Articles arrive as JSONL or CSV, one record per article. Rows that fail
validation are collected into a rejects report instead of aborting the run,
unless more than half the rows are bad, which signals a schema mismatch
rather than dirty data. Collections are immutable after construction and
safe to share across threads or worker processes.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import re
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Iterator, Mapping

from .errors import DataError

log = logging.getLogger(__name__)

SECONDS_PER_DAY = 86400

_WS_RE = re.compile(r"\s+")
_INT_RE = re.compile(r"[+-]?\d+")


def canonical_source(name: str) -> str:
    """Normalize a source name: trim, lowercase, collapse inner whitespace."""
    return _WS_RE.sub(" ", name.strip().lower())


def parse_timestamp(value: Any) -> int:
    """Parse ISO-8601 text or integer epoch seconds into epoch seconds (UTC).

    Naive ISO timestamps are taken as UTC. Anything else raises ValueError.
    """
    if isinstance(value, bool):
        raise ValueError("boolean is not a timestamp")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError("timestamps are seconds precision, got fractional epoch value")
        return int(value)
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty timestamp")
        if _INT_RE.fullmatch(text):
            return int(text)
        if text.endswith(("Z", "z")):
            text = text[:-1] + "+00:00"
        try:
            dt = datetime.fromisoformat(text)
        except ValueError:
            raise ValueError(f"unparseable timestamp {value!r}") from None
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return int(dt.timestamp())
    raise ValueError(f"unsupported timestamp type {type(value).__name__}")


def format_timestamp(ts: int) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class Article:
    """One news item. `published_utc` is epoch seconds."""

    id: str
    source: str
    title: str
    body: str
    published_utc: int
    author: str | None = None
    url: str | None = None
    fb_shares: int | None = None
    fb_reactions: int | None = None


@dataclass(frozen=True)
class Reject:
    """A rejected input row and why it was dropped."""

    row: int
    reason: str


@dataclass(frozen=True)
class ArticleCollection:
    articles: tuple[Article, ...]
    rejects: tuple[Reject, ...] = ()

    def __len__(self) -> int:
        return len(self.articles)

    def __iter__(self) -> Iterator[Article]:
        return iter(self.articles)

    @property
    def by_id(self) -> dict[str, Article]:
        return {a.id: a for a in self.articles}

    def sources(self) -> set[str]:
        return {a.source for a in self.articles}

    def span_days(self) -> float:
        """Days between the earliest and latest publication instants."""
        if not self.articles:
            return 0.0
        times = [a.published_utc for a in self.articles]
        return (max(times) - min(times)) / SECONDS_PER_DAY


@dataclass(frozen=True)
class TimeWindow:
    """Half-open interval [start_utc, end_utc) holding its articles."""

    index: int
    start_utc: int
    end_utc: int
    articles: tuple[Article, ...]


def _derived_id(source: str, url: str | None, published_utc: int) -> str:
    raw = f"{source}\n{url or ''}\n{published_utc}"
    return hashlib.sha1(raw.encode("utf-8")).hexdigest()[:16]


def _optional_count(value: Any, name: str) -> int | None:
    if value is None:
        return None
    if isinstance(value, str):
        value = value.strip()
        if not value:
            return None
        if not _INT_RE.fullmatch(value):
            raise ValueError(f"non-integer {name} {value!r}")
        value = int(value)
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise ValueError(f"non-integer {name} {value!r}")
    if value < 0:
        raise ValueError(f"negative {name}")
    return value


def _optional_text(value: Any) -> str | None:
    if value is None:
        return None
    text = str(value).strip()
    return text or None


def _article_from_record(record: Mapping[str, Any]) -> Article:
    source_raw = record.get("source")
    source = canonical_source(str(source_raw)) if source_raw is not None else ""
    if not source:
        raise ValueError("missing source")

    body = record.get("body")
    if body is None:
        raise ValueError("missing body")
    body = str(body)

    ts_raw = record.get("published_utc")
    if ts_raw is None or (isinstance(ts_raw, str) and not ts_raw.strip()):
        raise ValueError("missing published_utc")
    published = parse_timestamp(ts_raw)

    title = record.get("title")
    title = "" if title is None else str(title)

    article_id = _optional_text(record.get("id"))
    url = _optional_text(record.get("url"))
    if article_id is None:
        article_id = _derived_id(source, url, published)

    return Article(
        id=article_id,
        source=source,
        title=title,
        body=body,
        published_utc=published,
        author=_optional_text(record.get("author")),
        url=url,
        fb_shares=_optional_count(record.get("fb_shares"), "fb_shares"),
        fb_reactions=_optional_count(record.get("fb_reactions"), "fb_reactions"),
    )


def _iter_jsonl(path: Path) -> Iterator[tuple[int, Mapping[str, Any] | None, str | None]]:
    with path.open("r", encoding="utf-8") as fh:
        for row, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                yield row, None, f"invalid JSON: {exc.msg}"
                continue
            if not isinstance(record, dict):
                yield row, None, "record is not an object"
                continue
            yield row, record, None


def _iter_csv(path: Path) -> Iterator[tuple[int, Mapping[str, Any] | None, str | None]]:
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames
        if fields is None:
            raise DataError(f"unparseable header in {path}: file is empty")
        missing = {"source", "body", "published_utc"} - set(fields)
        if missing:
            raise DataError(
                f"unparseable header in {path}: missing columns {sorted(missing)}"
            )
        for record in reader:
            record.pop(None, None)
            cleaned = {k: v for k, v in record.items() if v is not None and v != ""}
            yield reader.line_num, cleaned, None


def ingest_articles(path: str | Path, format: str = "jsonl") -> ArticleCollection:
    """Load and validate an article corpus.

    Ids are assigned deterministically (hash of source, url, and timestamp)
    when absent. A repeated id within one source rejects the second
    occurrence; the same id appearing under different sources is kept as two
    distinct articles, the later one disambiguated with an `@source` suffix.
    Aborts when more than half the rows fail validation.
    """
    if format not in ("jsonl", "csv"):
        raise ValueError(f"unknown corpus format {format!r}")
    path = Path(path)
    try:
        rows = _iter_jsonl(path) if format == "jsonl" else _iter_csv(path)
        accepted: list[Article] = []
        rejects: list[Reject] = []
        seen_keys: set[tuple[str, str]] = set()
        seen_ids: set[str] = set()
        for row, record, error in rows:
            if error is not None:
                rejects.append(Reject(row, error))
                continue
            try:
                article = _article_from_record(record)
            except ValueError as exc:
                rejects.append(Reject(row, str(exc)))
                continue
            key = (article.source, article.id)
            if key in seen_keys:
                rejects.append(Reject(row, f"duplicate id {article.id!r} within source"))
                continue
            seen_keys.add(key)
            if article.id in seen_ids:
                article = replace(article, id=f"{article.id}@{article.source}")
            seen_ids.add(article.id)
            accepted.append(article)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc

    total = len(accepted) + len(rejects)
    if total and 2 * len(rejects) > total:
        raise DataError(
            f"{len(rejects)} of {total} rows rejected; input does not match the "
            f"expected article schema"
        )
    if rejects:
        log.warning("ingest: %d of %d rows rejected", len(rejects), total)
    return ArticleCollection(tuple(accepted), tuple(rejects))


def partition_windows(
    collection: ArticleCollection, window_days: int = 14
) -> list[TimeWindow]:
    """Tile the corpus span into consecutive half-open windows.

    Windows are anchored at midnight UTC of the earliest article's day and
    cover every article with no gap or overlap; an article falling exactly on
    a boundary belongs to the later window.
    """
    if window_days < 1:
        raise ValueError("window_days must be >= 1")
    if not collection.articles:
        raise DataError("cannot partition an empty collection")
    times = [a.published_utc for a in collection.articles]
    first, last = min(times), max(times)
    start0 = first - first % SECONDS_PER_DAY
    length = window_days * SECONDS_PER_DAY
    count = (last - start0) // length + 1
    buckets: list[list[Article]] = [[] for _ in range(count)]
    for article in collection.articles:
        buckets[(article.published_utc - start0) // length].append(article)
    windows = []
    for index, bucket in enumerate(buckets):
        bucket.sort(key=lambda a: (a.published_utc, a.id))
        windows.append(
            TimeWindow(
                index=index,
                start_utc=start0 + index * length,
                end_utc=start0 + (index + 1) * length,
                articles=tuple(bucket),
            )
        )
    return windows


class Audience(Enum):
    MAINSTREAM = "mainstream"
    ALTERNATIVE = "alternative"
    SATIRE_OR_UNKNOWN = "satire_or_unknown"


class Reliability(Enum):
    HAS_PUBLISHED_FAKE = "has_published_fake"
    NOT_OR_UNKNOWN = "not_or_unknown"
    SATIRE = "satire"


class Leaning(Enum):
    RIGHT = "right"
    LEFT = "left"
    NEUTRAL_OR_UNKNOWN = "neutral_or_unknown"


@dataclass(frozen=True)
class SourceLabels:
    """Categorical attributes of one source; fields default to unknown."""

    source: str
    audience: Audience = Audience.SATIRE_OR_UNKNOWN
    reliability: Reliability = Reliability.NOT_OR_UNKNOWN
    leaning: Leaning = Leaning.NEUTRAL_OR_UNKNOWN

    @classmethod
    def unknown(cls, source: str) -> "SourceLabels":
        return cls(source=source)


LABELS_HEADER = ["source", "audience", "reliability", "leaning"]


def load_labels(path: str | Path) -> dict[str, SourceLabels]:
    """Load the per-source label CSV keyed by canonical source name."""
    path = Path(path)
    labels: dict[str, SourceLabels] = {}
    first_row: dict[str, int] = {}
    try:
        with path.open("r", encoding="utf-8", newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or set(LABELS_HEADER) - set(reader.fieldnames):
                raise DataError(f"labels file {path} must have header {','.join(LABELS_HEADER)}")
            for record in reader:
                row = reader.line_num
                source = canonical_source(record.get("source") or "")
                if not source:
                    raise DataError(f"labels row {row}: empty source")
                try:
                    rec = SourceLabels(
                        source=source,
                        audience=Audience(record["audience"]),
                        reliability=Reliability(record["reliability"]),
                        leaning=Leaning(record["leaning"]),
                    )
                except ValueError as exc:
                    raise DataError(f"labels row {row}: {exc}") from None
                if source in labels:
                    if labels[source] != rec:
                        raise DataError(
                            f"conflicting label rows for {source!r}: "
                            f"rows {first_row[source]} and {row}"
                        )
                    continue
                labels[source] = rec
                first_row[source] = row
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    return labels


def labels_for(labels: Mapping[str, SourceLabels], source: str) -> SourceLabels:
    """Look up a source's labels, defaulting unknowns for unlisted sources."""
    return labels.get(canonical_source(source)) or SourceLabels.unknown(source)


@dataclass(frozen=True)
class Lexicon:
    """A named set of lowercased single-token terms."""

    name: str
    words: frozenset[str]

    def __contains__(self, token: str) -> bool:
        return token in self.words


def load_lexicon(path: str | Path, name: str) -> Lexicon:
    """Load a one-term-per-line lexicon; `#` lines are comments."""
    path = Path(path)
    words = set()
    try:
        with path.open("r", encoding="utf-8") as fh:
            for line in fh:
                term = line.strip()
                if not term or term.startswith("#"):
                    continue
                words.add(term.lower())
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    if not words:
        raise DataError(f"lexicon {name!r} from {path} is empty")
    return Lexicon(name=name, words=frozenset(words))
