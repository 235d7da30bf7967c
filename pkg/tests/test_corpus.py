import random

import pytest

from newsreuse.corpus import (
    Audience,
    Leaning,
    Reliability,
    SourceLabels,
    canonical_source,
    ingest_articles,
    labels_for,
    load_labels,
    load_lexicon,
    parse_timestamp,
    partition_windows,
)
from newsreuse.errors import DataError

from helpers import BASE_TS, DAY, write_jsonl


def test_ingest_clean_jsonl(tmp_path):
    path = tmp_path / "articles.jsonl"
    write_jsonl(
        path,
        [
            {"id": f"a{i}", "source": "ap", "body": "text", "published_utc": BASE_TS + i}
            for i in range(3)
        ],
    )
    collection = ingest_articles(path)
    assert len(collection) == 3
    assert collection.rejects == ()
    assert [a.id for a in collection] == ["a0", "a1", "a2"]


def test_ingest_missing_source_rejected(tmp_path):
    path = tmp_path / "articles.jsonl"
    write_jsonl(
        path,
        [
            {"id": "a", "source": "ap", "body": "x", "published_utc": BASE_TS},
            {"id": "b", "source": "", "body": "x", "published_utc": BASE_TS},
            {"id": "c", "source": "pbs", "body": "x", "published_utc": BASE_TS},
        ],
    )
    collection = ingest_articles(path)
    assert len(collection) == 2
    assert len(collection.rejects) == 1
    assert collection.rejects[0].row == 2
    assert collection.rejects[0].reason == "missing source"


def test_ingest_full_span_accepted(tmp_path):
    path = tmp_path / "articles.jsonl"
    write_jsonl(
        path,
        [
            {"source": "ap", "body": "x", "published_utc": "2017-04-07T00:10:00Z"},
            {"source": "pbs", "body": "x", "published_utc": "2017-05-20T12:00:00Z"},
            {"source": "cnn", "body": "x", "published_utc": "2017-07-13T23:50:00Z"},
        ],
    )
    collection = ingest_articles(path)
    assert len(collection) == 3
    assert round(collection.span_days()) == 98


def test_ingest_derived_ids_deterministic(tmp_path):
    path = tmp_path / "articles.jsonl"
    write_jsonl(
        path,
        [
            {"source": "ap", "body": "x", "published_utc": BASE_TS, "url": "http://a"},
            {"source": "ap", "body": "y", "published_utc": BASE_TS, "url": "http://b"},
        ],
    )
    first = ingest_articles(path)
    second = ingest_articles(path)
    assert first == second
    assert all(a.id for a in first)
    assert len({a.id for a in first}) == 2


def test_ingest_duplicate_id_within_source_rejected(tmp_path):
    path = tmp_path / "articles.jsonl"
    write_jsonl(
        path,
        [
            {"id": "x", "source": "ap", "body": "a", "published_utc": BASE_TS},
            {"id": "x", "source": "ap", "body": "b", "published_utc": BASE_TS + 1},
            {"id": "y", "source": "ap", "body": "c", "published_utc": BASE_TS},
        ],
    )
    collection = ingest_articles(path)
    assert [a.id for a in collection] == ["x", "y"]
    assert "duplicate id" in collection.rejects[0].reason


def test_ingest_duplicate_id_across_sources_kept_distinct(tmp_path):
    path = tmp_path / "articles.jsonl"
    write_jsonl(
        path,
        [
            {"id": "x", "source": "ap", "body": "a", "published_utc": BASE_TS},
            {"id": "x", "source": "pbs", "body": "b", "published_utc": BASE_TS},
        ],
    )
    collection = ingest_articles(path)
    assert len(collection) == 2
    assert {a.id for a in collection} == {"x", "x@pbs"}


def test_ingest_majority_rejected_aborts(tmp_path):
    path = tmp_path / "articles.jsonl"
    write_jsonl(
        path,
        [
            {"id": "a", "source": "ap", "body": "x", "published_utc": BASE_TS},
            {"id": "b", "source": "", "body": "x", "published_utc": BASE_TS},
            {"id": "c", "body": "x", "published_utc": BASE_TS},
        ],
    )
    with pytest.raises(DataError, match="rejected"):
        ingest_articles(path)


def test_ingest_unreadable_file():
    with pytest.raises(DataError, match="cannot read"):
        ingest_articles("/nonexistent/articles.jsonl")


def test_ingest_csv(tmp_path):
    path = tmp_path / "articles.csv"
    path.write_text(
        "id,source,title,body,published_utc,fb_shares\n"
        "a1,AP ,T1,body text,2017-04-07T00:00:00Z,10\n"
        "a2,pbs,T2,body text,1491523200,\n",
        encoding="utf-8",
    )
    collection = ingest_articles(path, format="csv")
    assert len(collection) == 2
    assert collection.articles[0].source == "ap"
    assert collection.articles[0].fb_shares == 10
    assert collection.articles[1].fb_shares is None


def test_ingest_csv_bad_header(tmp_path):
    path = tmp_path / "articles.csv"
    path.write_text("id,title\nx,y\n", encoding="utf-8")
    with pytest.raises(DataError, match="unparseable header"):
        ingest_articles(path, format="csv")


def test_ingest_bad_rows_collected(tmp_path):
    path = tmp_path / "articles.jsonl"
    records = [
        {"id": f"ok{i}", "source": "ap", "body": "x", "published_utc": BASE_TS}
        for i in range(6)
    ]
    write_jsonl(path, records)
    with path.open("a", encoding="utf-8") as fh:
        fh.write("{not json}\n")
        fh.write('{"id": "t", "source": "ap", "body": "x", "published_utc": "soon"}\n')
        fh.write('{"id": "n", "source": "ap", "body": "x", "published_utc": 1, "fb_shares": -2}\n')
    collection = ingest_articles(path)
    assert len(collection) == 6
    reasons = [r.reason for r in collection.rejects]
    assert any("invalid JSON" in r for r in reasons)
    assert any("timestamp" in r for r in reasons)
    assert any("negative fb_shares" in r for r in reasons)


def test_parse_timestamp_formats():
    assert parse_timestamp("2017-04-07T00:00:00Z") == BASE_TS
    assert parse_timestamp("2017-04-07T02:00:00+02:00") == BASE_TS
    assert parse_timestamp("2017-04-07 00:00:00") == BASE_TS
    assert parse_timestamp(str(BASE_TS)) == BASE_TS
    assert parse_timestamp(BASE_TS) == BASE_TS
    with pytest.raises(ValueError):
        parse_timestamp("April 7th 2017")
    with pytest.raises(ValueError):
        parse_timestamp(1.5)


def test_canonical_source():
    assert canonical_source("  The  Daily   Caller ") == "the daily caller"


def _corpus(tmp_path, timestamps):
    path = tmp_path / "articles.jsonl"
    write_jsonl(
        path,
        [
            {"id": f"a{i}", "source": "ap", "body": "x", "published_utc": ts}
            for i, ts in enumerate(timestamps)
        ],
    )
    return ingest_articles(path)


def test_partition_98_day_corpus_seven_windows(tmp_path):
    collection = _corpus(
        tmp_path,
        [BASE_TS + 600, BASE_TS + 50 * DAY, BASE_TS + 97 * DAY + 23 * 3600],
    )
    windows = partition_windows(collection, window_days=14)
    assert len(windows) == 7
    assert windows[0].start_utc == BASE_TS


def test_partition_single_article(tmp_path):
    collection = _corpus(tmp_path, [BASE_TS + 3600])
    windows = partition_windows(collection)
    assert len(windows) == 1
    assert windows[0].articles == collection.articles


def test_partition_boundary_goes_to_later_window(tmp_path):
    collection = _corpus(tmp_path, [BASE_TS, BASE_TS + 14 * DAY])
    windows = partition_windows(collection, window_days=14)
    assert len(windows) == 2
    assert [a.id for a in windows[0].articles] == ["a0"]
    assert [a.id for a in windows[1].articles] == ["a1"]


def test_partition_tiles_without_gap_or_overlap(tmp_path):
    rng = random.Random(5)
    collection = _corpus(
        tmp_path, [BASE_TS + rng.randrange(90 * DAY) for _ in range(200)]
    )
    windows = partition_windows(collection, window_days=14)
    for earlier, later in zip(windows, windows[1:]):
        assert earlier.end_utc == later.start_utc
        assert earlier.end_utc - earlier.start_utc == 14 * DAY
    scattered = [a for w in windows for a in w.articles]
    assert sorted(a.id for a in scattered) == sorted(a.id for a in collection)
    for w in windows:
        for a in w.articles:
            assert w.start_utc <= a.published_utc < w.end_utc


def test_partition_empty_collection_errors(tmp_path):
    path = tmp_path / "empty.jsonl"
    path.write_text("", encoding="utf-8")
    collection = ingest_articles(path)
    with pytest.raises(DataError):
        partition_windows(collection)


def test_partition_rejects_bad_window_days(tmp_path):
    collection = _corpus(tmp_path, [BASE_TS])
    with pytest.raises(ValueError):
        partition_windows(collection, window_days=0)


def test_load_labels(tmp_path):
    path = tmp_path / "labels.csv"
    path.write_text(
        "source,audience,reliability,leaning\n"
        "infowars,alternative,has_published_fake,right\n"
        "AP,mainstream,not_or_unknown,neutral_or_unknown\n",
        encoding="utf-8",
    )
    labels = load_labels(path)
    rec = labels["infowars"]
    assert rec.audience is Audience.ALTERNATIVE
    assert rec.reliability is Reliability.HAS_PUBLISHED_FAKE
    assert rec.leaning is Leaning.RIGHT
    assert labels["ap"].audience is Audience.MAINSTREAM


def test_load_labels_conflict_aborts(tmp_path):
    path = tmp_path / "labels.csv"
    path.write_text(
        "source,audience,reliability,leaning\n"
        "ap,mainstream,not_or_unknown,neutral_or_unknown\n"
        "ap,alternative,not_or_unknown,neutral_or_unknown\n",
        encoding="utf-8",
    )
    with pytest.raises(DataError, match="rows 2 and 3"):
        load_labels(path)


def test_load_labels_identical_duplicate_ok(tmp_path):
    path = tmp_path / "labels.csv"
    row = "ap,mainstream,not_or_unknown,neutral_or_unknown\n"
    path.write_text("source,audience,reliability,leaning\n" + row + row, encoding="utf-8")
    assert load_labels(path)["ap"].audience is Audience.MAINSTREAM


def test_load_labels_bad_enum(tmp_path):
    path = tmp_path / "labels.csv"
    path.write_text(
        "source,audience,reliability,leaning\nap,blog,not_or_unknown,left\n",
        encoding="utf-8",
    )
    with pytest.raises(DataError, match="row 2"):
        load_labels(path)


def test_labels_default_to_unknown():
    assert labels_for({}, "Unheard Of") == SourceLabels.unknown("Unheard Of")
    assert labels_for({}, "x").audience is Audience.SATIRE_OR_UNKNOWN
    assert labels_for({}, "x").reliability is Reliability.NOT_OR_UNKNOWN
    assert labels_for({}, "x").leaning is Leaning.NEUTRAL_OR_UNKNOWN


def test_load_lexicon_dedupes_and_lowercases(tmp_path):
    path = tmp_path / "lex.txt"
    path.write_text("# comment\nLies\nlies\n\ncorruption\n", encoding="utf-8")
    lexicon = load_lexicon(path, "negative")
    assert lexicon.words == frozenset({"lies", "corruption"})
    assert "lies" in lexicon


def test_load_lexicon_empty_errors(tmp_path):
    path = tmp_path / "lex.txt"
    path.write_text("# only a comment\n", encoding="utf-8")
    with pytest.raises(DataError, match="empty"):
        load_lexicon(path, "bias")
