"""Command-line interface: detect, graph, headlines, report, gen-fixture.

Configuration comes from an optional flat key=value file plus command-line
flags; flags win. Logs go to stderr, data goes to files under the output
directory. Exit codes: 0 success, 1 usage or config error, 2 data error,
3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Sequence

from . import corpus as corpus_mod
from . import headlines as headlines_mod
from . import network as network_mod
from .corpus import (
    format_timestamp,
    ingest_articles,
    load_labels,
    load_lexicon,
    partition_windows,
)
from .errors import DataError
from .fixture import FixtureSpec, generate_fixture
from .similarity import (
    FORWARD,
    MatchedPair,
    WindowMatchResult,
    match_window,
    read_pairs_csv,
    write_pairs_csv,
)

log = logging.getLogger("newsreuse")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    """Bad flags or configuration; maps to exit code 1."""


@dataclass
class RunConfig:
    articles: str | None = None
    format: str = "jsonl"
    labels: str | None = None
    bias_lexicon: str | None = None
    positive_lexicon: str | None = None
    negative_lexicon: str | None = None
    stopwords: str | None = None
    out_dir: str = "out"
    window_days: int = 14
    similarity_threshold: float = 0.90
    title_change_threshold: float = 0.10
    min_body_tokens: int = 20
    louvain_seed: int = 0
    louvain_resolution: float = 1.0
    dedupe_origin: bool = False
    include_ambiguous: bool = False
    jobs: int = 1
    min_window_docs: int = 0

    def validate(self, *, need_articles: bool = False) -> None:
        if not 0.0 < self.similarity_threshold <= 1.0:
            raise UsageError("similarity_threshold must be in (0, 1]")
        if not 0.0 < self.title_change_threshold <= 1.0:
            raise UsageError("title_change_threshold must be in (0, 1]")
        if self.window_days < 1:
            raise UsageError("window_days must be >= 1")
        if self.min_body_tokens < 0:
            raise UsageError("min_body_tokens must be >= 0")
        if self.jobs < 1:
            raise UsageError("jobs must be >= 1")
        if self.format not in ("jsonl", "csv"):
            raise UsageError(f"unknown corpus format {self.format!r}")
        if need_articles and not self.articles:
            raise UsageError("an articles path is required (--articles or config file)")
        for name in (
            "articles", "labels", "bias_lexicon", "positive_lexicon",
            "negative_lexicon", "stopwords",
        ):
            value = getattr(self, name)
            if value is not None and not Path(value).is_file():
                raise UsageError(f"{name} file not found: {value}")


_INT_KEYS = {"window_days", "min_body_tokens", "louvain_seed", "jobs", "min_window_docs"}
_FLOAT_KEYS = {"similarity_threshold", "title_change_threshold", "louvain_resolution"}
_BOOL_KEYS = {"dedupe_origin", "include_ambiguous"}
_CONFIG_KEYS = {f.name for f in fields(RunConfig)}


def load_config_file(path: str | Path) -> dict[str, object]:
    """Parse a flat key=value config file."""
    values: dict[str, object] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _CONFIG_KEYS:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in _BOOL_KEYS:
                if value.lower() not in ("true", "false", "1", "0"):
                    raise ValueError(f"expected boolean, got {value!r}")
                values[key] = value.lower() in ("true", "1")
            else:
                values[key] = value
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: {exc}") from None
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = replace(cfg, **load_config_file(args.config))
    overrides = {
        f.name: getattr(args, f.name)
        for f in fields(RunConfig)
        if getattr(args, f.name, None) is not None
    }
    return replace(cfg, **overrides)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _common_options() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="flat key=value config file")
    common.add_argument("--articles", help="article corpus path")
    common.add_argument("--format", choices=["jsonl", "csv"], help="corpus format")
    common.add_argument("--labels", help="source labels CSV")
    common.add_argument("--bias-lexicon", dest="bias_lexicon")
    common.add_argument("--positive-lexicon", dest="positive_lexicon")
    common.add_argument("--negative-lexicon", dest="negative_lexicon")
    common.add_argument("--stopwords", help="stopword list path")
    common.add_argument("--out", dest="out_dir", help="output directory")
    common.add_argument("--window-days", dest="window_days", type=int)
    common.add_argument("--similarity-threshold", dest="similarity_threshold", type=float)
    common.add_argument(
        "--title-change-threshold", dest="title_change_threshold", type=float
    )
    common.add_argument("--min-body-tokens", dest="min_body_tokens", type=int)
    common.add_argument("--louvain-seed", dest="louvain_seed", type=int)
    common.add_argument("--louvain-resolution", dest="louvain_resolution", type=float)
    common.add_argument(
        "--dedupe-origin", dest="dedupe_origin", action="store_true", default=None,
        help="collapse pairwise story links to one edge per copier, aimed at "
        "the cluster's earliest publisher",
    )
    common.add_argument(
        "--include-ambiguous", dest="include_ambiguous", action="store_true",
        default=None,
        help="keep same-timestamp pairs in graphs (lexicographic tie-break)",
    )
    common.add_argument("--jobs", type=int, help="worker processes for detection")
    common.add_argument("--min-window-docs", dest="min_window_docs", type=int,
                        help="hide windows below this occupancy in reports")
    common.add_argument("--verbose", action="store_true", default=None)
    return common


def _build_parser() -> _Parser:
    common = _common_options()
    parser = _Parser(
        prog="newsreuse",
        description="Detect verbatim news republishing, build who-copied-whom "
        "source networks, and analyze headline changes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("detect", parents=[common],
                   help="find near-verbatim cross-source article pairs")
    sub.add_parser("graph", parents=[common],
                   help="build per-window and combined republishing graphs")
    sub.add_parser("headlines", parents=[common],
                   help="analyze title changes of copied articles")
    sub.add_parser("report", parents=[common],
                   help="assemble one summary document from prior outputs")
    gen = sub.add_parser("gen-fixture", help="generate a synthetic planted-copy corpus")
    gen.add_argument("--out", dest="out_dir", default="fixture")
    gen.add_argument("--seed", type=int, default=FixtureSpec.seed)
    gen.add_argument("--sources", type=int, default=FixtureSpec.sources)
    gen.add_argument("--articles-per-source", dest="articles_per_source", type=int,
                     default=FixtureSpec.articles_per_source)
    gen.add_argument("--copies", type=int, default=FixtureSpec.copies)
    gen.add_argument("--windows", type=int, default=FixtureSpec.windows)
    gen.add_argument("--window-days", dest="window_days", type=int,
                     default=FixtureSpec.window_days)
    gen.add_argument("--verbose", action="store_true", default=None)
    return parser


def _write_kv(path: Path, items: Sequence[tuple[str, object]]) -> None:
    path.write_text(
        "".join(f"{key}={value}\n" for key, value in items), encoding="utf-8"
    )


def _read_kv(path: Path) -> dict[str, str]:
    values = {}
    for line in path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            break
        key, _, value = line.partition("=")
        values[key] = value
    return values


def _match_window_worker(
    payload: tuple[corpus_mod.TimeWindow, float, int]
) -> WindowMatchResult:
    window, threshold, min_tokens = payload
    return match_window(window, threshold=threshold, min_body_tokens=min_tokens)


def cmd_detect(cfg: RunConfig) -> int:
    cfg.validate(need_articles=True)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    collection = ingest_articles(cfg.articles, cfg.format)
    windows = partition_windows(collection, cfg.window_days)
    log.info("ingested %d articles into %d windows", len(collection), len(windows))

    payloads = [(w, cfg.similarity_threshold, cfg.min_body_tokens) for w in windows]
    if cfg.jobs > 1 and len(windows) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_match_window_worker, payloads))
    else:
        results = [_match_window_worker(p) for p in payloads]

    pairs = [p for r in results for p in r.pairs]
    write_pairs_csv(pairs, out / "pairs.csv")

    with (out / "windows.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["window_index", "start_utc", "end_utc", "docs", "eligible_docs", "matches"]
        )
        for window, result in zip(windows, results):
            writer.writerow(
                [
                    window.index,
                    format_timestamp(window.start_utc),
                    format_timestamp(window.end_utc),
                    result.doc_count,
                    result.eligible_count,
                    len(result.pairs),
                ]
            )

    with (out / "rejects.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row", "reason"])
        for reject in collection.rejects:
            writer.writerow([reject.row, reject.reason])

    matched_sources = {p.earlier.source for p in pairs} | {p.later.source for p in pairs}
    forward = sum(1 for p in pairs if p.direction == FORWARD)
    _write_kv(
        out / "detect_summary.txt",
        [
            ("articles", len(collection)),
            ("rejected_rows", len(collection.rejects)),
            ("sources", len(collection.sources())),
            ("windows", len(windows)),
            ("window_days", cfg.window_days),
            ("similarity_threshold", cfg.similarity_threshold),
            ("min_body_tokens", cfg.min_body_tokens),
            ("matched_pairs", len(pairs)),
            ("forward_pairs", forward),
            ("ambiguous_pairs", len(pairs) - forward),
            ("sources_with_match", len(matched_sources)),
        ],
    )
    log.info(
        "detect: %d matched pairs; %d of %d sources participate",
        len(pairs), len(matched_sources), len(collection.sources()),
    )
    return EXIT_OK


def _load_pairs(cfg: RunConfig, out: Path) -> tuple[list[MatchedPair], list]:
    pairs_path = out / "pairs.csv"
    if not pairs_path.is_file():
        raise DataError(f"{pairs_path} not found; run `newsreuse detect` first")
    collection = ingest_articles(cfg.articles, cfg.format)
    windows = partition_windows(collection, cfg.window_days)
    pairs = read_pairs_csv(pairs_path, collection.by_id)
    known = {w.index for w in windows}
    stray = {p.window_index for p in pairs} - known
    if stray:
        raise DataError(
            f"{pairs_path} references windows {sorted(stray)} that the current "
            f"window_days={cfg.window_days} does not produce; re-run detect"
        )
    return pairs, windows


def cmd_graph(cfg: RunConfig) -> int:
    cfg.validate(need_articles=True)
    out = Path(cfg.out_dir)
    pairs, windows = _load_pairs(cfg, out)

    by_window: dict[int, list[MatchedPair]] = defaultdict(list)
    for p in pairs:
        by_window[p.window_index].append(p)
    window_graphs = [
        network_mod.build_window_graph(
            by_window.get(w.index, []),
            include_ambiguous=cfg.include_ambiguous,
            dedupe_origin=cfg.dedupe_origin,
            window_index=w.index,
        )
        for w in windows
    ]
    combined = network_mod.merge_graphs(window_graphs)
    partition = network_mod.louvain(
        combined, resolution=cfg.louvain_resolution, seed=cfg.louvain_seed
    )

    labels = None
    if cfg.labels:
        labels = load_labels(cfg.labels)
    else:
        log.warning("no labels file configured; graphs carry no label attributes")

    graphs_dir = out / "graphs"
    graphs_dir.mkdir(parents=True, exist_ok=True)
    written = 0
    for window, graph in zip(windows, window_graphs):
        scope = by_window.get(window.index, [])
        _decorate_graph(graph, labels, partition, scope)
        if graph.num_nodes == 0:
            continue
        network_mod.export_graphml(graph, graphs_dir / f"window_{window.index:03d}.graphml")
        network_mod.export_dot(graph, graphs_dir / f"window_{window.index:03d}.dot")
        written += 1
    _decorate_graph(combined, labels, partition, pairs)
    metrics = network_mod.compute_node_metrics(combined, window_graphs)
    for m in metrics:
        if combined.has_node(m.source):
            attrs = combined.node_attrs(m.source)
            attrs["in_centrality_mean"] = m.in_centrality_mean
            attrs["in_centrality_var"] = m.in_centrality_var
            attrs["betweenness_mean"] = m.betweenness_mean
            attrs["betweenness_var"] = m.betweenness_var
    network_mod.export_graphml(combined, graphs_dir / "combined.graphml")
    network_mod.export_dot(combined, graphs_dir / "combined.dot")

    network_mod.write_metrics_csv(metrics, out / "metrics.csv", partition.communities)

    with (out / "engagement.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "median_fb_shares", "median_fb_reactions"])
        for node in combined.nodes():
            attrs = combined.node_attrs(node)
            shares = attrs.get("median_fb_shares")
            reactions = attrs.get("median_fb_reactions")
            writer.writerow(
                [
                    node,
                    "" if shares is None else repr(shares),
                    "" if reactions is None else repr(reactions),
                ]
            )

    flags = network_mod.flag_single_day_origins(
        [p for p in pairs if p.direction == FORWARD]
    )
    with (out / "origin_flags.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "dominant_day", "share", "inbound_pairs"])
        for source, day, share, inbound in flags:
            writer.writerow([source, day, repr(share), inbound])

    _write_kv(
        out / "graph_summary.txt",
        [
            ("window_graphs", written),
            ("combined_nodes", combined.num_nodes),
            ("combined_edges", combined.num_edges),
            ("combined_weight", combined.total_weight),
            ("communities", len(set(partition.communities.values()))),
            ("modularity", repr(partition.modularity)),
            ("louvain_seed", cfg.louvain_seed),
            ("louvain_resolution", cfg.louvain_resolution),
            ("dedupe_origin", str(cfg.dedupe_origin).lower()),
            ("include_ambiguous", str(cfg.include_ambiguous).lower()),
        ],
    )
    log.info(
        "graph: %d window graphs + combined (%d nodes, %d edges, weight %d)",
        written, combined.num_nodes, combined.num_edges, combined.total_weight,
    )
    return EXIT_OK


def _decorate_graph(graph, labels, partition, matches) -> None:
    if labels is not None:
        network_mod.attach_labels(graph, labels)
    network_mod.attach_metrics(graph)
    network_mod.attach_engagement(graph, matches)
    network_mod.attach_communities(graph, partition)


def cmd_headlines(cfg: RunConfig) -> int:
    cfg.validate(need_articles=True)
    out = Path(cfg.out_dir)
    pairs, _ = _load_pairs(cfg, out)
    title_pairs = headlines_mod.title_distance(pairs)
    threshold = cfg.title_change_threshold
    headlines_mod.write_title_pairs_csv(title_pairs, out / "title_pairs.csv", threshold)

    eligible = [tp for tp in title_pairs if tp.eligible]
    changed = sum(1 for tp in eligible if tp.distance > threshold)
    fraction = changed / len(eligible) if eligible else None

    most_changed, by_magnitude = headlines_mod.rank_changers(title_pairs, threshold)
    with (out / "ranking_most_changed.csv").open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "changed_titles"])
        writer.writerows(most_changed)
    with (out / "ranking_change_magnitude.csv").open(
        "w", encoding="utf-8", newline=""
    ) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["source", "mean_distance"])
        for source, mean in by_magnitude:
            writer.writerow([source, repr(mean)])

    lexicon_paths = (cfg.bias_lexicon, cfg.positive_lexicon, cfg.negative_lexicon)
    shifts: list[headlines_mod.FeatureShift] = []
    if all(lexicon_paths):
        lexicons = {
            "bias": load_lexicon(cfg.bias_lexicon, "bias"),
            "positive": load_lexicon(cfg.positive_lexicon, "positive"),
            "negative": load_lexicon(cfg.negative_lexicon, "negative"),
        }
        stopwords = (
            load_lexicon(cfg.stopwords, "stopwords").words
            if cfg.stopwords
            else headlines_mod.DEFAULT_STOPWORDS
        )
        copiers = sorted({tp.pair.later.source for tp in eligible})
        for source in copiers:
            shifts.extend(
                headlines_mod.significant_shifts(source, title_pairs, lexicons, stopwords)
            )
    else:
        log.warning("lexicons not configured; skipping feature-shift analysis")
    headlines_mod.write_shifts_csv(shifts, out / "shifts.csv")

    lines = [
        ("eligible_pairs", len(eligible)),
        ("changed_pairs", changed),
        ("changed_fraction", repr(fraction) if fraction is not None else ""),
        ("title_change_threshold", threshold),
        ("shift_sources", len({s.source for s in shifts})),
    ]
    text = "".join(f"{k}={v}\n" for k, v in lines)
    text += "\n"
    if fraction is None:
        text += "No eligible title pairs (empty or missing titles).\n"
    else:
        text += f"{fraction * 100.0:.2f}% of copied articles changed the title "
        text += f"(cosine distance > {threshold}).\n"
    text += "\nTop sources by changed-title count:\n"
    for i, (source, count) in enumerate(most_changed[:10], start=1):
        text += f"  {i:2d}. {source}: {count}\n"
    text += "\nTop sources by mean change magnitude:\n"
    for i, (source, mean) in enumerate(by_magnitude[:10], start=1):
        text += f"  {i:2d}. {source}: {mean:.4f}\n"
    text += "\nSignificant feature shifts (p < 0.05, normal groups, n > 8):\n"
    if shifts:
        for s in shifts:
            text += (
                f"  {s.source}: {s.feature} {s.direction} "
                f"(F={s.f_stat:.3f}, p={s.p_value:.5f}, n={s.n_own})\n"
            )
    else:
        text += "  none\n"
    (out / "headline_summary.txt").write_text(text, encoding="utf-8")
    log.info(
        "headlines: %d eligible pairs, %d changed, %d feature shifts",
        len(eligible), changed, len(shifts),
    )
    return EXIT_OK


def _read_csv_rows(path: Path) -> list[dict[str, str]]:
    with path.open("r", encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _md_table(header: Sequence[str], rows: Sequence[Sequence[object]]) -> list[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    for row in rows:
        lines.append("| " + " | ".join(str(c) for c in row) + " |")
    return lines


def cmd_report(cfg: RunConfig) -> int:
    cfg.validate()
    out = Path(cfg.out_dir)
    needed = {
        "detect_summary.txt": "newsreuse detect",
        "windows.csv": "newsreuse detect",
        "pairs.csv": "newsreuse detect",
        "metrics.csv": "newsreuse graph",
        "graph_summary.txt": "newsreuse graph",
        "origin_flags.csv": "newsreuse graph",
        "engagement.csv": "newsreuse graph",
        "headline_summary.txt": "newsreuse headlines",
        "ranking_most_changed.csv": "newsreuse headlines",
        "ranking_change_magnitude.csv": "newsreuse headlines",
        "shifts.csv": "newsreuse headlines",
    }
    missing = sorted(
        {command for name, command in needed.items() if not (out / name).is_file()}
    )
    if missing:
        raise DataError(
            "missing upstream outputs; run first: " + ", ".join(missing)
        )

    detect = _read_kv(out / "detect_summary.txt")
    graph_summary = _read_kv(out / "graph_summary.txt")
    headline = _read_kv(out / "headline_summary.txt")
    windows = _read_csv_rows(out / "windows.csv")
    metrics = _read_csv_rows(out / "metrics.csv")
    engagement = _read_csv_rows(out / "engagement.csv")
    most_changed = _read_csv_rows(out / "ranking_most_changed.csv")
    by_magnitude = _read_csv_rows(out / "ranking_change_magnitude.csv")
    shifts = _read_csv_rows(out / "shifts.csv")
    flags = _read_csv_rows(out / "origin_flags.csv")

    lines = ["# Verbatim republishing analysis", ""]

    lines += ["## 1. Configuration", ""]
    config_rows = [
        ("window_days", detect.get("window_days", "")),
        ("similarity_threshold", detect.get("similarity_threshold", "")),
        ("min_body_tokens", detect.get("min_body_tokens", "")),
        ("title_change_threshold", headline.get("title_change_threshold", "")),
        ("louvain_seed", graph_summary.get("louvain_seed", "")),
        ("louvain_resolution", graph_summary.get("louvain_resolution", "")),
        ("dedupe_origin", graph_summary.get("dedupe_origin", "")),
        ("include_ambiguous", graph_summary.get("include_ambiguous", "")),
    ]
    lines += _md_table(["setting", "value"], config_rows)
    lines.append("")

    lines += ["## 2. Detection", ""]
    lines.append(
        f"{detect.get('matched_pairs')} matched pairs across "
        f"{detect.get('windows')} windows; {detect.get('sources_with_match')} of "
        f"{detect.get('sources')} sources participate in at least one match."
    )
    lines.append("")
    visible = [w for w in windows if int(w["docs"]) >= cfg.min_window_docs]
    if len(visible) < len(windows):
        lines.append(
            f"(windows with fewer than {cfg.min_window_docs} documents are omitted: "
            f"{len(windows) - len(visible)} hidden)"
        )
        lines.append("")
    lines += _md_table(
        ["window", "start", "docs", "eligible", "matches"],
        [
            (w["window_index"], w["start_utc"], w["docs"], w["eligible_docs"], w["matches"])
            for w in visible
        ],
    )
    lines.append("")

    lines += ["## 3. Network", ""]
    lines.append(
        f"Combined graph: {graph_summary.get('combined_nodes')} sources, "
        f"{graph_summary.get('combined_edges')} edges, total copied articles "
        f"{graph_summary.get('combined_weight')}; "
        f"{graph_summary.get('communities')} communities at modularity "
        f"{float(graph_summary.get('modularity', '0') or 0):.4f}."
    )
    lines.append("")

    def top10(key: str, number=float):
        rows = sorted(metrics, key=lambda r: (-number(r[key]), r["source"]))[:10]
        return [(r["source"], r[key]) for r in rows if number(r[key]) > 0]

    lines += ["### Top sources by weighted in-degree (copied from)", ""]
    lines += _md_table(["source", "weighted in"], top10("weighted_in", int))
    lines += ["", "### Top sources by weighted out-degree (copiers)", ""]
    lines += _md_table(["source", "weighted out"], top10("weighted_out", int))
    lines += ["", "### Top sources by mean in-degree centrality per window", ""]
    lines += _md_table(
        ["source", "mean centrality"],
        [(s, f"{float(v):.4f}") for s, v in top10("in_centrality_mean")],
    )
    lines += ["", "### Top sources by mean betweenness per window", ""]
    lines += _md_table(
        ["source", "mean betweenness"],
        [(s, f"{float(v):.4f}") for s, v in top10("betweenness_mean")],
    )
    engaged = [r for r in engagement if r["median_fb_shares"]]
    engaged.sort(key=lambda r: (-float(r["median_fb_shares"]), r["source"]))
    lines += ["", "### Top sources by median Facebook shares of matched articles", ""]
    lines += _md_table(
        ["source", "median shares", "median reactions"],
        [
            (r["source"], f"{float(r['median_fb_shares']):.1f}",
             f"{float(r['median_fb_reactions']):.1f}" if r["median_fb_reactions"] else "")
            for r in engaged[:10]
        ],
    )
    lines.append("")

    lines += ["## 4. Headlines", ""]
    if headline.get("changed_fraction"):
        pct = float(headline["changed_fraction"]) * 100.0
        lines.append(
            f"{pct:.2f}% of {headline.get('eligible_pairs')} eligible copied "
            f"articles changed the title (cosine distance > "
            f"{headline.get('title_change_threshold')})."
        )
    else:
        lines.append("No eligible title pairs.")
    lines.append("")
    lines += ["### Most titles changed", ""]
    lines += _md_table(
        ["source", "changed titles"],
        [(r["source"], r["changed_titles"]) for r in most_changed[:10]],
    )
    lines += ["", "### Changed titles by the most", ""]
    lines += _md_table(
        ["source", "mean distance"],
        [(r["source"], f"{float(r['mean_distance']):.4f}") for r in by_magnitude[:10]],
    )
    lines += ["", "### Significant feature shifts", ""]
    if shifts:
        lines += _md_table(
            ["source", "feature", "direction", "p"],
            [
                (r["source"], r["feature"], r["direction"], f"{float(r['p']):.5f}")
                for r in shifts
            ],
        )
    else:
        lines.append("none")
    lines.append("")

    lines += ["## 5. Review flags", ""]
    lines.append(
        "Sources whose copied-from articles concentrate on a single day; "
        "timestamp-based direction inference may have mislabeled the origin."
    )
    lines.append("")
    if flags:
        lines += _md_table(
            ["source", "dominant day", "share", "inbound pairs"],
            [
                (r["source"], r["dominant_day"], f"{float(r['share']):.2f}",
                 r["inbound_pairs"])
                for r in flags
            ],
        )
    else:
        lines.append("none")
    lines.append("")

    (out / "report.md").write_text("\n".join(lines), encoding="utf-8")
    log.info("report: wrote %s", out / "report.md")
    return EXIT_OK


def cmd_gen_fixture(args: argparse.Namespace) -> int:
    spec = FixtureSpec(
        sources=args.sources,
        articles_per_source=args.articles_per_source,
        copies=args.copies,
        window_days=args.window_days,
        windows=args.windows,
        seed=args.seed,
    )
    try:
        paths = generate_fixture(args.out_dir, spec)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    log.info("fixture written to %s (%d files)", args.out_dir, len(paths))
    print(paths["config"])
    return EXIT_OK


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(
            stream=sys.stderr,
            level=logging.DEBUG if args.verbose else logging.INFO,
            format="%(levelname)s %(name)s: %(message)s",
        )
        if args.command == "gen-fixture":
            return cmd_gen_fixture(args)
        cfg = build_config(args)
        if args.command == "detect":
            return cmd_detect(cfg)
        if args.command == "graph":
            return cmd_graph(cfg)
        if args.command == "headlines":
            return cmd_headlines(cfg)
        if args.command == "report":
            return cmd_report(cfg)
        raise UsageError(f"unknown command {args.command!r}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        log.error("%s", exc)
        return EXIT_DATA
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_DATA
    except Exception:  # pragma: no cover - defensive
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
