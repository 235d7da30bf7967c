"""Republishing graphs: construction, metrics, communities, and export.

Edge A -> B with weight w means source A published w articles copied from
source B, direction inferred from publication timestamps. Metrics follow
that reading: a source's weighted in-degree is the number of articles other
sources copied from it.
"""

from __future__ import annotations

import csv
import heapq
import itertools
import logging
import random
import statistics
from collections import Counter, defaultdict, deque
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Mapping, Sequence
from xml.sax.saxutils import escape, quoteattr

from .corpus import SourceLabels
from .errors import DataError
from .similarity import FORWARD, MatchedPair

log = logging.getLogger(__name__)

COMBINED = "combined"


class RepublishGraph:
    """Directed weighted graph of sources with per-node attribute dicts."""

    def __init__(self, window_index: int | str):
        self.window_index = window_index
        self._nodes: dict[str, dict] = {}
        self._out: dict[str, dict[str, int]] = {}
        self._in: dict[str, dict[str, int]] = {}

    def add_node(self, source: str) -> dict:
        attrs = self._nodes.get(source)
        if attrs is None:
            attrs = {}
            self._nodes[source] = attrs
            self._out[source] = {}
            self._in[source] = {}
        return attrs

    def add_edge(self, frm: str, to: str, weight: int = 1) -> None:
        if frm == to:
            raise ValueError(f"self-loop on {frm!r}")
        if weight <= 0:
            raise ValueError("edge weight must be positive")
        self.add_node(frm)
        self.add_node(to)
        self._out[frm][to] = self._out[frm].get(to, 0) + weight
        self._in[to][frm] = self._in[to].get(frm, 0) + weight

    def has_node(self, source: str) -> bool:
        return source in self._nodes

    def nodes(self) -> list[str]:
        return sorted(self._nodes)

    def edges(self) -> list[tuple[str, str, int]]:
        return sorted(
            (frm, to, w) for frm, outs in self._out.items() for to, w in outs.items()
        )

    def node_attrs(self, source: str) -> dict:
        return self._nodes[source]

    def weight(self, frm: str, to: str) -> int:
        return self._out.get(frm, {}).get(to, 0)

    def successors(self, source: str) -> list[str]:
        return sorted(self._out.get(source, {}))

    def predecessors(self, source: str) -> list[str]:
        return sorted(self._in.get(source, {}))

    def in_weight(self, source: str) -> int:
        return sum(self._in.get(source, {}).values())

    def out_weight(self, source: str) -> int:
        return sum(self._out.get(source, {}).values())

    def in_degree(self, source: str) -> int:
        return len(self._in.get(source, {}))

    def out_degree(self, source: str) -> int:
        return len(self._out.get(source, {}))

    @property
    def num_nodes(self) -> int:
        return len(self._nodes)

    @property
    def num_edges(self) -> int:
        return sum(len(outs) for outs in self._out.values())

    @property
    def total_weight(self) -> int:
        return sum(w for outs in self._out.values() for w in outs.values())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RepublishGraph):
            return NotImplemented
        return (
            self.window_index == other.window_index
            and self._nodes == other._nodes
            and self._out == other._out
        )

    def __repr__(self) -> str:
        return (
            f"RepublishGraph(window={self.window_index!r}, "
            f"nodes={self.num_nodes}, edges={self.num_edges})"
        )


def _story_clusters(pairs: Sequence[MatchedPair]) -> list[list[MatchedPair]]:
    parent: dict[str, str] = {}

    def find(x: str) -> str:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p in pairs:
        for aid in (p.earlier.id, p.later.id):
            parent.setdefault(aid, aid)
        ra, rb = find(p.earlier.id), find(p.later.id)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    clusters: dict[str, list[MatchedPair]] = defaultdict(list)
    for p in pairs:
        clusters[find(p.earlier.id)].append(p)
    return [clusters[root] for root in sorted(clusters)]


def build_window_graph(
    matches: Sequence[MatchedPair],
    *,
    include_ambiguous: bool = False,
    dedupe_origin: bool = False,
    window_index: int | str | None = None,
) -> RepublishGraph:
    """Aggregate matched pairs into a directed weighted source graph.

    Ambiguous-direction pairs (identical timestamps) are excluded unless
    `include_ambiguous` is set, in which case the lexicographically smaller
    source is treated as the original. With `dedupe_origin`, pairwise links
    within one story cluster collapse to a single edge per copying article,
    pointing at the cluster's earliest publisher.
    """
    if window_index is None:
        indices = {p.window_index for p in matches}
        if len(indices) > 1:
            raise ValueError(f"matches span windows {sorted(indices)}; pass window_index")
        window_index = indices.pop() if indices else 0
    graph = RepublishGraph(window_index)
    included = [
        p for p in matches if p.direction == FORWARD or include_ambiguous
    ]
    if dedupe_origin:
        for cluster in _story_clusters(included):
            articles = {}
            for p in cluster:
                articles[p.earlier.id] = p.earlier
                articles[p.later.id] = p.later
            origin = min(
                articles.values(), key=lambda a: (a.published_utc, a.source, a.id)
            )
            for aid in sorted(articles):
                article = articles[aid]
                if aid == origin.id or article.source == origin.source:
                    continue
                graph.add_edge(article.source, origin.source)
        return graph
    for p in included:
        graph.add_edge(p.later.source, p.earlier.source)
    return graph


def merge_graphs(graphs: Iterable[RepublishGraph]) -> RepublishGraph:
    """Union of nodes, edge weights summed; node attrs merge in order."""
    combined = RepublishGraph(COMBINED)
    for graph in graphs:
        for node in graph.nodes():
            combined.add_node(node).update(graph.node_attrs(node))
        for frm, to, w in graph.edges():
            combined.add_edge(frm, to, w)
    return combined


@dataclass(frozen=True)
class DegreeMetrics:
    weighted_in: int
    weighted_out: int
    in_degree_centrality: float


def degree_metrics(graph: RepublishGraph) -> dict[str, DegreeMetrics]:
    n = graph.num_nodes
    out = {}
    for v in graph.nodes():
        centrality = graph.in_degree(v) / (n - 1) if n > 1 else 0.0
        out[v] = DegreeMetrics(graph.in_weight(v), graph.out_weight(v), centrality)
    return out


def _bfs_shortest_paths(succ, s):
    dist = {s: 0}
    sigma = {s: 1.0}
    preds: dict[str, list[str]] = defaultdict(list)
    order = []
    queue = deque([s])
    while queue:
        v = queue.popleft()
        order.append(v)
        dv = dist[v]
        sv = sigma[v]
        for w in succ[v]:
            if w not in dist:
                dist[w] = dv + 1
                sigma[w] = 0.0
                queue.append(w)
            if dist[w] == dv + 1:
                sigma[w] += sv
                preds[w].append(v)
    return order, sigma, preds


def _dijkstra_shortest_paths(succ_weights, s):
    # Edge length is 1/weight so heavier copy flows read as shorter paths.
    dist: dict[str, float] = {}
    seen = {s: 0.0}
    sigma: dict[str, float] = defaultdict(float)
    sigma[s] = 1.0
    preds: dict[str, list[str]] = defaultdict(list)
    order = []
    counter = itertools.count()
    heap = [(0.0, next(counter), s, s)]
    while heap:
        d, _, pred, v = heapq.heappop(heap)
        if v in dist:
            continue
        sigma[v] += sigma[pred]
        order.append(v)
        dist[v] = d
        for w, weight in succ_weights[v].items():
            vw = d + 1.0 / weight
            if w not in dist and (w not in seen or vw < seen[w]):
                seen[w] = vw
                sigma[w] = 0.0
                preds[w] = [v]
                heapq.heappush(heap, (vw, next(counter), v, w))
            elif vw == seen.get(w):
                sigma[w] += sigma[v]
                preds[w].append(v)
    return order, sigma, preds


def betweenness(
    graph: RepublishGraph, *, weighted_inverse: bool = False
) -> dict[str, float]:
    """Directed betweenness via Brandes's dependency accumulation.

    Unnormalized. Edge weights are copy counts, not distances, so the
    default treats the graph as unweighted; `weighted_inverse` uses length
    1/weight instead.
    """
    nodes = graph.nodes()
    cb = dict.fromkeys(nodes, 0.0)
    if weighted_inverse:
        succ_w = {v: {w: graph.weight(v, w) for w in graph.successors(v)} for v in nodes}
    else:
        succ = {v: graph.successors(v) for v in nodes}
    for s in nodes:
        if weighted_inverse:
            order, sigma, preds = _dijkstra_shortest_paths(succ_w, s)
        else:
            order, sigma, preds = _bfs_shortest_paths(succ, s)
        delta = dict.fromkeys(order, 0.0)
        for w in reversed(order):
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    return cb


def _undirected_projection(graph: RepublishGraph) -> dict[str, dict[str, float]]:
    adj: dict[str, dict[str, float]] = {v: {} for v in graph.nodes()}
    for frm, to, w in graph.edges():
        adj[frm][to] = adj[frm].get(to, 0.0) + w
        adj[to][frm] = adj[to].get(frm, 0.0) + w
    return adj


def modularity(
    graph: RepublishGraph,
    communities: Mapping[str, int],
    resolution: float = 1.0,
) -> float:
    """Newman modularity of a partition on the undirected projection."""
    adj = _undirected_projection(graph)
    missing = [v for v in adj if v not in communities]
    if missing:
        raise DataError(f"partition is missing nodes: {missing[:5]}")
    degree = {v: sum(ws.values()) for v, ws in adj.items()}
    m2 = sum(degree.values())
    if m2 == 0.0:
        return 0.0
    internal: dict[int, float] = defaultdict(float)
    total: dict[int, float] = defaultdict(float)
    for v, ws in adj.items():
        cv = communities[v]
        total[cv] += degree[v]
        for u, w in ws.items():
            if communities[u] == cv:
                internal[cv] += w
    q = 0.0
    for c in total:
        q += internal[c] / m2 - resolution * (total[c] / m2) ** 2
    return q


def _louvain_one_level(
    adj: Mapping[object, Mapping[object, float]],
    resolution: float,
    rng: random.Random,
) -> tuple[dict, bool]:
    nodes = sorted(adj)
    comm = {v: v for v in nodes}
    k = {
        v: sum(w for u, w in adj[v].items() if u != v) + 2.0 * adj[v].get(v, 0.0)
        for v in nodes
    }
    m2 = sum(k.values())
    if m2 == 0.0:
        return comm, False
    sigma_tot: dict[object, float] = defaultdict(float)
    for v in nodes:
        sigma_tot[comm[v]] += k[v]
    order = list(nodes)
    rng.shuffle(order)
    improved = False
    moved = True
    while moved:
        moved = False
        for v in order:
            cv = comm[v]
            neighbor_weight: dict[object, float] = defaultdict(float)
            for u, w in adj[v].items():
                if u != v:
                    neighbor_weight[comm[u]] += w
            sigma_tot[cv] -= k[v]
            best_c = cv
            best_gain = neighbor_weight.get(cv, 0.0) - resolution * sigma_tot[cv] * k[v] / m2
            for c in sorted(neighbor_weight):
                if c == cv:
                    continue
                gain = neighbor_weight[c] - resolution * sigma_tot[c] * k[v] / m2
                if gain > best_gain + 1e-12:
                    best_gain = gain
                    best_c = c
            sigma_tot[best_c] += k[v]
            if best_c != cv:
                comm[v] = best_c
                moved = True
                improved = True
    return comm, improved


def _aggregate(
    adj: Mapping[object, Mapping[object, float]], comm: Mapping[object, object]
) -> tuple[dict[int, dict[int, float]], dict[object, int]]:
    labels = {label: i for i, label in enumerate(sorted(set(comm.values())))}
    relabel = {v: labels[comm[v]] for v in comm}
    agg: dict[int, dict[int, float]] = {c: {} for c in labels.values()}
    for v, ws in adj.items():
        cv = relabel[v]
        row = agg[cv]
        for u, w in ws.items():
            cu = relabel[u]
            if cu == cv and u != v:
                # Both endpoints iterate this edge; halve to store it once.
                row[cv] = row.get(cv, 0.0) + w / 2.0
            elif u == v:
                row[cv] = row.get(cv, 0.0) + w
            else:
                row[cu] = row.get(cu, 0.0) + w
    return agg, relabel


@dataclass(frozen=True)
class Partition:
    """Community assignment per source plus its modularity score."""

    communities: dict[str, int]
    modularity: float


def louvain(
    graph: RepublishGraph, resolution: float = 1.0, seed: int = 0
) -> Partition:
    """Seeded Louvain community detection on the undirected projection.

    Node visitation order is shuffled by a seeded RNG after a canonical
    sort, so results do not depend on input node order. Community ids are
    relabeled 0..k-1 by each community's smallest member name.
    """
    adj: Mapping = _undirected_projection(graph)
    node_list = sorted(adj)
    rng = random.Random(seed)
    membership: dict[str, object] = {v: v for v in node_list}
    while True:
        comm, improved = _louvain_one_level(adj, resolution, rng)
        if not improved:
            break
        agg, relabel = _aggregate(adj, comm)
        membership = {v: relabel[membership[v]] for v in membership}
        adj = agg
    groups: dict[object, list[str]] = defaultdict(list)
    for v in node_list:
        groups[membership[v]].append(v)
    ordered = sorted(groups.values(), key=lambda members: min(members))
    communities = {v: i for i, members in enumerate(ordered) for v in members}
    return Partition(communities, modularity(graph, communities, resolution))


@dataclass(frozen=True)
class NodeMetrics:
    """Combined-graph totals plus per-window centrality trajectories."""

    source: str
    weighted_in_degree: int
    weighted_out_degree: int
    in_degree_centrality: float
    betweenness: float
    in_centrality_windows: tuple[float, ...]
    betweenness_windows: tuple[float, ...]
    in_centrality_mean: float
    in_centrality_var: float
    betweenness_mean: float
    betweenness_var: float


def compute_node_metrics(
    combined: RepublishGraph, window_graphs: Sequence[RepublishGraph]
) -> list[NodeMetrics]:
    """Per-source metric suite; absent-from-window counts as zero there."""
    combined_degrees = degree_metrics(combined)
    combined_betweenness = betweenness(combined)
    per_window = [(degree_metrics(g), betweenness(g)) for g in window_graphs]
    sources = set(combined.nodes())
    for g in window_graphs:
        sources.update(g.nodes())
    metrics = []
    for source in sorted(sources):
        cent = tuple(
            deg[source].in_degree_centrality if source in deg else 0.0
            for deg, _ in per_window
        )
        betw = tuple(bc.get(source, 0.0) for _, bc in per_window)
        deg = combined_degrees.get(source, DegreeMetrics(0, 0, 0.0))
        metrics.append(
            NodeMetrics(
                source=source,
                weighted_in_degree=deg.weighted_in,
                weighted_out_degree=deg.weighted_out,
                in_degree_centrality=deg.in_degree_centrality,
                betweenness=combined_betweenness.get(source, 0.0),
                in_centrality_windows=cent,
                betweenness_windows=betw,
                in_centrality_mean=statistics.fmean(cent) if cent else 0.0,
                in_centrality_var=statistics.pvariance(cent) if cent else 0.0,
                betweenness_mean=statistics.fmean(betw) if betw else 0.0,
                betweenness_var=statistics.pvariance(betw) if betw else 0.0,
            )
        )
    return metrics


METRICS_HEADER = [
    "source",
    "weighted_in",
    "weighted_out",
    "in_centrality_mean",
    "in_centrality_var",
    "betweenness_mean",
    "betweenness_var",
    "community",
]


def write_metrics_csv(
    metrics: Sequence[NodeMetrics],
    path: str | Path,
    communities: Mapping[str, int] | None = None,
) -> None:
    communities = communities or {}
    with Path(path).open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METRICS_HEADER)
        for m in metrics:
            community = communities.get(m.source)
            writer.writerow(
                [
                    m.source,
                    m.weighted_in_degree,
                    m.weighted_out_degree,
                    repr(m.in_centrality_mean),
                    repr(m.in_centrality_var),
                    repr(m.betweenness_mean),
                    repr(m.betweenness_var),
                    "" if community is None else community,
                ]
            )


def attach_labels(
    graph: RepublishGraph, labels: Mapping[str, SourceLabels]
) -> RepublishGraph:
    for node in graph.nodes():
        rec = labels.get(node) or SourceLabels.unknown(node)
        attrs = graph.node_attrs(node)
        attrs["audience"] = rec.audience.value
        attrs["reliability"] = rec.reliability.value
        attrs["leaning"] = rec.leaning.value
    return graph


def attach_communities(graph: RepublishGraph, partition: Partition) -> RepublishGraph:
    for node in graph.nodes():
        community = partition.communities.get(node)
        if community is not None:
            graph.node_attrs(node)["community"] = community
    return graph


def attach_metrics(graph: RepublishGraph) -> RepublishGraph:
    degrees = degree_metrics(graph)
    central = betweenness(graph)
    for node in graph.nodes():
        attrs = graph.node_attrs(node)
        attrs["weighted_in"] = degrees[node].weighted_in
        attrs["weighted_out"] = degrees[node].weighted_out
        attrs["in_degree_centrality"] = degrees[node].in_degree_centrality
        attrs["betweenness"] = central[node]
    return graph


def attach_engagement(
    graph: RepublishGraph, matches: Sequence[MatchedPair]
) -> RepublishGraph:
    """Median Facebook engagement over each node's matched articles.

    Articles count once regardless of how many pairs they appear in; a node
    with no engagement data gets a null attribute that exports omit.
    """
    per_source: dict[str, dict[str, object]] = defaultdict(dict)
    for pair in matches:
        for article in (pair.earlier, pair.later):
            per_source[article.source][article.id] = article
    for node in graph.nodes():
        articles = per_source.get(node, {}).values()
        shares = sorted(a.fb_shares for a in articles if a.fb_shares is not None)
        reactions = sorted(a.fb_reactions for a in articles if a.fb_reactions is not None)
        attrs = graph.node_attrs(node)
        attrs["median_fb_shares"] = float(statistics.median(shares)) if shares else None
        attrs["median_fb_reactions"] = (
            float(statistics.median(reactions)) if reactions else None
        )
    return graph


def flag_single_day_origins(
    matches: Sequence[MatchedPair],
    *,
    min_inbound: int = 5,
    dominance: float = 0.8,
) -> list[tuple[str, str, float, int]]:
    """Sources whose copied-from articles cluster on a single UTC day.

    Timestamp-only direction inference mislabels origin when one outlet
    happens to post shared material (wire stories, speeches) first; this
    surfaces such nodes for manual review. Returns (source, dominant day,
    share, inbound pair count) tuples.
    """
    days: dict[str, Counter] = defaultdict(Counter)
    for p in matches:
        if p.direction != FORWARD:
            continue
        day = datetime.fromtimestamp(p.earlier.published_utc, tz=timezone.utc)
        days[p.earlier.source][day.strftime("%Y-%m-%d")] += 1
    flags = []
    for source in sorted(days):
        counts = days[source]
        inbound = sum(counts.values())
        if inbound < min_inbound:
            continue
        day, top = max(counts.items(), key=lambda kv: (kv[1], kv[0]))
        share = top / inbound
        if share >= dominance:
            flags.append((source, day, share, inbound))
    return flags


def _graphml_type(values: list) -> str:
    if any(isinstance(v, float) for v in values):
        return "double"
    if all(isinstance(v, int) for v in values):
        return "long"
    return "string"


def _graphml_value(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return escape(str(value))


def export_graphml(graph: RepublishGraph, path: str | Path) -> None:
    """Write GraphML with key declarations for every attribute in use.

    Output is byte-deterministic: nodes, edges, and keys are sorted and
    null attributes are omitted.
    """
    attr_values: dict[str, list] = defaultdict(list)
    for node in graph.nodes():
        for name, value in graph.node_attrs(node).items():
            if value is not None:
                attr_values[name].append(value)
    node_keys = {name: f"n_{name}" for name in sorted(attr_values)}
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        '<graphml xmlns="http://graphml.graphdrawing.org/xmlns"'
        ' xmlns:xsi="http://www.w3.org/2001/XMLSchema-instance"'
        ' xsi:schemaLocation="http://graphml.graphdrawing.org/xmlns'
        ' http://graphml.graphdrawing.org/xmlns/1.0/graphml.xsd">',
    ]
    for name in sorted(attr_values):
        kind = _graphml_type(attr_values[name])
        lines.append(
            f'  <key id="{node_keys[name]}" for="node" attr.name="{escape(name)}"'
            f' attr.type="{kind}"/>'
        )
    lines.append('  <key id="e_weight" for="edge" attr.name="weight" attr.type="long"/>')
    graph_id = (
        graph.window_index
        if isinstance(graph.window_index, str)
        else f"window_{graph.window_index}"
    )
    lines.append(f'  <graph id={quoteattr(str(graph_id))} edgedefault="directed">')
    for node in graph.nodes():
        attrs = graph.node_attrs(node)
        data = [
            f'      <data key="{node_keys[name]}">{_graphml_value(attrs[name])}</data>'
            for name in sorted(attrs)
            if attrs[name] is not None
        ]
        if data:
            lines.append(f"    <node id={quoteattr(node)}>")
            lines.extend(data)
            lines.append("    </node>")
        else:
            lines.append(f"    <node id={quoteattr(node)}/>")
    for frm, to, w in graph.edges():
        lines.append(
            f"    <edge source={quoteattr(frm)} target={quoteattr(to)}>"
            f'<data key="e_weight">{w}</data></edge>'
        )
    lines.append("  </graph>")
    lines.append("</graphml>")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


_PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#aec7e8", "#ffbb78", "#98df8a", "#ff9896", "#c5b0d5",
    "#c49c94", "#f7b6d2", "#c7c7c7", "#dbdb8d", "#9edae5",
]


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(
    graph: RepublishGraph, path: str | Path, *, color_by: str = "community"
) -> None:
    """Write a Graphviz digraph, penwidth scaled by edge weight and node
    fill color bucketed by the chosen attribute."""
    values = sorted(
        {
            graph.node_attrs(v)[color_by]
            for v in graph.nodes()
            if graph.node_attrs(v).get(color_by) is not None
        },
        key=str,
    )
    color_of = {value: _PALETTE[i % len(_PALETTE)] for i, value in enumerate(values)}
    max_weight = max((w for _, _, w in graph.edges()), default=1)
    lines = ["digraph republishing {", "  node [shape=ellipse, style=filled];"]
    for node in graph.nodes():
        value = graph.node_attrs(node).get(color_by)
        color = color_of.get(value, "#ffffff")
        lines.append(f'  {_dot_quote(node)} [fillcolor="{color}"];')
    for frm, to, w in graph.edges():
        penwidth = max(0.5, 6.0 * w / max_weight)
        lines.append(
            f"  {_dot_quote(frm)} -> {_dot_quote(to)} "
            f'[weight={w}, penwidth={penwidth:.3f}, label="{w}"];'
        )
    lines.append("}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def export_graph(
    graph: RepublishGraph,
    format: str,
    path: str | Path,
    *,
    color_by: str = "community",
) -> None:
    if format == "graphml":
        export_graphml(graph, path)
    elif format == "dot":
        export_dot(graph, path, color_by=color_by)
    else:
        raise ValueError(f"unknown graph format {format!r}")
