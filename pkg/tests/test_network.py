import itertools
import random
from dataclasses import replace

import networkx as nx
import pytest

from newsreuse.errors import DataError
from newsreuse.network import (
    COMBINED,
    RepublishGraph,
    attach_engagement,
    betweenness,
    build_window_graph,
    compute_node_metrics,
    degree_metrics,
    export_dot,
    export_graphml,
    flag_single_day_origins,
    louvain,
    merge_graphs,
    modularity,
)

from helpers import BASE_TS, make_pair
from oracles import direct_modularity, enumeration_betweenness


def _graph(edges, window=0):
    g = RepublishGraph(window)
    for frm, to, *w in edges:
        g.add_edge(frm, to, w[0] if w else 1)
    return g


def test_build_aggregates_repeat_pairs():
    pairs = [
        make_pair("y", "x", earlier_id=f"y{i}", later_id=f"x{i}") for i in range(3)
    ]
    graph = build_window_graph(pairs)
    assert graph.edges() == [("x", "y", 3)]
    assert graph.total_weight == 3


def test_build_chain_direction():
    pairs = [make_pair("b", "a"), make_pair("c", "b")]
    graph = build_window_graph(pairs)
    assert ("a", "b", 1) in graph.edges()
    assert ("b", "c", 1) in graph.edges()


def test_build_excludes_ambiguous_by_default():
    tie = make_pair("a", "b", delta=0)
    assert tie.direction == "ambiguous"
    assert build_window_graph([tie]).edges() == []
    with_flag = build_window_graph([tie], include_ambiguous=True)
    assert with_flag.edges() == [("b", "a", 1)]


def test_build_rejects_mixed_windows_without_override():
    pairs = [make_pair("a", "b", window=0), make_pair("b", "c", window=1)]
    with pytest.raises(ValueError):
        build_window_graph(pairs)
    graph = build_window_graph(pairs, window_index=COMBINED)
    assert graph.total_weight == 2


def test_weight_conservation():
    rng = random.Random(3)
    pairs = []
    for i in range(40):
        a, b = rng.sample(["s1", "s2", "s3", "s4", "s5"], 2)
        pairs.append(
            make_pair(a, b, earlier_id=f"e{i}", later_id=f"l{i}",
                      delta=rng.choice([0, 600, 3600]))
        )
    graph = build_window_graph(pairs)
    forward = sum(1 for p in pairs if p.direction == "forward")
    assert graph.total_weight == forward


def test_dedupe_origin_collapses_star():
    first = make_pair("origin", "copier1", earlier_id="o1", later_id="c1")
    second = make_pair("origin", "copier2", earlier_id="o1", later_id="c2", delta=7200)
    # copier1's article also matches copier2's article (same story).
    cross = make_pair(
        "copier1", "copier2", earlier_id="c1", later_id="c2",
        earlier_ts=BASE_TS + 3600, delta=3600,
    )
    full = build_window_graph([first, second, cross])
    assert full.total_weight == 3
    deduped = build_window_graph([first, second, cross], dedupe_origin=True)
    assert deduped.edges() == [("copier1", "origin", 1), ("copier2", "origin", 1)]


def test_merge_sums_weights():
    merged = merge_graphs([_graph([("a", "b", 2)]), _graph([("a", "b", 3)], window=1)])
    assert merged.window_index == COMBINED
    assert merged.edges() == [("a", "b", 5)]


def test_merge_disjoint_union():
    merged = merge_graphs([_graph([("a", "b")]), _graph([("c", "d")], window=1)])
    assert merged.edges() == [("a", "b", 1), ("c", "d", 1)]


def test_merge_associative_and_commutative():
    a = _graph([("a", "b", 2), ("b", "c", 1)])
    b = _graph([("a", "b", 1), ("c", "a", 4)], window=1)
    c = _graph([("d", "a", 3)], window=2)
    one = merge_graphs([merge_graphs([a, b]), c])
    two = merge_graphs([a, merge_graphs([b, c])])
    flat = merge_graphs([c, b, a])
    assert one == two == flat


def test_merge_equals_build_from_concatenation():
    rng = random.Random(9)
    sources = ["s1", "s2", "s3", "s4"]
    all_pairs = []
    window_graphs = []
    for w in range(6):
        pairs = []
        for i in range(rng.randint(0, 8)):
            a, b = rng.sample(sources, 2)
            pairs.append(
                make_pair(a, b, window=w, earlier_id=f"w{w}e{i}", later_id=f"w{w}l{i}")
            )
        all_pairs.extend(pairs)
        window_graphs.append(build_window_graph(pairs, window_index=w))
    merged = merge_graphs(window_graphs)
    rebuilt = build_window_graph(all_pairs, window_index=COMBINED)
    assert merged == rebuilt


def test_degree_metrics_star():
    graph = _graph([(leaf, "hub") for leaf in ["l1", "l2", "l3", "l4"]])
    metrics = degree_metrics(graph)
    assert metrics["hub"].weighted_in == 4
    assert metrics["hub"].weighted_out == 0
    assert metrics["hub"].in_degree_centrality == 1.0
    assert metrics["l1"].in_degree_centrality == 0.0


def test_degree_metrics_isolated_node():
    graph = _graph([("a", "b")])
    graph.add_node("loner")
    metrics = degree_metrics(graph)
    assert metrics["loner"].weighted_in == 0
    assert metrics["loner"].weighted_out == 0
    assert metrics["loner"].in_degree_centrality == 0.0


def test_degree_metrics_match_adjacency_sums():
    rng = random.Random(17)
    nodes = [f"n{i}" for i in range(10)]
    graph = RepublishGraph(0)
    weights = {}
    for a, b in itertools.permutations(nodes, 2):
        if rng.random() < 0.2:
            w = rng.randint(1, 5)
            graph.add_edge(a, b, w)
            weights[(a, b)] = w
    metrics = degree_metrics(graph)
    for v in nodes:
        if not graph.has_node(v):
            continue
        assert metrics[v].weighted_in == sum(
            w for (a, b), w in weights.items() if b == v
        )
        assert metrics[v].weighted_out == sum(
            w for (a, b), w in weights.items() if a == v
        )


def test_removing_edge_never_increases_in_degree():
    graph = _graph([("a", "b", 2), ("c", "b", 1), ("b", "a", 1)])
    before = {v: graph.in_weight(v) for v in graph.nodes()}
    smaller = _graph([("a", "b", 2), ("b", "a", 1)])
    for v in smaller.nodes():
        assert smaller.in_weight(v) <= before[v]


def test_betweenness_path():
    graph = _graph([("a", "b"), ("b", "c")])
    cb = betweenness(graph)
    assert cb == {"a": 0.0, "b": 1.0, "c": 0.0}


def test_betweenness_complete_digraph():
    nodes = ["a", "b", "c"]
    graph = _graph([(a, b) for a, b in itertools.permutations(nodes, 2)])
    assert betweenness(graph) == {"a": 0.0, "b": 0.0, "c": 0.0}


def test_betweenness_matches_enumeration_oracle():
    rng = random.Random(101)
    for trial in range(30):
        n = rng.randint(2, 8)
        nodes = [f"n{i}" for i in range(n)]
        edges = [
            (a, b) for a, b in itertools.permutations(nodes, 2)
            if rng.random() < 0.35
        ]
        graph = RepublishGraph(0)
        for v in nodes:
            graph.add_node(v)
        for a, b in edges:
            graph.add_edge(a, b, rng.randint(1, 4))
        got = betweenness(graph)
        want = enumeration_betweenness(nodes, edges)
        for v in nodes:
            assert abs(got[v] - want[v]) < 1e-9, f"trial {trial} node {v}"


def test_betweenness_weighted_inverse_prefers_heavy_edges():
    graph = _graph([("a", "b", 10), ("b", "c", 10), ("a", "c", 1)])
    assert betweenness(graph)["b"] == 0.0
    assert betweenness(graph, weighted_inverse=True)["b"] == 1.0


def _two_cliques(bridge=True):
    graph = RepublishGraph(0)
    left = [f"l{i}" for i in range(8)]
    right = [f"r{i}" for i in range(8)]
    for group in (left, right):
        for a, b in itertools.combinations(group, 2):
            graph.add_edge(a, b)
    if bridge:
        graph.add_edge("l0", "r0")
    return graph, left, right


def test_louvain_recovers_planted_cliques():
    graph, left, right = _two_cliques()
    partition = louvain(graph, seed=0)
    communities = partition.communities
    assert len({communities[v] for v in left}) == 1
    assert len({communities[v] for v in right}) == 1
    assert communities["l0"] != communities["r0"]
    assert partition.modularity > 0.45
    direct = direct_modularity(graph.edges(), communities)
    assert abs(partition.modularity - direct) < 1e-9


def test_louvain_edgeless_graph():
    graph = RepublishGraph(0)
    for v in ("a", "b", "c"):
        graph.add_node(v)
    partition = louvain(graph, seed=1)
    assert sorted(partition.communities.values()) == [0, 1, 2]
    assert partition.modularity == 0.0


def test_louvain_dyad_single_community():
    partition = louvain(_graph([("a", "b", 2)]), seed=5)
    assert partition.communities["a"] == partition.communities["b"]


def test_louvain_invariant_to_insertion_order():
    edges = [("a", "b"), ("b", "c"), ("c", "a"), ("d", "e"), ("e", "f"), ("f", "d"),
             ("a", "d")]
    forward = RepublishGraph(0)
    for frm, to in edges:
        forward.add_edge(frm, to)
    backward = RepublishGraph(0)
    for frm, to in reversed(edges):
        backward.add_edge(frm, to)
    assert louvain(forward, seed=3) == louvain(backward, seed=3)


def test_modularity_disconnected_cliques_half():
    graph, left, right = _two_cliques(bridge=False)
    partition = {v: 0 for v in left} | {v: 1 for v in right}
    assert modularity(graph, partition) == pytest.approx(0.5, abs=1e-12)


def test_modularity_two_cliques_with_bridge_hand_value():
    graph, left, right = _two_cliques()
    partition = {v: 0 for v in left} | {v: 1 for v in right}
    # m = 57, per clique: sigma_in = 56, sigma_tot = 57.
    expected = 2 * (56 / 114 - (57 / 114) ** 2)
    assert modularity(graph, partition) == pytest.approx(expected, abs=1e-12)
    whole = {v: 0 for v in list(left) + list(right)}
    assert modularity(graph, whole) == pytest.approx(0.0, abs=1e-12)


def test_modularity_edgeless_zero_and_missing_node_errors():
    graph = RepublishGraph(0)
    graph.add_node("a")
    assert modularity(graph, {"a": 0}) == 0.0
    graph.add_edge("a", "b")
    with pytest.raises(DataError):
        modularity(graph, {"a": 0})


def test_attach_engagement_medians():
    # Three matched articles for one source with shares 10, 20, 30.
    p1 = make_pair("orig", "copier", earlier_id="o1", later_id="c1")
    p2 = make_pair("orig", "copier", earlier_id="o2", later_id="c2")
    p3 = make_pair("orig", "copier", earlier_id="o3", later_id="c3")
    p1 = replace(p1, earlier=replace(p1.earlier, fb_shares=10))
    p2 = replace(p2, earlier=replace(p2.earlier, fb_shares=20))
    p3 = replace(p3, earlier=replace(p3.earlier, fb_shares=30, fb_reactions=4))
    pairs = [p1, p2, p3]
    graph = build_window_graph(pairs)
    attach_engagement(graph, pairs)
    assert graph.node_attrs("orig")["median_fb_shares"] == 20.0
    assert graph.node_attrs("orig")["median_fb_reactions"] == 4.0
    assert graph.node_attrs("copier")["median_fb_shares"] is None

    even = [p1, p2]
    graph2 = build_window_graph(even)
    attach_engagement(graph2, even)
    assert graph2.node_attrs("orig")["median_fb_shares"] == 15.0


def test_attach_engagement_dedupes_articles():
    p1 = make_pair("orig", "c1", earlier_id="same", later_id="x1")
    p2 = make_pair("orig", "c2", earlier_id="same", later_id="x2")
    p1 = replace(p1, earlier=replace(p1.earlier, fb_shares=100))
    p2 = replace(p2, earlier=replace(p2.earlier, fb_shares=100))
    graph = build_window_graph([p1, p2])
    attach_engagement(graph, [p1, p2])
    # one article, not two samples
    assert graph.node_attrs("orig")["median_fb_shares"] == 100.0


def test_compute_node_metrics_across_windows():
    g0 = _graph([("a", "b")], window=0)
    g1 = _graph([("a", "b"), ("c", "b")], window=1)
    combined = merge_graphs([g0, g1])
    metrics = {m.source: m for m in compute_node_metrics(combined, [g0, g1])}
    b = metrics["b"]
    assert b.weighted_in_degree == 3
    assert b.in_centrality_windows == (1.0, 1.0)
    assert metrics["c"].in_centrality_windows == (0.0, 0.0)
    assert b.betweenness_mean == 0.0
    assert metrics["a"].weighted_out_degree == 2


def test_flag_single_day_origins():
    same_day = [
        make_pair("stormer", "copier%d" % i, earlier_id=f"o{i}", later_id=f"c{i}",
                  earlier_ts=BASE_TS + 60 * i)
        for i in range(6)
    ]
    flags = flag_single_day_origins(same_day)
    assert len(flags) == 1
    assert flags[0][0] == "stormer"
    assert flags[0][2] == 1.0
    spread = [
        make_pair("wire", "copier%d" % i, earlier_id=f"so{i}", later_id=f"sc{i}",
                  earlier_ts=BASE_TS + i * 3 * 86400)
        for i in range(6)
    ]
    assert flag_single_day_origins(spread) == []


def test_export_graphml_empty_graph(tmp_path):
    path = tmp_path / "empty.graphml"
    export_graphml(RepublishGraph(0), path)
    parsed = nx.read_graphml(path)
    assert parsed.number_of_nodes() == 0


def test_export_graphml_edge_weight(tmp_path):
    path = tmp_path / "g.graphml"
    export_graphml(_graph([("a", "b", 3)]), path)
    text = path.read_text(encoding="utf-8")
    assert text.count("<edge") == 1
    assert '<data key="e_weight">3</data>' in text


def test_export_graphml_round_trip(tmp_path):
    graph = _graph([("a", "b", 3), ("b", "c", 1)])
    graph.node_attrs("a").update(
        {"community": 0, "audience": "mainstream", "median_fb_shares": 12.5,
         "skipped": None}
    )
    graph.node_attrs("b")["community"] = 1
    path = tmp_path / "rt.graphml"
    export_graphml(graph, path)
    parsed = nx.read_graphml(path)
    assert sorted(parsed.nodes()) == ["a", "b", "c"]
    assert parsed.nodes["a"]["community"] == 0
    assert parsed.nodes["a"]["audience"] == "mainstream"
    assert parsed.nodes["a"]["median_fb_shares"] == 12.5
    assert "skipped" not in parsed.nodes["a"]
    assert parsed.edges["a", "b"]["weight"] == 3
    assert parsed.edges["b", "c"]["weight"] == 1


def test_export_deterministic_bytes(tmp_path):
    graph = _graph([("a", "b", 2), ("c", "a", 1)])
    graph.node_attrs("a")["community"] = 0
    first, second = tmp_path / "one.graphml", tmp_path / "two.graphml"
    export_graphml(graph, first)
    export_graphml(graph, second)
    assert first.read_bytes() == second.read_bytes()
    d1, d2 = tmp_path / "one.dot", tmp_path / "two.dot"
    export_dot(graph, d1)
    export_dot(graph, d2)
    assert d1.read_bytes() == d2.read_bytes()


def test_export_dot_contents(tmp_path):
    graph = _graph([("a", "b", 3)])
    graph.node_attrs("a")["community"] = 0
    graph.node_attrs("b")["community"] = 1
    path = tmp_path / "g.dot"
    export_dot(graph, path, color_by="community")
    text = path.read_text(encoding="utf-8")
    assert text.startswith("digraph")
    assert '"a" -> "b" [weight=3, penwidth=6.000' in text
    assert "fillcolor" in text
