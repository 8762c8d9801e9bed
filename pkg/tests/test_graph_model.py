import json

import pytest

from graph.graph_model import (classify, cycle, dump_graph, flower, interval,
                               lasso, lasso_fan, lasso_split_tail,
                               leaf_endpoints, load_graph, load_graph_file,
                               mandarin, scaled, star, with_lengths)
from graph.models import Edge, MetricGraph
from spectral.errors import GraphValidationError


def _document(edges, vertices=("a", "b")):
    return json.dumps({"vertices": list(vertices), "edges": edges})


def test_load_graph_sorts_edges_by_id():
    text = _document([
        {"id": 1, "tail": "a", "head": "b", "length": 2.0},
        {"id": 0, "tail": "a", "head": "a", "length": 1.0},
    ])
    g = load_graph(text, name="doc")
    assert g.name == "doc"
    assert [e.id for e in g.edges] == [0, 1]
    assert g.lengths == (1.0, 2.0)
    assert g.edges[0].is_loop


def test_load_graph_parse_failure():
    with pytest.raises(GraphValidationError, match="parse failure"):
        load_graph("{not json")


def test_load_graph_unknown_vertex():
    text = _document([{"id": 0, "tail": "a", "head": "zz", "length": 1.0}])
    with pytest.raises(GraphValidationError, match="unknown vertex reference"):
        load_graph(text)


def test_load_graph_non_positive_length():
    text = _document([{"id": 0, "tail": "a", "head": "b", "length": 0.0}])
    with pytest.raises(GraphValidationError, match="non-positive length"):
        load_graph(text)


def test_load_graph_disconnected():
    text = _document([
        {"id": 0, "tail": "a", "head": "b", "length": 1.0},
        {"id": 1, "tail": "c", "head": "d", "length": 1.0},
    ], vertices=("a", "b", "c", "d"))
    with pytest.raises(GraphValidationError, match="disconnected"):
        load_graph(text)


def test_load_graph_bad_ids():
    text = _document([
        {"id": 0, "tail": "a", "head": "b", "length": 1.0},
        {"id": 2, "tail": "a", "head": "b", "length": 1.0},
    ])
    with pytest.raises(GraphValidationError):
        load_graph(text)


def test_validation_collects_every_reason():
    with pytest.raises(GraphValidationError) as info:
        MetricGraph(vertices=("a",), edges=(Edge(0, "a", "x"),), lengths=(-1.0,))
    assert len(info.value.reasons) == 2


def test_load_graph_file_missing(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_graph_file(str(tmp_path / "missing.json"))


def test_data_documents_load(data_dir):
    names = sorted(p.stem for p in data_dir.glob("*.json"))
    assert "interval" in names and "lasso_split_tail" in names
    for path in data_dir.glob("*.json"):
        g = load_graph_file(str(path))
        assert g.n_edges >= 1


def test_dump_graph_is_inverse_of_load():
    g = lasso_split_tail([1.0, 1.5, 2.0, 2.5])
    again = load_graph(dump_graph(g))
    assert again.edges == g.edges
    assert again.lengths == g.lengths
    assert again.name == g.name


def test_loops_count_twice_in_degree():
    g = flower([1.0, 2.0, 3.0])
    assert g.degree("v") == 6
    assert g.to_networkx().degree("v") == 6


def test_classify_star_satisfies_assumption():
    c = classify(star([1.0, 2.0, 3.0]))
    assert c.satisfies_assumption
    assert not c.loop_edges
    assert not c.is_mandarin and not c.is_flower
    assert c.reflection_symmetries == ()


def test_classify_interval_satisfies_assumption():
    c = classify(interval())
    assert c.satisfies_assumption
    assert not c.is_mandarin


def test_classify_cycle_violates_assumption():
    c = classify(cycle([1.0, 2.0]))
    assert not c.satisfies_assumption
    assert "degree-two vertex" in c.violation_reasons
    assert "single cycle" in c.violation_reasons


def test_classify_degree_two_vertex():
    g = MetricGraph(vertices=("a", "b", "c"), edges=(Edge(0, "a", "b"), Edge(1, "b", "c")),
                    lengths=(1.0, 1.0))
    c = classify(g)
    assert c.violation_reasons == ("degree-two vertex",)


def test_classify_mandarin_and_flower():
    m = classify(mandarin([1.0, 2.0, 3.0]))
    assert m.is_mandarin and m.reflection_symmetries == ("mandarin",)
    f = classify(flower([1.0, 2.0, 3.0]))
    assert f.is_flower
    assert f.loop_edges == frozenset({0, 1, 2})
    assert f.reflection_symmetries == ("loop:0", "loop:1", "loop:2")


def test_classify_lasso_family():
    for g in (lasso(1.0, 2.0), lasso_split_tail([1.0, 2.0, 3.0, 4.0]), lasso_fan([1.0, 2.0, 3.0, 4.0])):
        c = classify(g)
        assert c.satisfies_assumption, g.name
        assert c.loop_edges == frozenset({0})


def test_leaf_endpoints_of_star():
    assert leaf_endpoints(star([1.0, 2.0, 3.0])) == {(0, "head"), (1, "head"), (2, "head")}
    assert leaf_endpoints(interval()) == {(0, "tail"), (0, "head")}


def test_with_lengths_and_scaled():
    g = star([1.0, 2.0, 3.0])
    assert with_lengths(g, [3.0, 2.0, 1.0]).lengths == (3.0, 2.0, 1.0)
    assert scaled(g, 2.0).total_length == pytest.approx(12.0)
    with pytest.raises(GraphValidationError):
        with_lengths(g, [1.0])
