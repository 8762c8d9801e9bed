from graph.graph_model import (classify, cycle, dumbbell,
                               dump_graph, flower, interval, lasso, lasso_fan,
                               lasso_split_tail, leaf_endpoints, load_graph,
                               load_graph_file, mandarin, scaled, star,
                               with_lengths)
from graph.models import Edge, GraphClass, MetricGraph, ViolationReason

__all__ = [
    "Edge",
    "GraphClass",
    "MetricGraph",
    "ViolationReason",
    "classify",
    "cycle",
    "dumbbell",
    "dump_graph",
    "flower",
    "interval",
    "lasso",
    "lasso_fan",
    "lasso_split_tail",
    "leaf_endpoints",
    "load_graph",
    "load_graph_file",
    "mandarin",
    "scaled",
    "star",
    "with_lengths",
]
