"""Shared diagram and graph fixtures."""

import json
from pathlib import Path

from colored_sln.complexes import LinkDiagram, resolved_graph
from colored_sln.moy import Edge, MoyGraph, circle, disjoint_union, theta

FIXTURES = Path(__file__).parent / "fixtures"


def diagram(name: str) -> LinkDiagram:
    return LinkDiagram.from_json(json.loads((FIXTURES / f"{name}.json").read_text()))


def graph(name: str) -> MoyGraph:
    return MoyGraph.from_json(json.loads((FIXTURES / f"{name}.json").read_text()))


def closed_square() -> MoyGraph:
    """Square with a doubled left side and a doubled closing arc on the right."""
    return MoyGraph(["BL", "BR", "TL", "TR"], [
        Edge("BL", "TL", 2), Edge("BR", "TR", 1), Edge("BR", "BL", 1), Edge("TL", "TR", 1),
        Edge("TL", "BL", 1), Edge("TR", "BR", 2)])


def graph_corpus():
    """name -> (graph, largest N to test)."""
    kink2 = diagram("kink_pos_c2")
    return {
        "circle1": (circle(1), 3),
        "circle2": (circle(2), 3),
        "theta_1_1": (theta(1, 1), 3),
        "theta_1_2": (theta(1, 2), 3),
        "two_circles": (disjoint_union(circle(1), circle(2)), 3),
        "kink2_res1": (resolved_graph(kink2, (1,)), 3),
        "kink2_res0": (resolved_graph(kink2, (0,)), 3),
        "square": (closed_square(), 3),
    }


def as_tuples(D: LinkDiagram):
    return [(c.sign, c.left_in, c.right_in, c.left_out, c.right_out) for c in D.crossings]
