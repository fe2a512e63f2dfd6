"""Graphviz DOT rendering of explicit state spaces and symbolic graphs."""
from __future__ import annotations

from .concrete import StateSpace
from .model import format_configuration
from .symbolic import SymbolicGraph


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(graph: StateSpace | SymbolicGraph, highlight: str | None = None) -> str:
    """DOT text with one node per configuration or symbolic node.

    Nodes whose multiset (or abstract part) contains ``highlight`` are drawn
    doubled and filled.  Output depends only on the graph.
    """
    order = graph.protocol.locations
    if isinstance(graph, SymbolicGraph):
        name = f"symbolic_{graph.protocol.name}_{graph.index}"
        labels = [v.label(order) for v in graph.nodes]
        marked = set(graph.involving(highlight)) if highlight else set()
    else:
        name = f"states_{graph.protocol.name}_{graph.k}"
        labels = [format_configuration(g, order) for g in graph.nodes]
        marked = set(graph.covering(highlight)) if highlight else set()
    lines = [f"digraph {_quote(name)} {{", "  node [shape=box];"]
    for i, label in enumerate(labels):
        styles = ["bold"] if i == 0 else []
        attrs = f"label={_quote(label)}"
        if i in marked:
            styles.append("filled")
            attrs += ", peripheries=2, fillcolor=lightgray"
        if styles:
            attrs += f", style={_quote(','.join(styles))}"
        lines.append(f"  n{i} [{attrs}];")
    for i in range(len(labels)):
        for j in graph.successors_of(i):
            lines.append(f"  n{i} -> n{j};")
    lines.append("}")
    return "\n".join(lines) + "\n"
