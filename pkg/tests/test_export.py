import re

from regcut.concrete import explore
from regcut.export import export_dot
from regcut.families import filter_protocol, running
from regcut.symbolic import build


def labels(dot: str) -> list[str]:
    return re.findall(r'label="([^"]*)"', dot)


def test_index_zero_labels():
    dot = export_dot(build(running(), k=0), "qf")
    labs = labels(dot)
    assert "{q0},0" in labs and "{q0,q1},1" in labs
    assert len([lab for lab in labs if "qf" not in lab]) == 13
    marked = [line for line in dot.splitlines() if "peripheries=2" in line]
    assert marked and all("qf" in line for line in marked)


def test_no_highlight_no_marks():
    dot = export_dot(build(running(), k=0))
    assert "peripheries" not in dot and "filled" not in dot


def test_deterministic():
    g = explore(filter_protocol(2), 3)
    assert export_dot(g, "s2") == export_dot(explore(filter_protocol(2), 3), "s2")
    dot = export_dot(g, "s2")
    assert dot.startswith('digraph "states_filter2_3" {')
    assert dot.count(" -> ") == g.n_edges
    assert "s0:3 | 0" in labels(dot)
