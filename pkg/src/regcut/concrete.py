"""Explicit-state analysis of the finite chain of a fixed-size network.

Reachability questions about ``k`` copies of a protocol are answered on the
graph of configurations reachable from ``<q0^k, d0>``.  Almost-sure
reachability of a target is decided graph-theoretically: it holds iff every
reachable configuration can still reach one that covers the target.

Configurations covering the target are treated as absorbing.  The event
"some process eventually visits the target" only depends on the run up to
its first visit, so this changes no probability, and it keeps the
qualitative check equivalent to the exact probability being 1 even when the
protocol lets processes leave the target.
"""
from __future__ import annotations

import time
from array import array
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from ._engine import Engine
from .errors import ResourceLimit, UndeclaredSymbol
from .model import Configuration, Protocol, completed, format_configuration

DEFAULT_NODE_CAP = 5_000_000
DEFAULT_SOLVE_CAP = 5_000


@dataclass
class StateSpace:
    """Reachable configurations in BFS order with CSR successor lists."""

    protocol: Protocol
    k: int
    datum: str
    stop_at: str | None
    codes: list[int]
    offsets: array
    targets: array
    engine: Engine = field(repr=False)

    def __len__(self) -> int:
        return len(self.codes)

    @property
    def n_edges(self) -> int:
        return len(self.targets)

    @property
    def initial(self) -> Configuration:
        return self.engine.decode(self.codes[0])

    def node(self, i: int) -> Configuration:
        return self.engine.decode(self.codes[i])

    @property
    def nodes(self) -> list[Configuration]:
        return [self.engine.decode(c) for c in self.codes]

    def successors_of(self, i: int) -> array:
        return self.targets[self.offsets[i]:self.offsets[i + 1]]

    def covering(self, location: str) -> list[int]:
        loc = self.engine.loc_index[location]
        count_at = self.engine.count_at
        return [i for i, c in enumerate(self.codes) if count_at(c, loc)]

    def predecessors(self) -> list[list[int]]:
        preds: list[list[int]] = [[] for _ in self.codes]
        offsets, targets = self.offsets, self.targets
        for i in range(len(self.codes)):
            for j in targets[offsets[i]:offsets[i + 1]]:
                preds[j].append(i)
        return preds

    def can_reach(self, sources: list[int]) -> bytearray:
        """Flags of nodes with a path into ``sources``."""
        preds = self.predecessors()
        seen = bytearray(len(self.codes))
        queue = deque(sources)
        for s in sources:
            seen[s] = 1
        while queue:
            j = queue.popleft()
            for i in preds[j]:
                if not seen[i]:
                    seen[i] = 1
                    queue.append(i)
        return seen


@dataclass
class Verdict:
    almost_sure: bool
    witness: Configuration | None
    nodes: int
    edges: int
    elapsed: float
    k: int = 0
    target: str = ""

    @property
    def answer(self) -> str:
        return "AlmostSure" if self.almost_sure else "NotAlmostSure"

    def to_dict(self) -> dict:
        witness = None
        if self.witness is not None:
            witness = {"multiset": [[q, n] for q, n in self.witness.multiset.items_sorted()],
                       "datum": self.witness.datum}
        return {"answer": self.answer, "k": self.k, "target": self.target, "witness": witness,
                "nodes": self.nodes, "edges": self.edges, "wall_time": round(self.elapsed, 6)}

    def __str__(self) -> str:
        s = f"{self.answer} (k={self.k}, target={self.target}, {self.nodes} nodes, {self.edges} edges)"
        if self.witness is not None:
            s += f"\n  witness: {format_configuration(self.witness)}"
        return s


def _check_location(p: Protocol, q: str) -> None:
    if q not in p.locations:
        raise UndeclaredSymbol("location", q)


def explore(p: Protocol, k: int, d0: str | None = None, *, stop_at: str | None = None,
            node_cap: int = DEFAULT_NODE_CAP) -> StateSpace:
    """Breadth-first closure of ``successors`` from ``<q0^k, d0>``.

    Nodes are numbered in BFS order, expanding successors in canonical
    (lexicographic) order.  Nodes covering ``stop_at`` are kept but not
    expanded.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    p = completed(p)
    d0 = p.initial_datum if d0 is None else d0
    if d0 not in p.data:
        raise UndeclaredSymbol("datum", d0)
    eng = Engine(p, k)
    stop_weight = None
    if stop_at is not None:
        _check_location(p, stop_at)
        stop_weight = eng.weights[eng.loc_index[stop_at]]
    base = eng.base
    succ_fn = eng.successors

    init = eng.encode(p.initial_configuration(k, d0))
    codes = [init]
    index = {init: 0}
    offsets = array("q", [0])
    targets = array("q")
    i = 0
    while i < len(codes):
        code = codes[i]
        if stop_weight is None or (code // stop_weight) % base == 0:
            for s in succ_fn(code):
                j = index.get(s)
                if j is None:
                    j = len(codes)
                    if j >= node_cap:
                        raise ResourceLimit(f"state space of size {k}", node_cap)
                    index[s] = j
                    codes.append(s)
                targets.append(j)
        offsets.append(len(targets))
        i += 1
    return StateSpace(p, k, d0, stop_at, codes, offsets, targets, eng)


def check_coverable(p: Protocol, k: int, d0: str | None = None, target: str | None = None, *,
                    node_cap: int = DEFAULT_NODE_CAP) -> bool:
    """True iff some configuration reachable with ``k`` processes covers ``target``."""
    target = _target(p, target)
    space = explore(p, k, d0, stop_at=target, node_cap=node_cap)
    return bool(space.covering(target))


def _target(p: Protocol, target: str | None) -> str:
    if target is None:
        if p.target is None:
            raise ValueError(f"protocol {p.name} declares no target; pass one explicitly")
        return p.target
    _check_location(p, target)
    return target


def check_almost_sure(p: Protocol, k: int, d0: str | None = None, target: str | None = None, *,
                      node_cap: int = DEFAULT_NODE_CAP) -> Verdict:
    """Decide whether ``target`` is reached with probability 1 by ``k`` processes.

    The witness of a negative answer is the first node in BFS order from
    which no target-covering node is reachable.
    """
    target = _target(p, target)
    start = time.perf_counter()
    space = explore(p, k, d0, stop_at=target, node_cap=node_cap)
    good = space.can_reach(space.covering(target))
    witness = None
    for i, ok in enumerate(good):
        if not ok:
            witness = space.node(i)
            break
    return Verdict(witness is None, witness, len(space), space.n_edges,
                   time.perf_counter() - start, k, target)


def exact_reach_probability(p: Protocol, k: int, d0: str | None = None, target: str | None = None,
                            *, node_cap: int = DEFAULT_NODE_CAP,
                            solve_cap: int = DEFAULT_SOLVE_CAP) -> Fraction:
    """Exact probability of eventually covering ``target`` under uniform scheduling.

    Solves ``x = P x + b`` over the rationals, restricted to nodes that can
    reach the target without covering it yet.
    """
    target = _target(p, target)
    space = explore(p, k, d0, stop_at=target, node_cap=node_cap)
    hit = set(space.covering(target))
    good = space.can_reach(sorted(hit))
    if 0 in hit:
        return Fraction(1)
    if not good[0]:
        return Fraction(0)
    unknown = [i for i in range(len(space)) if good[i] and i not in hit]
    if len(unknown) > solve_cap:
        raise ResourceLimit("linear system", solve_cap)
    col = {i: n for n, i in enumerate(unknown)}
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    for i in unknown:
        succ = space.successors_of(i)
        w = Fraction(1, len(succ))
        row = {col[i]: Fraction(1)}
        b = Fraction(0)
        for j in succ:
            if j in hit:
                b += w
            elif good[j]:
                row[col[j]] = row.get(col[j], Fraction(0)) - w
        rows.append(row)
        rhs.append(b)
    x = solve_sparse(rows, rhs)
    return x[col[0]]


def solve_sparse(rows: list[dict[int, Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gauss-Jordan elimination on a sparse square system over the rationals."""
    n = len(rows)
    rows = [dict(r) for r in rows]
    rhs = list(rhs)
    # column -> rows that currently have a non-zero entry there
    holders: dict[int, set[int]] = {}
    for r, row in enumerate(rows):
        for c in row:
            holders.setdefault(c, set()).add(r)
    pivot_of: dict[int, int] = {}
    done_rows: set[int] = set()
    for c in range(n):
        candidates = [r for r in holders.get(c, ()) if r not in done_rows]
        if not candidates:
            raise ZeroDivisionError(f"singular system at column {c}")
        r = min(candidates, key=lambda r: (len(rows[r]), r))
        done_rows.add(r)
        pivot_of[c] = r
        prow = rows[r]
        inv = 1 / prow[c]
        for cc in prow:
            prow[cc] *= inv
        rhs[r] *= inv
        for other in list(holders[c]):
            if other == r:
                continue
            orow = rows[other]
            f = orow[c]
            for cc, v in prow.items():
                nv = orow.get(cc, 0) - f * v
                if nv:
                    if cc not in orow:
                        holders.setdefault(cc, set()).add(other)
                    orow[cc] = nv
                else:
                    if cc in orow:
                        del orow[cc]
                        holders[cc].discard(other)
            rhs[other] -= f * rhs[r]
    return [rhs[pivot_of[c]] for c in range(n)]
