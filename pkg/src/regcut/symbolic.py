"""Symbolic graph of index ``k`` and the sign of the cut-off.

A symbolic node tracks ``k`` processes exactly (the concrete multiset) and
every other process only through the set of locations it occupies (the
abstract part, never empty).  Abstract moves let one of the untracked
processes at ``q`` take a transition to ``q'``; the source either empties
(``S - {q} + {q'}``) or keeps other processes (``S + {q'}``).

The cut-off is negative iff, in the graph of a large enough index, some
reachable node can no longer reach a node that involves the target.  The
index is ``K * |Q|`` with ``K`` read off the backward-coverability basis.
"""
from __future__ import annotations

import enum
import time
from array import array
from collections import deque
from dataclasses import dataclass, field

from .coverability import DEFAULT_BASIS_CAP, k_bound, pre_star_basis
from .errors import AtomicUnsupported, ResourceLimit, UncertifiedVerdict, UndeclaredSymbol
from .model import Multiset, Op, Protocol, completed

DEFAULT_SYMBOLIC_CAP = 2_000_000


class Sign(enum.Enum):
    POSITIVE = "Positive"
    NEGATIVE = "Negative"


@dataclass(frozen=True)
class SymbolicNode:
    concrete: Multiset
    abstract: frozenset[str]
    datum: str

    def involves(self, location: str) -> bool:
        return self.concrete[location] > 0 or location in self.abstract

    def label(self, order: tuple[str, ...] | None = None) -> str:
        """``"q0:1 | {q0,q1},1"``; the concrete part is omitted when empty."""
        key = (lambda q: order.index(q)) if order else None
        support = "{" + ",".join(sorted(self.abstract, key=key)) + "}"
        tail = f"{support},{self.datum}"
        if self.concrete.size == 0:
            return tail
        conc = " ".join(f"{q}:{n}" for q, n in self.concrete.items_sorted(order))
        return f"{conc} | {tail}"

    def to_dict(self) -> dict:
        return {"concrete": [[q, n] for q, n in self.concrete.items_sorted()],
                "abstract": sorted(self.abstract), "datum": self.datum}

    def __str__(self) -> str:
        return self.label()


class _Coder:
    """Packs (concrete counts, abstract bitmask, datum) into one int."""

    def __init__(self, p: Protocol, k: int):
        self.p = p
        self.k = k
        self.n = n = len(p.locations)
        self.m = len(p.data)
        self.base = k + 1
        self.loc_index = {q: i for i, q in enumerate(p.locations)}
        self.data_index = {d: i for i, d in enumerate(p.data)}
        self.cw = [self.base ** (n - 1 - i) for i in range(n)]
        self.moves: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
        for t in p.transitions:
            rd = self.data_index[t.read] if t.op is Op.READ else -1
            wd = self.data_index[t.write] if t.op is Op.WRITE else -1
            self.moves[self.loc_index[t.source]].append((rd, wd, self.loc_index[t.target]))

    def pack(self, counts, mask: int, d: int) -> int:
        ccode = sum(c * w for c, w in zip(counts, self.cw))
        return ((ccode << self.n) | mask) * self.m + d

    def unpack(self, code: int) -> tuple[list[int], int, int]:
        rest, d = divmod(code, self.m)
        ccode, mask = rest >> self.n, rest & ((1 << self.n) - 1)
        counts = [0] * self.n
        for i in range(self.n - 1, -1, -1):
            ccode, counts[i] = divmod(ccode, self.base)
        return counts, mask, d

    def encode(self, v: SymbolicNode) -> int:
        counts = [v.concrete[q] for q in self.p.locations]
        if sum(counts) != self.k:
            raise ValueError(f"concrete part of {v} does not have size {self.k}")
        mask = 0
        for q in v.abstract:
            mask |= 1 << self.loc_index[q]
        return self.pack(counts, mask, self.data_index[v.datum])

    def decode(self, code: int) -> SymbolicNode:
        counts, mask, d = self.unpack(code)
        locs = self.p.locations
        return SymbolicNode(Multiset({q: c for q, c in zip(locs, counts) if c}),
                            frozenset(locs[i] for i in range(self.n) if mask >> i & 1),
                            self.p.data[d])

    def involves(self, code: int, t: int) -> bool:
        counts, mask, _ = self.unpack(code)
        return counts[t] > 0 or bool(mask >> t & 1)

    def successors(self, code: int) -> list[int]:
        counts, mask, d = self.unpack(code)
        m, n = self.m, self.n
        ccode = (code // m) >> n
        out = set()
        for i in range(n):
            here_c = counts[i] > 0
            here_a = mask >> i & 1
            if not (here_c or here_a):
                continue
            for rd, wd, j in self.moves[i]:
                if rd >= 0 and rd != d:
                    continue
                d2 = wd if wd >= 0 else d
                if here_c:
                    c2 = ccode + self.cw[j] - self.cw[i]
                    out.add(((c2 << n) | mask) * m + d2)
                if here_a:
                    for mask2 in ((mask & ~(1 << i)) | (1 << j), mask | (1 << j)):
                        out.add(((ccode << n) | mask2) * m + d2)
        return sorted(out)


def _ensure(p: Protocol) -> Protocol:
    p = completed(p)
    if p.atomic:
        raise AtomicUnsupported("symbolic graph")
    return p


def symbolic_successors(p: Protocol, v: SymbolicNode) -> frozenset[SymbolicNode]:
    """One-step successors of ``v`` under both edge rules."""
    p = _ensure(p)
    coder = _Coder(p, v.concrete.size)
    return frozenset(coder.decode(c) for c in coder.successors(coder.encode(v)))


@dataclass
class SymbolicGraph:
    """Reachable symbolic nodes in BFS order with CSR successor lists."""

    protocol: Protocol
    index: int
    datum: str
    stop_at: str | None
    codes: list[int]
    offsets: array
    targets: array
    depth: array
    coder: _Coder = field(repr=False)

    def __len__(self) -> int:
        return len(self.codes)

    @property
    def n_edges(self) -> int:
        return len(self.targets)

    def node(self, i: int) -> SymbolicNode:
        return self.coder.decode(self.codes[i])

    @property
    def nodes(self) -> list[SymbolicNode]:
        return [self.coder.decode(c) for c in self.codes]

    def successors_of(self, i: int) -> array:
        return self.targets[self.offsets[i]:self.offsets[i + 1]]

    def edges(self):
        for i in range(len(self.codes)):
            for j in self.successors_of(i):
                yield i, j

    def involving(self, location: str) -> list[int]:
        t = self.coder.loc_index[location]
        return [i for i, c in enumerate(self.codes) if self.coder.involves(c, t)]

    def can_reach(self, sources: list[int]) -> bytearray:
        preds: list[list[int]] = [[] for _ in self.codes]
        for i, j in self.edges():
            preds[j].append(i)
        seen = bytearray(len(self.codes))
        for s in sources:
            seen[s] = 1
        queue = deque(sources)
        while queue:
            j = queue.popleft()
            for i in preds[j]:
                if not seen[i]:
                    seen[i] = 1
                    queue.append(i)
        return seen


def build(p: Protocol, d0: str | None = None, k: int = 0, *, stop_at: str | None = None,
          node_cap: int = DEFAULT_SYMBOLIC_CAP) -> SymbolicGraph:
    """Reachable part of the symbolic graph of index ``k`` from ``(q0^k, {q0}, d0)``.

    Nodes involving ``stop_at`` are kept but not expanded.
    """
    if k < 0:
        raise ValueError("index must be non-negative")
    p = _ensure(p)
    d0 = p.initial_datum if d0 is None else d0
    if d0 not in p.data:
        raise UndeclaredSymbol("datum", d0)
    coder = _Coder(p, k)
    t = None
    if stop_at is not None:
        if stop_at not in p.locations:
            raise UndeclaredSymbol("location", stop_at)
        t = coder.loc_index[stop_at]
    q0 = coder.loc_index[p.initial_location]
    counts = [0] * coder.n
    counts[q0] = k
    init = coder.pack(counts, 1 << q0, coder.data_index[d0])

    codes, index = [init], {init: 0}
    depth = array("l", [0])
    offsets, targets = array("q", [0]), array("q")
    i = 0
    while i < len(codes):
        code = codes[i]
        if t is None or not coder.involves(code, t):
            for s in coder.successors(code):
                j = index.get(s)
                if j is None:
                    j = len(codes)
                    if j >= node_cap:
                        raise ResourceLimit(f"symbolic graph of index {k}", node_cap,
                                            module="symbolic-graph")
                    index[s] = j
                    codes.append(s)
                    depth.append(depth[i] + 1)
                targets.append(j)
        offsets.append(len(targets))
        i += 1
    return SymbolicGraph(p, k, d0, stop_at, codes, offsets, targets, depth, coder)


def required_index(p: Protocol, target: str | None = None, *, basis_cap: int = DEFAULT_BASIS_CAP) -> int:
    """``K * |Q|`` for the coverability basis of ``target``."""
    p = _ensure(p)
    return k_bound(pre_star_basis(p, target, cap=basis_cap)).value * len(p.locations)


@dataclass
class CutoffVerdict:
    sign: Sign
    index_used: int
    certified: bool
    target: str
    witness: SymbolicNode | None = None
    witness_depth: int | None = None
    positive_bound: int | None = None
    negative_bound: int | None = None
    k_bound: int = 0
    required_index: int = 0
    basis_elements: int = 0
    basis_max_coordinate: int = 0
    nodes: int = 0
    edges: int = 0
    elapsed: float = 0.0
    protocol_order: tuple[str, ...] | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "sign": self.sign.value,
            "index": self.index_used,
            "certified": self.certified,
            "target": self.target,
            "witness": self.witness.to_dict() if self.witness else None,
            "witness_depth": self.witness_depth,
            "positive_bound": self.positive_bound,
            "negative_bound": self.negative_bound,
            "k_bound": self.k_bound,
            "required_index": self.required_index,
            "basis": {"elements": self.basis_elements, "max_coordinate": self.basis_max_coordinate},
            "nodes": self.nodes,
            "edges": self.edges,
            "wall_time": round(self.elapsed, 6),
        }

    def __str__(self) -> str:
        tag = "certified" if self.certified else "uncertified"
        s = (f"{self.sign.value} cut-off ({tag}, index {self.index_used}, required {self.required_index}, "
             f"{self.nodes} nodes, {self.edges} edges)")
        if self.witness is not None:
            s += f"\n  witness: {self.witness.label(self.protocol_order)} at depth {self.witness_depth}"
        return s


def decide_cutoff(p: Protocol, d0: str | None = None, target: str | None = None,
                  index_override: int | None = None, *, node_cap: int = DEFAULT_SYMBOLIC_CAP,
                  basis_cap: int = DEFAULT_BASIS_CAP) -> CutoffVerdict:
    """Sign of the cut-off from the symbolic graph.

    The verdict is certified iff the index used is at least ``K * |Q|``.
    Its witness is the first node in BFS order (hence at minimal depth)
    from which no node involving the target is reachable.
    """
    start = time.perf_counter()
    p = _ensure(p)
    if target is None:
        if p.target is None:
            raise ValueError(f"protocol {p.name} declares no target; pass one explicitly")
        target = p.target
    basis = pre_star_basis(p, target, cap=basis_cap)
    kb = k_bound(basis)
    needed = kb.value * len(p.locations)
    index = needed if index_override is None else index_override
    if index < 0:
        raise ValueError("index must be non-negative")
    g = build(p, d0, index, stop_at=target, node_cap=node_cap)
    good = g.can_reach(g.involving(target))
    dead = next((i for i, ok in enumerate(good) if not ok), None)
    v = CutoffVerdict(
        Sign.POSITIVE if dead is None else Sign.NEGATIVE, index, index >= needed, target,
        k_bound=kb.value, required_index=needed, basis_elements=kb.elements,
        basis_max_coordinate=kb.max_coordinate, nodes=len(g), edges=g.n_edges,
        protocol_order=p.locations)
    if dead is None:
        v.positive_bound = index + 1
    else:
        v.witness = g.node(dead)
        v.witness_depth = g.depth[dead]
        v.negative_bound = index + v.witness_depth + 1
    v.elapsed = time.perf_counter() - start
    return v


def cutoff_bounds(v: CutoffVerdict) -> dict:
    """Upper bound on the tight cut-off implied by a certified verdict."""
    if not v.certified:
        raise UncertifiedVerdict(
            f"index {v.index_used} is below the required index {v.required_index}; no bound follows")
    if v.sign is Sign.POSITIVE:
        bound = v.positive_bound
        text = f"Positive cut-off; tight cut-off <= {bound} (index {v.index_used} + 1)"
    else:
        bound = v.negative_bound
        text = (f"Negative cut-off; tight cut-off <= {bound} "
                f"(index {v.index_used} + witness depth {v.witness_depth} + 1)")
    text += f"; K = {v.k_bound}, basis of {v.basis_elements} elements (max coordinate {v.basis_max_coordinate})"
    return {"sign": v.sign.value, "bound": bound, "index": v.index_used, "k_bound": v.k_bound,
            "basis": {"elements": v.basis_elements, "max_coordinate": v.basis_max_coordinate},
            "witness": v.witness.to_dict() if v.witness else None, "text": text}
