"""Backward coverability: the minimal basis of ``Pre*([[target]])``.

The set of configurations from which some process can reach the target is
upward-closed (extra processes may stay idle), so it is represented by
per-datum antichains of minimal multisets under plain inclusion.  The basis
is the least fixpoint of one-step pre-images, saturated with a work-list and
minimized eagerly.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import AtomicUnsupported, ResourceLimit, UndeclaredSymbol
from .model import Configuration, Multiset, Op, Protocol, completed

DEFAULT_BASIS_CAP = 1_000_000

Vec = tuple[int, ...]


@dataclass(frozen=True)
class Basis:
    """Per-datum antichains of count vectors (location declaration order)."""

    locations: tuple[str, ...]
    target: str
    antichains: dict[str, frozenset[Vec]]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Basis):
            return NotImplemented
        return (self.locations, self.target, self._norm()) == (other.locations, other.target, other._norm())

    def __hash__(self) -> int:
        return hash((self.locations, self.target, tuple(sorted(self._norm().items()))))

    def _norm(self) -> dict[str, frozenset[Vec]]:
        return {d: s for d, s in self.antichains.items() if s}

    def __len__(self) -> int:
        return sum(len(s) for s in self.antichains.values())

    def elements(self) -> list[Configuration]:
        out = []
        for d in sorted(self.antichains):
            for v in sorted(self.antichains[d]):
                out.append(Configuration(Multiset(dict(zip(self.locations, v))), d))
        return out

    def to_records(self) -> list[dict]:
        """Sorted (datum, sorted location:count pairs) records."""
        recs = [{"datum": g.datum, "multiset": [[q, n] for q, n in sorted(g.multiset.items())]}
                for g in self.elements()]
        return sorted(recs, key=lambda r: (r["datum"], r["multiset"]))


@dataclass(frozen=True)
class KBound:
    value: int
    elements: int
    max_coordinate: int


def _ensure(p: Protocol, target: str) -> Protocol:
    p = completed(p)
    if p.atomic:
        raise AtomicUnsupported("backward coverability")
    if target not in p.locations:
        raise UndeclaredSymbol("location", target)
    return p


def _leq(u: Vec, v: Vec) -> bool:
    return all(a <= b for a, b in zip(u, v))


def initial_basis(p: Protocol, target: str) -> Basis:
    p = _ensure(p, target)
    t = p.locations.index(target)
    unit = tuple(1 if i == t else 0 for i in range(len(p.locations)))
    return Basis(p.locations, target, {d: frozenset([unit]) for d in p.data})


def _compiled_moves(p: Protocol):
    li = {q: i for i, q in enumerate(p.locations)}
    return [(li[t.source], t.op, t.read if t.op is Op.READ else t.write, li[t.target])
            for t in p.transitions]


def _predecessors(p: Protocol, moves, vec: Vec, datum: str):
    """Minimal predecessors of ``up(vec, datum)`` by one transition."""
    for src, op, d, dst in moves:
        if d != datum:
            continue
        pre = list(vec)
        if pre[dst] > 0:
            pre[dst] -= 1
        pre[src] += 1
        pre = tuple(pre)
        if op is Op.WRITE:
            for e in p.data:
                yield pre, e
        else:
            yield pre, datum


class _Antichains:
    def __init__(self, data):
        self.sets: dict[str, set[Vec]] = {d: set() for d in data}
        self.size = 0

    def covered(self, vec: Vec, d: str) -> bool:
        return any(_leq(u, vec) for u in self.sets[d])

    def insert(self, vec: Vec, d: str) -> bool:
        bucket = self.sets[d]
        if any(_leq(u, vec) for u in bucket):
            return False
        dominated = [u for u in bucket if _leq(vec, u)]
        for u in dominated:
            bucket.discard(u)
        bucket.add(vec)
        self.size += 1 - len(dominated)
        return True


def pre_image_basis(p: Protocol, b: Basis) -> Basis:
    """Minimal basis of ``Pre(up(b)) | up(b)``."""
    p = _ensure(p, b.target)
    moves = _compiled_moves(p)
    acc = _Antichains(p.data)
    for d, vecs in b.antichains.items():
        for v in vecs:
            acc.insert(v, d)
    for d, vecs in b.antichains.items():
        for v in vecs:
            for pre, e in _predecessors(p, moves, v, d):
                acc.insert(pre, e)
    return Basis(p.locations, b.target, {d: frozenset(s) for d, s in acc.sets.items()})


def pre_star_basis(p: Protocol, target: str | None = None, *,
                   cap: int = DEFAULT_BASIS_CAP) -> Basis:
    """Least fixpoint of :func:`pre_image_basis` from :func:`initial_basis`."""
    if target is None:
        target = p.target
        if target is None:
            raise ValueError(f"protocol {p.name} declares no target")
    start = initial_basis(p, target)
    p = completed(p)
    moves = _compiled_moves(p)
    acc = _Antichains(p.data)
    work = deque()
    for d, vecs in start.antichains.items():
        for v in vecs:
            acc.insert(v, d)
            work.append((v, d))
    while work:
        v, d = work.popleft()
        if v not in acc.sets[d]:
            continue  # superseded by a smaller element, whose pre-image covers this one's
        for pre, e in _predecessors(p, moves, v, d):
            if acc.insert(pre, e):
                work.append((pre, e))
                if acc.size > cap:
                    raise ResourceLimit("Pre* basis", cap, module="coverability")
    return Basis(p.locations, target, {d: frozenset(s) for d, s in acc.sets.items()})


def member(b: Basis, g: Configuration) -> bool:
    """Is ``g`` in the upward closure of ``b`` (plain inclusion, same datum)?"""
    vecs = b.antichains.get(g.datum)
    if not vecs:
        return False
    unknown = set(g.multiset) - set(b.locations)
    if unknown:
        raise UndeclaredSymbol("location", sorted(unknown)[0])
    v = tuple(g.multiset[q] for q in b.locations)
    return any(_leq(u, v) for u in vecs)


def k_bound(b: Basis) -> KBound:
    """``K = max(1, largest coordinate of any basis element)``."""
    top = max((max(v) for vecs in b.antichains.values() for v in vecs), default=0)
    return KBound(max(1, top), len(b), top)
