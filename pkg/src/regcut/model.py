"""Register protocols, configurations and their one-step semantics.

A protocol is a finite automaton whose transitions read or write a single
shared register.  A configuration of a network of identical copies is a
multiset of locations together with the register content.
"""
from __future__ import annotations

import enum
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DeadlockLocation, IncompleteReads, UndeclaredSymbol, ValidationError


class Op(enum.Enum):
    READ = "R"
    WRITE = "W"
    READ_WRITE = "RW"


class ReadPolicy(enum.Enum):
    SELF_LOOP = "self"
    STRICT = "strict"


class Order(enum.Enum):
    SUPPORT = "support"  # same datum, same support, multiset inclusion
    PLAIN = "plain"  # same datum, multiset inclusion


class Relation(enum.Enum):
    LESS = "less"
    EQUAL = "equal"
    GREATER = "greater"
    INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class Transition:
    source: str
    op: Op
    read: str | None
    write: str | None
    target: str

    def __post_init__(self):
        needs_read = self.op in (Op.READ, Op.READ_WRITE)
        needs_write = self.op in (Op.WRITE, Op.READ_WRITE)
        if needs_read != (self.read is not None) or needs_write != (self.write is not None):
            raise ValueError(f"malformed {self.op.value} transition {self!r}")

    @classmethod
    def r(cls, source: str, datum: str, target: str) -> Transition:
        return cls(source, Op.READ, datum, None, target)

    @classmethod
    def w(cls, source: str, datum: str, target: str) -> Transition:
        return cls(source, Op.WRITE, None, datum, target)

    @classmethod
    def rw(cls, source: str, read: str, write: str, target: str) -> Transition:
        return cls(source, Op.READ_WRITE, read, write, target)

    def __str__(self) -> str:
        data = " ".join(d for d in (self.read, self.write) if d is not None)
        return f"{self.source} {self.op.value} {data} {self.target}"


_OP_RANK = {Op.READ: 0, Op.WRITE: 1, Op.READ_WRITE: 2}


def _rank(index: Mapping[str, int], name: str | None) -> tuple:
    if name is None:
        return (-1, "")
    if name in index:
        return (0, index[name])
    return (1, name)


@dataclass(frozen=True)
class Protocol:
    """A register protocol ``<Q, D, q0, T>`` plus the register's initial datum.

    ``locations`` and ``data`` keep declaration order, which fixes every
    canonical ordering used downstream (state-space indexing, serialization).
    Transitions are stored deduplicated and sorted.
    """

    name: str
    locations: tuple[str, ...]
    data: tuple[str, ...]
    initial_location: str
    initial_datum: str
    transitions: tuple[Transition, ...]
    target: str | None = None
    reads: ReadPolicy = ReadPolicy.SELF_LOOP

    def __post_init__(self):
        object.__setattr__(self, "locations", tuple(self.locations))
        object.__setattr__(self, "data", tuple(self.data))
        loc = {q: i for i, q in enumerate(self.locations)}
        dat = {d: i for i, d in enumerate(self.data)}

        def key(t: Transition):
            return (_rank(loc, t.source), _OP_RANK[t.op], _rank(dat, t.read),
                    _rank(dat, t.write), _rank(loc, t.target))

        object.__setattr__(self, "transitions", tuple(sorted(set(self.transitions), key=key)))

    @property
    def atomic(self) -> bool:
        return any(t.op is Op.READ_WRITE for t in self.transitions)

    def location_index(self, q: str) -> int:
        return self.locations.index(q)

    def outgoing(self, q: str) -> list[Transition]:
        return [t for t in self.transitions if t.source == q]

    def initial_configuration(self, k: int, datum: str | None = None) -> Configuration:
        return Configuration(Multiset({self.initial_location: k}),
                             self.initial_datum if datum is None else datum)


class Multiset(Mapping):
    """Immutable finite multiset; missing elements count 0.

    ``len()`` is the number of distinct elements (Mapping semantics); the
    cardinality is :attr:`size`.  ``x in m`` tests membership in the support.
    """

    __slots__ = ("_counts", "_hash")

    def __init__(self, counts: Mapping[str, int] | Iterable[str] | None = None, **kw: int):
        acc: dict[str, int] = {}
        if isinstance(counts, Mapping):
            items = list(counts.items())
        elif counts is not None:
            items = [(x, 1) for x in counts]
        else:
            items = []
        for x, n in [*items, *kw.items()]:
            if not isinstance(n, int) or n < 0:
                raise ValueError(f"multiset count for {x!r} must be a non-negative int, got {n!r}")
            if n:
                acc[x] = acc.get(x, 0) + n
        self._counts = dict(sorted(acc.items()))
        self._hash = None

    def __getitem__(self, x: str) -> int:
        return self._counts.get(x, 0)

    def __iter__(self) -> Iterator[str]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __contains__(self, x: object) -> bool:
        return x in self._counts

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Multiset):
            return self._counts == other._counts
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._counts.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"Multiset({self._counts!r})"

    def __str__(self) -> str:
        return "{" + ", ".join(f"{x}:{n}" for x, n in self._counts.items()) + "}"

    @property
    def size(self) -> int:
        return sum(self._counts.values())

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self._counts)

    def __add__(self, other: Mapping[str, int]) -> Multiset:
        out = dict(self._counts)
        for x, n in other.items():
            out[x] = out.get(x, 0) + n
        return Multiset(out)

    def __sub__(self, other: Mapping[str, int]) -> Multiset:
        if not all(self[x] >= n for x, n in other.items()):
            raise ValueError(f"{other} is not included in {self}")
        out = dict(self._counts)
        for x, n in other.items():
            out[x] -= n
        return Multiset(out)

    def __le__(self, other: Multiset) -> bool:
        return all(other[x] >= n for x, n in self._counts.items())

    def __ge__(self, other: Multiset) -> bool:
        return other <= self

    def __lt__(self, other: Multiset) -> bool:
        return self <= other and self != other

    def __gt__(self, other: Multiset) -> bool:
        return other < self

    def items_sorted(self, order: Iterable[str] | None = None) -> list[tuple[str, int]]:
        if order is None:
            return list(self._counts.items())
        return [(x, self[x]) for x in order if self[x]]


@dataclass(frozen=True)
class Configuration:
    multiset: Multiset
    datum: str

    @property
    def size(self) -> int:
        return self.multiset.size

    @property
    def support(self) -> frozenset[str]:
        return self.multiset.support

    def __add__(self, delta: Mapping[str, int]) -> Configuration:
        return Configuration(self.multiset + delta, self.datum)

    def __str__(self) -> str:
        return format_configuration(self)


def conf(counts: Mapping[str, int] | Iterable[str], datum: str | int) -> Configuration:
    """Shorthand: ``conf({"q0": 2}, 0)``."""
    return Configuration(Multiset(counts), str(datum))


def format_configuration(g: Configuration, order: Iterable[str] | None = None) -> str:
    """Text form used in traces: ``q0:2 q1:1 | 0``."""
    body = " ".join(f"{x}:{n}" for x, n in g.multiset.items_sorted(order))
    return f"{body} | {g.datum}"


def parse_configuration(text: str) -> Configuration:
    body, sep, datum = text.rpartition("|")
    if not sep or not datum.strip():
        raise ValueError(f"configuration {text!r} lacks a '| <datum>' suffix")
    counts: dict[str, int] = {}
    for token in body.split():
        loc, _, n = token.rpartition(":")
        if not loc:
            raise ValueError(f"bad multiset entry {token!r}")
        counts[loc] = counts.get(loc, 0) + int(n)
    return Configuration(Multiset(counts), datum.strip())


# ---------------------------------------------------------------------------
# validation

def validate(p: Protocol, completion: ReadPolicy | None = None) -> Protocol:
    """Check the protocol invariants, completing missing reads as self-loops
    under :attr:`ReadPolicy.SELF_LOOP` (``completion`` defaults to ``p.reads``).

    Returns the completed protocol.
    """
    policy = p.reads if completion is None else completion
    locs, data = set(p.locations), set(p.data)
    if len(locs) != len(p.locations) or len(data) != len(p.data):
        raise ValidationError("duplicate location or datum declaration")
    if not p.locations:
        raise UndeclaredSymbol("location", "<none>")
    if not p.data:
        raise UndeclaredSymbol("datum", "<none>")
    if p.initial_location not in locs:
        raise UndeclaredSymbol("location", p.initial_location)
    if p.initial_datum not in data:
        raise UndeclaredSymbol("datum", p.initial_datum)
    if p.target is not None and p.target not in locs:
        raise UndeclaredSymbol("location", p.target)
    for t in p.transitions:
        for q in (t.source, t.target):
            if q not in locs:
                raise UndeclaredSymbol("location", q)
        for d in (t.read, t.write):
            if d is not None and d not in data:
                raise UndeclaredSymbol("datum", d)

    read_data: dict[str, set[str]] = {}
    for t in p.transitions:
        if t.read is not None:
            read_data.setdefault(t.source, set()).add(t.read)

    extra = []
    for q in p.locations:
        if q not in read_data:
            continue
        for d in p.data:
            if d in read_data[q]:
                continue
            if policy is ReadPolicy.STRICT:
                raise IncompleteReads(q, d)
            extra.append(Transition.r(q, d, q))

    done = p if not extra else Protocol(p.name, p.locations, p.data, p.initial_location,
                                        p.initial_datum, p.transitions + tuple(extra),
                                        p.target, p.reads)
    sources = {t.source for t in done.transitions}
    for q in done.locations:
        if q not in sources:
            raise DeadlockLocation(q)
    return done


@lru_cache(maxsize=256)
def completed(p: Protocol) -> Protocol:
    """``validate(p)`` under the protocol's own read policy, memoized."""
    return validate(p)


# ---------------------------------------------------------------------------
# semantics

def _fires(t: Transition, g: Configuration) -> str | None:
    """Register content after ``t`` fires from ``g``, or None if disabled."""
    if g.multiset[t.source] == 0:
        return None
    if t.op is Op.WRITE:
        return t.write
    if t.read != g.datum:
        return None
    return t.write if t.op is Op.READ_WRITE else g.datum


def successors(p: Protocol, g: Configuration) -> frozenset[Configuration]:
    """``Post(g)``: the set of distinct one-step successors.

    The protocol is completed under its read policy first.  Atomic
    read-write transitions read and write in a single indivisible step.
    """
    p = completed(p)
    out = set()
    for t in p.transitions:
        d = _fires(t, g)
        if d is None:
            continue
        mu = g.multiset - {t.source: 1} + {t.target: 1}
        out.add(Configuration(mu, d))
    return frozenset(out)


def post_distribution(p: Protocol, g: Configuration) -> dict[Configuration, Fraction]:
    """Uniform distribution over ``Post(g)``."""
    post = successors(p, g)
    if not post:
        return {}
    w = Fraction(1, len(post))
    return {h: w for h in post}


def leq(g1: Configuration, g2: Configuration, order: Order = Order.SUPPORT) -> bool:
    if g1.datum != g2.datum:
        return False
    if order is Order.SUPPORT and g1.support != g2.support:
        return False
    return g1.multiset <= g2.multiset


def compare(g1: Configuration, g2: Configuration, order: Order = Order.SUPPORT) -> Relation:
    below, above = leq(g1, g2, order), leq(g2, g1, order)
    if below and above:
        return Relation.EQUAL
    if below:
        return Relation.LESS
    if above:
        return Relation.GREATER
    return Relation.INCOMPARABLE


def multisets_of_size(locations: tuple[str, ...] | list[str], k: int) -> Iterator[Multiset]:
    """All multisets of cardinality ``k`` over ``locations`` (lexicographic)."""
    n = len(locations)

    def rec(i: int, left: int, acc: list[int]):
        if i == n - 1:
            yield [*acc, left]
            return
        for c in range(left, -1, -1):
            yield from rec(i + 1, left - c, [*acc, c])

    if n == 0:
        if k == 0:
            yield Multiset()
        return
    for counts in rec(0, k, []):
        yield Multiset(dict(zip(locations, counts)))


def configurations_of_size(p: Protocol, k: int) -> Iterator[Configuration]:
    """Enumerate ``Gamma_k``."""
    for mu in multisets_of_size(p.locations, k):
        for d in p.data:
            yield Configuration(mu, d)


__all__ = [
    "Configuration", "Multiset", "Op", "Order", "Protocol", "ReadPolicy", "Relation",
    "Transition", "compare", "completed", "conf", "configurations_of_size",
    "format_configuration", "leq", "multisets_of_size", "parse_configuration",
    "post_distribution", "successors", "validate",
]
