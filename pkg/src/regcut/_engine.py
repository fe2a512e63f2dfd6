"""Integer encoding of the configurations of a fixed-size network.

A configuration of size ``k`` is packed into one int: the location counts in
declaration order are mixed-radix digits in base ``k + 1`` (most significant
first) and the register datum index is the least significant digit.  Integer
order therefore coincides with lexicographic order on
``(count_0, ..., count_{n-1}, datum)``, which is the canonical node order.
"""
from __future__ import annotations

from .model import Configuration, Multiset, Op, Protocol, completed


class Engine:
    def __init__(self, p: Protocol, k: int):
        p = completed(p)
        self.protocol = p
        self.k = k
        self.locations = p.locations
        self.data = p.data
        self.n = n = len(p.locations)
        self.m = m = len(p.data)
        self.base = base = k + 1
        self.loc_index = {q: i for i, q in enumerate(p.locations)}
        self.data_index = {d: i for i, d in enumerate(p.data)}
        self.weights = [base ** (n - 1 - i) * m for i in range(n)]
        # per source location: (read index or -1, write index or -1, code delta)
        self.moves: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
        for t in p.transitions:
            i, j = self.loc_index[t.source], self.loc_index[t.target]
            rd = self.data_index[t.read] if t.op in (Op.READ, Op.READ_WRITE) else -1
            wd = self.data_index[t.write] if t.op in (Op.WRITE, Op.READ_WRITE) else -1
            self.moves[i].append((rd, wd, self.weights[j] - self.weights[i]))

    def encode(self, g: Configuration) -> int:
        if g.size != self.k:
            raise ValueError(f"configuration {g} does not have size {self.k}")
        code = self.data_index[g.datum]
        for q, c in g.multiset.items():
            code += c * self.weights[self.loc_index[q]]
        return code

    def counts(self, code: int) -> list[int]:
        rest = code // self.m
        base = self.base
        out = [0] * self.n
        for i in range(self.n - 1, -1, -1):
            rest, out[i] = divmod(rest, base)
        return out

    def decode(self, code: int) -> Configuration:
        counts = self.counts(code)
        mu = Multiset({q: c for q, c in zip(self.locations, counts) if c})
        return Configuration(mu, self.data[code % self.m])

    def count_at(self, code: int, loc: int) -> int:
        return (code // self.weights[loc]) % self.base

    def successors(self, code: int) -> list[int]:
        """Sorted distinct successor codes."""
        d = code % self.m
        rest = code // self.m
        base = self.base
        out = set()
        moves = self.moves
        for i in range(self.n - 1, -1, -1):
            rest, c = divmod(rest, base)
            if not c:
                continue
            for rd, wd, delta in moves[i]:
                if rd >= 0 and rd != d:
                    continue
                out.add(code + delta + (wd - d if wd >= 0 else 0))
        return sorted(out)
