"""Generators for the reference protocol families and for random protocols."""
from __future__ import annotations

import enum
import random
from dataclasses import dataclass

from .errors import UnsupportedParameter
from .model import Protocol, ReadPolicy, Transition, validate

R, W, RW = Transition.r, Transition.w, Transition.rw


class Family(enum.Enum):
    RUNNING = "running"
    ATOMIC_PARITY = "atomic-parity"
    FILTER = "filter"
    COUNTER = "counter"


@dataclass(frozen=True)
class FamilySpec:
    family: Family
    n: int | None = None

    def __post_init__(self):
        if isinstance(self.family, str):
            object.__setattr__(self, "family", Family(self.family))
        if self.family in (Family.FILTER, Family.COUNTER):
            if self.n is None or self.n < 1:
                raise UnsupportedParameter(f"{self.family.value} needs n >= 1, got {self.n}")


def generate(spec: FamilySpec) -> Protocol:
    if spec.family is Family.RUNNING:
        return running()
    if spec.family is Family.ATOMIC_PARITY:
        return atomic_parity()
    if spec.family is Family.FILTER:
        return filter_protocol(spec.n)
    return counter(spec.n)


def running() -> Protocol:
    """Four-location example over {0,1,2}.

    A lone process can never reach ``qf``; two processes can (both reach
    ``q2``, one writes 2, the other reads it), but not almost surely.
    """
    return Protocol(
        "running", ("q0", "q1", "q2", "qf"), ("0", "1", "2"), "q0", "0",
        (R("q0", "0", "q1"), W("q1", "1", "q1"), R("q1", "1", "q2"),
         W("q2", "2", "q1"), R("q2", "2", "qf"), W("qf", "2", "qf")),
        target="qf")


def atomic_parity() -> Protocol:
    """Atomic read-write protocol reaching ``qf`` almost surely iff the
    number of processes is odd."""
    return Protocol(
        "atomic_parity", ("q0", "q1", "q2", "qf"), ("0", "1", "2"), "q0", "0",
        (RW("q0", "0", "1", "q1"), RW("q1", "1", "0", "q0"), RW("q0", "1", "2", "q2"),
         RW("q1", "2", "0", "q2"), R("q0", "0", "qf"), R("q2", "0", "q2"), R("qf", "0", "qf")),
        target="qf")


def filter_protocol(n: int) -> Protocol:
    """Filter ``F_n``: target ``s{n}`` is reached almost surely iff at least
    ``n`` processes run.

    Moving from ``s_i`` to ``s_{i+1}`` needs a partner that writes ``i`` and
    falls back to ``s0``.  The target only idles.
    """
    if n < 1:
        raise UnsupportedParameter(f"filter needs n >= 1, got {n}")
    s = [f"s{i}" for i in range(n + 1)]
    data = tuple(str(i) for i in range(n))
    ts = [W("s0", "0", "s0")]
    ts += [R(s[i], str(i), s[i + 1]) for i in range(n)]
    ts += [W(s[i], str(i), "s0") for i in range(1, n)]
    ts.append(R(s[n], "0", s[n]))
    return Protocol(f"filter{n}", tuple(s), data, "s0", "0", tuple(ts), target=s[n])


def counter(n: int) -> Protocol:
    """Exponential-counter protocol with tight negative cut-off ``n + 2**n``.

    ``token`` processes each write one token (datum ``1``) and wait in
    ``sent`` for ``halt``; any other value sends them to ``qf``.  Bit ``i``
    gadget ``a_i -R(i)-> b_i -W(0)-> c_i -R(i)-> d_i`` needs two carries
    ``i`` to fire its own carry ``i+1`` (``d_n`` writes ``halt`` instead).
    A gadget process reading a value other than its own index (or ``#``)
    goes to ``qf``; on ``halt`` or ``f_j`` every gadget process enters the
    ``(n+1)``-filter ``s0..s{n}, qf`` over data ``f0..f{n}``.
    """
    if n < 1:
        raise UnsupportedParameter(f"counter needs n >= 1, got {n}")
    nums = [str(i) for i in range(n + 1)]
    fs = [f"f{i}" for i in range(n + 1)]
    data = ("#", *nums, "halt", *fs)
    gadgets = [[f"{x}{i}" for x in "abcd"] for i in range(1, n + 1)]
    filt = [f"s{i}" for i in range(n + 1)]
    locations = ("init", "token", "sent", "sink", *[q for g in gadgets for q in g], *filt, "qf")

    ts = [R("init", "#", "token"), W("token", "1", "sent"), R("sent", "halt", "sink"),
          R("sink", "#", "sink"), R("qf", "#", "qf")]
    ts += [R("sent", m, "qf") for m in data if m != "halt"]
    for i, (a, b, c, d) in enumerate(gadgets, start=1):
        ts.append(R("init", "#", a))
        ts += [R(a, str(i), b), W(b, "0", c), R(c, str(i), d)]
        ts.append(W(d, str(i + 1), a) if i < n else W(d, "halt", "s0"))
        for x in (a, c):
            ts += [R(x, m, "qf") for m in ("#", *nums) if m != str(i)]
        for x in (a, b, c, d):
            ts += [R(x, m, "s0") for m in ("halt", *fs)]
    ts.append(W("s0", "f0", "s0"))
    ts += [R(filt[i], fs[i], filt[i + 1]) for i in range(n)]
    ts.append(R(filt[n], fs[n], "qf"))
    ts += [W(filt[i], fs[i], "s0") for i in range(1, n + 1)]
    return Protocol(f"counter{n}", locations, data, "init", "#", tuple(ts), target="qf")


def random_protocol(rng: random.Random, max_locations: int = 4, max_data: int = 3,
                    max_transitions: int = 12, atomic: bool = False,
                    min_locations: int = 2) -> Protocol:
    """A random valid protocol with at most the given numbers of locations,
    data and declared transitions (reads are completed as self-loops).

    The target is a location other than the initial one when there are at
    least two locations.
    """
    nq = rng.randint(min(min_locations, max_locations), max_locations)
    nd = rng.randint(1, max_data)
    locs = tuple(f"q{i}" for i in range(nq))
    data = tuple(str(i) for i in range(nd))
    ops = ["R", "W", "RW"] if atomic else ["R", "W"]
    distinct = nq * nq * nd * (2 + (nd if atomic else 0))
    budget = min(rng.randint(nq, max(nq, max_transitions)), distinct)
    ts = set()
    for q in locs:  # every location gets one outgoing edge
        ts.add(_random_edge(rng, q, locs, data, ops))
    while len(ts) < budget:
        ts.add(_random_edge(rng, rng.choice(locs), locs, data, ops))
    target = rng.choice(locs[1:]) if nq > 1 else locs[0]
    p = Protocol("random", locs, data, "q0", rng.choice(data), tuple(ts), target=target,
                 reads=ReadPolicy.SELF_LOOP)
    validate(p)
    return p


def _random_edge(rng, q, locs, data, ops) -> Transition:
    op = rng.choice(ops)
    dest = rng.choice(locs)
    if op == "R":
        return R(q, rng.choice(data), dest)
    if op == "W":
        return W(q, rng.choice(data), dest)
    return RW(q, rng.choice(data), rng.choice(data), dest)
