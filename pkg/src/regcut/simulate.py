"""Monte-Carlo runs of the uniform scheduler on a fixed-size network.

Every step picks one configuration uniformly from the successor set.  Each
trial draws from its own generator seeded by ``(seed, trial_index)``, so a
result depends only on the protocol and the configuration, whatever the
number of worker processes.
"""
from __future__ import annotations

import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

from ._engine import Engine
from .concrete import DEFAULT_NODE_CAP, explore
from .errors import ResourceLimit, UndeclaredSymbol, UnknownLocation
from .model import Configuration, Protocol, completed, format_configuration


@dataclass(frozen=True)
class SimConfig:
    k: int
    horizon: int = 10_000
    trials: int = 1_000
    seed: int = 0
    target: str | None = None
    datum: str | None = None
    # stop a trial early once it enters a configuration that cannot reach
    # the target any more; outcomes are unchanged
    prune: bool = True

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")


@dataclass
class Trace:
    configurations: list[Configuration]
    hit_step: int | None
    stopped_dead: bool = False

    @property
    def hit(self) -> bool:
        return self.hit_step is not None

    def dump(self) -> str:
        """One configuration per line."""
        return "".join(format_configuration(g) + "\n" for g in self.configurations)


@dataclass
class SimResult:
    hits: int
    trials: int
    seed: int
    k: int
    horizon: int
    target: str
    mean_hit_step: float | None = None
    min_hit_step: int | None = None
    max_hit_step: int | None = None
    dead_stops: int = 0

    @property
    def estimate(self) -> float:
        return self.hits / self.trials

    @property
    def radius(self) -> float:
        """Three standard errors of the estimate."""
        p = self.estimate
        return 3 * math.sqrt(p * (1 - p) / self.trials)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["estimate"] = self.estimate
        d["radius"] = self.radius
        return d


class Simulator:
    """Sampling machinery shared by all trials of one ``(protocol, k)`` pair."""

    def __init__(self, p: Protocol, k: int, target: str, datum: str | None = None,
                 prune: bool = True, node_cap: int = DEFAULT_NODE_CAP):
        p = completed(p)
        if target not in p.locations:
            raise UndeclaredSymbol("location", target)
        self.protocol = p
        self.engine = Engine(p, k)
        self.datum = p.initial_datum if datum is None else datum
        if self.datum not in p.data:
            raise UndeclaredSymbol("datum", self.datum)
        self.target = target
        self.target_weight = self.engine.weights[self.engine.loc_index[target]]
        self.initial = self.engine.encode(p.initial_configuration(k, self.datum))
        self._succ: dict[int, list[int]] = {}
        self.dead: frozenset[int] = frozenset()
        if prune:
            try:
                space = explore(p, k, self.datum, stop_at=target, node_cap=node_cap)
            except ResourceLimit:
                pass  # simulate without pruning
            else:
                good = space.can_reach(space.covering(target))
                self.dead = frozenset(c for c, ok in zip(space.codes, good) if not ok)

    def covers_target(self, code: int) -> bool:
        return (code // self.target_weight) % self.engine.base > 0

    def next_code(self, code: int, rng: random.Random) -> int:
        succ = self._succ.get(code)
        if succ is None:
            succ = self._succ[code] = self.engine.successors(code)
        return succ[rng.randrange(len(succ))]

    def sample_next(self, g: Configuration, rng: random.Random) -> Configuration:
        return self.engine.decode(self.next_code(self.engine.encode(g), rng))

    def run(self, horizon: int, rng: random.Random, record: bool = False):
        """Returns ``(hit_step or None, stopped_dead, codes or None)``."""
        code = self.initial
        codes = [code] if record else None
        dead = self.dead
        for step in range(horizon + 1):
            if self.covers_target(code):
                return step, False, codes
            if code in dead:
                return None, True, codes
            if step == horizon:
                break
            code = self.next_code(code, rng)
            if record:
                codes.append(code)
        return None, False, codes


def trial_rng(seed: int, trial_index: int) -> random.Random:
    return random.Random(f"{seed}:{trial_index}")


def _target(p: Protocol, cfg: SimConfig) -> str:
    target = cfg.target if cfg.target is not None else p.target
    if target is None:
        raise ValueError(f"protocol {p.name} declares no target; pass one explicitly")
    return target


def run_trial(p: Protocol, cfg: SimConfig, trial_index: int) -> Trace:
    """One trace from ``<q0^k, d0>``, stopping at the first configuration
    covering the target or after ``horizon`` steps.  Traces are never
    pruned."""
    sim = Simulator(p, cfg.k, _target(p, cfg), cfg.datum, prune=False)
    hit, dead, codes = sim.run(cfg.horizon, trial_rng(cfg.seed, trial_index), record=True)
    return Trace([sim.engine.decode(c) for c in codes], hit, dead)


def _run_chunk(p: Protocol, cfg: SimConfig, start: int, stop: int) -> tuple[int, int, int, int, int, int]:
    sim = Simulator(p, cfg.k, _target(p, cfg), cfg.datum, prune=cfg.prune)
    hits = dead_stops = total = 0
    lo, hi = math.inf, -1
    for i in range(start, stop):
        step, dead, _ = sim.run(cfg.horizon, trial_rng(cfg.seed, i))
        if step is not None:
            hits += 1
            total += step
            lo, hi = min(lo, step), max(hi, step)
        dead_stops += dead
    return hits, dead_stops, total, lo, hi, stop - start


def estimate(p: Protocol, cfg: SimConfig, workers: int = 1) -> SimResult:
    """Fraction of ``cfg.trials`` trials that cover the target within the horizon."""
    target = _target(p, cfg)
    if workers <= 1:
        parts = [_run_chunk(p, cfg, 0, cfg.trials)]
    else:
        n_chunks = min(cfg.trials, workers)
        bounds = [cfg.trials * i // n_chunks for i in range(n_chunks + 1)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, p, cfg, a, b) for a, b in zip(bounds, bounds[1:])]
            parts = [f.result() for f in futures]
    hits = sum(x[0] for x in parts)
    total = sum(x[2] for x in parts)
    res = SimResult(hits, cfg.trials, cfg.seed, cfg.k, cfg.horizon, target,
                    dead_stops=sum(x[1] for x in parts))
    if hits:
        res.mean_hit_step = total / hits
        res.min_hit_step = min(x[3] for x in parts)
        res.max_hit_step = max(x[4] for x in parts)
    return res


def filter_invariant_holds(g: Configuration, n: int) -> bool:
    """``sum_{i<=j} g(s_i) >= j + [datum == j+1]`` for every ``j <= |g|``."""
    names = {f"s{i}" for i in range(n + 1)}
    unknown = set(g.multiset) - names
    if unknown:
        raise UnknownLocation(f"location {sorted(unknown)[0]} is not a location of filter{n}")
    m = g.size
    try:
        datum = int(g.datum)
    except ValueError:
        raise UnknownLocation(f"datum {g.datum} is not a datum of filter{n}") from None
    prefix = 0
    for j in range(m + 1):
        prefix += g.multiset[f"s{j}"]
        if prefix < j + (datum == j + 1):
            return False
    return True


def monitor_filter_invariant(trace, n: int) -> bool:
    """True iff every configuration of ``trace`` satisfies the filter invariant."""
    configurations = trace.configurations if isinstance(trace, Trace) else trace
    return all(filter_invariant_holds(g, n) for g in configurations)
