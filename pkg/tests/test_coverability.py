import json

import pytest
from hypothesis import given, settings, strategies as st

from oracles import can_cover, support_minimal, random_instances
from regcut.coverability import (Basis, initial_basis, k_bound, member, pre_image_basis, pre_star_basis)
from regcut.errors import AtomicUnsupported, ResourceLimit
from regcut.families import atomic_parity, filter_protocol, running
from regcut.model import Configuration, Multiset, Protocol, Transition, conf, configurations_of_size

INSTANCES = random_instances(50)

# Pre* basis of the running example for target qf, checked against
# brute-force backward search on every configuration of size <= 4 below.
RUNNING_BASIS = [
    ("0", {"q0": 1, "q1": 1}), ("0", {"q0": 1, "q2": 1}), ("0", {"q0": 2}), ("0", {"q1": 1, "q2": 1}),
    ("0", {"q1": 2}), ("0", {"q2": 2}), ("0", {"qf": 1}),
    ("1", {"q1": 1, "q2": 1}), ("1", {"q1": 2}), ("1", {"q2": 2}), ("1", {"qf": 1}),
    ("2", {"q1": 2}), ("2", {"q2": 1}), ("2", {"qf": 1}),
]


def as_set(b: Basis):
    return {(g.datum, frozenset(g.multiset.items())) for g in b.elements()}


def is_antichain(b: Basis) -> bool:
    for d, vecs in b.antichains.items():
        for u in vecs:
            for v in vecs:
                if u != v and all(x <= y for x, y in zip(u, v)):
                    return False
    return True


class TestInitialBasis:
    def test_filter_one(self):
        b = initial_basis(filter_protocol(1), "s1")
        assert as_set(b) == {("0", frozenset({("s1", 1)}))}

    def test_running(self):
        b = initial_basis(running(), "qf")
        assert len(b) == 3
        for d in "012":
            assert member(b, conf({"qf": 2, "q0": 1}, d))

    def test_atomic_rejected(self):
        with pytest.raises(AtomicUnsupported):
            initial_basis(atomic_parity(), "qf")
        with pytest.raises(AtomicUnsupported):
            pre_star_basis(atomic_parity())


class TestPreImage:
    def test_filter_one_step(self):
        p = filter_protocol(1)
        b = pre_image_basis(p, initial_basis(p, "s1"))
        assert as_set(b) == {("0", frozenset({("s0", 1)})), ("0", frozenset({("s1", 1)}))}
        assert pre_image_basis(p, b) == b

    def test_no_subtraction_when_destination_absent(self):
        # a -W(1)-> b ; the element ({c:1},1) has no b, so the predecessor is
        # {a:1, c:1}, under every datum since writes ignore the register
        p = Protocol("t", ("a", "b", "c"), ("0", "1"), "a", "0",
                     (Transition.w("a", "1", "b"), Transition.w("b", "0", "b"), Transition.w("c", "0", "c")))
        start = Basis(p.locations, "c", {"0": frozenset(), "1": frozenset({(0, 0, 1)})})
        b = pre_image_basis(p, start)
        assert (1, 0, 1) in b.antichains["0"]
        # under datum 1 it is subsumed by the element itself
        assert b.antichains["1"] == {(0, 0, 1)}

    def test_antichain_and_convergence(self):
        for p in INSTANCES:
            b = initial_basis(p, p.target)
            for _ in range(200):
                assert is_antichain(b)
                nxt = pre_image_basis(p, b)
                if nxt == b:
                    break
                b = nxt
            else:
                pytest.fail("no fixpoint after 200 rounds")
            assert b == pre_star_basis(p)


class TestPreStar:
    def test_filter_one(self):
        b = pre_star_basis(filter_protocol(1))
        assert as_set(b) == {("0", frozenset({("s0", 1)})), ("0", frozenset({("s1", 1)}))}
        assert k_bound(b).value == 1

    def test_running_fixture(self):
        b = pre_star_basis(running())
        assert as_set(b) == {(d, frozenset(m.items())) for d, m in RUNNING_BASIS}
        assert k_bound(b).value == 2

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_running_fixture_against_oracle(self, k):
        vecs: dict[str, set] = {}
        for d, m in RUNNING_BASIS:
            vecs.setdefault(d, set()).add(tuple(m.get(q, 0) for q in running().locations))
        b = Basis(running().locations, "qf", {d: frozenset(v) for d, v in vecs.items()})
        good = can_cover(running(), k, "qf")
        for g in configurations_of_size(running(), k):
            assert member(b, g) == (g in good), str(g)

    @pytest.mark.parametrize("p", INSTANCES[:20], ids=lambda p: p.name)
    def test_target_initial_location(self, p):
        b = pre_star_basis(p, p.initial_location)
        for d in p.data:
            assert member(b, Configuration(Multiset({p.initial_location: 1}), d))
            assert tuple(int(q == p.initial_location) for q in p.locations) in b.antichains[d]
        assert member(b, p.initial_configuration(3))

    def test_fixpoint_and_antichain_on_random(self):
        for p in INSTANCES:
            b = pre_star_basis(p)
            assert is_antichain(b)
            assert pre_image_basis(p, b) == b

    def test_cap(self):
        with pytest.raises(ResourceLimit) as e:
            pre_star_basis(filter_protocol(4), cap=3)
        assert e.value.code == "coverability/ResourceLimit"

    def test_records_are_sorted_and_serializable(self):
        recs = pre_star_basis(running()).to_records()
        assert recs == sorted(recs, key=lambda r: (r["datum"], r["multiset"]))
        assert json.loads(json.dumps(recs)) == recs
        assert recs[0] == {"datum": "0", "multiset": [["q0", 1], ["q1", 1]]}


class TestMember:
    def test_examples(self):
        b = pre_star_basis(running())
        assert member(b, conf({"qf": 1, "q0": 5}, 2))
        assert not member(b, conf({"q0": 5}, 2))

    @settings(max_examples=200, deadline=None)
    @given(st.dictionaries(st.sampled_from(["q0", "q1", "q2", "qf"]), st.integers(0, 3)),
           st.dictionaries(st.sampled_from(["q0", "q1", "q2", "qf"]), st.integers(0, 3)),
           st.sampled_from("012"))
    def test_monotone(self, small, extra, d):
        b = pre_star_basis(running())
        g = conf(small, d)
        if member(b, g):
            assert member(b, Configuration(g.multiset + Multiset(extra), d))


class TestKBound:
    def test_values(self):
        def basis(*vecs):
            return Basis(("q", "r"), "q", {"0": frozenset(vecs)})
        assert k_bound(basis((3, 0))).value == 3
        assert k_bound(basis((1, 0), (0, 1))).value == 1
        assert k_bound(basis((0, 0))).value == 1
        assert k_bound(basis((2, 1), (0, 3))).max_coordinate == 3

    def test_bounds_support_preserving_minimal_elements(self):
        for p in INSTANCES:
            kb = k_bound(pre_star_basis(p)).value
            good = set()
            for k in (1, 2, 3):
                good |= can_cover(p, k, p.target)
            for eta in support_minimal(good):
                assert max(eta.multiset.values()) <= kb, (p.name, str(eta))
