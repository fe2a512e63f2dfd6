import random

import pytest
from hypothesis import given, settings, strategies as st

from regcut.dsl import load, parse, serialize
from regcut.errors import ParseError, UnsupportedParameter
from regcut.families import Family, FamilySpec, counter, filter_protocol, generate, random_protocol, running
from regcut.model import Op, ReadPolicy, validate

RUNNING_SOURCE = """\
protocol running
locations q0 q1 q2 qf
data 0 1 2
init q0
register 0
target qf
q0 R 0 q1
q1 W 1 q1
q1 R 1 q2
q2 W 2 q1
q2 R 2 qf
qf W 2 qf
"""


def test_parse_running():
    p = parse(RUNNING_SOURCE)
    assert p.locations == ("q0", "q1", "q2", "qf")
    assert p.data == ("0", "1", "2")
    assert (p.initial_location, p.initial_datum, p.target) == ("q0", "0", "qf")
    assert p.reads is ReadPolicy.SELF_LOOP
    assert len(p.transitions) == 6


def test_checked_in_source_matches_generator(protocols_dir):
    assert load(protocols_dir / "running.rp") == running()


@pytest.mark.parametrize("text,reason", [
    ("", "missing header"),
    ("data 0\n", "missing header"),
    ("protocol p\nlocations q\ndata 0\ninit q\nregister 0\nq W 0 q\nfoo bar\n", "unknown keyword"),
    ("protocol p\nlocations q\ndata 0\ndata 1\n", "duplicate declaration"),
    ("protocol p\nlocations q\ndata 0\ninit q\nregister 0\nq W 0\n", "expects 4 tokens"),
    ("protocol p\nlocations q\ndata 0\ninit q\nregister 0\nq RW 0 q\n", "expects 5 tokens"),
    ("protocol p\nlocations q0 q1\ndata 0\ninit q0\nregister 0\nq9 R 0 q1\n", "undeclared location"),
    ("protocol p\nlocations q\ndata 0\ninit q\nregister 5\nq W 0 q\n", "undeclared datum"),
    ("protocol p\nlocations q\ndata 0\ninit q\nq W 0 q\n", "missing 'register'"),
    ("protocol p\nlocations q\ndata 0\ninit q\nregister 0\nreads lazy\nq W 0 q\n", "reads policy"),
])
def test_parse_errors(text, reason):
    with pytest.raises(ParseError) as e:
        parse(text)
    assert reason in str(e.value)


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as e:
        parse("protocol p\nlocations q0 q1\ndata 0\ninit q0\nregister 0\n\nq9 R 0 q1\n")
    assert e.value.line == 7


def test_comments_and_hash_datum():
    text = "# header comment\nprotocol c\n  # indented comment\nlocations a\ndata # x\ninit a\nregister #\na R # a\n"
    p = parse(text)
    assert p.data == ("#", "x")
    assert p.transitions[0].read == "#"


def test_atomic_transition_syntax():
    p = parse("protocol a\nlocations q r\ndata 0 1\ninit q\nregister 0\nq RW 0 1 r\nr W 0 r\n")
    assert p.atomic
    t = p.transitions[0]
    assert (t.op, t.read, t.write) == (Op.READ_WRITE, "0", "1")


def test_serialize_is_canonical():
    text = serialize(parse(RUNNING_SOURCE))
    assert text.splitlines()[:7] == ["protocol running", "locations q0 q1 q2 qf", "data 0 1 2",
                                     "init q0", "register 0", "target qf", "reads self"]
    assert serialize(parse(text)) == text


def test_minimal_protocol():
    p = parse("protocol one\nlocations q\ndata 0\ninit q\nregister 0\nq W 0 q\n")
    lines = serialize(p).splitlines()
    assert lines[-1] == "q W 0 q"
    assert sum(1 for line in lines if " W " in line or " R " in line) == 1


@pytest.mark.parametrize("spec", [FamilySpec(Family.RUNNING), FamilySpec(Family.ATOMIC_PARITY),
                                  FamilySpec(Family.FILTER, 1), FamilySpec(Family.FILTER, 4),
                                  FamilySpec(Family.COUNTER, 2)])
def test_family_round_trip(spec):
    p = generate(spec)
    assert parse(serialize(p)) == p


def test_random_round_trip_hundred():
    for seed in range(100):
        p = random_protocol(random.Random(seed), atomic=seed % 3 == 0)
        assert parse(serialize(p)) == p


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_round_trip_property(seed, atomic):
    p = random_protocol(random.Random(seed), atomic=atomic)
    assert parse(serialize(p)) == p
    assert validate(parse(serialize(p))) == validate(p)


@pytest.mark.parametrize("n", range(1, 7))
def test_filter_shape(n):
    p = filter_protocol(n)
    assert len(p.locations) == n + 1
    # 2n moves plus an idle read at the target
    assert len(p.transitions) == 2 * n + 1
    assert p.target == f"s{n}"


def test_counter_shape():
    p = counter(2)
    assert p.initial_location == "init" and p.initial_datum == "#"
    assert set(p.data) == {"#", "0", "1", "2", "halt", "f0", "f1", "f2"}
    assert {"token", "sent", "sink", "a1", "b1", "c1", "d1", "a2", "d2", "s0", "s2", "qf"} <= set(p.locations)
    validate(p, ReadPolicy.SELF_LOOP)


@pytest.mark.parametrize("family", [Family.FILTER, Family.COUNTER])
def test_unsupported_parameter(family):
    with pytest.raises(UnsupportedParameter):
        FamilySpec(family, 0)
