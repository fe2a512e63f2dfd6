"""Line-oriented text format for protocols.

::

    # full-line comments start with '#'
    protocol running
    locations q0 q1 q2 qf
    data 0 1 2
    init q0
    register 0
    target qf          # optional
    reads self         # or: strict (default: self)
    q0 R 0 q1
    q1 W 1 q1
    q0 RW 0 1 q1       # atomic read-then-write

One statement per line, tokens separated by whitespace.  Only lines whose
first non-blank character is ``#`` are comments, so ``#`` remains usable as
a datum name.  A line whose second token is ``R``, ``W`` or ``RW`` is a
transition, so locations may share a name with the single-argument
keywords (``init`` is a location of the counter family); only
``locations`` and ``data`` are reserved.
"""
from __future__ import annotations

from .errors import ParseError
from .model import Op, Protocol, ReadPolicy, Transition

KEYWORDS = ("protocol", "locations", "data", "init", "register", "target", "reads")
_LIST_KEYWORDS = ("locations", "data")
_OPS = {"R": Op.READ, "W": Op.WRITE, "RW": Op.READ_WRITE}


def parse(text: str) -> Protocol:
    """Parse protocol source.  The result is not read-completed or validated."""
    decl: dict[str, tuple[int, list[str]]] = {}
    transitions: list[tuple[int, Transition]] = []
    header_seen = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        head = tokens[0]
        if not header_seen:
            if head != "protocol":
                raise ParseError(lineno, "missing header: expected 'protocol <name>'")
            header_seen = True
        if head not in _LIST_KEYWORDS and len(tokens) >= 3 and tokens[1] in _OPS:
            op = _OPS[tokens[1]]
            arity = 5 if op is Op.READ_WRITE else 4
            if len(tokens) != arity:
                raise ParseError(lineno, f"{tokens[1]} transition expects {arity} tokens, got {len(tokens)}")
            if op is Op.READ_WRITE:
                t = Transition.rw(tokens[0], tokens[2], tokens[3], tokens[4])
            elif op is Op.READ:
                t = Transition.r(tokens[0], tokens[2], tokens[3])
            else:
                t = Transition.w(tokens[0], tokens[2], tokens[3])
            transitions.append((lineno, t))
        elif head in KEYWORDS:
            if head in decl:
                raise ParseError(lineno, f"duplicate declaration '{head}'")
            args = tokens[1:]
            many = head in _LIST_KEYWORDS
            if (many and not args) or (not many and len(args) != 1):
                raise ParseError(lineno, f"'{head}' expects {'at least one argument' if many else 'one argument'}")
            if many and len(set(args)) != len(args):
                raise ParseError(lineno, f"duplicate name in '{head}'")
            decl[head] = (lineno, args)
        else:
            raise ParseError(lineno, f"unknown keyword '{head}'")
    if not header_seen:
        raise ParseError(0, "missing header: expected 'protocol <name>'")

    for key in ("locations", "data", "init", "register"):
        if key not in decl:
            raise ParseError(0, f"missing '{key}' declaration")
    locations = decl["locations"][1]
    data = decl["data"][1]
    locset, dataset = set(locations), set(data)
    for q in locations:
        if q.startswith("#") or q in _LIST_KEYWORDS:
            raise ParseError(decl["locations"][0], f"invalid location name '{q}'")

    def need(kind: str, name: str, lineno: int):
        pool = locset if kind == "location" else dataset
        if name not in pool:
            raise ParseError(lineno, f"undeclared {kind} '{name}'")

    need("location", decl["init"][1][0], decl["init"][0])
    need("datum", decl["register"][1][0], decl["register"][0])
    target = None
    if "target" in decl:
        target = decl["target"][1][0]
        need("location", target, decl["target"][0])
    reads = ReadPolicy.SELF_LOOP
    if "reads" in decl:
        word = decl["reads"][1][0]
        try:
            reads = ReadPolicy(word)
        except ValueError:
            raise ParseError(decl["reads"][0], f"reads policy must be 'self' or 'strict', got '{word}'") from None
    for lineno, t in transitions:
        need("location", t.source, lineno)
        need("location", t.target, lineno)
        for d in (t.read, t.write):
            if d is not None:
                need("datum", d, lineno)

    return Protocol(
        name=decl["protocol"][1][0],
        locations=tuple(locations),
        data=tuple(data),
        initial_location=decl["init"][1][0],
        initial_datum=decl["register"][1][0],
        transitions=tuple(t for _, t in transitions),
        target=target,
        reads=reads,
    )


def serialize(p: Protocol) -> str:
    """Canonical text: declarations in fixed order, then sorted transitions."""
    lines = [
        f"protocol {p.name}",
        "locations " + " ".join(p.locations),
        "data " + " ".join(p.data),
        f"init {p.initial_location}",
        f"register {p.initial_datum}",
    ]
    if p.target is not None:
        lines.append(f"target {p.target}")
    lines.append(f"reads {p.reads.value}")
    lines.extend(str(t) for t in p.transitions)
    return "\n".join(lines) + "\n"


def load(path) -> Protocol:
    with open(path, encoding="utf-8") as fh:
        return parse(fh.read())
