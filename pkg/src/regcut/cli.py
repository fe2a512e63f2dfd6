"""Command-line interface.

Exit codes: 0 success, 1 negative verdict under ``--strict-exit``, 2 input
or validation error, 3 resource limit exceeded.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from . import dsl
from .concrete import DEFAULT_NODE_CAP, check_almost_sure, check_coverable, exact_reach_probability, explore
from .coverability import DEFAULT_BASIS_CAP, k_bound, pre_star_basis
from .errors import RegcutError, ResourceLimit
from .export import export_dot
from .families import Family, FamilySpec, generate
from .model import ReadPolicy, validate
from .simulate import SimConfig, estimate, run_trial
from .symbolic import DEFAULT_SYMBOLIC_CAP, Sign, build, cutoff_bounds, decide_cutoff
from .tight import DEFAULT_CERTIFY_CAP, tight_search

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise SystemExit(f"error: environment variable {name} must be an integer, got {raw!r}")


def _add_source(sp: argparse.ArgumentParser) -> None:
    src = sp.add_argument_group("protocol source")
    src.add_argument("path", nargs="?", help="protocol file")
    src.add_argument("--file", help="protocol file (same as the positional argument)")
    src.add_argument("--family", choices=[f.value for f in Family], help="use a generated family")
    src.add_argument("--n", type=int, help="family parameter")
    sp.add_argument("--datum", help="initial register value (default: the protocol's)")


def _add_caps(sp: argparse.ArgumentParser, *which: str) -> None:
    caps = sp.add_argument_group("resource caps (defaults read from REGCUT_* variables)")
    if "node" in which:
        caps.add_argument("--node-cap", type=int,
                          default=_env_int("REGCUT_NODE_CAP", DEFAULT_NODE_CAP))
    if "basis" in which:
        caps.add_argument("--basis-cap", type=int,
                          default=_env_int("REGCUT_BASIS_CAP", DEFAULT_BASIS_CAP))
    if "symbolic" in which:
        caps.add_argument("--symbolic-cap", type=int,
                          default=_env_int("REGCUT_SYMBOLIC_CAP", DEFAULT_SYMBOLIC_CAP))


def _add_output(sp: argparse.ArgumentParser, formats=("text", "json")) -> None:
    sp.add_argument("--format", choices=formats, default=formats[0])
    sp.add_argument("--out", help="write the result here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regcut",
        description="Almost-sure reachability and cut-off analysis of register protocols.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--strict-exit", action="store_true",
                        help="exit with 1 on negative verdicts")
    sub = parser.add_subparsers(dest="verb", required=True)

    def add(name: str, **kw) -> argparse.ArgumentParser:
        return sub.add_parser(name, parents=[common], **kw)

    sp = add("validate", help="parse and validate a protocol")
    _add_source(sp)
    sp.add_argument("--reads", choices=[r.value for r in ReadPolicy],
                    help="override the file's read-completion policy")
    _add_output(sp)

    sp = add("check", help="almost-sure reachability for k processes")
    _add_source(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--target")
    sp.add_argument("--exact", action="store_true", help="also compute the exact probability")
    _add_caps(sp, "node")
    _add_output(sp)

    sp = add("coverable", help="can some process reach the target with k processes")
    _add_source(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--target")
    _add_caps(sp, "node")
    _add_output(sp)

    sp = add("prestar", help="minimal basis of the configurations that can reach the target")
    _add_source(sp)
    sp.add_argument("--target")
    _add_caps(sp, "basis")
    _add_output(sp)

    for verb, text in (("decide", "sign of the cut-off"), ("bounds", "upper bound on the tight cut-off")):
        sp = add(verb, help=text)
        _add_source(sp)
        sp.add_argument("--target")
        sp.add_argument("--index", type=int, help="symbolic graph index (uncertified if too small)")
        _add_caps(sp, "basis", "symbolic")
        _add_output(sp)

    sp = add("simulate", help="Monte-Carlo estimate of the reachability probability")
    _add_source(sp)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--target")
    sp.add_argument("--trials", type=int, default=1000)
    sp.add_argument("--horizon", type=int, default=10_000)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--no-prune", action="store_true",
                    help="do not stop trials early in configurations that cannot reach the target")
    sp.add_argument("--trace", type=int, metavar="TRIAL",
                    help="dump the trace of this trial instead of estimating")
    _add_output(sp)

    sp = add("export", help="DOT rendering of a state space or symbolic graph")
    _add_source(sp)
    sp.add_argument("--graph", choices=("states", "symbolic"), default="states")
    sp.add_argument("--k", type=int, help="process count (states) or index (symbolic, default 0)")
    sp.add_argument("--highlight", help="mark nodes containing this location")
    _add_caps(sp, "node", "symbolic")
    _add_output(sp, formats=("dot",))

    sp = add("gen", help="write a generated family member as protocol text")
    sp.add_argument("--family", choices=[f.value for f in Family], required=True)
    sp.add_argument("--n", type=int)
    sp.add_argument("--out")

    sp = add("tight", help="scan sizes for the tight cut-off")
    _add_source(sp)
    sp.add_argument("--target")
    sp.add_argument("--k-max", type=int, required=True)
    sp.add_argument("--no-certify", action="store_true", help="skip the symbolic certificate")
    sp.add_argument("--certify-cap", type=int,
                    default=_env_int("REGCUT_CERTIFY_CAP", DEFAULT_CERTIFY_CAP))
    _add_caps(sp, "node", "basis")
    _add_output(sp)
    return parser


class _Usage(Exception):
    pass


def _load(args, completion: ReadPolicy | None = None):
    path = args.file or args.path
    if args.file and args.path and args.file != args.path:
        raise _Usage("give the protocol file once, either positionally or with --file")
    if path and args.family:
        raise _Usage("give either a protocol file or --family, not both")
    if path:
        try:
            p = dsl.load(path)
        except OSError as e:
            raise _Usage(f"cannot read {path}: {e.strerror}") from None
    elif args.family:
        p = generate(FamilySpec(Family(args.family), args.n))
    else:
        raise _Usage("no protocol given (file path, --file or --family)")
    return validate(p, completion)


def _emit(args, text: str) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True)


def _run(args) -> int:
    verb = args.verb
    if verb == "gen":
        p = generate(FamilySpec(Family(args.family), args.n))
        _emit(args, dsl.serialize(p))
        return EXIT_OK

    completion = ReadPolicy(args.reads) if verb == "validate" and args.reads else None
    p = _load(args, completion)
    fmt = args.format
    negative = False

    if verb == "validate":
        doc = {"valid": True, "name": p.name, "locations": list(p.locations), "data": list(p.data),
               "transitions": len(p.transitions), "atomic": p.atomic, "target": p.target}
        text = (f"ok: {p.name} ({len(p.locations)} locations, {len(p.data)} data, "
                f"{len(p.transitions)} transitions after read completion"
                f"{', atomic' if p.atomic else ''})")
    elif verb == "check":
        v = check_almost_sure(p, args.k, args.datum, args.target, node_cap=args.node_cap)
        doc, text = v.to_dict(), str(v)
        if args.exact:
            prob = exact_reach_probability(p, args.k, args.datum, args.target, node_cap=args.node_cap)
            doc["probability"] = str(prob)
            text += f"\n  probability: {prob}"
        negative = not v.almost_sure
    elif verb == "coverable":
        target = args.target or p.target
        if target is None:
            raise _Usage("no target: pass --target or declare one in the protocol")
        ok = check_coverable(p, args.k, args.datum, target, node_cap=args.node_cap)
        doc = {"coverable": ok, "k": args.k, "target": target}
        text = f"{target} is {'' if ok else 'not '}coverable with k={args.k}"
        negative = not ok
    elif verb == "prestar":
        b = pre_star_basis(p, args.target, cap=args.basis_cap)
        kb = k_bound(b)
        doc = {"target": b.target, "basis": b.to_records(), "k_bound": kb.value,
               "elements": kb.elements, "max_coordinate": kb.max_coordinate}
        lines = [f"{r['datum']}: " + " ".join(f"{q}:{n}" for q, n in r["multiset"]) for r in doc["basis"]]
        text = "\n".join(lines + [f"K = {kb.value} ({kb.elements} elements)"])
    elif verb in ("decide", "bounds"):
        v = decide_cutoff(p, args.datum, args.target, args.index,
                          node_cap=args.symbolic_cap, basis_cap=args.basis_cap)
        negative = v.sign is Sign.NEGATIVE
        if verb == "decide":
            doc, text = v.to_dict(), str(v)
        else:
            doc = cutoff_bounds(v)
            text = doc["text"]
    elif verb == "simulate":
        cfg = SimConfig(args.k, args.horizon, args.trials, args.seed, args.target, args.datum,
                        prune=not args.no_prune)
        if args.trace is not None:
            tr = run_trial(p, cfg, args.trace)
            doc = {"trial": args.trace, "hit_step": tr.hit_step,
                   "trace": [line for line in tr.dump().splitlines()]}
            text = tr.dump().rstrip("\n")
        else:
            r = estimate(p, cfg, workers=args.workers)
            doc = r.to_dict()
            text = (f"{r.hits}/{r.trials} trials reached {r.target} within {r.horizon} steps: "
                    f"estimate {r.estimate:.6f} +/- {r.radius:.6f} (seed {r.seed})")
    elif verb == "export":
        if args.graph == "symbolic":
            g = build(p, args.datum, args.k or 0, node_cap=args.symbolic_cap)
        else:
            if args.k is None:
                raise _Usage("export --graph states needs --k")
            g = explore(p, args.k, args.datum, node_cap=args.node_cap)
        _emit(args, export_dot(g, args.highlight))
        return EXIT_OK
    elif verb == "tight":
        r = tight_search(p, args.datum, args.target, args.k_max, certify=not args.no_certify,
                         node_cap=args.node_cap, basis_cap=args.basis_cap, certify_cap=args.certify_cap)
        doc, text = r.to_dict(), str(r)
        negative = r.sign is Sign.NEGATIVE
    else:  # pragma: no cover - argparse rejects unknown verbs
        raise _Usage(f"unknown command {verb}")

    _emit(args, _json(doc) if fmt == "json" else text)
    return EXIT_NEGATIVE if negative and args.strict_exit else EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except ResourceLimit as e:
        print(f"error [{e.code}]: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except RegcutError as e:
        print(f"error [{e.code}]: {e}", file=sys.stderr)
        return EXIT_INPUT
    except _Usage as e:
        print(f"error [cli/Usage]: {e}", file=sys.stderr)
        return EXIT_INPUT
    except ValueError as e:
        print(f"error [cli/InvalidArgument]: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
