"""Scanning network sizes for the tight cut-off.

A finite scan cannot show that the answer stays constant for every larger
size.  The least size from which the scanned answers are constant is only
reported as certified when a certified symbolic verdict has the same sign
and the scan reached the bound that verdict implies.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .concrete import DEFAULT_NODE_CAP, check_almost_sure
from .coverability import DEFAULT_BASIS_CAP
from .errors import ResourceLimit
from .model import Protocol
from .symbolic import CutoffVerdict, Sign, decide_cutoff

DEFAULT_CERTIFY_CAP = 200_000


@dataclass
class ScanEntry:
    k: int
    answer: str | None
    nodes: int = 0
    skipped: str | None = None

    def to_dict(self) -> dict:
        d = {"k": self.k, "answer": self.answer, "nodes": self.nodes}
        if self.skipped:
            d["skipped"] = self.skipped
        return d


@dataclass
class TightReport:
    k_max: int
    scan_limit: int
    entries: list[ScanEntry] = field(default_factory=list)
    sign: Sign | None = None
    cutoff: int | None = None
    certified: bool = False
    verdict: CutoffVerdict | None = None
    verdict_error: str | None = None

    @property
    def label(self) -> str:
        return "certified" if self.certified else "empirical"

    def to_dict(self) -> dict:
        return {
            "sign": self.sign.value if self.sign else None,
            "tight_cutoff": self.cutoff,
            "label": self.label,
            "k_max": self.k_max,
            "scan_limit": self.scan_limit,
            "scan": [e.to_dict() for e in self.entries],
            "certificate": self.verdict.to_dict() if self.verdict else None,
            "certificate_error": self.verdict_error,
        }

    def __str__(self) -> str:
        lines = [f"k={e.k}: {e.answer or 'skipped (' + e.skipped + ')'}" for e in self.entries]
        if self.cutoff is None:
            lines.append("no size could be checked")
        else:
            lines.append(f"{self.label} tight {self.sign.value.lower()} cut-off {self.cutoff} "
                         f"(scanned k=1..{self.scan_limit})")
        if self.verdict_error:
            lines.append(f"no certificate: {self.verdict_error}")
        return "\n".join(lines)


def _sign_of(answer: str) -> Sign:
    return Sign.POSITIVE if answer == "AlmostSure" else Sign.NEGATIVE


def tight_search(p: Protocol, d0: str | None = None, target: str | None = None, k_max: int = 6, *,
                 certify: bool = True, node_cap: int = DEFAULT_NODE_CAP,
                 basis_cap: int = DEFAULT_BASIS_CAP, certify_cap: int = DEFAULT_CERTIFY_CAP) -> TightReport:
    """Check sizes ``1..min(k_max, certified bound)`` and report where the answer settles."""
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    verdict, error = None, None
    if certify:
        if p.atomic:
            error = "atomic protocols have no symbolic certificate"
        else:
            try:
                verdict = decide_cutoff(p, d0, target, node_cap=certify_cap, basis_cap=basis_cap)
            except ResourceLimit as e:
                error = str(e)
    bound = None
    if verdict is not None:
        bound = verdict.positive_bound if verdict.sign is Sign.POSITIVE else verdict.negative_bound
    limit = min(k_max, bound) if bound is not None else k_max
    report = TightReport(k_max, limit, verdict=verdict, verdict_error=error)

    for k in range(1, limit + 1):
        try:
            v = check_almost_sure(p, k, d0, target, node_cap=node_cap)
        except ResourceLimit as e:
            report.entries.append(ScanEntry(k, None, skipped=str(e)))
            continue
        report.entries.append(ScanEntry(k, v.answer, v.nodes))

    done = [e for e in report.entries if e.answer is not None]
    if not done:
        return report
    last = done[-1].answer
    cutoff = done[-1].k
    for e in reversed(report.entries):
        if e.answer != last:
            break
        cutoff = e.k
    report.sign = _sign_of(last)
    report.cutoff = cutoff
    report.certified = (verdict is not None and verdict.sign is report.sign and bound is not None
                        and limit >= bound and len(done) == len(report.entries))
    return report

