"""Verification records shared by every verifier."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .io import digest_instance, element_from_json, element_to_json

__all__ = ["InequalityReport", "Instance", "make_report", "identity_report", "with_slack", "SLACK"]

SLACK = 1e-8
_EPS = 1e-300


@dataclass(frozen=True)
class Instance:
    """Exact inputs of one verification, enough to replay it."""

    name: str
    p: float | None
    params: dict
    elements: dict

    @property
    def digest(self):
        return digest_instance(self.name, self.p, self.params, self.elements)

    def to_json(self):
        return {
            "name": self.name,
            "p": self.p,
            "params": dict(self.params),
            "elements": {k: element_to_json(v) for k, v in sorted(self.elements.items())},
            "digest": self.digest,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(obj["name"], obj["p"], dict(obj["params"]),
                   {k: element_from_json(v) for k, v in obj["elements"].items()})


@dataclass(frozen=True)
class InequalityReport:
    """One checked inequality ``lhs <= rhs`` (``rhs`` includes the constant).

    ``ratio`` is ``lhs`` over the right-hand side with the constant removed,
    i.e. the empirical constant this instance would need.
    """

    name: str
    p: float | None
    lhs: float
    rhs: float
    constant_used: float
    ratio: float
    passed: bool
    abs_tol: float
    instance_digest: str
    details: dict = field(default_factory=dict)

    @property
    def margin(self):
        return self.rhs - self.lhs

    def to_json(self):
        return {
            "name": self.name,
            "p": self.p,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "constant_used": self.constant_used,
            "ratio": self.ratio,
            "pass": self.passed,
            "abs_tol": self.abs_tol,
            "instance_digest": self.instance_digest,
            "details": self.details,
        }

    @classmethod
    def from_json(cls, obj):
        return cls(obj["name"], obj["p"], obj["lhs"], obj["rhs"], obj["constant_used"],
                   obj["ratio"], obj["pass"], obj["abs_tol"], obj["instance_digest"],
                   obj.get("details", {}))


def _finite(v):
    return v if math.isfinite(v) else 0.0


def make_report(instance: Instance, lhs, rhs, constant, *, abs_tol=SLACK,
                extra_ok=True, details=None) -> InequalityReport:
    lhs, rhs, constant = float(lhs), float(rhs), float(constant)
    base = rhs / constant if constant else rhs
    ratio = lhs / base if base > _EPS else 0.0
    passed = bool(lhs <= rhs + abs_tol and extra_ok)
    details = dict(details or {})
    if not extra_ok:
        details["extra_ok"] = False
    return InequalityReport(instance.name, instance.p, lhs, rhs, constant, _finite(ratio),
                            passed, abs_tol, instance.digest, details)


def with_slack(report: InequalityReport, abs_tol) -> InequalityReport:
    """Re-judge a report under a different absolute slack."""
    passed = bool(report.lhs <= report.rhs + abs_tol and report.details.get("extra_ok", True))
    return replace(report, abs_tol=float(abs_tol), passed=passed)


def identity_report(instance: Instance, residual, tol, details=None) -> InequalityReport:
    """Record an identity check ``residual <= tol`` as a report with ``rhs = 0``."""
    return make_report(instance, residual, 0.0, 1.0, abs_tol=tol, details=details)
