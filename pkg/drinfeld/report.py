"""JSON report format for verification runs. Everything a re-run needs to
compare against is in here; nothing time-dependent, so the same config and
seed give the same bytes."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction

SCHEMA_VERSION = "1.0"


def format_valuation(value) -> str | None:
    """Rationals as "a/b" strings, exact zeros as "inf", missing as None."""
    if value is None:
        return None
    if value == math.inf:
        return "inf"
    if value == -math.inf:
        return "-inf"
    return str(Fraction(value))


@dataclass(frozen=True)
class CheckResult:
    check: str
    sample: int
    residual: Fraction | float | None
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {
            "check": self.check,
            "sample": self.sample,
            "residual_valuation": format_valuation(self.residual),
            "pass": self.passed,
        }
        if self.detail:
            out["detail"] = _serialize_detail(self.detail)
        return out


def judge(check: str, sample: int, residual, threshold, detail: dict | None = None) -> CheckResult:
    """pass iff residual >= threshold; None (nothing computed) never passes."""
    passed = residual is not None and residual >= threshold
    return CheckResult(check, sample, residual, passed, detail or {})


@dataclass
class SuiteReport:
    suite: str
    config: dict
    checks: list[CheckResult] = field(default_factory=list)
    certificates: list = field(default_factory=list)
    informational: list = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for c in self.checks if c.passed)

    @property
    def failed(self) -> int:
        return len(self.checks) - self.passed

    @property
    def ok(self) -> bool:
        return self.failed == 0

    def add(self, result: CheckResult) -> None:
        self.checks.append(result)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "config": _serialize_detail(self.config),
            "passed": self.passed,
            "failed": self.failed,
            "checks": [c.to_json() for c in self.checks],
            "certificates": [_serialize_value(c) for c in self.certificates],
            "informational": [_serialize_value(c) for c in self.informational],
        }


def report_to_json(report: SuiteReport | dict, indent: int | None = 2) -> str:
    """Serialize a report.  Pass indent=None for compact output."""
    output = report.to_dict() if isinstance(report, SuiteReport) else dict(report)
    output.setdefault("schema_version", SCHEMA_VERSION)
    return json.dumps(output, indent=indent, sort_keys=True, default=str, ensure_ascii=False)


def write_report(report: SuiteReport | dict, path: str) -> str:
    text = report_to_json(report) + "\n"
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return text


def _serialize_value(value):
    """Objects with to_json, Fractions as strings, containers recursively."""
    if hasattr(value, "to_json"):
        return value.to_json()
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, Fraction):
        return format_valuation(value)
    if isinstance(value, float) and math.isinf(value):
        return format_valuation(value)
    if isinstance(value, dict):
        return _serialize_detail(value)
    if isinstance(value, (list, tuple)):
        return [_serialize_value(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted(_serialize_value(v) for v in value)
    return value


def _serialize_detail(detail: dict) -> dict:
    return {str(k): _serialize_value(v) for k, v in detail.items()}
