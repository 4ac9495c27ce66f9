from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .field import QS3


def jsonable(x: Any) -> Any:
    """Best-effort conversion of report payloads to JSON-ready values."""
    if isinstance(x, QS3):
        return {"exact": x.to_json(), "float": x.to_float()}
    if isinstance(x, Fraction):
        return {"exact": [x.numerator, x.denominator], "float": float(x)}
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            return str(x)
        return x
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if hasattr(x, "to_json"):
        return x.to_json()
    return x


@dataclass
class Report:
    """Outcome of a verification routine: counted checks plus failure witnesses."""

    name: str
    checks: int = 0
    failures: list[dict] = field(default_factory=list)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, ok: bool, **witness) -> bool:
        self.checks += 1
        if not ok:
            self.failures.append(witness)
        return ok

    def merge(self, other: Report) -> None:
        self.checks += other.checks
        self.failures.extend(dict(w, suite=other.name) for w in other.failures)
        self.details[other.name] = other.details

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": self.checks,
            "failures": jsonable(self.failures[:50]),
            "failure_count": len(self.failures),
            "details": jsonable(self.details),
        }

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: {self.checks} checks, {len(self.failures)} failures"
