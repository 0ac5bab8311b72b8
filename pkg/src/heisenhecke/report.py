from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable

from .core import VerificationError


@dataclass
class Check:
    label: str
    passed: bool
    detail: Any = None


@dataclass
class Report:
    """Outcome of one identity check, one line per coefficient or case."""

    identity: str
    params: dict[str, Any]
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, label: str, passed: bool, detail: Any = None) -> None:
        self.checks.append(Check(label, bool(passed), detail))

    def first_failure(self) -> Check | None:
        return next((c for c in self.checks if not c.passed), None)

    def finish(self, strict: bool = True) -> Report:
        bad = self.first_failure()
        if strict and bad is not None:
            raise VerificationError(f"{self.identity} fails at {bad.label}", self)
        return self

    def lines(self) -> list[str]:
        return [f"{'PASS' if c.passed else 'FAIL'}  {self.identity}  {c.label}" for c in self.checks]

    def to_json(self, render: Callable[[Any], Any] = repr) -> dict[str, Any]:
        bad = self.first_failure()
        doc: dict[str, Any] = {
            "identity": self.identity,
            "params": self.params,
            "checked": [c.label for c in self.checks],
            "passed": self.passed,
        }
        if bad is not None:
            doc["counterexample"] = {"label": bad.label, "value": render(bad.detail)}
        return doc
