from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    passed: bool
    witness: Optional[tuple] = None
    detail: str = ""

    def to_payload(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "witness": list(self.witness) if self.witness is not None else None,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class VerificationReport:
    """Pass/fail per axiom; `informational` checks are reported but never fail the report."""

    checks: tuple[AxiomCheck, ...]
    informational: frozenset[str] = frozenset()
    extras: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.name not in self.informational)

    def check(self, name: str) -> AxiomCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def failures(self) -> list[AxiomCheck]:
        return [c for c in self.checks if not c.passed and c.name not in self.informational]

    def to_payload(self) -> dict[str, Any]:
        return {
            "passed": self.passed,
            "checks": [c.to_payload() for c in self.checks],
            **self.extras,
        }
