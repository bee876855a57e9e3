"""Report-style validation results shared by all validators."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass(frozen=True)
class Violation:
    code: str
    message: str
    witness: tuple[Any, ...] = ()

    def to_json(self) -> dict:
        return {"code": self.code, "message": self.message, "witness": [str(w) for w in self.witness]}


@dataclass
class Report:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str, *witness: Any) -> None:
        self.violations.append(Violation(code, message, tuple(witness)))

    def extend(self, other: "Report", prefix: str = "") -> None:
        for v in other.violations:
            self.violations.append(Violation(v.code, prefix + v.message, v.witness))

    def codes(self) -> set[str]:
        return {v.code for v in self.violations}

    def to_json(self) -> dict:
        return {"ok": self.ok, "violations": [v.to_json() for v in self.violations]}

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(f"[{v.code}] {v.message}" for v in self.violations)
