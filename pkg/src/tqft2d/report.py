"""Validation reports shared by the algebra, bundle and cocycle checkers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    axiom: str
    witness: tuple = ()

    def __str__(self):
        if self.witness:
            return "%s at %s" % (self.axiom, self.witness)
        return self.axiom


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    checked: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def check(self, axiom: str):
        if axiom not in self.checked:
            self.checked.append(axiom)

    def fail(self, axiom: str, witness: tuple = ()):
        self.check(axiom)
        self.violations.append(Violation(axiom, witness))

    def failed_axioms(self):
        return sorted({v.axiom for v in self.violations})

    def merge(self, other: "ValidationReport"):
        for axiom in other.checked:
            self.check(axiom)
        self.violations.extend(other.violations)

    def summary(self) -> str:
        lines = ["checked %d axioms" % len(self.checked)]
        for v in self.violations:
            lines.append("violation: %s" % v)
        lines.append("pass" if self.passed else "fail")
        return "\n".join(lines)
