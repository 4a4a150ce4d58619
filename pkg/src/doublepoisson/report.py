"""Check results shared by the verification routines and the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field

PROVED = "PROVED"
PROBABLE = "PROBABLE"
FAIL = "FAIL"
ERROR = "ERROR"


@dataclass
class CheckResult:
    name: str
    status: str = PROVED
    failures: list = field(default_factory=list)  # (witness, residual) strings
    params: dict = field(default_factory=dict)
    checked: int = 0

    @property
    def passed(self) -> bool:
        return self.status in (PROVED, PROBABLE)

    def __bool__(self):
        return self.passed

    def fail(self, witness: str, residual: str) -> None:
        self.status = FAIL
        self.failures.append((witness, residual))

    def weaken(self, params: dict | None = None) -> None:
        """Record that one comparison was only settled by sampling."""
        if self.status == PROVED:
            self.status = PROBABLE
        if params:
            self.params.update(params)

    def summary(self) -> str:
        if not self.failures:
            return f"{self.checked} checked, residual 0"
        w, r = self.failures[0]
        return f"{len(self.failures)} of {self.checked} failed; first {w}: {r}"
