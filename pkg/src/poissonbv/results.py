"""Uniform record for the outcome of one named identity check."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class CheckResult:
    """``checked`` counts the instances examined, ``skipped`` those outside the window."""

    name: str
    passed: bool
    checked: int = 0
    skipped: int = 0
    witness: object = None
    detail: dict = field(default_factory=dict)

    def __bool__(self):
        return self.passed


def all_passed(results):
    return all(r.passed for r in results)
