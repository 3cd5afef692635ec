"""Verdicts returned by exactness checks and theorem audits."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional


class Verdict(str, Enum):
    CONFIRMED = "CONFIRMED"
    REFUTED = "REFUTED"
    TRUNCATED = "TRUNCATED"
    SKIPPED = "SKIPPED"


@dataclass
class AuditResult:
    """Outcome of one check.

    ``details`` holds JSON-ready facts (invariant factors, booleans, counts).
    ``certificate`` is a :class:`~modlim.diagram.Diagram` that reproduces a
    REFUTED outcome through ``modlim compute``.
    """

    name: str
    verdict: Verdict
    details: dict = field(default_factory=dict)
    certificate: Optional[Any] = None
    note: str = ""

    @property
    def holds(self) -> bool:
        return self.verdict == Verdict.CONFIRMED
