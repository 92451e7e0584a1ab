from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


@dataclass
class Check:
    name: str
    ok: bool
    cases: int = 0
    detail: str = ""
    witness: Any = None


@dataclass
class Report:
    """Outcome of a batch of verifications; ``ok`` only if every check passed."""

    title: str
    checks: list[Check] = field(default_factory=list)

    def add(self, name, ok, cases=0, detail="", witness=None) -> Check:
        c = Check(name, bool(ok), cases, detail, witness)
        self.checks.append(c)
        return c

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    def __bool__(self):
        return self.ok

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def lines(self) -> list[str]:
        out = [f"{self.title}: {'PASS' if self.ok else 'FAIL'}"]
        for c in self.checks:
            tail = f" ({c.detail})" if c.detail else ""
            out.append(f"  [{'ok' if c.ok else 'FAIL'}] {c.name}: {c.cases} cases{tail}")
            if not c.ok and c.witness is not None:
                out.append(f"      witness: {c.witness!r}")
        return out

    def __str__(self):
        return "\n".join(self.lines())
