"""Structured text reports with machine-readable verdict lines."""

from __future__ import annotations

from dataclasses import dataclass, field

REPORT_SCHEMA = "costab-report/1"

PASS, FAIL, UNVERIFIABLE, INFO = "pass", "fail", "unverifiable", "info"


@dataclass
class Verdict:
    check: str
    status: str
    detail: str = ""


@dataclass
class Report:
    name: str
    context: dict = field(default_factory=dict)
    verdicts: list[Verdict] = field(default_factory=list)

    def add(self, check: str, status, detail: str = "") -> Verdict:
        if isinstance(status, bool):
            status = PASS if status else FAIL
        v = Verdict(check, status, detail)
        self.verdicts.append(v)
        return v

    def info(self, check: str, detail: str) -> None:
        self.add(check, INFO, detail)

    def extend(self, other: "Report", prefix: str = "") -> None:
        for v in other.verdicts:
            self.verdicts.append(Verdict(prefix + v.check, v.status, v.detail))

    @property
    def ok(self) -> bool:
        return all(v.status in (PASS, INFO) for v in self.verdicts)

    @property
    def failed(self) -> list[Verdict]:
        return [v for v in self.verdicts if v.status == FAIL]

    @property
    def unverifiable(self) -> list[Verdict]:
        return [v for v in self.verdicts if v.status == UNVERIFIABLE]

    def status_of(self, check: str) -> str | None:
        for v in self.verdicts:
            if v.check == check:
                return v.status
        return None

    def render(self) -> str:
        lines = [f"schema = {REPORT_SCHEMA}", f"report = {self.name}"]
        for k, v in self.context.items():
            lines.append(f"{k} = {v}")
        for v in self.verdicts:
            tail = f" ; {v.detail}" if v.detail else ""
            lines.append(f"verdict {v.check} = {v.status}{tail}")
        lines.append(f"overall = {PASS if self.ok else FAIL}")
        return "\n".join(lines) + "\n"
