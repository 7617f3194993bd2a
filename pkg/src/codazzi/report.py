"""Residual bookkeeping shared by every verification suite."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

FIRST_ORDER_TOL = 1e-8
SECOND_ORDER_TOL = 1e-7


def relative_residual(lhs, rhs) -> float:
    """max|L - R| / (1 + max(max|L|, max|R|)); non-finite input gives inf."""
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    if lhs.size == 0 and rhs.size == 0:
        return 0.0
    if not (np.all(np.isfinite(lhs)) and np.all(np.isfinite(rhs))):
        return math.inf
    diff = float(np.abs(lhs - rhs).max())
    scale = 1.0 + max(float(np.abs(lhs).max(initial=0.0)), float(np.abs(rhs).max(initial=0.0)))
    return diff / scale


@dataclass
class Check:
    id: str
    anchor: str
    residual: float
    tol: float
    points: int
    note: str = ""

    @property
    def passed(self) -> bool:
        return bool(math.isfinite(self.residual) and self.residual <= self.tol)

    def to_dict(self):
        residual = self.residual if math.isfinite(self.residual) else None
        d = {"anchor": self.anchor, "id": self.id, "pass": self.passed, "points": self.points,
             "residual": residual, "tol": self.tol}
        if self.note:
            d["note"] = self.note
        return d

    @staticmethod
    def from_dict(d):
        residual = d["residual"] if d["residual"] is not None else math.inf
        return Check(d["id"], d["anchor"], residual, d["tol"], d["points"], d.get("note", ""))


@dataclass
class SuiteReport:
    name: str
    checks: list = field(default_factory=list)
    points: int = 0
    tol_override: float = None

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def _tol(self, tol):
        return self.tol_override if self.tol_override is not None else tol

    def compare(self, id, anchor, lhs, rhs, tol=FIRST_ORDER_TOL, note=""):
        """Record the relative residual between two evaluated sides."""
        self.checks.append(Check(id, anchor, relative_residual(lhs, rhs), self._tol(tol), self.points, note))

    def bound(self, id, anchor, violation, tol=1e-10, note=""):
        """Record an inequality: ``violation`` is the amount by which it fails (<= 0 when it holds)."""
        v = np.asarray(violation, dtype=float)
        amount = float(np.max(v, initial=0.0)) if np.all(np.isfinite(v)) else math.inf
        self.checks.append(Check(id, anchor, max(amount, 0.0), self._tol(tol), self.points, note))

    def guard(self, id, anchor, fn, tol=FIRST_ORDER_TOL):
        """Run ``fn`` returning (lhs, rhs); evaluation failures are recorded as failed checks."""
        try:
            lhs, rhs = fn()
        except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            self.checks.append(Check(id, anchor, math.inf, self._tol(tol), self.points, f"error: {exc}"))
            return
        self.compare(id, anchor, lhs, rhs, tol)

    def worst(self):
        return max((c.residual for c in self.checks), default=0.0)

    def to_dict(self):
        return {"checks": [c.to_dict() for c in self.checks], "name": self.name, "pass": self.passed}

    @staticmethod
    def from_dict(d):
        checks = [Check.from_dict(c) for c in d["checks"]]
        points = max((c.points for c in checks), default=0)
        return SuiteReport(d["name"], checks, points)


@dataclass
class Report:
    structure: str
    suites: list = field(default_factory=list)
    seed: int = None
    wall_time: float = 0.0

    @property
    def passed(self) -> bool:
        return all(s.passed for s in self.suites)

    def to_dict(self, wall_time=True):
        d = {"pass": self.passed, "seed": self.seed, "structure": self.structure,
             "suites": [s.to_dict() for s in self.suites]}
        if wall_time:
            d["wall_time"] = self.wall_time
        return d

    def to_json(self, wall_time=True, indent=2):
        return json.dumps(self.to_dict(wall_time), sort_keys=True, indent=indent)

    @staticmethod
    def from_dict(d):
        return Report(d["structure"], [SuiteReport.from_dict(s) for s in d["suites"]],
                      d.get("seed"), d.get("wall_time", 0.0))

    @staticmethod
    def from_json(text):
        return Report.from_dict(json.loads(text))

    def format_text(self):
        lines = [f"structure {self.structure}  seed {self.seed}"]
        for s in self.suites:
            lines.append(f"[{'PASS' if s.passed else 'FAIL'}] {s.name}")
            for c in s.checks:
                mark = "ok  " if c.passed else "FAIL"
                extra = f"  ({c.note})" if c.note else ""
                lines.append(f"  {mark} {c.id:<34} residual {c.residual:.3e}  tol {c.tol:.0e}{extra}")
        lines.append("overall: " + ("PASS" if self.passed else "FAIL"))
        return "\n".join(lines)
