"""Check results shared by every suite and serialized by the CLI."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

PASS, FAIL, ERROR = "pass", "fail", "error"


def _residual_value(residual):
    if residual is None:
        return None
    if isinstance(residual, Fraction):
        return float(residual)
    return float(residual)


@dataclass(frozen=True)
class Check:
    name: str
    anchor: str
    status: str
    residual: float | None = None
    details: str = ""
    weight: tuple | None = None

    def to_dict(self):
        out = {
            "name": self.name,
            "paperAnchor": self.anchor,
            "status": self.status,
            "residual": _residual_value(self.residual),
            "details": self.details,
        }
        if self.weight is not None:
            out["weight"] = list(self.weight)
        return out

    @property
    def ok(self):
        return self.status == PASS


def residual_check(name, anchor, residual, tol, details="", weight=None):
    """Build a check that passes iff residual <= tol (tol=0 demands exact zero)."""
    if isinstance(residual, Fraction) or tol == 0:
        status = PASS if residual == 0 else FAIL
    else:
        status = PASS if residual <= tol else FAIL
    return Check(name, anchor, status, _residual_value(residual), details, weight)


def bool_check(name, anchor, ok, details="", weight=None, residual=None):
    return Check(name, anchor, PASS if ok else FAIL, _residual_value(residual), details, weight)


@dataclass
class CheckReport:
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, check):
        self.checks.append(check)
        return check

    def extend(self, other):
        """Append the checks of another report (or of a plain list of checks)."""
        if isinstance(other, CheckReport):
            self.checks.extend(other.checks)
            for key, value in other.data.items():
                self.data.setdefault(key, value)
        else:
            self.checks.extend(other)
        return self

    @property
    def passed(self):
        return all(c.ok for c in self.checks)

    def failures(self):
        return [c for c in self.checks if not c.ok]

    def by_name(self, name):
        return [c for c in self.checks if c.name == name]

    def sorted_checks(self):
        return sorted(self.checks, key=lambda c: (c.name, tuple(c.weight or ())))

    def to_dict(self):
        return {"checks": [c.to_dict() for c in self.sorted_checks()]}

    def summary_lines(self):
        lines = []
        for c in self.sorted_checks():
            label = c.name if c.weight is None else f"{c.name} ({','.join(str(x) for x in c.weight)})"
            res = "" if c.residual is None else f"{_residual_value(c.residual):.3e}"
            lines.append(f"{c.status.upper():5s} {label:<56s} {res:>10s}  {c.details}".rstrip())
        return lines
