"""Structured verification outcomes.

A :class:`BoundReport` is the common return type of every verifier: a named
suite, the resolved parameters, and a list of labelled checks, each carrying
the two sides of an inequality (or identity), the margin ``rhs - lhs``, the
tolerance in force, and the resulting pass flag.  Reports never contain
timestamps or host information so that identical runs produce identical
files.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    """One verified comparison; passes iff ``margin >= -tol``."""

    label: str
    lhs: float
    rhs: float
    tol: float = 0.0

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @property
    def passed(self) -> bool:
        return self.margin >= -self.tol

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "margin": self.margin,
            "pass": self.passed,
            "tol": self.tol,
        }


@dataclass
class BoundReport:
    """Outcome of one verification suite."""

    suite: str
    params: dict = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    seed: int | None = None
    curves: list[dict] = field(default_factory=list)

    def add(self, label: str, lhs: float, rhs: float, tol: float = 0.0) -> Check:
        check = Check(label, float(lhs), float(rhs), float(tol))
        self.checks.append(check)
        return check

    def add_curve_point(self, **columns) -> None:
        self.curves.append(columns)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        out = {
            "suite": self.suite,
            "params": self.params,
            "checks": [c.to_dict() for c in self.checks],
        }
        if self.seed is not None:
            out["seed"] = self.seed
        return out
