"""Shared tolerances and the inequality/equality check record."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

# Centralized tolerances.  Probabilities are double precision throughout.
REL_TOL = 1e-10
ABS_FLOOR = 1e-14
STOCHASTIC_TOL = 1e-12
SPECTRUM_TOL = 1e-9


def close(a: float, b: float, rel: float = REL_TOL, floor: float = ABS_FLOOR) -> bool:
    return math.isclose(a, b, rel_tol=rel, abs_tol=floor)


@dataclass
class Check:
    """Outcome of one verified relation ``lhs <= rhs`` (or ``|lhs - rhs| <= tol``).

    ``slack`` is ``rhs - lhs`` for inequalities and ``tol - |lhs - rhs|`` for
    equalities.  An inequality check with tolerance ``tol`` passes when
    ``slack >= -tol``; an equality check passes when ``slack >= 0``.
    """

    name: str
    lhs: Optional[float]
    rhs: Optional[float]
    slack: Optional[float]
    passed: bool
    detail: Dict[str, Any] = field(default_factory=dict)
    skipped: Optional[str] = None

    @classmethod
    def leq(cls, name: str, lhs: float, rhs: float, tol: float = 0.0, **detail) -> "Check":
        slack = float(rhs) + tol - float(lhs)
        return cls(name, float(lhs), float(rhs), float(rhs) - float(lhs), bool(slack >= 0), dict(detail))

    @classmethod
    def equal(cls, name: str, lhs: float, rhs: float, tol: float, **detail) -> "Check":
        gap = abs(float(lhs) - float(rhs))
        return cls(name, float(lhs), float(rhs), tol - gap, bool(gap <= tol), dict(detail))

    @classmethod
    def skip(cls, name: str, reason: str) -> "Check":
        return cls(name, None, None, None, True, {}, reason)

    def as_record(self) -> Dict[str, Any]:
        out = asdict(self)
        out["pass"] = out.pop("passed")
        return out

    def __bool__(self) -> bool:
        return self.passed
