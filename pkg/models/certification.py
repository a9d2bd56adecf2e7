"""
Oscillation skeleton and certification report models
"""

import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional

import numpy as np

from core.constants import (
    CHECK_TOL,
    F_CERTIFICATE_STEPS,
    LIMIT_THRESHOLD,
    MIN_TAIL_EXTREMA,
    NOISE_FLOOR,
    RIGHT_BOUNDARY_LAYER,
)
from core.exceptions import ParameterDomainError


@dataclass
class CheckResult:
    """One inequality checked with slack"""

    name: str
    interval: str
    lhs: float
    rhs: float
    margin: float
    passed: bool


@dataclass
class OscillationRecord:
    """Zeros Q_j, extremum points T_j and amplitudes V_j = x(T_j) of x(t)"""

    Q: np.ndarray = field(default_factory=lambda: np.empty(0))
    T: np.ndarray = field(default_factory=lambda: np.empty(0))
    V: np.ndarray = field(default_factory=lambda: np.empty(0))
    P: np.ndarray = field(default_factory=lambda: np.empty(0))  # p_j / q_j, one per (T_j, T_{j+1})
    inflections: np.ndarray = field(default_factory=lambda: np.empty(0))
    T_index: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=int))

    @property
    def is_empty(self) -> bool:
        return len(self.V) == 0

    @property
    def count(self) -> int:
        return len(self.V)


@dataclass
class CertificationReport:
    """Pass/fail ledger of inequalities checked against a profile or parameter grid"""

    checks: List[CheckResult] = field(default_factory=list)
    m_star: Optional[float] = None
    M_star: Optional[float] = None
    notes: List[str] = field(default_factory=list)
    trivial: bool = False
    record: Optional[OscillationRecord] = None

    @property
    def overall(self) -> bool:
        """Conjunction of all pass flags"""
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def add(self, name: str, interval: str, lhs: float, rhs: float, margin: float, tol: float) -> CheckResult:
        """Record a check; passes when the margin is finite and above -tol"""
        passed = math.isfinite(margin) and margin > -tol
        check = CheckResult(name=name, interval=interval, lhs=lhs, rhs=rhs, margin=margin, passed=passed)
        self.checks.append(check)
        return check

    def add_less(self, name: str, interval: str, lhs: float, rhs: float, tol: float) -> CheckResult:
        """Record lhs <= rhs"""
        return self.add(name, interval, lhs, rhs, rhs - lhs, tol)

    def add_greater(self, name: str, interval: str, lhs: float, rhs: float, tol: float) -> CheckResult:
        """Record lhs >= rhs"""
        return self.add(name, interval, lhs, rhs, lhs - rhs, tol)

    def extend(self, other: "CertificationReport"):
        """Merge another fragment into this report"""
        self.checks.extend(other.checks)
        self.notes.extend(other.notes)
        if other.m_star is not None:
            self.m_star = other.m_star
        if other.M_star is not None:
            self.M_star = other.M_star
        self.trivial = self.trivial or other.trivial


@dataclass(frozen=True)
class CertifyConfig:
    """Tolerances of the oscillation certificate"""

    tol: float = CHECK_TOL
    noise_floor: float = NOISE_FLOOR
    f_steps: int = F_CERTIFICATE_STEPS
    limit_threshold: float = LIMIT_THRESHOLD
    min_tail_extrema: int = MIN_TAIL_EXTREMA
    boundary_layer: float = RIGHT_BOUNDARY_LAYER

    def __post_init__(self):
        if not (self.tol >= 0 and self.noise_floor > 0 and self.limit_threshold > 0):
            raise ParameterDomainError("Certification tolerances must be positive")
        if self.f_steps < 1 or self.min_tail_extrema < 2:
            raise ParameterDomainError("f_steps must be >= 1 and min_tail_extrema >= 2")
        if self.boundary_layer < 0:
            raise ParameterDomainError("boundary_layer must be non-negative")


class TailLimits(NamedTuple):
    """Tail estimates of lim inf and lim sup of x(t)"""

    m_star: float
    M_star: float
    low_confidence: bool
