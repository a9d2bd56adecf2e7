"""
Model parameters and bounding-function evaluation records
"""

import math
from dataclasses import dataclass, field
from typing import Optional

from core.constants import (
    MIN_WAVE_SPEED,
    QUAD_ABS_TOL,
    QUAD_MAX_SUBDIVISIONS,
    QUAD_REL_TOL,
    TAU_LOWER,
    TAU_UPPER,
)
from core.exceptions import ParameterDomainError


@dataclass(frozen=True)
class ModelParams:
    """Wave speed c and delay tau with the derived profile delay h = c*tau and eps = 1/c^2"""

    c: float
    tau: float
    h: float = field(init=False)
    eps: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.c) and math.isfinite(self.tau)):
            raise ParameterDomainError(f"Parameters must be finite (c={self.c}, tau={self.tau})")
        if self.c < MIN_WAVE_SPEED:
            raise ParameterDomainError(f"Wave speed c={self.c} is below the minimal speed {MIN_WAVE_SPEED}")
        if self.tau < 0:
            raise ParameterDomainError(f"Delay tau={self.tau} must be non-negative")
        object.__setattr__(self, "h", self.c * self.tau)
        object.__setattr__(self, "eps", 1.0 / (self.c * self.c))

    @property
    def in_bounding_range(self) -> bool:
        """True if tau lies in (1, 3/2]"""
        return TAU_LOWER < self.tau <= TAU_UPPER

    def require_bounding_range(self):
        """Raise if tau is outside (1, 3/2]"""
        if not self.in_bounding_range:
            raise ParameterDomainError(
                f"tau={self.tau} is outside ({TAU_LOWER}, {TAU_UPPER}]; "
                "delays tau <= 1 are certified trivially"
            )

    def with_tau(self, tau: float) -> "ModelParams":
        """Same speed, another delay"""
        return ModelParams(c=self.c, tau=tau)


@dataclass
class BoundEval:
    """Value of a bounding function with optional derivatives and Schwarzian"""

    x: float
    value: float
    deriv1: Optional[float] = None
    deriv2: Optional[float] = None
    deriv3: Optional[float] = None
    schwarzian: Optional[float] = None
    regime: str = "bounded"

    def __post_init__(self):
        if self.schwarzian is None and self.has_jet and self.deriv1 != 0:
            ratio = self.deriv2 / self.deriv1
            self.schwarzian = self.deriv3 / self.deriv1 - 1.5 * ratio * ratio

    @property
    def has_jet(self) -> bool:
        """True if all three derivatives are present"""
        return self.deriv1 is not None and self.deriv2 is not None and self.deriv3 is not None


@dataclass(frozen=True)
class QuadratureConfig:
    """Adaptive Gauss-Legendre tolerances"""

    abs_tol: float = QUAD_ABS_TOL
    rel_tol: float = QUAD_REL_TOL
    max_subdivisions: int = QUAD_MAX_SUBDIVISIONS

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ParameterDomainError("Quadrature tolerances must be strictly positive")
        if self.max_subdivisions < 1:
            raise ParameterDomainError("max_subdivisions must be at least 1")
