"""
Characteristic-equation results
"""

from dataclasses import dataclass, field
from typing import List, NamedTuple, Tuple


@dataclass
class RootCountResult:
    """Right-half-plane roots of the characteristic quasi-polynomial"""

    count: int
    contour: Tuple[complex, complex, complex, complex]
    winding_integral: float
    roots: List[complex] = field(default_factory=list)
    samples: int = 0


@dataclass(frozen=True)
class CrossingPoint:
    """Imaginary-axis crossing lambda = i*omega at the delay tau_star"""

    c: float
    tau_star: float
    omega: float


class DecayRates(NamedTuple):
    """Roots of lambda^2 - c*lambda + 1 = 0 in increasing order"""

    slow: float
    fast: float
    double_root: bool
