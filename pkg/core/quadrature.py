"""
Adaptive Gauss-Legendre quadrature

Each panel is integrated with a 15-point rule and compared against the sum
over its two halves; panels whose difference exceeds their share of the
tolerance are bisected until the subdivision budget runs out.
"""

import logging
from functools import lru_cache
from typing import Callable, Tuple

import numpy as np

from core.constants import QUAD_PANEL_NODES
from core.exceptions import QuadratureError
from models.params import QuadratureConfig

logger = logging.getLogger(__name__)

DEFAULT_QUADRATURE = QuadratureConfig()


@lru_cache(maxsize=8)
def _reference_rule(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights on [-1, 1]"""
    nodes, weights = np.polynomial.legendre.leggauss(n)
    return nodes, weights


def _panel(fn: Callable[[np.ndarray], np.ndarray], a: float, b: float, n: int) -> float:
    nodes, weights = _reference_rule(n)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    return float(half * np.dot(weights, fn(mid + half * nodes)))


def integrate(
    fn: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    n_nodes: int = QUAD_PANEL_NODES,
) -> Tuple[float, float]:
    """
    Integrate a vectorized function over [a, b]

    Args:
        fn: Function accepting and returning numpy arrays
        a: Lower limit
        b: Upper limit (b < a gives the negated integral)
        cfg: Tolerances and subdivision budget
        n_nodes: Nodes per panel

    Returns:
        (value, error_estimate)

    Raises:
        QuadratureError: if the budget is exhausted before the tolerance is met
    """
    if a == b:
        return 0.0, 0.0
    if b < a:
        value, error = integrate(fn, b, a, cfg, n_nodes)
        return -value, error

    whole = _panel(fn, a, b, n_nodes)
    budget = max(cfg.abs_tol, cfg.rel_tol * abs(whole))
    # (a, b, coarse estimate)
    pending = [(a, b, whole)]
    accepted_value = 0.0
    accepted_error = 0.0
    subdivisions = 0

    while pending:
        lo, hi, coarse = pending.pop()
        mid = 0.5 * (lo + hi)
        left = _panel(fn, lo, mid, n_nodes)
        right = _panel(fn, mid, hi, n_nodes)
        fine = left + right
        error = abs(fine - coarse)
        allowed = budget * (hi - lo) / (b - a)
        if error <= allowed or error <= 1e-14 * abs(fine):
            accepted_value += fine
            accepted_error += error
            continue
        subdivisions += 1
        if subdivisions > cfg.max_subdivisions:
            raise QuadratureError(
                f"Quadrature on [{a}, {b}] did not reach tolerance within "
                f"{cfg.max_subdivisions} subdivisions (panel [{lo}, {hi}], error {error:.3e})"
            )
        pending.append((lo, mid, left))
        pending.append((mid, hi, right))

    logger.debug(f"Quadrature on [{a:.6g}, {b:.6g}]: {subdivisions} subdivisions, error {accepted_error:.2e}")
    return accepted_value, accepted_error
