"""
Invariant suite of the bounding functions over an abscissa grid

Each check reports its worst margin over the grid, so one row per check and
parameter pair summarizes the whole sweep.
"""

import logging
from typing import Callable, Iterable, Optional

import numpy as np

from core.bounds import (
    A_minus_provider,
    eval_A_minus,
    eval_A_minus_slope,
    eval_A_plus,
    eval_B,
    eval_D,
    eval_F,
    eval_R,
    eval_r,
    eval_rho,
    eval_x2,
    in_A_minus_domain,
    schwarzian,
    rho_provider,
)
from core.constants import BOUNDS_CHECK_TOL, RHO_DERIV_MAX_X, TAU_FIXED
from core.exceptions import DegenerateDerivativeError
from core.quadrature import DEFAULT_QUADRATURE
from models.certification import CertificationReport
from models.params import ModelParams, QuadratureConfig

logger = logging.getLogger(__name__)

# finite-difference stencils stay clear of the Taylor patch at 0
SCHWARZIAN_ORIGIN_GAP = 0.1
# one-sided offset for the continuity of D at 0
ORIGIN_OFFSET = 1e-12


def _schwarzian_points(provider, xs: np.ndarray) -> np.ndarray:
    """Abscissae away from 0 where the Schwarzian of provider is defined"""
    kept = []
    for x in xs:
        if abs(x) < SCHWARZIAN_ORIGIN_GAP:
            continue
        try:
            schwarzian(provider, x)
        except DegenerateDerivativeError as e:
            logger.debug(f"Skipping x={x:.6g}: {e}")
            continue
        kept.append(x)
    return np.array(kept, dtype=float)


def _worst(
    report: CertificationReport,
    name: str,
    xs: np.ndarray,
    lhs: Callable[[float], float],
    rhs: Callable[[float], float],
    tol: float,
    greater: bool = True,
):
    """Record the smallest margin of lhs(x) >= rhs(x) (or <= if not greater) over xs"""
    xs = np.asarray(xs, dtype=float)
    if xs.size == 0:
        return None
    left = np.array([lhs(x) for x in xs])
    right = np.array([rhs(x) for x in xs])
    margins = left - right if greater else right - left
    margins = np.where(np.isfinite(margins), margins, -np.inf)
    i = int(np.argmin(margins))
    interval = f"x in [{xs[0]:.6g}, {xs[-1]:.6g}], worst at x={xs[i]:.6g}"
    return report.add(name, interval, float(left[i]), float(right[i]), float(margins[i]), tol)


def verify_bounds(
    params: ModelParams,
    xs: Iterable[float],
    tol: float = BOUNDS_CHECK_TOL,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    prefix: Optional[str] = None,
) -> CertificationReport:
    """
    Check the bounding-function inequalities on a grid

    Checks: rho decreasing, convex and with negative Schwarzian; rho > r for
    x > 0; A_- decreasing with negative Schwarzian on {x/rho(x) > -1};
    monotonicity in tau of A_-, A_+ and B against tau = 3/2; D strictly
    decreasing and continuous at 0 and at x2;
    D > R for x > 0 at tau = 3/2; 0 < F(x) < x and F increasing for x > 0.

    Args:
        params: Model parameters with tau in (1, 3/2]
        xs: Abscissae
        tol: Slack of every check
        cfg: Quadrature settings
        prefix: Label prepended to every interval

    Returns:
        CertificationReport with one row per check

    Raises:
        ParameterDomainError: if tau is outside (1, 3/2]
    """
    params.require_bounding_range()
    xs = np.sort(np.asarray(list(xs), dtype=float))
    fixed = params.with_tau(TAU_FIXED)
    report = CertificationReport()

    rho_xs = xs[xs <= RHO_DERIV_MAX_X]
    positive = xs[xs > 0]
    negative = xs[xs < 0]

    _worst(report, "rho_decreasing", rho_xs, lambda x: -eval_rho(x, params, 1).deriv1, lambda x: 0.0, tol)
    _worst(report, "rho_convex", rho_xs, lambda x: eval_rho(x, params, 2).deriv2, lambda x: 0.0, tol)
    _worst(report, "rho_schwarzian", rho_xs, lambda x: -schwarzian(rho_provider(params), x), lambda x: 0.0, tol)
    _worst(report, "rho_above_r", positive, lambda x: eval_rho(x, params).value, lambda x: eval_r(x, params), tol)

    domain = np.array([x for x in xs if in_A_minus_domain(x, params)])
    _worst(report, "A_minus_decreasing", domain, lambda x: -eval_A_minus_slope(x, params, cfg), lambda x: 0.0, tol)
    a_minus = A_minus_provider(params, cfg)
    _worst(
        report,
        "A_minus_schwarzian",
        _schwarzian_points(a_minus, domain),
        lambda x: -schwarzian(a_minus, x),
        lambda x: 0.0,
        tol,
    )

    if params.tau < TAU_FIXED:
        _worst(
            report,
            "A_minus_below_fixed_delay",
            negative,
            lambda x: eval_A_minus(x, params, cfg),
            lambda x: eval_A_minus(x, fixed, cfg),
            tol,
            greater=False,
        )
        _worst(report, "A_plus_above_fixed_delay", positive, lambda x: eval_A_plus(x, params), lambda x: eval_A_plus(x, fixed), tol)
        _worst(report, "B_above_fixed_delay", positive, lambda x: eval_B(x, params), lambda x: eval_B(x, fixed), tol)

    d_values = np.array([eval_D(x, params, cfg) for x in xs])
    if xs.size >= 2:
        steps = d_values[:-1] - d_values[1:]
        i = int(np.argmin(steps))
        report.add(
            "D_decreasing",
            f"x in [{xs[i]:.6g}, {xs[i + 1]:.6g}]",
            float(d_values[i]),
            float(d_values[i + 1]),
            float(steps[i]),
            tol,
        )

    jump = abs(eval_D(ORIGIN_OFFSET, params, cfg) - eval_D(-ORIGIN_OFFSET, params, cfg))
    report.add_less("D_continuous_at_0", "x=0", jump, 1e-10, 0.0)

    x2 = eval_x2(params)
    jump = abs(eval_A_plus(x2, params) - eval_B(x2, params))
    report.add_less("D_continuous_at_x2", f"x2={x2:.6g}", jump, 1e-10, 0.0)

    _worst(report, "D_above_R", positive, lambda x: eval_D(x, fixed, cfg), lambda x: eval_R(x, fixed), tol)

    f_values = np.array([eval_F(x, params, cfg, check=False) for x in positive])
    if positive.size:
        gaps = positive - f_values
        i = int(np.argmin(gaps))
        report.add("F_below_identity", f"x={positive[i]:.6g}", float(f_values[i]), float(positive[i]), float(gaps[i]), tol)
        i = int(np.argmin(f_values))
        report.add_greater("F_positive", f"x={positive[i]:.6g}", float(f_values[i]), 0.0, tol)
    if positive.size >= 2:
        rises = f_values[1:] - f_values[:-1]
        i = int(np.argmin(rises))
        report.add(
            "F_increasing",
            f"x in [{positive[i]:.6g}, {positive[i + 1]:.6g}]",
            float(f_values[i + 1]),
            float(f_values[i]),
            float(rises[i]),
            tol,
        )

    if prefix:
        for check in report.checks:
            check.interval = f"{prefix} {check.interval}"

    logger.debug(
        f"Bounds suite c={params.c} tau={params.tau}: {len(report.checks)} checks, {len(report.failures)} failures"
    )
    return report
