"""
Bounding functions for the delayed KPP-Fisher profile equation

rho(x) = tau*c*f(w(x)) with f(y) = (-c + sqrt(c^2 + 4y))/2 and w(x) = exp(-x) - 1,
its Pade minorant r, the amplitude maps A_-, A_+, B, the Moebius map R, the
piecewise map D and the contraction F = A_- o R.
"""

import logging
import math
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from core.constants import (
    F_CONSISTENCY_TOL,
    FD_BASE_STEP,
    RHO_DERIV_MAX_X,
    SCHWARZIAN_MIN_DERIV,
    TAU_FIXED,
    TAYLOR_RADIUS,
)
from core.exceptions import (
    ConsistencyError,
    DegenerateDerivativeError,
    DomainError,
    PoleError,
)
from core.quadrature import DEFAULT_QUADRATURE, integrate
from models.params import BoundEval, ModelParams, QuadratureConfig
from utils.helpers import FiniteDifference

logger = logging.getLogger(__name__)

BoundProvider = Callable[[float], BoundEval]


# =============================================================================
# f, w and rho
# =============================================================================


def eval_w(x):
    """w(x) = exp(-x) - 1"""
    return np.expm1(-x) if isinstance(x, np.ndarray) else math.expm1(-x)


def eval_f(x: float, params: ModelParams) -> float:
    """
    Larger root of z^2 + c*z - x = 0

    Raises:
        DomainError: if c^2 + 4x < 0
    """
    c = params.c
    disc = c * c + 4.0 * x
    if disc < 0:
        raise DomainError(f"f is undefined at x={x} for c={c} (c^2 + 4x < 0)")
    # rationalized form, no cancellation for small x
    return 2.0 * x / (c + math.sqrt(disc))


def rho_values(x: np.ndarray, params: ModelParams) -> np.ndarray:
    """Vectorized rho"""
    c, tau = params.c, params.tau
    e = np.exp(-x)
    s = (c * c - 4.0) + 4.0 * e
    return tau * c * 2.0 * np.expm1(-x) / (c + np.sqrt(s))


def eval_rho(x: float, params: ModelParams, order: int = 0) -> BoundEval:
    """
    Evaluate rho and up to three derivatives

    Args:
        x: Abscissa
        params: Model parameters
        order: Highest derivative (0..3); order 3 also fills the Schwarzian

    Returns:
        BoundEval
    """
    if not math.isfinite(x):
        raise DomainError(f"rho needs a finite abscissa, got {x}")
    if order > 0 and x > RHO_DERIV_MAX_X:
        raise DomainError(f"Derivatives of rho are not evaluated beyond x={RHO_DERIV_MAX_X}")

    c, tau = params.c, params.tau
    e = math.exp(-x)
    s = (c * c - 4.0) + 4.0 * e
    root = math.sqrt(s)
    value = tau * c * 2.0 * math.expm1(-x) / (c + root)
    if order <= 0:
        return BoundEval(x=x, value=value)

    k = tau * c
    d1 = -k * e / root
    d2 = d3 = None
    if order >= 2:
        d2 = k * e * (c * c - 4.0 + 2.0 * e) / (s * root)
    if order >= 3:
        d3 = k * e * ((6.0 * e - s) * (c * c - 4.0 + 2.0 * e) - 2.0 * e * s) / (s * s * root)
    return BoundEval(x=x, value=value, deriv1=d1, deriv2=d2, deriv3=d3)


def rho_at_infinity(params: ModelParams) -> float:
    """Limit of rho at +infinity, tau*c*f(-1) < 0"""
    c = params.c
    return params.tau * c * (-c + math.sqrt(c * c - 4.0)) / 2.0


def rho_fixed_point(params: ModelParams) -> float:
    """
    Unique positive solution of -rho(x) = x (tau > 1)

    Returns:
        The point below which x/rho(x) > -1 holds for positive x
    """
    params.require_bounding_range()

    def gap(x: float) -> float:
        return eval_rho(x, params).value + x

    lo = 1e-6
    hi = 1.0
    while gap(hi) <= 0:
        hi *= 2.0
    return brentq(gap, lo, hi, xtol=1e-14, rtol=1e-14)


def in_A_minus_domain(x: float, params: ModelParams) -> bool:
    """True if x/rho(x) > -1 (x = 0 included as a limit)"""
    if x <= 0:
        return True
    return x + eval_rho(x, params).value < 0


def integral_rho(x: float, params: ModelParams, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """
    Integral of rho over [x, 0] (positive for x < 0)

    Raises:
        QuadratureError: if the subdivision budget is exhausted
    """
    if not math.isfinite(x):
        raise DomainError(f"integral_rho needs a finite abscissa, got {x}")
    value, _ = integrate(lambda s: rho_values(s, params), x, 0.0, cfg)
    return value


# =============================================================================
# Pade minorant r
# =============================================================================


def _alpha(params: ModelParams) -> float:
    return 0.5 * (1.0 - 2.0 / (params.c * params.c))


def eval_r(x: float, params: ModelParams) -> float:
    """
    r(x) = -tau*x / (1 + alpha*x), alpha = (1 - 2/c^2)/2

    Raises:
        PoleError: at x = -1/alpha
    """
    denom = 1.0 + _alpha(params) * x
    if abs(denom) < 1e-14:
        raise PoleError(f"r has a pole at x={x}")
    return -params.tau * x / denom


def integral_r(x: float, params: ModelParams) -> float:
    """
    Integral of r over [x, 0] = (tau/alpha)*(x - ln(1 + alpha*x)/alpha)

    Raises:
        PoleError: if 1 + alpha*x <= 0
    """
    alpha = _alpha(params)
    tau = params.tau
    z = alpha * x
    if 1.0 + z <= 1e-14:
        raise PoleError(f"Integral of r crosses the pole at x={-1.0 / alpha}")
    if abs(z) < 1e-3:
        # series of x - log1p(alpha x)/alpha
        return tau * x * x * (0.5 - z / 3.0 + z * z / 4.0 - z**3 / 5.0 + z**4 / 6.0)
    return (tau / alpha) * (x - math.log1p(z) / alpha)


# =============================================================================
# A_-, A_+, B, x2
# =============================================================================


def _jet_at_zero(params: ModelParams):
    """A_+-'(0) and A_+-''(0)"""
    d1 = 0.5 - params.tau
    d2 = (params.tau - 1.0 / 6.0) * (1.0 - 2.0 / (params.c * params.c))
    return d1, d2


def _taylor(x: float, params: ModelParams) -> float:
    d1, d2 = _jet_at_zero(params)
    return d1 * x + 0.5 * d2 * x * x


def eval_A_minus(x: float, params: ModelParams, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """
    A_-(x) = x + rho(x) + (1/rho(x)) * integral of rho over [x, 0]

    Raises:
        ParameterDomainError: if tau is outside (1, 3/2]
    """
    params.require_bounding_range()
    return _A_minus(x, params, cfg)


def _A_minus(x: float, params: ModelParams, cfg: QuadratureConfig) -> float:
    if abs(x) <= TAYLOR_RADIUS:
        return _taylor(x, params)
    rho = eval_rho(x, params).value
    return x + rho + integral_rho(x, params, cfg) / rho


def eval_A_minus_slope(x: float, params: ModelParams, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """A_-'(x) = rho'(x) * (1 - integral/rho(x)^2)"""
    params.require_bounding_range()
    if abs(x) <= TAYLOR_RADIUS:
        d1, d2 = _jet_at_zero(params)
        return d1 + d2 * x
    ev = eval_rho(x, params, order=1)
    return ev.deriv1 * (1.0 - integral_rho(x, params, cfg) / (ev.value * ev.value))


def eval_A_plus(x: float, params: ModelParams) -> float:
    """
    A_+(x) = x + r(x) + (1/r(x)) * integral of r over [x, 0]

    Raises:
        ParameterDomainError: if tau is outside (1, 3/2]
        PoleError: beyond the pole of r
    """
    params.require_bounding_range()
    if abs(x) <= TAYLOR_RADIUS:
        return _taylor(x, params)
    r = eval_r(x, params)
    return x + r + integral_r(x, params) / r


def eval_A_plus_eval(x: float, params: ModelParams) -> BoundEval:
    """A_+ with a regime flag: "bounded" on [0, x2], "extrapolated" elsewhere"""
    value = eval_A_plus(x, params)
    regime = "bounded" if 0.0 <= x <= eval_x2(params) else "extrapolated"
    if regime != "bounded":
        logger.debug(f"A_+ evaluated outside [0, x2] at x={x}")
    return BoundEval(x=x, value=value, regime=regime)


def eval_B(x: float, params: ModelParams) -> float:
    """
    B(x) = (1/r(x)) * integral of r over [-r(x), 0], x >= 0

    Raises:
        DomainError: if x < 0
    """
    params.require_bounding_range()
    if x < 0:
        raise DomainError(f"B is defined for x >= 0, got {x}")
    if x <= TAYLOR_RADIUS:
        tau, alpha = params.tau, _alpha(params)
        return -0.5 * tau * tau * x + tau * tau * alpha * (0.5 + tau / 3.0) * x * x
    r = eval_r(x, params)
    return integral_r(-r, params) / r


def eval_x2(params: ModelParams) -> float:
    """Unique positive solution of -r(x) = x"""
    params.require_bounding_range()
    return (params.tau - 1.0) / _alpha(params)


# =============================================================================
# R, D, F
# =============================================================================


def _moebius_coefficients(params: ModelParams):
    """R(x) = a*x / (1 + b*x)"""
    d1, d2 = _jet_at_zero(params)
    return d1, -0.5 * d2 / d1


def eval_R(x: float, params: ModelParams) -> float:
    """
    R(x) = A'(0) x / (1 - 0.5 A''(0) x / A'(0))

    Raises:
        PoleError: at or beyond the (negative) pole
    """
    params.require_bounding_range()
    a, b = _moebius_coefficients(params)
    denom = 1.0 + b * x
    if denom <= 1e-12:
        raise PoleError(f"R is evaluated at or beyond its pole x={-1.0 / b} (x={x})")
    return a * x / denom


def eval_R_eval(x: float, params: ModelParams) -> BoundEval:
    """R with analytic derivatives"""
    value = eval_R(x, params)
    a, b = _moebius_coefficients(params)
    q = 1.0 + b * x
    return BoundEval(
        x=x,
        value=value,
        deriv1=a / q**2,
        deriv2=-2.0 * a * b / q**3,
        deriv3=6.0 * a * b * b / q**4,
    )


def eval_D(x: float, params: ModelParams, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """D = A_- on x <= 0, A_+ on [0, x2], B on x >= x2"""
    params.require_bounding_range()
    if x <= 0:
        return _A_minus(x, params, cfg)
    if x <= eval_x2(params):
        return eval_A_plus(x, params)
    return eval_B(x, params)


def _fixed(params: ModelParams) -> ModelParams:
    return params if params.tau == TAU_FIXED else params.with_tau(TAU_FIXED)


def _F_unchecked(x: float, params: ModelParams, cfg: QuadratureConfig) -> float:
    fixed = _fixed(params)
    return _A_minus(eval_R(x, fixed), fixed, cfg)


def eval_F(
    x: float, params: ModelParams, cfg: QuadratureConfig = DEFAULT_QUADRATURE, check: bool = True
) -> float:
    """
    F(x) = A_-(R(x)) at tau = 3/2

    Args:
        x: Abscissa (x >= 0)
        params: Model parameters (only c is used)
        cfg: Quadrature settings
        check: Assert 0 < F(x) < x

    Raises:
        DomainError: if x < 0
        ConsistencyError: if F(x) >= x or F(x) <= 0 for x > 0
    """
    if x < 0:
        raise DomainError(f"F is evaluated on x >= 0, got {x}")
    if x == 0:
        return 0.0
    value = _F_unchecked(x, params, cfg)
    if not check:
        return value
    if value >= x + F_CONSISTENCY_TOL:
        raise ConsistencyError(f"F({x}) = {value} is not below x (c={params.c})")
    if value <= 0:
        raise ConsistencyError(f"F({x}) = {value} is not positive (c={params.c})")
    return value


# =============================================================================
# Schwarzian derivatives
# =============================================================================


def schwarzian(fn: BoundProvider, x: float) -> float:
    """
    Schwarzian derivative f'''/f' - 1.5 (f''/f')^2

    Args:
        fn: Provider returning a BoundEval with three derivatives
        x: Abscissa

    Raises:
        DegenerateDerivativeError: if |f'(x)| < 1e-12
    """
    ev = fn(x)
    if not ev.has_jet:
        raise ValueError(f"Provider returned no third-order jet at x={x}")
    if abs(ev.deriv1) < SCHWARZIAN_MIN_DERIV:
        raise DegenerateDerivativeError(f"|f'({x})| = {abs(ev.deriv1):.3e} is too small for a Schwarzian")
    ratio = ev.deriv2 / ev.deriv1
    return ev.deriv3 / ev.deriv1 - 1.5 * ratio * ratio


def rho_provider(params: ModelParams) -> BoundProvider:
    """Analytic jet of rho"""
    return lambda x: eval_rho(x, params, order=3)


def R_provider(params: ModelParams) -> BoundProvider:
    """Analytic jet of R"""
    return lambda x: eval_R_eval(x, params)


def finite_difference_provider(fn: Callable[[float], float], base: float = FD_BASE_STEP) -> BoundProvider:
    """Jet of a scalar map from Richardson-extrapolated central differences"""

    def provider(x: float) -> BoundEval:
        d1, d2, d3 = FiniteDifference.jet(fn, x, base)
        return BoundEval(x=x, value=fn(x), deriv1=d1, deriv2=d2, deriv3=d3)

    return provider


def A_minus_provider(params: ModelParams, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> BoundProvider:
    """Finite-difference jet of A_-"""
    params.require_bounding_range()
    return finite_difference_provider(lambda x: _A_minus(x, params, cfg))


def F_provider(params: ModelParams, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> BoundProvider:
    """Finite-difference jet of F (stencil may reach x < 0)"""
    return finite_difference_provider(lambda x: _F_unchecked(x, params, cfg))


def jet_at_zero(fn: Callable[[float], float], base: float = FD_BASE_STEP):
    """(f'(0), f''(0), f'''(0)) by finite differences"""
    return FiniteDifference.jet(fn, 0.0, base)
