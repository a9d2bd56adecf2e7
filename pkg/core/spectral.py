"""
Characteristic quasi-polynomial chi(lambda) = lambda^2 - c*lambda - exp(-lambda*c*tau)

Right-half-plane roots are counted with the argument principle on a rectangle
that contains every root with Re(lambda) >= 0 (|lambda| <= c + 1 there), then
isolated by recursive bisection and polished with Newton's method.
"""

import logging
import math
from typing import Iterable, List, Optional, Tuple

import numpy as np

from core.constants import (
    CONTOUR_INFLATION,
    CONTOUR_MAX_REFINEMENTS,
    CONTOUR_MAX_RETRIES,
    CONTOUR_MIN_MODULUS,
    MAX_PHASE_STEP,
    ROOT_NEWTON_MAX_ITER,
    ROOT_RESIDUAL_TOL,
    ROOT_SPLIT_MAX_DEPTH,
    WINDING_TOLERANCE,
)
from core.exceptions import ConvergenceError, ParameterDomainError
from models.params import ModelParams
from models.spectral import CrossingPoint, DecayRates, RootCountResult

logger = logging.getLogger(__name__)

# (re_min, re_max, im_min, im_max)
Rect = Tuple[float, float, float, float]

_EDGE_SAMPLES = 64
_SPLIT_FRACTIONS = (0.5, 0.4713, 0.5291, 0.4419, 0.5573)


def char_eval(lam, params: ModelParams):
    """chi(lambda); accepts scalars or numpy arrays"""
    return lam * lam - params.c * lam - np.exp(-lam * params.h)


def char_deriv(lam, params: ModelParams):
    """chi'(lambda) = 2*lambda - c + c*tau*exp(-lambda*c*tau)"""
    return 2.0 * lam - params.c + params.h * np.exp(-lam * params.h)


# =============================================================================
# Argument principle
# =============================================================================


def _edge_values(z0: complex, z1: complex, params: ModelParams) -> Tuple[np.ndarray, np.ndarray]:
    """Sample chi along [z0, z1] until no phase step exceeds MAX_PHASE_STEP"""
    s = np.linspace(0.0, 1.0, _EDGE_SAMPLES + 1)
    for _ in range(CONTOUR_MAX_REFINEMENTS):
        z = z0 + (z1 - z0) * s
        values = char_eval(z, params)
        steps = np.abs(np.angle(values[1:] / values[:-1]))
        coarse = np.nonzero(steps > MAX_PHASE_STEP)[0]
        if coarse.size == 0:
            return z, values
        s = np.sort(np.concatenate([s, 0.5 * (s[coarse] + s[coarse + 1])]))
    raise ConvergenceError(
        f"Phase sampling of edge {z0:.4g} -> {z1:.4g} did not resolve after "
        f"{CONTOUR_MAX_REFINEMENTS} refinements (c={params.c}, tau={params.tau})"
    )


def _corners(rect: Rect) -> Tuple[complex, complex, complex, complex]:
    x0, x1, y0, y1 = rect
    return complex(x0, y0), complex(x1, y0), complex(x1, y1), complex(x0, y1)


def _winding(rect: Rect, params: ModelParams) -> Tuple[float, float, int]:
    """
    Winding number of chi around a rectangle

    Returns:
        (winding_integral, min_modulus, sample_count)
    """
    corners = _corners(rect)
    total = 0.0
    min_modulus = math.inf
    samples = 0
    for k in range(4):
        _, values = _edge_values(corners[k], corners[(k + 1) % 4], params)
        # per-segment log increments of chi, i.e. the integral of chi'/chi
        total += float(np.sum(np.angle(values[1:] / values[:-1])))
        min_modulus = min(min_modulus, float(np.min(np.abs(values))))
        samples += len(values)
    return total / (2.0 * math.pi), min_modulus, samples


def _snap(integral: float, rect: Rect, params: ModelParams) -> int:
    count = int(round(integral))
    if abs(integral - count) >= WINDING_TOLERANCE:
        raise ConvergenceError(
            f"Winding integral {integral:.4f} on {rect} is not within {WINDING_TOLERANCE} "
            f"of an integer (c={params.c}, tau={params.tau})"
        )
    return count


def search_rectangle(params: ModelParams) -> Rect:
    """[0, c+2] x [-(c+2), c+2]"""
    bound = params.c + 2.0
    return 0.0, bound, -bound, bound


def count_rhp_roots(params: ModelParams, with_roots: bool = True) -> RootCountResult:
    """
    Count roots of chi with non-negative real part

    Args:
        params: Model parameters
        with_roots: Also isolate and polish the roots

    Returns:
        RootCountResult

    Raises:
        ConvergenceError: if a root stays on the contour after every inflation,
            or the winding does not snap to an integer
    """
    base = search_rectangle(params)
    for attempt in range(CONTOUR_MAX_RETRIES + 1):
        pad = attempt * CONTOUR_INFLATION
        rect = (base[0] - pad, base[1] + pad, base[2] - pad, base[3] + pad)
        integral, min_modulus, samples = _winding(rect, params)
        if min_modulus > CONTOUR_MIN_MODULUS:
            break
        logger.debug(f"Contour passes within {min_modulus:.2e} of a root, inflating (attempt {attempt + 1})")
    else:
        raise ConvergenceError(
            f"A root of chi stays on the contour after {CONTOUR_MAX_RETRIES} inflations "
            f"(c={params.c}, tau={params.tau})"
        )

    count = _snap(integral, rect, params)
    roots = find_rhp_roots(params, rect, count) if with_roots and count > 0 else []
    logger.debug(f"c={params.c} tau={params.tau}: {count} roots in the right half-plane ({samples} samples)")
    return RootCountResult(
        count=count,
        contour=_corners(rect),
        winding_integral=integral,
        roots=roots,
        samples=samples,
    )


# =============================================================================
# Root isolation
# =============================================================================


def _newton(z: complex, params: ModelParams) -> Optional[complex]:
    for _ in range(ROOT_NEWTON_MAX_ITER):
        value = complex(char_eval(z, params))
        if abs(value) < 1e-14:
            break
        deriv = complex(char_deriv(z, params))
        if deriv == 0:
            return None
        step = value / deriv
        z -= step
        if abs(step) < 1e-15 * max(1.0, abs(z)):
            break
    if not np.isfinite(z) or abs(complex(char_eval(z, params))) >= ROOT_RESIDUAL_TOL:
        return None
    if abs(z.imag) < 1e-12 * max(1.0, abs(z.real)):
        z = complex(z.real, 0.0)
    return z


def _contains(rect: Rect, z: complex, margin: float = 1e-9) -> bool:
    x0, x1, y0, y1 = rect
    return x0 - margin <= z.real <= x1 + margin and y0 - margin <= z.imag <= y1 + margin


def _split(rect: Rect, params: ModelParams) -> List[Tuple[Rect, int]]:
    """Halve along the longer side, moving the cut off any root"""
    x0, x1, y0, y1 = rect
    for fraction in _SPLIT_FRACTIONS:
        if x1 - x0 >= y1 - y0:
            cut = x0 + fraction * (x1 - x0)
            halves = [(x0, cut, y0, y1), (cut, x1, y0, y1)]
        else:
            cut = y0 + fraction * (y1 - y0)
            halves = [(x0, x1, y0, cut), (x0, x1, cut, y1)]
        try:
            windings = [_winding(half, params) for half in halves]
            if any(w[1] <= CONTOUR_MIN_MODULUS for w in windings):
                continue
            counts = [_snap(w[0], half, params) for half, w in zip(halves, windings)]
        except ConvergenceError as e:
            # the cut runs through a root, e.g. the real root on a symmetric rectangle
            logger.debug(f"Cut at {cut:.6g} rejected: {e}")
            continue
        return list(zip(halves, counts))
    raise ConvergenceError(f"Could not split {rect} away from the roots of chi")


def _isolate(rect: Rect, count: int, params: ModelParams, depth: int) -> List[complex]:
    if count == 0:
        return []
    if count == 1 or depth >= ROOT_SPLIT_MAX_DEPTH:
        x0, x1, y0, y1 = rect
        root = _newton(complex(0.5 * (x0 + x1), 0.5 * (y0 + y1)), params)
        if root is not None and _contains(rect, root):
            return [root]
        if depth >= ROOT_SPLIT_MAX_DEPTH:
            logger.warning(f"Newton did not settle inside {rect} (c={params.c}, tau={params.tau})")
            return [root] if root is not None else []
    roots: List[complex] = []
    for half, half_count in _split(rect, params):
        roots.extend(_isolate(half, half_count, params, depth + 1))
    return roots


def find_rhp_roots(params: ModelParams, rect: Optional[Rect] = None, count: Optional[int] = None) -> List[complex]:
    """
    Locate the roots inside the search rectangle

    Returns:
        Roots sorted by decreasing real part, then imaginary part
    """
    rect = rect or search_rectangle(params)
    if count is None:
        integral, _, _ = _winding(rect, params)
        count = _snap(integral, rect, params)
    roots = _isolate(rect, count, params, depth=0)
    if len(roots) != count:
        logger.warning(f"Isolated {len(roots)} of {count} roots (c={params.c}, tau={params.tau})")
    return sorted(roots, key=lambda z: (-z.real, z.imag))


# =============================================================================
# Imaginary-axis crossings
# =============================================================================


def hopf_boundary(c: float) -> CrossingPoint:
    """
    Delay at which a conjugate pair lambda = +-i*omega crosses the imaginary axis

    omega^2 = (-c^2 + sqrt(c^4 + 4))/2 and tau* = (pi - arcsin(c*omega)) / (c*omega)
    """
    if not (math.isfinite(c) and c >= 2.0):
        raise ParameterDomainError(f"Wave speed c={c} must be at least 2")
    c2 = c * c
    omega_sq = 2.0 / (c2 + math.sqrt(c2 * c2 + 4.0))
    omega = math.sqrt(omega_sq)
    # cos(omega*c*tau) = -omega^2 < 0 puts the phase in the second quadrant
    phase = math.atan2(c * omega, -omega_sq)
    return CrossingPoint(c=c, tau_star=phase / (c * omega), omega=omega)


def boundary_curve(c_values: Iterable[float]) -> List[CrossingPoint]:
    """hopf_boundary over a list of speeds"""
    return [hopf_boundary(c) for c in c_values]


def crossing_by_bisection(c: float, lo: float, hi: float, width: float = 1e-4) -> float:
    """
    Bracket the delay where the root count changes

    Args:
        c: Wave speed
        lo: Delay with the lower count
        hi: Delay with the higher count
        width: Final bracket width

    Returns:
        Midpoint of the final bracket
    """
    count_lo = count_rhp_roots(ModelParams(c, lo), with_roots=False).count
    count_hi = count_rhp_roots(ModelParams(c, hi), with_roots=False).count
    if count_lo == count_hi:
        raise ParameterDomainError(f"Root count {count_lo} is the same at tau={lo} and tau={hi}")
    while hi - lo > width:
        mid = 0.5 * (lo + hi)
        if count_rhp_roots(ModelParams(c, mid), with_roots=False).count == count_lo:
            lo = mid
        else:
            hi = mid
    logger.debug(f"c={c}: root count changes in [{lo:.6f}, {hi:.6f}]")
    return 0.5 * (lo + hi)


def decay_rates(params: ModelParams) -> DecayRates:
    """Roots (c -+ sqrt(c^2 - 4))/2 of lambda^2 - c*lambda + 1 = 0"""
    c = params.c
    disc = c * c - 4.0
    if disc <= 0:
        return DecayRates(slow=c / 2.0, fast=c / 2.0, double_root=True)
    root = math.sqrt(disc)
    # slow root via Vieta to avoid cancellation at large c
    fast = (c + root) / 2.0
    return DecayRates(slow=1.0 / fast, fast=fast, double_root=False)
