"""
Oscillation analysis of wave profiles in log coordinates

With phi(t) = exp(-x(t)) the profile equation becomes
x'' - c x' - (x')^2 + (exp(-x(t-h)) - 1) = 0 and y = x' solves the Riccati
equation y' = y^2 + c y - g(t), g(t) = exp(-x(t-h)) - 1.  The zeros Q_j,
extremum points T_j and amplitudes V_j = x(T_j) of x are checked against the
slope bounds, the amplitude recursions and the final squeeze of the tail limits.
"""

import logging
import math
from typing import Optional

import numpy as np

from core.bounds import (
    eval_A_minus,
    eval_A_plus,
    eval_B,
    eval_D,
    eval_F,
    eval_R,
    eval_rho,
    eval_x2,
    rho_values,
)
from core.bvp_solver import delayed_profile
from core.constants import CHECK_TOL, F_ITERATION_FLOOR, NOISE_FLOOR, TAU_FIXED, TAU_LOWER
from core.exceptions import DomainError
from core.quadrature import DEFAULT_QUADRATURE
from models.certification import CertificationReport, CertifyConfig, OscillationRecord, TailLimits
from models.params import ModelParams, QuadratureConfig
from models.profiles import LogProfile, ProfileSolution

logger = logging.getLogger(__name__)

DEFAULT_CERTIFY = CertifyConfig()


# =============================================================================
# Log coordinates and skeleton
# =============================================================================


def to_log_coordinates(sol: ProfileSolution) -> LogProfile:
    """
    x = -ln(phi), y = x' by centered differences, g(t) = exp(-x(t-h)) - 1

    Raises:
        DomainError: if phi is not strictly positive
    """
    phi = np.asarray(sol.phi, dtype=float)
    if not np.all(phi > 0):
        raise DomainError(f"Log coordinates need phi > 0 (min {phi.min():.3e})")
    x = -np.log(phi)
    y = np.gradient(x, sol.grid.step, edge_order=2)
    g = delayed_profile(sol) - 1.0
    return LogProfile(grid=sol.grid, x=x, y=y, g=g, params=sol.params, phi=phi)


def _zero_crossings(t: np.ndarray, x: np.ndarray) -> np.ndarray:
    positive = x > 0
    idx = np.nonzero(positive[:-1] != positive[1:])[0]
    return t[idx] + x[idx] / (x[idx] - x[idx + 1]) * (t[idx + 1] - t[idx])


def _vertex(t: np.ndarray, x: np.ndarray, i: int):
    """Extremum of the parabola through nodes i-1, i, i+1"""
    if i <= 0 or i >= len(x) - 1:
        return t[i], x[i]
    a, b, c = x[i - 1], x[i], x[i + 1]
    curvature = a - 2.0 * b + c
    if curvature == 0:
        return t[i], b
    k = t[i + 1] - t[i]
    offset = 0.5 * (a - c) / curvature
    return t[i] + offset * k, b - 0.125 * (a - c) ** 2 / curvature


def _sign_changes(t: np.ndarray, values: np.ndarray) -> np.ndarray:
    positive = values > 0
    idx = np.nonzero(positive[:-1] != positive[1:])[0]
    return t[idx] + values[idx] / (values[idx] - values[idx + 1]) * (t[idx + 1] - t[idx])


def extract_oscillation(
    lp: LogProfile, noise_floor: float = NOISE_FLOOR, t_stop: Optional[float] = None
) -> OscillationRecord:
    """
    Zeros, extremum points and amplitudes of x(t)

    Args:
        lp: Log-coordinate profile
        noise_floor: Oscillations with smaller amplitude end the record
        t_stop: Ignore zeros beyond this abscissa

    Returns:
        OscillationRecord (empty for a profile without zeros)
    """
    if not noise_floor > 0:
        raise DomainError(f"noise_floor must be positive, got {noise_floor}")
    t, x = lp.t, lp.x
    zeros = _zero_crossings(t, x)
    if t_stop is not None:
        zeros = zeros[zeros <= t_stop]

    Q, T, V, P, T_index = [], [], [], [], []
    for j in range(len(zeros) - 1):
        inside = np.nonzero((t > zeros[j]) & (t < zeros[j + 1]))[0]
        if inside.size == 0:
            break
        i = int(inside[np.argmax(np.abs(x[inside]))])
        t_ext, v_ext = _vertex(t, x, i)
        if abs(v_ext) < noise_floor:
            break
        Q.append(zeros[j])
        T.append(t_ext)
        V.append(v_ext)
        T_index.append(i)
    if V:
        Q.append(zeros[len(V)])

    y = lp.y
    for j in range(len(T_index) - 1):
        lo, hi = T_index[j], T_index[j + 1]
        segment = y[lo : hi + 1]
        # y has its minimum on decreasing stretches (V_j > 0) and its maximum otherwise
        k = int(np.argmin(segment)) if V[j] > 0 else int(np.argmax(segment))
        P.append(t[lo + k])

    inflections = np.empty(0)
    if lp.phi is not None and V:
        phi = lp.phi
        second = phi[2:] - 2.0 * phi[1:-1] + phi[:-2]
        found = _sign_changes(t[1:-1], second)
        inflections = found[(found > T[0]) & (found < T[-1])]

    rec = OscillationRecord(
        Q=np.asarray(Q),
        T=np.asarray(T),
        V=np.asarray(V),
        P=np.asarray(P),
        inflections=inflections,
        T_index=np.asarray(T_index, dtype=int),
    )
    logger.debug(f"Extracted {rec.count} extrema from {len(zeros)} zeros")
    return rec


# =============================================================================
# Checks
# =============================================================================


def verify_skeleton(lp: LogProfile, rec: OscillationRecord, tol: float = CHECK_TOL) -> CertificationReport:
    """Sign alternation, one extremum per zero interval, T_j - Q_j < h and T_{j+1} - Q_j > h"""
    report = CertificationReport()
    h = lp.params.h
    y = lp.y
    for j in range(rec.count):
        interval = f"j={j}"
        expected = -1.0 if j % 2 == 0 else 1.0
        report.add("alternation", interval, rec.V[j], 0.0, expected * rec.V[j], tol)
        report.add_less("extremum_within_delay", interval, rec.T[j] - rec.Q[j], h, tol)

        inside = (lp.t > rec.Q[j]) & (lp.t < rec.Q[j + 1])
        turns = int(np.count_nonzero(np.diff(np.sign(y[inside])) != 0))
        report.add("single_extremum", interval, turns, 1, 0.5 - abs(turns - 1), 0.0)

        if j + 1 < rec.count:
            report.add_greater("slow_oscillation", f"j={j}->{j + 1}", rec.T[j + 1] - rec.Q[j], h, tol)
            if j % 2 == 1:
                # zero of lambda_2 at Q_j + h lies between T_j and T_{j+1}
                zero = rec.Q[j] + h
                margin = min(zero - rec.T[j], rec.T[j + 1] - zero)
                report.add("isocline_zero", f"j={j}->{j + 1}", zero, rec.T[j + 1], margin, tol)
    return report


def verify_slope_bounds(lp: LogProfile, rec: OscillationRecord, tol: float = CHECK_TOL) -> CertificationReport:
    """
    Slope bounds against the isoclines lambda_2(t) = rho(x(t-h))/h and lambda_1(t)

    On a decreasing stretch [T_{2j+1}, T_{2j+2}] with y minimal at p_j:
    y < lambda_2 before p_j and y > lambda_2 after it.  On an increasing stretch
    [T_{2j}, T_{2j+1}] with y maximal at q_j the inequalities are reversed.
    """
    report = CertificationReport()
    if rec.is_empty:
        report.notes.append("no oscillation: slope bounds hold vacuously")
        return report

    params = lp.params
    c, h = params.c, params.h
    lag_x = -np.log1p(lp.g)
    lam2 = rho_values(lag_x, params) / h if h > 0 else np.zeros_like(lp.y)
    disc = np.sqrt(c * c + 4.0 * lp.g)
    f_of_g = 2.0 * lp.g / (c + disc)
    lam1 = (-c - disc) / 2.0

    start, stop = int(rec.T_index[0]), int(rec.T_index[-1])
    window = slice(start, stop + 1)
    if h > 0:
        gap = float(np.max(np.abs(lam2[window] - f_of_g[window])))
        report.add("isocline_identity", f"nodes {start}..{stop}", gap, 1e-12, 1e-12 - gap, 0.0)
    margin = float(np.min(lp.y[window] - lam1[window]))
    report.add("above_lambda_1", f"nodes {start}..{stop}", margin, 0.0, margin, tol)

    y = lp.y
    for j in range(rec.count - 1):
        lo, hi = int(rec.T_index[j]), int(rec.T_index[j + 1])
        critical = int(np.searchsorted(lp.t, rec.P[j]))
        if rec.V[j] > 0:
            after = y[critical + 1 : hi + 1] - lam2[critical + 1 : hi + 1]
            before = lam2[lo:critical] - y[lo:critical]
            name = "slope_p"
        else:
            after = lam2[critical + 1 : hi + 1] - y[critical + 1 : hi + 1]
            before = y[lo:critical] - lam2[lo:critical]
            name = "slope_q"
        interval = f"T_{j}..T_{j + 1}"
        if after.size:
            report.add(f"{name}_after", interval, float(np.min(after)), 0.0, float(np.min(after)), tol)
        if before.size:
            report.add(f"{name}_before", interval, float(np.min(before)), 0.0, float(np.min(before)), tol)
    return report


def verify_amplitude_bounds(
    rec: OscillationRecord,
    params: ModelParams,
    tol: float = CHECK_TOL,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> CertificationReport:
    """
    V_{2j+1} <= A_-(V_{2j}), V_{2j} >= B(V_{2j-1}), V_{2j} >= A_+(V_{2j-1}) if V_{2j-1} <= x2,
    V_0 >= -c h, and V_{2j} inside the domain x/rho(x) > -1 of A_-

    Raises:
        ParameterDomainError: if tau is outside (1, 3/2]
    """
    params.require_bounding_range()
    report = CertificationReport()
    if rec.is_empty:
        report.notes.append("no oscillation: amplitude recursions hold vacuously")
        return report

    V = rec.V
    x2 = eval_x2(params)
    report.add_greater("V0_lower", "j=0", V[0], -params.c * params.h, tol)
    for j in range(len(V)):
        link = f"{j - 1}->{j}"
        if j % 2 == 0:
            rho = eval_rho(V[j], params).value
            report.add_greater("A_minus_domain", f"j={j}", V[j] / rho, -1.0, tol)
            if j >= 1:
                report.add_greater("B_recursion", link, V[j], eval_B(V[j - 1], params), tol)
                if V[j - 1] <= x2:
                    report.add_greater("A_plus_recursion", link, V[j], eval_A_plus(V[j - 1], params), tol)
        else:
            report.add_less("A_minus_recursion", link, V[j], eval_A_minus(V[j - 1], params, cfg), tol)
    return report


def count_inflections(rec: OscillationRecord) -> CertificationReport:
    """Exactly one inflection point of phi between consecutive extremum points"""
    report = CertificationReport()
    if rec.count < 2:
        report.notes.append("fewer than two extrema: inflection count holds vacuously")
        return report
    for j in range(rec.count - 1):
        n = int(np.count_nonzero((rec.inflections > rec.T[j]) & (rec.inflections < rec.T[j + 1])))
        report.add("single_inflection", f"T_{j}..T_{j + 1}", n, 1, 0.5 - abs(n - 1), 0.0)
    return report


def estimate_limits(rec: OscillationRecord, min_extrema: int = 4) -> TailLimits:
    """
    lim inf and lim sup of x from the final quarter of the amplitudes

    With fewer than min_extrema extrema the last available pair is used and the
    estimate is flagged low-confidence.
    """
    if rec.is_empty:
        return TailLimits(0.0, 0.0, False)
    V = rec.V
    low_confidence = len(V) < min_extrema
    size = 2 if low_confidence else max(2, int(math.ceil(len(V) / 4)))
    window = V[-size:]
    m_star = float(min(np.min(window), 0.0))
    M_star = float(max(np.max(window), 0.0))
    if low_confidence:
        logger.warning(f"Only {len(V)} extrema: tail limits are low-confidence")
    return TailLimits(m_star, M_star, low_confidence)


def verify_squeeze(
    m_star: float,
    M_star: float,
    params: ModelParams,
    tol: float = CHECK_TOL,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> CertificationReport:
    """
    M* <= A_-(m*) and m* >= D(M*); for tau < 3/2 also M* < A_-(m*, 3/2) and m* > R(M*)

    Raises:
        ParameterDomainError: if tau is outside (1, 3/2]
    """
    params.require_bounding_range()
    report = CertificationReport(m_star=m_star, M_star=M_star)
    report.add_less("squeeze_upper", "tail", M_star, eval_A_minus(m_star, params, cfg), tol)
    report.add_greater("squeeze_lower", "tail", m_star, eval_D(M_star, params, cfg), tol)
    if params.tau < TAU_FIXED:
        fixed = params.with_tau(TAU_FIXED)
        report.add_less("squeeze_upper_fixed_delay", "tail", M_star, eval_A_minus(m_star, fixed, cfg), tol)
        report.add_greater("squeeze_lower_moebius", "tail", m_star, eval_R(M_star, fixed), tol)
    return report


def iterate_F(
    x0: float, params: ModelParams, n: int = 50, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> np.ndarray:
    """
    Orbit x_{k+1} = F(x_k) at tau = 3/2

    Stops early once an iterate falls below F_ITERATION_FLOOR.

    Raises:
        DomainError: if x0 < 0
        ConsistencyError: if some F(x_k) >= x_k
    """
    if x0 < 0:
        raise DomainError(f"F is iterated from x0 >= 0, got {x0}")
    if x0 == 0:
        return np.zeros(n + 1)
    orbit = [x0]
    for _ in range(n):
        nxt = eval_F(orbit[-1], params, cfg)
        orbit.append(nxt)
        if nxt < F_ITERATION_FLOOR:
            break
    return np.asarray(orbit)


def riccati_residual(lp: LogProfile, start: int = 1, stop: Optional[int] = None) -> float:
    """max |y' - y^2 - c y + g| over nodes start..stop"""
    dy = np.gradient(lp.y, lp.grid.step, edge_order=2)
    residual = dy - lp.y**2 - lp.params.c * lp.y + lp.g
    stop = len(residual) - 1 if stop is None else stop
    return float(np.max(np.abs(residual[start : stop + 1])))


# =============================================================================
# Pipeline
# =============================================================================


def trivial_certificate(params: ModelParams) -> CertificationReport:
    """Report for tau <= 1, where the profile converges to 1 without a check"""
    report = CertificationReport(m_star=0.0, M_star=0.0, trivial=True)
    report.notes.append(f"trivially certified (tau = {params.tau} <= 1)")
    return report


def analysis_stop(sol: ProfileSolution, cfg: CertifyConfig = DEFAULT_CERTIFY) -> float:
    """Right end of the analysed window, clear of the Neumann boundary layer"""
    return sol.grid.t_max - cfg.boundary_layer * max(1.0, sol.params.h)


def certify_profile(
    sol: ProfileSolution,
    cfg: CertifyConfig = DEFAULT_CERTIFY,
    quad_cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> CertificationReport:
    """
    Run every oscillation check on a profile

    Delays tau <= 1 are certified trivially.

    Args:
        sol: Profile to certify
        cfg: Tolerances
        quad_cfg: Quadrature settings for A_-

    Returns:
        CertificationReport
    """
    params = sol.params
    if params.tau <= TAU_LOWER:
        return trivial_certificate(params)
    params.require_bounding_range()

    report = CertificationReport()
    lp = to_log_coordinates(sol)
    t_stop = analysis_stop(sol, cfg)
    rec = extract_oscillation(lp, cfg.noise_floor, t_stop=t_stop)
    report.record = rec
    report.notes.append(f"{rec.count} extrema, {len(rec.Q)} zeros before t={t_stop:g}")

    if not rec.is_empty:
        stop = int(rec.T_index[-1])
        report.notes.append(f"Riccati residual {riccati_residual(lp, int(rec.T_index[0]), stop):.3e}")
    report.extend(verify_skeleton(lp, rec, cfg.tol))
    report.extend(verify_slope_bounds(lp, rec, cfg.tol))
    report.extend(verify_amplitude_bounds(rec, params, cfg.tol, quad_cfg))
    report.extend(count_inflections(rec))

    limits = estimate_limits(rec, cfg.min_tail_extrema)
    if limits.low_confidence:
        report.notes.append("tail limits are low-confidence (too few extrema)")
    report.extend(verify_squeeze(limits.m_star, limits.M_star, params, cfg.tol, quad_cfg))
    bound = max(abs(limits.m_star), abs(limits.M_star))
    report.add_less("tail_limit", "tail", bound, cfg.limit_threshold, 0.0)

    if rec.count >= cfg.min_tail_extrema:
        amplitudes = np.abs(rec.V[-cfg.min_tail_extrema :])
        drop = float(np.min(amplitudes[:-1] - amplitudes[1:]))
        report.add("tail_monotone", f"last {cfg.min_tail_extrema} extrema", drop, 0.0, drop, 0.0)

    x0 = float(rec.V[1]) if rec.count >= 2 else 1.0
    orbit = iterate_F(x0, params, cfg.f_steps, quad_cfg)
    steps = float(np.min(orbit[:-1] - orbit[1:]))
    report.add("F_iteration", f"x0={x0:.6g}", steps, 0.0, steps, 0.0)
    report.notes.append(f"F^{len(orbit) - 1}({x0:.6g}) = {orbit[-1]:.6e}")

    logger.info(
        f"Certified c={params.c} tau={params.tau}: {len(report.checks)} checks, "
        f"{len(report.failures)} failures"
    )
    return report
