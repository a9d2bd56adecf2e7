"""
Method-of-lines simulation of u_t = u_xx + u(t,x)(1 - u(t - tau, x))

Three-point Laplacian with Neumann ends, classical RK4 in time, and the delayed
field read from a ring buffer holding one delay worth of snapshots.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from core.constants import FRONT_LEVEL, SPEED_MIN_SAMPLES
from core.exceptions import NoFrontError, ParameterDomainError, SimulationError, StabilityError
from core.spectral import decay_rates
from models.params import ModelParams
from models.profiles import Grid1D, PdeConfig, PdeState, PdeTrajectory, ProfileSolution

logger = logging.getLogger(__name__)

DEFAULT_PDE = PdeConfig()

NEGATIVITY_TOL = 1e-8


def choose_time_step(params: ModelParams, cfg: PdeConfig) -> Tuple[float, int]:
    """
    Time step and history depth

    Returns:
        (dt, depth) with depth * dt = tau

    Raises:
        StabilityError: if a configured dt exceeds stability_factor * dx^2
        ParameterDomainError: if a configured dt does not divide tau
    """
    limit = cfg.dt_limit
    if cfg.dt is not None:
        if cfg.dt > limit * (1.0 + 1e-12):
            raise StabilityError(f"dt={cfg.dt} exceeds the explicit limit {limit:.6g} for dx={cfg.dx}")
        if params.tau == 0:
            return cfg.dt, 0
        depth = int(round(params.tau / cfg.dt))
        if depth < 1 or abs(depth * cfg.dt - params.tau) > 1e-9 * params.tau:
            raise ParameterDomainError(f"dt={cfg.dt} does not divide tau={params.tau}")
        return params.tau / depth, depth
    if params.tau == 0:
        return limit, 0
    depth = int(math.ceil(params.tau / limit - 1e-12))
    return params.tau / depth, depth


def laplacian(u: np.ndarray, dx: float) -> np.ndarray:
    """Three-point Laplacian with reflecting (Neumann) ends"""
    out = np.empty_like(u)
    out[1:-1] = u[2:] - 2.0 * u[1:-1] + u[:-2]
    out[0] = 2.0 * (u[1] - u[0])
    out[-1] = 2.0 * (u[-2] - u[-1])
    return out / (dx * dx)


def _rhs(u: np.ndarray, lagged: Optional[np.ndarray], dx: float) -> np.ndarray:
    lagged = u if lagged is None else lagged
    return laplacian(u, dx) + u * (1.0 - lagged)


def rk4_step(state: PdeState) -> np.ndarray:
    """
    One RK4 step of the delayed system

    Stage 1 reads the delayed field at t - tau, stage 4 at t - tau + dt and the
    midpoint stages their average.
    """
    u, dt, dx = state.u, state.dt, state.dx
    if state.depth == 0:
        lag0 = lag1 = lag_mid = None
    else:
        lag0 = state.delayed(0)
        lag1 = state.delayed(1)
        lag_mid = 0.5 * (lag0 + lag1)
    k1 = _rhs(u, lag0, dx)
    k2 = _rhs(u + 0.5 * dt * k1, lag_mid, dx)
    k3 = _rhs(u + 0.5 * dt * k2, lag_mid, dx)
    k4 = _rhs(u + dt * k3, lag1, dx)
    return u + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def front_position(x_grid: np.ndarray, u: np.ndarray, level: float = FRONT_LEVEL) -> float:
    """Largest level crossing of u by linear interpolation (nan if none)"""
    above = u >= level
    crossings = np.nonzero(above[:-1] != above[1:])[0]
    if crossings.size == 0:
        return math.nan
    i = int(crossings[-1])
    u0, u1 = u[i], u[i + 1]
    return float(x_grid[i] + (level - u0) / (u1 - u0) * (x_grid[i + 1] - x_grid[i]))


def initial_state(params: ModelParams, cfg: PdeConfig) -> PdeState:
    """Step data u0 = initial_level on x <= step_position with constant history"""
    dt, depth = choose_time_step(params, cfg)
    n = int(round(cfg.domain_length / cfg.dx)) + 1
    x_grid = cfg.dx * np.arange(n)
    u0 = np.where(x_grid <= cfg.step_position, cfg.initial_level, 0.0)
    history = np.tile(u0, (depth, 1)) if depth else np.empty((0, n))
    return PdeState(x_grid=x_grid, dt=dt, history=history, t_now=0.0, u=u0.copy())


def simulate_pde_front(params: ModelParams, cfg: PdeConfig = DEFAULT_PDE) -> PdeTrajectory:
    """
    Integrate the delayed PDE from step data and track the 1/2 level front

    Args:
        params: Delay tau (the speed c is not used by the PDE)
        cfg: Domain, resolution and sampling

    Returns:
        PdeTrajectory with front positions and snapshots at every sample time

    Raises:
        StabilityError: if the time step violates the explicit limit
        SimulationError: on NaN or negative values
    """
    state = initial_state(params, cfg)
    trajectory = PdeTrajectory(params=params, x_grid=state.x_grid)
    n_steps = int(math.ceil(cfg.final_time / state.dt - 1e-9))
    next_sample = 0.0

    logger.debug(
        f"PDE run tau={params.tau}: {state.x_grid.size} nodes, dt={state.dt:.5g}, "
        f"history depth {state.depth}, {n_steps} steps"
    )

    for step in range(n_steps + 1):
        if state.t_now >= next_sample - 1e-9 or step == n_steps:
            trajectory.times.append(state.t_now)
            trajectory.fronts.append(front_position(state.x_grid, state.u))
            trajectory.snapshots.append(state.u.copy())
            trajectory.snapshot_times.append(state.t_now)
            next_sample += cfg.sample_interval
        if step == n_steps:
            break

        u_new = rk4_step(state)
        if not np.all(np.isfinite(u_new)):
            raise SimulationError(f"Non-finite field at t={state.t_now:.4f} (tau={params.tau})")
        lowest = float(u_new.min())
        if lowest < -NEGATIVITY_TOL:
            raise SimulationError(f"Field became negative ({lowest:.3e}) at t={state.t_now:.4f}")
        state.push(np.maximum(u_new, 0.0), state.dt)

    trajectory.final_state = state
    return trajectory


def extract_comoving_profile(
    trajectory: PdeTrajectory, at_time: float, xi_left: float = 60.0, xi_right: Optional[float] = None
) -> ProfileSolution:
    """
    Sample phi(xi) = u(at_time, X_f - xi) so the profile rises from ~0 to ~1

    Args:
        trajectory: Simulation output
        at_time: Snapshot time (closest stored snapshot is used)
        xi_left: Extent ahead of the front
        xi_right: Extent behind the front (default: back to the left boundary)

    Raises:
        NoFrontError: if u never crosses 1/2
    """
    u = trajectory.snapshot_at(at_time)
    x_grid = trajectory.x_grid
    front = front_position(x_grid, u)
    if not math.isfinite(front):
        raise NoFrontError(f"No 1/2 level crossing at t={at_time}")

    dx = float(x_grid[1] - x_grid[0])
    ahead = min(xi_left, x_grid[-1] - front)
    behind = front - x_grid[0] if xi_right is None else min(xi_right, front - x_grid[0])
    n_left = int(math.floor(ahead / dx))
    n_right = int(math.floor(behind / dx))
    if n_left < 1 or n_right < 1:
        raise NoFrontError(f"Front at {front:.3f} is too close to the boundary")

    grid = Grid1D(t_min=-n_left * dx, t_max=n_right * dx, step=dx)
    xi = grid.nodes
    phi = np.interp(front - xi, x_grid, u)
    return ProfileSolution(
        grid=grid,
        phi=phi,
        dphi=np.gradient(phi, dx, edge_order=2),
        params=trajectory.params,
        residual_inf=math.nan,
        converged=True,
        left_amplitude=float(phi[0]),
        decay_rate=decay_rates(trajectory.params).slow,
        message=f"co-moving profile at t={at_time:g}, front {front:.4f}",
    )


def half_level_crossing(t: np.ndarray, phi: np.ndarray, level: float = FRONT_LEVEL) -> float:
    """First upward level crossing of a profile"""
    above = phi >= level
    crossings = np.nonzero(~above[:-1] & above[1:])[0]
    if crossings.size == 0:
        raise NoFrontError("Profile never crosses 1/2")
    i = int(crossings[0])
    return float(t[i] + (level - phi[i]) / (phi[i + 1] - phi[i]) * (t[i + 1] - t[i]))


def profile_distance(first: ProfileSolution, second: ProfileSolution, window: Tuple[float, float] = (-20.0, 40.0)) -> float:
    """
    Infinity distance of two profiles after aligning their 1/2 crossings

    Args:
        first: Profile on its own grid
        second: Profile on its own grid
        window: Aligned coordinate range, clipped to the common support
    """
    t1 = first.grid.nodes - half_level_crossing(first.grid.nodes, first.phi)
    t2 = second.grid.nodes - half_level_crossing(second.grid.nodes, second.phi)
    lo = max(window[0], t1[0], t2[0])
    hi = min(window[1], t1[-1], t2[-1])
    if hi <= lo:
        raise NoFrontError("Profiles have no overlap window")
    step = min(first.grid.step, second.grid.step)
    s = np.arange(lo, hi, step)
    return float(np.max(np.abs(np.interp(s, t1, first.phi) - np.interp(s, t2, second.phi))))


def fit_front_speed(times: Sequence[float], fronts: Sequence[float]) -> Tuple[float, float]:
    """
    Least-squares slope of the front position over the final third of the series

    Returns:
        (speed, rms_residual)

    Raises:
        SimulationError: if fewer than SPEED_MIN_SAMPLES finite samples remain
    """
    t = np.asarray(times, dtype=float)
    x = np.asarray(fronts, dtype=float)
    start = (2 * len(t)) // 3
    t, x = t[start:], x[start:]
    finite = np.isfinite(x)
    t, x = t[finite], x[finite]
    if len(t) < SPEED_MIN_SAMPLES:
        raise SimulationError(f"Front speed needs {SPEED_MIN_SAMPLES} samples in the fit window, got {len(t)}")
    slope, intercept = np.polyfit(t, x, 1)
    rms = float(np.sqrt(np.mean((x - (slope * t + intercept)) ** 2)))
    return float(slope), rms


def measure_front_speed(times: Sequence[float], fronts: Sequence[float]) -> float:
    """Asymptotic front speed"""
    speed, rms = fit_front_speed(times, fronts)
    logger.debug(f"Front speed {speed:.6f} (fit residual {rms:.2e})")
    return speed
