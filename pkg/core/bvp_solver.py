"""
Delay boundary-value solver for the wave profile

    phi''(t) - c phi'(t) + phi(t) (1 - phi(t - h)) = 0,  h = c tau

on [-L1, L2] with phi(-L1) = eps0, phi'(L2) = 0 and the delayed argument below
the grid taken from the left asymptote eps0 * exp(lambda_-(t + L1)).
"""

import logging
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from core.exceptions import ParameterDomainError
from core.spectral import decay_rates
from models.params import ModelParams
from models.profiles import BvpGridConfig, Grid1D, NewtonConfig, ProfileSolution

logger = logging.getLogger(__name__)

DEFAULT_GRID = BvpGridConfig()
DEFAULT_NEWTON = NewtonConfig()


class DelayProfileProblem:
    """Discrete profile operator on a fixed grid for one delay shift"""

    def __init__(self, grid: Grid1D, c: float, shift: int, left_amplitude: float, decay_rate: float):
        self.grid = grid
        self.c = c
        self.shift = shift
        self.left_amplitude = left_amplitude
        self.decay_rate = decay_rate
        self.n = grid.n
        self.k = grid.step
        # delayed values for nodes whose argument falls left of the grid
        offsets = np.arange(-shift, 0) * self.k
        self._extension = left_amplitude * np.exp(decay_rate * offsets)

    def delayed(self, phi: np.ndarray) -> np.ndarray:
        """phi(t_i - h) for every node"""
        if self.shift == 0:
            return phi.copy()
        out = np.empty_like(phi)
        out[: self.shift] = self._extension[: min(self.shift, self.n)]
        out[self.shift :] = phi[: self.n - self.shift]
        return out

    def operator(self, phi: np.ndarray) -> np.ndarray:
        """phi'' - c phi' + phi (1 - phi(t-h)) at interior nodes 1..n-2"""
        k, c = self.k, self.c
        lag = self.delayed(phi)
        second = (phi[2:] - 2.0 * phi[1:-1] + phi[:-2]) / (k * k)
        first = (phi[2:] - phi[:-2]) / (2.0 * k)
        return second - c * first + phi[1:-1] * (1.0 - lag[1:-1])

    def residual(self, phi: np.ndarray) -> np.ndarray:
        """Full system: Dirichlet row, interior rows, Neumann row (ghost node)"""
        k = self.k
        lag = self.delayed(phi)
        out = np.empty_like(phi)
        out[0] = phi[0] - self.left_amplitude
        out[1:-1] = self.operator(phi)
        out[-1] = 2.0 * (phi[-2] - phi[-1]) / (k * k) + phi[-1] * (1.0 - lag[-1])
        return out

    def jacobian(self, phi: np.ndarray) -> sparse.csc_matrix:
        k, c, n, s = self.k, self.c, self.n, self.shift
        lag = self.delayed(phi)
        interior = np.arange(1, n - 1)

        rows = [np.array([0]), interior, interior, interior, np.array([n - 1, n - 1])]
        cols = [np.array([0]), interior - 1, interior, interior + 1, np.array([n - 2, n - 1])]
        vals = [
            np.array([1.0]),
            np.full(n - 2, 1.0 / (k * k) + c / (2.0 * k)),
            -2.0 / (k * k) + (1.0 - lag[1:-1]),
            np.full(n - 2, 1.0 / (k * k) - c / (2.0 * k)),
            np.array([2.0 / (k * k), -2.0 / (k * k) + (1.0 - lag[-1])]),
        ]

        # d/d phi_{i-s} of -phi_i * phi_{i-s}; duplicates are summed by the COO format
        coupled = np.arange(max(1, s), n)
        rows.append(coupled)
        cols.append(coupled - s)
        vals.append(-phi[coupled])

        jac = sparse.coo_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(n, n),
        )
        return jac.tocsc()


def _left_decay(params: ModelParams) -> float:
    return decay_rates(params).slow


def initial_guess(grid: Grid1D, params: ModelParams, left_amplitude: float) -> np.ndarray:
    """Logistic front passing through left_amplitude at the left end"""
    lam = _left_decay(params)
    t0 = grid.t_min + np.log(1.0 / left_amplitude - 1.0) / lam
    return 1.0 / (1.0 + np.exp(-lam * (grid.nodes - t0)))


def damped_newton(
    problem: DelayProfileProblem, phi: np.ndarray, cfg: NewtonConfig = DEFAULT_NEWTON
) -> Tuple[np.ndarray, float, int, bool]:
    """
    Damped Newton iteration with step halving

    Returns:
        (phi, residual_inf, iterations, converged)
    """
    res = problem.residual(phi)
    norm = float(np.max(np.abs(res)))
    for iteration in range(1, cfg.max_iter + 1):
        if norm < cfg.tol:
            return phi, norm, iteration - 1, True
        delta = spsolve(problem.jacobian(phi), -res)
        if not np.all(np.isfinite(delta)):
            logger.warning(f"Singular Newton system at iteration {iteration}")
            return phi, norm, iteration, False

        alpha = 1.0
        for _ in range(cfg.max_halvings + 1):
            trial = phi + alpha * delta
            trial_res = problem.residual(trial)
            trial_norm = float(np.max(np.abs(trial_res)))
            if trial_norm < (1.0 - 0.25 * alpha) * norm:
                break
            alpha *= 0.5
        phi, res, norm = trial, trial_res, trial_norm
        logger.debug(f"Newton iteration {iteration}: step {alpha:.3g}, residual {norm:.3e}")

    return phi, norm, cfg.max_iter, norm < cfg.tol


def _rung_shifts(shift: int, rungs: int):
    """Delay shifts of the continuation ladder, each a multiple of the grid step"""
    if shift == 0:
        return [0]
    rungs = min(rungs, shift)
    while shift % rungs:
        rungs -= 1
    return [shift * k // rungs for k in range(rungs + 1)]


def solve_profile_bvp(
    params: ModelParams,
    grid_cfg: BvpGridConfig = DEFAULT_GRID,
    newton_cfg: NewtonConfig = DEFAULT_NEWTON,
    guess: Optional[np.ndarray] = None,
) -> ProfileSolution:
    """
    Solve the delayed profile equation by Newton continuation in the delay

    Starting from the undelayed front, each rung raises the delay by a whole
    number of grid steps and warm-starts from the previous rung.

    Args:
        params: Wave speed and delay
        grid_cfg: Truncated domain and step
        newton_cfg: Newton tolerances and ladder length
        guess: Optional starting profile on the grid (skips the ladder)

    Returns:
        ProfileSolution; converged is False on non-convergence or loss of positivity

    Raises:
        ParameterDomainError: if the grid step does not divide h
    """
    grid = grid_cfg.build_grid(params)
    shift = grid.delay_shift(params.h)
    lam = _left_decay(params)
    eps0 = grid_cfg.left_amplitude

    if guess is not None:
        if guess.shape != (grid.n,):
            raise ParameterDomainError(f"Initial guess has {guess.shape} nodes, grid has {grid.n}")
        ladder = [shift]
        phi = guess.astype(float).copy()
    else:
        ladder = _rung_shifts(shift, newton_cfg.continuation_rungs)
        phi = initial_guess(grid, params, eps0)

    total = 0
    converged = False
    norm = float("inf")
    for rung in ladder:
        problem = DelayProfileProblem(grid, params.c, rung, eps0, lam)
        phi, norm, iterations, converged = damped_newton(problem, phi, newton_cfg)
        total += iterations
        logger.debug(f"Delay shift {rung}/{shift}: {iterations} iterations, residual {norm:.3e}")
        if not converged:
            break

    message = "converged"
    if not converged:
        message = f"Newton stopped at residual {norm:.3e} (delay shift {rung} of {shift})"
        logger.warning(f"c={params.c} tau={params.tau}: {message}")
    elif np.any(phi <= 0):
        converged = False
        message = f"profile lost positivity (min {phi.min():.3e})"
        logger.warning(f"c={params.c} tau={params.tau}: {message}")

    return ProfileSolution(
        grid=grid,
        phi=phi,
        dphi=np.gradient(phi, grid.step, edge_order=2),
        params=params,
        residual_inf=norm,
        converged=converged,
        left_amplitude=eps0,
        decay_rate=lam,
        iterations=total,
        message=message,
    )


def _problem_for(sol: ProfileSolution) -> DelayProfileProblem:
    shift = sol.grid.delay_shift(sol.params.h)
    return DelayProfileProblem(sol.grid, sol.params.c, shift, sol.left_amplitude, sol.decay_rate)


def _resolved_rows(problem: DelayProfileProblem) -> slice:
    """
    Interior rows whose delayed argument lies on the grid

    Raises:
        ParameterDomainError: if the grid is shorter than one delay
    """
    first = max(1, problem.shift)
    if first > problem.n - 2:
        raise ParameterDomainError(f"Grid of {problem.n} nodes does not span the delay shift {problem.shift}")
    # operator() returns rows 1..n-2
    return slice(first - 1, problem.n - 2)


def bvp_residual(sol: ProfileSolution) -> float:
    """
    Infinity norm of the discrete profile operator applied to phi

    Only interior nodes whose delayed argument lies on the grid are evaluated,
    so the value depends on phi alone: phi = 1 gives 0 and phi = 0.5 gives 0.25.
    """
    problem = _problem_for(sol)
    values = problem.operator(np.asarray(sol.phi, dtype=float))[_resolved_rows(problem)]
    return float(np.max(np.abs(values)))


def to_eps_form(sol: ProfileSolution) -> Tuple[np.ndarray, np.ndarray]:
    """
    Rescale to s = t/c, psi(s) = phi(c s)

    Returns:
        (s, psi)
    """
    return sol.grid.nodes / sol.params.c, np.asarray(sol.phi, dtype=float).copy()


def eps_form_residual(sol: ProfileSolution) -> float:
    """Infinity norm of eps psi'' - psi' + psi (1 - psi(s - tau)) over the rows of bvp_residual"""
    c = sol.params.c
    eps = sol.params.eps
    s, psi = to_eps_form(sol)
    ds = sol.grid.step / c
    problem = _problem_for(sol)
    lag = problem.delayed(psi)
    second = (psi[2:] - 2.0 * psi[1:-1] + psi[:-2]) / (ds * ds)
    first = (psi[2:] - psi[:-2]) / (2.0 * ds)
    values = eps * second - first + psi[1:-1] * (1.0 - lag[1:-1])
    return float(np.max(np.abs(values[_resolved_rows(problem)])))


def left_decay_rate(sol: ProfileSolution, window: float = 10.0) -> float:
    """Least-squares slope of ln(phi) over the leftmost window"""
    t = sol.grid.nodes
    mask = t <= sol.grid.t_min + window
    slope, _ = np.polyfit(t[mask], np.log(sol.phi[mask]), 1)
    return float(slope)


def delayed_profile(sol: ProfileSolution) -> np.ndarray:
    """phi(t - h) at every node, with the left asymptote below the grid"""
    return _problem_for(sol).delayed(np.asarray(sol.phi, dtype=float))
