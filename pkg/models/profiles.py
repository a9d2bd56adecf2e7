"""
Profile, trajectory and log-coordinate data models
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from core.constants import (
    CONTINUATION_RUNGS,
    LEFT_AMPLITUDE,
    LEFT_DOMAIN_LENGTH,
    NEWTON_MAX_HALVINGS,
    NEWTON_MAX_ITER,
    NEWTON_TOL,
    NODES_PER_DELAY,
    PDE_DOMAIN,
    PDE_DX,
    PDE_FINAL_TIME,
    PDE_MIN_DOMAIN,
    PDE_SAMPLE_INTERVAL,
    PDE_STABILITY_FACTOR,
    PDE_STEP_POSITION,
    RIGHT_DOMAIN_PER_DELAY,
    RIGHT_DOMAIN_REFERENCE_SPEED,
    ZERO_DELAY_STEP,
)
from core.exceptions import ParameterDomainError
from models.params import ModelParams


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid t_min, t_min + step, ..., t_max"""

    t_min: float
    t_max: float
    step: float

    def __post_init__(self):
        if not self.step > 0:
            raise ParameterDomainError(f"Grid step must be positive, got {self.step}")
        if self.t_max <= self.t_min:
            raise ParameterDomainError(f"Empty grid [{self.t_min}, {self.t_max}]")

    @property
    def n(self) -> int:
        """Node count"""
        return int(round((self.t_max - self.t_min) / self.step)) + 1

    @property
    def nodes(self) -> np.ndarray:
        return self.t_min + self.step * np.arange(self.n)

    def delay_shift(self, delay: float) -> int:
        """
        Number of grid steps spanning a delay

        Raises:
            ParameterDomainError: if the step does not divide the delay
        """
        shift = int(round(delay / self.step))
        if abs(shift * self.step - delay) > 1e-9 * max(1.0, delay):
            raise ParameterDomainError(f"Grid step {self.step} does not divide the delay {delay}")
        return shift


@dataclass(frozen=True)
class BvpGridConfig:
    """Truncated domain [-left_length, right_length] of the profile problem"""

    left_length: float = LEFT_DOMAIN_LENGTH
    right_length: Optional[float] = None  # None: default_right_length(params)
    step: Optional[float] = None  # None: h / NODES_PER_DELAY, or ZERO_DELAY_STEP when h = 0
    left_amplitude: float = LEFT_AMPLITUDE

    def __post_init__(self):
        if not self.left_length > 0:
            raise ParameterDomainError(f"left_length must be positive, got {self.left_length}")
        if self.right_length is not None and not self.right_length > 0:
            raise ParameterDomainError(f"right_length must be positive, got {self.right_length}")
        if self.step is not None and not self.step > 0:
            raise ParameterDomainError(f"Grid step must be positive, got {self.step}")
        if not 0 < self.left_amplitude < 0.5:
            raise ParameterDomainError(f"left_amplitude must lie in (0, 0.5), got {self.left_amplitude}")

    @staticmethod
    def default_right_length(params: ModelParams) -> float:
        """160 max(1, h) at c = 2, growing linearly with c"""
        return RIGHT_DOMAIN_PER_DELAY * max(1.0, params.h) * params.c / RIGHT_DOMAIN_REFERENCE_SPEED

    def build_grid(self, params: ModelParams) -> Grid1D:
        """
        Grid starting at -left_length whose step divides h

        Raises:
            ParameterDomainError: if the configured step does not divide h
        """
        if self.step is not None:
            step = self.step
        elif params.h > 0:
            step = params.h / NODES_PER_DELAY
        else:
            step = ZERO_DELAY_STEP
        right = self.right_length if self.right_length is not None else self.default_right_length(params)
        n_steps = int(math.ceil((self.left_length + right) / step - 1e-9))
        grid = Grid1D(t_min=-self.left_length, t_max=-self.left_length + n_steps * step, step=step)
        grid.delay_shift(params.h)
        return grid


@dataclass(frozen=True)
class NewtonConfig:
    """Damped Newton iteration and delay continuation"""

    tol: float = NEWTON_TOL
    max_iter: int = NEWTON_MAX_ITER
    max_halvings: int = NEWTON_MAX_HALVINGS
    continuation_rungs: int = CONTINUATION_RUNGS

    def __post_init__(self):
        if not self.tol > 0:
            raise ParameterDomainError(f"Newton tolerance must be positive, got {self.tol}")
        if self.max_iter < 1 or self.max_halvings < 0 or self.continuation_rungs < 1:
            raise ParameterDomainError("Newton iteration limits must be positive")


@dataclass(frozen=True)
class PdeConfig:
    """Method-of-lines front simulation on [0, domain_length]"""

    domain_length: float = PDE_DOMAIN
    dx: float = PDE_DX
    final_time: float = PDE_FINAL_TIME
    step_position: float = PDE_STEP_POSITION
    stability_factor: float = PDE_STABILITY_FACTOR
    sample_interval: float = PDE_SAMPLE_INTERVAL
    dt: Optional[float] = None  # None: tau / N with N the smallest count meeting the stability limit
    initial_level: float = 1.0  # value of the step behind step_position

    def __post_init__(self):
        if self.domain_length < PDE_MIN_DOMAIN:
            raise ParameterDomainError(f"PDE domain {self.domain_length} is shorter than {PDE_MIN_DOMAIN}")
        if not (self.dx > 0 and self.final_time > 0 and self.sample_interval > 0):
            raise ParameterDomainError("dx, final_time and sample_interval must be positive")
        if not 0 < self.step_position < self.domain_length:
            raise ParameterDomainError(f"step_position {self.step_position} lies outside the domain")
        if not 0 < self.stability_factor <= 0.5:
            raise ParameterDomainError(f"stability_factor must lie in (0, 0.5], got {self.stability_factor}")
        if self.initial_level < 0:
            raise ParameterDomainError("initial_level must be non-negative")

    @property
    def dt_limit(self) -> float:
        return self.stability_factor * self.dx * self.dx


@dataclass
class ProfileSolution:
    """Sampled wave profile phi with derivative and solver diagnostics"""

    grid: Grid1D
    phi: np.ndarray
    dphi: np.ndarray
    params: ModelParams
    residual_inf: float = float("inf")
    converged: bool = False
    left_amplitude: float = 0.0
    decay_rate: float = 1.0
    iterations: int = 0
    message: str = ""

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def is_positive(self) -> bool:
        return bool(np.all(self.phi > 0))


@dataclass
class PdeState:
    """Method-of-lines state with the delay history ring"""

    x_grid: np.ndarray
    dt: float
    history: np.ndarray  # shape (depth, n); row k holds u at time t_now - (depth - k) * dt
    t_now: float
    u: np.ndarray
    head: int = 0

    @property
    def dx(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])

    @property
    def depth(self) -> int:
        return self.history.shape[0]

    def delayed(self, lag: int = 0) -> np.ndarray:
        """Field at t_now - tau + lag * dt (lag in {0, 1})"""
        if self.depth == 0:
            return self.u
        if lag >= self.depth:
            return self.u
        return self.history[(self.head + lag) % self.depth]

    def push(self, u_new: np.ndarray, dt: float):
        """Advance by dt, rotating the current field into the ring"""
        if self.depth:
            self.history[self.head] = self.u
            self.head = (self.head + 1) % self.depth
        self.u = u_new
        self.t_now += dt


@dataclass
class PdeTrajectory:
    """Snapshots and front positions of a PDE run"""

    params: ModelParams
    x_grid: np.ndarray
    times: List[float] = field(default_factory=list)
    fronts: List[float] = field(default_factory=list)
    snapshots: List[np.ndarray] = field(default_factory=list)
    snapshot_times: List[float] = field(default_factory=list)
    final_state: Optional[PdeState] = None

    def snapshot_at(self, at_time: float) -> np.ndarray:
        """Stored snapshot closest to at_time"""
        if not self.snapshots:
            raise ValueError("Trajectory holds no snapshots")
        idx = int(np.argmin(np.abs(np.asarray(self.snapshot_times) - at_time)))
        return self.snapshots[idx]


@dataclass
class LogProfile:
    """Profile in log coordinates x = -ln(phi), y = x', g(t) = exp(-x(t-h)) - 1"""

    grid: Grid1D
    x: np.ndarray
    y: np.ndarray
    g: np.ndarray
    params: ModelParams
    phi: Optional[np.ndarray] = None

    @property
    def t(self) -> np.ndarray:
        return self.grid.nodes
