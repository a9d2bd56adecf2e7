"""
Command dispatch and artifact emission

LabRunner executes one RunConfig: it dispatches the command, fans parameter
sweeps out over worker threads, writes CSV/SVG artifacts and a run summary,
and maps the outcome to the process exit code.
"""

import asyncio
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, List, Sequence

import numpy as np

from core.bounds import (
    eval_A_minus,
    eval_A_plus,
    eval_B,
    eval_D,
    eval_F,
    eval_R,
    eval_r,
    eval_rho,
)
from core.bvp_solver import eps_form_residual, left_decay_rate, solve_profile_bvp
from core.config import get_config
from core.constants import (
    BISECT_TAU_HIGH,
    BISECT_TAU_LOW,
    BISECT_WIDTH,
    CROSSING_MATCH_TOL,
    MIN_WAVE_SPEED,
    PROFILE_MATCH_TOL,
    TAU_LOWER,
)
from core.exceptions import (
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    EXIT_VERIFICATION_FAILED,
    ConvergenceError,
    DomainError,
    LabError,
    PoleError,
)
from core.oscillation import certify_profile, to_log_coordinates, trivial_certificate
from core.pde_simulator import extract_comoving_profile, fit_front_speed, profile_distance, simulate_pde_front
from core.run_config import RunConfig, describe
from core.spectral import boundary_curve, crossing_by_bisection
from core.verification import verify_bounds
from models.certification import CertificationReport
from models.params import ModelParams, QuadratureConfig
from utils.formatters import CsvFormatter, ReportFormatter, format_duration
from utils.helpers import AsyncHelpers
from utils.plotting import plot_points, plot_polyline

BOUNDS_HEADER = ["x", "rho", "r", "A_minus", "A_plus", "B", "R", "D", "F"]
PROFILE_HEADER = ["t", "phi", "dphi", "x_log", "y"]
OSCILLATION_HEADER = ["j", "Q", "T", "V"]
CERTIFICATION_HEADER = ["check", "interval", "lhs", "rhs", "margin", "pass"]
BOUNDARY_HEADER = ["c", "tau_star", "omega"]


@dataclass
class CommandOutcome:
    """Verdict, exit code and summary lines of one command"""

    exit_code: int = EXIT_OK
    verdict: str = "PASS"
    lines: List[str] = field(default_factory=list)
    artifacts: List[Path] = field(default_factory=list)

    def fail(self, exit_code: int = EXIT_VERIFICATION_FAILED, verdict: str = "FAIL"):
        self.exit_code = max(self.exit_code, exit_code)
        self.verdict = verdict


def pair_label(params: ModelParams) -> str:
    return f"c={params.c:g} tau={params.tau:g}"


def pair_tag(params: ModelParams) -> str:
    return f"c{params.c:g}_tau{params.tau:g}"


def _or_nan(fn: Callable[..., float], *args) -> float:
    """Value of fn, or nan where the function is undefined"""
    try:
        return float(fn(*args))
    except (DomainError, PoleError):
        return math.nan


def bounds_row(x: float, params: ModelParams, cfg: QuadratureConfig) -> list:
    """One row of the bounds table"""
    return [
        x,
        eval_rho(x, params).value,
        _or_nan(eval_r, x, params),
        _or_nan(eval_A_minus, x, params, cfg),
        _or_nan(eval_A_plus, x, params),
        _or_nan(eval_B, x, params),
        _or_nan(eval_R, x, params),
        _or_nan(eval_D, x, params, cfg),
        _or_nan(eval_F, x, params, cfg),
    ]


class LabRunner:
    """Runs one configured command"""

    def __init__(self):
        self.config = get_config()
        self.logger = self.config.logger

    def run(self, run_config: RunConfig) -> int:
        """
        Execute a command and write its artifacts

        Args:
            run_config: Parsed run configuration

        Returns:
            Process exit code
        """
        self.config.log_config()
        started = time.monotonic()
        try:
            outcome = asyncio.run(self.execute(run_config))
        except LabError as e:
            self.logger.error(f"{type(e).__name__}: {e.detail}")
            outcome = CommandOutcome(exit_code=e.exit_code, verdict="ERROR", lines=[f"error = {e.detail}"])
        except Exception as e:
            self.logger.error(f"Unexpected error: {e}", exc_info=True)
            outcome = CommandOutcome(
                exit_code=EXIT_VERIFICATION_FAILED, verdict="ERROR", lines=[f"error = {type(e).__name__}: {e}"]
            )

        self.write_summary(run_config, outcome)
        self.logger.info(
            f"{run_config.command}: {outcome.verdict} (exit {outcome.exit_code}) "
            f"in {format_duration(time.monotonic() - started)}"
        )
        return outcome.exit_code

    async def execute(self, run_config: RunConfig) -> CommandOutcome:
        """Dispatch to the command handler"""
        handlers = {
            "bounds": self.run_bounds,
            "verify": self.run_verify,
            "wave": self.run_wave,
            "simulate": self.run_simulate,
            "certify": self.run_certify,
            "boundary": self.run_boundary,
        }
        self.logger.info(f"Running {run_config.command} for {pair_label(run_config.params)}")
        return await handlers[run_config.command](run_config)

    async def sweep(self, func: Callable, items: Sequence) -> list:
        """Map func over items on the worker pool, results in input order"""
        jobs = [lambda item=item: func(item) for item in items]
        return await AsyncHelpers.gather_with_limit(jobs, self.config.workers.threads)

    def write_summary(self, run_config: RunConfig, outcome: CommandOutcome):
        """summary.txt with settings, verdict and exit code"""
        lines = describe(run_config)
        lines += [f"verdict = {outcome.verdict}", f"exit_code = {outcome.exit_code}"]
        lines += outcome.lines
        path = Path(run_config.output_dir) / "summary.txt"
        try:
            path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        except OSError as e:
            self.logger.error(f"Cannot write {path}: {e}")

    def _csv(self, outcome: CommandOutcome, path: Path, header: Sequence[str], rows: Iterable) -> Path:
        written = CsvFormatter.write(path, header, rows)
        outcome.artifacts.append(written)
        self.logger.debug(f"Wrote {written}")
        return written

    # =========================================================================
    # Commands
    # =========================================================================

    async def run_bounds(self, rc: RunConfig) -> CommandOutcome:
        """Tabulate the bounding functions over the x-grid"""
        params = rc.params
        params.require_bounding_range()
        outcome = CommandOutcome()
        xs = np.linspace(rc.sweep.x_min, rc.sweep.x_max, rc.sweep.x_points)
        rows = [bounds_row(float(x), params, rc.quadrature) for x in xs]
        self._csv(outcome, rc.output_dir / "bounds.csv", BOUNDS_HEADER, rows)

        if rc.emit_svg:
            table = np.asarray(rows, dtype=float)
            series = {name: table[:, k] for k, name in enumerate(BOUNDS_HEADER) if k > 0}
            outcome.artifacts.append(
                plot_polyline(rc.output_dir / "bounds.svg", table[:, 0], series, "x", "value", pair_label(params))
            )
        outcome.lines.append(f"points = {len(rows)}")
        return outcome

    async def run_verify(self, rc: RunConfig) -> CommandOutcome:
        """Bounding-function invariant suite over the (c, tau, x) grid"""
        pairs = rc.parameter_pairs()
        for params in pairs:
            params.require_bounding_range()
        xs = np.linspace(rc.sweep.x_min, rc.sweep.x_max, rc.sweep.x_points)

        reports = await self.sweep(
            lambda p: verify_bounds(p, xs, rc.sweep.tol, rc.quadrature, prefix=f"{pair_label(p)}:"), pairs
        )
        merged = CertificationReport()
        for report in reports:
            merged.extend(report)

        outcome = CommandOutcome()
        self._csv(
            outcome, rc.output_dir / "verification.csv", CERTIFICATION_HEADER, CsvFormatter.certification_rows(merged)
        )
        outcome.lines += [f"pairs = {len(pairs)}", f"checks = {len(merged.checks)}", f"failures = {len(merged.failures)}"]
        for check in merged.failures:
            outcome.lines.append(f"failed {check.name} {check.interval} margin {check.margin:.3e}")
        if merged.failures:
            outcome.fail()
        return outcome

    async def run_wave(self, rc: RunConfig) -> CommandOutcome:
        """Boundary-value profile"""
        outcome = CommandOutcome()
        sol = solve_profile_bvp(rc.params, rc.grid, rc.newton)
        t = sol.grid.nodes
        if sol.is_positive:
            lp = to_log_coordinates(sol)
            x_log, y = lp.x, lp.y
        else:
            x_log = y = np.full(t.shape, math.nan)
        self._csv(outcome, rc.output_dir / "profile.csv", PROFILE_HEADER, zip(t, sol.phi, sol.dphi, x_log, y))
        if rc.emit_svg:
            outcome.artifacts.append(
                plot_polyline(rc.output_dir / "profile.svg", t, {"phi": sol.phi}, "t", "phi", pair_label(rc.params))
            )

        outcome.lines += [
            f"grid = [{sol.grid.t_min:g}, {sol.grid.t_max:g}] step {sol.grid.step:.6g} ({sol.grid.n} nodes)",
            f"newton_iterations = {sol.iterations}",
            f"residual_inf = {sol.residual_inf:.3e}",
            f"eps_form_residual = {eps_form_residual(sol):.3e}",
            f"solver = {sol.message}",
        ]
        if sol.is_positive:
            outcome.lines.append(
                f"left_decay_rate = {left_decay_rate(sol):.6f} (expected {sol.decay_rate:.6f})"
            )
        if not sol.converged:
            outcome.fail(EXIT_NOT_CONVERGED, "NOT CONVERGED")
        return outcome

    async def run_simulate(self, rc: RunConfig) -> CommandOutcome:
        """PDE front from step data with speed and co-moving profile"""
        outcome = CommandOutcome()
        trajectory = simulate_pde_front(rc.params, rc.pde)
        speed, rms = fit_front_speed(trajectory.times, trajectory.fronts)
        self._csv(outcome, rc.output_dir / "front.csv", ["t", "front"], zip(trajectory.times, trajectory.fronts))

        at_time = trajectory.times[-1] if rc.profile_time is None else rc.profile_time
        profile = extract_comoving_profile(trajectory, at_time)
        xi = profile.grid.nodes
        self._csv(outcome, rc.output_dir / "comoving.csv", ["xi", "u"], zip(xi, profile.phi))

        if rc.emit_svg:
            outcome.artifacts.append(
                plot_polyline(
                    rc.output_dir / "front.svg",
                    trajectory.times,
                    {"front": trajectory.fronts},
                    "t",
                    "front position",
                    f"tau={rc.params.tau:g}",
                )
            )
            outcome.artifacts.append(
                plot_polyline(rc.output_dir / "comoving.svg", xi, {"u": profile.phi}, "xi", "u", profile.message)
            )

        state = trajectory.final_state
        outcome.lines += [
            f"dt = {state.dt:.6g} (history depth {state.depth})",
            f"front_speed = {speed:.6f} (fit rms {rms:.3e})",
            f"profile = {profile.message}",
        ]

        if rc.compare_profiles:
            if rc.params.c != MIN_WAVE_SPEED:
                self.logger.warning(
                    f"Step data select the minimal speed {MIN_WAVE_SPEED:g}; comparing against c={rc.params.c:g}"
                )
            sol = solve_profile_bvp(rc.params, rc.grid, rc.newton)
            if not sol.converged:
                raise ConvergenceError(f"Boundary-value profile for comparison: {sol.message}")
            distance = profile_distance(sol, profile)
            outcome.lines.append(f"profile_distance = {distance:.3e} (limit {PROFILE_MATCH_TOL:g})")
            if distance > PROFILE_MATCH_TOL:
                outcome.fail()
        return outcome

    def certify_pair(self, rc: RunConfig, params: ModelParams) -> CertificationReport:
        """Solve and certify one (c, tau) pair"""
        if params.tau <= TAU_LOWER:
            return trivial_certificate(params)
        sol = solve_profile_bvp(params, rc.grid, rc.newton)
        if not sol.converged:
            raise ConvergenceError(f"{pair_label(params)}: {sol.message}")
        return certify_profile(sol, rc.certify, rc.quadrature)

    async def run_certify(self, rc: RunConfig) -> CommandOutcome:
        """Full oscillation certificate for every configured pair"""
        pairs = rc.parameter_pairs()
        for params in pairs:
            if params.tau > TAU_LOWER:
                params.require_bounding_range()
        reports = await self.sweep(lambda p: self.certify_pair(rc, p), pairs)

        outcome = CommandOutcome()
        single = len(pairs) == 1
        rows, texts = [], []
        for params, report in zip(pairs, reports):
            prefix = "" if single else f"{pair_label(params)}: "
            rows += CsvFormatter.certification_rows(report, prefix)
            texts.append(ReportFormatter.format_report(report, pair_label(params)))

            stem = "oscillation" if single else f"oscillation_{pair_tag(params)}"
            record = report.record
            self._csv(
                outcome,
                rc.output_dir / f"{stem}.csv",
                OSCILLATION_HEADER,
                CsvFormatter.oscillation_rows(record) if record is not None else [],
            )
            if rc.emit_svg and record is not None and not record.is_empty:
                outcome.artifacts.append(
                    plot_points(rc.output_dir / f"{stem}.svg", record.T, record.V, "T_j", "V_j", pair_label(params))
                )

            verdict = "PASS" if report.overall else "FAIL"
            limits = ""
            if report.m_star is not None and report.M_star is not None:
                limits = f" m*={report.m_star:.3e} M*={report.M_star:.3e}"
            outcome.lines.append(f"{pair_label(params)}: {verdict}{' (trivial)' if report.trivial else ''}{limits}")
            if not report.overall:
                outcome.fail()

        self._csv(outcome, rc.output_dir / "certification.csv", CERTIFICATION_HEADER, rows)
        report_path = rc.output_dir / "report.txt"
        report_path.write_text("\n".join(texts), encoding="utf-8")
        outcome.artifacts.append(report_path)
        return outcome

    async def run_boundary(self, rc: RunConfig) -> CommandOutcome:
        """Crossing curve tau*(c), optionally cross-checked by root-count bisection"""
        outcome = CommandOutcome()
        speeds = list(rc.speeds())
        points = boundary_curve(speeds)
        self._csv(
            outcome, rc.output_dir / "boundary.csv", BOUNDARY_HEADER, [[p.c, p.tau_star, p.omega] for p in points]
        )
        if rc.emit_svg and len(points) > 1:
            outcome.artifacts.append(
                plot_polyline(
                    rc.output_dir / "boundary.svg",
                    [p.c for p in points],
                    {"tau*": [p.tau_star for p in points]},
                    "c",
                    "tau*",
                    "reconstructed crossing curve",
                )
            )
        outcome.lines.append("curve = reconstructed from lambda^2 - c lambda - exp(-lambda c tau) = 0")

        if rc.bisect:
            bisected = await self.sweep(
                lambda c: crossing_by_bisection(c, BISECT_TAU_LOW, BISECT_TAU_HIGH, BISECT_WIDTH), speeds
            )
            rows = []
            for point, tau_bisect in zip(points, bisected):
                gap = abs(tau_bisect - point.tau_star)
                rows.append([point.c, point.tau_star, tau_bisect, gap])
                if gap > CROSSING_MATCH_TOL:
                    outcome.lines.append(f"c={point.c:g}: bisection {tau_bisect:.6f} vs closed form {point.tau_star:.6f}")
                    outcome.fail()
            self._csv(
                outcome,
                rc.output_dir / "boundary_bisection.csv",
                ["c", "tau_star", "tau_bisect", "difference"],
                rows,
            )
        return outcome
