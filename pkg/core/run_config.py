"""
Run configuration: plain `key = value` files with `#` comments

Unknown keys and malformed lines are errors that name the offending line.
Command-line overrides use the same syntax and are applied after the file.
"""

import logging
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

from core.config import get_config
from core.constants import BOUNDS_CHECK_TOL, BOUNDS_X_MAX, BOUNDS_X_MIN, BOUNDS_X_POINTS
from core.exceptions import ConfigParseError, LabError, ParameterDomainError
from models.certification import CertifyConfig
from models.params import ModelParams, QuadratureConfig
from models.profiles import BvpGridConfig, NewtonConfig, PdeConfig
from utils.helpers import ValidationHelpers

logger = logging.getLogger(__name__)

COMMANDS = ("bounds", "verify", "wave", "simulate", "certify", "boundary")


@dataclass(frozen=True)
class SweepConfig:
    """Parameter and abscissa grids of sweeping commands"""

    c_values: Tuple[float, ...] = ()
    tau_values: Tuple[float, ...] = ()
    x_min: float = BOUNDS_X_MIN
    x_max: float = BOUNDS_X_MAX
    x_points: int = BOUNDS_X_POINTS
    tol: float = BOUNDS_CHECK_TOL

    def __post_init__(self):
        if self.x_max <= self.x_min:
            raise ParameterDomainError(f"Empty abscissa range [{self.x_min}, {self.x_max}]")
        if self.x_points < 2:
            raise ParameterDomainError(f"x_points must be at least 2, got {self.x_points}")
        if self.tol < 0:
            raise ParameterDomainError(f"Bounds tolerance must be non-negative, got {self.tol}")


@dataclass
class RunConfig:
    """Everything one invocation needs"""

    command: str
    params: ModelParams
    output_dir: Path
    emit_svg: bool = True
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    grid: BvpGridConfig = field(default_factory=BvpGridConfig)
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    pde: PdeConfig = field(default_factory=PdeConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    certify: CertifyConfig = field(default_factory=CertifyConfig)
    profile_time: Optional[float] = None
    bisect: bool = False
    compare_profiles: bool = False

    def parameter_pairs(self) -> List[ModelParams]:
        """(c, tau) pairs of a sweep, or the single configured pair"""
        c_values = self.sweep.c_values or (self.params.c,)
        tau_values = self.sweep.tau_values or (self.params.tau,)
        return [ModelParams(c, tau) for c in c_values for tau in tau_values]

    def speeds(self) -> Tuple[float, ...]:
        return self.sweep.c_values or (self.params.c,)


# =============================================================================
# Value converters
# =============================================================================


def _to_float(raw: str) -> float:
    if not ValidationHelpers.is_finite_number(raw):
        raise ValueError(f"not a finite number: {raw!r}")
    return float(raw)


def _to_int(raw: str) -> int:
    return int(raw)


def _to_bool(raw: str) -> bool:
    value = raw.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _to_floats(raw: str) -> Tuple[float, ...]:
    items = [item.strip() for item in raw.split(",") if item.strip()]
    if not items:
        raise ValueError("empty list")
    return tuple(_to_float(item) for item in items)


def _to_command(raw: str) -> str:
    if raw not in COMMANDS:
        raise ValueError(f"unknown command {raw!r} (expected one of {', '.join(COMMANDS)})")
    return raw


def _to_optional_float(raw: str) -> Optional[float]:
    return None if raw.lower() in ("none", "auto", "") else _to_float(raw)


# key -> (section, field, converter); section None means a top-level RunConfig field
KEYS: Dict[str, Tuple[Optional[str], str, Callable[[str], Any]]] = {
    "command": (None, "command", _to_command),
    "c": (None, "c", _to_float),
    "tau": (None, "tau", _to_float),
    "output_dir": (None, "output_dir", Path),
    "emit_svg": (None, "emit_svg", _to_bool),
    "profile_time": (None, "profile_time", _to_optional_float),
    "bisect": (None, "bisect", _to_bool),
    "compare_profiles": (None, "compare_profiles", _to_bool),
    # quadrature
    "quad_abs_tol": ("quadrature", "abs_tol", _to_float),
    "quad_rel_tol": ("quadrature", "rel_tol", _to_float),
    "quad_max_subdivisions": ("quadrature", "max_subdivisions", _to_int),
    # profile grid
    "left_length": ("grid", "left_length", _to_float),
    "right_length": ("grid", "right_length", _to_optional_float),
    "grid_step": ("grid", "step", _to_optional_float),
    "left_amplitude": ("grid", "left_amplitude", _to_float),
    # newton
    "newton_tol": ("newton", "tol", _to_float),
    "newton_max_iter": ("newton", "max_iter", _to_int),
    "newton_max_halvings": ("newton", "max_halvings", _to_int),
    "continuation_rungs": ("newton", "continuation_rungs", _to_int),
    # pde
    "pde_domain": ("pde", "domain_length", _to_float),
    "pde_dx": ("pde", "dx", _to_float),
    "pde_final_time": ("pde", "final_time", _to_float),
    "pde_step_position": ("pde", "step_position", _to_float),
    "pde_stability_factor": ("pde", "stability_factor", _to_float),
    "pde_sample_interval": ("pde", "sample_interval", _to_float),
    "pde_dt": ("pde", "dt", _to_optional_float),
    "pde_initial_level": ("pde", "initial_level", _to_float),
    # sweeps
    "c_values": ("sweep", "c_values", _to_floats),
    "tau_values": ("sweep", "tau_values", _to_floats),
    "x_min": ("sweep", "x_min", _to_float),
    "x_max": ("sweep", "x_max", _to_float),
    "x_points": ("sweep", "x_points", _to_int),
    "bounds_tol": ("sweep", "tol", _to_float),
    # certification
    "check_tol": ("certify", "tol", _to_float),
    "noise_floor": ("certify", "noise_floor", _to_float),
    "f_steps": ("certify", "f_steps", _to_int),
    "limit_threshold": ("certify", "limit_threshold", _to_float),
    "min_tail_extrema": ("certify", "min_tail_extrema", _to_int),
    "boundary_layer": ("certify", "boundary_layer", _to_float),
}

SECTION_TYPES = {
    "quadrature": QuadratureConfig,
    "grid": BvpGridConfig,
    "newton": NewtonConfig,
    "pde": PdeConfig,
    "sweep": SweepConfig,
    "certify": CertifyConfig,
}


# =============================================================================
# Parsing
# =============================================================================


def parse_assignment(line: str, line_number: Optional[int]) -> Optional[Tuple[str, str]]:
    """
    Split one line into (key, raw value)

    Returns:
        None for blank and comment lines

    Raises:
        ConfigParseError: for lines without '=' or with an unknown key
    """
    text = line.split("#", 1)[0].strip()
    if not text:
        return None
    if "=" not in text:
        raise ConfigParseError(f"expected 'key = value', got {text!r}", line_number)
    key, raw = (part.strip() for part in text.split("=", 1))
    if not key:
        raise ConfigParseError("missing key", line_number)
    if key not in KEYS:
        raise ConfigParseError(f"unknown key {key!r}", line_number)
    return key, raw


def parse_lines(lines: Iterable[str], first_line: int = 1) -> Dict[str, Tuple[str, Optional[int]]]:
    """Collect key -> (raw value, line number); later lines win"""
    entries: Dict[str, Tuple[str, int]] = {}
    for offset, line in enumerate(lines):
        parsed = parse_assignment(line, first_line + offset)
        if parsed is not None:
            key, raw = parsed
            entries[key] = (raw, first_line + offset)
    return entries


def _convert(entries: Dict[str, Tuple[str, int]]) -> Dict[str, Tuple[Any, int]]:
    converted = {}
    for key, (raw, line_number) in entries.items():
        converter = KEYS[key][2]
        try:
            converted[key] = (converter(raw), line_number)
        except ValueError as e:
            raise ConfigParseError(f"invalid value for {key!r}: {e}", line_number) from e
    return converted


def build_run_config(entries: Dict[str, Tuple[str, int]]) -> RunConfig:
    """
    Assemble a RunConfig from parsed entries

    Raises:
        ConfigParseError: for missing or malformed values
        ParameterDomainError: for values outside their admissible range
    """
    values = _convert(entries)
    for required in ("command", "c", "tau"):
        if required not in values:
            raise ConfigParseError(f"missing required key {required!r}")

    sections: Dict[str, Dict[str, Any]] = {name: {} for name in SECTION_TYPES}
    top: Dict[str, Any] = {}
    for key, (value, _) in values.items():
        section, name, _ = KEYS[key]
        if section is None:
            top[name] = value
        else:
            sections[section][name] = value

    built = {}
    for name, kwargs in sections.items():
        try:
            built[name] = SECTION_TYPES[name](**kwargs)
        except LabError as e:
            line_numbers = sorted(line for key, (_, line) in values.items() if KEYS[key][0] == name and line)
            raise ParameterDomainError(f"{e.detail} (lines {', '.join(map(str, line_numbers))})") from e

    output_dir = top.get("output_dir") or get_config().output.directory
    valid, message = ValidationHelpers.validate_output_dir(output_dir)
    if not valid:
        raise ParameterDomainError(message)

    return RunConfig(
        command=top["command"],
        params=ModelParams(c=top["c"], tau=top["tau"]),
        output_dir=Path(output_dir),
        emit_svg=top.get("emit_svg", True),
        profile_time=top.get("profile_time"),
        bisect=top.get("bisect", False),
        compare_profiles=top.get("compare_profiles", False),
        **built,
    )


def load_config(path: Union[str, Path], overrides: Sequence[str] = ()) -> RunConfig:
    """
    Read a run configuration file

    Args:
        path: Config file
        overrides: Extra `key=value` assignments applied after the file

    Returns:
        Validated RunConfig
    """
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise ConfigParseError(f"cannot read {path}: {e}") from e

    entries = parse_lines(lines)
    for index, assignment in enumerate(overrides, start=1):
        try:
            parsed = parse_assignment(assignment, None)
        except ConfigParseError as e:
            raise ConfigParseError(f"override {index}: {e.detail}") from e
        if parsed is None:
            continue
        key, raw = parsed
        entries[key] = (raw, None)
        logger.debug(f"Override {key} = {raw}")
    return build_run_config(entries)


def describe(config: RunConfig) -> List[str]:
    """`key = value` lines of the non-default settings, for the run summary"""
    lines = [f"command = {config.command}", f"c = {config.params.c!r}", f"tau = {config.params.tau!r}"]
    for name in ("emit_svg", "profile_time", "bisect", "compare_profiles"):
        value = getattr(config, name)
        if value != RunConfig.__dataclass_fields__[name].default:
            lines.append(f"{name} = {value!r}")
    for name, section_type in SECTION_TYPES.items():
        section = getattr(config, name)
        default = section_type()
        for item in fields(section):
            value = getattr(section, item.name)
            if value != getattr(default, item.name):
                lines.append(f"{name}.{item.name} = {value!r}")
    return lines
