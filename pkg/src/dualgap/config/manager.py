"""Experiment configuration: dualgap.yaml loading, saving and validation."""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml

from dualgap.continuous.dynamics import DYNAMICS
from dualgap.errors import ConfigError
from dualgap.gap_tracker.schedule import SCHEDULE_KINDS
from dualgap.problems import FAMILIES
from dualgap.solvers.factory import HANDLERS

CONFIG_FILENAME = "dualgap.yaml"
CONFIG_FILENAMES = (CONFIG_FILENAME, "dualgap.yml")

VI_SOLVERS = ("vi-md", "vi-mp")
MAP_KINDS = ("euclidean", "entropy")
DEFAULT_TRACE = "trace.csv"
DEFAULT_SUMMARY = "summary.json"


def find_config_file(start_path: Union[str, Path] = ".") -> Optional[Path]:
    """Nearest dualgap.yaml (or dualgap.yml) at or above ``start_path``.

    Raises:
        ConfigError: one directory holds both spellings
    """
    start = Path(start_path).resolve()
    for directory in (start, *start.parents):
        found = [directory / name for name in CONFIG_FILENAMES if (directory / name).is_file()]
        if len(found) > 1:
            raise ConfigError(f"Both {' and '.join(str(p) for p in found)} exist; keep one")
        if found:
            return found[0]
    return None


def load_config(path: Optional[str] = None) -> Dict:
    """
    Load a raw experiment document.

    Args:
        path: Explicit config file path, or None to search upwards for dualgap.yaml

    Returns:
        Configuration dictionary

    Raises:
        ConfigError: no file found, unreadable YAML, or a non-mapping document
    """
    config_path = Path(path) if path else find_config_file()

    if not config_path or not config_path.exists():
        raise ConfigError(f"No experiment config found ({path or CONFIG_FILENAME})")

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
    except Exception as e:
        raise ConfigError(f"Failed to load config from {config_path}: {e}")
    if not isinstance(raw, dict):
        raise ConfigError(f"Config {config_path} must be a mapping, got {type(raw).__name__}")
    return raw


def save_config(config: Union[Dict, "ExperimentConfig"], path: Optional[str] = None) -> Path:
    """
    Validate and save an experiment document.

    Args:
        config: raw document or an ExperimentConfig (its raw form is written)
        path: Explicit config file path, or None to use dualgap.yaml in the current directory

    Returns:
        Path where config was saved

    Raises:
        ConfigError: the document does not validate; nothing is written
    """
    raw = config.raw if isinstance(config, ExperimentConfig) else config
    parse_config(raw)
    config_path = Path(path) if path else Path.cwd() / CONFIG_FILENAME

    try:
        config_path.parent.mkdir(parents=True, exist_ok=True)
        with open(config_path, "w", encoding="utf-8") as f:
            yaml.dump(raw, f, default_flow_style=False, sort_keys=False)
        return config_path
    except OSError as e:
        raise ConfigError(f"Failed to save config to {config_path}: {e}")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment; built by ``parse_config`` only."""

    problem: Dict[str, Any]
    solver: str
    seed: int = 0
    map: Optional[Dict[str, Any]] = None
    schedule: Optional[Dict[str, Any]] = None
    k_max: int = 100
    alpha: Dict[str, Any] = field(default_factory=dict)
    h: float = 1e-3
    T: float = 1.0
    tracker: bool = True
    strict: bool = True
    initial_point: Optional[Tuple[float, ...]] = None
    trace: str = DEFAULT_TRACE
    summary: str = DEFAULT_SUMMARY
    raw: Dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def mode(self) -> str:
        """discrete, continuous or vi."""
        if self.solver in VI_SOLVERS:
            return "vi"
        if self.solver in DYNAMICS:
            return "continuous"
        return "discrete"

    @property
    def method(self) -> str:
        """Solver tag without the vi- prefix."""
        return self.solver.removeprefix("vi-")


def _section(raw: Dict, key: str) -> Dict[str, Any]:
    value = raw.get(key) or {}
    if not isinstance(value, dict):
        raise ConfigError(f"'{key}' must be a mapping")
    return dict(value)


def _number(raw: Dict, key: str, default, kind=float, positive: bool = False):
    value = raw.get(key, default)
    try:
        value = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{key}' must be a {kind.__name__}, got {raw.get(key)!r}")
    if positive and value <= 0:
        raise ConfigError(f"'{key}' must be positive, got {value}")
    return value


def parse_config(raw: Dict) -> ExperimentConfig:
    """
    Validate a raw experiment document.

    Only the schema is checked here; whether solver, problem and map fit
    together is checked by the harness before any iteration runs.

    Raises:
        ConfigError: missing keys, unknown names or malformed values
    """
    problem = _section(raw, "problem")
    family = problem.get("family")
    if family not in FAMILIES:
        raise ConfigError(f"Unknown problem family '{family}', expected one of {sorted(FAMILIES)}")
    seed = _number(problem, "seed", 0, int)

    solver = str(raw.get("solver", "")).lower()
    known = sorted(HANDLERS) + sorted(DYNAMICS) + list(VI_SOLVERS)
    if solver not in known:
        raise ConfigError(f"Unknown solver '{raw.get('solver')}', expected one of {known}")

    map_spec = _section(raw, "map") or None
    if map_spec is not None:
        if map_spec.get("kind", "euclidean") not in MAP_KINDS:
            raise ConfigError(f"Unknown map kind '{map_spec.get('kind')}', expected one of {MAP_KINDS}")
        _number(map_spec, "scale", 1.0, positive=True)

    schedule = _section(raw, "schedule") or None
    if schedule is not None and schedule.get("kind") not in SCHEDULE_KINDS:
        raise ConfigError(f"Unknown schedule kind '{schedule.get('kind')}', expected one of {SCHEDULE_KINDS}")

    k_max = _number(raw, "k_max", 100, int)
    if k_max < 0:
        raise ConfigError(f"'k_max' must be nonnegative, got {k_max}")

    tracker = raw.get("tracker", {})
    if isinstance(tracker, bool):
        tracker = {"enabled": tracker}
    if not isinstance(tracker, dict):
        raise ConfigError("'tracker' must be a mapping or a boolean")

    initial_point = raw.get("initial_point")
    if initial_point is not None:
        try:
            initial_point = tuple(float(v) for v in initial_point)
        except (TypeError, ValueError):
            raise ConfigError(f"'initial_point' must be a list of numbers, got {initial_point!r}")

    output = _section(raw, "output")
    return ExperimentConfig(
        problem=problem,
        solver=solver,
        seed=seed,
        map=map_spec,
        schedule=schedule,
        k_max=k_max,
        alpha=_section(raw, "alpha"),
        h=_number(raw, "h", 1e-3, positive=True),
        T=_number(raw, "T", 1.0, positive=True),
        tracker=bool(tracker.get("enabled", True)),
        strict=bool(tracker.get("strict", True)),
        initial_point=initial_point,
        trace=str(output.get("trace", DEFAULT_TRACE)),
        summary=str(output.get("summary", DEFAULT_SUMMARY)),
        raw=dict(raw),
    )
