"""
Configuration management for icbargain.

Handles loading of the optional user config and of scenario files, both TOML.
"""

import math
import os
import re
import tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from icbargain.bargaining import BreakdownProbs, Player, Scheme
from icbargain.coordination import Scenario, Solution
from icbargain.errors import BargainError, ScenarioError
from icbargain.rate_region import ChannelParams, mac_params


@dataclass
class OutputConfig:
    """Where and what to write."""
    dir: Path = Path("out")
    svg: bool = True


@dataclass
class SimConfig:
    """Simulation and verification settings."""
    trials: int = 10_000
    seed: int = 0
    grid_size: int = 201
    max_rounds: int = 10_000


@dataclass
class SweepConfig:
    """Breakdown-probability grid of a sweep."""
    variable: str = "p1"
    start: float = 0.05  # "from" in TOML
    stop: float = 0.95  # "to" in TOML
    step: float = 0.05
    joint: bool = False  # p2 follows p1

    def grid(self) -> list[float]:
        """Grid values from start to stop inclusive."""
        if self.step <= 0:
            raise ScenarioError("step must be positive", key="step")
        if self.stop < self.start:
            raise ScenarioError("'to' must not be below 'from'", key="to")
        count = int(round((self.stop - self.start) / self.step)) + 1
        return [round(self.start + k * self.step, 12) for k in range(count)]


@dataclass
class Config:
    """User defaults."""
    output: OutputConfig = field(default_factory=OutputConfig)
    sim: SimConfig = field(default_factory=SimConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)


@dataclass
class ScenarioFile:
    """
    One bargaining scenario.

    Channel fields may stay None in the file when given on the command line;
    validate() checks the merged result.
    """
    a: float | None = None
    b: float | None = None
    snr1_db: float | None = None
    snr2_db: float | None = None
    scheme: str = "hk"
    p1: float = 0.5
    p2: float = 0.5
    first_mover: str = "u1"
    solution: str = "both"
    sweep: SweepConfig = field(default_factory=SweepConfig)
    sim: SimConfig = field(default_factory=SimConfig)

    def validate(self) -> None:
        """Check the merged scenario; raises ScenarioError naming the key."""
        if self.scheme not in tuple(Scheme):
            raise ScenarioError(f"unknown scheme {self.scheme!r} (expected hk, tdm or mac)", key="scheme")
        required = ("snr1_db", "snr2_db") if self.scheme == Scheme.MAC else ("a", "b", "snr1_db", "snr2_db")
        for key in required:
            value = getattr(self, key)
            if value is None:
                raise ScenarioError("value is required", key=key)
            if not math.isfinite(value):
                raise ScenarioError(f"value must be finite, got {value}", key=key)
        for key in ("a", "b"):
            value = getattr(self, key)
            if key in required and value <= 0:
                raise ScenarioError(f"gain must be positive, got {value}", key=key)
        for key in ("p1", "p2"):
            value = getattr(self, key)
            if not 0.0 < value < 1.0:
                raise ScenarioError(f"probability must be in (0, 1), got {value}", key=key)
        if self.first_mover not in tuple(Player):
            raise ScenarioError(f"unknown first mover {self.first_mover!r} (expected u1 or u2)", key="first_mover")
        if self.solution not in tuple(Solution):
            raise ScenarioError(f"unknown solution {self.solution!r} (expected spe, nbs or both)", key="solution")
        if self.sweep.variable != "p1":
            raise ScenarioError(f"only p1 sweeps are supported, got {self.sweep.variable!r}", key="variable")

    @property
    def P1(self) -> float:
        return db_to_linear(self.snr1_db)

    @property
    def P2(self) -> float:
        return db_to_linear(self.snr2_db)

    def channel_params(self) -> ChannelParams:
        """Linear channel parameters; the MAC has unit cross gains."""
        try:
            if self.scheme == Scheme.MAC:
                return mac_params(self.P1, self.P2)
            return ChannelParams(a=self.a, b=self.b, P1=self.P1, P2=self.P2)
        except BargainError as e:
            raise ScenarioError(str(e)) from e

    def breakdown_probs(self) -> BreakdownProbs:
        return BreakdownProbs(self.p1, self.p2)

    def to_scenario(self) -> Scenario:
        """Validate and convert to a coordination Scenario."""
        self.validate()
        return Scenario(
            params=self.channel_params(),
            scheme=Scheme(self.scheme),
            probs=self.breakdown_probs(),
            first_mover=Player(self.first_mover),
            solution=Solution(self.solution),
        )


def db_to_linear(db: float) -> float:
    """10^(dB/10); 20 dB is exactly 100."""
    return 10.0 ** (db / 10.0)


def get_config_path() -> Path:
    """Get the default user config path (XDG compliant)."""
    xdg_config = os.environ.get("XDG_CONFIG_HOME")
    if xdg_config:
        config_dir = Path(xdg_config)
    else:
        config_dir = Path.home() / ".config"
    return config_dir / "icbargain" / "config.toml"


def _read_toml(path: Path) -> tuple[dict[str, Any], str]:
    text = path.read_text(encoding="utf-8")
    try:
        return tomllib.loads(text), text
    except tomllib.TOMLDecodeError as e:
        line = getattr(e, "lineno", None)
        if line is None:
            match = re.search(r"line (\d+)", str(e))
            line = int(match.group(1)) if match else None
        raise ScenarioError(f"{path}: invalid TOML: {e}", line=line) from e


def _line_of(text: str, key: str) -> int | None:
    """Line number of the first 'key =' assignment in the text."""
    pattern = re.compile(rf"^\s*\"?{re.escape(key)}\"?\s*=")
    for number, line in enumerate(text.splitlines(), start=1):
        if pattern.match(line):
            return number
    return None


class _Section:
    """Typed access to one TOML table with key diagnostics."""

    def __init__(self, data: dict[str, Any], text: str, allowed: set[str], name: str = ""):
        self.data = data
        self.text = text
        self.name = name
        for key in data:
            if key not in allowed:
                where = f"[{name}] " if name else ""
                raise ScenarioError(f"unknown key in {where}table", key=key, line=_line_of(text, key))

    def _fail(self, key: str, message: str) -> ScenarioError:
        return ScenarioError(message, key=key, line=_line_of(self.text, key))

    def number(self, key: str) -> float:
        value = self.data[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise self._fail(key, f"expected a number, got {value!r}")
        if not math.isfinite(value):
            raise self._fail(key, f"expected a finite number, got {value!r}")
        return float(value)

    def integer(self, key: str) -> int:
        value = self.data[key]
        if isinstance(value, bool) or not isinstance(value, int):
            raise self._fail(key, f"expected an integer, got {value!r}")
        return value

    def string(self, key: str) -> str:
        value = self.data[key]
        if not isinstance(value, str):
            raise self._fail(key, f"expected a string, got {value!r}")
        return value

    def boolean(self, key: str) -> bool:
        value = self.data[key]
        if not isinstance(value, bool):
            raise self._fail(key, f"expected true or false, got {value!r}")
        return value

    def table(self, key: str) -> dict[str, Any]:
        value = self.data[key]
        if not isinstance(value, dict):
            raise self._fail(key, "expected a table")
        return value


def _load_sim(data: dict[str, Any], text: str, sim: SimConfig) -> None:
    section = _Section(data, text, {"trials", "seed", "grid_size", "max_rounds"}, "sim")
    if "trials" in data:
        sim.trials = section.integer("trials")
    if "seed" in data:
        sim.seed = section.integer("seed")
    if "grid_size" in data:
        sim.grid_size = section.integer("grid_size")
    if "max_rounds" in data:
        sim.max_rounds = section.integer("max_rounds")


def _load_sweep(data: dict[str, Any], text: str, sweep: SweepConfig) -> None:
    section = _Section(data, text, {"variable", "from", "to", "step", "joint"}, "sweep")
    if "variable" in data:
        sweep.variable = section.string("variable")
    if "from" in data:
        sweep.start = section.number("from")
    if "to" in data:
        sweep.stop = section.number("to")
    if "step" in data:
        sweep.step = section.number("step")
    if "joint" in data:
        sweep.joint = section.boolean("joint")


def load_config(config_path: Path | None = None) -> Config:
    """
    Load user defaults from TOML.

    A missing file is not an error; built-in defaults apply.
    """
    if config_path is None:
        config_path = get_config_path()

    config = Config()
    if not config_path.exists():
        return config

    data, text = _read_toml(config_path)
    top = _Section(data, text, {"output", "sim", "sweep"})

    # Load output section
    if "output" in data:
        output_data = top.table("output")
        output = _Section(output_data, text, {"dir", "svg"}, "output")
        if "dir" in output_data:
            config.output.dir = Path(output.string("dir"))
        if "svg" in output_data:
            config.output.svg = output.boolean("svg")

    if "sim" in data:
        _load_sim(top.table("sim"), text, config.sim)
    if "sweep" in data:
        _load_sweep(top.table("sweep"), text, config.sweep)

    return config


def new_scenario(config: Config | None = None) -> ScenarioFile:
    """Empty scenario seeded with the user's sim and sweep defaults."""
    config = config or Config()
    return ScenarioFile(
        sweep=SweepConfig(**vars(config.sweep)),
        sim=SimConfig(**vars(config.sim)),
    )


def load_scenario(path: Path, config: Config | None = None) -> ScenarioFile:
    """
    Load a scenario file.

    Args:
        path: Scenario TOML file
        config: User defaults for the [sweep] and [sim] tables

    Returns:
        ScenarioFile (not yet validated; flags may still override it)

    Raises:
        ScenarioError: Bad syntax, unknown keys or wrong value types
    """
    if not path.exists():
        raise ScenarioError(f"scenario file not found: {path}")

    data, text = _read_toml(path)
    scenario = new_scenario(config)
    top = _Section(data, text, {
        "a", "b", "snr1_db", "snr2_db", "scheme", "p1", "p2",
        "first_mover", "solution", "sweep", "sim",
    })

    for key in ("a", "b", "snr1_db", "snr2_db", "p1", "p2"):
        if key in data:
            setattr(scenario, key, top.number(key))
    for key in ("scheme", "first_mover", "solution"):
        if key in data:
            setattr(scenario, key, top.string(key))

    if "sweep" in data:
        _load_sweep(top.table("sweep"), text, scenario.sweep)
    if "sim" in data:
        _load_sim(top.table("sim"), text, scenario.sim)

    return scenario
