import os
import json
import logging
import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import psutil

from src.allocation.environment import GridConfig, RewardConfig
from src.game.agents import AgentSpec, GameConfig, PolicyKind
from src.geometry.polygon import ConvexPolygon, GeometryError
from src.montecarlo.capture_table import DEFAULT_RATIOS
from src.montecarlo.harness import McConfig, PursuitSuite
from src.td3.agent import Td3Config

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid or unreadable run configuration."""

    def __init__(self, message: str, issues: Optional[List[str]] = None):
        super().__init__(message)
        self.issues = issues or [message]


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    value = os.getenv(name, '').strip()
    if not value:
        return default
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{name} must be an integer, got '{value}'") from None


@dataclass
class LoggingConfig:
    """Logging configuration settings"""
    level: str = "INFO"
    file: str = "swarm_pe.log"
    max_size_mb: int = 10
    backup_count: int = 5
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(funcName)s:%(lineno)d - %(message)s"
    json_logging: bool = False

    @classmethod
    def from_env(cls):
        return cls(
            level=os.getenv('LOG_LEVEL', 'INFO'),
            file=os.getenv('LOG_FILE', 'swarm_pe.log'),
            max_size_mb=_env_int('LOG_MAX_SIZE_MB', 10),
            backup_count=_env_int('LOG_BACKUP_COUNT', 5),
            json_logging=os.getenv('JSON_LOGGING', 'false').lower() == 'true'
        )


@dataclass
class RuntimeConfig:
    """Process-level resources"""
    threads: int = 1

    @classmethod
    def from_env(cls):
        threads = _env_int('SWARM_PE_THREADS', None)
        if threads is None:
            threads = psutil.cpu_count(logical=False) or 1
        return cls(threads=max(1, threads))


@dataclass
class SweepConfig:
    """Pursuer-per-evader ratios and suites covered by a Monte-Carlo sweep"""
    ratios: Tuple[int, ...] = DEFAULT_RATIOS
    policies: Tuple[PursuitSuite, ...] = (PursuitSuite.AREA_MIN, PursuitSuite.PURE_DISTANCE)

    def validate(self) -> List[str]:
        issues = []
        if not self.ratios or any(r < 1 for r in self.ratios):
            issues.append("montecarlo.ratios must be a non-empty list of integers >= 1")
        if not self.policies:
            issues.append("montecarlo.policies must name at least one suite")
        return issues


# JSON key layout of the "montecarlo" section that is not part of McConfig
SWEEP_KEYS = ('ratios', 'policies')


def _check_keys(section: str, data: Dict[str, Any], allowed) -> None:
    if not isinstance(data, dict):
        raise ConfigError(f"{section} must be a JSON object")
    unknown = sorted(set(data) - set(allowed))
    if unknown:
        raise ConfigError(f"Unknown key '{section}.{unknown[0]}'")


def _field_names(cls) -> List[str]:
    return [f.name for f in dataclasses.fields(cls) if f.init]


def _enum(enum_cls, value: Any, name: str):
    try:
        return enum_cls(value)
    except ValueError:
        choices = ", ".join(e.value for e in enum_cls)
        raise ConfigError(f"{name} must be one of {choices}, got '{value}'")


def _pair(value: Any, name: str) -> Tuple[float, float]:
    try:
        x, y = value
        return float(x), float(y)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be a pair [x, y]")


def _box(value: Any, name: str) -> Tuple[float, float, float, float]:
    try:
        xmin, ymin, xmax, ymax = value
        return float(xmin), float(ymin), float(xmax), float(ymax)
    except (TypeError, ValueError):
        raise ConfigError(f"{name} must be [xmin, ymin, xmax, ymax]")


def _agent_specs(section: str, entries: Any) -> List[AgentSpec]:
    if not isinstance(entries, list):
        raise ConfigError(f"{section} must be a list of agents")
    specs = []
    for k, entry in enumerate(entries):
        name = f"{section}[{k}]"
        if isinstance(entry, str):
            entry = {'policy': entry}
        _check_keys(name, entry, ('policy', 'position', 'target'))
        if 'policy' not in entry:
            raise ConfigError(f"{name}.policy is required")
        specs.append(AgentSpec(
            policy=_enum(PolicyKind, entry['policy'], f"{name}.policy"),
            position=_pair(entry['position'], f"{name}.position") if entry.get('position') is not None else None,
            target=_pair(entry['target'], f"{name}.target") if entry.get('target') is not None else None,
        ))
    return specs


def _scalars(section: str, cls, data: Dict[str, Any], skip=()) -> Dict[str, Any]:
    """Coerce plain scalar fields of a config dataclass from JSON values."""
    kwargs = {}
    types = {f.name: f.type for f in dataclasses.fields(cls)}
    for key, value in data.items():
        if key in skip:
            continue
        kind = types[key]
        name = f"{section}.{key}"
        try:
            if kind in (int, 'int'):
                if isinstance(value, bool) or float(value) != int(value):
                    raise ValueError
                kwargs[key] = int(value)
            elif kind in (float, 'float'):
                if isinstance(value, bool):
                    raise ValueError
                kwargs[key] = float(value)
            elif kind in (bool, 'bool'):
                if not isinstance(value, bool):
                    raise ValueError
                kwargs[key] = value
            else:
                kwargs[key] = value
        except (TypeError, ValueError):
            raise ConfigError(f"{name} has invalid value {value!r}")
    return kwargs


def parse_game(data: Dict[str, Any]) -> GameConfig:
    _check_keys("game", data, _field_names(GameConfig))
    special = ('domain', 'pursuers', 'evaders', 'pursuer_box', 'evader_box')
    kwargs = _scalars("game", GameConfig, data, skip=special)
    if 'domain' in data:
        try:
            kwargs['domain'] = ConvexPolygon.from_vertices(data['domain'])
        except (GeometryError, TypeError, ValueError) as e:
            raise ConfigError(f"game.domain is not a valid convex polygon: {e}")
    for key in ('pursuers', 'evaders'):
        if key in data:
            kwargs[key] = _agent_specs(f"game.{key}", data[key])
    for key in ('pursuer_box', 'evader_box'):
        if key in data:
            kwargs[key] = _box(data[key], f"game.{key}")
    return GameConfig(**kwargs)


def parse_montecarlo(data: Dict[str, Any]) -> Tuple[McConfig, SweepConfig]:
    _check_keys("montecarlo", data, [*_field_names(McConfig), *SWEEP_KEYS])
    special = ('suite', 'pursuer_policy', 'evader_policy', 'evader_target',
               'pursuer_box', 'evader_box', *SWEEP_KEYS)
    kwargs = _scalars("montecarlo", McConfig, data, skip=special)
    if 'suite' in data:
        kwargs['suite'] = _enum(PursuitSuite, data['suite'], "montecarlo.suite")
    for key in ('pursuer_policy', 'evader_policy'):
        if data.get(key) is not None:
            kwargs[key] = _enum(PolicyKind, data[key], f"montecarlo.{key}")
    if 'evader_target' in data:
        kwargs['evader_target'] = _pair(data['evader_target'], "montecarlo.evader_target")
    for key in ('pursuer_box', 'evader_box'):
        if key in data:
            kwargs[key] = _box(data[key], f"montecarlo.{key}")

    sweep = SweepConfig()
    if 'ratios' in data:
        try:
            sweep.ratios = tuple(int(r) for r in data['ratios'])
        except (TypeError, ValueError):
            raise ConfigError("montecarlo.ratios must be a list of integers")
    if 'policies' in data:
        if not isinstance(data['policies'], list):
            raise ConfigError("montecarlo.policies must be a list")
        sweep.policies = tuple(
            _enum(PursuitSuite, p, "montecarlo.policies") for p in data['policies']
        )
    return McConfig(**kwargs), sweep


def parse_grid(data: Dict[str, Any]) -> GridConfig:
    _check_keys("grid", data, _field_names(GridConfig))
    kwargs = _scalars("grid", GridConfig, data, skip=('policy',))
    if 'policy' in data:
        kwargs['policy'] = _enum(PursuitSuite, data['policy'], "grid.policy")
    return GridConfig(**kwargs)


def parse_reward(data: Dict[str, Any]) -> RewardConfig:
    _check_keys("reward", data, _field_names(RewardConfig))
    kwargs = _scalars("reward", RewardConfig, data, skip=('table_path',))
    if data.get('table_path') is not None:
        kwargs['table_path'] = str(data['table_path'])
    return RewardConfig(**kwargs)


def parse_td3(data: Dict[str, Any]) -> Td3Config:
    _check_keys("td3", data, _field_names(Td3Config))
    kwargs = _scalars("td3", Td3Config, data, skip=('hidden_sizes',))
    if 'hidden_sizes' in data:
        try:
            kwargs['hidden_sizes'] = tuple(int(h) for h in data['hidden_sizes'])
        except (TypeError, ValueError):
            raise ConfigError("td3.hidden_sizes must be a list of integers")
    return Td3Config(**kwargs)


@dataclass
class RunConfig:
    """Main configuration class aggregating all experiment settings"""
    game: GameConfig = field(default_factory=GameConfig)
    montecarlo: McConfig = field(default_factory=McConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    reward: RewardConfig = field(default_factory=RewardConfig)
    td3: Td3Config = field(default_factory=Td3Config)
    seed: int = 0
    output_dir: str = "out"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        _check_keys("config", data, ('game', 'montecarlo', 'grid', 'reward', 'td3', 'seed', 'output_dir'))
        montecarlo, sweep = parse_montecarlo(data.get('montecarlo', {}))
        seed = data.get('seed', 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ConfigError("seed must be a non-negative integer")
        return cls(
            game=parse_game(data.get('game', {})),
            montecarlo=montecarlo,
            sweep=sweep,
            grid=parse_grid(data.get('grid', {})),
            reward=parse_reward(data.get('reward', {})),
            td3=parse_td3(data.get('td3', {})),
            seed=seed,
            output_dir=str(data.get('output_dir', 'out')),
        )

    @classmethod
    def from_json(cls, path: Path | str) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")
        try:
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path} is not valid JSON: {e}")
        return cls.from_dict(data)

    @classmethod
    def load(cls, path: Optional[Path | str] = None) -> "RunConfig":
        """Defaults when no path is given."""
        return cls.from_json(path) if path else cls()

    def validate(self) -> List[str]:
        """Validate configuration and return list of issues"""
        issues = []
        issues.extend(self.game.validate())
        issues.extend(self.montecarlo.validate(self.game))
        issues.extend(self.sweep.validate())
        issues.extend(self.grid.validate())
        issues.extend(self.reward.validate())
        issues.extend(self.td3.validate())
        if self.td3.action_low != 0.0 or self.td3.action_high != 1.0:
            issues.append("td3 action range must be [0, 1] to drive the allocation environment")
        return issues

    def ensure_valid(self) -> "RunConfig":
        issues = self.validate()
        if issues:
            raise ConfigError("; ".join(issues), issues)
        return self

    def get_summary(self) -> Dict[str, Any]:
        """Get configuration summary"""
        return {
            "seed": self.seed,
            "output_dir": self.output_dir,
            "pursuers": [s.policy.value for s in self.game.pursuers],
            "evaders": [s.policy.value for s in self.game.evaders],
            "capture_radius": self.game.capture_radius,
            "mc_runs": self.montecarlo.n_runs,
            "grid_n": self.grid.n,
            "c_distribution": self.reward.c_distribution,
            "c_capture": self.reward.c_capture,
            "score_orientation": self.reward.score_orientation,
            "td3_episodes": self.td3.episodes,
        }


@dataclass
class Settings:
    """Environment-derived settings"""
    logging: LoggingConfig = None
    runtime: RuntimeConfig = None

    def __post_init__(self):
        self.logging = self.logging or LoggingConfig.from_env()
        self.runtime = self.runtime or RuntimeConfig.from_env()

    @classmethod
    def from_env(cls):
        return cls()
